use std::sync::Arc;

use crate::error::{Result, TorickError};
use crate::exact::linalg::{int_mat_vec, rank_int, to_rat_vec};

use super::fan::{Fan, Wall};

/// A lattice map N -> N' compatible with the fans: every source cone maps into a target cone.
#[derive(Debug, Clone)]
pub struct ToricMorphism {
    matrix: Vec<Vec<i64>>,
    source: Arc<Fan>,
    target: Arc<Fan>,
    cone_map: Vec<usize>,
}

impl ToricMorphism {
    /// `matrix` has one row per target coordinate.
    pub fn new(matrix: Vec<Vec<i64>>, source: Arc<Fan>, target: Arc<Fan>) -> Result<Self> {
        if matrix.len() != target.rank() {
            return Err(TorickError::InvalidMorphism(format!(
                "matrix has {} rows, target lattice has rank {}",
                matrix.len(),
                target.rank()
            )));
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != source.rank()) {
            return Err(TorickError::InvalidMorphism(format!(
                "matrix row has {} entries, source lattice has rank {}",
                row.len(),
                source.rank()
            )));
        }
        let mut cone_map = Vec::with_capacity(source.max_cones().len());
        for (ci, idx) in source.max_cones().iter().enumerate() {
            let images: Vec<Vec<i64>> = idx.iter().map(|&r| int_mat_vec(&matrix, source.ray(r))).collect();
            let t = target
                .cones()
                .iter()
                .position(|c| images.iter().all(|v| c.contains_int(v)))
                .ok_or_else(|| {
                    TorickError::InvalidMorphism(format!(
                        "image of source cone {ci} {:?} lies in no target cone",
                        idx
                    ))
                })?;
            cone_map.push(t);
        }
        Ok(ToricMorphism { matrix, source, target, cone_map })
    }

    pub fn identity(fan: Arc<Fan>, target: Arc<Fan>) -> Result<Self> {
        let n = fan.rank();
        let m = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        ToricMorphism::new(m, fan, target)
    }

    /// The constant map to the point.
    pub fn to_point(fan: Arc<Fan>) -> Self {
        let cone_map = vec![0; fan.max_cones().len()];
        ToricMorphism { matrix: Vec::new(), source: fan, target: Arc::new(Fan::point()), cone_map }
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn source(&self) -> &Arc<Fan> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Fan> {
        &self.target
    }

    /// Target maximal cone receiving each source maximal cone.
    pub fn cone_map(&self) -> &[usize] {
        &self.cone_map
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        int_mat_vec(&self.matrix, v)
    }

    pub fn is_dominant(&self) -> bool {
        rank_int(&self.matrix) == self.target.rank()
    }

    /// Target rays whose span contains the image of the relative interior of the wall.
    fn wall_base_cone(&self, w: &Wall) -> Vec<usize> {
        let n = self.source.rank();
        let mut y = vec![0i64; n];
        for &r in &w.common {
            for (acc, x) in y.iter_mut().zip(self.source.ray(r)) {
                *acc += x;
            }
        }
        self.target
            .minimal_cone(&to_rat_vec(&self.apply(&y)))
            .expect("image of a source cone lies in the target fan")
    }

    /// The torus-invariant curve of the wall maps to a point.
    pub fn contracts(&self, w: &Wall) -> bool {
        let face = self.wall_base_cone(w);
        let mut rows: Vec<Vec<i64>> = face.iter().map(|&r| self.target.ray(r).to_vec()).collect();
        let before = rank_int(&rows);
        rows.push(self.apply(self.source.ray(w.right_extra)));
        rank_int(&rows) == before
    }

    pub fn contracted_walls(&self) -> Vec<&Wall> {
        self.source.walls().iter().filter(|w| self.contracts(w)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1xp1() -> Arc<Fan> {
        Arc::new(
            Fan::new(
                2,
                vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
                vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
            )
            .unwrap(),
        )
    }

    fn p1() -> Arc<Fan> {
        Arc::new(Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap())
    }

    #[test]
    fn projection_contracts_fibre_walls() {
        let pi = ToricMorphism::new(vec![vec![0, 1]], p1xp1(), p1()).unwrap();
        assert!(pi.is_dominant());
        let contracted: Vec<Vec<usize>> = pi.contracted_walls().iter().map(|w| w.common.clone()).collect();
        assert_eq!(contracted, vec![vec![1], vec![3]]);
        assert!(ToricMorphism::new(vec![vec![1, 1]], p1xp1(), p1()).is_err());
        let to_pt = ToricMorphism::to_point(p1xp1());
        assert_eq!(to_pt.contracted_walls().len(), 4);
    }
}
