//! Polarized toric fibrations `pi: (X, L) -> B` with a marked base stratum.

use std::sync::Arc;

use num_traits::Zero;

use crate::divisors::{pullback_divisor, relative_nef_violation, TorusDivisor};
use crate::error::{Result, TorickError};
use crate::exact::linalg::{integer_kernel, primitive_of, rank_int, solve, to_rat_vec};
use crate::exact::Rational;
use crate::toric::{is_refinement, star_subdivision, Fan, ToricMorphism};

#[derive(Debug, Clone)]
pub struct FiberedModel {
    pub id: String,
    projection: ToricMorphism,
    polarization: TorusDivisor,
    /// Rays of the base cone whose orbit is the marked point `p`.
    marked: Vec<usize>,
}

impl FiberedModel {
    pub fn new(id: impl Into<String>, projection: ToricMorphism, polarization: TorusDivisor, marked: Vec<usize>) -> Result<Self> {
        if **polarization.fan() != **projection.source() {
            return Err(TorickError::MismatchedFans);
        }
        let mut marked = marked;
        marked.sort_unstable();
        marked.dedup();
        let base = projection.target();
        if let Some(&r) = marked.iter().find(|&&r| r >= base.num_rays()) {
            return Err(TorickError::InvalidArgument(format!("marked base ray {r} out of range")));
        }
        if marked.is_empty() && base.rank() > 0 {
            return Err(TorickError::InvalidArgument("no marked base stratum".into()));
        }
        if !base.max_cones().iter().any(|c| marked.iter().all(|r| c.contains(r))) {
            return Err(TorickError::InvalidArgument(format!("marked rays {marked:?} span no cone of the base")));
        }
        Ok(FiberedModel { id: id.into(), projection, polarization, marked })
    }

    pub fn total(&self) -> &Arc<Fan> {
        self.projection.source()
    }

    pub fn base(&self) -> &Arc<Fan> {
        self.projection.target()
    }

    pub fn projection(&self) -> &ToricMorphism {
        &self.projection
    }

    pub fn polarization(&self) -> &TorusDivisor {
        &self.polarization
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    /// `n`, the dimension of the total space.
    pub fn dim(&self) -> usize {
        self.total().rank()
    }

    pub fn base_dim(&self) -> usize {
        self.base().rank()
    }

    pub fn fiber_dim(&self) -> usize {
        self.dim() - self.base_dim()
    }

    pub fn with_polarization(&self, l: TorusDivisor) -> Result<Self> {
        FiberedModel::new(self.id.clone(), self.projection.clone(), l, self.marked.clone())
    }

    pub fn check_dominant(&self) -> Result<()> {
        if self.projection.is_dominant() {
            Ok(())
        } else {
            Err(TorickError::NonDominant { rank: rank_int(self.projection.matrix()), base_rank: self.base_dim() })
        }
    }

    /// Fails with the first contracted wall on which the polarization is negative.
    pub fn check_polarization(&self) -> Result<()> {
        match relative_nef_violation(&self.polarization, &self.projection)? {
            Some(w) => Err(TorickError::NotRelativelyNef { left: w.left, right: w.right }),
            None => Ok(()),
        }
    }

    /// Rays whose image lies in the relative interior of the marked base cone.
    pub fn vertical_rays(&self) -> Vec<usize> {
        let total = self.total();
        (0..total.num_rays())
            .filter(|&r| {
                let image = to_rat_vec(&self.projection.apply(total.ray(r)));
                self.base().minimal_cone(&image).as_deref() == Some(&self.marked[..])
            })
            .collect()
    }

    pub fn check_vertical(&self, e: &TorusDivisor) -> Result<()> {
        let vertical = self.vertical_rays();
        match e.support().into_iter().find(|r| !vertical.contains(r)) {
            Some(r) => Err(TorickError::NotVertical(r)),
            None => Ok(()),
        }
    }

    /// The model pulled back along the star subdivision of the total fan at `v`.
    pub fn refine(&self, v: &[i64]) -> Result<FiberedModel> {
        let fine = Arc::new(star_subdivision(self.total(), v)?);
        let refinement = is_refinement(&fine, self.total())
            .ok_or_else(|| TorickError::NotRefinement("star subdivision".into()))?;
        let l = pullback_divisor(&fine, &refinement, &self.polarization)?;
        let pi = ToricMorphism::new(self.projection.matrix().to_vec(), fine, self.base().clone())?;
        FiberedModel::new(self.id.clone(), pi, l, self.marked.clone())
    }
}

/// The generic fiber as a toric variety in the kernel lattice of the projection.
#[derive(Debug, Clone)]
pub struct GenericFiber {
    pub fan: Arc<Fan>,
    pub polarization: TorusDivisor,
    /// Kernel basis, as vectors of the total lattice.
    pub basis: Vec<Vec<i64>>,
    /// Total-space ray of each fiber ray.
    pub source_rays: Vec<usize>,
}

impl GenericFiber {
    pub fn dim(&self) -> usize {
        self.fan.rank()
    }

    /// A generically finite projection has a zero-dimensional fiber.
    pub fn is_point(&self) -> bool {
        self.fan.rank() == 0
    }
}

pub fn generic_fiber(m: &FiberedModel) -> Result<GenericFiber> {
    m.check_dominant()?;
    let total = m.total();
    let n = total.rank();
    let basis = integer_kernel(m.projection().matrix(), n);
    let d = basis.len();
    if d == 0 {
        let fan = Arc::new(Fan::point());
        return Ok(GenericFiber { polarization: TorusDivisor::zero(fan.clone()), fan, basis, source_rays: Vec::new() });
    }
    // columns of `a` are the kernel basis
    let a: Vec<Vec<Rational>> = (0..n).map(|i| basis.iter().map(|b| Rational::from_integer(b[i].into())).collect()).collect();
    let in_kernel: Vec<bool> = total.rays().iter().map(|v| m.projection().apply(v).iter().all(Zero::is_zero)).collect();
    let mut source_rays = Vec::new();
    let mut rays = Vec::new();
    for (r, v) in total.rays().iter().enumerate() {
        if in_kernel[r] {
            let x = solve(&a, &to_rat_vec(v)).expect("kernel vector lies in the kernel lattice");
            rays.push(primitive_of(&x).expect("nonzero ray"));
            source_rays.push(r);
        }
    }
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for idx in total.max_cones() {
        let face: Vec<usize> = idx
            .iter()
            .filter(|&&r| in_kernel[r])
            .map(|r| source_rays.iter().position(|s| s == r).unwrap())
            .collect();
        if rank_int(&face.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>()) == d && !cones.contains(&face) {
            cones.push(face);
        }
    }
    let fan = Arc::new(Fan::new(d, rays, cones)?);
    let coeffs = source_rays.iter().map(|&r| m.polarization().coeff(r).clone()).collect();
    let polarization = TorusDivisor::new(fan.clone(), coeffs)?;
    Ok(GenericFiber { fan, polarization, basis, source_rays })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersection::self_intersection;
    use crate::exact::int;

    pub(crate) fn p1() -> Arc<Fan> {
        Arc::new(Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap())
    }

    fn p1xp1_model() -> FiberedModel {
        let total = Arc::new(
            Fan::new(
                2,
                vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
                vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
            )
            .unwrap(),
        );
        let pi = ToricMorphism::new(vec![vec![0, 1]], total.clone(), p1()).unwrap();
        let l = TorusDivisor::from_ints(total, &[1, 1, 0, 0]).unwrap();
        FiberedModel::new("p1xp1", pi, l, vec![0]).unwrap()
    }

    #[test]
    fn product_fiber() {
        let m = p1xp1_model();
        assert_eq!(m.vertical_rays(), vec![1]);
        let f = generic_fiber(&m).unwrap();
        assert_eq!(f.dim(), 1);
        assert!(f.fan.is_complete());
        assert_eq!(f.source_rays, vec![0, 2]);
        assert_eq!(self_intersection(&f.polarization).unwrap(), int(1));
    }

    #[test]
    fn birational_fiber_is_a_point() {
        let cone = crate::toric::Cone::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
        let base = Arc::new(Fan::from_cone(&cone));
        let total = Arc::new(star_subdivision(&base, &[1, 1]).unwrap());
        let pi = ToricMorphism::identity(total.clone(), base).unwrap();
        let m = FiberedModel::new("a1", pi, TorusDivisor::zero(total), vec![0, 1]).unwrap();
        assert!(generic_fiber(&m).unwrap().is_point());
        assert_eq!(m.vertical_rays(), vec![m.total().ray_index(&[1, 1]).unwrap()]);
    }

    #[test]
    fn refinement_keeps_projection() {
        let m = p1xp1_model();
        let r = m.refine(&[1, 1]).unwrap();
        assert_eq!(r.total().num_rays(), 5);
        assert_eq!(r.vertical_rays(), vec![1, 4]);
        assert!(r.check_polarization().is_ok());
    }
}
