//! Discrepancies of toric cones and the search for destabilizing birational models.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::divisors::{find_relatively_ample, support_function, TorusDivisor};
use crate::error::{Result, TorickError};
use crate::exact::linalg::{dot_int, is_primitive, solve, to_rat_matrix, RatVector};
use crate::exact::rational::{common_denominator, from_big, serde_rational, serde_rational_opt, serde_rational_vec, sign_of};
use crate::exact::{Rational, Sign};
use crate::functionals::donaldson_futaki;
use crate::model::FiberedModel;
use crate::polyhedra::hull_int;
use crate::toric::{is_refinement, star_subdivision, Cone, Fan, ToricMorphism};

/// `m` with `<m, v_i> = 1` on every generator.
pub fn gorenstein_functional(c: &Cone) -> Result<RatVector> {
    if c.rays().is_empty() {
        return Ok(vec![Rational::zero(); c.lattice_rank()]);
    }
    let rows = to_rat_matrix(c.rays());
    solve(&rows, &vec![Rational::one(); rows.len()]).ok_or(TorickError::NotQGorenstein)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Terminal,
    CanonicalNotTerminal,
    NotCanonical,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Terminal => "terminal",
            Classification::CanonicalNotTerminal => "canonical-not-terminal",
            Classification::NotCanonical => "not-canonical",
        }
    }

    pub fn is_canonical(self) -> bool {
        self != Classification::NotCanonical
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscrepancyRecord {
    pub ray: Vec<i64>,
    /// `<m, v> - 1`
    #[serde(with = "serde_rational")]
    pub discrepancy: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub classification: Classification,
    #[serde(with = "serde_rational_vec")]
    pub gorenstein: Vec<Rational>,
    /// Primitive non-generator lattice points with `0 < <m, v> <= 1`.
    pub points: Vec<DiscrepancyRecord>,
}

fn discrepancy(m: &[Rational], v: &[i64]) -> Rational {
    dot_int(m, v) - Rational::one()
}

pub fn classify(c: &Cone) -> Result<ClassifyReport> {
    let m = gorenstein_functional(c)?;
    // {v in c : <m, v> <= 1} is the hull of the origin and the generators
    let mut pts = vec![vec![0i64; c.lattice_rank()]];
    pts.extend(c.rays().iter().cloned());
    let slab = hull_int(&pts)?;
    let mut points: Vec<DiscrepancyRecord> = slab
        .lattice_points()
        .into_iter()
        .filter(|v| v.iter().any(|&x| x != 0) && is_primitive(v) && !c.rays().contains(v))
        .map(|v| DiscrepancyRecord { discrepancy: discrepancy(&m, &v), ray: v })
        .collect();
    points.sort_by(|a, b| a.discrepancy.cmp(&b.discrepancy).then_with(|| a.ray.cmp(&b.ray)));
    let classification = if points.iter().any(|p| p.discrepancy.is_negative()) {
        Classification::NotCanonical
    } else if points.is_empty() {
        Classification::Terminal
    } else {
        Classification::CanonicalNotTerminal
    };
    Ok(ClassifyReport { classification, gorenstein: m, points })
}

/// Discrepancy of every ray of `refinement` that is not a generator of `c`.
pub fn discrepancies(c: &Cone, refinement: &Fan) -> Result<Vec<DiscrepancyRecord>> {
    let base = Fan::from_cone(c);
    if is_refinement(refinement, &base).is_none() {
        return Err(TorickError::NotRefinement("fan does not subdivide the cone".into()));
    }
    let m = gorenstein_functional(c)?;
    Ok(refinement
        .rays()
        .iter()
        .filter(|v| !c.rays().contains(v))
        .map(|v| DiscrepancyRecord { ray: v.clone(), discrepancy: discrepancy(&m, v) })
        .collect())
}

/// The birational model `X_fan -> U_c` with the given polarization, marked at the fixed point.
pub fn birational_model(id: &str, c: &Cone, fan: Arc<Fan>, l: Option<TorusDivisor>) -> Result<FiberedModel> {
    let base = Arc::new(Fan::from_cone(c));
    let pi = ToricMorphism::identity(fan.clone(), base)?;
    let l = match l {
        Some(l) => l,
        None => find_relatively_ample(&pi)?,
    };
    FiberedModel::new(id, pi, l, (0..c.rays().len()).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelRecord {
    /// Star subdivision centers, in the order applied.
    pub added: Vec<Vec<i64>>,
    pub fan: Fan,
    pub discrepancies: Vec<DiscrepancyRecord>,
    pub polarization: TorusDivisor,
    /// Least DF over the candidate polarizations.
    #[serde(with = "serde_rational")]
    pub df: Rational,
    pub sign: Sign,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub cone: Vec<Vec<i64>>,
    pub bound: u32,
    pub classification: Classification,
    #[serde(with = "serde_rational_vec")]
    pub gorenstein: Vec<Rational>,
    pub candidates: usize,
    pub models_examined: usize,
    /// Models skipped because an exceptional divisor is not compact or no polarization exists.
    pub models_skipped: usize,
    pub truncated: bool,
    #[serde(with = "serde_rational_opt")]
    pub min_df: Option<Rational>,
    pub best: Option<ModelRecord>,
    pub witness_found: bool,
    pub all_nontrivial_positive: bool,
    pub outcome: &'static str,
    pub note: &'static str,
}

/// Upper limit on the number of subdivision chains examined.
pub const MAX_MODELS: usize = 5000;

/// Primitive lattice points of the cone in the box `[-bound, bound]^n`, other than the generators.
fn candidates(c: &Cone, m: &[Rational], bound: u32) -> Vec<Vec<i64>> {
    let n = c.lattice_rank();
    let b = i64::from(bound);
    let mut out = Vec::new();
    let mut cur = vec![-b; n];
    'outer: loop {
        if cur.iter().any(|&x| x != 0) && is_primitive(&cur) && c.contains_int(&cur) && !c.rays().contains(&cur) {
            out.push(cur.clone());
        }
        for j in (0..n).rev() {
            if cur[j] < b {
                cur[j] += 1;
                cur[j + 1..].iter_mut().for_each(|x| *x = -b);
                continue 'outer;
            }
        }
        break;
    }
    out.sort_by(|a, b| dot_int(m, a).cmp(&dot_int(m, b)).then_with(|| a.cmp(b)));
    out
}

/// The LP polarization, its integral clearing and its Cartier clearing.
fn polarizations(l: &TorusDivisor) -> Result<Vec<TorusDivisor>> {
    let mut out = vec![l.clone()];
    let den = from_big(common_denominator(l.coeffs()));
    let cartier = from_big(support_function(l)?.cartier_index);
    for k in [den, cartier] {
        let scaled = l.scale(&k);
        if !out.contains(&scaled) {
            out.push(scaled);
        }
    }
    Ok(out)
}

fn evaluate(c: &Cone, added: &[Vec<i64>], fan: Arc<Fan>) -> Result<Option<ModelRecord>> {
    let model = match birational_model("search", c, fan.clone(), None) {
        Ok(m) => m,
        Err(TorickError::Unsupported(_)) | Err(TorickError::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut best: Option<(Rational, TorusDivisor)> = None;
    for l in polarizations(model.polarization())? {
        let df = match donaldson_futaki(&model.with_polarization(l.clone())?) {
            Ok(r) => r.df.to_rational().expect("point fiber gives rational DF"),
            Err(TorickError::Unsupported(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|(b, _)| &df < b) {
            best = Some((df, l));
        }
    }
    let (df, polarization) = best.expect("at least one candidate");
    Ok(Some(ModelRecord {
        added: added.to_vec(),
        discrepancies: discrepancies(c, &fan)?,
        fan: (*fan).clone(),
        polarization,
        sign: sign_of(&df),
        df,
    }))
}

/// Star-subdivision chains of length at most `bound` at box points, each
/// polarized by a relatively ample class; reports the least DF found.
pub fn destabilizer_search(c: &Cone, bound: u32) -> Result<SearchReport> {
    let report = classify(c)?;
    let m = &report.gorenstein;
    let pts = candidates(c, m, bound);
    let base = Fan::from_cone(c);
    let mut examined = 0usize;
    let mut skipped = 0usize;
    let mut truncated = false;
    let mut best: Option<ModelRecord> = None;
    let mut all_positive = true;
    // depth-first over increasing index sequences
    let mut stack: Vec<(usize, Vec<Vec<i64>>, Arc<Fan>)> = vec![(0, Vec::new(), Arc::new(base))];
    while let Some((start, added, fan)) = stack.pop() {
        if added.len() as u32 >= bound {
            continue;
        }
        for i in (start..pts.len()).rev() {
            if examined + skipped >= MAX_MODELS {
                truncated = true;
                break;
            }
            let next = Arc::new(star_subdivision(&fan, &pts[i])?);
            let mut chain = added.clone();
            chain.push(pts[i].clone());
            match evaluate(c, &chain, next.clone())? {
                Some(rec) => {
                    examined += 1;
                    all_positive &= rec.sign == Sign::Positive;
                    let better = best.as_ref().is_none_or(|b| {
                        rec.df < b.df || (rec.df == b.df && (rec.added.len(), &rec.added) < (b.added.len(), &b.added))
                    });
                    if better {
                        best = Some(rec);
                    }
                }
                None => skipped += 1,
            }
            stack.push((i + 1, chain, next));
        }
    }
    let min_df = best.as_ref().map(|b| b.df.clone());
    let witness_found = min_df.as_ref().is_some_and(|d| d.is_negative());
    Ok(SearchReport {
        cone: c.rays().to_vec(),
        bound,
        classification: report.classification,
        gorenstein: report.gorenstein.clone(),
        candidates: pts.len(),
        models_examined: examined,
        models_skipped: skipped,
        truncated,
        min_df,
        best,
        witness_found,
        all_nontrivial_positive: examined > 0 && all_positive,
        outcome: if witness_found { "witness" } else { "none-found" },
        note: "a bounded search can exhibit a negative DF but never certifies positivity over all models",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn cone(rays: Vec<Vec<i64>>) -> Cone {
        Cone::new(rays[0].len(), rays).unwrap()
    }

    #[test]
    fn gorenstein_functionals() {
        assert_eq!(gorenstein_functional(&cone(vec![vec![1, 0], vec![0, 1]])).unwrap(), vec![int(1), int(1)]);
        assert_eq!(gorenstein_functional(&cone(vec![vec![1, 0], vec![1, 2]])).unwrap(), vec![int(1), int(0)]);
        assert_eq!(gorenstein_functional(&cone(vec![vec![0, 1], vec![3, -1]])).unwrap(), vec![rat(2, 3), int(1)]);
        let square = cone(vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]]);
        assert_eq!(gorenstein_functional(&square).unwrap(), vec![int(0), int(0), int(1)]);
        let bad = cone(vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 2]]);
        assert_eq!(gorenstein_functional(&bad), Err(TorickError::NotQGorenstein));
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&cone(vec![vec![1, 0], vec![0, 1]])).unwrap().classification, Classification::Terminal);
        let a1 = classify(&cone(vec![vec![1, 0], vec![1, 2]])).unwrap();
        assert_eq!(a1.classification, Classification::CanonicalNotTerminal);
        assert_eq!(a1.points, vec![DiscrepancyRecord { ray: vec![1, 1], discrepancy: int(0) }]);
        let q3 = classify(&cone(vec![vec![0, 1], vec![3, -1]])).unwrap();
        assert_eq!(q3.classification, Classification::NotCanonical);
        assert_eq!(q3.points[0], DiscrepancyRecord { ray: vec![1, 0], discrepancy: rat(-1, 3) });
    }

    #[test]
    fn refinement_discrepancies() {
        let smooth = cone(vec![vec![1, 0], vec![0, 1]]);
        let f = star_subdivision(&Fan::from_cone(&smooth), &[1, 1]).unwrap();
        assert_eq!(discrepancies(&smooth, &f).unwrap()[0].discrepancy, int(1));
        let a1 = cone(vec![vec![1, 0], vec![1, 2]]);
        assert!(discrepancies(&a1, &f).is_err());
    }

    #[test]
    fn search_on_small_cones() {
        let q3 = destabilizer_search(&cone(vec![vec![0, 1], vec![3, -1]]), 1).unwrap();
        assert!(q3.witness_found);
        let a1 = destabilizer_search(&cone(vec![vec![1, 0], vec![1, 2]]), 1).unwrap();
        assert_eq!(a1.min_df, Some(int(0)));
        assert_eq!(a1.best.unwrap().added, vec![vec![1, 1]]);
        let smooth = destabilizer_search(&cone(vec![vec![1, 0], vec![0, 1]]), 1).unwrap();
        assert_eq!(smooth.outcome, "none-found");
        assert!(smooth.all_nontrivial_positive);
    }
}
