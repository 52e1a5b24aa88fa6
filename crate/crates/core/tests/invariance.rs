use std::path::Path;
use std::sync::Arc;

use torick::divisors::{orbit_restriction, pullback_divisor, TorusDivisor};
use torick::exact::int;
use torick::functionals::{donaldson_futaki, normalized_volume_v};
use torick::intersection::intersection_number;
use torick::io::load_model;
use torick::model::FiberedModel;
use torick::singularities::{classify, Classification};
use torick::toric::{is_refinement, star_subdivision, Cone, Fan, ToricMorphism};

fn model(name: &str) -> FiberedModel {
    load_model(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

fn mat_vec(g: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    g.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    a.iter().map(|row| (0..b[0].len()).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect()).collect()
}

/// Unimodular `g` and its inverse in dimension `n` (a product of two shears).
fn shear(n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let id = |i: usize, j: usize| i64::from(i == j);
    let mut a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| id(i, j)).collect()).collect();
    let mut b = a.clone();
    let mut ai = a.clone();
    let mut bi = a.clone();
    a[0][n - 1] = 2;
    ai[0][n - 1] = -2;
    b[n - 1][0] = -1;
    bi[n - 1][0] = 1;
    (mat_mul(&a, &b), mat_mul(&bi, &ai))
}

fn transformed(m: &FiberedModel) -> FiberedModel {
    let n = m.dim();
    let (g, gi) = shear(n);
    let total = m.total();
    let rays = total.rays().iter().map(|v| mat_vec(&g, v)).collect();
    let mut fan = Fan::new(n, rays, total.max_cones().to_vec()).unwrap();
    if let Some(w) = total.ample_witness() {
        fan = fan.with_ample(w.to_vec()).unwrap();
    }
    let fan = Arc::new(fan);
    let pi = ToricMorphism::new(mat_mul(m.projection().matrix(), &gi), fan.clone(), m.base().clone()).unwrap();
    let l = TorusDivisor::new(fan, m.polarization().coeffs().to_vec()).unwrap();
    FiberedModel::new(m.id.clone(), pi, l, m.marked().to_vec()).unwrap()
}

#[test]
fn invariants_do_not_depend_on_lattice_coordinates() {
    for name in ["p1xp1.model", "p2xp1.model", "dnc-p2.model", "mult2.model", "a1-crepant.model"] {
        let m = model(name);
        let t = transformed(&m);
        assert_eq!(normalized_volume_v(&m).unwrap(), normalized_volume_v(&t).unwrap(), "{name}");
        assert_eq!(donaldson_futaki(&m).unwrap().df, donaldson_futaki(&t).unwrap().df, "{name}");
    }
}

#[test]
fn intersection_numbers_survive_refinement() {
    let m = model("dnc-p2.model");
    let coarse = m.total().clone();
    let fine = Arc::new(star_subdivision(&coarse, &[1, 1, 0]).unwrap());
    let refinement = is_refinement(&fine, &coarse).unwrap();
    let divisors: Vec<TorusDivisor> = (0..coarse.num_rays()).map(|i| TorusDivisor::prime(coarse.clone(), i)).collect();
    for a in 0..divisors.len() {
        for b in a..divisors.len() {
            for c in b..divisors.len() {
                let down = intersection_number(&[divisors[a].clone(), divisors[b].clone(), divisors[c].clone()]).unwrap();
                let up: Vec<TorusDivisor> =
                    [a, b, c].iter().map(|&i| pullback_divisor(&fine, &refinement, &divisors[i]).unwrap()).collect();
                assert_eq!(intersection_number(&up).unwrap(), down, "D{a} D{b} D{c}");
            }
        }
    }
}

#[test]
fn restriction_to_divisor_matches_global_product() {
    let m = model("p2xp1.model");
    let fan = m.total().clone();
    let k = fan.num_rays();
    let l = m.polarization().clone();
    let other = TorusDivisor::from_ints(fan.clone(), &[1, -2, 0, 3, 1]).unwrap();
    for rho in 0..k {
        let r = orbit_restriction(&fan, rho).unwrap();
        assert!(r.is_compact());
        let global = intersection_number(&[TorusDivisor::prime(fan.clone(), rho), l.clone(), other.clone()]).unwrap();
        let local = intersection_number(&[r.restrict(&l).unwrap(), r.restrict(&other).unwrap()]).unwrap();
        assert_eq!(global, local, "ray {rho}");
    }
}

#[test]
fn classification_is_unimodular_invariant() {
    let cases = [
        (vec![vec![1, 0], vec![1, 2]], Classification::CanonicalNotTerminal),
        (vec![vec![0, 1], vec![3, -1]], Classification::NotCanonical),
        (vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 2]], Classification::Terminal),
        (vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 3]], Classification::Terminal),
        (vec![vec![1, 0, 0], vec![0, 1, 0], vec![-1, -1, 3]], Classification::CanonicalNotTerminal),
        (vec![vec![1, 0, 0], vec![0, 1, 0], vec![-1, -1, 5]], Classification::NotCanonical),
    ];
    for (rays, expected) in cases {
        let n = rays[0].len();
        let (g, _) = shear(n);
        let c = Cone::new(n, rays.clone()).unwrap();
        let moved = Cone::new(n, rays.iter().map(|v| mat_vec(&g, v)).collect()).unwrap();
        let (a, b) = (classify(&c).unwrap(), classify(&moved).unwrap());
        assert_eq!(a.classification, expected, "{rays:?}");
        assert_eq!(b.classification, expected, "{rays:?}");
        let mut da: Vec<_> = a.points.iter().map(|p| p.discrepancy.clone()).collect();
        let mut db: Vec<_> = b.points.iter().map(|p| p.discrepancy.clone()).collect();
        da.sort();
        db.sort();
        assert_eq!(da, db);
        assert!(da.iter().all(|d| *d > int(-1)) || expected == Classification::NotCanonical);
    }
}
