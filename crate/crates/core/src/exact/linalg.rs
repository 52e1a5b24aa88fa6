//! Dense exact linear algebra over the rationals, plus the few integer
//! lattice reductions the toric layer needs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

pub type RatMatrix = Vec<Vec<Rational>>;
pub type RatVector = Vec<Rational>;

pub fn to_rat_vec(v: &[i64]) -> RatVector {
    v.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()
}

pub fn to_rat_matrix(rows: &[Vec<i64>]) -> RatMatrix {
    rows.iter().map(|r| to_rat_vec(r)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int(a: &[Rational], b: &[i64]) -> Rational {
    a.iter()
        .zip(b)
        .map(|(x, &y)| x * Rational::from_integer(BigInt::from(y)))
        .sum()
}

pub fn int_dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    rank(&to_rat_matrix(rows))
}

/// One solution of `a x = b` (free variables set to zero), or `None` when
/// the system is inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<RatVector> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][cols].clone();
    }
    Some(x)
}

/// Basis of `{x : a x = 0}`.
pub fn nullspace(a: &[Vec<Rational>], cols: usize) -> RatMatrix {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let delta = &f * &a[c][j];
                a[i][j] -= delta;
            }
        }
    }
    det
}

/// Integer determinant by fraction-free (Bareiss) elimination.
pub fn determinant_int(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

pub fn inverse(m: &[Vec<Rational>]) -> Option<RatMatrix> {
    let n = m.len();
    let mut aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> RatVector {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn int_mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| int_dot(row, v)).collect()
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn is_primitive(v: &[i64]) -> bool {
    gcd_slice(v) == 1
}

/// Primitive integer vector on the ray through a rational vector.
pub fn primitive_of(v: &[Rational]) -> Option<Vec<i64>> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return None;
    }
    scaled
        .iter()
        .map(|x| i64::try_from(x / &g).ok())
        .collect()
}

/// Scale a rational vector to a primitive integer vector (same direction).
pub fn primitive_big(v: &[Rational]) -> Option<Vec<BigInt>> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return None;
    }
    Some(scaled.iter().map(|x| x / &g).collect())
}

/// Column reduction of an integer matrix `m` (rows x cols): returns a
/// unimodular `u` (cols x cols) with `m * u = [h | 0]`, and the number of
/// nonzero leading columns of `m * u`.
pub fn column_reduce(m: &[Vec<i64>], cols: usize) -> (usize, Vec<Vec<i64>>) {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut pivot = 0;
    for row in 0..a.len() {
        if pivot == cols {
            break;
        }
        loop {
            // pick the column (>= pivot) with the smallest nonzero entry in this row
            let nz: Vec<usize> = (pivot..cols).filter(|&j| a[row][j] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let best = *nz.iter().min_by_key(|&&j| a[row][j].abs()).unwrap();
            swap_cols(&mut a, &mut u, pivot, best);
            let mut done = true;
            for j in pivot + 1..cols {
                if a[row][j] != 0 {
                    let q = a[row][j].div_euclid(a[row][pivot]);
                    add_col_multiple(&mut a, &mut u, j, pivot, -q);
                    if a[row][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[row][pivot] != 0 {
            pivot += 1;
        }
    }
    let u = u
        .into_iter()
        .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("lattice reduction overflow")).collect())
        .collect();
    (pivot, u)
}

fn swap_cols(a: &mut [Vec<i128>], u: &mut [Vec<i128>], i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in a.iter_mut() {
        r.swap(i, j);
    }
    for r in u.iter_mut() {
        r.swap(i, j);
    }
}

fn add_col_multiple(a: &mut [Vec<i128>], u: &mut [Vec<i128>], target: usize, source: usize, k: i128) {
    for r in a.iter_mut() {
        r[target] += k * r[source];
    }
    for r in u.iter_mut() {
        r[target] += k * r[source];
    }
}

/// Saturated basis (as columns) of the integer kernel of `m`.
pub fn integer_kernel(m: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let (r, u) = column_reduce(m, cols);
    (r..cols).map(|j| u.iter().map(|row| row[j]).collect()).collect()
}

/// Unimodular matrix `u` whose transpose sends the primitive vector `v` to
/// the first basis vector: rows `1..n` of `u^T` are quotient coordinates of
/// `N / Z v`.
pub fn quotient_projection(v: &[i64]) -> Vec<Vec<i64>> {
    let n = v.len();
    let (_, u) = column_reduce(&[v.to_vec()], n);
    // columns 1.. of u span the kernel of v^T in the dual; for the quotient we
    // need a basis (v, w_2, ..) of N, then coordinates w.r.t. it.
    // Here u is unimodular with v^T u = (g, 0, .., 0); so U^T is a dual basis
    // change whose rows 1.. vanish on v.
    let ut = transpose(&u);
    ut[1..].to_vec()
}

pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};

    #[test]
    fn solve_and_inverse() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_vec(&inv, &[int(3), int(5)]), x);
        assert_eq!(determinant(&a), int(5));
        assert!(solve(&[vec![int(1), int(1)], vec![int(2), int(2)]], &[int(1), int(3)]).is_none());
    }

    #[test]
    fn bareiss_matches_rational_determinant() {
        let m = vec![vec![3, -1, 2], vec![0, 4, 1], vec![5, 2, -2]];
        assert_eq!(Rational::from_integer(determinant_int(&m).into()), determinant(&to_rat_matrix(&m)));
    }

    #[test]
    fn integer_kernel_is_saturated() {
        let m = vec![vec![2, 4, 6]];
        let k = integer_kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(int_dot(&m[0], v), 0);
        }
        // saturated: the 2x2 minors have gcd 1
        let minors = [
            k[0][0] * k[1][1] - k[0][1] * k[1][0],
            k[0][0] * k[1][2] - k[0][2] * k[1][0],
            k[0][1] * k[1][2] - k[0][2] * k[1][1],
        ];
        assert_eq!(gcd_slice(&minors), 1);
    }

    #[test]
    fn quotient_kills_the_vector() {
        let v = vec![2, 3, 5];
        let q = quotient_projection(&v);
        assert_eq!(q.len(), 2);
        for row in &q {
            assert_eq!(int_dot(row, &v), 0);
        }
        // surjective onto Z^2: e1, e2, e3 images have 2x2 minors with gcd 1
        let cols: Vec<Vec<i64>> = (0..3).map(|j| q.iter().map(|r| r[j]).collect()).collect();
        let minors = [
            cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0],
            cols[0][0] * cols[2][1] - cols[0][1] * cols[2][0],
            cols[1][0] * cols[2][1] - cols[1][1] * cols[2][0],
        ];
        assert_eq!(gcd_slice(&minors), 1);
    }
}
