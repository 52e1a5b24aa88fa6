use proptest::prelude::*;
use torick::exact::{int, Rational};
use torick::polyhedra::{hull_int, minkowski_sum, mixed_intersection, normalized_volume, RationalPolytope};

fn shoelace(points: &[Vec<i64>]) -> i64 {
    // monotone chain hull, then twice the signed area
    let mut pts: Vec<(i64, i64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return 0;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let mut area2 = 0;
    for i in 0..lower.len() {
        let (a, b) = (lower[i], lower[(i + 1) % lower.len()]);
        area2 += a.0 * b.1 - a.1 * b.0;
    }
    area2.abs()
}

fn points(dim: usize, max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, dim), 1..=max)
}

fn poly(pts: &[Vec<i64>]) -> RationalPolytope {
    hull_int(pts).unwrap()
}

fn apply(m: &[[i64; 3]; 3], pts: &[Vec<i64>]) -> Vec<Vec<i64>> {
    pts.iter()
        .map(|p| (0..3).map(|i| (0..3).map(|j| m[i][j] * p[j]).sum()).collect())
        .collect()
}

fn det3(m: &[[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn planar_volume_matches_shoelace(pts in points(2, 9)) {
        prop_assert_eq!(normalized_volume(&poly(&pts)), int(shoelace(&pts)));
    }

    #[test]
    fn vertices_are_contained_and_points_inside(pts in points(3, 8)) {
        let p = poly(&pts);
        for q in &pts {
            let x: Vec<Rational> = q.iter().map(|&v| int(v)).collect();
            prop_assert!(p.contains(&x));
        }
        let again = hull_int(&p.vertices().iter().map(|v| v.iter().map(|x| x.to_integer().try_into().unwrap()).collect()).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(again, p);
    }

    #[test]
    fn volume_scales_by_determinant(pts in points(3, 7), m in prop::array::uniform3(prop::array::uniform3(-2i64..=2))) {
        let v = normalized_volume(&poly(&pts));
        let w = normalized_volume(&poly(&apply(&m, &pts)));
        prop_assert_eq!(w, v * int(det3(&m).abs()));
    }

    #[test]
    fn diagonal_symmetry_multilinearity(a in points(3, 5), b in points(3, 4), c in points(3, 4)) {
        let (pa, pb, pc) = (poly(&a), poly(&b), poly(&c));
        let diag = mixed_intersection(&[pa.clone(), pa.clone(), pa.clone()]).unwrap();
        prop_assert_eq!(diag, normalized_volume(&pa));

        let abc = mixed_intersection(&[pa.clone(), pb.clone(), pc.clone()]).unwrap();
        let cab = mixed_intersection(&[pc.clone(), pa.clone(), pb.clone()]).unwrap();
        let bac = mixed_intersection(&[pb.clone(), pa.clone(), pc.clone()]).unwrap();
        prop_assert_eq!(&abc, &cab);
        prop_assert_eq!(&abc, &bac);
        prop_assert!(abc >= int(0));

        let sum = minkowski_sum(&pa, &pb).unwrap();
        let lhs = mixed_intersection(&[sum, pc.clone(), pc.clone()]).unwrap();
        let rhs = mixed_intersection(&[pa, pc.clone(), pc.clone()]).unwrap()
            + mixed_intersection(&[pb, pc.clone(), pc]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn diagonal_in_dimension_four() {
    let simplex = poly(&[vec![0, 0, 0, 0], vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
    let cube_pts: Vec<Vec<i64>> = (0..16).map(|m| (0..4).map(|j| (m >> j) & 1).collect()).collect();
    let cube = poly(&cube_pts);
    assert_eq!(normalized_volume(&cube), int(24));
    assert_eq!(mixed_intersection(&vec![cube.clone(); 4]).unwrap(), int(24));
    assert_eq!(mixed_intersection(&vec![simplex.clone(); 4]).unwrap(), int(1));
    // mixed volume of a simplex and unit segments along the axes
    let seg = |j: usize| {
        let mut e = vec![0; 4];
        e[j] = 1;
        poly(&[vec![0; 4], e])
    };
    assert_eq!(mixed_intersection(&[seg(0), seg(1), seg(2), seg(3)]).unwrap(), int(1));
    assert_eq!(mixed_intersection(&[seg(0), seg(0), seg(2), seg(3)]).unwrap(), int(0));
}
