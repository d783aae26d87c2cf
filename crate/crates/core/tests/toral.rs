use proptest::prelude::*;

use rigidlab::toral::{mobius, prime_orbit_count_from_traces, RationalPoint};
use rigidlab::{Automorphism32, Automorphism64, Error, HomoclinicPoint, ShadowingPoint};

const CAT: [[i64; 2]; 2] = [[2, 1], [1, 1]];

fn cat() -> Automorphism64 {
    Automorphism64::new(CAT).unwrap()
}

fn sqrt5() -> f64 {
    5f64.sqrt()
}

/// Unit eigenvectors of the cat map from the closed form.
fn unit_eigenvectors() -> ([f64; 2], [f64; 2]) {
    let g = (sqrt5() - 1.0) / 2.0;
    let nu = 1.0 / (1.0 + g * g).sqrt();
    let gs = -(sqrt5() + 1.0) / 2.0;
    let ns = 1.0 / (1.0 + gs * gs).sqrt();
    ([nu, g * nu], [ns, gs * ns])
}

fn parallel(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).abs()
}

/// Number of solutions of `A^k p = p` on the grid `(1/D) Z^2`.
fn brute_fixed_count(k: usize) -> u64 {
    let mut m = [[1i64, 0], [0, 1]];
    for _ in 0..k {
        m = [
            [2 * m[0][0] + m[0][1], m[0][0] + m[0][1]],
            [2 * m[1][0] + m[1][1], m[1][0] + m[1][1]],
        ];
    }
    let d = ((m[0][0] - 1) * (m[1][1] - 1) - m[0][1] * m[1][0]).abs();
    let mut count = 0;
    for x in 0..d {
        for y in 0..d {
            let fx = ((m[0][0] - 1) * x + m[0][1] * y).rem_euclid(d);
            let fy = (m[1][0] * x + (m[1][1] - 1) * y).rem_euclid(d);
            if fx == 0 && fy == 0 {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn eigendata() {
    let a = cat();
    let lambda = (3.0 + sqrt5()) / 2.0;
    assert!((a.lambda() - lambda).abs() < 1e-14);
    assert!((a.log_lambda() - 0.9624236501192069).abs() < 1e-14);
    let (eu, es) = unit_eigenvectors();
    assert!(parallel(a.e_u(), eu) < 1e-15);
    assert!(parallel(a.e_s(), es) < 1e-15);
    let au = a.apply(a.e_u());
    assert!((au[0] - lambda * a.e_u()[0]).abs() < 1e-14);
}

#[test]
fn periodic_counts() {
    let a = cat();
    for (k, fixed, orbits) in [(1usize, 1u64, 1usize), (2, 5, 2), (3, 16, 5)] {
        assert_eq!(a.fixed_point_count(k).unwrap(), fixed);
        assert_eq!(brute_fixed_count(k), fixed);
        let cat = a.enumerate_periodic_orbits(k).unwrap();
        assert_eq!(cat.of_period(k).len(), orbits, "k = {k}");
    }
    let cat = a.enumerate_periodic_orbits(3).unwrap();
    assert_eq!(cat.len(), 8);
    assert_eq!(cat.of_period(1)[0].representative(), RationalPoint::new(0, 0, 1));
}

#[test]
fn fixed_point_counts_against_brute_force() {
    let a = cat();
    for k in 1..=8 {
        assert_eq!(a.fixed_point_count(k).unwrap(), brute_fixed_count(k), "k = {k}");
    }
}

#[test]
fn homoclinic_unit_shift() {
    let a = cat();
    let h = HomoclinicPoint::new(&a, [1, 0]).unwrap();
    // solve alpha e_u - beta e_s = (1, 0) by Cramer's rule
    let (eu, es) = unit_eigenvectors();
    let det = eu[0] * (-es[1]) - (-es[0]) * eu[1];
    let alpha = (-es[1]) / det;
    let beta = -(eu[0] * 0.0 - eu[1]) / det;
    assert!((h.alpha.abs() - alpha.abs()).abs() < 1e-14);
    assert!((h.beta.abs() - beta.abs()).abs() < 1e-14);
    let au = h.alpha * a.e_u()[0];
    let bs = h.beta * a.e_s()[0];
    assert!((au - 0.723607).abs() < 1e-6);
    assert!((bs + 0.276393).abs() < 1e-6);
    assert!((h.position[0] - 0.723607).abs() < 1e-6);
    assert!((h.position[1] - 0.447214).abs() < 1e-6);
    assert!(h.distance_to_unstable_line(&a) < 1e-12);
    assert!(h.distance_to_stable_line(&a) < 1e-12);
    assert!(h.defining_residual(&a) < 1e-15);
}

#[test]
fn homoclinic_errors_and_other_shifts() {
    let a = cat();
    assert!(matches!(HomoclinicPoint::new(&a, [0, 0]), Err(Error::InvalidArgument(_))));
    let h = HomoclinicPoint::new(&a, [0, 1]).unwrap();
    assert!(h.distance_to_unstable_line(&a) < 1e-12);
    assert!(h.distance_to_stable_line(&a) < 1e-12);
}

#[test]
fn shadowing_distance_decays_like_half_period() {
    let a = cat();
    let h = HomoclinicPoint::new(&a, [1, 0]).unwrap();
    let scaled: Vec<f64> = (6..=40)
        .map(|n| {
            let q = ShadowingPoint::new(&a, &h, n).unwrap();
            assert!(q.satisfies_lattice_relation(&a, [1, 0]));
            q.shadowing_distance(&a, &h) * a.lambda().powf(n as f64 / 2.0)
        })
        .collect();
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.0 && hi / lo < 4.0, "{lo} {hi}");
}

#[test]
fn shadowing_index_limits() {
    let a = cat();
    let h = HomoclinicPoint::new(&a, [1, 0]).unwrap();
    assert!(matches!(ShadowingPoint::new(&a, &h, 1), Err(Error::InvalidArgument(_))));
    assert!(ShadowingPoint::new(&a, &h, 60).unwrap_err().is_numeric_gate());
}

#[test]
fn single_precision_instance() {
    let a = Automorphism32::new(CAT).unwrap();
    assert!((a.lambda() - 2.618034).abs() < 1e-6);
    assert_eq!(a.fixed_point_count(5).unwrap(), 121);
    let h = HomoclinicPoint::new(&a, [1, 0]).unwrap();
    assert!((h.position[0] - 0.723607).abs() < 1e-5);
}

#[test]
fn invalid_matrices() {
    assert!(matches!(Automorphism64::new([[1, 1], [0, 1]]), Err(Error::NotHyperbolic { .. })));
    assert!(matches!(Automorphism64::new([[2, 0], [0, 1]]), Err(Error::NotUnimodular { .. })));
}

proptest! {
    #[test]
    fn eigen_round_trip(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let a = cat();
        let (u, s) = a.to_eigen([x, y]);
        let p = a.from_eigen(u, s);
        prop_assert!((p[0] - x).abs() < 1e-14 && (p[1] - y).abs() < 1e-14);
    }

    #[test]
    fn homoclinic_orbit_contracts(mx in -3i64..=3, my in -3i64..=3, j in 4i64..10) {
        prop_assume!((mx, my) != (0, 0));
        let a = cat();
        let h = HomoclinicPoint::new(&a, [mx, my]).unwrap();
        let (eu, es) = (a.e_u(), a.e_s());
        // forward points lie on the stable line, backward on the unstable one
        let lift = |j| {
            let p = h.orbit_point(&a, j);
            let mut best = [f64::INFINITY, 0.0];
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let q = [p[0] + dx as f64, p[1] + dy as f64];
                    if q[0].hypot(q[1]) < best[0].hypot(best[1]) {
                        best = q;
                    }
                }
            }
            best
        };
        let len = |j| {
            let q: [f64; 2] = lift(j);
            q[0].hypot(q[1])
        };
        let r = len(j + 1) / len(j);
        prop_assert!((r - 1.0 / a.lambda()).abs() < 1e-10, "{r}");
        let rb = len(-j - 2) / len(-j - 1);
        prop_assert!((rb - 1.0 / a.lambda()).abs() < 1e-10, "{rb}");
        prop_assert!(parallel(lift(j), es) < 1e-12 * len(j).max(1e-3));
        prop_assert!(parallel(lift(-j - 1), eu) < 1e-12 * len(-j - 1).max(1e-3));
    }

    #[test]
    fn shadowing_points_are_periodic(n in 2usize..=40, mx in -2i64..=2, my in -2i64..=2) {
        prop_assume!((mx, my) != (0, 0));
        let a = cat();
        let h = HomoclinicPoint::new(&a, [mx, my]).unwrap();
        let q = ShadowingPoint::new(&a, &h, n).unwrap();
        prop_assert!(q.satisfies_lattice_relation(&a, [mx, my]));
        prop_assert!(q.periodicity_residual(&a) < 1e-12);
        let (u, s) = q.eigen_coords_from_lift(&a);
        prop_assert!((u - q.unstable_coord).abs() < 1e-12 * (1.0 + u.abs()));
        prop_assert!((s - q.stable_coord).abs() < 1e-12 * (1.0 + s.abs()));
    }

    #[test]
    fn trace_formula_matches_enumeration(k in 1usize..=9) {
        let a = cat();
        let cat = a.enumerate_periodic_orbits(k).unwrap();
        let n = prime_orbit_count_from_traces(&a, k).unwrap();
        prop_assert_eq!(cat.of_period(k).len() as u64, n);
        let mut moebius = 0i64;
        for d in 1..=k {
            if k % d == 0 {
                moebius += mobius(k / d) * a.fixed_point_count(d).unwrap() as i64;
            }
        }
        prop_assert_eq!(moebius as u64, n * k as u64);
    }
}
