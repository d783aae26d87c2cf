use proptest::prelude::*;

use rigidlab::cocycles::*;
use rigidlab::{Automorphism64, Field64, Flow64, Weight64};

const CAT: [[i64; 2]; 2] = [[2, 1], [1, 1]];
const TAU: f64 = std::f64::consts::TAU;

fn flow(roof: Field64) -> Flow64 {
    Flow64::new(Automorphism64::new(CAT).unwrap(), roof).unwrap()
}

fn unit_flow() -> Flow64 {
    flow(Field64::constant(1.0))
}

fn field_strategy(max_terms: usize, max_amp: f64) -> impl Strategy<Value = Field64> {
    prop::collection::vec((-2i64..=2, -2i64..=2, -1.0f64..1.0, -1.0f64..1.0), 1..=max_terms).prop_map(
        move |terms| {
            let n = terms.len() as f64;
            let mut f = Field64::zero();
            for (kx, ky, a, b) in terms {
                if (kx, ky) != (0, 0) {
                    f.add_mode([kx, ky], a * max_amp / (2.0 * n), b * max_amp / (2.0 * n));
                }
            }
            f
        },
    )
}

fn weight_strategy() -> impl Strategy<Value = Weight64> {
    (field_strategy(3, 1.0), field_strategy(2, 1.0), 0u32..=2)
        .prop_map(|(g, h, d)| Weight64::fiber_constant(g).add(&Weight64::monomial(h, d)))
}

#[test]
fn cos_sum_fails_on_period_two() {
    // period-2 points solve (A^2 - I) p = 0 on (1/5) Z^2
    let mut orbits: Vec<Vec<(i64, i64)>> = Vec::new();
    for x in 0..5i64 {
        for y in 0..5i64 {
            let fixed = (4 * x + 3 * y) % 5 == 0 && (3 * x + y) % 5 == 0;
            if !fixed || (x, y) == (0, 0) || orbits.iter().any(|o| o.contains(&(x, y))) {
                continue;
            }
            orbits.push(vec![(x, y), ((2 * x + y) % 5, (x + y) % 5)]);
        }
    }
    assert_eq!(orbits.len(), 2);
    let g = |(x, y): (i64, i64)| (TAU * x as f64 / 5.0).cos() + (TAU * y as f64 / 5.0).cos();
    let sums: Vec<f64> = orbits.iter().map(|o| o.iter().map(|&p| g(p)).sum()).collect();
    // fixed point gives c = 2, so a constant class would need 4 on both
    assert!(sums.iter().all(|s| (s - 4.0).abs() > 1.0), "{sums:?}");

    let f = unit_flow();
    let phi = Weight64::fiber_constant(Field64::cos([1, 0], 1.0).add(&Field64::cos([0, 1], 1.0)));
    let rep = periodic_obstructions(&f, &phi, 2, 1e-9).unwrap();
    let mut got: Vec<f64> = rep.entries.iter().filter(|e| e.k == 2).map(|e| e.value).collect();
    let mut want = sums.clone();
    got.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-14);
    }
    match abelian_coboundary_test(&f, &phi, 2, 1e-9).unwrap() {
        AbelianOutcome::Failure { c, row, residual } => {
            assert!((c - 2.0).abs() < 1e-14);
            assert_eq!(row.k, 2);
            assert!(residual > 1.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn abelian_success_with_coboundary_shift() {
    let f = unit_flow();
    let u = Field64::sin([1, 0], 0.3).add(&Field64::cos([1, 1], 0.2));
    let g = Field64::constant(1.7).add(&u.coboundary(&CAT));
    match abelian_coboundary_test(&f, &Weight64::fiber_constant(g), 8, 1e-9).unwrap() {
        AbelianOutcome::Constant { c, max_residual } => {
            assert!((c - 1.7).abs() < 1e-12);
            assert!(max_residual < 1e-12);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn csv_has_one_row_per_orbit() {
    let f = unit_flow();
    let rep = matching_report(&f, &Weight64::one(), &f, &Weight64::one(), 4, 1e-9).unwrap();
    let csv = rep.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], MATCH_CSV_HEADER);
    // 1 + 2 + 5 + 10 prime orbits
    assert_eq!(lines.len(), 1 + 18);
    assert!(lines[1].starts_with("1,0/1,0/1,"), "{}", lines[1]);
}

#[test]
fn default_tolerance_grows_with_k() {
    assert_eq!(default_tolerance::<f64>(9), 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn obstructions_are_linear(phi in weight_strategy(), psi in weight_strategy(),
                               b in -2.0f64..2.0, c in -2.0f64..2.0, roof in field_strategy(2, 0.4)) {
        let f = flow(Field64::constant(1.0).add(&roof));
        let combo = phi.linear_combination(b, &psi, c);
        let rp = periodic_obstructions(&f, &phi, 6, 1e-9).unwrap();
        let rq = periodic_obstructions(&f, &psi, 6, 1e-9).unwrap();
        let rc = periodic_obstructions(&f, &combo, 6, 1e-9).unwrap();
        for ((p, q), r) in rp.entries.iter().zip(&rq.entries).zip(&rc.entries) {
            let want = b * p.value + c * q.value;
            let scale = (b * p.value).abs() + (c * q.value).abs() + r.period;
            prop_assert!((r.value - want).abs() <= 1e-13 * scale, "{} {}", r.value, want);
        }
    }

    #[test]
    fn abelian_success_implies_match(u in field_strategy(3, 0.5), v in field_strategy(2, 0.5),
                                     c in -2.0f64..2.0, perturb in any::<bool>()) {
        let f = unit_flow();
        let mut g = Field64::constant(c).add(&u.coboundary(&CAT));
        if perturb {
            g = g.add(&v);
        }
        let phi = Weight64::fiber_constant(g);
        let tol = default_tolerance::<f64>(6);
        if let AbelianOutcome::Constant { c, .. } = abelian_coboundary_test(&f, &phi, 6, tol).unwrap() {
            let rep = matching_report(&f, &phi, &f, &Weight64::constant(c), 6, tol).unwrap();
            prop_assert_eq!(rep.verdict, Verdict::Matched);
        } else {
            prop_assert!(perturb);
        }
    }

    #[test]
    fn exponent_gap_vanishes_for_conjugate_roofs(roof in field_strategy(2, 0.3), u in field_strategy(2, 0.1)) {
        let r = Field64::constant(1.0).add(&roof);
        let f1 = flow(r.clone());
        let f2 = flow(r.add(&u.coboundary(&CAT)));
        let rep = matching_report(&f1, &Weight64::one(), &f2, &Weight64::one(), 8, 1e-9).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::Matched);
        prop_assert!(rep.max_chi_gap() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn coboundaries_vanish_on_all_orbits(u in field_strategy(4, 2.0), roof in field_strategy(2, 0.4)) {
        let f = flow(Field64::constant(1.0).add(&roof));
        let phi = Weight64::fiber_constant(u.coboundary(&CAT));
        // integrate the base coboundary, not weighted by the roof
        let rep = periodic_obstructions(&unit_flow(), &phi, 10, 1e-11).unwrap();
        prop_assert!(rep.max_abs < 1e-11, "{}", rep.max_abs);
        let cat = f.base().enumerate_periodic_orbits(10).unwrap();
        for o in cat.iter() {
            prop_assert!(f.birkhoff_sum(&u.coboundary(&CAT), o).abs() < 1e-11);
        }
    }
}
