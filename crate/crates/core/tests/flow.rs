use proptest::prelude::*;

use rigidlab::numerics::GaussLegendre;
use rigidlab::{Automorphism64, Error, Field64, Flow32, Flow64, Weight64};

const CAT: [[i64; 2]; 2] = [[2, 1], [1, 1]];
const TAU: f64 = std::f64::consts::TAU;

fn flow(roof: Field64) -> Flow64 {
    Flow64::new(Automorphism64::new(CAT).unwrap(), roof).unwrap()
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

fn roof_strategy() -> impl Strategy<Value = Field64> {
    field_strategy(4, 0.45).prop_map(|f| Field64::constant(1.0).add(&f))
}

/// Direct evaluation of the trigonometric sum.
fn direct_eval(f: &Field64, p: [f64; 2]) -> f64 {
    f.modes()
        .map(|m| {
            let t = TAU * (m.k[0] as f64 * p[0] + m.k[1] as f64 * p[1]);
            m.cos_amp * t.cos() + m.sin_amp * t.sin()
        })
        .sum()
}

#[test]
fn make_suspension_examples() {
    assert_eq!(flow(Field64::constant(1.0)).roof_min(), 1.0);
    let f = flow(Field64::constant(1.0).add(&Field64::cos([1, 0], 0.1)));
    assert!(f.roof_min() >= 0.9 - 1e-15);
    let bad = Flow64::new(
        Automorphism64::new(CAT).unwrap(),
        Field64::constant(1.0).add(&Field64::cos([1, 0], 1.5)),
    );
    assert!(matches!(bad, Err(Error::NonPositiveRoof { .. })));
}

#[test]
fn orbit_flow_data_examples() {
    let log_lambda = 0.9624236501192069;
    let unit = flow(Field64::constant(1.0));
    let cat = unit.base().enumerate_periodic_orbits(6).unwrap();
    let d = unit.orbit_flow_data(&cat.of_period(1)[0]);
    assert_eq!(d.period, 1.0);
    assert!((d.exponent - log_lambda).abs() < 1e-14);
    for o in cat.iter() {
        let d = unit.orbit_flow_data(o);
        assert_eq!(d.period, o.prime_period as f64);
        assert!((d.exponent - log_lambda).abs() < 1e-14);
    }
    let f = flow(Field64::constant(1.0).add(&Field64::cos([1, 0], 0.1)));
    let d = f.orbit_flow_data(&cat.of_period(1)[0]);
    assert!((d.period - 1.1).abs() < 1e-15);
    assert!((d.exponent - log_lambda / 1.1).abs() < 1e-14);
    assert!(d.multiplier > 0.0 && d.multiplier < 1.0);
}

#[test]
fn weight_integral_examples() {
    let unit = flow(Field64::constant(1.0));
    let s = Weight64::monomial(Field64::constant(1.0), 1);
    let cat = unit.base().enumerate_periodic_orbits(7).unwrap();
    for o in cat.iter() {
        let v = unit.weight_integral(&s, o);
        assert!((v - o.prime_period as f64 / 2.0).abs() < 1e-13);
    }

    let roof = Field64::constant(1.0)
        .add(&Field64::cos([1, 0], 0.1))
        .add(&Field64::sin([1, -1], 0.05));
    let g = Field64::sin([0, 1], 0.7).add(&Field64::cos([2, 1], -0.3));
    let f = flow(roof.clone());
    for o in cat.iter() {
        let direct: f64 = o
            .points
            .iter()
            .map(|p| {
                let q = p.to_f64();
                direct_eval(&g, q) * direct_eval(&roof, q)
            })
            .sum();
        let v = f.weight_integral(&Weight64::fiber_constant(g.clone()), o);
        assert!((v - direct).abs() < 1e-13, "{v} {direct}");
        let t = f.period(o);
        assert!((f.weight_integral(&Weight64::one(), o) - t).abs() < 1e-14 * t);
    }
}

#[test]
fn single_precision_flow() {
    let f = Flow32::new(
        rigidlab::Automorphism32::new(CAT).unwrap(),
        rigidlab::Field32::constant(1.0).add(&rigidlab::Field32::cos([1, 0], 0.1)),
    )
    .unwrap();
    let cat = f.base().enumerate_periodic_orbits(1).unwrap();
    assert!((f.period(&cat.of_period(1)[0]) - 1.1).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn periods_and_exponents(roof in roof_strategy()) {
        let f = flow(roof);
        let cat = f.base().enumerate_periodic_orbits(6).unwrap();
        for o in cat.iter() {
            let d = f.orbit_flow_data(o);
            prop_assert!(d.period >= o.prime_period as f64 * f.roof_min());
            let mu = (-d.exponent * d.period).exp();
            prop_assert!((mu - d.multiplier).abs() < 1e-12 * d.multiplier);
        }
    }

    #[test]
    fn quadrature_is_exact(roof in roof_strategy(), g in field_strategy(3, 1.0), d in 0u32..=5) {
        let f = flow(roof);
        let phi = Weight64::monomial(Field64::constant(0.5).add(&g), d)
            .add(&Weight64::monomial(g.clone(), d / 2));
        let cat = f.base().enumerate_periodic_orbits(4).unwrap();
        let fine = GaussLegendre::new(2 * (d as usize + 2));
        for o in cat.iter() {
            let a = f.weight_integral(&phi, o);
            let b = f.weight_integral_with_rule(&fine, &phi, o);
            prop_assert!((a - b).abs() < 1e-13 * (1.0 + b.abs()), "{a} {b}");
        }
    }

    #[test]
    fn text_round_trip(g in field_strategy(5, 2.0), d in 0u32..4) {
        prop_assert_eq!(Field64::parse(&g.to_text()).unwrap(), g.clone());
        let w = Weight64::monomial(g.clone(), d).add(&Weight64::one());
        prop_assert_eq!(Weight64::parse(&w.to_text()).unwrap(), w);
    }

    #[test]
    fn derivatives_match_central_differences(g in field_strategy(4, 1.0), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let h = 1e-4;
        let scale = g.modes().map(|m| m.cos_amp.abs() + m.sin_amp.abs()).sum::<f64>() + 1e-300;
        let freq = TAU * 2.0;
        let grad = g.gradient([x, y]);
        let fd = [
            (g.eval([x + h, y]) - g.eval([x - h, y])) / (2.0 * h),
            (g.eval([x, y + h]) - g.eval([x, y - h])) / (2.0 * h),
        ];
        for i in 0..2 {
            prop_assert!((grad[i] - fd[i]).abs() < 1e-6 * scale * freq, "{:?} {:?}", grad, fd);
        }
        let hess = g.hessian([x, y]);
        let gx = |p: [f64; 2]| g.gradient(p);
        let col = [
            [(gx([x + h, y])[0] - gx([x - h, y])[0]) / (2.0 * h), (gx([x, y + h])[0] - gx([x, y - h])[0]) / (2.0 * h)],
            [(gx([x + h, y])[1] - gx([x - h, y])[1]) / (2.0 * h), (gx([x, y + h])[1] - gx([x, y - h])[1]) / (2.0 * h)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((hess[i][j] - col[i][j]).abs() < 1e-6 * scale * freq * freq);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn coboundary_leaves_periods_unchanged(roof in field_strategy(2, 0.2), u in field_strategy(2, 0.1)) {
        let r = Field64::constant(1.0).add(&roof);
        let f = flow(r.clone());
        let g = flow(r.add(&u.coboundary(&CAT)));
        let cat = f.base().enumerate_periodic_orbits(10).unwrap();
        for o in cat.iter() {
            prop_assert!((f.period(o) - g.period(o)).abs() < 1e-12);
        }
    }
}
