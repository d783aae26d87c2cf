//! The longitudinal cocycle: mixed partial of the (weighted) return time at a
//! periodic orbit, in the coordinates `q = p + x e_u + y e_s` on the section
//! `{fiber = 0}`.

use crate::error::{Error, Result};
use crate::field::{FiberWeight, ScalarField};
use crate::flow::SuspensionFlow;
use crate::numerics::{richardson_even, DoubleDouble as DD};
use crate::scalar::Scalar;
use crate::toral::{MapOrbit, RationalPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CocycleMethod {
    Analytic,
    FiniteDifference,
}

impl CocycleMethod {
    pub fn name(&self) -> &'static str {
        match self {
            CocycleMethod::Analytic => "analytic",
            CocycleMethod::FiniteDifference => "finite_difference",
        }
    }
}

/// Options for the cocycle evaluation. `gauge = (a, b)` replaces the unit
/// eigenvectors by `a e_u` and `b e_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CocycleOptions {
    pub h0: f64,
    pub levels: usize,
    pub gauge: (f64, f64),
}

impl Default for CocycleOptions {
    fn default() -> Self {
        Self {
            h0: 1e-3,
            levels: 3,
            gauge: (1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleValue<S> {
    pub k: usize,
    pub representative: RationalPoint,
    pub value: S,
    pub method: CocycleMethod,
}

/// Largest rounding error of the finite-difference stencil allowed before the
/// step is rejected.
const FD_ROUNDING_LIMIT: f64 = 1e-10;
/// Relative precision of double-double arithmetic.
const DD_EPS: f64 = 4.93e-32;

struct Frame {
    e_u: [DD; 2],
    e_s: [DD; 2],
    unstable: DD,
    stable: DD,
}

fn frame<S: Scalar>(flow: &SuspensionFlow<S>, gauge: (f64, f64)) -> Frame {
    let eig = flow.base().eig_dd();
    let a = DD::from_f64(gauge.0);
    let b = DD::from_f64(gauge.1);
    Frame {
        e_u: [eig.e_u[0] * a, eig.e_u[1] * a],
        e_s: [eig.e_s[0] * b, eig.e_s[1] * b],
        unstable: eig.unstable,
        stable: eig.stable,
    }
}

/// `sum_i Hess W(A^i p)[A^i e_u, A^i e_s]` where `W` is the integrated roof
/// `x -> int_0^{r(x)} phi(x, s) ds`.
fn analytic_value<S: Scalar>(
    w: &ScalarField<S>,
    orbit: &MapOrbit<S>,
    fr: &Frame,
) -> S {
    let mut acc = DD::ZERO;
    let mut cu = DD::ONE;
    let mut cs = DD::ONE;
    for p in &orbit.points {
        let v = [fr.e_u[0] * cu, fr.e_u[1] * cu];
        let s = [fr.e_s[0] * cs, fr.e_s[1] * cs];
        acc = acc + w.hessian_form_dd(p.to_dd(), v, s);
        cu = cu * fr.unstable;
        cs = cs * fr.stable;
    }
    S::lit(acc.to_f64())
}

fn apply_mod1(m: &[[i64; 2]; 2], z: [DD; 2]) -> [DD; 2] {
    let c = |v: i64| DD::from_f64(v as f64);
    [
        (c(m[0][0]) * z[0] + c(m[0][1]) * z[1]).fract(),
        (c(m[1][0]) * z[0] + c(m[1][1]) * z[1]).fract(),
    ]
}

/// The `k`-step weighted return time from the section point `q`.
fn return_integral<S: Scalar>(
    flow: &SuspensionFlow<S>,
    phi: &FiberWeight<S>,
    q: [DD; 2],
    k: usize,
) -> DD {
    let m = flow.base().matrix();
    let mut z = [q[0].fract(), q[1].fract()];
    let mut acc = DD::ZERO;
    for _ in 0..k {
        acc = acc + phi.fiber_integral_dd(z, flow.roof().eval_dd(z));
        z = apply_mod1(m, z);
    }
    acc
}

/// Mixed partial of `f(p + x e_u + y e_s)` at 0 by the cross stencil and
/// Richardson extrapolation over `h0, h0/2, ...`. The unstable step is
/// divided by `lambda^(k-1)` so that no iterate of the stencil leaves the
/// `h0` neighbourhood along the orbit.
fn mixed_partial<F>(
    f: F,
    p: [DD; 2],
    fr: &Frame,
    k: usize,
    opts: &CocycleOptions,
    scale: f64,
) -> Result<f64>
where
    F: Fn([DD; 2]) -> DD,
{
    let levels = opts.levels.max(1);
    let stretch = fr.unstable.powi(k.saturating_sub(1) as u32).to_f64();
    let h_min = opts.h0 / 2f64.powi(levels as i32 - 1);
    let bound = if opts.h0.is_finite() && h_min > 0.0 {
        4.0 * DD_EPS * scale * stretch / (h_min * h_min)
    } else {
        f64::INFINITY
    };
    if !(bound <= FD_ROUNDING_LIMIT) {
        return Err(Error::StepTooSmall { bound });
    }
    let point = |x: DD, y: DD| {
        [
            p[0] + x * fr.e_u[0] + y * fr.e_s[0],
            p[1] + x * fr.e_u[1] + y * fr.e_s[1],
        ]
    };
    let mut values = Vec::with_capacity(levels);
    let mut h = opts.h0;
    for _ in 0..levels {
        let hs = DD::from_f64(h);
        let hu = hs / fr.unstable.powi(k.saturating_sub(1) as u32);
        let num = f(point(hu, hs)) - f(point(hu, -hs)) - f(point(-hu, hs)) + f(point(-hu, -hs));
        values.push((num / (DD::from_f64(4.0) * hu * hs)).to_f64());
        h /= 2.0;
    }
    Ok(richardson_even(&values, 2.0))
}

fn magnitude<S: Scalar>(flow: &SuspensionFlow<S>, phi: &FiberWeight<S>, k: usize) -> f64 {
    let r = flow.roof().sup_bound().as_f64();
    let per_step: f64 = phi
        .blocks()
        .map(|(d, g)| g.sup_bound().as_f64() * r.powi(d as i32 + 1) / (d as f64 + 1.0))
        .sum();
    (k as f64 * per_step).max(1.0)
}

pub fn longitudinal_cocycle<S: Scalar>(
    flow: &SuspensionFlow<S>,
    orbit: &MapOrbit<S>,
    phi: &FiberWeight<S>,
    method: CocycleMethod,
) -> Result<CocycleValue<S>> {
    longitudinal_cocycle_with(flow, orbit, phi, method, &CocycleOptions::default())
}

pub fn longitudinal_cocycle_with<S: Scalar>(
    flow: &SuspensionFlow<S>,
    orbit: &MapOrbit<S>,
    phi: &FiberWeight<S>,
    method: CocycleMethod,
    opts: &CocycleOptions,
) -> Result<CocycleValue<S>> {
    let fr = frame(flow, opts.gauge);
    let k = orbit.prime_period;
    let value = match method {
        CocycleMethod::Analytic => {
            analytic_value(&phi.integrated_roof(flow.roof()), orbit, &fr)
        }
        CocycleMethod::FiniteDifference => S::lit(mixed_partial(
            |q| return_integral(flow, phi, q, k),
            orbit.representative().to_dd(),
            &fr,
            k,
            opts,
            magnitude(flow, phi, k),
        )?),
    };
    Ok(CocycleValue {
        k,
        representative: orbit.representative(),
        value,
        method,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransversalCheck<S> {
    pub k_straight: S,
    pub k_tilted: S,
    pub discrepancy: S,
}

/// Largest tilt amplitude, relative to the roof minimum.
pub const MAX_TILT_FRACTION: f64 = 0.05;

/// Recomputes the cocycle on the tilted section `{fiber = tilt(x)}`, whose
/// return time is `xi - tilt + tilt o F`, and compares with the flat section.
pub fn transversal_independence_check<S: Scalar>(
    flow: &SuspensionFlow<S>,
    orbit: &MapOrbit<S>,
    tilt: &ScalarField<S>,
) -> Result<TransversalCheck<S>> {
    let amplitude = tilt.sup_bound();
    let limit = S::lit(MAX_TILT_FRACTION) * flow.roof_min();
    if amplitude > limit {
        return Err(Error::TiltTooLarge {
            amplitude: amplitude.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let opts = CocycleOptions::default();
    let fr = frame(flow, opts.gauge);
    let k = orbit.prime_period;
    let one = FiberWeight::one();
    let m = flow.base().matrix();
    let p = orbit.representative().to_dd();
    let scale = magnitude(flow, &one, k) + 2.0 * amplitude.as_f64();
    let straight = mixed_partial(|q| return_integral(flow, &one, q, k), p, &fr, k, &opts, scale)?;
    let tilted = mixed_partial(
        |q| {
            let mut z = [q[0].fract(), q[1].fract()];
            let start = tilt.eval_dd(z);
            for _ in 0..k {
                z = apply_mod1(m, z);
            }
            return_integral(flow, &one, q, k) - start + tilt.eval_dd(z)
        },
        p,
        &fr,
        k,
        &opts,
        scale,
    )?;
    Ok(TransversalCheck {
        k_straight: S::lit(straight),
        k_tilted: S::lit(tilted),
        discrepancy: S::lit((straight - tilted).abs()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceCheck<S> {
    /// Cocycle of the time-changed flow with roof `int_0^r phi ds`.
    pub k_reparametrized: S,
    /// Weighted cocycle of the original flow.
    pub k_weighted: S,
    pub residual: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow<S> {
    pub k: usize,
    pub representative: RationalPoint,
    /// `|K_{b phi + c psi} - b K_phi - c K_psi|` by the analytic method.
    pub linearity_analytic: S,
    /// Same, by finite differences.
    pub linearity_fd: S,
    /// Present when `phi` is fiber-constant.
    pub covariance: Option<CovarianceCheck<S>>,
}

/// Linearity of `phi -> K_phi` and covariance under the time change by `phi`.
pub fn verify_cocycle_identities<S: Scalar>(
    flow: &SuspensionFlow<S>,
    orbits: &[MapOrbit<S>],
    phi: &FiberWeight<S>,
    psi: &FiberWeight<S>,
    b: S,
    c: S,
) -> Result<Vec<IdentityRow<S>>> {
    let combo = phi.linear_combination(b, psi, c);
    let reparametrized = match phi.as_fiber_constant() {
        Some(g) => {
            if g.certified_min() <= S::zero() {
                return Err(Error::NonPositiveWeight);
            }
            let roof = phi.integrated_roof(flow.roof());
            Some(SuspensionFlow::new(flow.base().clone(), roof).map_err(|_| Error::NonPositiveWeight)?)
        }
        None => None,
    };
    let one = FiberWeight::one();
    let mut rows = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let mut linearity = [S::zero(); 2];
        for (slot, method) in [CocycleMethod::Analytic, CocycleMethod::FiniteDifference]
            .into_iter()
            .enumerate()
        {
            let kc = longitudinal_cocycle(flow, orbit, &combo, method)?.value;
            let kp = longitudinal_cocycle(flow, orbit, phi, method)?.value;
            let kq = longitudinal_cocycle(flow, orbit, psi, method)?.value;
            linearity[slot] = (kc - (b * kp + c * kq)).abs();
        }
        let covariance = match &reparametrized {
            Some(y) => {
                let ky = longitudinal_cocycle(y, orbit, &one, CocycleMethod::FiniteDifference)?.value;
                let kx = longitudinal_cocycle(flow, orbit, phi, CocycleMethod::FiniteDifference)?.value;
                Some(CovarianceCheck {
                    k_reparametrized: ky,
                    k_weighted: kx,
                    residual: (ky - kx).abs(),
                })
            }
            None => None,
        };
        rows.push(IdentityRow {
            k: orbit.prime_period,
            representative: orbit.representative(),
            linearity_analytic: linearity[0],
            linearity_fd: linearity[1],
            covariance,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toral::ToralAutomorphism;

    fn cat() -> ToralAutomorphism<f64> {
        ToralAutomorphism::new([[2, 1], [1, 1]]).unwrap()
    }

    fn roof_cos(eps: f64) -> ScalarField<f64> {
        ScalarField::constant(1.0).add(&ScalarField::cos([1, 0], eps))
    }

    #[test]
    fn constant_roof_vanishes() {
        let a = cat();
        let catalog = a.enumerate_periodic_orbits(4).unwrap();
        let f = SuspensionFlow::new(a, ScalarField::constant(1.0)).unwrap();
        for orbit in catalog.iter() {
            for m in [CocycleMethod::Analytic, CocycleMethod::FiniteDifference] {
                let k = longitudinal_cocycle(&f, orbit, &FiberWeight::one(), m).unwrap();
                assert!(k.value.abs() < 1e-12, "{m:?} {}", k.value);
            }
        }
    }

    #[test]
    fn fixed_point_value() {
        let a = cat();
        let catalog = a.enumerate_periodic_orbits(1).unwrap();
        let fixed = &catalog.of_period(1)[0];
        let f = SuspensionFlow::new(a, roof_cos(0.1)).unwrap();
        let want = -4.0 * std::f64::consts::PI.powi(2) * 0.1 / 5f64.sqrt();
        let an = longitudinal_cocycle(&f, fixed, &FiberWeight::one(), CocycleMethod::Analytic).unwrap();
        let fd = longitudinal_cocycle(&f, fixed, &FiberWeight::one(), CocycleMethod::FiniteDifference)
            .unwrap();
        assert!((an.value - want).abs() < 1e-13);
        assert!((fd.value - want).abs() < 1e-9, "{}", fd.value - want);
        assert!((want + 1.765_529).abs() < 1e-6);
    }

    #[test]
    fn step_too_small() {
        let a = cat();
        let catalog = a.enumerate_periodic_orbits(1).unwrap();
        let f = SuspensionFlow::new(a, roof_cos(0.1)).unwrap();
        let opts = CocycleOptions {
            h0: 1e-14,
            ..Default::default()
        };
        let r = longitudinal_cocycle_with(
            &f,
            &catalog.of_period(1)[0],
            &FiberWeight::one(),
            CocycleMethod::FiniteDifference,
            &opts,
        );
        assert!(matches!(r, Err(Error::StepTooSmall { .. })));
    }

    #[test]
    fn zero_tilt_is_exact() {
        let a = cat();
        let catalog = a.enumerate_periodic_orbits(2).unwrap();
        let f = SuspensionFlow::new(a, roof_cos(0.1)).unwrap();
        for orbit in catalog.iter() {
            let t = transversal_independence_check(&f, orbit, &ScalarField::zero()).unwrap();
            assert_eq!(t.discrepancy, 0.0);
        }
        let big = ScalarField::sin([0, 1], 0.2);
        assert!(matches!(
            transversal_independence_check(&f, &catalog.of_period(1)[0], &big),
            Err(Error::TiltTooLarge { .. })
        ));
    }
}
