//! Periods of periodic orbits shadowing a homoclinic loop, and what they
//! reveal: the limit `T' = lim T_n - n T0`, the multiplier of the fixed
//! point, and whether the longitudinal cocycle vanishes there.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FiberWeight;
use crate::flow::SuspensionFlow;
use crate::normal_form::{longitudinal_cocycle, CocycleMethod};
use crate::numerics::{fit_line, least_squares, DoubleDouble as DD, LineFit};
use crate::scalar::Scalar;
use crate::toral::{HomoclinicPoint, MapOrbit, RationalPoint, ShadowingPoint, ToralAutomorphism};

/// Predicted signal over summation error required for a period to be reported.
pub const SIGNAL_TO_NOISE: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRow<S> {
    pub n: usize,
    /// `T_n`.
    pub period: S,
    /// `T_n - n T0`, accumulated directly as `sum_i (roof(A^i q_n) - T0)`.
    pub excess: S,
}

#[derive(Debug, Clone)]
pub struct HomoclinicExperiment<S> {
    pub h: HomoclinicPoint<S>,
    pub n_range: (usize, usize),
    /// Period of the flow orbit through the fixed point at the origin.
    pub t0: S,
    /// Rows for the `n` whose predicted residual clears the noise gate.
    pub rows: Vec<PeriodRow<S>>,
    roof_scale: S,
}

impl<S: Scalar> HomoclinicExperiment<S> {
    /// Summation error bound for `T_n` in the working precision.
    pub fn summation_bound(&self, n: usize) -> S {
        S::from_usize_lossy(n) * S::lit(4.0) * S::epsilon() * self.roof_scale
    }

    pub fn ns(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.n).collect()
    }
}

/// `T_n` for every `n` in `n_lo..=n_hi` whose predicted residual `n lambda^-n`
/// clears the noise gate.
pub fn homoclinic_periods<S: Scalar>(
    flow: &SuspensionFlow<S>,
    h: &HomoclinicPoint<S>,
    n_lo: usize,
    n_hi: usize,
) -> Result<HomoclinicExperiment<S>> {
    if n_lo > n_hi {
        return Err(Error::InvalidArgument(format!("empty n range {n_lo}..={n_hi}")));
    }
    let a = flow.base();
    let roof = flow.roof();
    let t0_dd = roof.eval_dd([DD::ZERO, DD::ZERO]);
    let ns: Vec<usize> = (n_lo..=n_hi).collect();
    let rows: Vec<Result<PeriodRow<S>>> = ns
        .par_iter()
        .map(|&n| {
            let q = ShadowingPoint::new(a, h, n)?;
            let mut excess = DD::ZERO;
            for (x, y, d) in q.orbit_numerators(a) {
                excess = excess + (roof.eval_at_numerators_dd(x, y, d) - t0_dd);
            }
            let period = excess + t0_dd * DD::from_f64(n as f64);
            Ok(PeriodRow {
                n,
                period: S::lit(period.to_f64()),
                excess: S::lit(excess.to_f64()),
            })
        })
        .collect();
    let mut exp = HomoclinicExperiment {
        h: h.clone(),
        n_range: (n_lo, n_hi),
        t0: S::lit(t0_dd.to_f64()),
        rows: Vec::with_capacity(rows.len()),
        roof_scale: roof.sup_bound(),
    };
    let log_lambda = a.log_lambda().as_f64();
    for row in rows {
        let row = row?;
        let predicted = row.n as f64 * (-(row.n as f64) * log_lambda).exp();
        if predicted >= SIGNAL_TO_NOISE * exp.summation_bound(row.n).as_f64() {
            exp.rows.push(row);
        }
    }
    Ok(exp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TPrimeEstimate<S> {
    pub t_prime: S,
    /// Last Cauchy increment `|a_{n+1} - a_n|`.
    pub uncertainty: S,
    /// Geometric rate of the increments fitted on the last three points.
    pub rate: Option<S>,
}

/// Aitken extrapolation of `a_n = T_n - n T0` on the last three reported points.
pub fn estimate_t_prime<S: Scalar>(exp: &HomoclinicExperiment<S>) -> Result<TPrimeEstimate<S>> {
    let a: Vec<S> = exp.rows.iter().map(|r| r.excess).collect();
    if a.len() < 6 {
        return Err(Error::InvalidArgument(format!(
            "need at least 6 reported periods, have {}",
            a.len()
        )));
    }
    // increments at the summation noise level count as zero
    let inc: Vec<S> = exp
        .rows
        .windows(2)
        .map(|w| {
            let d = w[1].excess - w[0].excess;
            let floor = S::lit(2.0) * exp.summation_bound(w[1].n);
            if d.abs() <= floor {
                S::zero()
            } else {
                d
            }
        })
        .collect();
    let tail = &inc[inc.len() - 4..];
    if tail.windows(2).any(|w| w[1].abs() > w[0].abs()) {
        return Err(Error::NotConverged);
    }
    let last = a[a.len() - 1];
    let (d0, d1) = (inc[inc.len() - 2], inc[inc.len() - 1]);
    let uncertainty = (a[a.len() - 1] - a[a.len() - 2]).abs();
    if d1 == S::zero() || d0 == d1 {
        return Ok(TPrimeEstimate {
            t_prime: last,
            uncertainty,
            rate: None,
        });
    }
    Ok(TPrimeEstimate {
        t_prime: last - d1 * d1 / (d1 - d0),
        uncertainty,
        rate: Some(d1 / d0),
    })
}

/// Independent value of `T'`: the regularized two-sided sum
/// `sum_{j in Z} (roof(A^j h) - roof(0))` along the homoclinic orbit.
pub fn homoclinic_sum<S: Scalar>(flow: &SuspensionFlow<S>, h: &HomoclinicPoint<S>) -> S {
    const TERM_FLOOR: f64 = 1e-16;
    const MAX_TERMS: i64 = 400;
    let a = flow.base();
    let roof = flow.roof();
    let t0 = roof.eval_dd([DD::ZERO, DD::ZERO]);
    let mut acc = DD::ZERO;
    for dir in [1i64, -1] {
        let start = if dir == 1 { 0 } else { -1 };
        for step in 0..MAX_TERMS {
            let j = start + dir * step;
            let lift = h.orbit_lift_dd(a, j);
            let term = roof.eval_dd(lift) - t0;
            acc = acc + term;
            let near = lift[0].abs().to_f64().max(lift[1].abs().to_f64()) < 0.1;
            if near && term.abs().to_f64() < TERM_FLOOR {
                break;
            }
        }
    }
    S::lit(acc.to_f64())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentRecovery<S> {
    /// Slope of the selected fit; `None` when every residual is below the
    /// noise floor.
    pub log_mu_hat: Option<S>,
    pub k_is_zero: bool,
    /// Fit of `log|R_n| - log n` against `n`.
    pub fit_with_n: Option<LineFit<S>>,
    /// Fit of `log|R_n|` against `n`.
    pub fit_plain: Option<LineFit<S>>,
    /// Exponent `p` of the three-parameter model `log|R_n| = c + n log mu + p log n`.
    pub power_of_n: Option<S>,
    /// `(n, R_n)` used in the fits.
    pub residuals: Vec<(usize, S)>,
}

/// Largest fit residual accepted, as a fraction of the fitted range.
pub const FIT_RESIDUAL_LIMIT: f64 = 0.01;
/// Minimum number of residuals above the noise floor.
pub const MIN_FIT_POINTS: usize = 8;

/// `R_n = T_n - n T0 - T'` for the reported `n` (optionally restricted to `n_fit`).
pub fn residuals<S: Scalar>(
    exp: &HomoclinicExperiment<S>,
    t_prime: S,
    n_fit: Option<(usize, usize)>,
) -> Vec<(usize, S)> {
    exp.rows
        .iter()
        .filter(|r| n_fit.is_none_or(|(lo, hi)| r.n >= lo && r.n <= hi))
        .map(|r| (r.n, r.excess - t_prime))
        .collect()
}

/// Decides between `R_n ~ c n mu^n` (cocycle nonzero at the fixed point) and
/// `R_n ~ c mu^n` (cocycle zero) by which line fits better, and returns the
/// fitted slope as `log mu`.
pub fn recover_exponent<S: Scalar>(
    exp: &HomoclinicExperiment<S>,
    t_prime: S,
    n_fit: Option<(usize, usize)>,
) -> Result<ExponentRecovery<S>> {
    let all = residuals(exp, t_prime, n_fit);
    let floor = |n: usize| S::lit(SIGNAL_TO_NOISE) * exp.summation_bound(n);
    let above: Vec<(usize, S)> = all
        .iter()
        .copied()
        .filter(|(n, r)| r.abs() > floor(*n))
        .collect();
    if above.is_empty() {
        return Ok(ExponentRecovery {
            log_mu_hat: None,
            k_is_zero: true,
            fit_with_n: None,
            fit_plain: None,
            power_of_n: None,
            residuals: all,
        });
    }
    if above.len() < MIN_FIT_POINTS {
        return Err(Error::Inconclusive(format!(
            "only {} residuals above the noise floor",
            above.len()
        )));
    }
    let ns: Vec<S> = above.iter().map(|(n, _)| S::from_usize_lossy(*n)).collect();
    let plain: Vec<S> = above.iter().map(|(_, r)| r.abs().ln()).collect();
    let with_n: Vec<S> = plain.iter().zip(&ns).map(|(y, n)| *y - n.ln()).collect();
    let fit_with_n = fit_line(&ns, &with_n);
    let fit_plain = fit_line(&ns, &plain);
    let rows: Vec<Vec<S>> = ns.iter().map(|n| vec![S::one(), *n, n.ln()]).collect();
    let power_of_n = least_squares(&rows, &plain).map(|c| c[2]);
    let limit = S::lit(FIT_RESIDUAL_LIMIT);
    let rel = |f: &Option<LineFit<S>>| f.map(|f| f.relative_residual()).unwrap_or(S::infinity());
    let (rn, rp) = (rel(&fit_with_n), rel(&fit_plain));
    let (log_mu_hat, k_is_zero) = if rn <= rp && rn < limit {
        (fit_with_n.map(|f| f.slope), false)
    } else if rp < limit {
        (fit_plain.map(|f| f.slope), true)
    } else {
        return Err(Error::Inconclusive(format!(
            "relative fit residuals {rn:e} (with n) and {rp:e} (plain) exceed {FIT_RESIDUAL_LIMIT}"
        )));
    };
    Ok(ExponentRecovery {
        log_mu_hat,
        k_is_zero,
        fit_with_n,
        fit_plain,
        power_of_n,
        residuals: above,
    })
}

/// The fixed point at the origin as a one-point orbit.
pub fn origin_orbit<S: Scalar>(a: &ToralAutomorphism<S>) -> MapOrbit<S> {
    MapOrbit {
        prime_period: 1,
        points: vec![RationalPoint::ORIGIN],
        multiplier: a.multiplier(1),
    }
}

/// `c_n = R_n / (s K n mu^n)` with `mu = 1/lambda` and `s` the sign of the
/// crossing quadrant `alpha beta`, for every residual.
pub fn normalized_coefficients<S: Scalar>(
    flow: &SuspensionFlow<S>,
    h: &HomoclinicPoint<S>,
    residuals: &[(usize, S)],
) -> Result<Vec<(usize, S)>> {
    let k = longitudinal_cocycle(
        flow,
        &origin_orbit(flow.base()),
        &FiberWeight::one(),
        CocycleMethod::Analytic,
    )?
    .value;
    let sign = (h.alpha * h.beta).signum();
    let log_lambda = flow.base().log_lambda();
    Ok(residuals
        .iter()
        .map(|(n, r)| {
            let nf = S::from_usize_lossy(*n);
            (*n, *r / (sign * k * nf * (-nf * log_lambda).exp()))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowingRates<S> {
    /// Slope of `log|u_n|` against `n`.
    pub unstable_slope: S,
    /// Slope of `log|s_n - beta|` against `n`.
    pub stable_slope: S,
    /// `min, max` of `|u_n| lambda^n`.
    pub unstable_bounds: (S, S),
    /// `min, max` of `|s_n - beta| lambda^n`.
    pub stable_bounds: (S, S),
    /// `min, max` of `|u_n s_n| lambda^n`.
    pub product_bounds: (S, S),
    /// `min, max` of the shadowing distance times `lambda^n`.
    pub distance_bounds: (S, S),
}

/// Rates of the shadowing points' eigencoordinates, recomputed from the exact
/// lifts, over `n_lo..=n_hi`.
pub fn shadowing_rates<S: Scalar>(
    a: &ToralAutomorphism<S>,
    h: &HomoclinicPoint<S>,
    n_lo: usize,
    n_hi: usize,
) -> Result<ShadowingRates<S>> {
    let mut ns = Vec::new();
    let mut lu = Vec::new();
    let mut ls = Vec::new();
    let mut ub = (S::infinity(), S::zero());
    let mut sb = ub;
    let mut pb = ub;
    let mut db = ub;
    let widen = |b: &mut (S, S), v: S| {
        b.0 = b.0.min(v);
        b.1 = b.1.max(v);
    };
    let beta = h.beta_dd();
    for n in n_lo..=n_hi {
        let q = ShadowingPoint::new(a, h, n)?;
        let (u_dd, s_dd) = q.eigen_coords_from_lift_dd(a);
        let (u, s) = (S::lit(u_dd.to_f64()), S::lit(s_dd.to_f64()));
        let gap = S::lit((s_dd - beta).abs().to_f64());
        let nf = S::from_usize_lossy(n);
        let lam_n = (nf * a.log_lambda()).exp();
        ns.push(nf);
        lu.push(u.abs().ln());
        ls.push(gap.ln());
        widen(&mut ub, u.abs() * lam_n);
        widen(&mut sb, gap * lam_n);
        widen(&mut pb, (u * s).abs() * lam_n);
        widen(&mut db, q.shadowing_distance(a, h) * lam_n);
    }
    let fu = fit_line(&ns, &lu).ok_or_else(|| Error::InvalidArgument("need two n".into()))?;
    let fs = fit_line(&ns, &ls).ok_or_else(|| Error::InvalidArgument("need two n".into()))?;
    Ok(ShadowingRates {
        unstable_slope: fu.slope,
        stable_slope: fs.slope,
        unstable_bounds: ub,
        stable_bounds: sb,
        product_bounds: pb,
        distance_bounds: db,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    /// Case 0: the weighted period vanishes.
    ZeroIntegral,
    /// Case 1: both cocycles vanish.
    BothVanish,
    /// Case 2: only the first cocycle vanishes; requires `chi1 < chi2`.
    FirstVanishes,
    /// Case 3: only the second vanishes; requires `chi1 > chi2`.
    SecondVanishes,
    /// Case 4: neither vanishes; requires `chi1 = chi2`.
    NeitherVanishes,
}

impl CaseLabel {
    pub fn number(&self) -> u8 {
        match self {
            CaseLabel::ZeroIntegral => 0,
            CaseLabel::BothVanish => 1,
            CaseLabel::FirstVanishes => 2,
            CaseLabel::SecondVanishes => 3,
            CaseLabel::NeitherVanishes => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseData<S> {
    pub integral: S,
    pub k1: S,
    pub k2: S,
    pub chi1: S,
    pub chi2: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification<S> {
    Case { label: CaseLabel, data: CaseData<S> },
    /// The exponents contradict the requirement of the label.
    Contradiction { label: CaseLabel, data: CaseData<S> },
}

impl<S> Classification<S> {
    pub fn label(&self) -> CaseLabel {
        match self {
            Classification::Case { label, .. } | Classification::Contradiction { label, .. } => *label,
        }
    }

    pub fn is_contradiction(&self) -> bool {
        matches!(self, Classification::Contradiction { .. })
    }
}

pub const ZERO_TOL: f64 = 1e-7;
const CHI_EQUALITY: f64 = 1e-12;

fn is_zero<S: Scalar>(quantity: &'static str, v: S, tol: S) -> Result<bool> {
    let a = v.abs();
    if a <= tol {
        Ok(true)
    } else if a < S::lit(10.0) * tol {
        Err(Error::ToleranceAmbiguity {
            quantity,
            value: a.as_f64(),
        })
    } else {
        Ok(false)
    }
}

/// Labels a periodic orbit of a same-base pair with matched weighted data.
/// Case 0 is only considered when `phi1` is not the constant 1.
pub fn classify_case<S: Scalar>(
    flow1: &SuspensionFlow<S>,
    phi1: &FiberWeight<S>,
    flow2: &SuspensionFlow<S>,
    phi2: &FiberWeight<S>,
    orbit: &MapOrbit<S>,
    tol: S,
) -> Result<Classification<S>> {
    if flow1.base().matrix() != flow2.base().matrix() {
        return Err(Error::BaseMismatch);
    }
    let integral = flow1.weight_integral(phi1, orbit);
    let integral2 = flow2.weight_integral(phi2, orbit);
    let scale = S::one().max(integral.abs());
    if (integral - integral2).abs() > tol * scale {
        return Err(Error::InvalidArgument(format!(
            "weighted periods differ on the orbit: {integral} vs {integral2}"
        )));
    }
    let k1 = longitudinal_cocycle(flow1, orbit, phi1, CocycleMethod::Analytic)?.value;
    let k2 = longitudinal_cocycle(flow2, orbit, phi2, CocycleMethod::Analytic)?.value;
    let chi1 = flow1.orbit_flow_data(orbit).exponent;
    let chi2 = flow2.orbit_flow_data(orbit).exponent;
    let data = CaseData {
        integral,
        k1,
        k2,
        chi1,
        chi2,
    };
    let pentachotomy = *phi1 != FiberWeight::one();
    let label = if pentachotomy && is_zero("integral", integral, tol)? {
        CaseLabel::ZeroIntegral
    } else {
        match (is_zero("K1", k1, tol)?, is_zero("K2", k2, tol)?) {
            (true, true) => CaseLabel::BothVanish,
            (true, false) => CaseLabel::FirstVanishes,
            (false, true) => CaseLabel::SecondVanishes,
            (false, false) => CaseLabel::NeitherVanishes,
        }
    };
    let equal = (chi1 - chi2).abs() <= S::lit(CHI_EQUALITY) * chi1.abs().max(chi2.abs());
    let consistent = match label {
        CaseLabel::ZeroIntegral | CaseLabel::BothVanish => true,
        CaseLabel::FirstVanishes => chi1 < chi2 && !equal,
        CaseLabel::SecondVanishes => chi1 > chi2 && !equal,
        CaseLabel::NeitherVanishes => equal,
    };
    Ok(if consistent {
        Classification::Case { label, data }
    } else {
        Classification::Contradiction { label, data }
    })
}
