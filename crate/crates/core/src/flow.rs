use crate::error::{Error, Result};
use crate::field::{FiberWeight, ScalarField};
use crate::numerics::{CompensatedSum, DoubleDouble as DD, GaussLegendre};
use crate::scalar::Scalar;
use crate::toral::{MapOrbit, OrbitRep, ToralAutomorphism};

/// Suspension of a toral automorphism under a positive roof.
#[derive(Debug, Clone)]
pub struct SuspensionFlow<S> {
    base: ToralAutomorphism<S>,
    roof: ScalarField<S>,
    roof_min: S,
}

/// Period, exponent and multiplier of the flow orbit over a base orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowOrbitData<S> {
    pub map_orbit: MapOrbit<S>,
    pub period: S,
    /// `k log(lambda) / T`.
    pub exponent: S,
    /// `lambda^-k`.
    pub multiplier: S,
}

impl<S: Scalar> SuspensionFlow<S> {
    pub fn new(base: ToralAutomorphism<S>, roof: ScalarField<S>) -> Result<Self> {
        let roof_min = roof.certified_min();
        if roof_min <= S::zero() {
            return Err(Error::NonPositiveRoof {
                bound: roof_min.as_f64(),
            });
        }
        Ok(Self {
            base,
            roof,
            roof_min,
        })
    }

    pub fn base(&self) -> &ToralAutomorphism<S> {
        &self.base
    }

    pub fn roof(&self) -> &ScalarField<S> {
        &self.roof
    }

    pub fn roof_min(&self) -> S {
        self.roof_min
    }

    /// Birkhoff sum of a base field over an orbit, accumulated in double-double.
    pub fn birkhoff_sum(&self, g: &ScalarField<S>, orbit: &MapOrbit<S>) -> S {
        let mut acc = DD::ZERO;
        for p in &orbit.points {
            let (x, y) = p.numerators();
            acc = acc + g.eval_at_numerators_dd(x, y, p.den());
        }
        S::lit(acc.to_f64())
    }

    pub fn period(&self, orbit: &MapOrbit<S>) -> S {
        self.birkhoff_sum(&self.roof, orbit)
    }

    pub fn orbit_flow_data(&self, orbit: &MapOrbit<S>) -> FlowOrbitData<S> {
        let period = self.period(orbit);
        let k = orbit.prime_period;
        FlowOrbitData {
            map_orbit: orbit.clone(),
            period,
            exponent: S::from_usize_lossy(k) * self.base.log_lambda() / period,
            multiplier: self.base.multiplier(k),
        }
    }

    /// `sum_i int_0^{roof(x_i)} phi(x_i, s) ds` with Gauss-Legendre fiber
    /// integrals exact for the fiber degree.
    pub fn weight_integral(&self, phi: &FiberWeight<S>, orbit: &MapOrbit<S>) -> S {
        let rule = GaussLegendre::exact_for_degree(phi.fiber_degree() as usize);
        self.weight_integral_with(&rule, phi, orbit.points.iter().map(|p| {
            let (x, y) = p.numerators();
            (x, y, p.den())
        }))
    }

    pub fn weight_integral_with_rule(
        &self,
        rule: &GaussLegendre<S>,
        phi: &FiberWeight<S>,
        orbit: &MapOrbit<S>,
    ) -> S {
        self.weight_integral_with(rule, phi, orbit.points.iter().map(|p| {
            let (x, y) = p.numerators();
            (x, y, p.den())
        }))
    }

    fn weight_integral_with<I>(&self, rule: &GaussLegendre<S>, phi: &FiberWeight<S>, points: I) -> S
    where
        I: Iterator<Item = (i128, i128, i128)>,
    {
        let mut acc = CompensatedSum::new();
        let mut coeffs = vec![S::zero(); phi.fiber_degree() as usize + 1];
        for (x, y, den) in points {
            let r = self.roof.eval_at_numerators(x, y, den);
            for (d, g) in phi.blocks() {
                coeffs[d as usize] = g.eval_at_numerators(x, y, den);
            }
            acc.add(rule.integrate(S::zero(), r, |s| {
                coeffs.iter().rev().fold(S::zero(), |a, c| a * s + *c)
            }));
        }
        acc.value()
    }

    /// Flow period of the orbit with the given representative (streaming path).
    pub fn period_of_rep(&self, rep: &OrbitRep) -> S {
        let m = self.base.matrix();
        rep.points(m)
            .map(|(x, y)| self.roof.eval_at_numerators(x as i128, y as i128, rep.den as i128))
            .collect::<CompensatedSum<S>>()
            .value()
    }

    pub fn weight_integral_of_rep(
        &self,
        rule: &GaussLegendre<S>,
        phi: &FiberWeight<S>,
        rep: &OrbitRep,
    ) -> S {
        let den = rep.den as i128;
        self.weight_integral_with(
            rule,
            phi,
            rep.points(self.base.matrix())
                .map(|(x, y)| (x as i128, y as i128, den)),
        )
    }
}
