//! Weighted periodic ensembles over a period window and the measures they
//! approximate.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FiberWeight, ScalarField};
use crate::flow::SuspensionFlow;
use crate::numerics::{CompensatedSum, GaussLegendre};
use crate::scalar::Scalar;
use crate::toral::{FixedPointLattice, OrbitRep};

/// Largest admissible `k_cap`.
pub const MAX_K_CAP: usize = 20;
/// Ensembles with `k_cap` above this are streamed instead of stored.
pub const MAX_STORED_K_CAP: usize = 14;
pub const DEFAULT_DELTA: f64 = 1.0;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind<S> {
    Zero,
    /// `-log J^u`, so `B(gamma) = -k log lambda`.
    NegLogUnstableJacobian,
    /// Constant function `c`, so `B(gamma) = c |gamma|`.
    Constant(S),
}

/// Cocycle `B` weighting the ensemble, with an additive offset on `B(gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential<S> {
    pub kind: PotentialKind<S>,
    pub offset: S,
}

impl<S: Scalar> Potential<S> {
    pub fn zero() -> Self {
        Self {
            kind: PotentialKind::Zero,
            offset: S::zero(),
        }
    }

    pub fn neg_log_unstable_jacobian() -> Self {
        Self {
            kind: PotentialKind::NegLogUnstableJacobian,
            offset: S::zero(),
        }
    }

    pub fn constant(c: S) -> Self {
        Self {
            kind: PotentialKind::Constant(c),
            offset: S::zero(),
        }
    }

    pub fn with_offset(self, c: S) -> Self {
        Self {
            offset: self.offset + c,
            ..self
        }
    }

    pub fn value(&self, k: usize, period: S, log_lambda: S) -> S {
        let v = match self.kind {
            PotentialKind::Zero => S::zero(),
            PotentialKind::NegLogUnstableJacobian => -S::from_usize_lossy(k) * log_lambda,
            PotentialKind::Constant(c) => c * period,
        };
        v + self.offset
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PotentialKind::Zero => "zero",
            PotentialKind::NegLogUnstableJacobian => "neg_log_ju",
            PotentialKind::Constant(_) => "constant",
        }
    }
}

/// A real-valued function of periodic orbits.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitFunctional<S> {
    /// `int_gamma phi dt`.
    Flow(FiberWeight<S>),
    /// Birkhoff sum of a base field over one period.
    Base(ScalarField<S>),
}

struct Prepared<'a, S> {
    f: &'a OrbitFunctional<S>,
    rule: Option<GaussLegendre<S>>,
}

impl<'a, S: Scalar> Prepared<'a, S> {
    fn new(f: &'a OrbitFunctional<S>) -> Self {
        let rule = match f {
            OrbitFunctional::Flow(phi) if phi.fiber_degree() > 0 => {
                Some(GaussLegendre::exact_for_degree(phi.fiber_degree() as usize))
            }
            _ => None,
        };
        Self { f, rule }
    }

    fn eval(&self, flow: &SuspensionFlow<S>, rep: &OrbitRep) -> S {
        let m = flow.base().matrix();
        let den = rep.den as i128;
        match (self.f, &self.rule) {
            (OrbitFunctional::Flow(phi), Some(rule)) => flow.weight_integral_of_rep(rule, phi, rep),
            (OrbitFunctional::Flow(phi), None) => {
                let g = phi.as_fiber_constant().unwrap_or_else(ScalarField::zero);
                rep.points(m)
                    .map(|(x, y)| {
                        let (x, y) = (x as i128, y as i128);
                        g.eval_at_numerators(x, y, den) * flow.roof().eval_at_numerators(x, y, den)
                    })
                    .collect::<CompensatedSum<S>>()
                    .value()
            }
            (OrbitFunctional::Base(g), _) => rep
                .points(m)
                .map(|(x, y)| g.eval_at_numerators(x as i128, y as i128, den))
                .collect::<CompensatedSum<S>>()
                .value(),
        }
    }
}

/// Sums of `e^{B} v` held as `e^{shift} * sum`, rescaled as larger `B` arrive.
#[derive(Debug, Clone)]
struct LogSums<S> {
    shift: S,
    sums: Vec<CompensatedSum<S>>,
}

impl<S: Scalar> LogSums<S> {
    fn new(slots: usize) -> Self {
        Self {
            shift: S::neg_infinity(),
            sums: vec![CompensatedSum::new(); slots],
        }
    }

    fn lift(&mut self, shift: S) {
        if shift > self.shift {
            let f = (self.shift - shift).exp();
            for s in &mut self.sums {
                s.rescale(f);
            }
            self.shift = shift;
        }
    }

    fn add(&mut self, log_w: S, slot: usize, v: S) {
        self.lift(log_w);
        self.sums[slot].add((log_w - self.shift).exp() * v);
    }

    fn merge(mut self, mut other: Self) -> Self {
        if other.shift == S::neg_infinity() {
            return self;
        }
        self.lift(other.shift);
        other.lift(self.shift);
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.merge(b);
        }
        self
    }

    fn value(&self, slot: usize) -> S {
        self.sums[slot].value()
    }
}

/// A prime periodic orbit in the ensemble window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleOrbit<S> {
    pub rep: OrbitRep,
    pub period: S,
    /// `B(gamma)`.
    pub b: S,
}

/// All prime flow orbits with period in `(T, T + delta]`.
#[derive(Debug, Clone)]
pub struct PeriodicEnsemble<S> {
    flow: SuspensionFlow<S>,
    t: S,
    delta: S,
    potential: Potential<S>,
    k_cap: usize,
    lattices: Vec<FixedPointLattice>,
    orbits: Option<Vec<EnsembleOrbit<S>>>,
    orbit_count: u64,
    log_normalization: S,
}

/// `ceil((T + delta) / roof_min)`.
pub fn k_cap<S: Scalar>(flow: &SuspensionFlow<S>, t: S, delta: S) -> usize {
    ((t + delta) / flow.roof_min()).ceil().to_usize().unwrap_or(usize::MAX)
}

pub fn build_ensemble<S: Scalar>(
    flow: &SuspensionFlow<S>,
    t: S,
    delta: S,
    potential: Potential<S>,
) -> Result<PeriodicEnsemble<S>> {
    if !(t >= S::zero()) || !(delta > S::zero()) || !(t + delta).is_finite() {
        return Err(Error::InvalidArgument(format!(
            "window needs T >= 0 and delta > 0, got T = {t}, delta = {delta}"
        )));
    }
    let k_cap = k_cap(flow, t, delta);
    if k_cap > MAX_K_CAP {
        return Err(Error::CostGate {
            k_cap,
            limit: MAX_K_CAP,
        });
    }
    let sup = flow.roof().sup_bound();
    let mut lattices = Vec::new();
    for k in 1..=k_cap {
        if S::from_usize_lossy(k) * sup > t {
            lattices.push(flow.base().fixed_points(k)?);
        }
    }
    let mut e = PeriodicEnsemble {
        flow: flow.clone(),
        t,
        delta,
        potential,
        k_cap,
        lattices,
        orbits: None,
        orbit_count: 0,
        log_normalization: S::neg_infinity(),
    };
    if k_cap <= MAX_STORED_K_CAP {
        let orbits = e.stream(
            Vec::new,
            |mut v, o| {
                v.push(*o);
                v
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        e.orbits = Some(orbits);
    }
    let (count, sums) = e.visit(
        || (0u64, LogSums::new(1)),
        |(c, mut s), o| {
            s.add(o.b, 0, o.period);
            (c + 1, s)
        },
        |(c1, s1), (c2, s2)| (c1 + c2, s1.merge(s2)),
    );
    e.orbit_count = count;
    e.log_normalization = sums.value(0).ln() + sums.shift;
    Ok(e)
}

impl<S: Scalar> PeriodicEnsemble<S> {
    pub fn flow(&self) -> &SuspensionFlow<S> {
        &self.flow
    }

    pub fn t(&self) -> S {
        self.t
    }

    pub fn delta(&self) -> S {
        self.delta
    }

    pub fn potential(&self) -> &Potential<S> {
        &self.potential
    }

    pub fn k_cap(&self) -> usize {
        self.k_cap
    }

    pub fn orbit_count(&self) -> u64 {
        self.orbit_count
    }

    /// Stored orbits, present when `k_cap <= MAX_STORED_K_CAP`.
    pub fn orbits(&self) -> Option<&[EnsembleOrbit<S>]> {
        self.orbits.as_deref()
    }

    /// `log sum |gamma| e^{B(gamma)}`; `-inf` for an empty window.
    pub fn log_normalization(&self) -> S {
        self.log_normalization
    }

    pub fn normalization(&self) -> S {
        self.log_normalization.exp()
    }

    pub fn measure(&self) -> MeasureApprox<'_, S> {
        MeasureApprox { ensemble: self }
    }

    fn member(&self, rep: OrbitRep) -> Option<EnsembleOrbit<S>> {
        let period = self.flow.period_of_rep(&rep);
        (period > self.t && period <= self.t + self.delta).then(|| EnsembleOrbit {
            rep,
            period,
            b: self.potential.value(rep.k, period, self.flow.base().log_lambda()),
        })
    }

    fn stream<T, I, F, M>(&self, init: I, fold: F, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(T, &EnsembleOrbit<S>) -> T + Sync + Send,
        M: Fn(T, T) -> T + Sync + Send,
    {
        let mut acc = init();
        for lat in &self.lattices {
            let part = lat.fold_prime_orbits(
                &init,
                |a, rep| match self.member(rep) {
                    Some(o) => fold(a, &o),
                    None => a,
                },
                &merge,
            );
            acc = merge(acc, part);
        }
        acc
    }

    /// Deterministic parallel fold over the ensemble orbits.
    pub fn visit<T, I, F, M>(&self, init: I, fold: F, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(T, &EnsembleOrbit<S>) -> T + Sync + Send,
        M: Fn(T, T) -> T + Sync + Send,
    {
        match &self.orbits {
            Some(orbits) => {
                let parts: Vec<T> = orbits
                    .par_chunks(CHUNK)
                    .map(|c| c.iter().fold(init(), &fold))
                    .collect();
                parts.into_iter().fold(init(), &merge)
            }
            None => self.stream(init, fold, merge),
        }
    }

    /// Orbit counts per base period.
    pub fn counts_by_period(&self) -> BTreeMap<usize, u64> {
        self.visit(
            BTreeMap::new,
            |mut m, o| {
                *m.entry(o.rep.k).or_insert(0) += 1;
                m
            },
            |mut a, b| {
                for (k, c) in b {
                    *a.entry(k).or_insert(0) += c;
                }
                a
            },
        )
    }

    /// Plain and hat-normalized masses of the orbits selected by `pred`.
    fn masses<P>(&self, pred: P) -> (S, S)
    where
        P: Fn(&EnsembleOrbit<S>) -> bool + Sync + Send,
    {
        let sums = self.visit(
            || LogSums::new(4),
            |mut s, o| {
                s.add(o.b, 0, o.period);
                s.add(o.b, 1, S::one());
                if pred(o) {
                    s.add(o.b, 2, o.period);
                    s.add(o.b, 3, S::one());
                }
                s
            },
            LogSums::merge,
        );
        let ratio = |num: S, den: S| if den == S::zero() { S::zero() } else { num / den };
        (
            ratio(sums.value(2), sums.value(0)),
            ratio(sums.value(3), sums.value(1)),
        )
    }
}

/// The probability measure `sum e^{B} delta_gamma / sum |gamma| e^{B}`.
#[derive(Debug, Clone, Copy)]
pub struct MeasureApprox<'a, S> {
    ensemble: &'a PeriodicEnsemble<S>,
}

impl<S: Scalar> MeasureApprox<'_, S> {
    pub fn ensemble(&self) -> &PeriodicEnsemble<S> {
        self.ensemble
    }

    pub fn normalization(&self) -> S {
        self.ensemble.normalization()
    }

    pub fn evaluate(&self, g: &FiberWeight<S>) -> S {
        bowen_integral(self, g)
    }
}

/// `sum e^{B} int_gamma g dt / sum |gamma| e^{B}`; zero on an empty window.
pub fn bowen_integral<S: Scalar>(m: &MeasureApprox<'_, S>, g: &FiberWeight<S>) -> S {
    let e = m.ensemble;
    let f = OrbitFunctional::Flow(g.clone());
    let prepared = Prepared::new(&f);
    let sums = e.visit(
        || LogSums::new(2),
        |mut s, o| {
            s.add(o.b, 0, o.period);
            s.add(o.b, 1, prepared.eval(&e.flow, &o.rep));
            s
        },
        LogSums::merge,
    );
    let den = sums.value(0);
    if den == S::zero() {
        S::zero()
    } else {
        sums.value(1) / den
    }
}

/// `(T, value)` rows of the Bowen integral over windows `(T, T + delta]`.
pub fn bowen_sweep<S: Scalar>(
    flow: &SuspensionFlow<S>,
    ts: &[S],
    delta: S,
    potential: Potential<S>,
    g: &FiberWeight<S>,
) -> Result<Vec<(S, S)>> {
    ts.iter()
        .map(|&t| {
            let e = build_ensemble(flow, t, delta, potential)?;
            Ok((t, bowen_integral(&e.measure(), g)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionReport<S> {
    /// `mu_{T,B}` mass of the orbits with `|a| <= tol`.
    pub plain: S,
    /// Same mass under the per-orbit probability normalization.
    pub hat: S,
    pub lower: S,
    pub upper: S,
    pub within_bounds: bool,
}

impl<S: Scalar> ProportionReport<S> {
    /// `plain / hat`, undefined when the selected set is empty.
    pub fn ratio(&self) -> Option<S> {
        (self.hat > S::zero()).then(|| self.plain / self.hat)
    }
}

pub fn positive_proportion<S: Scalar>(
    m: &MeasureApprox<'_, S>,
    a: &OrbitFunctional<S>,
    tol: S,
) -> ProportionReport<S> {
    let e = m.ensemble;
    let prepared = Prepared::new(a);
    let (plain, hat) = e.masses(|o| prepared.eval(&e.flow, &o.rep).abs() <= tol);
    let lower = e.t / (e.t + e.delta);
    let upper = (e.t + e.delta) / e.t;
    let slack = S::lit(8.0) * S::epsilon();
    let within_bounds = plain >= lower * hat * (S::one() - slack)
        && plain <= upper * hat * (S::one() + slack);
    ProportionReport {
        plain,
        hat,
        lower,
        upper,
        within_bounds,
    }
}

/// Convex decomposition of the ensemble measure over the sets `A_i` where
/// `a_i` vanishes, under the potential `B + sum alpha_i a_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<S> {
    pub t: S,
    pub orbit_count: u64,
    /// Orbits assigned to each `A_i`.
    pub counts: Vec<u64>,
    /// `s_T^i`.
    pub weights: Vec<S>,
    /// `[test][i]`: integral against the component measure; `None` for empty `A_i`.
    pub component_integrals: Vec<Vec<Option<S>>>,
    /// `[test]`: integral against the full measure.
    pub full_integrals: Vec<S>,
    /// One-based index of the largest weight, smallest index on ties.
    pub dominant: usize,
}

impl<S: Scalar> Decomposition<S> {
    /// `|sum_i s^i - 1|`.
    pub fn weight_defect(&self) -> S {
        (self.weights.iter().copied().sum::<S>() - S::one()).abs()
    }

    /// Largest `|sum_i s^i mu^{A_i}(g) - mu(g)|` over the test functions.
    pub fn combination_defect(&self) -> S {
        self.component_integrals
            .iter()
            .zip(&self.full_integrals)
            .map(|(comp, full)| {
                let combo: S = comp
                    .iter()
                    .zip(&self.weights)
                    .map(|(c, w)| c.map_or(S::zero(), |c| c * *w))
                    .sum();
                (combo - *full).abs()
            })
            .fold(S::zero(), S::max)
    }
}

pub fn decompose<S: Scalar>(
    ensemble: &PeriodicEnsemble<S>,
    cocycles: &[OrbitFunctional<S>],
    alphas: &[S],
    tests: &[FiberWeight<S>],
    tol: S,
) -> Result<Decomposition<S>> {
    let n = cocycles.len();
    if n == 0 || alphas.len() != n {
        return Err(Error::InvalidArgument(format!(
            "need one alpha per cocycle, got {} cocycles and {} alphas",
            n,
            alphas.len()
        )));
    }
    let flow = &ensemble.flow;
    let prepared: Vec<Prepared<'_, S>> = cocycles.iter().map(Prepared::new).collect();
    let test_fns: Vec<OrbitFunctional<S>> = tests.iter().cloned().map(OrbitFunctional::Flow).collect();
    let test_prep: Vec<Prepared<'_, S>> = test_fns.iter().map(Prepared::new).collect();
    let nt = tests.len();
    // slots: [i] mass of A_i, then [n + j*n + i] test j on A_i
    let slots = n + nt * n;
    type Acc<S> = (LogSums<S>, Vec<u64>, Option<usize>);
    let (sums, counts, violation): Acc<S> = ensemble.visit(
        || (LogSums::new(slots), vec![0; n], None),
        |(mut s, mut c, v), o| {
            if v.is_some() {
                return (s, c, v);
            }
            let values: Vec<S> = prepared.iter().map(|p| p.eval(flow, &o.rep)).collect();
            let Some(i) = values.iter().position(|a| a.abs() <= tol) else {
                return (s, c, Some(o.rep.k));
            };
            let b = o.b + values
                .iter()
                .zip(alphas)
                .map(|(a, al)| *a * *al)
                .fold(S::zero(), |x, y| x + y);
            c[i] += 1;
            s.add(b, i, o.period);
            for (j, t) in test_prep.iter().enumerate() {
                s.add(b, n + j * n + i, t.eval(flow, &o.rep));
            }
            (s, c, None)
        },
        |(s1, mut c1, v1), (s2, c2, v2)| {
            for (a, b) in c1.iter_mut().zip(&c2) {
                *a += b;
            }
            (s1.merge(s2), c1, v1.or(v2))
        },
    );
    if let Some(k) = violation {
        return Err(Error::HypothesisViolated { k });
    }
    let total: S = (0..n).map(|i| sums.value(i)).collect::<CompensatedSum<S>>().value();
    let weights: Vec<S> = (0..n)
        .map(|i| if total > S::zero() { sums.value(i) / total } else { S::zero() })
        .collect();
    let component_integrals = (0..nt)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let mass = sums.value(i);
                    (mass > S::zero()).then(|| sums.value(n + j * n + i) / mass)
                })
                .collect()
        })
        .collect();
    let full_integrals = (0..nt)
        .map(|j| {
            let g: S = (0..n)
                .map(|i| sums.value(n + j * n + i))
                .collect::<CompensatedSum<S>>()
                .value();
            if total > S::zero() {
                g / total
            } else {
                S::zero()
            }
        })
        .collect();
    let mut dominant = 0;
    for i in 1..n {
        if weights[i] > weights[dominant] {
            dominant = i;
        }
    }
    Ok(Decomposition {
        t: ensemble.t,
        orbit_count: counts.iter().sum(),
        counts,
        weights,
        component_integrals,
        full_integrals,
        dominant: dominant + 1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LivshitsDemo<S> {
    pub rows: Vec<Decomposition<S>>,
}

impl<S> LivshitsDemo<S> {
    pub fn dominant_trajectory(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.dominant).collect()
    }
}

/// Decompositions over the windows `(T, T + delta]` for each `T` in `ts`.
#[allow(clippy::too_many_arguments)]
pub fn alternate_livshits_demo<S: Scalar>(
    flow: &SuspensionFlow<S>,
    ts: &[S],
    delta: S,
    potential: Potential<S>,
    cocycles: &[OrbitFunctional<S>],
    alphas: &[S],
    tests: &[FiberWeight<S>],
    tol: S,
) -> Result<LivshitsDemo<S>> {
    let rows = ts
        .iter()
        .map(|&t| {
            let e = build_ensemble(flow, t, delta, potential)?;
            decompose(&e, cocycles, alphas, tests, tol)
        })
        .collect::<Result<_>>()?;
    Ok(LivshitsDemo { rows })
}

/// Witness for the collision lemma on `{1..N+1}^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PigeonholeCertificate {
    pub n: usize,
    pub alpha: Vec<u8>,
    pub beta: Vec<u8>,
    /// One-based coordinate where `alpha` and `beta` differ.
    pub index: usize,
    /// Common image `I(alpha) = I(beta)`, with coordinate `index` equal to 1.
    pub image: Vec<u8>,
    /// `(N+1)^N`.
    pub domain_size: u64,
    /// `N (N+1)^(N-1)`.
    pub range_size: u64,
}

impl PigeonholeCertificate {
    pub fn counting_holds(&self) -> bool {
        self.domain_size > self.range_size
    }

    /// Checks the three conclusions of the lemma against the stored data.
    pub fn is_valid(&self) -> bool {
        let i = self.index;
        i >= 1
            && i <= self.n
            && self.alpha.len() == self.n
            && self.beta.len() == self.n
            && self.alpha[i - 1] != self.beta[i - 1]
            && (0..self.n).all(|j| j == i - 1 || self.alpha[j] == self.beta[j])
            && self.image[i - 1] == 1
            && (0..self.n).all(|j| j == i - 1 || self.image[j] == self.alpha[j])
    }
}

pub const PIGEONHOLE_N: std::ops::RangeInclusive<usize> = 2..=5;

/// `{1..N+1}^N` in lexicographic order.
pub fn pigeonhole_domain(n: usize) -> impl Iterator<Item = Vec<u8>> {
    let size = (n as u64 + 1).pow(n as u32);
    (0..size).map(move |mut idx| {
        let mut v = vec![0u8; n];
        for slot in v.iter_mut().rev() {
            *slot = (idx % (n as u64 + 1)) as u8 + 1;
            idx /= n as u64 + 1;
        }
        v
    })
}

/// The assignment `alpha -> (i, alpha with alpha_i = 1)` for a choice of index.
pub fn structural_assignment<C>(choice: C) -> impl Fn(&[u8]) -> (usize, Vec<u8>)
where
    C: Fn(&[u8]) -> usize,
{
    move |alpha| {
        let i = choice(alpha);
        let mut image = alpha.to_vec();
        if (1..=alpha.len()).contains(&i) {
            image[i - 1] = 1;
        }
        (i, image)
    }
}

/// Exhaustive collision search for an assignment `I` on `{1..N+1}^N`.
pub fn pigeonhole_certificate<F>(n: usize, assignment: F) -> Result<PigeonholeCertificate>
where
    F: Fn(&[u8]) -> (usize, Vec<u8>),
{
    if !PIGEONHOLE_N.contains(&n) {
        return Err(Error::InvalidArgument(format!("N = {n} outside 2..=5")));
    }
    let domain_size = (n as u64 + 1).pow(n as u32);
    let range_size = n as u64 * (n as u64 + 1).pow(n as u32 - 1);
    let mut seen: BTreeMap<(usize, Vec<u8>), Vec<u8>> = BTreeMap::new();
    for alpha in pigeonhole_domain(n) {
        let (i, image) = assignment(&alpha);
        let structural = (1..=n).contains(&i)
            && image.len() == n
            && image[i - 1] == 1
            && (0..n).all(|j| j == i - 1 || image[j] == alpha[j]);
        if !structural {
            return Err(Error::InvalidAssignment(format!("{alpha:?} -> ({i}, {image:?})")));
        }
        if let Some(beta) = seen.get(&(i, image.clone())) {
            return Ok(PigeonholeCertificate {
                n,
                alpha: beta.clone(),
                beta: alpha,
                index: i,
                image,
                domain_size,
                range_size,
            });
        }
        seen.insert((i, image), alpha);
    }
    Err(Error::Inconclusive(format!(
        "no collision among {domain_size} points"
    )))
}
