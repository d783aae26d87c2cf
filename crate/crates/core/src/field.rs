//! Trigonometric polynomials on the torus and fiber-polynomial weights on the
//! suspension manifold.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::DoubleDouble as DD;
use crate::scalar::Scalar;
use crate::toral::{IntMatrix, RationalPoint};

/// One Fourier mode `cos_amp cos(2 pi k.x) + sin_amp sin(2 pi k.x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode<S> {
    pub k: [i64; 2],
    pub cos_amp: S,
    pub sin_amp: S,
}

/// Canonical frequency: `k` or `-k`, whichever has its first nonzero
/// coordinate positive. The flag is true when the sign was flipped.
fn canonical(k: [i64; 2]) -> ([i64; 2], bool) {
    if k[0] < 0 || (k[0] == 0 && k[1] < 0) {
        ([-k[0], -k[1]], true)
    } else {
        (k, false)
    }
}

/// A finite trigonometric polynomial `sum a_k cos(2 pi k.x) + b_k sin(2 pi k.x)`.
///
/// Frequencies are kept canonical (`k` and `-k` merged), sorted, and zero
/// modes are dropped, so equal fields compare equal.
#[derive(Clone, PartialEq)]
pub struct ScalarField<S> {
    modes: BTreeMap<[i64; 2], (S, S)>,
}

impl<S: Scalar> Default for ScalarField<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: fmt::Debug> fmt::Debug for ScalarField<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.modes.iter()).finish()
    }
}

impl<S: Scalar> ScalarField<S> {
    pub fn zero() -> Self {
        Self {
            modes: BTreeMap::new(),
        }
    }

    pub fn constant(c: S) -> Self {
        let mut f = Self::zero();
        f.add_mode([0, 0], c, S::zero());
        f
    }

    pub fn cos(k: [i64; 2], amp: S) -> Self {
        let mut f = Self::zero();
        f.add_mode(k, amp, S::zero());
        f
    }

    pub fn sin(k: [i64; 2], amp: S) -> Self {
        let mut f = Self::zero();
        f.add_mode(k, S::zero(), amp);
        f
    }

    pub fn from_modes<I: IntoIterator<Item = Mode<S>>>(modes: I) -> Self {
        let mut f = Self::zero();
        for m in modes {
            f.add_mode(m.k, m.cos_amp, m.sin_amp);
        }
        f
    }

    /// Adds `a cos(2 pi k.x) + b sin(2 pi k.x)`.
    pub fn add_mode(&mut self, k: [i64; 2], a: S, b: S) {
        let (k, flipped) = canonical(k);
        let b = if k == [0, 0] {
            S::zero()
        } else if flipped {
            -b
        } else {
            b
        };
        let entry = self.modes.entry(k).or_insert((S::zero(), S::zero()));
        entry.0 = entry.0 + a;
        entry.1 = entry.1 + b;
        if entry.0 == S::zero() && entry.1 == S::zero() {
            self.modes.remove(&k);
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode<S>> + '_ {
        self.modes.iter().map(|(k, (a, b))| Mode {
            k: *k,
            cos_amp: *a,
            sin_amp: *b,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// Mean value (the constant mode).
    pub fn mean(&self) -> S {
        self.modes.get(&[0, 0]).map_or(S::zero(), |m| m.0)
    }

    pub fn is_constant(&self) -> bool {
        self.modes.keys().all(|k| *k == [0, 0])
    }

    /// `sum |amplitude|` over the nonconstant modes.
    pub fn oscillation_bound(&self) -> S {
        self.modes()
            .filter(|m| m.k != [0, 0])
            .map(|m| m.cos_amp.hypot(m.sin_amp))
            .fold(S::zero(), |a, b| a + b)
    }

    /// `sup |f|` bound: `|mean| + sum |amplitude|`.
    pub fn sup_bound(&self) -> S {
        self.mean().abs() + self.oscillation_bound()
    }

    /// Lipschitz constant bound `sum 2 pi |k| |amplitude|`.
    pub fn lipschitz_bound(&self) -> S {
        self.modes()
            .map(|m| {
                let kn = S::from_i64_lossy(m.k[0]).hypot(S::from_i64_lossy(m.k[1]));
                S::TAU() * kn * m.cos_amp.hypot(m.sin_amp)
            })
            .fold(S::zero(), |a, b| a + b)
    }

    pub fn max_frequency(&self) -> i64 {
        self.modes
            .keys()
            .map(|k| k[0].abs().max(k[1].abs()))
            .max()
            .unwrap_or(0)
    }

    /// Certified lower bound: the amplitude bound `mean - sum |amp|`, improved
    /// when possible by a grid minimum minus the Lipschitz slack.
    pub fn certified_min(&self) -> S {
        let amp = self.mean() - self.oscillation_bound();
        if self.is_constant() {
            return amp;
        }
        let lip = self.lipschitz_bound();
        let n = (lip.as_f64() * 8.0).ceil().clamp(64.0, 1024.0) as usize;
        let h = S::from_usize_lossy(n).recip();
        let mut grid_min = S::infinity();
        for i in 0..n {
            for j in 0..n {
                let p = [
                    (S::from_usize_lossy(i) + S::lit(0.5)) * h,
                    (S::from_usize_lossy(j) + S::lit(0.5)) * h,
                ];
                grid_min = grid_min.min(self.eval(p));
            }
        }
        // every point is within h / sqrt(2) of a cell center; pad for rounding
        let slack = lip * h * S::FRAC_1_SQRT_2() + S::lit(64.0) * S::epsilon() * self.sup_bound();
        amp.max(grid_min - slack)
    }

    #[inline]
    fn phase(k: [i64; 2], p: [S; 2]) -> S {
        let t = S::from_i64_lossy(k[0]) * p[0] + S::from_i64_lossy(k[1]) * p[1];
        t - t.round()
    }

    pub fn eval(&self, p: [S; 2]) -> S {
        let mut acc = S::zero();
        for (k, (a, b)) in &self.modes {
            if *k == [0, 0] {
                acc = acc + *a;
                continue;
            }
            let (s, c) = (S::TAU() * Self::phase(*k, p)).sin_cos();
            acc = acc + *a * c + *b * s;
        }
        acc
    }

    /// Evaluation at `(x/den, y/den)` with the phase reduced exactly.
    pub fn eval_at_numerators(&self, x: i128, y: i128, den: i128) -> S {
        let mut acc = S::zero();
        for (k, (a, b)) in &self.modes {
            if *k == [0, 0] {
                acc = acc + *a;
                continue;
            }
            let num = (k[0] as i128 * x + k[1] as i128 * y).rem_euclid(den);
            let t = S::lit(num as f64 / den as f64);
            let (s, c) = (S::TAU() * t).sin_cos();
            acc = acc + *a * c + *b * s;
        }
        acc
    }

    pub fn eval_rational(&self, p: &RationalPoint) -> S {
        let (x, y) = p.numerators();
        self.eval_at_numerators(x, y, p.den())
    }

    pub fn eval_dd(&self, p: [DD; 2]) -> DD {
        let mut acc = DD::ZERO;
        for (k, (a, b)) in &self.modes {
            let a = DD::from_f64(a.as_f64());
            if *k == [0, 0] {
                acc = acc + a;
                continue;
            }
            let b = DD::from_f64(b.as_f64());
            let t = DD::from_f64(k[0] as f64) * p[0] + DD::from_f64(k[1] as f64) * p[1];
            let (s, c) = t.sin_cos_turns();
            acc = acc + a * c + b * s;
        }
        acc
    }

    /// Double-double evaluation at `(x/den, y/den)` with exact phase reduction.
    pub fn eval_at_numerators_dd(&self, x: i128, y: i128, den: i128) -> DD {
        let mut acc = DD::ZERO;
        for (k, (a, b)) in &self.modes {
            let a = DD::from_f64(a.as_f64());
            if *k == [0, 0] {
                acc = acc + a;
                continue;
            }
            let b = DD::from_f64(b.as_f64());
            let num = (k[0] as i128 * x + k[1] as i128 * y).rem_euclid(den);
            let (s, c) = DD::ratio(num, den).sin_cos_turns();
            acc = acc + a * c + b * s;
        }
        acc
    }

    pub fn gradient(&self, p: [S; 2]) -> [S; 2] {
        let mut g = [S::zero(); 2];
        for (k, (a, b)) in &self.modes {
            if *k == [0, 0] {
                continue;
            }
            let (s, c) = (S::TAU() * Self::phase(*k, p)).sin_cos();
            let d = S::TAU() * (*b * c - *a * s);
            g[0] = g[0] + d * S::from_i64_lossy(k[0]);
            g[1] = g[1] + d * S::from_i64_lossy(k[1]);
        }
        g
    }

    pub fn hessian(&self, p: [S; 2]) -> [[S; 2]; 2] {
        let mut h = [[S::zero(); 2]; 2];
        let tau2 = S::TAU() * S::TAU();
        for (k, (a, b)) in &self.modes {
            if *k == [0, 0] {
                continue;
            }
            let (s, c) = (S::TAU() * Self::phase(*k, p)).sin_cos();
            let d = -tau2 * (*a * c + *b * s);
            let kf = [S::from_i64_lossy(k[0]), S::from_i64_lossy(k[1])];
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] = h[i][j] + d * kf[i] * kf[j];
                }
            }
        }
        h
    }

    /// Double-double Hessian bilinear form `Hess f(p)[v, w]`.
    pub fn hessian_form_dd(&self, p: [DD; 2], v: [DD; 2], w: [DD; 2]) -> DD {
        let tau2 = DD::TAU.sqr();
        let mut acc = DD::ZERO;
        for (k, (a, b)) in &self.modes {
            if *k == [0, 0] {
                continue;
            }
            let kx = DD::from_f64(k[0] as f64);
            let ky = DD::from_f64(k[1] as f64);
            let (s, c) = (kx * p[0] + ky * p[1]).sin_cos_turns();
            let amp = DD::from_f64(a.as_f64()) * c + DD::from_f64(b.as_f64()) * s;
            let kv = kx * v[0] + ky * v[1];
            let kw = kx * w[0] + ky * w[1];
            acc = acc - tau2 * amp * kv * kw;
        }
        acc
    }

    pub fn scale(&self, c: S) -> Self {
        let mut out = Self::zero();
        for m in self.modes() {
            out.add_mode(m.k, m.cos_amp * c, m.sin_amp * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for m in other.modes() {
            out.add_mode(m.k, m.cos_amp, m.sin_amp);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-S::one()))
    }

    /// `f(Mx)`: the frequency `k` becomes `M^T k`.
    pub fn compose_linear(&self, m: &IntMatrix) -> Self {
        let mut out = Self::zero();
        for md in self.modes() {
            let k = [
                m[0][0] * md.k[0] + m[1][0] * md.k[1],
                m[0][1] * md.k[0] + m[1][1] * md.k[1],
            ];
            out.add_mode(k, md.cos_amp, md.sin_amp);
        }
        out
    }

    /// The coboundary `u o A - u`.
    pub fn coboundary(&self, m: &IntMatrix) -> Self {
        self.compose_linear(m).sub(self)
    }

    /// Pointwise product, by the product-to-sum identities.
    pub fn mul(&self, other: &Self) -> Self {
        let half = S::lit(0.5);
        let mut out = Self::zero();
        for p in self.modes() {
            for q in other.modes() {
                let plus = [p.k[0] + q.k[0], p.k[1] + q.k[1]];
                let minus = [p.k[0] - q.k[0], p.k[1] - q.k[1]];
                let (a1, b1, a2, b2) = (p.cos_amp, p.sin_amp, q.cos_amp, q.sin_amp);
                // cos cos, sin sin, sin cos, cos sin
                out.add_mode(minus, half * (a1 * a2 + b1 * b2), half * (b1 * a2 - a1 * b2));
                out.add_mode(plus, half * (a1 * a2 - b1 * b2), half * (b1 * a2 + a1 * b2));
            }
        }
        out
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(S::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Parses one `cos kx ky amp` / `sin kx ky amp` term.
    pub fn parse_term(line: &str) -> std::result::Result<Mode<S>, String> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(format!("expected `cos|sin kx ky amp`, got `{line}`"));
        }
        let kx: i64 = parts[1]
            .parse()
            .map_err(|_| format!("bad frequency `{}`", parts[1]))?;
        let ky: i64 = parts[2]
            .parse()
            .map_err(|_| format!("bad frequency `{}`", parts[2]))?;
        let amp: f64 = parts[3]
            .parse()
            .map_err(|_| format!("bad amplitude `{}`", parts[3]))?;
        if !amp.is_finite() {
            return Err(format!("non-finite amplitude `{}`", parts[3]));
        }
        let amp = S::lit(amp);
        match parts[0] {
            "cos" => Ok(Mode {
                k: [kx, ky],
                cos_amp: amp,
                sin_amp: S::zero(),
            }),
            "sin" => Ok(Mode {
                k: [kx, ky],
                cos_amp: S::zero(),
                sin_amp: amp,
            }),
            other => Err(format!("unknown term kind `{other}`")),
        }
    }

    /// Parses the text form, one term per line; blank lines and `#` comments
    /// are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut f = Self::zero();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let m = Self::parse_term(line).map_err(|message| Error::Parse {
                line: i + 1,
                message,
            })?;
            f.add_mode(m.k, m.cos_amp, m.sin_amp);
        }
        Ok(f)
    }

    /// Canonical text form; the constant is written as `cos 0 0 c`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in self.modes() {
            if m.cos_amp != S::zero() || m.k == [0, 0] {
                out.push_str(&format!("cos {} {} {}\n", m.k[0], m.k[1], m.cos_amp));
            }
            if m.sin_amp != S::zero() {
                out.push_str(&format!("sin {} {} {}\n", m.k[0], m.k[1], m.sin_amp));
            }
        }
        out
    }
}

/// A function on the suspension manifold, `phi(x, s) = sum_d g_d(x) s^d`
/// with `s` the fiber coordinate in `[0, roof(x))`.
#[derive(Clone, PartialEq, Debug)]
pub struct FiberWeight<S> {
    blocks: BTreeMap<u32, ScalarField<S>>,
}

impl<S: Scalar> FiberWeight<S> {
    pub fn zero() -> Self {
        Self {
            blocks: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::fiber_constant(ScalarField::constant(c))
    }

    pub fn fiber_constant(g: ScalarField<S>) -> Self {
        Self::monomial(g, 0)
    }

    /// `g(x) s^d`.
    pub fn monomial(g: ScalarField<S>, d: u32) -> Self {
        let mut w = Self::zero();
        w.add_block(d, &g);
        w
    }

    fn add_block(&mut self, d: u32, g: &ScalarField<S>) {
        let entry = self.blocks.entry(d).or_default();
        *entry = entry.add(g);
        if entry.is_zero() {
            self.blocks.remove(&d);
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = (u32, &ScalarField<S>)> {
        self.blocks.iter().map(|(d, g)| (*d, g))
    }

    /// Polynomial degree in the fiber coordinate.
    pub fn fiber_degree(&self) -> u32 {
        self.blocks.keys().next_back().copied().unwrap_or(0)
    }

    /// The base factor when the weight does not depend on `s`.
    pub fn as_fiber_constant(&self) -> Option<ScalarField<S>> {
        match self.blocks.len() {
            0 => Some(ScalarField::zero()),
            1 => self.blocks.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, g) in other.blocks() {
            out.add_block(d, g);
        }
        out
    }

    pub fn scale(&self, c: S) -> Self {
        let mut out = Self::zero();
        for (d, g) in self.blocks() {
            out.add_block(d, &g.scale(c));
        }
        out
    }

    /// `b self + c other`.
    pub fn linear_combination(&self, b: S, other: &Self, c: S) -> Self {
        self.scale(b).add(&other.scale(c))
    }

    pub fn eval(&self, p: [S; 2], s: S) -> S {
        self.blocks()
            .map(|(d, g)| g.eval(p) * s.powi(d as i32))
            .fold(S::zero(), |a, b| a + b)
    }

    /// `int_0^r phi(p, s) ds` in closed form, double-double.
    pub fn fiber_integral_dd(&self, p: [DD; 2], r: DD) -> DD {
        let mut acc = DD::ZERO;
        for (d, g) in self.blocks() {
            acc = acc + g.eval_dd(p) * r.powi(d + 1) / DD::from_f64((d + 1) as f64);
        }
        acc
    }

    /// The base function `x -> int_0^{r(x)} phi(x, s) ds` as a field; this is
    /// the roof of the time change of the suspension by `phi`.
    pub fn integrated_roof(&self, roof: &ScalarField<S>) -> ScalarField<S> {
        let mut out = ScalarField::zero();
        for (d, g) in self.blocks() {
            let term = g
                .mul(&roof.powi(d + 1))
                .scale(S::from_usize_lossy(d as usize + 1).recip());
            out = out.add(&term);
        }
        out
    }

    /// Parses the text form: `spow d` starts the block multiplying `s^d`;
    /// term lines before any `spow` belong to `s^0`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut w = Self::zero();
        let mut d = 0u32;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("spow") {
                d = rest.trim().parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("bad fiber power in `{line}`"),
                })?;
                continue;
            }
            let m = ScalarField::<S>::parse_term(line).map_err(|message| Error::Parse {
                line: i + 1,
                message,
            })?;
            w.add_block(d, &ScalarField::from_modes([m]));
        }
        Ok(w)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (d, g) in self.blocks() {
            out.push_str(&format!("spow {d}\n"));
            out.push_str(&g.to_text());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_merging() {
        let mut f = ScalarField::<f64>::zero();
        f.add_mode([1, 0], 1.0, 0.5);
        f.add_mode([-1, 0], 1.0, 0.5);
        let m: Vec<_> = f.modes().collect();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].k, [1, 0]);
        assert_eq!(m[0].cos_amp, 2.0);
        assert_eq!(m[0].sin_amp, 0.0);
        f.add_mode([1, 0], -2.0, 0.0);
        assert!(f.is_zero());
    }

    #[test]
    fn product_to_sum() {
        let f = ScalarField::cos([1, 0], 1.0f64).add(&ScalarField::sin([0, 1], 0.3));
        let g = ScalarField::sin([1, 1], 0.7).add(&ScalarField::constant(2.0));
        let fg = f.mul(&g);
        for p in [[0.1, 0.2], [0.37, 0.91], [0.0, 0.5]] {
            assert!((fg.eval(p) - f.eval(p) * g.eval(p)).abs() < 1e-14);
        }
    }

    #[test]
    fn composition_and_coboundary() {
        let a: IntMatrix = [[2, 1], [1, 1]];
        let u = ScalarField::sin([1, 0], 0.3f64);
        let ua = u.compose_linear(&a);
        let p = [0.3, 0.8];
        let ap = [2.0 * p[0] + p[1], p[0] + p[1]];
        assert!((ua.eval(p) - u.eval(ap)).abs() < 1e-14);
        let cb = u.coboundary(&a);
        assert!((cb.eval(p) - (u.eval(ap) - u.eval(p))).abs() < 1e-14);
    }

    #[test]
    fn certified_minimum() {
        assert_eq!(ScalarField::constant(1.0).certified_min(), 1.0);
        let r = ScalarField::constant(1.0).add(&ScalarField::cos([1, 0], 0.1));
        assert!(r.certified_min() >= 0.9 - 1e-12);
        assert!(r.certified_min() <= 0.9 + 1e-12);
        let bad = ScalarField::constant(1.0).add(&ScalarField::cos([1, 0], 1.5));
        assert!(bad.certified_min() <= 0.0);
        // grid certification beats the amplitude bound when modes cannot align
        let g = ScalarField::constant(1.0)
            .add(&ScalarField::cos([1, 0], 0.6))
            .add(&ScalarField::cos([2, 0], 0.6));
        let m = g.certified_min();
        assert!(m > 0.2, "{m}");
        let exact_min = (0..100_000)
            .map(|i| g.eval([i as f64 / 100_000.0, 0.0]))
            .fold(f64::INFINITY, f64::min);
        assert!(m <= exact_min);
    }

    #[test]
    fn rational_evaluation_matches_float() {
        let f = ScalarField::cos([3, -2], 0.4).add(&ScalarField::sin([1, 5], -0.2));
        let p = RationalPoint::new(7, 11, 13);
        let [x, y] = p.to_f64();
        assert!((f.eval_rational(&p) - f.eval([x, y])).abs() < 1e-14);
        let dd = f.eval_at_numerators_dd(7, 11, 13).to_f64();
        assert!((dd - f.eval([x, y])).abs() < 1e-14);
    }

    #[test]
    fn text_round_trip() {
        let f = ScalarField::<f64>::parse("cos 0 0 1\ncos 1 0 0.1 # roof\n\nsin 0 1 0.05\n").unwrap();
        assert_eq!(f.mean(), 1.0);
        assert_eq!(ScalarField::parse(&f.to_text()).unwrap(), f);
        let err = ScalarField::<f64>::parse("cos 1 0 0.1\ntan 1 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn fiber_weight_text() {
        let w = FiberWeight::<f64>::parse("cos 0 0 1\nspow 1\ncos 1 0 0.5\n").unwrap();
        assert_eq!(w.fiber_degree(), 1);
        assert!(w.as_fiber_constant().is_none());
        assert_eq!(FiberWeight::parse(&w.to_text()).unwrap(), w);
        let p = [0.25, 0.0];
        assert!((w.eval(p, 0.5) - 1.0).abs() < 1e-15);
        assert!(FiberWeight::<f64>::one().as_fiber_constant().is_some());
    }

    #[test]
    fn integrated_roof_matches_fiber_integral() {
        let roof = ScalarField::constant(1.0).add(&ScalarField::cos([1, 0], 0.1));
        let w = FiberWeight::monomial(ScalarField::constant(1.0), 2)
            .add(&FiberWeight::fiber_constant(ScalarField::sin([0, 1], 0.3)));
        let rt = w.integrated_roof(&roof);
        let p = [0.2, 0.7];
        let pd = p.map(DD::from_f64);
        let direct = w.fiber_integral_dd(pd, roof.eval_dd(pd)).to_f64();
        assert!((rt.eval(p) - direct).abs() < 1e-14);
    }
}
