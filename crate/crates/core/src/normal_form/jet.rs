//! Truncated planar maps and the weak Moser normal form at a saddle.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::poly::Poly2;

/// A planar map `(x, y) -> (f1(x, y), f2(x, y))` truncated at degree `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetMap<S> {
    pub f1: Poly2<S>,
    pub f2: Poly2<S>,
}

impl<S: Scalar> JetMap<S> {
    pub fn identity(degree: usize) -> Self {
        Self {
            f1: Poly2::x(degree),
            f2: Poly2::y(degree),
        }
    }

    pub fn linear(degree: usize, m: [[S; 2]; 2]) -> Self {
        Self {
            f1: Poly2::x(degree)
                .scale(m[0][0])
                .add(&Poly2::y(degree).scale(m[0][1])),
            f2: Poly2::x(degree)
                .scale(m[1][0])
                .add(&Poly2::y(degree).scale(m[1][1])),
        }
    }

    pub fn degree(&self) -> usize {
        self.f1.degree()
    }

    pub fn linear_part(&self) -> [[S; 2]; 2] {
        [
            [self.f1.get(1, 0), self.f1.get(0, 1)],
            [self.f2.get(1, 0), self.f2.get(0, 1)],
        ]
    }

    /// `self o inner`, truncated.
    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            f1: self.f1.compose(&inner.f1, &inner.f2),
            f2: self.f2.compose(&inner.f1, &inner.f2),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            f1: self.f1.sub(&o.f1),
            f2: self.f2.sub(&o.f2),
        }
    }

    pub fn max_abs(&self) -> S {
        self.f1.max_abs().max(self.f2.max_abs())
    }

    pub fn eval(&self, x: S, y: S) -> [S; 2] {
        [self.f1.eval(x, y), self.f2.eval(x, y)]
    }

    /// Inverse of a jet with invertible linear part and no constant term, by
    /// the fixed-point iteration `H = L^-1 (z - N(H))`, one degree per step.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.degree();
        let l = self.linear_part();
        let det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
        if det.abs() < S::lit(1e-14) {
            return Err(Error::InvalidJet("singular linear part".into()));
        }
        let linv = JetMap::linear(
            d,
            [
                [l[1][1] / det, -l[0][1] / det],
                [-l[1][0] / det, l[0][0] / det],
            ],
        );
        let lin = JetMap::linear(d, l);
        let id = JetMap::identity(d);
        let mut h = linv.clone();
        for _ in 1..d {
            let nonlinear = self.compose(&h).sub(&lin.compose(&h));
            h = linv.compose(&id.sub(&nonlinear));
        }
        Ok(h)
    }

    /// Coefficients as `(i, j, c)` triples, one list per component, skipping zeros.
    pub fn to_triples(&self) -> [Vec<(usize, usize, S)>; 2] {
        let nz = |p: &Poly2<S>| p.terms().filter(|t| t.2 != S::zero()).collect();
        [nz(&self.f1), nz(&self.f2)]
    }

    pub fn to_text(&self) -> String {
        let line = |name: &str, terms: &[(usize, usize, S)]| {
            let body: Vec<String> = terms.iter().map(|(i, j, c)| format!("({i},{j},{c:e})")).collect();
            format!("{name} {}\n", body.join(" "))
        };
        let [a, b] = self.to_triples();
        line("f1", &a) + &line("f2", &b)
    }
}

/// A truncated area-preserving saddle jet fixing the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarJet<S> {
    map: JetMap<S>,
    mu: S,
}

const CONSTANT_TOL: f64 = 1e-12;
const DET_TOL: f64 = 1e-12;
const RESONANCE_TOL: f64 = 1e-10;

impl<S: Scalar> PlanarJet<S> {
    pub fn new(map: JetMap<S>) -> Result<Self> {
        if map.degree() < 3 {
            return Err(Error::InvalidJet("truncation degree must be at least 3".into()));
        }
        if map.f1.get(0, 0).abs() > S::lit(CONSTANT_TOL) || map.f2.get(0, 0).abs() > S::lit(CONSTANT_TOL) {
            return Err(Error::InvalidJet("constant term does not vanish".into()));
        }
        let l = map.linear_part();
        let det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
        if (det - S::one()).abs() > S::lit(DET_TOL) {
            return Err(Error::InvalidJet(format!("linear part has determinant {det}")));
        }
        let tr = l[0][0] + l[1][1];
        if tr <= S::lit(2.0) {
            return Err(Error::InvalidJet(format!(
                "linear part is not a saddle with positive eigenvalues (trace {tr})"
            )));
        }
        let mu = S::lit(2.0) / (tr + (tr * tr - S::lit(4.0)).sqrt());
        Ok(Self { map, mu })
    }

    pub fn map(&self) -> &JetMap<S> {
        &self.map
    }

    pub fn mu(&self) -> S {
        self.mu
    }

    pub fn degree(&self) -> usize {
        self.map.degree()
    }
}

#[derive(Debug, Clone)]
pub struct MoserNormalForm<S> {
    /// `G = Psi^-1 o F o Psi`.
    pub normal: PlanarJet<S>,
    /// The composed coordinate change `Psi`.
    pub change: JetMap<S>,
}

fn check_divisor<S: Scalar>(divisor: S, degree: usize) -> Result<S> {
    if divisor.abs() < S::lit(RESONANCE_TOL) {
        Err(Error::ResonanceAtTruncation {
            degree,
            divisor: divisor.as_f64(),
        })
    } else {
        Ok(divisor)
    }
}

fn unit_eigenvector<S: Scalar>(l: &[[S; 2]; 2], ev: S) -> [S; 2] {
    let v1 = [l[0][1], ev - l[0][0]];
    let v2 = [ev - l[1][1], l[1][0]];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    let v = [v[0] / n, v[1] / n];
    let dominant = if v[0].abs() >= v[1].abs() { v[0] } else { v[1] };
    if dominant < S::zero() {
        [-v[0], -v[1]]
    } else {
        v
    }
}

struct Reducer<S> {
    g: JetMap<S>,
    change: JetMap<S>,
    mu: S,
}

impl<S: Scalar> Reducer<S> {
    fn conjugate(&mut self, phi: JetMap<S>) -> Result<()> {
        let inv = phi.inverse()?;
        self.g = inv.compose(&self.g.compose(&phi));
        self.change = self.change.compose(&phi);
        Ok(())
    }

    fn degree(&self) -> usize {
        self.g.degree()
    }

    /// Step 1: diagonalize the linear part with a determinant-one change.
    fn diagonalize(&mut self) -> Result<()> {
        let l = self.g.linear_part();
        let vs = unit_eigenvector(&l, self.mu);
        let mut vu = unit_eigenvector(&l, self.mu.recip());
        let mut det = vs[0] * vu[1] - vs[1] * vu[0];
        if det < S::zero() {
            vu = [-vu[0], -vu[1]];
            det = -det;
        }
        let s = det.sqrt().recip();
        let p = [[vs[0] * s, vu[0] * s], [vs[1] * s, vu[1] * s]];
        self.conjugate(JetMap::linear(self.degree(), p))
    }

    /// Step 2: remove every quadratic monomial with `(x + P1, y + P2)`.
    fn eliminate_quadratic(&mut self) -> Result<()> {
        let d = self.degree();
        let lambdas = [self.mu, self.mu.recip()];
        let mut phi = JetMap::identity(d);
        for (comp, lam) in lambdas.iter().enumerate() {
            for (a, b) in [(2usize, 0usize), (1, 1), (0, 2)] {
                let q = if comp == 0 { self.g.f1.get(a, b) } else { self.g.f2.get(a, b) };
                let div = check_divisor(self.mu.powi(a as i32 - b as i32) - *lam, 2)?;
                let target = if comp == 0 { &mut phi.f1 } else { &mut phi.f2 };
                target.set(a, b, q / div);
            }
        }
        self.conjugate(phi)
    }

    /// Step 3: make both axes invariant to the truncation degree with
    /// area-preserving shears.
    fn straighten_axes(&mut self) -> Result<()> {
        let d = self.degree();
        let mu = self.mu;
        for k in 3..=d {
            let e = self.g.f2.get(k, 0);
            let div = check_divisor(mu.recip() - mu.powi(k as i32), k)?;
            let mut phi = JetMap::identity(d);
            phi.f2.set(k, 0, -e / div);
            self.conjugate(phi)?;
        }
        for k in 3..=d {
            let e = self.g.f1.get(0, k);
            let div = check_divisor(mu - mu.powi(-(k as i32)), k)?;
            let mut phi = JetMap::identity(d);
            phi.f1.set(0, k, -e / div);
            self.conjugate(phi)?;
        }
        Ok(())
    }

    /// Step 4: linearize the restrictions to the axes with the symplectic
    /// lifts `(h(x), y / h'(x))` and `(x / h'(y), h(y))`.
    fn linearize_axes(&mut self) -> Result<()> {
        let d = self.degree();
        let mu = self.mu;
        for k in 3..=d {
            let a = self.g.f1.get(k, 0);
            let delta = -a / check_divisor(mu - mu.powi(k as i32), k)?;
            let deriv = Poly2::monomial(d, k - 1, 0, S::from_usize_lossy(k) * delta);
            let phi = JetMap {
                f1: Poly2::x(d).add(&Poly2::monomial(d, k, 0, delta)),
                f2: Poly2::y(d).mul(&deriv.recip_one_plus()),
            };
            self.conjugate(phi)?;
        }
        for k in 3..=d {
            let b = self.g.f2.get(0, k);
            let delta = -b / check_divisor(mu.recip() - mu.powi(-(k as i32)), k)?;
            let deriv = Poly2::monomial(d, 0, k - 1, S::from_usize_lossy(k) * delta);
            let phi = JetMap {
                f1: Poly2::x(d).mul(&deriv.recip_one_plus()),
                f2: Poly2::y(d).add(&Poly2::monomial(d, 0, k, delta)),
            };
            self.conjugate(phi)?;
        }
        Ok(())
    }
}

/// Reduces a saddle jet to the truncated weak Moser form
/// `(mu x + x y phi1, y / mu + x y phi2)`.
pub fn moser_normal_form<S: Scalar>(jet: &PlanarJet<S>) -> Result<MoserNormalForm<S>> {
    let d = jet.degree();
    let mut r = Reducer {
        g: jet.map().clone(),
        change: JetMap::identity(d),
        mu: jet.mu(),
    };
    r.diagonalize()?;
    r.eliminate_quadratic()?;
    r.straighten_axes()?;
    r.linearize_axes()?;
    Ok(MoserNormalForm {
        normal: PlanarJet { map: r.g, mu: jet.mu() },
        change: r.change,
    })
}

/// Deviation of a jet from the truncated normal form: the largest of the
/// quadratic coefficients, the nonlinear axis coefficients and the
/// off-diagonal linear entries.
pub fn normal_form_defect<S: Scalar>(jet: &JetMap<S>) -> NormalFormDefect<S> {
    let d = jet.degree();
    let mut quadratic = S::zero();
    for (a, b) in [(2usize, 0usize), (1, 1), (0, 2)] {
        quadratic = quadratic.max(jet.f1.get(a, b).abs()).max(jet.f2.get(a, b).abs());
    }
    let mut axis = S::zero();
    for k in 2..=d {
        axis = axis
            .max(jet.f1.get(k, 0).abs())
            .max(jet.f2.get(k, 0).abs())
            .max(jet.f1.get(0, k).abs())
            .max(jet.f2.get(0, k).abs());
    }
    let off_diagonal = jet.f1.get(0, 1).abs().max(jet.f2.get(1, 0).abs());
    NormalFormDefect {
        quadratic,
        axis,
        off_diagonal,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormDefect<S> {
    pub quadratic: S,
    pub axis: S,
    pub off_diagonal: S,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shear_saddle(mu: f64, d: usize) -> JetMap<f64> {
        // L o (x, y + p(x)) o (x + q(y), y), all area preserving
        let l = JetMap::linear(d, [[mu + 1.0 / mu - 1.0, 1.0], [mu + 1.0 / mu - 2.0, 1.0]]);
        let s1 = JetMap {
            f1: Poly2::x(d),
            f2: Poly2::y(d)
                .add(&Poly2::monomial(d, 2, 0, 0.7))
                .add(&Poly2::monomial(d, 3, 0, -0.4)),
        };
        let s2 = JetMap {
            f1: Poly2::x(d)
                .add(&Poly2::monomial(d, 0, 2, -0.3))
                .add(&Poly2::monomial(d, 0, 3, 0.2)),
            f2: Poly2::y(d),
        };
        l.compose(&s1.compose(&s2))
    }

    #[test]
    fn inverse_round_trip() {
        let f = shear_saddle(0.4, 4);
        let inv = f.inverse().unwrap();
        let id = f.compose(&inv).sub(&JetMap::identity(4));
        assert!(id.max_abs() < 1e-13, "{}", id.max_abs());
    }

    #[test]
    fn diagonal_linear_jet_is_fixed() {
        let mu = 0.3;
        let f = JetMap::linear(3, [[mu, 0.0], [0.0, 1.0 / mu]]);
        let nf = moser_normal_form(&PlanarJet::new(f.clone()).unwrap()).unwrap();
        assert!(nf.normal.map().sub(&f).max_abs() < 1e-15);
        assert!(nf.change.sub(&JetMap::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn reduces_shear_saddle() {
        for d in 3..=5 {
            let f = shear_saddle(0.5, d);
            let jet = PlanarJet::new(f.clone()).unwrap();
            let nf = moser_normal_form(&jet).unwrap();
            let defect = normal_form_defect(nf.normal.map());
            assert!(defect.quadratic < 1e-12, "{defect:?}");
            assert!(defect.axis < 1e-12, "{defect:?}");
            let lhs = f.compose(&nf.change);
            let rhs = nf.change.compose(nf.normal.map());
            assert!(lhs.sub(&rhs).max_abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_invalid_jets() {
        let f = JetMap::linear(3, [[2.0, 0.0], [0.0, 2.0]]);
        assert!(matches!(PlanarJet::new(f), Err(Error::InvalidJet(_))));
        let f = JetMap::linear(2, [[0.5, 0.0], [0.0, 2.0]]);
        assert!(PlanarJet::new(f).is_err());
        let mut f = JetMap::linear(3, [[0.5, 0.0], [0.0, 2.0]]);
        f.f1.set(0, 0, 0.1);
        assert!(PlanarJet::new(f).is_err());
    }
}
