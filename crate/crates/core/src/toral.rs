//! Linear hyperbolic dynamics on the 2-torus.
//!
//! Periodic points are exact rationals: the fixed points of `A^k` form the
//! group `(A^k - I)^{-1} Z^2 / Z^2`, which is enumerated from a Hermite basis
//! of `adj(A^k - I) Z^2` without any search. Eigendata is computed once in
//! double-double precision and rounded to the working scalar.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::DoubleDouble as DD;
use crate::scalar::Scalar;

pub type IntMatrix = [[i64; 2]; 2];
type WideMatrix = [[i128; 2]; 2];

/// Largest `k` accepted by the periodic-orbit enumeration.
pub const MAX_ENUMERATION_PERIOD: usize = 24;
/// Largest shadowing index handled before double-double loses the residuals.
pub const MAX_SHADOWING_INDEX: usize = 48;

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: `(g, s, t)` with `s a + t b = g = gcd(a, b) >= 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

fn wide_mul(a: &WideMatrix, b: &WideMatrix) -> Result<WideMatrix> {
    let mut out = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let p = a[i][0]
                .checked_mul(b[0][j])
                .and_then(|x| a[i][1].checked_mul(b[1][j]).and_then(|y| x.checked_add(y)))
                .ok_or_else(|| overflow("matrix power"))?;
            out[i][j] = p;
        }
    }
    Ok(out)
}

/// A point of `[0,1)^2` with rational coordinates `x/den, y/den` in lowest
/// terms (`gcd(x, y, den) = 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    x: i128,
    y: i128,
    den: i128,
}

impl RationalPoint {
    pub const ORIGIN: Self = Self { x: 0, y: 0, den: 1 };

    /// Reduces `(x/den, y/den)` mod 1 and to lowest terms.
    pub fn new(x: i128, y: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let (x, y, den) = if den < 0 { (-x, -y, -den) } else { (x, y, den) };
        let x = x.rem_euclid(den);
        let y = y.rem_euclid(den);
        let g = gcd(gcd(x, y), den);
        Self {
            x: x / g,
            y: y / g,
            den: den / g,
        }
    }

    pub fn numerators(&self) -> (i128, i128) {
        (self.x, self.y)
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn to_dd(&self) -> [DD; 2] {
        [DD::ratio(self.x, self.den), DD::ratio(self.y, self.den)]
    }

    pub fn to_f64(&self) -> [f64; 2] {
        let [x, y] = self.to_dd();
        [x.to_f64(), y.to_f64()]
    }

    pub fn to_scalar<S: Scalar>(&self) -> [S; 2] {
        let [x, y] = self.to_f64();
        [S::lit(x), S::lit(y)]
    }

    /// Image under the integer matrix, reduced mod 1.
    pub fn apply(&self, m: &IntMatrix) -> Self {
        let x = m[0][0] as i128 * self.x + m[0][1] as i128 * self.y;
        let y = m[1][0] as i128 * self.x + m[1][1] as i128 * self.y;
        Self::new(x, y, self.den)
    }

    pub fn x_str(&self) -> String {
        format!("{}/{}", self.x, self.den)
    }

    pub fn y_str(&self) -> String {
        format!("{}/{}", self.y, self.den)
    }
}

impl Ord for RationalPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        let by = |a: i128, b: i128| -> Ordering {
            match (a.checked_mul(other.den), b.checked_mul(self.den)) {
                (Some(l), Some(r)) => l.cmp(&r),
                _ => DD::ratio(a, self.den)
                    .partial_cmp(&DD::ratio(b, other.den))
                    .unwrap_or(Ordering::Equal),
            }
        };
        by(self.x, other.x).then_with(|| by(self.y, other.y))
    }
}

impl PartialOrd for RationalPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x_str(), self.y_str())
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct EigenDD {
    pub unstable: DD,
    pub stable: DD,
    pub e_u: [DD; 2],
    pub e_s: [DD; 2],
}

impl EigenDD {
    /// Coordinates `(u, s)` with `p = u e_u + s e_s`.
    pub fn to_eigen(&self, p: [DD; 2]) -> (DD, DD) {
        let det = self.e_u[0] * self.e_s[1] - self.e_u[1] * self.e_s[0];
        let u = (p[0] * self.e_s[1] - p[1] * self.e_s[0]) / det;
        let s = (self.e_u[0] * p[1] - self.e_u[1] * p[0]) / det;
        (u, s)
    }

    pub fn from_eigen(&self, u: DD, s: DD) -> [DD; 2] {
        [
            u * self.e_u[0] + s * self.e_s[0],
            u * self.e_u[1] + s * self.e_s[1],
        ]
    }
}

fn unit_eigenvector(m: &IntMatrix, ev: DD) -> [DD; 2] {
    let [[a, b], [c, d]] = m.map(|r| r.map(|v| DD::from_f64(v as f64)));
    let v1 = [b, ev - a];
    let v2 = [ev - d, c];
    let n1 = v1[0].sqr() + v1[1].sqr();
    let n2 = v2[0].sqr() + v2[1].sqr();
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    let n = n.sqrt();
    let mut v = [v[0] / n, v[1] / n];
    let flip = v[0] < DD::ZERO || (v[0] == DD::ZERO && v[1] < DD::ZERO);
    if flip {
        v = [-v[0], -v[1]];
    }
    v
}

/// An integer unimodular hyperbolic 2x2 matrix acting on the torus, with its
/// eigendata. Eigenvectors are unit length with positive first coordinate.
#[derive(Debug, Clone)]
pub struct ToralAutomorphism<S> {
    matrix: IntMatrix,
    det: i64,
    trace: i64,
    lambda: S,
    unstable_eigenvalue: S,
    stable_eigenvalue: S,
    e_u: [S; 2],
    e_s: [S; 2],
    eig: EigenDD,
}

impl<S: Scalar> ToralAutomorphism<S> {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { det });
        }
        let trace = matrix[0][0] + matrix[1][1];
        if trace.abs() <= 2 {
            return Err(Error::NotHyperbolic { trace });
        }
        let t = DD::from_f64(trace as f64);
        let disc = (t.sqr() - DD::from_f64(4.0 * det as f64)).sqrt();
        let half = DD::from_f64(0.5);
        let unstable = if trace > 0 {
            (t + disc) * half
        } else {
            (t - disc) * half
        };
        let stable = DD::from_f64(det as f64) / unstable;
        let eig = EigenDD {
            unstable,
            stable,
            e_u: unit_eigenvector(&matrix, unstable),
            e_s: unit_eigenvector(&matrix, stable),
        };
        let to_s = |v: DD| S::lit(v.to_f64());
        Ok(Self {
            matrix,
            det,
            trace,
            lambda: to_s(unstable.abs()),
            unstable_eigenvalue: to_s(unstable),
            stable_eigenvalue: to_s(stable),
            e_u: eig.e_u.map(to_s),
            e_s: eig.e_s.map(to_s),
            eig,
        })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    pub fn trace(&self) -> i64 {
        self.trace
    }

    /// Expansion rate `|unstable eigenvalue| > 1`.
    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn log_lambda(&self) -> S {
        S::lit(self.eig.unstable.abs().to_f64().ln())
    }

    pub fn unstable_eigenvalue(&self) -> S {
        self.unstable_eigenvalue
    }

    pub fn stable_eigenvalue(&self) -> S {
        self.stable_eigenvalue
    }

    pub fn e_u(&self) -> [S; 2] {
        self.e_u
    }

    pub fn e_s(&self) -> [S; 2] {
        self.e_s
    }

    pub(crate) fn eig_dd(&self) -> &EigenDD {
        &self.eig
    }

    /// Magnitude of the stable multiplier of a period-`k` orbit, `lambda^-k`.
    pub fn multiplier(&self, k: usize) -> S {
        S::lit(self.eig.unstable.abs().powi(k as u32).to_f64()).recip()
    }

    pub fn apply(&self, p: [S; 2]) -> [S; 2] {
        let m = self.matrix.map(|r| r.map(S::from_i64_lossy));
        [
            m[0][0] * p[0] + m[0][1] * p[1],
            m[1][0] * p[0] + m[1][1] * p[1],
        ]
    }

    pub fn to_eigen(&self, p: [S; 2]) -> (S, S) {
        let (u, s) = self
            .eig
            .to_eigen([DD::from_f64(p[0].as_f64()), DD::from_f64(p[1].as_f64())]);
        (S::lit(u.to_f64()), S::lit(s.to_f64()))
    }

    pub fn from_eigen(&self, u: S, s: S) -> [S; 2] {
        self.eig
            .from_eigen(DD::from_f64(u.as_f64()), DD::from_f64(s.as_f64()))
            .map(|v| S::lit(v.to_f64()))
    }

    fn wide(&self) -> WideMatrix {
        self.matrix.map(|r| r.map(|v| v as i128))
    }

    /// `A^k` in exact integers.
    pub fn power(&self, k: usize) -> Result<[[i128; 2]; 2]> {
        let mut acc: WideMatrix = [[1, 0], [0, 1]];
        let mut base = self.wide();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = wide_mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = wide_mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// `det(A^k - I)`; its absolute value is the number of fixed points of `A^k`.
    pub fn lefschetz_det(&self, k: usize) -> Result<i128> {
        let p = self.power(k)?;
        let det_k: i128 = if self.det == -1 && k % 2 == 1 { -1 } else { 1 };
        let tr = p[0][0]
            .checked_add(p[1][1])
            .ok_or_else(|| overflow("trace"))?;
        Ok(det_k - tr + 1)
    }

    pub fn fixed_point_count(&self, k: usize) -> Result<u64> {
        let d = self.lefschetz_det(k)?.unsigned_abs();
        u64::try_from(d).map_err(|_| overflow("fixed point count"))
    }

    /// Fixed points of `A^k` as an explicit lattice.
    pub fn fixed_points(&self, k: usize) -> Result<FixedPointLattice> {
        if k == 0 {
            return Err(Error::InvalidArgument("period must be positive".into()));
        }
        let p = self.power(k)?;
        let m = [[p[0][0] - 1, p[0][1]], [p[1][0], p[1][1] - 1]];
        let det = m[0][0]
            .checked_mul(m[1][1])
            .and_then(|a| m[0][1].checked_mul(m[1][0]).and_then(|b| a.checked_sub(b)))
            .ok_or_else(|| overflow("det(A^k - I)"))?;
        let den = det.abs();
        // headroom for a*x + b*y with |a|,|b| bounded by the base matrix
        let max_entry = self
            .matrix
            .iter()
            .flatten()
            .map(|v| v.unsigned_abs() as i128)
            .max()
            .unwrap_or(1);
        if den.checked_mul(2 * max_entry + 2).is_none_or(|v| v > i64::MAX as i128) {
            return Err(overflow("fixed point denominator exceeds exact i64 range"));
        }
        // columns of adj(M) generate den * (M^{-1} Z^2)
        let adj = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
        let u = [adj[0][0], adj[1][0]];
        let v = [adj[0][1], adj[1][1]];
        let (g, s, t) = ext_gcd(u[0], v[0]);
        let col1 = [g, s * u[1] + t * v[1]];
        let col2_y = if g == 0 { 0 } else { (v[0] / g) * u[1] - (u[0] / g) * v[1] };
        let step_x = g.abs();
        let step_y = col2_y.abs();
        if step_x == 0 || step_y == 0 || step_x * step_y != den {
            return Err(overflow("degenerate Hermite basis"));
        }
        let shear = col1[1].rem_euclid(step_y);
        Ok(FixedPointLattice {
            k,
            den: den as i64,
            step_x: step_x as i64,
            step_y: step_y as i64,
            shear: shear as i64,
            matrix: self.matrix,
        })
    }

    /// All prime periodic orbits with period `<= k_max`, grouped by period.
    pub fn enumerate_periodic_orbits(&self, k_max: usize) -> Result<OrbitCatalog<S>> {
        if k_max == 0 || k_max > MAX_ENUMERATION_PERIOD {
            return Err(Error::InvalidArgument(format!(
                "k_max must lie in 1..={MAX_ENUMERATION_PERIOD}"
            )));
        }
        let mut by_period = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let lattice = self.fixed_points(k)?;
            let mut reps = lattice.prime_orbit_reps_par();
            reps.sort();
            let orbits = reps
                .into_iter()
                .map(|rep| self.orbit_from_rep(rep))
                .collect();
            by_period.push(orbits);
        }
        Ok(OrbitCatalog { by_period })
    }

    pub fn orbit_from_rep(&self, rep: OrbitRep) -> MapOrbit<S> {
        let points = rep.points(&self.matrix).map(|(x, y)| {
            RationalPoint::new(x as i128, y as i128, rep.den as i128)
        });
        MapOrbit {
            prime_period: rep.k,
            points: points.collect(),
            multiplier: self.multiplier(rep.k),
        }
    }

    /// Orbit of an arbitrary rational point; `None` if it is not periodic
    /// within `max_period` steps.
    pub fn orbit_of(&self, p: RationalPoint, max_period: usize) -> Option<MapOrbit<S>> {
        let mut points = vec![p];
        let mut cur = p.apply(&self.matrix);
        while cur != p {
            if points.len() >= max_period {
                return None;
            }
            points.push(cur);
            cur = cur.apply(&self.matrix);
        }
        let min = points.iter().enumerate().min_by(|a, b| a.1.cmp(b.1))?.0;
        points.rotate_left(min);
        Some(MapOrbit {
            prime_period: points.len(),
            multiplier: self.multiplier(points.len()),
            points,
        })
    }
}

/// The fixed points of `A^k`: with common denominator `den`, the numerators
/// are `(step_x * i, (shear * i + step_y * j) mod den)` for
/// `0 <= i < den/step_x`, `0 <= j < den/step_y`.
#[derive(Debug, Clone)]
pub struct FixedPointLattice {
    k: usize,
    den: i64,
    step_x: i64,
    step_y: i64,
    shear: i64,
    matrix: IntMatrix,
}

/// Representative (lexicographically smallest point) of a prime orbit, as
/// numerators over a common denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitRep {
    pub k: usize,
    pub x: i64,
    pub y: i64,
    pub den: i64,
}

impl Ord for OrbitRep {
    fn cmp(&self, o: &Self) -> Ordering {
        self.k
            .cmp(&o.k)
            .then_with(|| self.point().cmp(&o.point()))
    }
}

impl PartialOrd for OrbitRep {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl OrbitRep {
    pub fn point(&self) -> RationalPoint {
        RationalPoint::new(self.x as i128, self.y as i128, self.den as i128)
    }

    /// The `k` orbit points (numerators over `den`) starting at the representative.
    pub fn points<'a>(&self, m: &'a IntMatrix) -> impl Iterator<Item = (i64, i64)> + 'a {
        let den = self.den;
        let mut cur = (self.x, self.y);
        (0..self.k).map(move |_| {
            let out = cur;
            cur = step(m, cur, den);
            out
        })
    }

    /// Orbit points as `f64` coordinates in `[0,1)^2`.
    pub fn points_f64<'a>(&self, m: &'a IntMatrix) -> impl Iterator<Item = [f64; 2]> + 'a {
        let d = self.den as f64;
        self.points(m).map(move |(x, y)| [x as f64 / d, y as f64 / d])
    }
}

#[inline]
fn step(m: &IntMatrix, (x, y): (i64, i64), den: i64) -> (i64, i64) {
    (
        (m[0][0] * x + m[0][1] * y).rem_euclid(den),
        (m[1][0] * x + m[1][1] * y).rem_euclid(den),
    )
}

/// Rows per parallel work unit; fixed so the reduction tree does not depend
/// on the thread count.
const STRIPE_ROWS: i64 = 2048;

impl FixedPointLattice {
    pub fn period(&self) -> usize {
        self.k
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn len(&self) -> u64 {
        self.den as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn rows(&self) -> i64 {
        self.den / self.step_x
    }

    fn cols(&self) -> i64 {
        self.den / self.step_y
    }

    fn row(&self, i: i64) -> impl Iterator<Item = (i64, i64)> + '_ {
        let x = self.step_x * i;
        let base = (self.shear as i128 * i as i128).rem_euclid(self.den as i128) as i64;
        (0..self.cols()).map(move |j| {
            let y = ((base as i128 + self.step_y as i128 * j as i128) % self.den as i128) as i64;
            (x, y)
        })
    }

    /// Every fixed point of `A^k`, as numerators over `den`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.rows()).flat_map(move |i| self.row(i))
    }

    /// Checks whether the point is the representative of a prime-period-`k` orbit.
    fn is_prime_rep(&self, p: (i64, i64)) -> bool {
        let mut cur = p;
        for s in 1..self.k {
            cur = step(&self.matrix, cur, self.den);
            if cur <= p {
                return s == self.k && cur == p;
            }
        }
        true
    }

    /// Deterministic parallel fold over the prime-orbit representatives.
    /// Stripes of rows are folded independently and merged left to right.
    pub fn fold_prime_orbits<T, I, F, M>(&self, init: I, fold: F, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(T, OrbitRep) -> T + Sync + Send,
        M: Fn(T, T) -> T,
    {
        let rows = self.rows();
        let stripes = (rows + STRIPE_ROWS - 1) / STRIPE_ROWS;
        let parts: Vec<T> = (0..stripes)
            .into_par_iter()
            .map(|s| {
                let mut acc = init();
                for i in s * STRIPE_ROWS..((s + 1) * STRIPE_ROWS).min(rows) {
                    for p in self.row(i) {
                        if self.is_prime_rep(p) {
                            acc = fold(
                                acc,
                                OrbitRep {
                                    k: self.k,
                                    x: p.0,
                                    y: p.1,
                                    den: self.den,
                                },
                            );
                        }
                    }
                }
                acc
            })
            .collect();
        let mut it = parts.into_iter();
        let first = it.next().unwrap_or_else(&init);
        it.fold(first, merge)
    }

    fn prime_orbit_reps_par(&self) -> Vec<OrbitRep> {
        self.fold_prime_orbits(
            Vec::new,
            |mut v, r| {
                v.push(r);
                v
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        )
    }

    pub fn prime_orbit_count(&self) -> u64 {
        self.fold_prime_orbits(|| 0u64, |n, _| n + 1, |a, b| a + b)
    }
}

/// A periodic orbit of the base map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapOrbit<S> {
    pub prime_period: usize,
    /// Orbit points starting at the lexicographically smallest one.
    pub points: Vec<RationalPoint>,
    /// `lambda^-k`.
    pub multiplier: S,
}

impl<S: Scalar> MapOrbit<S> {
    pub fn representative(&self) -> RationalPoint {
        self.points[0]
    }

    pub fn points_scalar(&self) -> impl Iterator<Item = [S; 2]> + '_ {
        self.points.iter().map(|p| p.to_scalar())
    }
}

/// Prime periodic orbits indexed by period.
#[derive(Debug, Clone)]
pub struct OrbitCatalog<S> {
    by_period: Vec<Vec<MapOrbit<S>>>,
}

impl<S: Scalar> OrbitCatalog<S> {
    pub fn k_max(&self) -> usize {
        self.by_period.len()
    }

    pub fn of_period(&self, k: usize) -> &[MapOrbit<S>] {
        k.checked_sub(1)
            .and_then(|i| self.by_period.get(i))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// All orbits ordered by period, then representative.
    pub fn iter(&self) -> impl Iterator<Item = &MapOrbit<S>> {
        self.by_period.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_period.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A point homoclinic to the fixed point at the origin: the crossing of the
/// unstable line through 0 with the stable line through the lattice point `m`.
#[derive(Debug, Clone)]
pub struct HomoclinicPoint<S> {
    pub lattice_shift: [i64; 2],
    /// Unstable coordinate: the point is `alpha e_u mod Z^2`.
    pub alpha: S,
    /// Stable coordinate: the point is also `beta e_s mod Z^2`.
    pub beta: S,
    pub position: [S; 2],
    alpha_dd: DD,
    beta_dd: DD,
}

impl<S: Scalar> HomoclinicPoint<S> {
    pub fn new(a: &ToralAutomorphism<S>, m: [i64; 2]) -> Result<Self> {
        if m == [0, 0] {
            return Err(Error::InvalidArgument("lattice shift must be nonzero".into()));
        }
        let eig = a.eig_dd();
        // alpha e_u - beta e_s = m
        let (alpha, neg_beta) =
            eig.to_eigen([DD::from_f64(m[0] as f64), DD::from_f64(m[1] as f64)]);
        let beta = -neg_beta;
        let pos = [
            (alpha * eig.e_u[0]).fract(),
            (alpha * eig.e_u[1]).fract(),
        ];
        Ok(Self {
            lattice_shift: m,
            alpha: S::lit(alpha.to_f64()),
            beta: S::lit(beta.to_f64()),
            position: pos.map(|v| S::lit(v.to_f64())),
            alpha_dd: alpha,
            beta_dd: beta,
        })
    }

    pub(crate) fn alpha_dd(&self) -> DD {
        self.alpha_dd
    }

    pub(crate) fn beta_dd(&self) -> DD {
        self.beta_dd
    }

    /// Local lift of `A^j h` near the origin: `beta sigma^j e_s` for `j >= 0`
    /// and `alpha Lambda^j e_u` for `j < 0`. Reducing it mod 1 gives the orbit.
    pub(crate) fn orbit_lift_dd(&self, a: &ToralAutomorphism<S>, j: i64) -> [DD; 2] {
        let eig = a.eig_dd();
        if j >= 0 {
            let c = self.beta_dd * eig.stable.powi(j as u32);
            [c * eig.e_s[0], c * eig.e_s[1]]
        } else {
            let c = self.alpha_dd / eig.unstable.powi((-j) as u32);
            [c * eig.e_u[0], c * eig.e_u[1]]
        }
    }

    pub fn orbit_point(&self, a: &ToralAutomorphism<S>, j: i64) -> [S; 2] {
        self.orbit_lift_dd(a, j).map(|v| S::lit(v.fract().to_f64()))
    }

    /// Distance from the unstable line through the origin, mod `Z^2`.
    pub fn distance_to_unstable_line(&self, a: &ToralAutomorphism<S>) -> S {
        distance_to_line_mod1(a.eig_dd().e_u, self.position_dd())
    }

    pub fn distance_to_stable_line(&self, a: &ToralAutomorphism<S>) -> S {
        distance_to_line_mod1(a.eig_dd().e_s, self.position_dd())
    }

    fn position_dd(&self) -> [DD; 2] {
        self.position.map(|v| DD::from_f64(v.as_f64()))
    }

    /// Residual of the defining system `alpha e_u - beta e_s = m`.
    pub fn defining_residual(&self, a: &ToralAutomorphism<S>) -> S {
        let eig = a.eig_dd();
        let r0 = self.alpha_dd * eig.e_u[0] - self.beta_dd * eig.e_s[0]
            - DD::from_f64(self.lattice_shift[0] as f64);
        let r1 = self.alpha_dd * eig.e_u[1] - self.beta_dd * eig.e_s[1]
            - DD::from_f64(self.lattice_shift[1] as f64);
        S::lit(r0.abs().to_f64().max(r1.abs().to_f64()))
    }
}

/// Distance from `p` to the line `R v` on the torus, searching nearby lattice
/// translates (enough for unit `v` and `p` in the unit square).
fn distance_to_line_mod1<S: Scalar>(v: [DD; 2], p: [DD; 2]) -> S {
    let mut best = f64::INFINITY;
    for dx in -3i32..=3 {
        for dy in -3i32..=3 {
            let q = [p[0] + DD::from_f64(dx as f64), p[1] + DD::from_f64(dy as f64)];
            let cross = (q[0] * v[1] - q[1] * v[0]).abs().to_f64();
            best = best.min(cross);
        }
    }
    S::lit(best)
}

pub(crate) fn torus_distance_dd(p: [DD; 2], q: [DD; 2]) -> f64 {
    let d = |a: DD, b: DD| {
        let t = (a - b).fract().to_f64();
        t.min(1.0 - t)
    };
    d(p[0], q[0]).hypot(d(p[1], q[1]))
}

/// Periodic point of period `n` shadowing the homoclinic loop: the exact
/// solution of `(A^n - I) q = m`, with its closed-form eigencoordinates.
#[derive(Debug, Clone)]
pub struct ShadowingPoint<S> {
    pub n: usize,
    /// Exact lift `adj(A^n - I) m / det(A^n - I)` (not reduced mod 1).
    lift: (i128, i128, i128),
    /// `q_n mod 1`.
    pub point: RationalPoint,
    /// `alpha / (Lambda^n - 1)`.
    pub unstable_coord: S,
    /// `beta / (1 - sigma^n)`.
    pub stable_coord: S,
    unstable_dd: DD,
    stable_dd: DD,
}

impl<S: Scalar> ShadowingPoint<S> {
    pub fn new(a: &ToralAutomorphism<S>, h: &HomoclinicPoint<S>, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("shadowing index n must be >= 2".into()));
        }
        if n > MAX_SHADOWING_INDEX {
            return Err(Error::PrecisionLoss(format!(
                "n = {n} exceeds the double-double range (n <= {MAX_SHADOWING_INDEX})"
            )));
        }
        let p = a.power(n)?;
        let m = [[p[0][0] - 1, p[0][1]], [p[1][0], p[1][1] - 1]];
        let det = a.lefschetz_det(n)?;
        let [mx, my] = h.lattice_shift.map(|v| v as i128);
        let lx = m[1][1]
            .checked_mul(mx)
            .and_then(|v| m[0][1].checked_mul(my).and_then(|w| v.checked_sub(w)))
            .ok_or_else(|| overflow("shadowing lift"))?;
        let ly = m[0][0]
            .checked_mul(my)
            .and_then(|v| m[1][0].checked_mul(mx).and_then(|w| v.checked_sub(w)))
            .ok_or_else(|| overflow("shadowing lift"))?;
        let eig = a.eig_dd();
        let unstable_dd = h.alpha_dd() / (eig.unstable.powi(n as u32) - DD::ONE);
        let stable_dd = h.beta_dd() / (DD::ONE - eig.stable.powi(n as u32));
        Ok(Self {
            n,
            lift: (lx, ly, det),
            point: RationalPoint::new(lx, ly, det),
            unstable_coord: S::lit(unstable_dd.to_f64()),
            stable_coord: S::lit(stable_dd.to_f64()),
            unstable_dd,
            stable_dd,
        })
    }

    /// Checks `(A^n - I) q = m` in exact arithmetic. Where the products leave
    /// the `i128` range, checks the equivalent `A^n q = q mod Z^2` by iterating
    /// the numerators modulo the denominator.
    pub fn satisfies_lattice_relation(&self, a: &ToralAutomorphism<S>, m: [i64; 2]) -> bool {
        let Ok(p) = a.power(self.n) else {
            return false;
        };
        let (x, y, d) = self.lift;
        let ax = (p[0][0] - 1).checked_mul(x).zip(p[0][1].checked_mul(y));
        let ay = p[1][0].checked_mul(x).zip((p[1][1] - 1).checked_mul(y));
        match (ax, ay) {
            (Some((a0, a1)), Some((b0, b1))) => {
                a0.checked_add(a1) == (m[0] as i128).checked_mul(d)
                    && b0.checked_add(b1) == (m[1] as i128).checked_mul(d)
            }
            _ => {
                let mut it = self.orbit_numerators(a);
                let Some(first) = it.next() else {
                    return false;
                };
                let last = it.last().unwrap_or(first);
                let mw = a.wide();
                let d = first.2;
                let next = (
                    (mw[0][0] * last.0 + mw[0][1] * last.1).rem_euclid(d),
                    (mw[1][0] * last.0 + mw[1][1] * last.1).rem_euclid(d),
                );
                next == (first.0, first.1)
            }
        }
    }

    /// Eigencoordinates recomputed from the exact lift in double-double,
    /// independently of the closed form.
    pub fn eigen_coords_from_lift(&self, a: &ToralAutomorphism<S>) -> (S, S) {
        let (u, s) = self.eigen_coords_from_lift_dd(a);
        (S::lit(u.to_f64()), S::lit(s.to_f64()))
    }

    pub(crate) fn eigen_coords_from_lift_dd(&self, a: &ToralAutomorphism<S>) -> (DD, DD) {
        let (x, y, d) = self.lift;
        a.eig_dd().to_eigen([DD::ratio(x, d), DD::ratio(y, d)])
    }

    /// Product of the transverse coordinates, constant along the orbit.
    pub fn coordinate_product(&self) -> S {
        S::lit((self.unstable_dd * self.stable_dd).to_f64())
    }

    /// `|A^n q - q mod Z^2|` evaluated from the closed-form eigencoordinates.
    pub fn periodicity_residual(&self, a: &ToralAutomorphism<S>) -> S {
        let eig = a.eig_dd();
        let q = eig.from_eigen(self.unstable_dd, self.stable_dd);
        let qn = eig.from_eigen(
            self.unstable_dd * eig.unstable.powi(self.n as u32),
            self.stable_dd * eig.stable.powi(self.n as u32),
        );
        S::lit(torus_distance_dd(q, qn))
    }

    /// The `n` orbit points `A^i q mod 1`, exact, as numerators over the
    /// (unreduced) denominator.
    pub fn orbit_numerators<'a>(
        &self,
        a: &'a ToralAutomorphism<S>,
    ) -> impl Iterator<Item = (i128, i128, i128)> + 'a {
        let (x, y, d) = self.lift;
        let d = d.abs();
        let sgn = self.lift.2.signum();
        let mut cur = ((x * sgn).rem_euclid(d), (y * sgn).rem_euclid(d));
        let m = a.wide();
        (0..self.n).map(move |_| {
            let out = (cur.0, cur.1, d);
            cur = (
                (m[0][0] * cur.0 + m[0][1] * cur.1).rem_euclid(d),
                (m[1][0] * cur.0 + m[1][1] * cur.1).rem_euclid(d),
            );
            out
        })
    }

    pub fn orbit_points_dd<'a>(
        &self,
        a: &'a ToralAutomorphism<S>,
    ) -> impl Iterator<Item = [DD; 2]> + 'a {
        self.orbit_numerators(a)
            .map(|(x, y, d)| [DD::ratio(x, d), DD::ratio(y, d)])
    }

    pub fn orbit_points<'a>(&self, a: &'a ToralAutomorphism<S>) -> impl Iterator<Item = [S; 2]> + 'a {
        self.orbit_points_dd(a)
            .map(|p| p.map(|v| S::lit(v.to_f64())))
    }

    /// Largest torus distance between the periodic orbit and the homoclinic
    /// pseudo-orbit it shadows (forward half from `h`, backward half into `h`).
    pub fn shadowing_distance(&self, a: &ToralAutomorphism<S>, h: &HomoclinicPoint<S>) -> S {
        let n = self.n as i64;
        let mut worst = 0.0f64;
        for (i, q) in self.orbit_points_dd(a).enumerate() {
            let i = i as i64;
            let j = if 2 * i <= n { i } else { i - n };
            let target = h.orbit_lift_dd(a, j);
            worst = worst.max(torus_distance_dd(q, target));
        }
        S::lit(worst)
    }
}

/// Möbius function by trial division.
pub fn mobius(n: usize) -> i64 {
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of prime orbits of period `k` from trace data alone:
/// `(1/k) sum_{d | k} mobius(k/d) |det(A^d - I)|`.
pub fn prime_orbit_count_from_traces<S: Scalar>(a: &ToralAutomorphism<S>, k: usize) -> Result<u64> {
    let mut total: i128 = 0;
    for d in (1..=k).filter(|d| k % d == 0) {
        total += mobius(k / d) as i128 * a.lefschetz_det(d)?.abs();
    }
    debug_assert_eq!(total % k as i128, 0);
    u64::try_from(total / k as i128).map_err(|_| overflow("orbit count"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> ToralAutomorphism<f64> {
        ToralAutomorphism::new([[2, 1], [1, 1]]).unwrap()
    }

    #[test]
    fn cat_map_eigendata() {
        let a = cat();
        let golden = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((a.lambda() - golden).abs() < 1e-15);
        assert!((a.lambda() - 2.618_033_988_7).abs() < 1e-10);
        let [ux, uy] = a.e_u();
        assert!((uy / ux - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        let [sx, sy] = a.e_s();
        assert!((sy / sx + (5f64.sqrt() + 1.0) / 2.0).abs() < 1e-14);
        assert!(ux > 0.0 && sx > 0.0);
        assert!(((ux * ux + uy * uy) - 1.0).abs() < 1e-15);
        let au = a.apply(a.e_u());
        assert!((au[0] - a.lambda() * ux).abs() < 1e-14);
        assert!((au[1] - a.lambda() * uy).abs() < 1e-14);
        let as_ = a.apply(a.e_s());
        assert!((as_[0] - sx / a.lambda()).abs() < 1e-14);
        assert!((as_[1] - sy / a.lambda()).abs() < 1e-14);
        assert_eq!(a.lambda() * a.stable_eigenvalue(), 1.0);
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert_eq!(
            ToralAutomorphism::<f64>::new([[1, 1], [1, 0]]).unwrap_err(),
            Error::NotHyperbolic { trace: 1 }
        );
        assert_eq!(
            ToralAutomorphism::<f64>::new([[2, 0], [0, 2]]).unwrap_err(),
            Error::NotUnimodular { det: 4 }
        );
        assert!(matches!(
            ToralAutomorphism::<f64>::new([[1, 1], [0, 1]]),
            Err(Error::NotHyperbolic { .. })
        ));
    }

    #[test]
    fn small_period_counts() {
        let a = cat();
        let cat_orbits = a.enumerate_periodic_orbits(3).unwrap();
        assert_eq!(cat_orbits.of_period(1).len(), 1);
        assert_eq!(cat_orbits.of_period(1)[0].points, vec![RationalPoint::ORIGIN]);
        assert_eq!(a.fixed_point_count(2).unwrap(), 5);
        assert_eq!(cat_orbits.of_period(2).len(), 2);
        assert_eq!(a.fixed_point_count(3).unwrap(), 16);
        assert_eq!(cat_orbits.of_period(3).len(), 5);
    }

    #[test]
    fn orbit_points_are_cyclic_and_distinct() {
        let a = cat();
        let catalog = a.enumerate_periodic_orbits(8).unwrap();
        for orbit in catalog.iter() {
            let k = orbit.prime_period;
            assert_eq!(orbit.points.len(), k);
            for i in 0..k {
                assert_eq!(orbit.points[i].apply(a.matrix()), orbit.points[(i + 1) % k]);
            }
            let mut sorted = orbit.points.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), k);
            assert_eq!(sorted[0], orbit.representative());
            let d = a.lefschetz_det(k).unwrap().abs();
            for p in &orbit.points {
                assert_eq!(d % p.den(), 0);
            }
        }
    }

    #[test]
    fn mobius_counts_agree_with_enumeration() {
        let a = cat();
        for k in 1..=12 {
            let enumerated = a.fixed_points(k).unwrap().prime_orbit_count();
            assert_eq!(enumerated, prime_orbit_count_from_traces(&a, k).unwrap(), "k={k}");
        }
    }

    #[test]
    fn orientation_reversing_matrix() {
        let a = ToralAutomorphism::<f64>::new([[3, 1], [1, 0]]).unwrap();
        assert_eq!(a.det(), -1);
        assert!(a.stable_eigenvalue() < 0.0);
        for k in 1..=8 {
            let lattice = a.fixed_points(k).unwrap();
            assert_eq!(lattice.iter().count() as u64, a.fixed_point_count(k).unwrap());
            assert_eq!(
                lattice.prime_orbit_count(),
                prime_orbit_count_from_traces(&a, k).unwrap()
            );
        }
    }

    #[test]
    fn homoclinic_point_for_unit_shift() {
        let a = cat();
        let h = HomoclinicPoint::new(&a, [1, 0]).unwrap();
        // values in the gauge where e_u has first coordinate 1
        assert!((h.alpha * a.e_u()[0] - 0.723_607).abs() < 1e-6);
        assert!((h.beta * a.e_s()[0] + 0.276_393).abs() < 1e-6);
        assert!((h.position[0] - 0.723_607).abs() < 1e-6);
        assert!((h.position[1] - 0.447_214).abs() < 1e-6);
        assert!(h.defining_residual(&a) < 1e-13);
        assert!(h.distance_to_unstable_line(&a) < 1e-12);
        assert!(h.distance_to_stable_line(&a) < 1e-12);
        assert!(HomoclinicPoint::new(&a, [0, 0]).is_err());
        let h2 = HomoclinicPoint::new(&a, [0, 1]).unwrap();
        assert!(h2.distance_to_unstable_line(&a) < 1e-12);
    }

    #[test]
    fn shadowing_point_is_exactly_periodic() {
        let a = cat();
        let h = HomoclinicPoint::new(&a, [1, 0]).unwrap();
        for n in [2, 5, 12, 24, 36, 48] {
            let q = ShadowingPoint::new(&a, &h, n).unwrap();
            assert!(q.satisfies_lattice_relation(&a, [1, 0]), "n={n}");
            assert!(q.periodicity_residual(&a) < 1e-12, "n={n}");
            let orbit = a.orbit_of(q.point, n).expect("periodic");
            assert_eq!(n % orbit.prime_period, 0);
        }
        assert!(matches!(
            ShadowingPoint::new(&a, &h, 49),
            Err(Error::PrecisionLoss(_))
        ));
        assert!(ShadowingPoint::new(&a, &h, 1).is_err());
    }

    #[test]
    fn closed_form_matches_exact_lift() {
        let a = cat();
        let h = HomoclinicPoint::new(&a, [1, 0]).unwrap();
        for n in 2..=40 {
            let q = ShadowingPoint::new(&a, &h, n).unwrap();
            let (u, s) = q.eigen_coords_from_lift(&a);
            assert!(((u - q.unstable_coord) / q.unstable_coord).abs() < 1e-12, "n={n}");
            assert!((s - q.stable_coord).abs() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn mobius_values() {
        let expect = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(mobius(i + 1), *e);
        }
    }
}
