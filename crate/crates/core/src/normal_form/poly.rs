use std::fmt;

use crate::scalar::Scalar;

/// Bivariate polynomial truncated at total degree `d`.
#[derive(Clone, PartialEq)]
pub struct Poly2<S> {
    degree: usize,
    coeffs: Vec<S>,
}

#[inline]
fn index(i: usize, j: usize) -> usize {
    let t = i + j;
    t * (t + 1) / 2 + j
}

impl<S: fmt::Debug> fmt::Debug for Poly2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for t in 0..=self.degree {
            for j in 0..=t {
                list.entry(&(t - j, j, &self.coeffs[index(t - j, j)]));
            }
        }
        list.finish()
    }
}

impl<S: Scalar> Poly2<S> {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![S::zero(); index(0, degree) + 1],
        }
    }

    pub fn monomial(degree: usize, i: usize, j: usize, c: S) -> Self {
        let mut p = Self::zero(degree);
        p.set(i, j, c);
        p
    }

    pub fn x(degree: usize) -> Self {
        Self::monomial(degree, 1, 0, S::one())
    }

    pub fn y(degree: usize) -> Self {
        Self::monomial(degree, 0, 1, S::one())
    }

    pub fn constant(degree: usize, c: S) -> Self {
        Self::monomial(degree, 0, 0, c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `x^i y^j` (zero beyond the truncation).
    pub fn get(&self, i: usize, j: usize) -> S {
        if i + j > self.degree {
            S::zero()
        } else {
            self.coeffs[index(i, j)]
        }
    }

    /// Sets the coefficient of `x^i y^j`; ignored beyond the truncation.
    pub fn set(&mut self, i: usize, j: usize, c: S) {
        if i + j <= self.degree {
            self.coeffs[index(i, j)] = c;
        }
    }

    /// `(i, j, c)` for every monomial up to the truncation degree.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        (0..=self.degree).flat_map(move |t| (0..=t).map(move |j| (t - j, j, self.get(t - j, j))))
    }

    pub fn max_abs(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |a, c| a.max(c.abs()))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *a = *a + *b;
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
            *a = *a - *b;
        }
        out
    }

    pub fn scale(&self, c: S) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|v| *v * c).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = self.degree;
        let mut out = Self::zero(d);
        for (i1, j1, a) in self.terms() {
            if a == S::zero() {
                continue;
            }
            for (i2, j2, b) in o.terms() {
                if i1 + j1 + i2 + j2 > d {
                    break;
                }
                let k = index(i1 + i2, j1 + j2);
                out.coeffs[k] = out.coeffs[k] + a * b;
            }
        }
        out
    }

    pub fn eval(&self, x: S, y: S) -> S {
        self.terms()
            .map(|(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32))
            .fold(S::zero(), |a, b| a + b)
    }

    /// `self(a(x,y), b(x,y))`, truncated.
    pub fn compose(&self, a: &Self, b: &Self) -> Self {
        let d = self.degree;
        let mut pa = vec![Self::constant(d, S::one())];
        let mut pb = vec![Self::constant(d, S::one())];
        for n in 1..=d {
            pa.push(pa[n - 1].mul(a));
            pb.push(pb[n - 1].mul(b));
        }
        let mut out = Self::zero(d);
        for (i, j, c) in self.terms() {
            if c != S::zero() {
                out = out.add(&pa[i].mul(&pb[j]).scale(c));
            }
        }
        out
    }

    /// `1 / (1 + self)` for a polynomial without constant term.
    pub fn recip_one_plus(&self) -> Self {
        let d = self.degree;
        let mut out = Self::constant(d, S::one());
        let mut term = Self::constant(d, S::one());
        let neg = self.scale(-S::one());
        for _ in 0..d {
            term = term.mul(&neg);
            out = out.add(&term);
        }
        out
    }
}
