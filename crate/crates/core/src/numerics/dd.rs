//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`s with
//! `|lo| <= ulp(hi) / 2`, giving roughly 106 bits of significand.
//!
//! Only the operations the shadowing constructions and the finite-difference
//! cocycle need are provided: the four field operations, `sqrt`, exact
//! conversion from `i128`, reduction mod 1, and `sin`/`cos`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const PI: Self = Self {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const TAU: Self = Self {
        hi: std::f64::consts::TAU,
        lo: 2.449_293_598_294_706_4e-16,
    };
    pub const FRAC_PI_2: Self = Self {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123_233_995_736_766e-17,
    };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Exact for `|n| < 2^106`.
    pub fn from_i128(n: i128) -> Self {
        let hi = n as f64;
        // `hi` is within one ulp of n, so the remainder fits in i128.
        let rem = n - hi as i128;
        let (s, e) = quick_two_sum(hi, rem as f64);
        Self { hi: s, lo: e }
    }

    pub fn ratio(num: i128, den: i128) -> Self {
        Self::from_i128(num) / Self::from_i128(den)
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (s, e) = quick_two_sum(hi, self.lo.floor());
            Self { hi: s, lo: e }
        } else {
            Self { hi, lo: 0.0 }
        }
    }

    pub fn round(self) -> Self {
        (self + Self::from_f64(0.5)).floor()
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn fract(self) -> Self {
        let r = self - self.floor();
        if r >= Self::ONE {
            r - Self::ONE
        } else if r < Self::ZERO {
            r + Self::ONE
        } else {
            r
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let y = self.hi.sqrt();
        let yy = Self::from_f64(y).sqr();
        let corr = (self - yy).hi / (2.0 * y);
        let (s, e) = quick_two_sum(y, corr);
        Self { hi: s, lo: e }
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = Self::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }

    /// `(sin x, cos x)`, accurate to a few units of 1e-32 for moderate `|x|`.
    pub fn sin_cos(self) -> (Self, Self) {
        // reduce by multiples of pi/2 into [-pi/4, pi/4]
        let q = (self / Self::FRAC_PI_2).round();
        let r = self - q * Self::FRAC_PI_2;
        let quadrant = (q.hi as i64 + q.lo as i64).rem_euclid(4);
        let (s, c) = taylor_sin_cos(r);
        match quadrant {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    /// `sin(2 pi t)` and `cos(2 pi t)` after exact reduction of `t` mod 1.
    pub fn sin_cos_turns(self) -> (Self, Self) {
        let t = self - self.round();
        (Self::TAU * t).sin_cos()
    }
}

fn taylor_sin_cos(r: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    let r2 = r.sqr();
    let mut sin = r;
    let mut cos = DoubleDouble::ONE;
    let mut term_s = r;
    let mut term_c = DoubleDouble::ONE;
    let mut n = 1.0_f64;
    loop {
        term_c = -(term_c * r2) / DoubleDouble::from_f64(n * (n + 1.0));
        term_s = -(term_s * r2) / DoubleDouble::from_f64((n + 1.0) * (n + 2.0));
        cos = cos + term_c;
        sin = sin + term_s;
        n += 2.0;
        if term_c.hi.abs() < 1e-34 && term_s.hi.abs() < 1e-34 || n > 60.0 {
            break;
        }
    }
    (sin, cos)
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * Self::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Self::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Self { hi: s, lo: e } + Self::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            ord => ord,
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({:e} + {:e})", self.hi, self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt5_squares_back() {
        let s = DoubleDouble::from_f64(5.0).sqrt();
        let err = (s.sqr() - DoubleDouble::from_f64(5.0)).abs();
        assert!(err.to_f64() < 1e-30, "{err:?}");
    }

    #[test]
    fn division_round_trip() {
        let a = DoubleDouble::ratio(1, 3);
        let back = a * DoubleDouble::from_f64(3.0) - DoubleDouble::ONE;
        assert!(back.abs().to_f64() < 1e-31);
    }

    #[test]
    fn large_integers_convert_exactly() {
        let n: i128 = 123_456_789_012_345_678_901_234_567;
        let d = DoubleDouble::from_i128(n);
        let back = d.hi() as i128 + d.lo() as i128;
        assert!((back - n).abs() <= 1);
    }

    #[test]
    fn trig_matches_f64_and_pythagoras() {
        for i in -40..40 {
            let x = 0.173 * i as f64;
            let (s, c) = DoubleDouble::from_f64(x).sin_cos();
            assert!((s.to_f64() - x.sin()).abs() < 1e-15);
            assert!((c.to_f64() - x.cos()).abs() < 1e-15);
            let one = s.sqr() + c.sqr() - DoubleDouble::ONE;
            assert!(one.abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn turns_reduce_exactly() {
        let t = DoubleDouble::ratio(1, 8) + DoubleDouble::from_f64(7.0);
        let (s, c) = t.sin_cos_turns();
        let h = DoubleDouble::from_f64(0.5).sqrt();
        assert!((s - h).abs().to_f64() < 1e-31);
        assert!((c - h).abs().to_f64() < 1e-31);
    }

    #[test]
    fn fract_in_unit_interval() {
        for v in [-2.5, -1e-20, 0.0, 3.75, 1.0 - 1e-17] {
            let f = DoubleDouble::from_f64(v).fract();
            assert!(f >= DoubleDouble::ZERO && f < DoubleDouble::ONE, "{v} -> {f:?}");
        }
    }
}
