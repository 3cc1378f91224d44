//! Closed intervals with rational endpoints, their complex products, and a
//! fast outward-rounded `f64` variant used by the large box audits.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::rational::{self, Rational};

/// `[lo, hi]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        RatInterval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / rational::int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// `Some(sign)` once the interval excludes zero, or is the point zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn overlaps(&self, o: &RatInterval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    pub fn hull(&self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    pub fn add(&self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn mul(&self, o: &RatInterval) -> RatInterval {
        if self.is_point() && o.is_point() {
            return Self::point(&self.lo * &o.lo);
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    pub fn scale(&self, c: &Rational) -> RatInterval {
        self.mul(&Self::point(c.clone()))
    }

    /// Reciprocal; `None` when the interval contains zero.
    pub fn inv(&self) -> Option<RatInterval> {
        if self.contains_zero() {
            return None;
        }
        Some(RatInterval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn abs(&self) -> RatInterval {
        if self.lo.is_negative() && self.hi.is_positive() {
            RatInterval { lo: Rational::zero(), hi: (-&self.lo).max(self.hi.clone()) }
        } else if self.hi.is_positive() || self.hi.is_zero() && !self.lo.is_negative() {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn square(&self) -> RatInterval {
        let a = self.abs();
        RatInterval { lo: &a.lo * &a.lo, hi: &a.hi * &a.hi }
    }

    pub fn pow(&self, k: u32) -> RatInterval {
        let mut acc = Self::point(Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Square root of the non-negative part, rounded outward to `2^-bits`.
    pub fn sqrt(&self, bits: u32) -> RatInterval {
        RatInterval {
            lo: rational::sqrt_lower(&self.lo.clone().max(Rational::zero()), bits),
            hi: rational::sqrt_upper(&self.hi.clone().max(Rational::zero()), bits),
        }
    }

    /// Real `k`-th root of a positive interval, outward to `2^-bits`.
    pub fn nth_root(&self, k: u32, bits: u32) -> RatInterval {
        RatInterval {
            lo: rational::nth_root_lower(&self.lo.clone().max(Rational::zero()), k, bits),
            hi: rational::nth_root_upper(&self.hi.clone().max(Rational::zero()), k, bits),
        }
    }

    /// Rounds endpoints outward onto the dyadic grid `2^-bits` to keep sizes bounded.
    pub fn round_out(&self, bits: u32) -> RatInterval {
        if self.lo.denom().bits() <= 2 * bits as u64 && self.hi.denom().bits() <= 2 * bits as u64 {
            return self.clone();
        }
        RatInterval { lo: rational::round_down(&self.lo, bits), hi: rational::round_up(&self.hi, bits) }
    }

    pub fn max(&self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: self.lo.clone().max(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()) }
    }

    pub fn min(&self, o: &RatInterval) -> RatInterval {
        RatInterval { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().min(o.hi.clone()) }
    }

    pub fn lo_f64(&self) -> f64 {
        rational::to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        rational::to_f64(&self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        rational::to_f64(&self.mid())
    }
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo_f64(), self.hi_f64())
    }
}

/// Rectangle in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: RatInterval,
    pub im: RatInterval,
}

impl ComplexInterval {
    pub fn new(re: RatInterval, im: RatInterval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn zero() -> Self {
        Self::real(RatInterval::zero())
    }

    pub fn real(re: RatInterval) -> Self {
        ComplexInterval { re, im: RatInterval::zero() }
    }

    pub fn add(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn conj(&self) -> ComplexInterval {
        ComplexInterval { re: self.re.clone(), im: self.im.neg() }
    }

    /// `|z|^2`
    pub fn norm_sq(&self) -> RatInterval {
        self.re.square().add(&self.im.square())
    }

    pub fn round_out(&self, bits: u32) -> ComplexInterval {
        ComplexInterval { re: self.re.round_out(bits), im: self.im.round_out(bits) }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn overlaps(&self, o: &ComplexInterval) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    pub fn width(&self) -> Rational {
        self.re.width().max(self.im.width())
    }
}

/// Outward-rounded double interval.
///
/// Each operation widens its result by one ulp on both sides, which covers
/// the rounding error of a single IEEE operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F64Interval {
    pub lo: f64,
    pub hi: f64,
}

impl F64Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        F64Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        F64Interval { lo: x, hi: x }
    }

    /// Encloses an exactly known rational.
    pub fn from_rational(q: &Rational) -> Self {
        let x = rational::to_f64(q);
        let xq = rational::from_f64(x);
        if &xq == q {
            Self::point(x)
        } else {
            F64Interval { lo: x.next_down(), hi: x.next_up() }
        }
    }

    pub fn from_rat_interval(iv: &RatInterval) -> Self {
        let lo = Self::from_rational(&iv.lo).lo;
        let hi = Self::from_rational(&iv.hi).hi;
        F64Interval { lo, hi }
    }

    pub fn from_int(k: i64) -> Self {
        let x = k as f64;
        if x as i64 == k && x.abs() < 9.0e15 {
            Self::point(x)
        } else {
            F64Interval { lo: x.next_down(), hi: x.next_up() }
        }
    }

    fn widen(lo: f64, hi: f64) -> Self {
        F64Interval { lo: lo.next_down(), hi: hi.next_up() }
    }

    pub fn add(self, o: Self) -> Self {
        Self::widen(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::widen(self.lo - o.hi, self.hi - o.lo)
    }

    pub fn neg(self) -> Self {
        F64Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self::widen(lo, hi)
    }

    pub fn square(self) -> Self {
        let a = self.abs();
        Self::widen(a.lo * a.lo, a.hi * a.hi).clamp_nonneg()
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            F64Interval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    fn clamp_nonneg(self) -> Self {
        F64Interval { lo: self.lo.max(0.0), hi: self.hi }
    }

    pub fn min(self, o: Self) -> Self {
        F64Interval { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }

    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn interval_products_enclose() {
        let a = RatInterval::new(int(-1), int(2));
        let b = RatInterval::new(int(3), int(4));
        let p = a.mul(&b);
        assert_eq!(p.lo, int(-4));
        assert_eq!(p.hi, int(8));
        assert!(a.inv().is_none());
        assert_eq!(b.inv().unwrap().lo, rat(1, 4));
        assert_eq!(a.square().lo, int(0));
    }

    #[test]
    fn sqrt_encloses_root_two() {
        let s = RatInterval::point(int(2)).sqrt(60);
        assert!(s.square().contains(&int(2)));
        assert!(s.width() < rat(1, 1 << 50));
    }

    #[test]
    fn f64_interval_encloses_thirds() {
        let third = F64Interval::from_rational(&rat(1, 3));
        let one = third.mul(F64Interval::from_int(3));
        assert!(one.lo <= 1.0 && one.hi >= 1.0);
        let s = third.sub(third);
        assert!(s.contains_zero());
    }
}
