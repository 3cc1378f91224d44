//! Real algebraic numbers as (squarefree polynomial, isolating interval),
//! with exact comparison and resultant-based arithmetic.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::factor::irreducible_factors;
use super::interval::{ComplexInterval, RatInterval};
use super::poly::RatPoly;
use super::rational::{self, int, pow2, Rational};
use super::resultant::{difference_polynomial, product_polynomial, sum_polynomial};
use super::sturm::{isolating_intervals, isolating_intervals_in, SturmSequence};
use crate::error::{Error, Result};

/// Hard floor for refinement during undecided comparisons.
pub const WIDTH_FLOOR_BITS: u32 = 256;

/// A real root of `poly` singled out by `[lo, hi]`.
///
/// Either `lo == hi` is the root itself, or `lo < hi`, neither endpoint is a
/// root, and the open interval holds exactly one root.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraicReal {
    poly: RatPoly,
    lo: Rational,
    hi: Rational,
}

impl AlgebraicReal {
    /// Trusted constructor; the caller guarantees the isolation invariant.
    pub fn from_isolating(poly: RatPoly, lo: Rational, hi: Rational) -> Self {
        let (_, prim) = poly.primitive_part();
        AlgebraicReal { poly: RatPoly::from_bigints(&prim), lo, hi }
    }

    /// Checked constructor.
    pub fn new(poly: RatPoly, lo: Rational, hi: Rational) -> Result<Self> {
        if poly.deg() == 0 || lo > hi {
            return Err(Error::InvalidInput("algebraic number needs a nonconstant polynomial and lo <= hi".into()));
        }
        if !poly.is_squarefree() {
            return Err(Error::NonSquarefreeInput);
        }
        if lo == hi {
            if !poly.eval(&lo).is_zero() {
                return Err(Error::InvalidInput("point interval is not a root".into()));
            }
            return Ok(Self::from_rational(&lo));
        }
        if poly.eval(&lo).is_zero() || poly.eval(&hi).is_zero() {
            return Err(Error::InvalidInput("isolating interval endpoint is a root".into()));
        }
        if SturmSequence::new(&poly).count_in(&lo, &hi) != 1 {
            return Err(Error::InvalidInput("interval does not isolate exactly one root".into()));
        }
        Ok(Self::from_isolating(poly, lo, hi))
    }

    pub fn from_rational(q: &Rational) -> Self {
        AlgebraicReal { poly: RatPoly::linear_root(q).primitive(), lo: q.clone(), hi: q.clone() }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(&int(k))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    /// Positive square root of a positive rational.
    pub fn sqrt_rational(q: &Rational) -> Result<Self> {
        Self::from_rational(q).sqrt()
    }

    pub fn poly(&self) -> &RatPoly {
        &self.poly
    }

    pub fn interval(&self) -> RatInterval {
        RatInterval::new(self.lo.clone(), self.hi.clone())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Bisects until the interval width is at most `eps`; a subset of the old interval.
    pub fn refine(&self, eps: &Rational) -> AlgebraicReal {
        if self.is_point() || &(&self.hi - &self.lo) <= eps {
            return self.clone();
        }
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        let s_lo = self.poly.sign_at(&lo);
        while &(&hi - &lo) > eps {
            let mid = (&lo + &hi) / int(2);
            let s = self.poly.sign_at(&mid);
            if s == 0 {
                return Self::from_rational(&mid);
            }
            if s == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        AlgebraicReal { poly: self.poly.clone(), lo, hi }
    }

    pub fn refine_bits(&self, bits: u32) -> AlgebraicReal {
        self.refine(&pow2(-(bits as i64)))
    }

    /// Enclosure of width at most `2^-bits`.
    pub fn interval_bits(&self, bits: u32) -> RatInterval {
        self.refine_bits(bits).interval()
    }

    pub fn to_f64(&self) -> f64 {
        self.interval_bits(60).mid_f64()
    }

    /// Replaces the polynomial by the minimal polynomial (primitive integer form).
    pub fn minimal(&self) -> AlgebraicReal {
        if self.is_point() {
            return Self::from_rational(&self.lo);
        }
        if self.poly.deg() == 1 {
            let r = -self.poly.coeff(0) / self.poly.coeff(1);
            return Self::from_rational(&r);
        }
        let factors = irreducible_factors(&self.poly);
        if factors.len() == 1 {
            return self.clone();
        }
        for f in factors {
            if SturmSequence::new(&f).count_in(&self.lo, &self.hi) == 1 {
                if f.deg() == 1 {
                    return Self::from_rational(&(-f.coeff(0) / f.coeff(1)));
                }
                return Self::from_isolating(f, self.lo.clone(), self.hi.clone());
            }
        }
        unreachable!("one irreducible factor carries the isolated root")
    }

    pub fn degree(&self) -> usize {
        self.minimal().poly.deg()
    }

    /// Exact rational value if the number is rational.
    pub fn to_rational(&self) -> Option<Rational> {
        let m = self.minimal();
        m.is_point().then(|| m.lo.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_some()
    }

    pub fn is_zero(&self) -> bool {
        if self.is_point() {
            return self.lo.is_zero();
        }
        // zero is isolated in the interval iff it lies inside and is a root
        self.lo.is_negative() && self.hi.is_positive() && self.poly.eval(&Rational::zero()).is_zero()
    }

    /// Sign, decided exactly.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let mut a = self.clone();
        loop {
            if a.lo.is_positive() || (a.is_point() && a.lo.is_positive()) {
                return 1;
            }
            if a.hi.is_negative() {
                return -1;
            }
            let w = (&a.hi - &a.lo) / int(4);
            a = a.refine(&w);
        }
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, other: &AlgebraicReal) -> Ordering {
        if self.is_point() && other.is_point() {
            return self.lo.cmp(&other.lo);
        }
        if self.hi < other.lo {
            return Ordering::Less;
        }
        if other.hi < self.lo {
            return Ordering::Greater;
        }
        if self.equals(other) {
            return Ordering::Equal;
        }
        let mut a = self.clone();
        let mut b = other.clone();
        loop {
            if a.hi < b.lo {
                return Ordering::Less;
            }
            if b.hi < a.lo {
                return Ordering::Greater;
            }
            let wa = (&a.hi - &a.lo) / int(2);
            let wb = (&b.hi - &b.lo) / int(2);
            a = a.refine(&wa);
            b = b.refine(&wb);
        }
    }

    /// Exact equality through the gcd of the defining polynomials.
    pub fn equals(&self, other: &AlgebraicReal) -> bool {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo > hi {
            return false;
        }
        if self.is_point() {
            return other.contains_root_at(&self.lo);
        }
        if other.is_point() {
            return self.contains_root_at(&other.lo);
        }
        let g = self.poly.gcd(&other.poly);
        if g.deg() == 0 {
            return false;
        }
        SturmSequence::new(&g).count_closed(&lo, &hi) > 0
    }

    fn contains_root_at(&self, x: &Rational) -> bool {
        if self.is_point() {
            return &self.lo == x;
        }
        &self.lo < x && x < &self.hi && self.poly.eval(x).is_zero()
    }

    pub fn neg(&self) -> AlgebraicReal {
        AlgebraicReal { poly: self.poly.negate_arg().primitive(), lo: -&self.hi, hi: -&self.lo }
    }

    /// Picks the root of `r` determined by an enclosure generator `approx(bits)`.
    fn select_root(r: &RatPoly, approx: impl Fn(u32) -> RatInterval) -> AlgebraicReal {
        let r = r.squarefree_part();
        let sturm = SturmSequence::new(&r);
        let mut bits = 16;
        loop {
            let iv = approx(bits);
            if iv.is_point() && r.eval(&iv.lo).is_zero() {
                return Self::from_rational(&iv.lo);
            }
            let d = pow2(-(bits as i64));
            let lo = &iv.lo - &d;
            let hi = &iv.hi + &d;
            if !r.eval(&lo).is_zero() && !r.eval(&hi).is_zero() && sturm.count_in(&lo, &hi) == 1 {
                return AlgebraicReal::from_isolating(r, lo, hi).minimal();
            }
            bits *= 2;
            assert!(bits <= 1 << 16, "root selection failed to separate");
        }
    }

    pub fn add(&self, other: &AlgebraicReal) -> AlgebraicReal {
        if let (Some(a), Some(b)) = (self.point(), other.point()) {
            return Self::from_rational(&(a + b));
        }
        if let Some(a) = self.point() {
            return other.shift(a);
        }
        if let Some(b) = other.point() {
            return self.shift(b);
        }
        let r = sum_polynomial(&self.poly, &other.poly);
        Self::select_root(&r, |bits| self.interval_bits(bits + 2).add(&other.interval_bits(bits + 2)))
    }

    pub fn sub(&self, other: &AlgebraicReal) -> AlgebraicReal {
        self.add(&other.neg())
    }

    fn point(&self) -> Option<&Rational> {
        self.is_point().then_some(&self.lo)
    }

    /// `self + q` for rational `q`.
    pub fn shift(&self, q: &Rational) -> AlgebraicReal {
        let p = self.poly.compose(&RatPoly::new(vec![-q.clone(), Rational::one()]));
        AlgebraicReal::from_isolating(p, &self.lo + q, &self.hi + q)
    }

    /// `self * q` for rational `q`.
    pub fn scale(&self, q: &Rational) -> AlgebraicReal {
        if q.is_zero() {
            return Self::zero();
        }
        if self.is_point() {
            return Self::from_rational(&(&self.lo * q));
        }
        let p = self.poly.scale_arg(&q.recip());
        let (a, b) = (&self.lo * q, &self.hi * q);
        if q.is_positive() {
            AlgebraicReal::from_isolating(p, a, b)
        } else {
            AlgebraicReal::from_isolating(p, b, a)
        }
    }

    pub fn mul(&self, other: &AlgebraicReal) -> AlgebraicReal {
        if let Some(a) = self.point() {
            return other.scale(a);
        }
        if let Some(b) = other.point() {
            return self.scale(b);
        }
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        // both irrational, so neither minimal polynomial vanishes at 0
        let a = self.minimal();
        let b = other.minimal();
        let r = product_polynomial(&a.poly, &b.poly);
        Self::select_root(&r, |bits| {
            let ia = a.interval_bits(bits + 4);
            let ib = b.interval_bits(bits + 4);
            ia.mul(&ib).round_out(bits + 2)
        })
    }

    /// Reciprocal; `None` for zero.
    pub fn inv(&self) -> Option<AlgebraicReal> {
        if self.is_zero() {
            return None;
        }
        if let Some(a) = self.point() {
            return Some(Self::from_rational(&a.recip()));
        }
        let mut a = self.minimal();
        while a.interval().contains_zero() {
            let w = (&a.hi - &a.lo) / int(4);
            a = a.refine(&w);
        }
        Some(AlgebraicReal::from_isolating(a.poly.reverse(), a.hi.recip(), a.lo.recip()))
    }

    pub fn div(&self, other: &AlgebraicReal) -> Option<AlgebraicReal> {
        other.inv().map(|i| self.mul(&i))
    }

    /// Positive square root of a non-negative number.
    pub fn sqrt(&self) -> Result<AlgebraicReal> {
        match self.signum() {
            -1 => Err(Error::Precondition("square root of a negative number".into())),
            0 => Ok(Self::zero()),
            _ => {
                let r = self.poly.substitute_square();
                Ok(Self::select_root(&r, |bits| self.interval_bits(2 * bits + 4).sqrt(bits + 2)))
            }
        }
    }

    /// Evaluates `p(self)` for a rational polynomial.
    pub fn eval_poly(&self, p: &RatPoly) -> AlgebraicReal {
        let mut acc = AlgebraicReal::zero();
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).shift(c);
        }
        acc
    }
}

impl fmt::Debug for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", rational::fmt_rational(&self.lo))
        } else {
            write!(f, "root of {} near {:.12}", self.poly, self.to_f64())
        }
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraicWire {
    #[serde(with = "rational::serde_rational::vec")]
    minpoly: Vec<Rational>,
    #[serde(with = "rational::serde_rational::pair")]
    interval: (Rational, Rational),
}

impl Serialize for AlgebraicReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlgebraicWire { minpoly: self.poly.coeffs().to_vec(), interval: (self.lo.clone(), self.hi.clone()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraicReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = AlgebraicWire::deserialize(d)?;
        AlgebraicReal::new(RatPoly::new(w.minpoly), w.interval.0, w.interval.1).map_err(serde::de::Error::custom)
    }
}

/// A complex root `re + i im` of a polynomial, `im > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexAlgebraic {
    pub re: AlgebraicReal,
    pub im: AlgebraicReal,
}

impl ComplexAlgebraic {
    pub fn enclosure(&self, bits: u32) -> ComplexInterval {
        ComplexInterval::new(self.re.interval_bits(bits), self.im.interval_bits(bits))
    }
}

/// Roots of `p` in the open upper half plane, sorted by real part then
/// imaginary part. `p` must be squarefree with rational coefficients.
pub fn complex_roots_upper(p: &RatPoly) -> Result<Vec<ComplexAlgebraic>> {
    if !p.is_squarefree() {
        return Err(Error::NonSquarefreeInput);
    }
    let d = p.deg();
    let s = SturmSequence::new(p).count_real_roots();
    let t = (d - s) / 2;
    if t == 0 {
        return Ok(Vec::new());
    }
    // 2 Re(z) is a root of the sum polynomial of p with itself
    let sums = sum_polynomial(p, p).scale_arg(&int(2)).squarefree_part();
    let re_cands: Vec<AlgebraicReal> = isolating_intervals(&sums)
        .into_iter()
        .map(|(lo, hi)| AlgebraicReal::from_isolating(sums.clone(), lo, hi))
        .collect();
    // z - conj(z) = 2 i Im(z) is a root of the difference polynomial
    let diff = difference_polynomial(p);
    let mut stripped = diff.coeffs().to_vec();
    let lead_zeros = stripped.iter().take_while(|c| c.is_zero()).count();
    stripped.drain(..lead_zeros);
    let even: Vec<Rational> = stripped.iter().step_by(2).cloned().collect();
    // S(w) with S(x^2) = stripped(x); Im = b solves S(-4 b^2) = 0
    let im_poly = RatPoly::new(even).scale_arg(&int(-4)).substitute_square().squarefree_part();
    let zero = Rational::zero();
    let bound = im_poly.root_bound();
    let im_cands: Vec<AlgebraicReal> = if im_poly.deg() == 0 {
        Vec::new()
    } else {
        let lo = if im_poly.eval(&zero).is_zero() { pow2(-64).min(bound.clone() / int(2)) } else { zero.clone() };
        positive_intervals(&im_poly, lo, bound)
    };
    let mut alive: Vec<(usize, usize)> =
        (0..re_cands.len()).flat_map(|i| (0..im_cands.len()).map(move |j| (i, j))).collect();
    let mut bits = 16u32;
    while alive.len() > t {
        let enc_re: Vec<RatInterval> = re_cands.iter().map(|a| a.interval_bits(bits)).collect();
        let enc_im: Vec<RatInterval> = im_cands.iter().map(|a| a.interval_bits(bits)).collect();
        alive.retain(|&(i, j)| {
            let z = ComplexInterval::new(enc_re[i].clone(), enc_im[j].clone());
            p.eval_complex(&z, bits + 8).contains_zero()
        });
        bits *= 2;
        if bits > 1 << 14 {
            return Err(Error::PrecisionFloorHit("complex root separation".into()));
        }
    }
    if alive.len() != t {
        return Err(Error::PrecisionFloorHit("complex root count mismatch".into()));
    }
    let mut out: Vec<ComplexAlgebraic> = alive
        .into_iter()
        .map(|(i, j)| ComplexAlgebraic { re: re_cands[i].minimal(), im: im_cands[j].minimal() })
        .collect();
    out.sort_by(|a, b| a.re.cmp_exact(&b.re).then_with(|| a.im.cmp_exact(&b.im)));
    Ok(out)
}

fn positive_intervals(p: &RatPoly, lo: Rational, hi: Rational) -> Vec<AlgebraicReal> {
    // guard against a root sitting exactly on the lower endpoint
    let mut lo = lo;
    while p.eval(&lo).is_zero() {
        lo /= int(2);
    }
    isolating_intervals_in(p, &lo, &hi)
        .into_iter()
        .map(|(a, b)| AlgebraicReal::from_isolating(p.clone(), a, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use crate::arith::sturm::isolate_real_roots;

    fn sqrt(k: i64) -> AlgebraicReal {
        AlgebraicReal::sqrt_rational(&int(k)).unwrap()
    }

    #[test]
    fn refine_stays_inside_and_is_idempotent() {
        let r = AlgebraicReal::new(RatPoly::from_ints(&[-2, 0, 1]), int(1), int(2)).unwrap();
        let t = r.refine(&rat(1, 100));
        assert!(t.interval().width() <= rat(1, 100));
        assert!(t.interval().lo >= int(1) && t.interval().hi <= int(2));
        assert_eq!(t.refine(&rat(1, 100)), t);
        assert!(t.equals(&r));
    }

    #[test]
    fn arithmetic_identities() {
        let s2 = sqrt(2);
        let prod = s2.mul(&s2);
        assert_eq!(prod.to_rational(), Some(int(2)));
        let sum = s2.add(&sqrt(3));
        assert_eq!(sum.poly(), &RatPoly::from_ints(&[1, 0, -10, 0, 1]));
        assert!((sum.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-12);
        let z = s2.sub(&s2);
        assert_eq!(z.to_rational(), Some(int(0)));
        let inv = s2.inv().unwrap();
        assert_eq!(inv.mul(&s2).to_rational(), Some(int(1)));
        assert_eq!(s2.neg().signum(), -1);
    }

    #[test]
    fn exact_comparison() {
        let a = sqrt(2).add(&sqrt(3));
        let b = sqrt(5).add(&AlgebraicReal::from_rational(&rat(1, 1_000_000_000)));
        assert_eq!(a.cmp_exact(&b), Ordering::Greater);
        let c = sqrt(8);
        let d = sqrt(2).scale(&int(2));
        assert_eq!(c.cmp_exact(&d), Ordering::Equal);
    }

    #[test]
    fn cube_root_of_two_minimal() {
        let r = isolate_real_roots(&RatPoly::from_ints(&[-2, 0, 0, 1])).unwrap()[0].clone();
        let cube = r.mul(&r).mul(&r);
        assert_eq!(cube.to_rational(), Some(int(2)));
    }

    #[test]
    fn complex_roots_of_cube_root_polynomial() {
        let roots = complex_roots_upper(&RatPoly::from_ints(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(roots.len(), 1);
        let c = 2f64.powf(1.0 / 3.0);
        assert!((roots[0].re.to_f64() + c / 2.0).abs() < 1e-12);
        assert!((roots[0].im.to_f64() - c * 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn complex_roots_of_fifth_cyclotomic() {
        let roots = complex_roots_upper(&RatPoly::from_ints(&[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        let tau = std::f64::consts::TAU;
        assert!((roots[0].re.to_f64() - (2.0 * tau / 5.0).cos()).abs() < 1e-12);
        assert!((roots[1].re.to_f64() - (tau / 5.0).cos()).abs() < 1e-12);
        assert!((roots[1].im.to_f64() - (tau / 5.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_unit() {
        let roots = complex_roots_upper(&RatPoly::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].re.to_rational(), Some(int(0)));
        assert_eq!(roots[0].im.to_rational(), Some(int(1)));
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(sqrt(2)).unwrap();
        assert_eq!(v["minpoly"], serde_json::json!(["-2/1", "0/1", "1/1"]));
        let back: AlgebraicReal = serde_json::from_value(v).unwrap();
        assert!(back.equals(&sqrt(2)));
    }
}
