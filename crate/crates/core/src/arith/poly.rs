//! Dense univariate polynomials over Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::interval::{ComplexInterval, RatInterval};
use super::rational::{self, int, parse_rational, Rational};
use crate::error::{Error, Result};

/// Polynomial with rational coefficients in ascending degree.
///
/// The coefficient vector never carries trailing zeros, so the zero polynomial
/// is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatPoly {
    #[serde(with = "rational::serde_rational::vec")]
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| int(v)).collect())
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Self::new(c.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `x - r`
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of `p(x)` as -1, 0, 1.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn eval_interval(&self, x: &RatInterval, bits: u32) -> RatInterval {
        let mut acc = RatInterval::point(Rational::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&RatInterval::point(c.clone())).round_out(bits);
        }
        acc
    }

    pub fn eval_complex(&self, z: &ComplexInterval, bits: u32) -> ComplexInterval {
        let mut acc = ComplexInterval::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(&ComplexInterval::real(RatInterval::point(c.clone()))).round_out(bits);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + rational::to_f64(c))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.lc();
        self.scale(&lc.recip())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        if self.is_zero() || self.deg() < dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); self.deg() - dd + 1];
        let inv = d.lc().recip();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        self.div_rem(d).1
    }

    /// Exact quotient, `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &RatPoly) -> Option<RatPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.monic() };
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (RatPoly::one(), RatPoly::zero());
        let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn is_squarefree(&self) -> bool {
        if self.deg() <= 1 {
            return !self.is_zero();
        }
        self.gcd(&self.derivative()).deg() == 0
    }

    /// Monic squarefree part `p / gcd(p, p')`.
    pub fn squarefree_part(&self) -> RatPoly {
        if self.deg() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    pub fn pow(&self, k: usize) -> RatPoly {
        let mut acc = RatPoly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `self(other(x))`
    pub fn compose(&self, other: &RatPoly) -> RatPoly {
        let mut acc = RatPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &RatPoly::constant(c.clone());
        }
        acc
    }

    /// `self(c * x)`
    pub fn scale_arg(&self, c: &Rational) -> RatPoly {
        let mut f = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &f);
            f *= c;
        }
        RatPoly::new(out)
    }

    /// `self(-x)`
    pub fn negate_arg(&self) -> RatPoly {
        self.scale_arg(&int(-1))
    }

    /// `x^deg * self(1/x)`
    pub fn reverse(&self) -> RatPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        RatPoly::new(c)
    }

    /// `self(x^2)`
    pub fn substitute_square(&self) -> RatPoly {
        let mut out = vec![Rational::zero(); 2 * self.coeffs.len()];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[2 * k] = c.clone();
        }
        RatPoly::new(out)
    }

    /// Content and primitive integer polynomial with positive leading coefficient:
    /// `self = content * primitive`.
    pub fn primitive_part(&self) -> (Rational, Vec<BigInt>) {
        if self.is_zero() {
            return (Rational::zero(), Vec::new());
        }
        let den = rational::common_denominator(&self.coeffs);
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = ints.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        let prim: Vec<BigInt> = ints.iter().map(|c| c / &g).collect();
        (Rational::new(g, den), prim)
    }

    /// Primitive integer version as a `RatPoly`.
    pub fn primitive(&self) -> RatPoly {
        RatPoly::from_bigints(&self.primitive_part().1)
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(rational::is_integer)
    }

    /// Cauchy bound: every root has modulus strictly below the returned value.
    pub fn root_bound(&self) -> Rational {
        let lc = self.lc().abs();
        let m = self.coeffs[..self.deg()]
            .iter()
            .map(|c| c.abs() / &lc)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    /// Parses expressions such as `"x^3-2"`, `"x^4 + x^3 + x^2 + x + 1"`, `"2*x^2 - 1/3"`.
    pub fn parse(s: &str) -> Result<RatPoly> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::InvalidInput("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = cleaned.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' && bytes[i - 1] != b'e' {
                terms.push(&cleaned[start..i]);
                start = i;
            }
        }
        terms.push(&cleaned[start..]);
        let mut acc = RatPoly::zero();
        for term in terms {
            acc = &acc + &parse_term(term, s)?;
        }
        Ok(acc)
    }
}

fn parse_term(term: &str, whole: &str) -> Result<RatPoly> {
    let bad = || Error::InvalidInput(format!("cannot parse polynomial {whole:?}"));
    let (sign, body) = match term.as_bytes().first() {
        Some(b'-') => (-1, &term[1..]),
        Some(b'+') => (1, &term[1..]),
        _ => (1, term),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (coef_str, var_part) = match body.find('x') {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let coef_str = coef_str.trim_end_matches('*');
    let coef = if coef_str.is_empty() {
        Rational::one()
    } else {
        parse_rational(coef_str).map_err(|_| bad())?
    };
    let exp = match var_part {
        None => 0,
        Some("") => 1,
        Some(rest) => {
            let e = rest.strip_prefix('^').ok_or_else(bad)?;
            e.parse::<usize>().map_err(|_| bad())?
        }
    };
    Ok(RatPoly::monomial(coef * int(sign), exp))
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coef = k == 0 || !a.is_one();
            if show_coef {
                write!(f, "{a}")?;
                if k > 0 {
                    write!(f, "*")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for RatPoly {
    type Output = RatPoly;
    fn add(self, o: RatPoly) -> RatPoly {
        &self + &o
    }
}

impl Sub for RatPoly {
    type Output = RatPoly;
    fn sub(self, o: RatPoly) -> RatPoly {
        &self - &o
    }
}

impl Mul for RatPoly {
    type Output = RatPoly;
    fn mul(self, o: RatPoly) -> RatPoly {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn parse_and_display() {
        let p = RatPoly::parse("x^3-2").unwrap();
        assert_eq!(p, RatPoly::from_ints(&[-2, 0, 0, 1]));
        assert_eq!(p.to_string(), "x^3 - 2");
        let q = RatPoly::parse("2*x^2 - 1/3 + x").unwrap();
        assert_eq!(q, RatPoly::new(vec![rat(-1, 3), int(1), int(2)]));
        assert_eq!(RatPoly::parse("-x").unwrap(), RatPoly::from_ints(&[0, -1]));
        assert!(RatPoly::parse("x^").is_err());
        assert!(RatPoly::parse("y+1").is_err());
    }

    #[test]
    fn division_and_gcd() {
        let a = RatPoly::from_ints(&[-1, 0, 1]); // x^2 - 1
        let b = RatPoly::from_ints(&[1, 1]); // x + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, RatPoly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        let c = RatPoly::from_ints(&[1, 2, 1]);
        assert_eq!(a.gcd(&c), b);
        let (g, s, t) = a.xgcd(&RatPoly::from_ints(&[2, 1]));
        assert_eq!(g, RatPoly::one());
        assert_eq!(&(&s * &a) + &(&t * &RatPoly::from_ints(&[2, 1])), g);
    }

    #[test]
    fn squarefree_detection() {
        let p = RatPoly::from_ints(&[-3, 5, -1, -1]); // -(x-1)^2 (x+3)
        assert!(!p.is_squarefree());
        assert_eq!(p.squarefree_part(), RatPoly::from_ints(&[-3, 2, 1]));
    }

    #[test]
    fn primitive_part_normalizes_sign() {
        let p = RatPoly::new(vec![rat(1, 2), rat(-3, 4)]);
        let (c, prim) = p.primitive_part();
        assert_eq!(prim, vec![BigInt::from(-2), BigInt::from(3)]);
        assert_eq!(RatPoly::from_bigints(&prim).scale(&c), p);
    }
}
