//! Rational helpers on top of `num_rational::BigRational`.
//!
//! All JSON payloads carry rationals as `"p/q"` strings.

use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.trim_start().starts_with('-');
        let w = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let f = BigInt::from_str(frac).map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac = Rational::new(f, scale);
        let w = from_bigint(w.abs());
        let v = w + frac;
        return Ok(if neg { -v } else { v });
    }
    BigInt::from_str(s).map(from_bigint).map_err(|_| bad())
}

/// Canonical wire form, always `"p/q"` with `q > 0`.
pub fn fmt_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // ratios of huge integers: fall back to a shifted division
        let shift = q.numer().bits().max(q.denom().bits()) as i64 - 900;
        let num = if shift > 0 { q.numer() >> shift as usize } else { q.numer().clone() };
        let den = if shift > 0 { q.denom() >> shift as usize } else { q.denom().clone() };
        num.to_f64().unwrap_or(0.0) / den.to_f64().unwrap_or(1.0)
    })
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Largest dyadic `k / 2^bits` that is `<= q`.
pub fn round_down(q: &Rational, bits: u32) -> Rational {
    if q.denom().bits() <= bits as u64 && is_dyadic(q) {
        return q.clone();
    }
    let scale = BigInt::one() << bits as usize;
    let scaled = q * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

/// Smallest dyadic `k / 2^bits` that is `>= q`.
pub fn round_up(q: &Rational, bits: u32) -> Rational {
    if q.denom().bits() <= bits as u64 && is_dyadic(q) {
        return q.clone();
    }
    let scale = BigInt::one() << bits as usize;
    let scaled = q * Rational::from_integer(scale.clone());
    Rational::new(scaled.ceil().to_integer(), scale)
}

fn is_dyadic(q: &Rational) -> bool {
    let d = q.denom();
    (d & (d - BigInt::one())).is_zero()
}

pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Lower bound on `sqrt(q)` accurate to `2^-bits`, for `q >= 0`.
pub fn sqrt_lower(q: &Rational, bits: u32) -> Rational {
    if !q.is_positive() {
        return Rational::zero();
    }
    // floor(sqrt(q * 4^bits)) / 2^bits
    let scale = BigInt::one() << (2 * bits) as usize;
    let scaled = (q * Rational::from_integer(scale)).floor().to_integer();
    let r = scaled.sqrt();
    Rational::new(r, BigInt::one() << bits as usize)
}

/// Upper bound on `sqrt(q)` accurate to `2^-bits`, for `q >= 0`.
pub fn sqrt_upper(q: &Rational, bits: u32) -> Rational {
    if !q.is_positive() {
        return Rational::zero();
    }
    let lo = sqrt_lower(q, bits);
    if &(&lo * &lo) == q {
        return lo;
    }
    lo + pow2(-(bits as i64))
}

/// Lower bound for the positive `k`-th root of `q >= 0` to within `2^-bits`.
pub fn nth_root_lower(q: &Rational, k: u32, bits: u32) -> Rational {
    if !q.is_positive() {
        return Rational::zero();
    }
    let scale = BigInt::one() << (k as usize * bits as usize);
    let scaled = (q * Rational::from_integer(scale)).floor().to_integer();
    Rational::new(scaled.nth_root(k), BigInt::one() << bits as usize)
}

pub fn nth_root_upper(q: &Rational, k: u32, bits: u32) -> Rational {
    let lo = nth_root_lower(q, k, bits);
    if num_traits::pow(lo.clone(), k as usize) == *q {
        return lo;
    }
    lo + pow2(-(bits as i64))
}

/// Integer square-free kernel: `n = s * k^2` with `s` squarefree, returns `s` (sign kept).
pub fn squarefree_part(n: &BigInt) -> BigInt {
    if n.is_zero() {
        return BigInt::zero();
    }
    let sign = n.sign();
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
        if p.bits() > 40 {
            // trial division cap; treat the cofactor as squarefree
            break;
        }
    }
    out *= m;
    if sign == Sign::Minus {
        -out
    } else {
        out
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Best rational approximation of `x` with denominator at most `max_den`.
pub fn best_approximation(x: &Rational, max_den: &BigInt) -> Rational {
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut r = x.clone();
    loop {
        let a = r.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if &q2 > max_den {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &r - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        r = frac.recip();
    }
    if q1.is_zero() {
        return Rational::from_integer(x.round().to_integer());
    }
    Rational::new(p1, q1)
}

/// Serde adapters writing rationals as `"p/q"`.
pub mod serde_rational {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&fmt_rational(q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| parse_rational(s).map_err(de::Error::custom)).collect()
        }
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
            let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(fmt_rational).collect()).collect();
            serde::Serialize::serialize(&rows, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            let rows = Vec::<Vec<String>>::deserialize(d)?;
            rows.iter()
                .map(|r| r.iter().map(|s| parse_rational(s).map_err(de::Error::custom)).collect())
                .collect()
        }
    }

    pub mod matrix_opt {
        use super::*;

        pub fn serialize<S: Serializer>(m: &Option<Vec<Vec<Rational>>>, s: S) -> std::result::Result<S::Ok, S::Error> {
            let rows: Option<Vec<Vec<String>>> =
                m.as_ref().map(|m| m.iter().map(|r| r.iter().map(fmt_rational).collect()).collect());
            serde::Serialize::serialize(&rows, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Vec<Rational>>>, D::Error> {
            let rows = Option::<Vec<Vec<String>>>::deserialize(d)?;
            rows.map(|rows| {
                rows.iter()
                    .map(|r| r.iter().map(|s| parse_rational(s).map_err(de::Error::custom)).collect())
                    .collect()
            })
            .transpose()
        }
    }

    pub mod pair {
        use super::*;

        pub fn serialize<S: Serializer>(p: &(Rational, Rational), s: S) -> std::result::Result<S::Ok, S::Error> {
            serde::Serialize::serialize(&[fmt_rational(&p.0), fmt_rational(&p.1)], s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<(Rational, Rational), D::Error> {
            let [a, b] = <[String; 2]>::deserialize(d)?;
            Ok((
                parse_rational(&a).map_err(de::Error::custom)?,
                parse_rational(&b).map_err(de::Error::custom)?,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_spellings() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(fmt_rational(&int(3)), "3/1");
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let third = rat(1, 3);
        let lo = round_down(&third, 20);
        let hi = round_up(&third, 20);
        assert!(lo < third && third < hi);
        assert_eq!(&hi - &lo, pow2(-20));
        assert_eq!(round_down(&rat(1, 4), 5), rat(1, 4));
    }

    #[test]
    fn sqrt_bounds() {
        let two = int(2);
        let lo = sqrt_lower(&two, 30);
        let hi = sqrt_upper(&two, 30);
        assert!(&lo * &lo < two && &hi * &hi > two);
        assert_eq!(sqrt_upper(&int(9), 10), int(3));
        let c = nth_root_upper(&two, 3, 30);
        assert!(&c * &c * &c >= two);
    }

    #[test]
    fn squarefree_kernel() {
        assert_eq!(squarefree_part(&BigInt::from(72)), BigInt::from(2));
        assert_eq!(squarefree_part(&BigInt::from(-20)), BigInt::from(-5));
        assert_eq!(squarefree_part(&BigInt::from(5)), BigInt::from(5));
    }

    #[test]
    fn best_approx_recovers_fraction() {
        let x = rat(355, 113) + rat(1, 10_000_000_000);
        assert_eq!(best_approximation(&x, &BigInt::from(1000)), rat(355, 113));
    }
}
