//! CM-field recognition: a totally imaginary field `K` with a complex
//! conjugation automorphism whose fixed field `F` is totally real, written as
//! `K = F(sqrt(-a))`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::linalg;
use crate::arith::rational::{self, best_approximation, Rational};
use crate::arith::resultant::resultant;
use crate::arith::RatPoly;
use crate::error::{Error, Result};
use crate::numberfield::{FieldElement, NumberField, MAX_DEGREE};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum CmVerdict {
    Cm {
        /// Totally real subfield, generated by `theta + conj(theta)`.
        subfield: NumberField,
        /// `K = F(sqrt(-a))`, with `a` over the power basis of `F`.
        a: FieldElement,
        /// Conjugation as a polynomial in `theta`.
        conjugation: RatPoly,
    },
    NotCm { reason: String },
}

impl CmVerdict {
    pub fn is_cm(&self) -> bool {
        matches!(self, CmVerdict::Cm { .. })
    }
}

type C = (f64, f64);

fn cmul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C, b: C) -> C {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// Solves a complex linear system by Gaussian elimination with pivoting.
fn csolve(mut a: Vec<Vec<C>>, mut b: Vec<C>) -> Option<Vec<C>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| {
            let ni = a[i][c].0.hypot(a[i][c].1);
            let nj = a[j][c].0.hypot(a[j][c].1);
            ni.total_cmp(&nj)
        })?;
        if a[p][c].0.hypot(a[p][c].1) < 1e-300 {
            return None;
        }
        a.swap(p, c);
        b.swap(p, c);
        for i in c + 1..n {
            let f = cdiv(a[i][c], a[c][c]);
            for j in c..n {
                let v = cmul(f, a[c][j]);
                a[i][j] = (a[i][j].0 - v.0, a[i][j].1 - v.1);
            }
            let v = cmul(f, b[c]);
            b[i] = (b[i].0 - v.0, b[i].1 - v.1);
        }
    }
    let mut x = vec![(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            let v = cmul(a[i][j], x[j]);
            s = (s.0 - v.0, s.1 - v.1);
        }
        x[i] = cdiv(s, a[i][i]);
    }
    Some(x)
}

/// Decides whether `K` is a CM field.
pub fn is_cm(k: &NumberField) -> Result<CmVerdict> {
    let n = k.degree();
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(n));
    }
    let (s, t) = k.signature();
    if s > 0 {
        return Ok(CmVerdict::NotCm { reason: format!("field has {s} real embeddings") });
    }
    let p = k.minpoly();
    // conj(z) = r(z) at every root, with r rational of degree < n
    let mut roots: Vec<C> = Vec::new();
    for z in &k.embeddings().complex {
        let (re, im) = (z.re.to_f64(), z.im.to_f64());
        roots.push((re, im));
        roots.push((re, -im));
    }
    let vander: Vec<Vec<C>> = roots
        .iter()
        .map(|&z| {
            let mut row = vec![(1.0, 0.0)];
            for j in 1..n {
                row.push(cmul(row[j - 1], z));
            }
            row
        })
        .collect();
    let rhs: Vec<C> = roots.iter().map(|&(re, im)| (re, -im)).collect();
    let Some(sol) = csolve(vander, rhs) else {
        return Ok(CmVerdict::NotCm { reason: "interpolation failed".into() });
    };
    let disc = resultant(p, &p.derivative()).abs();
    let max_den = disc.to_integer().max(BigInt::one()).min(BigInt::from(1_000_000_000_000i64));
    let coeffs: Vec<Rational> =
        sol.iter().map(|&(re, _)| best_approximation(&rational::from_f64(re), &max_den)).collect();
    let r = RatPoly::new(coeffs);
    // exact checks: r(theta) is a root, r is an involution different from the identity
    let r_theta = k.reduce(&r);
    if !p.compose(&r).rem(p).is_zero() || k.reduce(&r.compose(&r)) != k.theta() || r_theta == k.theta() {
        return Ok(CmVerdict::NotCm { reason: "no complex conjugation automorphism".into() });
    }
    for &z in &roots {
        let rz = r.coeffs().iter().rev().fold((0.0, 0.0), |acc, c| {
            let v = cmul(acc, z);
            (v.0 + rational::to_f64(c), v.1)
        });
        if (rz.0 - z.0).hypot(rz.1 + z.1) > 1e-6 {
            return Ok(CmVerdict::NotCm { reason: "automorphism is not complex conjugation".into() });
        }
    }
    // F = Q(theta + conj theta)
    let beta = k.add(&k.theta(), &r_theta);
    let g = linalg::charpoly(&k.regular_rep_power(&beta)).squarefree_part().monic();
    if g.deg() * 2 != n || g.deg() != t {
        return Ok(CmVerdict::NotCm { reason: "fixed field has the wrong degree".into() });
    }
    let subfield = NumberField::new(g.clone())?;
    if subfield.signature() != (t, 0) {
        return Ok(CmVerdict::NotCm { reason: "fixed field is not totally real".into() });
    }
    // a = -(theta - conj theta)^2 lies in F; express it over powers of beta
    let delta = k.sub(&k.theta(), &r_theta);
    let a_k = k.neg(&k.mul(&delta, &delta));
    let mut powers = vec![k.one()];
    for j in 1..t {
        powers.push(k.mul(&powers[j - 1], &beta));
    }
    let mut sys: Vec<Vec<Rational>> = (0..n)
        .map(|row| {
            let mut r: Vec<Rational> = powers.iter().map(|p| p.coords[row].clone()).collect();
            r.push(a_k.coords[row].clone());
            r
        })
        .collect();
    let piv = linalg::rref(&mut sys);
    if piv.contains(&t) {
        return Ok(CmVerdict::NotCm { reason: "square of the imaginary generator is not in the subfield".into() });
    }
    let mut a = vec![Rational::zero(); t];
    for (row, &c) in piv.iter().enumerate() {
        a[c] = sys[row][t].clone();
    }
    let a = remove_square_content(&a);
    let a = FieldElement::new(a);
    if !subfield.is_totally_positive(&a) {
        return Ok(CmVerdict::NotCm { reason: "a is not totally positive".into() });
    }
    Ok(CmVerdict::Cm { subfield, a, conjugation: r })
}

/// Divides by the largest rational square that keeps the coordinates integral.
fn remove_square_content(a: &[Rational]) -> Vec<Rational> {
    let l = rational::common_denominator(a.iter());
    let l2 = Rational::from_integer(&l * &l);
    let ints: Vec<BigInt> = a.iter().map(|x| (x * &l2).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if content.is_zero() {
        return a.to_vec();
    }
    let mut sq = BigInt::one();
    let mut c = content;
    let mut p = BigInt::from(2);
    while &p * &p <= c {
        while (&c % (&p * &p)).is_zero() {
            c /= &p * &p;
            sq *= &p;
        }
        if (&c % &p).is_zero() {
            c /= &p;
        }
        p += 1;
        if p.to_u64().unwrap_or(u64::MAX) > 1_000_000 {
            break;
        }
    }
    let sq2 = Rational::from_integer(&sq * &sq);
    ints.into_iter().map(|x| Rational::from_integer(x) / &sq2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    #[test]
    fn gaussian_field() {
        let k = NumberField::parse("x^2+1").unwrap();
        let CmVerdict::Cm { subfield, a, .. } = is_cm(&k).unwrap() else { panic!("Q(i) is CM") };
        assert_eq!(subfield.degree(), 1);
        assert_eq!(a.coords, vec![int(1)]);
    }

    #[test]
    fn real_field_is_not_cm() {
        let k = NumberField::parse("x^2-2").unwrap();
        assert!(!is_cm(&k).unwrap().is_cm());
    }

    #[test]
    fn fifth_cyclotomic() {
        let k = NumberField::parse("x^4+x^3+x^2+x+1").unwrap();
        let CmVerdict::Cm { subfield, a, conjugation } = is_cm(&k).unwrap() else { panic!("zeta_5 field is CM") };
        assert_eq!(subfield.minpoly(), &RatPoly::from_ints(&[-1, 1, 1]));
        assert_eq!(a.coords, vec![int(3), int(1)]);
        assert_eq!(conjugation, RatPoly::from_ints(&[-1, -1, -1, -1]));
    }

    #[test]
    fn non_cm_totally_imaginary_quartic() {
        // non-Galois quartic without real roots
        let k = NumberField::parse("x^4+x+1").unwrap();
        assert_eq!(k.signature(), (0, 2));
        assert!(!is_cm(&k).unwrap().is_cm());
    }

    #[test]
    fn square_content() {
        assert_eq!(remove_square_content(&[int(12), int(0)]), vec![int(3), int(0)]);
        assert_eq!(remove_square_content(&[Rational::new(1.into(), 4.into())]), vec![int(1)]);
    }
}
