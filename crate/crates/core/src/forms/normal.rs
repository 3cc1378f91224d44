//! Normal form `f(x) = a * f0(sigma x)` with
//! `f0(y) = y_1 ... y_s (y_{s+1}^2 + y_{s+2}^2) ...` and `det sigma = 1`.

use std::cmp::Ordering;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::DecomposableForm;
use crate::arith::linalg::float::{self, FMatrix};
use crate::arith::rational::{self, Rational};
use crate::arith::{CReal, RatInterval};
use crate::error::{Error, Result};

/// Number of random probes for the round-trip check.
const PROBES: usize = 50;

#[derive(Clone, Debug)]
pub struct NormalFormData {
    /// Rows are the real forms, then (Re, Im) of one form per conjugate pair.
    pub sigma: Vec<Vec<CReal>>,
    pub a: CReal,
    pub signature: (usize, usize),
    pub sigma_f64: FMatrix,
    pub sigma_inv_f64: FMatrix,
    /// Exact sigma when every entry is rational.
    pub sigma_exact: Option<Vec<Vec<Rational>>>,
    /// Largest relative residual over the probes.
    pub residual: f64,
}

impl Serialize for NormalFormData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let iv = |c: &CReal| -> [String; 2] {
            match c.enclose_best(64) {
                Ok(i) => [rational::fmt_rational(&i.lo), rational::fmt_rational(&i.hi)],
                Err(_) => ["nan".into(), "nan".into()],
            }
        };
        let sigma: Vec<Vec<[String; 2]>> = self.sigma.iter().map(|r| r.iter().map(iv).collect()).collect();
        let mut st = s.serialize_struct("NormalFormData", 5)?;
        st.serialize_field("signature", &self.signature)?;
        st.serialize_field("a", &iv(&self.a))?;
        st.serialize_field("sigma", &sigma)?;
        st.serialize_field("sigma_approx", &self.sigma_f64)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

/// `f0` for signature `(s, t)`.
pub fn eval_f0(y: &[f64], s: usize) -> f64 {
    let mut v: f64 = y[..s].iter().product();
    for p in y[s..].chunks(2) {
        v *= p[0] * p[0] + p[1] * p[1];
    }
    v
}

fn eval_f0_creal(y: &[CReal], s: usize) -> CReal {
    let mut v = CReal::one();
    for x in &y[..s] {
        v = &v * x;
    }
    for p in y[s..].chunks(2) {
        v = &v * &(&p[0].square() + &p[1].square());
    }
    v
}

fn mids(row: &[CReal]) -> Result<Vec<Rational>> {
    row.iter().map(|c| Ok(c.enclose_best(64)?.mid())).collect()
}

fn cmp_desc(a: &[Rational], b: &[Rational]) -> Ordering {
    b.cmp(a)
}

/// Determinant of a matrix of certified reals by expansion over column subsets.
pub(crate) fn creal_det(m: &[Vec<CReal>]) -> CReal {
    let n = m.len();
    let mut dp: Vec<Option<CReal>> = vec![None; 1 << n];
    dp[0] = Some(CReal::one());
    for mask in 0usize..(1 << n) {
        let Some(cur) = dp[mask].clone() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) != 0 || m[row][j].as_rational().is_some_and(|q| q.is_zero()) {
                continue;
            }
            let mut t = &cur * &m[row][j];
            if (mask >> (j + 1)).count_ones() % 2 == 1 {
                t = -t;
            }
            let slot = &mut dp[mask | (1 << j)];
            *slot = Some(match slot.take() {
                Some(s) => &s + &t,
                None => t,
            });
        }
    }
    dp[(1 << n) - 1].clone().unwrap_or_else(CReal::zero)
}

/// Brings a form with `m = n` to `a * f0(sigma x)`.
pub fn to_normal_form(f: &DecomposableForm) -> Result<NormalFormData> {
    let (m, n) = (f.m(), f.n());
    if m != n {
        return Err(Error::WrongVariableCount { m, n });
    }
    let (s, t) = f.signature();
    let lf = f.linear_forms();
    // real rows, sorted descending by coefficient midpoints
    let mut real_rows: Vec<(Vec<Rational>, Vec<CReal>)> = Vec::new();
    for i in f.real_indices() {
        let row: Vec<CReal> = lf[i].iter().map(|c| c.re.clone()).collect();
        real_rows.push((mids(&row)?, row));
    }
    real_rows.sort_by(|a, b| cmp_desc(&a.0, &b.0));
    // one representative per pair: first nonzero imaginary coefficient positive
    let mut pair_rows: Vec<(Vec<Rational>, Vec<CReal>, Vec<CReal>)> = Vec::new();
    for (i, j) in f.pair_indices() {
        let mut rep = i;
        for c in &lf[i] {
            match c.im.signum()? {
                0 => continue,
                1 => break,
                _ => {
                    rep = j;
                    break;
                }
            }
        }
        let re: Vec<CReal> = lf[rep].iter().map(|c| c.re.clone()).collect();
        let im: Vec<CReal> = lf[rep].iter().map(|c| c.im.clone()).collect();
        let mut key = mids(&re)?;
        key.extend(mids(&im)?);
        pair_rows.push((key, re, im));
    }
    pair_rows.sort_by(|a, b| cmp_desc(&a.0, &b.0));
    let mut rows: Vec<Vec<CReal>> = real_rows.into_iter().map(|r| r.1).collect();
    for (_, re, im) in pair_rows {
        rows.push(re);
        rows.push(im);
    }
    let d = creal_det(&rows);
    let dsign = match d.signum() {
        Ok(0) => return Err(Error::NotFullRank),
        Ok(v) => v,
        Err(Error::PrecisionFloorHit(_)) => return Err(Error::NotFullRank),
        Err(e) => return Err(e),
    };
    let abs_d = if dsign < 0 { -&d } else { d.clone() };
    let c = abs_d.nth_root(n as u32).inv();
    let mut sigma: Vec<Vec<CReal>> = rows.iter().map(|r| r.iter().map(|x| x * &c).collect()).collect();
    let mut a = f.scale() * &abs_d;
    if dsign < 0 {
        if s > 0 {
            sigma[0] = sigma[0].iter().map(|x| -x).collect();
            a = -a;
        } else {
            // negating an imaginary row leaves f0 unchanged
            sigma[1] = sigma[1].iter().map(|x| -x).collect();
        }
    }
    let sigma_exact: Option<Vec<Vec<Rational>>> =
        sigma.iter().map(|r| r.iter().map(CReal::as_rational).collect()).collect();
    let sigma_f64: FMatrix = sigma.iter().map(|r| r.iter().map(CReal::to_f64).collect()).collect();
    let sigma_inv_f64 = float::inverse(&sigma_f64).ok_or_else(|| Error::IllConditioned("sigma is singular in floating point".into()))?;
    let data = NormalFormData { sigma, a, signature: (s, t), sigma_f64, sigma_inv_f64, sigma_exact, residual: 0.0 };
    let residual = round_trip_residual(f, &data, 0x6e6f726d)?;
    if residual > 1e-20 {
        return Err(Error::IllConditioned(format!("round-trip residual {residual:e}")));
    }
    Ok(NormalFormData { residual, ..data })
}

/// Largest relative difference between `f(x)` and `a f0(sigma x)` over
/// random rational probes.
pub fn round_trip_residual(f: &DecomposableForm, nf: &NormalFormData, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.n();
    let mut worst = 0f64;
    let tagged = f.has_tags();
    for _ in 0..PROBES {
        let v: Vec<Rational> =
            (0..n).map(|_| Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=7).into())).collect();
        let y: Vec<CReal> = nf
            .sigma
            .iter()
            .map(|row| {
                row.iter().zip(&v).fold(CReal::zero(), |acc, (c, x)| &acc + &(c * &CReal::from_rational(x.clone())))
            })
            .collect();
        let rhs = &nf.a * &eval_f0_creal(&y, nf.signature.0);
        let lhs = f.value_creal(&v);
        let diff: RatInterval = (&lhs - &rhs).enclose_best(96)?;
        let scale = lhs.enclose_best(32)?.abs().hi.max(Rational::from_integer(1.into()));
        // fixed-width leaves cap the achievable width; then only a certified
        // discrepancy counts
        let gap = if tagged && diff.contains_zero() { Rational::zero() } else { diff.abs().hi };
        let rel = rational::to_f64(&(gap / scale));
        worst = worst.max(rel.abs());
    }
    Ok(worst)
}

impl NormalFormData {
    /// `a` as a float.
    pub fn a_f64(&self) -> f64 {
        self.a.to_f64()
    }

    pub fn is_exact(&self) -> bool {
        self.sigma_exact.is_some()
    }

    /// `|det sigma|`, which is one by construction.
    pub fn det_f64(&self) -> f64 {
        float::det(&self.sigma_f64)
    }

    /// True when `a` is positive.
    pub fn a_positive(&self) -> Result<bool> {
        Ok(self.a.signum()? > 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::linalg::identity;
    use crate::arith::rational::int;
    use crate::forms::tests::sqrt2_example;
    use crate::numberfield::NumberField;

    #[test]
    fn sum_of_two_squares_is_already_normal() {
        let f = NumberField::parse("x^2+1").unwrap().norm_form();
        let nf = to_normal_form(&f).unwrap();
        assert_eq!(nf.sigma_exact, Some(identity(2)));
        assert_eq!(nf.a.as_rational(), Some(int(1)));
    }

    #[test]
    fn split_quadratic() {
        let f = NumberField::parse("x^2-2").unwrap().norm_form();
        let nf = to_normal_form(&f).unwrap();
        assert!((nf.det_f64() - 1.0).abs() < 1e-12);
        assert!(nf.residual < 1e-20);
        // a = -2 sqrt 2 after the sign fix
        assert!((nf.a_f64() + 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let s = &nf.sigma_f64;
        assert!((s[0][1].abs() / s[0][0].abs() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reference_form_with_two_real_factors() {
        let x1 = vec![int(1), int(0), int(0), int(0)];
        let x2 = vec![int(0), int(1), int(0), int(0)];
        let lin = |c: &[i64]| c.iter().map(|&v| vec![int(v)]).collect::<Vec<_>>();
        let f = DecomposableForm::from_field_factors(
            crate::forms::CoeffField::Rational,
            4,
            &[
                crate::forms::FieldFactor::Linear(x1.iter().map(|q| vec![q.clone()]).collect()),
                crate::forms::FieldFactor::Linear(x2.iter().map(|q| vec![q.clone()]).collect()),
                crate::forms::FieldFactor::Pair {
                    l1: lin(&[0, 0, 1, 0]),
                    l2: lin(&[0, 0, 0, 1]),
                    a: vec![int(1)],
                    b: vec![int(0)],
                    c: vec![int(1)],
                },
            ],
            &int(1),
        )
        .unwrap();
        assert_eq!(f.to_string(), "x1*x2*x3^2 + x1*x2*x4^2");
        let nf = to_normal_form(&f).unwrap();
        assert_eq!(nf.sigma_exact, Some(identity(4)));
        assert_eq!(nf.a.as_rational(), Some(int(1)));
    }

    #[test]
    fn needs_square_forms() {
        assert!(matches!(to_normal_form(&sqrt2_example()), Ok(_)));
        let f = DecomposableForm::from_int_linear(&[&[1, 0, 0], &[1, 2, 4]]).unwrap();
        assert!(matches!(to_normal_form(&f), Err(Error::WrongVariableCount { m: 3, n: 2 })));
    }
}
