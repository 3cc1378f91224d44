//! Sparse multivariate polynomials over Q.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::poly::RatPoly;
use super::rational::{self, Rational};

/// Polynomial in `nvars` variables; keys are exponent vectors.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    /// `sum_i c_i x_i`
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Total degree (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(rational::is_integer)
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MPoly { nvars: self.nvars, terms: acc }
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation at an integer point.
    pub fn eval_int(&self, x: &[i64]) -> Rational {
        if let Some(v) = self.eval_i128(x) {
            return Rational::from_integer(BigInt::from(v));
        }
        let xs: Vec<Rational> = x.iter().map(|&v| rational::int(v)).collect();
        self.eval(&xs)
    }

    /// Fast path for integer coefficients; `None` on overflow or
    /// non-integer coefficients.
    pub fn eval_i128(&self, x: &[i64]) -> Option<i128> {
        let mut acc: i128 = 0;
        for (e, c) in &self.terms {
            if !c.denom().is_one() {
                return None;
            }
            let mut t: i128 = c.numer().to_i128()?;
            for (&xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t.checked_mul(xi as i128)?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| rational::to_f64(c) * e.iter().zip(x).map(|(&k, xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Substitutes `x_i = sum_j a[i][j] y_j` (a has `nvars` rows and `k` columns).
    pub fn compose_linear(&self, a: &[Vec<Rational>]) -> MPoly {
        let k = a.first().map_or(0, Vec::len);
        let subs: Vec<MPoly> = a.iter().map(|row| MPoly::linear(row)).collect();
        let mut out = MPoly::zero(k);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(k, c.clone());
            for (i, &p) in e.iter().enumerate() {
                if p > 0 {
                    t = t.mul(&subs[i].pow(p));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Appends `extra` new variables (exponent zero).
    pub fn extend_vars(&self, extra: usize) -> MPoly {
        MPoly {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e.extend(std::iter::repeat_n(0, extra));
                    (e, c.clone())
                })
                .collect(),
        }
    }

    /// Reduces the powers of variable `v` modulo a monic polynomial `m(v)`.
    pub fn reduce_var(&self, v: usize, m: &RatPoly) -> MPoly {
        let d = m.deg() as u32;
        // v^k mod m for k up to the maximal exponent
        let maxk = self.terms.keys().map(|e| e[v]).max().unwrap_or(0);
        let mut powers = Vec::with_capacity(maxk as usize + 1);
        let mut cur = RatPoly::one();
        for _ in 0..=maxk {
            powers.push(cur.clone());
            cur = (&cur * &RatPoly::x()).rem(m);
        }
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[v] as usize;
            if (e[v]) < d {
                out.add_term(e.clone(), c.clone());
                continue;
            }
            for (j, pc) in powers[k].coeffs().iter().enumerate() {
                let mut e2 = e.clone();
                e2[v] = j as u32;
                out.add_term(e2, c * pc);
            }
        }
        out
    }

    /// Splits by the power of variable `v`: `self = sum_k parts[k] v^k`,
    /// with `v` removed from each part.
    pub fn split_var(&self, v: usize) -> Vec<MPoly> {
        let maxk = self.terms.keys().map(|e| e[v]).max().unwrap_or(0) as usize;
        let mut parts = vec![MPoly::zero(self.nvars - 1); maxk + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2.remove(v) as usize;
            parts[k].add_term(e2, c.clone());
        }
        parts
    }

    /// Determinant of a square matrix of polynomials by expansion over
    /// column subsets (exact, suitable for size up to 8).
    pub fn det(m: &[Vec<MPoly>], nvars: usize) -> MPoly {
        let n = m.len();
        let mut dp: Vec<Option<MPoly>> = vec![None; 1 << n];
        dp[0] = Some(MPoly::one(nvars));
        for mask in 0usize..(1 << n) {
            let Some(cur) = dp[mask].take() else { continue };
            let row = mask.count_ones() as usize;
            if row == n {
                dp[mask] = Some(cur);
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 || m[row][j].is_zero() {
                    continue;
                }
                // sign: number of already used columns to the right of j
                let inversions = (mask >> (j + 1)).count_ones();
                let mut t = cur.mul(&m[row][j]);
                if inversions % 2 == 1 {
                    t = t.scale(&-Rational::one());
                }
                let slot = &mut dp[mask | (1 << j)];
                *slot = Some(match slot.take() {
                    Some(s) => s.add(&t),
                    None => t,
                });
            }
        }
        dp[(1 << n) - 1].take().unwrap_or_else(|| MPoly::zero(nvars))
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // highest degree monomials first, lexicographic within a degree
        let mut items: Vec<(&Vec<u32>, &Rational)> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (e, c) in items {
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
            let is_const = e.iter().all(|&k| k == 0);
            if is_const || !a.is_one() {
                if a.is_integer() {
                    write!(f, "{}", a.numer())?;
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())?;
                }
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut firstvar = true;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !firstvar {
                    write!(f, "*")?;
                }
                firstvar = false;
                write!(f, "x{}", i + 1)?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct MPolyWire {
    nvars: usize,
    terms: Vec<(Vec<u32>, String)>,
}

impl Serialize for MPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MPolyWire {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), rational::fmt_rational(c))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = MPolyWire::deserialize(d)?;
        let mut p = MPoly::zero(w.nvars);
        for (e, c) in w.terms {
            if e.len() != w.nvars {
                return Err(serde::de::Error::custom("exponent vector length mismatch"));
            }
            p.add_term(e, rational::parse_rational(&c).map_err(serde::de::Error::custom)?);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    #[test]
    fn determinant_of_regular_representation() {
        // det [[x1, 2 x2], [x2, x1]] = x1^2 - 2 x2^2
        let x1 = MPoly::var(2, 0);
        let x2 = MPoly::var(2, 1);
        let m = vec![vec![x1.clone(), x2.scale(&int(2))], vec![x2.clone(), x1.clone()]];
        let d = MPoly::det(&m, 2);
        assert_eq!(d.to_string(), "x1^2 - 2*x2^2");
        assert_eq!(d.eval_int(&[3, 2]), int(1));
    }

    #[test]
    fn composition_and_reduction() {
        let p = MPoly::var(2, 0).mul(&MPoly::var(2, 1));
        let q = p.compose_linear(&[vec![int(1), int(1)], vec![int(1), int(-1)]]);
        assert_eq!(q.to_string(), "x1^2 - x2^2");
        // v^2 with v^2 = 2 reduces to the constant 2
        let v = MPoly::var(1, 0).pow(3);
        let r = v.reduce_var(0, &RatPoly::from_ints(&[-2, 0, 1]));
        assert_eq!(r.to_string(), "2*x1");
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = MPoly::var(2, 0);
        assert!(a.sub(&a).is_zero());
    }
}
