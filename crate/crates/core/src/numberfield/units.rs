//! Brute-force search for multiplicatively independent norm-one units.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Embedding, FieldElement, NumberField};
use crate::arith::linalg;
use crate::arith::rational::{self, Rational};
use crate::error::{Error, Result};

/// Default cap on the number of box points examined.
pub const UNIT_SEARCH_BUDGET: u128 = 100_000_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitSearch {
    pub height: u32,
    /// Units over the power basis.
    pub units: Vec<FieldElement>,
    /// The same units over the field's chosen basis.
    #[serde(with = "rational::serde_rational::matrix")]
    pub basis_coords: Vec<Vec<Rational>>,
    pub expected_rank: usize,
    pub rank_found: usize,
    pub candidates: usize,
    pub diagnostic: Option<String>,
}

struct Candidate {
    elem: FieldElement,
    logs: Vec<f64>,
    log_norm: f64,
    height: Rational,
    coords: Vec<Rational>,
}

/// Searches `[-height, height]^n` in basis coordinates for units of norm
/// `+-1`, squares those of norm `-1`, and keeps a maximal independent family
/// chosen greedily by size of the logarithmic embedding.
pub fn norm_one_units(k: &NumberField, height: u32) -> Result<UnitSearch> {
    if height == 0 {
        return Err(Error::Precondition("search height must be at least 1".into()));
    }
    let n = k.degree();
    let (s, t) = k.signature();
    let expected_rank = s + t - 1;
    let side = 2 * height as u128 + 1;
    let total = side.pow(n as u32);
    if total > UNIT_SEARCH_BUDGET {
        return Err(Error::BudgetExceeded { needed: total, budget: UNIT_SEARCH_BUDGET });
    }
    if expected_rank == 0 {
        return Ok(UnitSearch {
            height,
            units: Vec::new(),
            basis_coords: Vec::new(),
            expected_rank,
            rank_found: 0,
            candidates: 0,
            diagnostic: Some("unit rank is zero; only roots of unity exist".into()),
        });
    }
    let nf = k.norm_form();
    let expansion = nf.rational_expansion().expect("norm forms have rational expansions").clone();
    let h = height as i64;
    let hits: Vec<Vec<i64>> = (-h..=h)
        .into_par_iter()
        .flat_map_iter(|first| {
            let expansion = &expansion;
            let mut found = Vec::new();
            let mut z = vec![-h; n];
            z[0] = first;
            loop {
                if z.iter().any(|&v| v != 0) {
                    let norm = match expansion.eval_i128(&z) {
                        Some(v) => Rational::from_integer(v.into()),
                        None => expansion.eval_int(&z),
                    };
                    if norm.abs().is_one() {
                        found.push(z.clone());
                    }
                }
                // odometer over coordinates 1..n
                let mut i = n;
                loop {
                    if i == 1 {
                        return found.into_iter();
                    }
                    i -= 1;
                    if z[i] < h {
                        z[i] += 1;
                        break;
                    }
                    z[i] = -h;
                }
            }
        })
        .collect();
    let embeddings = k.embedding_list();
    let mut cands: Vec<Candidate> = hits
        .into_iter()
        .filter_map(|z| {
            let mut u = k.from_basis_ints(&z);
            if !linalg::is_integer_matrix(&k.regular_rep(&u)) {
                return None;
            }
            if k.norm(&u).is_negative() {
                u = k.mul(&u, &u);
            }
            let logs = log_embedding(k, &u, &embeddings);
            let log_norm = logs.iter().map(|x| x * x).sum::<f64>().sqrt();
            if log_norm < 1e-9 {
                return None;
            }
            let coords = k.basis_coords(&u);
            Some(Candidate { height: super::height(&coords), elem: u, logs, log_norm, coords })
        })
        .collect();
    let candidates = cands.len();
    cands.sort_by(|a, b| {
        let ka = (a.log_norm * 1e9).round() as i64;
        let kb = (b.log_norm * 1e9).round() as i64;
        ka.cmp(&kb).then_with(|| a.height.cmp(&b.height)).then_with(|| a.coords.cmp(&b.coords))
    });
    let mut chosen: Vec<Candidate> = Vec::new();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for c in cands {
        if chosen.len() == expected_rank {
            break;
        }
        let mut r = c.logs.clone();
        for q in &ortho {
            let d: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rn > 1e-6 * c.log_norm.max(1.0) {
            ortho.push(r.iter().map(|x| x / rn).collect());
            chosen.push(c);
        }
    }
    let mut units = Vec::new();
    let mut basis_coords = Vec::new();
    for c in chosen {
        let u = orient(k, c.elem, &embeddings)?;
        verify_unit(k, &u)?;
        basis_coords.push(k.basis_coords(&u));
        units.push(u);
    }
    let rank_found = units.len();
    let diagnostic = (rank_found < expected_rank).then(|| {
        format!("found {rank_found} of {expected_rank} independent units at height {height}; increase the height")
    });
    Ok(UnitSearch { height, units, basis_coords, expected_rank, rank_found, candidates, diagnostic })
}

/// `(log|sigma_i(u)|)` over real embeddings and `2 log|sigma_j(u)|` over
/// complex pairs.
pub(crate) fn log_embedding(k: &NumberField, u: &FieldElement, embeddings: &[Embedding]) -> Vec<f64> {
    let mut out = Vec::new();
    for e in embeddings {
        match e {
            Embedding::Real(_) => {
                let (re, _) = k.embed_f64(u, e);
                out.push(re.abs().ln());
            }
            Embedding::Complex { conjugate: false, .. } => {
                let (re, im) = k.embed_f64(u, e);
                out.push((re * re + im * im).ln());
            }
            Embedding::Complex { conjugate: true, .. } => {}
        }
    }
    out
}

/// Fixes the representative among `+-u^{+-1}`: the reference embedding
/// (largest real root, or the first complex root when there is none) has
/// absolute value above one and, in even degree, is positive.
fn orient(k: &NumberField, u: FieldElement, embeddings: &[Embedding]) -> Result<FieldElement> {
    let (s, _) = k.signature();
    let logs = log_embedding(k, &u, embeddings);
    let order: Vec<usize> = (0..s).rev().chain(s..logs.len()).collect();
    let idx = order.into_iter().find(|&i| logs[i].abs() > 1e-9).unwrap_or(0);
    let mut u = if logs[idx] < 0.0 { k.inv(&u).ok_or_else(|| Error::NotAUnit("not invertible".into()))? } else { u };
    if s > 0 && k.degree() % 2 == 0 {
        let sigma = k.embed(&u, &embeddings[s - 1]);
        if sigma.re.signum()? < 0 {
            u = k.neg(&u);
        }
    }
    Ok(u)
}

/// Norm exactly one and an integral regular representation of determinant one.
pub fn verify_unit(k: &NumberField, u: &FieldElement) -> Result<()> {
    let m = k.regular_rep(u);
    if !linalg::is_integer_matrix(&m) || !linalg::det(&m).is_one() {
        return Err(Error::NotAUnit("regular representation is not in SL(n, Z)".into()));
    }
    let nf = k.norm_form();
    let coords = k.basis_coords(u);
    if !nf.rational_expansion().map(|e| e.eval(&coords)).unwrap_or_else(Rational::zero).is_one() {
        return Err(Error::NotAUnit("norm is not one".into()));
    }
    Ok(())
}

/// Logarithmic regulator-type size of a unit, for reports.
pub fn log_size(k: &NumberField, u: &FieldElement) -> f64 {
    let logs = log_embedding(k, u, &k.embedding_list());
    logs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::MPoly;

    #[test]
    fn pell_unit_of_sqrt_two() {
        let k = NumberField::parse("x^2-2").unwrap();
        let r = norm_one_units(&k, 10).unwrap();
        assert_eq!(r.units, vec![FieldElement::from_ints(&[3, 2])]);
        assert_eq!(r.rank_found, 1);
        assert!(r.diagnostic.is_none());
    }

    #[test]
    fn gaussian_field_has_rank_zero() {
        let k = NumberField::parse("x^2+1").unwrap();
        let r = norm_one_units(&k, 5).unwrap();
        assert!(r.units.is_empty());
        assert_eq!(r.expected_rank, 0);
    }

    #[test]
    fn cube_root_of_two_unit() {
        let k = NumberField::parse("x^3-2").unwrap();
        let r = norm_one_units(&k, 30).unwrap();
        assert_eq!(r.units, vec![FieldElement::from_ints(&[1, 1, 1])]);
        assert_eq!(k.norm(&r.units[0]), Rational::one());
    }

    #[test]
    fn small_height_reports_shortfall() {
        let k = NumberField::parse("x^2-7").unwrap();
        // fundamental unit 8 + 3 sqrt 7
        let r = norm_one_units(&k, 2).unwrap();
        assert!(r.units.is_empty());
        assert!(r.diagnostic.is_some());
        let r = norm_one_units(&k, 8).unwrap();
        assert_eq!(r.units, vec![FieldElement::from_ints(&[8, 3])]);
    }

    #[test]
    fn unit_action_preserves_norm_form() {
        let k = NumberField::parse("x^3-2").unwrap();
        let u = FieldElement::from_ints(&[1, 1, 1]);
        let m = k.regular_rep(&u);
        let minv = linalg::inverse(&m).unwrap();
        let form = k.norm_form();
        let f: &MPoly = form.rational_expansion().unwrap();
        assert_eq!(&f.compose_linear(&minv), f);
        assert_eq!(&f.compose_linear(&m), f);
    }
}
