//! Quasi-algebraic norm forms
//! `a * prod_i q_i(l_i(x1), l_i(x2))` over a totally real field `F`, and the
//! construction from a CM field `F(sqrt(-a))`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CoeffField, DecomposableForm, Expansion};
use crate::arith::creal::{EmbedRoot, Part};
use crate::arith::rational::{self, Rational};
use crate::arith::{AlgebraicReal, CComplex, CReal, MPoly, RatPoly};
use crate::error::{Error, Result};
use crate::numberfield::{FieldElement, NumberField};

/// The binary quadratics `q_i(y1, y2) = A y1^2 + 2 B y1 y2 + C y2^2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QuadSpec {
    /// `q_i` has entries `sigma_i(A), sigma_i(B), sigma_i(C)` for field elements.
    Conjugates { a: FieldElement, b: FieldElement, c: FieldElement },
    /// One `[A, B, C]` per embedding.
    PerEmbedding(Vec<[AlgebraicReal; 3]>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasiFormData {
    pub field: NumberField,
    pub quad: QuadSpec,
    #[serde(with = "rational::serde_rational")]
    pub scale: Rational,
}

impl QuasiFormData {
    pub fn new(field: NumberField, quad: QuadSpec, scale: Rational) -> Self {
        QuasiFormData { field, quad, scale }
    }

    /// `[A, B, C]` at every embedding, in ascending order of the embeddings.
    pub fn matrices(&self) -> Vec<[AlgebraicReal; 3]> {
        match &self.quad {
            QuadSpec::PerEmbedding(v) => v.clone(),
            QuadSpec::Conjugates { a, b, c } => self
                .field
                .embeddings()
                .real
                .iter()
                .map(|r| [r.eval_poly(&a.as_poly()), r.eval_poly(&b.as_poly()), r.eval_poly(&c.as_poly())])
                .collect(),
        }
    }
}

/// Field element whose coordinates are polynomials.
fn poly_elem_mul(k: &NumberField, a: &[MPoly], b: &[MPoly], nvars: usize) -> Vec<MPoly> {
    let t = k.degree();
    let mut prod = vec![MPoly::zero(nvars); 2 * t - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = prod[i + j].add(&x.mul(y));
        }
    }
    let mut out = vec![MPoly::zero(nvars); t];
    for (k_deg, p) in prod.into_iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let red = k.reduce(&RatPoly::monomial(Rational::one(), k_deg));
        for (c, q) in red.coords.iter().enumerate() {
            if !q.is_zero() {
                out[c] = out[c].add(&p.scale(q));
            }
        }
    }
    out
}

/// Norm from `F` of an element with polynomial coordinates.
fn poly_elem_norm(k: &NumberField, e: &[MPoly], nvars: usize) -> MPoly {
    let t = k.degree();
    let theta: Vec<MPoly> = k.theta().coords.iter().map(|q| MPoly::constant(nvars, q.clone())).collect();
    let mut cols = Vec::with_capacity(t);
    let mut cur = e.to_vec();
    for _ in 0..t {
        cols.push(cur.clone());
        cur = poly_elem_mul(k, &cur, &theta, nvars);
    }
    let m: Vec<Vec<MPoly>> = (0..t).map(|r| (0..t).map(|c| cols[c][r].clone()).collect()).collect();
    MPoly::det(&m, nvars)
}

fn const_elem(x: &FieldElement, nvars: usize) -> Vec<MPoly> {
    x.coords.iter().map(|q| MPoly::constant(nvars, q.clone())).collect()
}

/// Builds the degree `2t` form in `2t` variables `(x1, x2)`.
pub fn quasi_norm_form(data: &QuasiFormData) -> Result<DecomposableForm> {
    let f = &data.field;
    let t = f.degree();
    if f.signature() != (t, 0) {
        return Err(Error::NotTotallyReal);
    }
    if data.scale.is_zero() {
        return Err(Error::InvalidInput("scale must be nonzero".into()));
    }
    let mats = data.matrices();
    if mats.len() != t {
        return Err(Error::InvalidInput(format!("need {t} quadratic forms")));
    }
    for (i, [a, b, c]) in mats.iter().enumerate() {
        if a.signum() <= 0 || a.mul(c).sub(&b.mul(b)).signum() <= 0 {
            return Err(Error::NotPositiveDefinite(i));
        }
    }
    let n = 2 * t;
    // l_i(y) = sum_j sigma_i(omega_j) y_j
    let omegas: Vec<FieldElement> = (0..t)
        .map(|j| {
            let mut e = vec![Rational::zero(); t];
            e[j] = Rational::one();
            f.from_basis_coords(&e)
        })
        .collect();
    let mut lf: Vec<Vec<CComplex>> = Vec::new();
    let mut pairing = Vec::new();
    for (i, root) in f.embeddings().real.iter().enumerate() {
        let [a, b, c] = &mats[i];
        let (a, b, c) = (CReal::from_algebraic(a), CReal::from_algebraic(b), CReal::from_algebraic(c));
        let sa = a.sqrt();
        let re2 = &b * &sa.inv();
        let im2 = (&(&(&a * &c) - &b.square()) * &a.inv()).sqrt();
        let l: Vec<CReal> = omegas
            .iter()
            .map(|w| CReal::embed(w.as_poly(), EmbedRoot::from_real(root), Part::Re))
            .collect();
        let mut row: Vec<CComplex> = l.iter().map(|x| CComplex::real(&sa * x)).collect();
        row.extend(l.iter().map(|x| CComplex::new(&re2 * x, &im2 * x)));
        let conj: Vec<CComplex> = row.iter().map(CComplex::conj).collect();
        pairing.push(lf.len() + 1);
        pairing.push(lf.len());
        lf.push(row);
        lf.push(conj);
    }
    let expansion = match &data.quad {
        QuadSpec::Conjugates { a, b, c } => {
            let xi = |offset: usize| -> Vec<MPoly> {
                let mut e = vec![MPoly::zero(n); t];
                for (j, w) in omegas.iter().enumerate() {
                    for (k, q) in w.coords.iter().enumerate() {
                        if !q.is_zero() {
                            e[k] = e[k].add(&MPoly::var(n, offset + j).scale(q));
                        }
                    }
                }
                e
            };
            let (x1, x2) = (xi(0), xi(t));
            let x11 = poly_elem_mul(f, &x1, &x1, n);
            let x12 = poly_elem_mul(f, &x1, &x2, n);
            let x22 = poly_elem_mul(f, &x2, &x2, n);
            let two_b = f.scale(b, &rational::int(2));
            let terms = [
                poly_elem_mul(f, &const_elem(a, n), &x11, n),
                poly_elem_mul(f, &const_elem(&two_b, n), &x12, n),
                poly_elem_mul(f, &const_elem(c, n), &x22, n),
            ];
            let q: Vec<MPoly> = (0..t).map(|k| terms[0][k].add(&terms[1][k]).add(&terms[2][k])).collect();
            let e = poly_elem_norm(f, &q, n).scale(&data.scale);
            Some(Expansion { field: CoeffField::Rational, parts: vec![e] })
        }
        QuadSpec::PerEmbedding(_) => None,
    };
    let f = DecomposableForm::from_parts(n, CReal::from_rational(data.scale.clone()), lf, pairing, expansion)?;
    Ok(f.with_label(format!("quasi-algebraic norm form over Q[x]/({})", data.field.minpoly())))
}

/// Quasi form attached to the CM field `F(sqrt(-a))`: `q_i = diag(1, sigma_i(a))`.
/// The expansion is checked against the product of the linear factors on
/// integer probes.
pub fn cm_to_quasi(field: &NumberField, a: &FieldElement) -> Result<QuasiFormData> {
    let t = field.degree();
    if field.signature() != (t, 0) {
        return Err(Error::NotTotallyReal);
    }
    if !field.is_totally_positive(a) {
        return Err(Error::NotTotallyPositive);
    }
    let data = QuasiFormData::new(
        field.clone(),
        QuadSpec::Conjugates { a: field.one(), b: field.zero(), c: a.clone() },
        Rational::one(),
    );
    let form = quasi_norm_form(&data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xc3);
    let e = form.rational_expansion().expect("conjugate data expands over Q");
    for _ in 0..20 {
        let v: Vec<Rational> = (0..2 * t).map(|_| rational::int(rng.gen_range(-9..=9))).collect();
        let exact = e.eval(&v);
        let iv = form.value_creal(&v).enclose(80)?;
        if !iv.contains(&exact) {
            return Err(Error::Precondition("quasi form disagrees with its factorization".into()));
        }
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn rationals() -> NumberField {
        NumberField::parse("x").unwrap()
    }

    #[test]
    fn sum_of_squares_over_q() {
        let k = rationals();
        let d = QuasiFormData::new(
            k.clone(),
            QuadSpec::Conjugates { a: k.one(), b: k.zero(), c: k.one() },
            int(1),
        );
        let f = quasi_norm_form(&d).unwrap();
        assert_eq!(f.to_string(), "x1^2 + x2^2");
        assert_eq!(f.signature(), (0, 1));
        let d3 = QuasiFormData::new(
            k.clone(),
            QuadSpec::Conjugates { a: k.one(), b: k.zero(), c: k.from_rational(&int(3)) },
            int(1),
        );
        assert_eq!(quasi_norm_form(&d3).unwrap().to_string(), "x1^2 + 3*x2^2");
    }

    #[test]
    fn quartic_over_real_quadratic() {
        let k = NumberField::parse("x^2-2").unwrap();
        let d = QuasiFormData::new(k.clone(), QuadSpec::Conjugates { a: k.one(), b: k.zero(), c: k.one() }, int(1));
        let f = quasi_norm_form(&d).unwrap();
        assert_eq!((f.m(), f.n(), f.signature()), (4, 4, (0, 2)));
        // x1 = 1: l_i = 1 at both embeddings, value 1
        let v = [int(1), int(0), int(0), int(0)];
        assert_eq!(f.rational_expansion().unwrap().eval(&v), int(1));
        // x = (1, 1, 0, 0): prod (1 +- sqrt 2)^2 = 1
        let w = [int(1), int(1), int(0), int(0)];
        assert_eq!(f.rational_expansion().unwrap().eval(&w), int(1));
        let iv = f.value_creal(&w).enclose(80).unwrap();
        assert!(iv.contains(&int(1)));
    }

    #[test]
    fn cm_correspondence() {
        let q = rationals();
        let d = cm_to_quasi(&q, &q.from_rational(&int(5))).unwrap();
        let f = quasi_norm_form(&d).unwrap();
        let oracle = NumberField::parse("x^2+5").unwrap().norm_form();
        assert_eq!(f.rational_expansion(), oracle.rational_expansion());
        let k = NumberField::parse("x^2-2").unwrap();
        assert!(matches!(cm_to_quasi(&k, &k.theta()), Err(Error::NotTotallyPositive)));
        let g = NumberField::parse("x^2+1").unwrap();
        assert!(matches!(cm_to_quasi(&g, &g.one()), Err(Error::NotTotallyReal)));
    }

    #[test]
    fn indefinite_rejected() {
        let q = rationals();
        let d = QuasiFormData::new(
            q.clone(),
            QuadSpec::Conjugates { a: q.one(), b: q.from_rational(&int(2)), c: q.one() },
            int(1),
        );
        assert!(matches!(quasi_norm_form(&d), Err(Error::NotPositiveDefinite(0))));
    }

    #[test]
    fn no_rational_zeros() {
        let k = NumberField::parse("x^2-2").unwrap();
        let d = QuasiFormData::new(k.clone(), QuadSpec::Conjugates { a: k.one(), b: k.zero(), c: k.theta().clone() }, int(1));
        // theta is not totally positive, so this is rejected
        assert!(quasi_norm_form(&d).is_err());
        let three = k.add(&k.from_rational(&int(3)), &k.theta());
        let d = QuasiFormData::new(k.clone(), QuadSpec::Conjugates { a: k.one(), b: k.zero(), c: three }, int(1));
        let f = quasi_norm_form(&d).unwrap();
        let e = f.rational_expansion().unwrap();
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                for c in -4i64..=4 {
                    for dd in -4i64..=4 {
                        let z = [a, b, c, dd];
                        if z != [0; 4] {
                            assert!(!e.eval_int(&z).is_zero());
                        }
                    }
                }
            }
        }
    }
}
