//! Number fields `Q(theta)` presented by a monic integer minimal polynomial,
//! with a chosen Q-basis, certified embeddings, regular representations,
//! the norm form and a search for norm-one units.

mod units;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::creal::{CComplex, EmbedRoot};
use crate::arith::factor::is_irreducible;
use crate::arith::linalg::{self, QMatrix};
use crate::arith::rational::{self, Rational};
use crate::arith::{complex_roots_upper, isolate_real_roots, AlgebraicReal, ComplexAlgebraic, MPoly, RatPoly};
use crate::error::{Error, Result};
use crate::forms::{CoeffField, DecomposableForm, Expansion};

pub use units::{log_size, norm_one_units, verify_unit, UnitSearch, UNIT_SEARCH_BUDGET};

/// Largest degree handled anywhere in the crate.
pub const MAX_DEGREE: usize = 8;

/// Element of a number field, stored over the power basis `1, theta, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement {
    #[serde(with = "rational::serde_rational::vec")]
    pub coords: Vec<Rational>,
}

impl FieldElement {
    pub fn new(coords: Vec<Rational>) -> Self {
        FieldElement { coords }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        FieldElement { coords: c.iter().map(|&v| rational::int(v)).collect() }
    }

    pub fn as_poly(&self) -> RatPoly {
        RatPoly::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

/// Real embeddings in ascending order and complex roots with positive
/// imaginary part, sorted by real then imaginary part.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingSet {
    pub real: Vec<AlgebraicReal>,
    pub complex: Vec<ComplexAlgebraic>,
}

/// One embedding `K -> C`: a real root, or a complex root possibly conjugated.
#[derive(Clone, Debug)]
pub enum Embedding {
    Real(AlgebraicReal),
    Complex { root: ComplexAlgebraic, conjugate: bool },
}

#[derive(Clone, Debug)]
pub struct NumberField {
    minpoly: RatPoly,
    basis: QMatrix,
    /// columns are the basis vectors in power coordinates
    to_power: QMatrix,
    from_power: QMatrix,
    signature: (usize, usize),
    embeddings: EmbeddingSet,
}

/// Signature `(s, t)` of the field defined by an irreducible polynomial.
pub fn signature(minpoly: &RatPoly) -> Result<(usize, usize)> {
    if minpoly.deg() == 0 {
        return Err(Error::InvalidInput("constant minimal polynomial".into()));
    }
    if !is_irreducible(minpoly) {
        return Err(Error::ReducibleMinpoly);
    }
    let s = isolate_real_roots(minpoly)?.len();
    Ok((s, (minpoly.deg() - s) / 2))
}

impl NumberField {
    /// Field with the power basis.
    pub fn new(minpoly: RatPoly) -> Result<Self> {
        let n = minpoly.deg();
        Self::with_basis(minpoly, linalg::identity(n.max(1)))
    }

    pub fn parse(minpoly: &str) -> Result<Self> {
        Self::new(RatPoly::parse(minpoly)?)
    }

    /// Field with a custom basis, given as coordinate vectors over the power basis.
    pub fn with_basis(minpoly: RatPoly, basis: QMatrix) -> Result<Self> {
        let n = minpoly.deg();
        if n == 0 {
            return Err(Error::InvalidInput("constant minimal polynomial".into()));
        }
        if n > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(n));
        }
        if !minpoly.lc().is_one() || !minpoly.has_integer_coeffs() {
            return Err(Error::InvalidInput(format!("minimal polynomial {minpoly} must be monic with integer coefficients")));
        }
        let signature = signature(&minpoly)?;
        if basis.len() != n || basis.iter().any(|b| b.len() != n) {
            return Err(Error::InvalidInput(format!("basis must consist of {n} vectors of length {n}")));
        }
        let to_power = linalg::transpose(&basis);
        let from_power = linalg::inverse(&to_power).ok_or(Error::NotFullRank)?;
        let real = isolate_real_roots(&minpoly)?;
        let complex = complex_roots_upper(&minpoly)?;
        Ok(NumberField {
            minpoly,
            basis,
            to_power,
            from_power,
            signature,
            embeddings: EmbeddingSet { real, complex },
        })
    }

    pub fn minpoly(&self) -> &RatPoly {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.deg()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn embeddings(&self) -> &EmbeddingSet {
        &self.embeddings
    }

    pub fn is_power_basis(&self) -> bool {
        self.basis == linalg::identity(self.degree())
    }

    /// The `n` embeddings: real ones ascending, then each complex root
    /// followed by its conjugate.
    pub fn embedding_list(&self) -> Vec<Embedding> {
        let mut out: Vec<Embedding> = self.embeddings.real.iter().cloned().map(Embedding::Real).collect();
        for z in &self.embeddings.complex {
            out.push(Embedding::Complex { root: z.clone(), conjugate: false });
            out.push(Embedding::Complex { root: z.clone(), conjugate: true });
        }
        out
    }

    /// Involution pairing each embedding with its complex conjugate.
    pub fn pairing(&self) -> Vec<usize> {
        let (s, t) = self.signature;
        let mut p: Vec<usize> = (0..s).collect();
        for j in 0..t {
            p.push(s + 2 * j + 1);
            p.push(s + 2 * j);
        }
        p
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::new(vec![Rational::zero(); self.degree()])
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(&Rational::one())
    }

    pub fn from_rational(&self, q: &Rational) -> FieldElement {
        let mut c = vec![Rational::zero(); self.degree()];
        c[0] = q.clone();
        FieldElement::new(c)
    }

    /// The generator `theta`.
    pub fn theta(&self) -> FieldElement {
        self.reduce(&RatPoly::x())
    }

    /// Element from a polynomial in `theta`.
    pub fn reduce(&self, p: &RatPoly) -> FieldElement {
        let r = p.rem(&self.minpoly);
        let mut c = r.coeffs().to_vec();
        c.resize(self.degree(), Rational::zero());
        FieldElement::new(c)
    }

    /// Element with the given coordinates over the chosen basis.
    pub fn from_basis_coords(&self, c: &[Rational]) -> FieldElement {
        FieldElement::new(linalg::mat_vec(&self.to_power, c))
    }

    pub fn from_basis_ints(&self, c: &[i64]) -> FieldElement {
        let q: Vec<Rational> = c.iter().map(|&v| rational::int(v)).collect();
        self.from_basis_coords(&q)
    }

    pub fn basis_coords(&self, x: &FieldElement) -> Vec<Rational> {
        linalg::mat_vec(&self.from_power, &x.coords)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement::new(a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement::new(a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement::new(a.coords.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &FieldElement, q: &Rational) -> FieldElement {
        FieldElement::new(a.coords.iter().map(|x| x * q).collect())
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.reduce(&(&a.as_poly() * &b.as_poly()))
    }

    pub fn pow(&self, a: &FieldElement, k: u32) -> FieldElement {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        // s a + t m = g with g constant since m is irreducible
        let (g, s, _) = a.as_poly().xgcd(&self.minpoly);
        if g.deg() != 0 {
            return None;
        }
        Some(self.reduce(&s.scale(&g.coeff(0).recip())))
    }

    /// Multiplication-by-`x` matrix over the power basis; column `k` holds
    /// the coordinates of `x theta^k`.
    pub fn regular_rep_power(&self, x: &FieldElement) -> QMatrix {
        let n = self.degree();
        let mut cols = Vec::with_capacity(n);
        let mut cur = x.clone();
        let theta = self.theta();
        for _ in 0..n {
            cols.push(cur.coords.clone());
            cur = self.mul(&cur, &theta);
        }
        linalg::transpose(&cols)
    }

    /// Multiplication-by-`x` matrix over the chosen basis (images as columns).
    pub fn regular_rep(&self, x: &FieldElement) -> QMatrix {
        let m = self.regular_rep_power(x);
        linalg::mat_mul(&self.from_power, &linalg::mat_mul(&m, &self.to_power))
    }

    pub fn norm(&self, x: &FieldElement) -> Rational {
        linalg::det(&self.regular_rep_power(x))
    }

    pub fn trace(&self, x: &FieldElement) -> Rational {
        let m = self.regular_rep_power(x);
        (0..self.degree()).fold(Rational::zero(), |acc, i| acc + &m[i][i])
    }

    /// `sigma(x)` as a certified complex number.
    pub fn embed(&self, x: &FieldElement, e: &Embedding) -> CComplex {
        match e {
            Embedding::Real(r) => CComplex::embed(&x.as_poly(), &EmbedRoot::from_real(r)),
            Embedding::Complex { root, conjugate } => {
                let z = CComplex::embed(&x.as_poly(), &EmbedRoot::from_complex(root));
                if *conjugate {
                    z.conj()
                } else {
                    z
                }
            }
        }
    }

    /// Quick floating point value of `sigma(x)`.
    pub fn embed_f64(&self, x: &FieldElement, e: &Embedding) -> (f64, f64) {
        let (re, im) = match e {
            Embedding::Real(r) => (r.to_f64(), 0.0),
            Embedding::Complex { root, conjugate } => {
                let im = root.im.to_f64();
                (root.re.to_f64(), if *conjugate { -im } else { im })
            }
        };
        // Horner in complex floating point
        let mut acc = (0.0f64, 0.0f64);
        for c in x.coords.iter().rev() {
            let c = rational::to_f64(c);
            acc = (acc.0 * re - acc.1 * im + c, acc.0 * im + acc.1 * re);
        }
        acc
    }

    /// True if every real embedding of `x` is positive (exact).
    pub fn is_totally_positive(&self, x: &FieldElement) -> bool {
        self.signature.1 == 0 && self.embeddings.real.iter().all(|r| r.eval_poly(&x.as_poly()).signum() > 0)
    }

    /// The norm form `det(sum_j x_j M_{alpha_j})` in the chosen basis,
    /// together with its factorization into embedded linear forms.
    pub fn norm_form(&self) -> DecomposableForm {
        let n = self.degree();
        let reps: Vec<QMatrix> = (0..n)
            .map(|j| {
                let mut e = vec![Rational::zero(); n];
                e[j] = Rational::one();
                self.regular_rep_power(&self.from_basis_coords(&e))
            })
            .collect();
        let entries: Vec<Vec<MPoly>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let coeffs: Vec<Rational> = reps.iter().map(|m| m[r][c].clone()).collect();
                        MPoly::linear(&coeffs)
                    })
                    .collect()
            })
            .collect();
        let expanded = MPoly::det(&entries, n);
        let basis_elems: Vec<FieldElement> = (0..n)
            .map(|j| {
                let mut e = vec![Rational::zero(); n];
                e[j] = Rational::one();
                self.from_basis_coords(&e)
            })
            .collect();
        let linear_forms: Vec<Vec<CComplex>> = self
            .embedding_list()
            .iter()
            .map(|e| basis_elems.iter().map(|a| self.embed(a, e)).collect())
            .collect();
        DecomposableForm::from_parts_unchecked(
            n,
            crate::arith::CReal::one(),
            linear_forms,
            self.pairing(),
            Some(Expansion { field: CoeffField::Rational, parts: vec![expanded] }),
        )
        .with_label(format!("norm form of Q[x]/({})", self.minpoly))
    }
}

#[derive(Serialize, Deserialize)]
struct FieldWire {
    minpoly: RatPoly,
    #[serde(default, with = "rational::serde_rational::matrix_opt")]
    basis: Option<QMatrix>,
    #[serde(default)]
    signature: Option<(usize, usize)>,
}

impl Serialize for NumberField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldWire { minpoly: self.minpoly.clone(), basis: Some(self.basis.clone()), signature: Some(self.signature) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NumberField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = FieldWire::deserialize(d)?;
        let k = match w.basis {
            Some(b) => NumberField::with_basis(w.minpoly, b),
            None => NumberField::new(w.minpoly),
        }
        .map_err(serde::de::Error::custom)?;
        if let Some(sig) = w.signature {
            if sig != k.signature {
                return Err(serde::de::Error::custom(format!(
                    "declared signature {sig:?} differs from computed {:?}",
                    k.signature
                )));
            }
        }
        Ok(k)
    }
}

/// Positive part of a rational, used in diagnostics.
pub(crate) fn height(c: &[Rational]) -> Rational {
    c.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::linalg::from_ints;
    use crate::arith::rational::int;

    #[test]
    fn signatures() {
        assert_eq!(signature(&RatPoly::parse("x^2-2").unwrap()).unwrap(), (2, 0));
        assert_eq!(signature(&RatPoly::parse("x^2+1").unwrap()).unwrap(), (0, 1));
        assert_eq!(signature(&RatPoly::parse("x^3-2").unwrap()).unwrap(), (1, 1));
        assert!(matches!(signature(&RatPoly::parse("x^4-4").unwrap()), Err(Error::ReducibleMinpoly)));
    }

    #[test]
    fn regular_representations() {
        let k = NumberField::parse("x^2-2").unwrap();
        assert_eq!(k.regular_rep(&k.theta()), from_ints(&[&[0, 2], &[1, 0]]));
        assert_eq!(k.regular_rep(&k.one()), linalg::identity(2));
        let g = NumberField::parse("x^2+1").unwrap();
        assert_eq!(g.regular_rep(&g.theta()), from_ints(&[&[0, -1], &[1, 0]]));
    }

    #[test]
    fn regular_rep_is_multiplicative() {
        let k = NumberField::parse("x^3-2").unwrap();
        let a = FieldElement::from_ints(&[1, -2, 3]);
        let b = FieldElement::from_ints(&[0, 5, -1]);
        let ab = k.mul(&a, &b);
        assert_eq!(k.regular_rep(&ab), linalg::mat_mul(&k.regular_rep(&a), &k.regular_rep(&b)));
        assert_eq!(k.norm(&ab), k.norm(&a) * k.norm(&b));
    }

    #[test]
    fn inverse_in_field() {
        let k = NumberField::parse("x^3-2").unwrap();
        let a = FieldElement::from_ints(&[-1, 1, 0]);
        let ai = k.inv(&a).unwrap();
        assert_eq!(k.mul(&a, &ai), k.one());
        assert_eq!(ai, FieldElement::from_ints(&[1, 1, 1]));
    }

    #[test]
    fn norm_forms_of_small_fields() {
        let cases = [
            ("x^2-2", "x1^2 - 2*x2^2"),
            ("x^2+1", "x1^2 + x2^2"),
            ("x^3-2", "x1^3 - 6*x1*x2*x3 + 2*x2^3 + 4*x3^3"),
        ];
        for (mp, expected) in cases {
            let k = NumberField::parse(mp).unwrap();
            let f = k.norm_form();
            let e = f.rational_expansion().unwrap();
            assert_eq!(e.to_string(), expected, "{mp}");
            assert!(e.has_integer_coeffs());
        }
    }

    #[test]
    fn custom_basis_changes_coordinates() {
        // basis 1, (1 + sqrt 2)
        let k = NumberField::with_basis(RatPoly::parse("x^2-2").unwrap(), from_ints(&[&[1, 0], &[1, 1]])).unwrap();
        let u = k.from_basis_ints(&[0, 1]);
        assert_eq!(u, FieldElement::from_ints(&[1, 1]));
        assert_eq!(k.basis_coords(&u), vec![int(0), int(1)]);
        let form = k.norm_form();
        let nf = form.rational_expansion().unwrap();
        // N(a + b(1 + sqrt 2)) = (a + b)^2 - 2 b^2
        assert_eq!(nf.eval(&[int(2), int(3)]), int(25 - 18));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(NumberField::parse("2*x^2-1"), Err(Error::InvalidInput(_))));
        assert!(matches!(NumberField::parse("x^2-1"), Err(Error::ReducibleMinpoly)));
        assert!(matches!(
            NumberField::with_basis(RatPoly::parse("x^2-2").unwrap(), from_ints(&[&[1, 1], &[2, 2]])),
            Err(Error::NotFullRank)
        ));
    }

    #[test]
    fn json_roundtrip() {
        let k = NumberField::parse("x^3-2").unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert!(s.contains("\"signature\":[1,1]"));
        let back: NumberField = serde_json::from_str(&s).unwrap();
        assert_eq!(back.minpoly(), k.minpoly());
        let bare: NumberField = serde_json::from_str(r#"{"minpoly":["1","0","1"]}"#).unwrap();
        assert_eq!(bare.signature(), (0, 1));
    }
}
