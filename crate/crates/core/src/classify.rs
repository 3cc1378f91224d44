//! The rational algebra spanned by a commuting family of integer unimodular
//! matrices, its splitting into number fields and the block-count dichotomy.
//!
//! Two integers are easy to confuse here. `WedderburnSplit::factors` counts the
//! simple summands of the algebra; `DichotomyVerdict::l` is `n / [A : Q]`, the
//! number of diagonal blocks once the algebra is known to be a field.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::factor::irreducible_factors;
use crate::arith::linalg::{self, QMatrix};
use crate::arith::poly::RatPoly;
use crate::arith::rational::{self, Rational};
use crate::error::{Error, Result};
use crate::numberfield::{signature, FieldElement, NumberField};

/// Largest coefficient height tried for a primitive element.
pub const PRIMITIVE_HEIGHT_CAP: i64 = 50;
const TRIALS_PER_HEIGHT: usize = 16;
const DEFAULT_SEED: u64 = 0x636c_6173;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitSpanAlgebra {
    pub n: usize,
    #[serde(with = "matrices")]
    pub generators: Vec<QMatrix>,
    /// Basis of the span: the identity followed by products of generators.
    #[serde(with = "matrices")]
    pub basis: Vec<QMatrix>,
    pub dim: usize,
    /// Every product of two basis elements lies in the span.
    pub closed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitFactor {
    pub poly: RatPoly,
    pub degree: usize,
    pub signature: (usize, usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WedderburnSplit {
    /// Coordinates of the primitive element in the algebra basis.
    pub primitive_coords: Vec<i64>,
    pub minpoly: RatPoly,
    pub factors: Vec<SplitFactor>,
    pub height: i64,
}

impl WedderburnSplit {
    pub fn summands(&self) -> usize {
        self.factors.len()
    }

    /// `(s1, t1)` summed over the factors.
    pub fn signature(&self) -> (usize, usize) {
        self.factors.iter().fold((0, 0), |(s, t), f| (s + f.signature.0, t + f.signature.1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Algebraic,
    QuasiAlgebraic,
    Inconsistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Full,
    /// The unit family has smaller rank than `s + t - 1`.
    Partial,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    pub n: usize,
    pub signature: (usize, usize),
    pub field_degree: usize,
    pub summands: usize,
    pub field_signature: (usize, usize),
    /// `n / [A : Q]` when the degree divides `n`.
    pub l: Option<usize>,
    pub branch: Branch,
    /// `(rank of the family, s + t - 1)`.
    pub rank_check: (usize, usize),
    pub confidence: Confidence,
    /// `s + t = s1 + t1`.
    pub unit_rank_identity: bool,
    /// `n = l [A : Q] = l (s + t + t1)`.
    pub degree_identity: bool,
    pub reasons: Vec<String>,
}

mod matrices {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::arith::linalg::QMatrix;
    use crate::arith::rational;

    pub fn serialize<S: Serializer>(ms: &[QMatrix], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Vec<Vec<String>>> =
            ms.iter().map(|m| m.iter().map(|r| r.iter().map(rational::fmt_rational).collect()).collect()).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<QMatrix>, D::Error> {
        let v: Vec<Vec<Vec<String>>> = Vec::deserialize(d)?;
        v.iter()
            .map(|m| {
                m.iter()
                    .map(|r| r.iter().map(|x| rational::parse_rational(x).map_err(serde::de::Error::custom)).collect())
                    .collect()
            })
            .collect()
    }
}

/// Reduced echelon copy of a set of flattened matrices with membership tests.
struct Span {
    rows: Vec<Vec<Rational>>,
}

impl Span {
    fn new() -> Self {
        Span { rows: Vec::new() }
    }

    fn rank_with(&self, v: &[Rational]) -> usize {
        let mut m = self.rows.clone();
        m.push(v.to_vec());
        linalg::rank(&m)
    }

    /// Adds `v` if it is independent; returns whether it was added.
    fn insert(&mut self, v: Vec<Rational>) -> bool {
        if self.rank_with(&v) == self.rows.len() {
            return false;
        }
        self.rows.push(v);
        let mut m = self.rows.clone();
        let piv = linalg::rref(&mut m);
        m.truncate(piv.len());
        self.rows = m;
        true
    }

    fn contains(&self, v: &[Rational]) -> bool {
        self.rank_with(v) == self.rows.len()
    }
}

fn check_generator(g: &QMatrix, n: usize) -> Result<()> {
    if g.len() != n || g.iter().any(|r| r.len() != n) {
        return Err(Error::Precondition(format!("generators must be {n}x{n}")));
    }
    if !linalg::is_integer_matrix(g) {
        return Err(Error::Precondition("generators must have integer entries".into()));
    }
    if !linalg::det(g).abs().is_one() {
        return Err(Error::Precondition("generators must have determinant +-1".into()));
    }
    Ok(())
}

/// The rational span of a commuting unimodular family, closed under products.
pub fn span_algebra(n: usize, generators: &[QMatrix]) -> Result<UnitSpanAlgebra> {
    if n == 0 {
        return Err(Error::Precondition("matrix size must be positive".into()));
    }
    for g in generators {
        check_generator(g, n)?;
    }
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            if linalg::mat_mul(a, b) != linalg::mat_mul(b, a) {
                return Err(Error::NonCommuting);
            }
        }
        if !linalg::matrix_minpoly(a).is_squarefree() {
            return Err(Error::NonSemisimple);
        }
    }
    let mut span = Span::new();
    let mut basis = Vec::new();
    let mut queue = vec![linalg::identity(n)];
    queue.extend(generators.iter().cloned());
    while let Some(m) = queue.pop() {
        if !span.insert(linalg::flatten(&m)) {
            continue;
        }
        for g in generators {
            queue.push(linalg::mat_mul(&m, g));
        }
        basis.push(m);
    }
    // order: identity first, then by insertion
    basis.sort_by_key(|m| m != &linalg::identity(n));
    let closed = basis
        .iter()
        .enumerate()
        .all(|(i, a)| basis[i..].iter().all(|b| span.contains(&linalg::flatten(&linalg::mat_mul(a, b)))));
    let dim = basis.len();
    Ok(UnitSpanAlgebra { n, generators: generators.to_vec(), basis, dim, closed })
}

fn combination(basis: &[QMatrix], coords: &[i64]) -> QMatrix {
    let n = basis[0].len();
    let mut acc = vec![vec![Rational::zero(); n]; n];
    for (b, &c) in basis.iter().zip(coords) {
        if c != 0 {
            acc = linalg::mat_add(&acc, &linalg::mat_scale(b, &rational::int(c)));
        }
    }
    acc
}

/// Splits the algebra into number fields through a primitive element.
pub fn wedderburn_split(a: &UnitSpanAlgebra) -> Result<WedderburnSplit> {
    wedderburn_split_seeded(a, DEFAULT_SEED)
}

pub fn wedderburn_split_seeded(a: &UnitSpanAlgebra, seed: u64) -> Result<WedderburnSplit> {
    let d = a.dim;
    let is_primitive = |m: &QMatrix| -> Result<Option<RatPoly>> {
        let mp = linalg::matrix_minpoly(m);
        if mp.deg() != d {
            return Ok(None);
        }
        if !mp.is_squarefree() {
            return Err(Error::NonSemisimple);
        }
        Ok(Some(mp))
    };
    let mut found = None;
    // basis elements first, so a single generator is its own primitive element
    for i in 0..d {
        let mut c = vec![0i64; d];
        c[i] = 1;
        if let Some(mp) = is_primitive(&a.basis[i])? {
            found = Some((c, mp, 1));
            break;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = 1i64;
    while found.is_none() && h <= PRIMITIVE_HEIGHT_CAP {
        for _ in 0..TRIALS_PER_HEIGHT {
            let c: Vec<i64> = (0..d).map(|_| rng.gen_range(-h..=h)).collect();
            if let Some(mp) = is_primitive(&combination(&a.basis, &c))? {
                found = Some((c, mp, h));
                break;
            }
        }
        h = if h == PRIMITIVE_HEIGHT_CAP { h + 1 } else { (2 * h).min(PRIMITIVE_HEIGHT_CAP) };
    }
    let Some((primitive_coords, minpoly, height)) = found else {
        return Err(Error::PrimitiveElementNotFound(PRIMITIVE_HEIGHT_CAP));
    };
    let mut factors = Vec::new();
    for p in irreducible_factors(&minpoly) {
        let p = p.monic();
        factors.push(SplitFactor { degree: p.deg(), signature: signature(&p)?, poly: p });
    }
    factors.sort_by(|x, y| (x.degree, x.poly.to_string()).cmp(&(y.degree, y.poly.to_string())));
    Ok(WedderburnSplit { primitive_coords, minpoly, factors, height })
}

/// Coefficients `c` with `m = sum_k c_k p^k`, `p` primitive of degree `d`.
fn as_polynomial_in(m: &QMatrix, p: &QMatrix, d: usize) -> Option<RatPoly> {
    let n = p.len();
    let mut powers = vec![linalg::flatten(&linalg::identity(n))];
    let mut cur = linalg::identity(n);
    for _ in 1..d {
        cur = linalg::mat_mul(&cur, p);
        powers.push(linalg::flatten(&cur));
    }
    let v = linalg::flatten(m);
    let mut sys: Vec<Vec<Rational>> = (0..n * n)
        .map(|r| {
            let mut row: Vec<Rational> = powers.iter().map(|q| q[r].clone()).collect();
            row.push(v[r].clone());
            row
        })
        .collect();
    let piv = linalg::rref(&mut sys);
    if piv.contains(&d) {
        return None;
    }
    let mut c = vec![Rational::zero(); d];
    for (r, &pc) in piv.iter().enumerate() {
        c[pc] = sys[r][d].clone();
    }
    Some(RatPoly::new(c))
}

/// Multiplicative rank of the generators, from their logarithmic embeddings
/// at the roots of the primitive element.
pub fn family_rank(a: &UnitSpanAlgebra, split: &WedderburnSplit) -> Result<usize> {
    if a.generators.is_empty() {
        return Ok(0);
    }
    let p = combination(&a.basis, &split.primitive_coords);
    let fields: Vec<NumberField> = split.factors.iter().map(|f| NumberField::new(f.poly.clone())).collect::<Result<_>>()?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for g in &a.generators {
        let poly = as_polynomial_in(g, &p, a.dim)
            .ok_or_else(|| Error::Precondition("generator outside the span of the primitive element".into()))?;
        let mut row = Vec::new();
        for k in &fields {
            let x = k.reduce(&poly);
            let pairing = k.pairing();
            for (i, e) in k.embedding_list().iter().enumerate() {
                if pairing[i] < i {
                    continue;
                }
                let (re, im) = k.embed_f64(&x, e);
                row.push(re.hypot(im).ln());
            }
        }
        rows.push(row);
    }
    Ok(float_rank(rows, 1e-9))
}

fn float_rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).max_by(|&i, &j| rows[i][c].abs().total_cmp(&rows[j][c].abs())) else {
            break;
        };
        if rows[p][c].abs() <= tol {
            continue;
        }
        rows.swap(rank, p);
        for i in rank + 1..rows.len() {
            let f = rows[i][c] / rows[rank][c];
            for j in c..cols {
                rows[i][j] -= f * rows[rank][j];
            }
        }
        rank += 1;
    }
    rank
}

/// Applies the degree bookkeeping to decide between the algebraic and the
/// quasi-algebraic case.
pub fn dichotomy(a: &UnitSpanAlgebra, split: &WedderburnSplit, signature: (usize, usize)) -> Result<DichotomyVerdict> {
    let n = a.n;
    let (s, t) = signature;
    if s + 2 * t != n {
        return Err(Error::SignatureMismatch(format!("s + 2t = {} but n = {n}", s + 2 * t)));
    }
    let expected = (s + t).saturating_sub(1);
    let rank = family_rank(a, split)?;
    let (s1, t1) = split.signature();
    let q = a.dim;
    let l = (n % q == 0).then_some(n / q);
    let unit_rank_identity = s + t == s1 + t1;
    let degree_identity = l.is_some_and(|l| n == l * q && n == l * (s + t + t1));
    let mut reasons = Vec::new();
    if split.summands() > 1 {
        reasons.push(format!("the algebra splits into {} fields", split.summands()));
    }
    if l.is_none() {
        reasons.push(format!("[A:Q] = {q} does not divide n = {n}"));
    }
    if !unit_rank_identity {
        reasons.push(format!("s + t = {} differs from s1 + t1 = {}", s + t, s1 + t1));
    }
    if !degree_identity {
        reasons.push("n = l (s + t + t1) fails".into());
    }
    let mut branch = Branch::Inconsistent;
    if reasons.is_empty() {
        match l {
            Some(1) => branch = Branch::Algebraic,
            Some(2) if s == 0 && t1 == 0 && n == 2 * t && q == t => branch = Branch::QuasiAlgebraic,
            Some(2) => reasons.push("l = 2 needs s = t1 = 0 and n = 2t".into()),
            Some(l) => reasons.push(format!("l = {l} is neither 1 nor 2")),
            None => {}
        }
    }
    let confidence = if rank >= expected { Confidence::Full } else { Confidence::Partial };
    if confidence == Confidence::Partial {
        reasons.push(format!("unit family has rank {rank}, expected {expected}"));
    }
    Ok(DichotomyVerdict {
        n,
        signature,
        field_degree: q,
        summands: split.summands(),
        field_signature: (s1, t1),
        l,
        branch,
        rank_check: (rank, expected),
        confidence,
        unit_rank_identity,
        degree_identity,
        reasons,
    })
}

/// Full classification of a unit family.
pub fn classify(n: usize, generators: &[QMatrix], signature: (usize, usize)) -> Result<DichotomyVerdict> {
    let a = span_algebra(n, generators)?;
    let split = wedderburn_split(&a)?;
    dichotomy(&a, &split, signature)
}

/// Regular representations of units over the field's basis.
pub fn unit_matrices(k: &NumberField, units: &[FieldElement]) -> Vec<QMatrix> {
    units.iter().map(|u| k.regular_rep(u)).collect()
}

/// `diag(m, m, ..., m)` with `copies` blocks.
pub fn block_diagonal(m: &QMatrix, copies: usize) -> QMatrix {
    let q = m.len();
    let n = q * copies;
    let mut out = vec![vec![Rational::zero(); n]; n];
    for b in 0..copies {
        for i in 0..q {
            for j in 0..q {
                out[b * q + i][b * q + j] = m[i][j].clone();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::linalg::from_ints;

    fn pell() -> QMatrix {
        from_ints(&[&[3, 4], &[2, 3]])
    }

    #[test]
    fn identity_span() {
        let a = span_algebra(2, &[linalg::identity(2)]).unwrap();
        assert_eq!(a.dim, 1);
        let s = wedderburn_split(&a).unwrap();
        assert_eq!(s.summands(), 1);
        assert_eq!(s.factors[0].degree, 1);
    }

    #[test]
    fn real_quadratic_unit() {
        let a = span_algebra(2, &[pell()]).unwrap();
        assert_eq!(a.dim, 2);
        assert!(a.closed);
        let s = wedderburn_split(&a).unwrap();
        assert_eq!(s.factors.len(), 1);
        assert_eq!(s.factors[0].poly, RatPoly::from_ints(&[1, -6, 1]));
        assert_eq!(s.factors[0].signature, (2, 0));
        let v = dichotomy(&a, &s, (2, 0)).unwrap();
        assert_eq!(v.l, Some(1));
        assert_eq!(v.branch, Branch::Algebraic);
        assert_eq!(v.rank_check, (1, 1));
    }

    #[test]
    fn block_diagonal_family() {
        let g = block_diagonal(&pell(), 2);
        let a = span_algebra(4, &[g]).unwrap();
        assert_eq!(a.dim, 2);
        let v = classify(4, &a.generators, (0, 2)).unwrap();
        assert_eq!(v.l, Some(2));
        assert_eq!(v.branch, Branch::QuasiAlgebraic);
        assert!(v.unit_rank_identity && v.degree_identity);
        assert_eq!(v.confidence, Confidence::Full);
    }

    #[test]
    fn trivial_family() {
        let v = classify(4, &[linalg::identity(4)], (0, 2)).unwrap();
        assert_eq!(v.branch, Branch::Inconsistent);
        assert_eq!(v.rank_check, (0, 1));
        assert_eq!(v.confidence, Confidence::Partial);
        let v = classify(4, &[], (0, 2)).unwrap();
        assert_eq!(v.rank_check, (0, 1));
    }

    #[test]
    fn reducible_algebra() {
        let e = from_ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]]);
        let a = span_algebra(4, &[e]).unwrap();
        let s = wedderburn_split(&a).unwrap();
        assert_eq!(s.summands(), 2);
        assert_eq!(s.factors.iter().map(|f| f.degree).collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn rejects_bad_families() {
        let a = from_ints(&[&[1, 1], &[0, 1]]);
        let b = from_ints(&[&[1, 0], &[1, 1]]);
        assert!(matches!(span_algebra(2, &[a.clone(), b]), Err(Error::NonCommuting)));
        assert!(matches!(span_algebra(2, &[a]), Err(Error::NonSemisimple)));
        assert!(matches!(span_algebra(2, &[from_ints(&[&[2, 0], &[0, 1]])]), Err(Error::Precondition(_))));
    }

    #[test]
    fn field_units_round_trip() {
        for (p, h) in [("x^2-2", 4), ("x^3-2", 2), ("x^2+1", 2)] {
            let k = NumberField::parse(p).unwrap();
            let units = crate::numberfield::norm_one_units(&k, h).unwrap();
            let gens = unit_matrices(&k, &units.units);
            let v = classify(k.degree(), &gens, k.signature()).unwrap();
            if k.signature().0 + k.signature().1 > 1 {
                assert_eq!(v.branch, Branch::Algebraic, "{p}");
                assert_eq!(v.field_signature, k.signature());
            }
        }
    }
}
