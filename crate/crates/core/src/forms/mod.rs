//! Decomposable forms `a * l_1(x) ... l_n(x)` with linear factors over C,
//! closed under complex conjugation.
//!
//! A form carries its factors as certified complex coefficients and,
//! when available, an exact expansion with coefficients in Q or in a real
//! number field `Q(beta)`. The expansion drives exact evaluation.

mod cm;
mod normal;
mod quasi;
mod reduce;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::creal::{EmbedRoot, Part};
use crate::arith::interval::{ComplexInterval, F64Interval, RatInterval};
use crate::arith::rational::{self, pow2, Rational};
use crate::arith::{AlgebraicReal, CComplex, CReal, MPoly, RatPoly};
use crate::error::{Error, Result};

pub use cm::{is_cm, CmVerdict};
pub use normal::{eval_f0, round_trip_residual, to_normal_form, NormalFormData};
pub use quasi::{cm_to_quasi, quasi_norm_form, QuadSpec, QuasiFormData};
pub use reduce::{is_unimodular, reduce_variables, Reduction};

/// Field holding the coefficients of an expanded form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoeffField {
    Rational,
    /// `Q(beta)` for a real algebraic `beta`; `minpoly` is monic and irreducible.
    Real { minpoly: RatPoly, root: AlgebraicReal },
}

impl CoeffField {
    pub fn real(minpoly: &RatPoly, root: AlgebraicReal) -> Result<Self> {
        let m = minpoly.monic();
        if !crate::arith::factor::is_irreducible(&m) {
            return Err(Error::ReducibleMinpoly);
        }
        if root.minimal().poly().monic() != m {
            return Err(Error::InvalidInput("root does not belong to the given polynomial".into()));
        }
        Ok(CoeffField::Real { minpoly: m, root })
    }

    pub fn degree(&self) -> usize {
        match self {
            CoeffField::Rational => 1,
            CoeffField::Real { minpoly, .. } => minpoly.deg(),
        }
    }

    /// Enclosure of `sum_k c_k beta^k` at working precision `bits`.
    pub fn enclose(&self, coords: &[Rational], bits: u32) -> RatInterval {
        match self {
            CoeffField::Rational => RatInterval::point(coords.first().cloned().unwrap_or_else(Rational::zero)),
            CoeffField::Real { root, .. } => {
                let b = root.interval_bits(bits + 8);
                let mut acc = RatInterval::zero();
                for c in coords.iter().rev() {
                    acc = acc.mul(&b).add(&RatInterval::point(c.clone())).round_out(bits + 4);
                }
                acc
            }
        }
    }

    /// Exact sign of `sum_k c_k beta^k`.
    pub fn sign(&self, coords: &[Rational]) -> i8 {
        if coords.iter().all(Zero::is_zero) {
            return 0;
        }
        let mut bits = 32;
        loop {
            if let Some(s) = self.enclose(coords, bits).sign() {
                return s;
            }
            bits *= 2;
        }
    }

    /// `sum_k c_k beta^k` as a certified real.
    pub fn to_creal(&self, coords: &[Rational]) -> CReal {
        match self {
            CoeffField::Rational => CReal::from_rational(coords.first().cloned().unwrap_or_else(Rational::zero)),
            CoeffField::Real { root, .. } => {
                CReal::embed(RatPoly::new(coords.to_vec()), EmbedRoot::from_real(root), Part::Re)
            }
        }
    }

    fn reduce_coords(&self, p: &RatPoly) -> Vec<Rational> {
        match self {
            CoeffField::Rational => vec![p.coeff(0)],
            CoeffField::Real { minpoly, .. } => {
                let r = p.rem(minpoly);
                (0..minpoly.deg()).map(|k| r.coeff(k)).collect()
            }
        }
    }
}

/// Exact expansion `f = sum_k parts[k] beta^k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Expansion {
    pub field: CoeffField,
    pub parts: Vec<MPoly>,
}

impl Expansion {
    /// Coordinates of `f(v)` over the power basis of the coefficient field.
    pub fn eval_coords(&self, v: &[Rational]) -> Vec<Rational> {
        self.parts.iter().map(|p| p.eval(v)).collect()
    }

    pub fn eval_coords_int(&self, z: &[i64]) -> Vec<Rational> {
        self.parts
            .iter()
            .map(|p| match p.eval_i128(z) {
                Some(v) => Rational::from_integer(v.into()),
                None => p.eval_int(z),
            })
            .collect()
    }
}

/// Result of a certified evaluation.
#[derive(Clone, Debug)]
pub enum Evaluation {
    Exact(Rational),
    /// Exact element of the real coefficient field with an enclosure.
    Field { coords: Vec<Rational>, enclosure: RatInterval },
    Enclosure(RatInterval),
}

impl Evaluation {
    pub fn interval(&self) -> RatInterval {
        match self {
            Evaluation::Exact(q) => RatInterval::point(q.clone()),
            Evaluation::Field { enclosure, .. } | Evaluation::Enclosure(enclosure) => enclosure.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Evaluation::Exact(q) => Some(q),
            _ => None,
        }
    }
}

/// Linear factor over a real field `Q(beta)`, given per variable by
/// coordinates over `1, beta, ...`.
pub type FieldLinear = Vec<Vec<Rational>>;

/// Factor of a form built over a real field.
#[derive(Clone, Debug)]
pub enum FieldFactor {
    Linear(FieldLinear),
    /// `A l1^2 + 2 B l1 l2 + C l2^2` with `A > 0` and `AC - B^2 > 0`.
    Pair { l1: FieldLinear, l2: FieldLinear, a: Vec<Rational>, b: Vec<Rational>, c: Vec<Rational> },
}

/// Floating point enclosures of the factors, for bulk evaluation.
#[derive(Clone, Debug)]
pub struct FastForm {
    scale: F64Interval,
    real_rows: Vec<Vec<F64Interval>>,
    pair_rows: Vec<(Vec<F64Interval>, Vec<F64Interval>)>,
}

impl FastForm {
    /// Certified enclosure of `f(z)` in outward-rounded floating point.
    pub fn eval(&self, z: &[i64]) -> F64Interval {
        let zf: Vec<F64Interval> = z.iter().map(|&v| F64Interval::from_int(v)).collect();
        let dot = |row: &[F64Interval]| {
            row.iter().zip(&zf).fold(F64Interval::point(0.0), |acc, (c, x)| acc.add(c.mul(*x)))
        };
        let mut acc = self.scale;
        for r in &self.real_rows {
            acc = acc.mul(dot(r));
        }
        for (re, im) in &self.pair_rows {
            acc = acc.mul(dot(re).square().add(dot(im).square()));
        }
        acc
    }
}

#[derive(Clone, Serialize, Deserialize)]
pub struct DecomposableForm {
    m: usize,
    n: usize,
    scale: CReal,
    signature: (usize, usize),
    linear_forms: Vec<Vec<CComplex>>,
    pairing: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expansion: Option<Expansion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(skip)]
    fast: OnceLock<FastForm>,
}

impl fmt::Debug for DecomposableForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DecomposableForm({self})")
    }
}

impl fmt::Display for DecomposableForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.label, &self.expansion) {
            (_, Some(Expansion { field: CoeffField::Rational, parts })) => write!(f, "{}", parts[0]),
            (Some(l), _) => write!(f, "{l}"),
            _ => write!(f, "form of degree {} in {} variables", self.n, self.m),
        }
    }
}

fn signature_of(pairing: &[usize]) -> (usize, usize) {
    let s = pairing.iter().enumerate().filter(|(i, &p)| *i == p).count();
    (s, (pairing.len() - s) / 2)
}

fn tiny(iv: &RatInterval) -> bool {
    let eps = pow2(-100);
    iv.lo >= -eps.clone() && iv.hi <= eps
}

impl DecomposableForm {
    /// Validated constructor.
    pub fn from_parts(
        m: usize,
        scale: CReal,
        linear_forms: Vec<Vec<CComplex>>,
        pairing: Vec<usize>,
        expansion: Option<Expansion>,
    ) -> Result<Self> {
        let n = linear_forms.len();
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput("empty form".into()));
        }
        if n > crate::numberfield::MAX_DEGREE || m > crate::numberfield::MAX_DEGREE {
            return Err(Error::DegreeTooLarge(n.max(m)));
        }
        if linear_forms.iter().any(|l| l.len() != m) {
            return Err(Error::InvalidInput(format!("every linear form needs {m} coefficients")));
        }
        if pairing.len() != n || pairing.iter().enumerate().any(|(i, &p)| p >= n || pairing[p] != i) {
            return Err(Error::InvalidInput("pairing must be an involution on the linear forms".into()));
        }
        if m < n {
            return Err(Error::NotFullRank);
        }
        if scale.signum()? == 0 {
            return Err(Error::InvalidInput("scale must be nonzero".into()));
        }
        for (i, &p) in pairing.iter().enumerate() {
            for (c, d) in linear_forms[i].iter().zip(&linear_forms[p]) {
                let ci = c.enclose(80)?;
                let di = d.enclose(80)?.conj();
                if p == i {
                    if !tiny(&ci.im) && c.im.signum()? != 0 {
                        return Err(Error::InvalidInput(format!("linear form {i} is marked real but is not")));
                    }
                } else if !ci.overlaps(&di) {
                    return Err(Error::InvalidInput(format!("linear forms {i} and {p} are not conjugate")));
                }
            }
            if p != i {
                let mut nonreal = false;
                for c in &linear_forms[i] {
                    if c.im.signum()? != 0 {
                        nonreal = true;
                        break;
                    }
                }
                if !nonreal {
                    return Err(Error::InvalidInput(format!("paired linear form {i} is real")));
                }
            }
        }
        let f = Self::from_parts_unchecked(m, scale, linear_forms, pairing, expansion);
        if !f.independent()? {
            return Err(Error::NotFullRank);
        }
        Ok(f)
    }

    pub(crate) fn from_parts_unchecked(
        m: usize,
        scale: CReal,
        linear_forms: Vec<Vec<CComplex>>,
        pairing: Vec<usize>,
        expansion: Option<Expansion>,
    ) -> Self {
        DecomposableForm {
            m,
            n: linear_forms.len(),
            scale,
            signature: signature_of(&pairing),
            linear_forms,
            pairing,
            expansion,
            label: None,
            fast: OnceLock::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Product of real linear forms with rational coefficients (one per row).
    pub fn from_rational_linear(rows: &[Vec<Rational>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        let mut e = MPoly::one(m);
        for r in rows {
            e = e.mul(&MPoly::linear(r));
        }
        let lf = rows.iter().map(|r| r.iter().map(|c| CComplex::from_rational(c.clone())).collect()).collect();
        Self::from_parts(
            m,
            CReal::one(),
            lf,
            (0..rows.len()).collect(),
            Some(Expansion { field: CoeffField::Rational, parts: vec![e] }),
        )
    }

    pub fn from_int_linear(rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&v| rational::int(v)).collect()).collect();
        Self::from_rational_linear(&rows)
    }

    /// Form `scale * prod factors` over a real field `Q(beta)`, with exact
    /// expansion.
    pub fn from_field_factors(field: CoeffField, m: usize, factors: &[FieldFactor], scale: &Rational) -> Result<Self> {
        let d = field.degree();
        let beta_poly = |c: &[Rational]| RatPoly::new(c.to_vec());
        let check = |l: &FieldLinear| -> Result<()> {
            if l.len() != m || l.iter().any(|c| c.len() > d) {
                return Err(Error::InvalidInput(format!("linear factor needs {m} coefficient vectors of length {d}")));
            }
            Ok(())
        };
        // linear form in x_1..x_m and beta (variable m)
        let lin_mpoly = |l: &FieldLinear| {
            let mut p = MPoly::zero(m + 1);
            for (j, c) in l.iter().enumerate() {
                for (k, q) in c.iter().enumerate() {
                    let mut e = vec![0u32; m + 1];
                    e[j] = 1;
                    e[m] = k as u32;
                    p.add_term(e, q.clone());
                }
            }
            p
        };
        let elem_mpoly = |c: &[Rational]| {
            let mut p = MPoly::zero(m + 1);
            for (k, q) in c.iter().enumerate() {
                let mut e = vec![0u32; m + 1];
                e[m] = k as u32;
                p.add_term(e, q.clone());
            }
            p
        };
        let to_c = |c: &[Rational]| field.to_creal(c);
        let lin_forms = |l: &FieldLinear| -> Vec<CReal> { l.iter().map(|c| to_c(c)).collect() };
        let mut total = MPoly::constant(m + 1, scale.clone());
        let mut lf: Vec<Vec<CComplex>> = Vec::new();
        let mut pairing = Vec::new();
        let mut pairs: Vec<[Vec<CComplex>; 2]> = Vec::new();
        for f in factors {
            match f {
                FieldFactor::Linear(l) => {
                    check(l)?;
                    total = total.mul(&lin_mpoly(l));
                    pairing.push(lf.len());
                    lf.push(lin_forms(l).into_iter().map(CComplex::real).collect());
                }
                FieldFactor::Pair { l1, l2, a, b, c } => {
                    check(l1)?;
                    check(l2)?;
                    let ap = beta_poly(a);
                    let det = &(&ap * &beta_poly(c)) - &(&beta_poly(b) * &beta_poly(b));
                    let det_coords = field.reduce_coords(&det);
                    if field.sign(&field.reduce_coords(&ap)) <= 0 || field.sign(&det_coords) <= 0 {
                        return Err(Error::NotPositiveDefinite(pairs.len()));
                    }
                    let (p1, p2) = (lin_mpoly(l1), lin_mpoly(l2));
                    let q = elem_mpoly(a)
                        .mul(&p1.mul(&p1))
                        .add(&elem_mpoly(b).mul(&p1.mul(&p2)).scale(&rational::int(2)))
                        .add(&elem_mpoly(c).mul(&p2.mul(&p2)));
                    total = total.mul(&q);
                    // sqrt(A) l1 + B/sqrt(A) l2 +- i sqrt(det/A) l2
                    let sa = to_c(a).sqrt();
                    let bsa = &to_c(b) * &sa.inv();
                    let im_scale = (&to_c(&det_coords) * &to_c(a).inv()).sqrt();
                    let (c1, c2) = (lin_forms(l1), lin_forms(l2));
                    let row: Vec<CComplex> = c1
                        .iter()
                        .zip(&c2)
                        .map(|(x, y)| CComplex::new(&(&sa * x) + &(&bsa * y), &im_scale * y))
                        .collect();
                    let conj: Vec<CComplex> = row.iter().map(CComplex::conj).collect();
                    pairs.push([row, conj]);
                }
            }
        }
        for [r, c] in pairs {
            let i = lf.len();
            pairing.push(i + 1);
            pairing.push(i);
            lf.push(r);
            lf.push(c);
        }
        let parts = match &field {
            CoeffField::Rational => vec![total.split_var(m).into_iter().next().unwrap_or_else(|| MPoly::zero(m))],
            CoeffField::Real { minpoly, .. } => {
                let mut parts = total.reduce_var(m, minpoly).split_var(m);
                parts.resize(d, MPoly::zero(m));
                parts
            }
        };
        let scale_c = CReal::from_rational(scale.clone());
        Self::from_parts(m, scale_c, lf, pairing, Some(Expansion { field, parts }))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> &CReal {
        &self.scale
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn linear_forms(&self) -> &[Vec<CComplex>] {
        &self.linear_forms
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn expansion(&self) -> Option<&Expansion> {
        self.expansion.as_ref()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// True when some coefficient involves a tagged or fixed-width leaf.
    pub fn has_tags(&self) -> bool {
        self.scale.has_tag() || self.linear_forms.iter().flatten().any(|c| c.re.has_tag() || c.im.has_tag())
    }

    /// Expanded polynomial when all coefficients are rational.
    pub fn rational_expansion(&self) -> Option<&MPoly> {
        match &self.expansion {
            Some(Expansion { field: CoeffField::Rational, parts }) => parts.first(),
            _ => None,
        }
    }

    /// True when values can be compared exactly.
    pub fn is_exact(&self) -> bool {
        self.expansion.is_some()
    }

    /// Indices of real forms followed by one representative per pair.
    pub(crate) fn real_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.pairing[i] == i).collect()
    }

    pub(crate) fn pair_indices(&self) -> Vec<(usize, usize)> {
        (0..self.n).filter(|&i| self.pairing[i] > i).map(|i| (i, self.pairing[i])).collect()
    }

    /// Certified value at a rational point as an expression.
    pub fn value_creal(&self, v: &[Rational]) -> CReal {
        let dot = |row: &[CComplex], part: Part| {
            row.iter().zip(v).fold(CReal::zero(), |acc, (c, x)| {
                if x.is_zero() {
                    return acc;
                }
                let coef = if part == Part::Re { &c.re } else { &c.im };
                &acc + &(coef * &CReal::from_rational(x.clone()))
            })
        };
        let mut acc = self.scale.clone();
        for i in self.real_indices() {
            acc = &acc * &dot(&self.linear_forms[i], Part::Re);
        }
        for (i, _) in self.pair_indices() {
            let re = dot(&self.linear_forms[i], Part::Re);
            let im = dot(&self.linear_forms[i], Part::Im);
            acc = &acc * &(&re.square() + &im.square());
        }
        acc
    }

    /// Certified value at `v`: exact when the expansion is rational, an exact
    /// field element with enclosure of width at most `eps` over a real field,
    /// and an enclosure of width at most `eps` otherwise.
    pub fn evaluate(&self, v: &[Rational], eps: &Rational) -> Result<Evaluation> {
        if v.len() != self.m {
            return Err(Error::WrongVariableCount { m: v.len(), n: self.m });
        }
        if !eps.is_positive() {
            return Err(Error::Precondition("tolerance must be positive".into()));
        }
        let mut bits = 16u32;
        while pow2(-(bits as i64)) > *eps {
            bits += 16;
        }
        match &self.expansion {
            Some(e @ Expansion { field: CoeffField::Rational, .. }) => {
                Ok(Evaluation::Exact(e.eval_coords(v).swap_remove(0)))
            }
            Some(e) => {
                let coords = e.eval_coords(v);
                let mut b = bits;
                loop {
                    let enc = e.field.enclose(&coords, b);
                    if enc.width() <= *eps {
                        return Ok(Evaluation::Field { coords, enclosure: enc });
                    }
                    b *= 2;
                    if b > crate::arith::creal::MAX_PRECISION_BITS {
                        return Err(Error::PrecisionFloorHit("field value enclosure".into()));
                    }
                }
            }
            None => Ok(Evaluation::Enclosure(self.value_creal(v).enclose(bits)?)),
        }
    }

    pub fn evaluate_ints(&self, z: &[i64], eps: &Rational) -> Result<Evaluation> {
        let v: Vec<Rational> = z.iter().map(|&x| rational::int(x)).collect();
        self.evaluate(&v, eps)
    }

    /// Exact zero test at a rational point when decidable.
    pub fn vanishes_at(&self, v: &[Rational]) -> Result<bool> {
        if let Some(e) = &self.expansion {
            return Ok(e.eval_coords(v).iter().all(Zero::is_zero));
        }
        for i in self.real_indices() {
            let val = self.linear_forms[i].iter().zip(v).fold(CReal::zero(), |acc, (c, x)| {
                &acc + &(&c.re * &CReal::from_rational(x.clone()))
            });
            if val.signum()? == 0 {
                return Ok(true);
            }
        }
        for (i, _) in self.pair_indices() {
            let re = self.linear_forms[i].iter().zip(v).fold(CReal::zero(), |acc, (c, x)| {
                &acc + &(&c.re * &CReal::from_rational(x.clone()))
            });
            let im = self.linear_forms[i].iter().zip(v).fold(CReal::zero(), |acc, (c, x)| {
                &acc + &(&c.im * &CReal::from_rational(x.clone()))
            });
            if re.signum()? == 0 && im.signum()? == 0 {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Floating point interval evaluator (cached).
    pub fn fast(&self) -> Result<&FastForm> {
        if let Some(f) = self.fast.get() {
            return Ok(f);
        }
        let enc = |c: &CReal| -> Result<F64Interval> { Ok(F64Interval::from_rat_interval(&c.enclose_best(80)?)) };
        let mut real_rows = Vec::new();
        for i in self.real_indices() {
            real_rows.push(self.linear_forms[i].iter().map(|c| enc(&c.re)).collect::<Result<Vec<_>>>()?);
        }
        let mut pair_rows = Vec::new();
        for (i, _) in self.pair_indices() {
            let re = self.linear_forms[i].iter().map(|c| enc(&c.re)).collect::<Result<Vec<_>>>()?;
            let im = self.linear_forms[i].iter().map(|c| enc(&c.im)).collect::<Result<Vec<_>>>()?;
            pair_rows.push((re, im));
        }
        let ff = FastForm { scale: enc(&self.scale)?, real_rows, pair_rows };
        Ok(self.fast.get_or_init(|| ff))
    }

    /// Coefficient enclosures of the linear forms at `bits` of precision.
    pub fn coefficient_enclosures(&self, bits: u32) -> Result<Vec<Vec<ComplexInterval>>> {
        self.linear_forms
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| {
                        Ok(ComplexInterval::new(c.re.enclose_best(bits)?, c.im.enclose_best(bits)?))
                    })
                    .collect()
            })
            .collect()
    }

    /// Certifies that the linear forms are independent over C by finding an
    /// `n x n` minor whose enclosure excludes zero.
    pub fn independent(&self) -> Result<bool> {
        for bits in [64u32, 256] {
            let c = self.coefficient_enclosures(bits)?;
            for cols in combinations(self.m, self.n) {
                let minor: Vec<Vec<ComplexInterval>> =
                    c.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect();
                if !complex_det(&minor, bits).contains_zero() {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Expands the product of the linear forms (times the scale) with
    /// complex interval coefficients.
    pub fn complex_expansion(&self, bits: u32) -> Result<BTreeMap<Vec<u32>, ComplexInterval>> {
        let c = self.coefficient_enclosures(bits)?;
        let mut acc: BTreeMap<Vec<u32>, ComplexInterval> = BTreeMap::new();
        acc.insert(vec![0; self.m], ComplexInterval::real(self.scale.enclose_best(bits)?));
        for row in &c {
            let mut next: BTreeMap<Vec<u32>, ComplexInterval> = BTreeMap::new();
            for (e, v) in &acc {
                for (j, cj) in row.iter().enumerate() {
                    if cj.re.is_point() && cj.im.is_point() && cj.re.lo.is_zero() && cj.im.lo.is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2[j] += 1;
                    let t = v.mul(cj).round_out(bits);
                    let slot = next.entry(e2).or_insert_with(ComplexInterval::zero);
                    *slot = slot.add(&t);
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Checks that the expanded product is real: every coefficient's
    /// imaginary part contains zero with width below `tol`.
    pub fn is_conjugation_closed(&self, tol: &Rational) -> Result<bool> {
        let e = self.complex_expansion(160)?;
        Ok(e.values().all(|c| c.im.contains_zero() && c.im.width() < *tol))
    }

    /// Substitutes `x = T y` for a rational `m x k` matrix `T`.
    pub fn substitute(&self, t: &[Vec<Rational>]) -> Result<DecomposableForm> {
        let k = t.first().map_or(0, Vec::len);
        let lf: Vec<Vec<CComplex>> = self
            .linear_forms
            .iter()
            .map(|row| {
                (0..k)
                    .map(|j| {
                        row.iter().zip(t).fold(CComplex::zero(), |acc, (c, trow)| {
                            if trow[j].is_zero() {
                                acc
                            } else {
                                acc.add(&c.scale(&CReal::from_rational(trow[j].clone())))
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        let expansion = self.expansion.as_ref().map(|e| Expansion {
            field: e.field.clone(),
            parts: e.parts.iter().map(|p| p.compose_linear(t)).collect(),
        });
        let mut f = DecomposableForm::from_parts(k, self.scale.clone(), lf, self.pairing.clone(), expansion)?;
        f.label = self.label.clone();
        Ok(f)
    }
}

pub(crate) fn combinations(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for j in start..m {
            cur.push(j);
            rec(j + 1, m, n, cur, out);
            cur.pop();
        }
    }
    rec(0, m, n, &mut cur, &mut out);
    out
}

/// Determinant of a complex interval matrix by expansion over column subsets.
pub(crate) fn complex_det(m: &[Vec<ComplexInterval>], bits: u32) -> ComplexInterval {
    let n = m.len();
    let mut dp: Vec<Option<ComplexInterval>> = vec![None; 1 << n];
    dp[0] = Some(ComplexInterval::real(RatInterval::point(Rational::one())));
    for mask in 0usize..(1 << n) {
        let Some(cur) = dp[mask].clone() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) != 0 {
                continue;
            }
            let mut t = cur.mul(&m[row][j]).round_out(bits);
            if (mask >> (j + 1)).count_ones() % 2 == 1 {
                t = ComplexInterval::zero().sub(&t);
            }
            let slot = &mut dp[mask | (1 << j)];
            *slot = Some(match slot.take() {
                Some(s) => s.add(&t),
                None => t,
            });
        }
    }
    dp[(1 << n) - 1].clone().unwrap_or_else(ComplexInterval::zero)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    pub(crate) fn sqrt2_field() -> CoeffField {
        let r = AlgebraicReal::sqrt_rational(&int(2)).unwrap();
        CoeffField::real(&RatPoly::parse("x^2-2").unwrap(), r).unwrap()
    }

    fn q(c: &[i64]) -> Vec<Rational> {
        c.iter().map(|&v| int(v)).collect()
    }

    /// `(x1^2 + sqrt2 x2^2) x3`
    pub(crate) fn sqrt2_example() -> DecomposableForm {
        let z = || q(&[0, 0]);
        let one = || q(&[1, 0]);
        DecomposableForm::from_field_factors(
            sqrt2_field(),
            3,
            &[
                FieldFactor::Pair { l1: vec![one(), z(), z()], l2: vec![z(), one(), z()], a: q(&[1]), b: q(&[0]), c: q(&[0, 1]) },
                FieldFactor::Linear(vec![z(), z(), one()]),
            ],
            &int(1),
        )
        .unwrap()
    }

    #[test]
    fn exact_rational_evaluation() {
        let f = DecomposableForm::from_rational_linear(&[
            vec![int(1), AlgebraicReal::from_int(0).to_rational().unwrap()],
            vec![int(0), int(1)],
        ])
        .unwrap();
        assert_eq!(f.evaluate_ints(&[3, 5], &rat(1, 100)).unwrap().exact(), Some(&int(15)));
        let k = crate::numberfield::NumberField::parse("x^2-2").unwrap();
        let nf = k.norm_form();
        assert_eq!(nf.evaluate_ints(&[3, 2], &rat(1, 100)).unwrap().exact(), Some(&int(1)));
        assert_eq!(nf.evaluate_ints(&[0, 0], &rat(1, 100)).unwrap().exact(), Some(&int(0)));
    }

    #[test]
    fn sqrt2_example_value() {
        let f = sqrt2_example();
        assert_eq!(f.signature(), (1, 1));
        let eps = pow2(-70);
        let Evaluation::Field { coords, enclosure } = f.evaluate_ints(&[1, 1, 1], &eps).unwrap() else {
            panic!("expected a field value");
        };
        assert_eq!(coords, q(&[1, 1]));
        assert!(enclosure.width() <= eps);
        let v = 1.0 + 2f64.sqrt();
        assert!((enclosure.mid_f64() - v).abs() < 1e-15);
        // the factored product agrees
        let g = f.value_creal(&q(&[1, 1, 1])).enclose(70).unwrap();
        assert!(g.overlaps(&enclosure));
    }

    #[test]
    fn homogeneity() {
        let f = sqrt2_example();
        let v = q(&[2, -1, 3]);
        let lv: Vec<Rational> = v.iter().map(|x| x * rat(3, 2)).collect();
        let a = f.expansion().unwrap().eval_coords(&v);
        let b = f.expansion().unwrap().eval_coords(&lv);
        let l3 = rat(27, 8);
        assert_eq!(b, a.iter().map(|x| x * &l3).collect::<Vec<_>>());
    }

    #[test]
    fn conjugation_closure() {
        let tol = pow2(-100);
        assert!(sqrt2_example().is_conjugation_closed(&tol).unwrap());
        let k = crate::numberfield::NumberField::parse("x^4+x^3+x^2+x+1").unwrap();
        assert!(k.norm_form().is_conjugation_closed(&tol).unwrap());
    }

    #[test]
    fn dependent_forms_rejected() {
        let r = DecomposableForm::from_int_linear(&[&[1, 2], &[2, 4]]);
        assert!(matches!(r, Err(Error::NotFullRank)));
    }

    #[test]
    fn fast_form_encloses_exact_values() {
        let f = sqrt2_example();
        let ff = f.fast().unwrap();
        for z in [[1i64, 2, 3], [-4, 1, 2], [0, 0, 5]] {
            let exact = f.evaluate_ints(&z, &pow2(-60)).unwrap().interval();
            let iv = ff.eval(&z);
            assert!(iv.lo <= exact.hi_f64() && exact.lo_f64() <= iv.hi);
        }
    }

    #[test]
    fn json_roundtrip() {
        let f = sqrt2_example();
        let s = serde_json::to_string(&f).unwrap();
        let g: DecomposableForm = serde_json::from_str(&s).unwrap();
        assert_eq!(g.signature(), (1, 1));
        assert_eq!(serde_json::to_string(&g).unwrap(), s);
    }
}
