//! Certified real numbers as expression trees evaluated by interval
//! arithmetic with increasing working precision.
//!
//! Leaves are rationals, real algebraic numbers, pi, real or imaginary parts
//! of embedded field elements, and fixed enclosures (for example a continued
//! fraction known to a finite depth). Any leaf can be tagged with a symbol.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::algebraic::{AlgebraicReal, ComplexAlgebraic};
use super::interval::{ComplexInterval, RatInterval};
use super::poly::RatPoly;
use super::rational::{self, int, pow2, Rational};
use crate::error::{Error, Result};

/// Working precision cap in bits.
pub const MAX_PRECISION_BITS: u32 = 4096;

/// Real algebraic leaf with a shared refinement cache.
#[derive(Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlgLeaf {
    value: AlgebraicReal,
    #[serde(skip)]
    cache: Mutex<Option<AlgebraicReal>>,
}

impl AlgLeaf {
    pub fn new(value: AlgebraicReal) -> Self {
        AlgLeaf { value, cache: Mutex::new(None) }
    }

    pub fn value(&self) -> &AlgebraicReal {
        &self.value
    }

    pub fn interval_bits(&self, bits: u32) -> RatInterval {
        let mut guard = self.cache.lock().unwrap();
        let cur = guard.get_or_insert_with(|| self.value.clone());
        let eps = pow2(-(bits as i64));
        if cur.interval().width() > eps {
            *cur = cur.refine(&eps);
        }
        cur.interval()
    }
}

impl Clone for AlgLeaf {
    fn clone(&self) -> Self {
        AlgLeaf { value: self.value.clone(), cache: Mutex::new(self.cache.lock().unwrap().clone()) }
    }
}

/// Which root a field element is embedded at.
#[derive(Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedRoot {
    Real(AlgLeaf),
    Complex { re: AlgLeaf, im: AlgLeaf },
}

impl EmbedRoot {
    pub fn from_real(r: &AlgebraicReal) -> Self {
        EmbedRoot::Real(AlgLeaf::new(r.clone()))
    }

    pub fn from_complex(z: &ComplexAlgebraic) -> Self {
        EmbedRoot::Complex { re: AlgLeaf::new(z.re.clone()), im: AlgLeaf::new(z.im.clone()) }
    }

    fn enclosure(&self, bits: u32) -> ComplexInterval {
        match self {
            EmbedRoot::Real(r) => ComplexInterval::real(r.interval_bits(bits)),
            EmbedRoot::Complex { re, im } => ComplexInterval::new(re.interval_bits(bits), im.interval_bits(bits)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Re,
    Im,
}

/// Expression node.
#[derive(Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Rat(#[serde(with = "rational::serde_rational")] Rational),
    Alg(AlgLeaf),
    Pi,
    /// Fixed certified enclosure; cannot be refined further.
    Enclosure {
        #[serde(with = "rational::serde_rational::pair")]
        bounds: (Rational, Rational),
        note: String,
    },
    Tagged { symbol: String, value: CReal },
    /// Real or imaginary part of `poly(root)`.
    Embed { poly: RatPoly, root: EmbedRoot, part: Part },
    Neg(CReal),
    Add(CReal, CReal),
    Mul(CReal, CReal),
    Inv(CReal),
    Sqrt(CReal),
    NthRoot(CReal, u32),
}

struct Inner {
    node: Node,
    /// Last enclosure and the precision it was computed at.
    memo: Mutex<Option<(u32, RatInterval)>>,
}

/// Certified real number.
#[derive(Clone)]
pub struct CReal(Arc<Inner>);

impl Serialize for CReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.node.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Node::deserialize(d).map(CReal::node)
    }
}

static PI_CACHE: Mutex<Option<(u32, RatInterval)>> = Mutex::new(None);

fn arctan_inv(k: i64, bits: u32) -> RatInterval {
    // alternating series sum_j (-1)^j / ((2j+1) k^(2j+1))
    let eps = pow2(-(bits as i64 + 8));
    let round_bits = bits + 24;
    let kk = int(k * k);
    let mut pow = int(k);
    let mut sum = Rational::zero();
    let mut err = Rational::zero();
    let mut j = 0i64;
    loop {
        let term = (int(2 * j + 1) * &pow).recip();
        if term < eps {
            err += term;
            break;
        }
        let t = rational::round_down(&term, round_bits);
        err += &term - &t;
        if j % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        pow *= &kk;
        j += 1;
    }
    RatInterval::new(&sum - &err, &sum + &err)
}

/// Enclosure of pi with width below `2^-bits`.
pub fn pi_interval(bits: u32) -> RatInterval {
    let mut guard = PI_CACHE.lock().unwrap();
    if let Some((b, iv)) = guard.as_ref() {
        if *b >= bits {
            return iv.clone();
        }
    }
    let a = arctan_inv(5, bits + 8).scale(&int(16));
    let b = arctan_inv(239, bits + 8).scale(&int(4));
    let iv = a.sub(&b).round_out(bits + 4);
    *guard = Some((bits, iv.clone()));
    iv
}

impl CReal {
    fn node(n: Node) -> Self {
        CReal(Arc::new(Inner { node: n, memo: Mutex::new(None) }))
    }

    pub fn kind(&self) -> &Node {
        &self.0.node
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::node(Node::Rat(q))
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(int(k))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_algebraic(a: &AlgebraicReal) -> Self {
        match a.to_rational() {
            Some(q) => Self::from_rational(q),
            None => Self::node(Node::Alg(AlgLeaf::new(a.clone()))),
        }
    }

    pub fn pi() -> Self {
        Self::node(Node::Pi)
    }

    pub fn enclosure(lo: Rational, hi: Rational, note: impl Into<String>) -> Self {
        Self::node(Node::Enclosure { bounds: (lo, hi), note: note.into() })
    }

    pub fn tagged(symbol: impl Into<String>, value: CReal) -> Self {
        Self::node(Node::Tagged { symbol: symbol.into(), value })
    }

    /// Real or imaginary part of `poly(root)`.
    pub fn embed(poly: RatPoly, root: EmbedRoot, part: Part) -> Self {
        if poly.is_constant() {
            return match part {
                Part::Re => Self::from_rational(poly.coeff(0)),
                Part::Im => Self::zero(),
            };
        }
        if matches!(root, EmbedRoot::Real(_)) && part == Part::Im {
            return Self::zero();
        }
        Self::node(Node::Embed { poly, root, part })
    }

    /// Exact value when the tree only involves rationals.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.kind() {
            Node::Rat(q) => Some(q.clone()),
            Node::Tagged { value, .. } => value.as_rational(),
            Node::Neg(a) => a.as_rational().map(|q| -q),
            Node::Add(a, b) => Some(a.as_rational()? + b.as_rational()?),
            Node::Mul(a, b) => Some(a.as_rational()? * b.as_rational()?),
            Node::Inv(a) => a.as_rational().filter(|q| !q.is_zero()).map(|q| q.recip()),
            Node::Embed { poly, .. } if poly.deg() <= 1 => self.as_algebraic()?.to_rational(),
            _ => None,
        }
    }

    /// Exact algebraic value for trees built from rationals, real algebraic
    /// leaves, real embeddings and field operations.
    pub fn as_algebraic(&self) -> Option<AlgebraicReal> {
        match self.kind() {
            Node::Rat(q) => Some(AlgebraicReal::from_rational(q)),
            Node::Alg(a) => Some(a.value.clone()),
            Node::Tagged { value, .. } => value.as_algebraic(),
            Node::Embed { poly, root: EmbedRoot::Real(r), part: Part::Re } => Some(r.value.eval_poly(poly)),
            Node::Embed { root: EmbedRoot::Real(_), part: Part::Im, .. } => Some(AlgebraicReal::zero()),
            Node::Embed { poly, root: EmbedRoot::Complex { re, im }, part } => {
                // Horner over pairs (x, y) = x + iy
                let (a, b) = (&re.value, &im.value);
                let mut x = AlgebraicReal::zero();
                let mut y = AlgebraicReal::zero();
                for c in poly.coeffs().iter().rev() {
                    let nx = x.mul(a).sub(&y.mul(b)).shift(c);
                    let ny = x.mul(b).add(&y.mul(a));
                    x = nx;
                    y = ny;
                }
                Some(if *part == Part::Re { x } else { y })
            }
            Node::Neg(a) => Some(a.as_algebraic()?.neg()),
            Node::Add(a, b) => Some(a.as_algebraic()?.add(&b.as_algebraic()?)),
            Node::Mul(a, b) => Some(a.as_algebraic()?.mul(&b.as_algebraic()?)),
            Node::Inv(a) => a.as_algebraic()?.inv(),
            Node::Sqrt(a) => a.as_algebraic()?.sqrt().ok(),
            _ => None,
        }
    }

    /// True if the tree contains a tagged leaf (value not certified algebraic).
    pub fn has_tag(&self) -> bool {
        match self.kind() {
            Node::Tagged { .. } | Node::Pi | Node::Enclosure { .. } => true,
            Node::Neg(a) | Node::Inv(a) | Node::Sqrt(a) | Node::NthRoot(a, _) => a.has_tag(),
            Node::Add(a, b) | Node::Mul(a, b) => a.has_tag() || b.has_tag(),
            _ => false,
        }
    }

    /// Interval at working precision `prec`; `None` when a division or
    /// root could not be resolved at this precision.
    fn eval(&self, prec: u32) -> std::result::Result<RatInterval, EvalIssue> {
        if let Node::Rat(q) = self.kind() {
            return Ok(RatInterval::point(q.clone()));
        }
        if let Some((p, iv)) = self.0.memo.lock().unwrap().as_ref() {
            if *p >= prec {
                return Ok(iv.clone());
            }
        }
        let iv = self.eval_uncached(prec)?;
        *self.0.memo.lock().unwrap() = Some((prec, iv.clone()));
        Ok(iv)
    }

    fn eval_uncached(&self, prec: u32) -> std::result::Result<RatInterval, EvalIssue> {
        let iv = match self.kind() {
            Node::Rat(q) => RatInterval::point(q.clone()),
            Node::Alg(a) => a.interval_bits(prec),
            Node::Pi => pi_interval(prec),
            Node::Enclosure { bounds, .. } => RatInterval::new(bounds.0.clone(), bounds.1.clone()),
            Node::Tagged { value, .. } => value.eval(prec)?,
            Node::Embed { poly, root, part } => {
                let z = root.enclosure(prec + 16);
                let w = poly.eval_complex(&z, prec + 16);
                match part {
                    Part::Re => w.re,
                    Part::Im => w.im,
                }
            }
            Node::Neg(a) => a.eval(prec)?.neg(),
            Node::Add(a, b) => a.eval(prec)?.add(&b.eval(prec)?),
            Node::Mul(a, b) => a.eval(prec)?.mul(&b.eval(prec)?),
            Node::Inv(a) => a.eval(prec)?.inv().ok_or(EvalIssue::NeedPrecision)?,
            Node::Sqrt(a) => {
                let x = a.eval(prec)?;
                if x.is_negative() {
                    return Err(EvalIssue::Domain("square root of a negative number"));
                }
                x.sqrt(prec)
            }
            Node::NthRoot(a, k) => {
                let x = a.eval(prec)?;
                if x.is_negative() {
                    return Err(EvalIssue::Domain("root of a negative number"));
                }
                x.nth_root(*k, prec)
            }
        };
        Ok(iv.round_out(prec))
    }

    /// Enclosure of width at most `2^-bits`.
    pub fn enclose(&self, bits: u32) -> Result<RatInterval> {
        if let Node::Rat(q) = self.kind() {
            return Ok(RatInterval::point(q.clone()));
        }
        let target = pow2(-(bits as i64));
        let mut prec = bits + 16;
        let mut last = None;
        while prec <= MAX_PRECISION_BITS {
            match self.eval(prec) {
                Ok(iv) => {
                    if iv.width() <= target {
                        return Ok(iv);
                    }
                    last = Some(iv);
                }
                Err(EvalIssue::Domain(msg)) => return Err(Error::Precondition(msg.into())),
                Err(EvalIssue::NeedPrecision) => {}
            }
            prec *= 2;
        }
        Err(Error::PrecisionFloorHit(format!(
            "enclosure width {} exceeds 2^-{bits}",
            last.map(|iv| rational::to_f64(&iv.width())).unwrap_or(f64::INFINITY)
        )))
    }

    /// Best available enclosure (fixed-width leaves cap the achievable width).
    pub fn enclose_best(&self, bits: u32) -> Result<RatInterval> {
        match self.enclose(bits) {
            Ok(iv) => Ok(iv),
            Err(Error::PrecisionFloorHit(_)) => {
                let mut prec = bits + 16;
                loop {
                    match self.eval(prec) {
                        Ok(iv) => return Ok(iv),
                        Err(EvalIssue::Domain(msg)) => return Err(Error::Precondition(msg.into())),
                        Err(EvalIssue::NeedPrecision) if prec < MAX_PRECISION_BITS => prec *= 2,
                        Err(EvalIssue::NeedPrecision) => {
                            return Err(Error::PrecisionFloorHit("division by an enclosure containing zero".into()))
                        }
                    }
                }
            }
            Err(e) => Err(e),
        }
    }

    /// Sign, certified by an enclosure that excludes zero (exact for rationals
    /// and algebraic trees).
    pub fn signum(&self) -> Result<i8> {
        if let Some(q) = self.as_rational() {
            return Ok(if q.is_zero() { 0 } else if q.is_positive() { 1 } else { -1 });
        }
        let mut prec = 32;
        while prec <= MAX_PRECISION_BITS {
            if let Ok(iv) = self.eval(prec) {
                if let Some(s) = iv.sign() {
                    return Ok(s);
                }
            }
            prec *= 2;
        }
        if !self.has_tag() {
            if let Some(a) = self.as_algebraic() {
                return Ok(a.signum());
            }
        }
        Err(Error::PrecisionFloorHit("cannot separate value from zero".into()))
    }

    pub fn to_f64(&self) -> f64 {
        match self.enclose_best(64) {
            Ok(iv) => iv.mid_f64(),
            Err(_) => f64::NAN,
        }
    }

    pub fn inv(&self) -> CReal {
        if let Some(q) = self.as_rational().filter(|q| !q.is_zero()) {
            return Self::from_rational(q.recip());
        }
        Self::node(Node::Inv(self.clone()))
    }

    pub fn sqrt(&self) -> CReal {
        if let Some(q) = self.as_rational() {
            if let Some(rq) = exact_rational_sqrt(&q) {
                return Self::from_rational(rq);
            }
            if let Ok(a) = AlgebraicReal::sqrt_rational(&q) {
                return Self::from_algebraic(&a);
            }
        }
        Self::node(Node::Sqrt(self.clone()))
    }

    pub fn nth_root(&self, k: u32) -> CReal {
        match k {
            1 => self.clone(),
            2 => self.sqrt(),
            _ => {
                if let Some(r) = self.as_rational().and_then(|q| exact_rational_root(&q, k)) {
                    return Self::from_rational(r);
                }
                Self::node(Node::NthRoot(self.clone(), k))
            }
        }
    }

    pub fn square(&self) -> CReal {
        self * self
    }

    pub fn pow(&self, k: u32) -> CReal {
        let mut acc = CReal::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn abs(&self) -> Result<CReal> {
        Ok(if self.signum()? < 0 { -self } else { self.clone() })
    }

    pub fn min(&self, other: &CReal) -> Result<CReal> {
        Ok(if (self - other).signum()? <= 0 { self.clone() } else { other.clone() })
    }
}

fn exact_rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

fn exact_rational_root(q: &Rational, k: u32) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().nth_root(k);
    let d = q.denom().nth_root(k);
    (n.pow(k) == *q.numer() && d.pow(k) == *q.denom()).then(|| Rational::new(n, d))
}

enum EvalIssue {
    NeedPrecision,
    Domain(&'static str),
}

impl fmt::Debug for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Node::Rat(q) => write!(f, "{}", rational::fmt_rational(q)),
            Node::Tagged { symbol, .. } => write!(f, "{symbol}"),
            Node::Pi => write!(f, "pi"),
            _ => write!(f, "{:.15}", self.to_f64()),
        }
    }
}

impl From<Rational> for CReal {
    fn from(q: Rational) -> Self {
        CReal::from_rational(q)
    }
}

impl From<&AlgebraicReal> for CReal {
    fn from(a: &AlgebraicReal) -> Self {
        CReal::from_algebraic(a)
    }
}

impl Add for &CReal {
    type Output = CReal;
    fn add(self, o: &CReal) -> CReal {
        match (self.kind(), o.kind()) {
            (Node::Rat(a), Node::Rat(b)) => CReal::from_rational(a + b),
            (Node::Rat(a), _) if a.is_zero() => o.clone(),
            (_, Node::Rat(b)) if b.is_zero() => self.clone(),
            _ => CReal::node(Node::Add(self.clone(), o.clone())),
        }
    }
}

impl Sub for &CReal {
    type Output = CReal;
    fn sub(self, o: &CReal) -> CReal {
        self + &(-o)
    }
}

impl Mul for &CReal {
    type Output = CReal;
    fn mul(self, o: &CReal) -> CReal {
        match (self.kind(), o.kind()) {
            (Node::Rat(a), Node::Rat(b)) => CReal::from_rational(a * b),
            (Node::Rat(a), _) | (_, Node::Rat(a)) if a.is_zero() => CReal::zero(),
            (Node::Rat(a), _) if a.is_one() => o.clone(),
            (_, Node::Rat(b)) if b.is_one() => self.clone(),
            _ => CReal::node(Node::Mul(self.clone(), o.clone())),
        }
    }
}

impl Neg for &CReal {
    type Output = CReal;
    fn neg(self) -> CReal {
        match self.kind() {
            Node::Rat(a) => CReal::from_rational(-a),
            Node::Neg(a) => a.clone(),
            _ => CReal::node(Node::Neg(self.clone())),
        }
    }
}

impl Add for CReal {
    type Output = CReal;
    fn add(self, o: CReal) -> CReal {
        &self + &o
    }
}

impl Sub for CReal {
    type Output = CReal;
    fn sub(self, o: CReal) -> CReal {
        &self - &o
    }
}

impl Mul for CReal {
    type Output = CReal;
    fn mul(self, o: CReal) -> CReal {
        &self * &o
    }
}

impl Neg for CReal {
    type Output = CReal;
    fn neg(self) -> CReal {
        -&self
    }
}

/// Certified complex number as a pair of certified reals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CComplex {
    pub re: CReal,
    pub im: CReal,
}

impl CComplex {
    pub fn new(re: CReal, im: CReal) -> Self {
        CComplex { re, im }
    }

    pub fn real(re: CReal) -> Self {
        CComplex { re, im: CReal::zero() }
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::real(CReal::from_rational(q))
    }

    pub fn zero() -> Self {
        Self::real(CReal::zero())
    }

    /// `poly(root)` as a certified complex number.
    pub fn embed(poly: &RatPoly, root: &EmbedRoot) -> Self {
        CComplex {
            re: CReal::embed(poly.clone(), root.clone(), Part::Re),
            im: CReal::embed(poly.clone(), root.clone(), Part::Im),
        }
    }

    pub fn conj(&self) -> Self {
        CComplex { re: self.re.clone(), im: -&self.im }
    }

    pub fn add(&self, o: &CComplex) -> CComplex {
        CComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &CComplex) -> CComplex {
        CComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &CComplex) -> CComplex {
        CComplex {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn scale(&self, c: &CReal) -> CComplex {
        CComplex { re: &self.re * c, im: &self.im * c }
    }

    /// True when the imaginary part is certifiably zero by construction.
    pub fn is_real_exact(&self) -> bool {
        self.im.as_rational().is_some_and(|q| q.is_zero())
    }

    pub fn enclose(&self, bits: u32) -> Result<ComplexInterval> {
        Ok(ComplexInterval::new(self.re.enclose_best(bits)?, self.im.enclose_best(bits)?))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use crate::arith::sturm::isolate_real_roots;

    #[test]
    fn pi_digits() {
        let iv = pi_interval(100);
        assert!(iv.lo > rat(3141592653589793, 1000000000000000));
        assert!(iv.hi < rat(3141592653589794, 1000000000000000));
        assert!(iv.width() < pow2(-100));
    }

    #[test]
    fn sqrt_two_squared_is_two() {
        let s = CReal::from_int(2).sqrt();
        let sq = s.square();
        let iv = sq.enclose(80).unwrap();
        assert!(iv.contains(&int(2)));
        assert!(s.as_algebraic().is_some());
    }

    #[test]
    fn embedded_parts() {
        let p = RatPoly::from_ints(&[-2, 0, 0, 1]);
        let r = isolate_real_roots(&p).unwrap()[0].clone();
        let theta = CReal::embed(RatPoly::x(), EmbedRoot::from_real(&r), Part::Re);
        let cube = theta.pow(3);
        let iv = cube.enclose(70).unwrap();
        assert!(iv.contains(&int(2)));
    }

    #[test]
    fn fixed_enclosure_reports_floor() {
        let e = CReal::enclosure(rat(1, 3), rat(1, 2), "test");
        assert!(matches!(e.enclose(10), Err(Error::PrecisionFloorHit(_))));
        assert_eq!(e.enclose_best(10).unwrap().lo, rat(1, 3));
    }

    #[test]
    fn signs_and_min() {
        let a = CReal::pi() - CReal::from_int(3);
        assert_eq!(a.signum().unwrap(), 1);
        let m = CReal::one().min(&CReal::pi()).unwrap();
        assert_eq!(m.as_rational(), Some(int(1)));
    }

    #[test]
    fn json_roundtrip() {
        let x = CReal::tagged("pi", CReal::pi()) + CReal::from_int(2).sqrt();
        let s = serde_json::to_string(&x).unwrap();
        let back: CReal = serde_json::from_str(&s).unwrap();
        assert!((back.to_f64() - (std::f64::consts::PI + 2f64.sqrt())).abs() < 1e-12);
    }
}
