//! Bounded forms whose torus orbits are not compact, with box audits of
//! their lower bounds.
//!
//! `cor3_form` builds the product of two positive definite quadratics in the
//! pairs `(x1 -+ alpha x2, x3 -+ alpha x4)` with `alpha` badly approximable.
//! `cor2_form` deforms one complex pair of a norm form by a transcendental
//! weight. Non-compactness rests on the tag of the parameter and is reported,
//! not computed.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::interval::F64Interval;
use crate::arith::rational::{self, Rational};
use crate::arith::{CComplex, CReal};
use crate::error::{Error, Result};
use crate::forms::DecomposableForm;
use crate::numberfield::NumberField;
use crate::spectrum::{for_each_in_slab, point_key};

pub mod cf;

pub use cf::{approximation_audit, badly_approximable_alpha, eventual_period, sqrt2_cf, CFNumber, CfWord};

/// Below this depth the non-quasi check declines to answer.
pub const MIN_WITNESS_DEPTH: usize = 16;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Construction {
    SplitPairs {
        alpha: CFNumber,
        #[serde(with = "rational::serde_rational")]
        a: Rational,
        #[serde(with = "rational::serde_rational")]
        b: Rational,
        /// Certified `min q |q alpha - p|` over the convergent denominators.
        #[serde(with = "rational::serde_rational")]
        approximation_constant: Rational,
        /// `c(alpha) = min(1, alpha * approximation_constant)`.
        c_alpha: f64,
        /// Every `(x1, x2)` in the box satisfies
        /// `|x1^2 - alpha^2 x2^2| >= c(alpha) min(1, |x1|, |x2|)`.
        pair_inequality_holds: bool,
    },
    DeformedNorm {
        field: NumberField,
        parameter: String,
        parameter_enclosure: (f64, f64),
        /// Smallest `|N_K(z)|` over the box, exact.
        #[serde(with = "rational::serde_rational")]
        min_norm: Rational,
        /// The deformed pair, as an index into the linear forms.
        pair: (usize, usize),
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditedForm {
    pub form: DecomposableForm,
    pub construction: Construction,
    /// Symbolic floor and its certified enclosure.
    pub floor_expression: String,
    pub claimed_floor: (f64, f64),
    pub audit_box: u32,
    pub points_checked: u64,
    /// Smallest certified lower bound of `|f(z)|` over nonzero box points.
    pub observed_min: f64,
    pub argmin: Vec<i64>,
    pub passed: bool,
    pub transcript: Vec<String>,
}

/// Lower bound of `|x|` for an interval.
fn abs_lower(x: F64Interval) -> f64 {
    if x.contains_zero() {
        0.0
    } else {
        x.lo.abs().min(x.hi.abs())
    }
}

struct BoxMin {
    value: f64,
    witness: Vec<i64>,
    count: u64,
    ok: bool,
}

/// Minimum of `lower(z)` over nonzero points of `[-r, r]^m`, together with
/// the conjunction of `check(z)`.
fn scan_box<F>(m: usize, r: u32, eval: F) -> BoxMin
where
    F: Fn(&[i64]) -> (f64, bool) + Sync,
{
    let r = r as i64;
    let parts: Vec<BoxMin> = (-r..=r)
        .into_par_iter()
        .map(|first| {
            let mut acc = BoxMin { value: f64::INFINITY, witness: Vec::new(), count: 0, ok: true };
            for_each_in_slab(m, r, first, |z| {
                if z.iter().all(|&x| x == 0) {
                    return;
                }
                let (v, ok) = eval(z);
                acc.count += 1;
                acc.ok &= ok;
                if v < acc.value || (v == acc.value && point_key(z) < point_key(&acc.witness)) {
                    acc.value = v;
                    acc.witness = z.to_vec();
                }
            });
            acc
        })
        .collect();
    parts.into_iter().fold(BoxMin { value: f64::INFINITY, witness: Vec::new(), count: 0, ok: true }, |a, b| {
        let better = b.value < a.value || (b.value == a.value && point_key(&b.witness) < point_key(&a.witness));
        let (value, witness) = if better && !b.witness.is_empty() { (b.value, b.witness) } else { (a.value, a.witness) };
        BoxMin { value, witness, count: a.count + b.count, ok: a.ok && b.ok }
    })
}

fn positive(q: &Rational, name: &str) -> Result<()> {
    if q.is_positive() {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter(format!("{name} = {}", rational::fmt_rational(q))))
    }
}

fn down(q: &Rational) -> f64 {
    F64Interval::from_rational(q).lo
}

/// The quartic `((x1 - alpha x2)^2 + a (x3 - alpha x4)^2)((x1 + alpha x2)^2 + b (x3 + alpha x4)^2)`.
pub fn split_pair_form(alpha: &CFNumber, a: &Rational, b: &Rational) -> Result<DecomposableForm> {
    positive(a, "a")?;
    positive(b, "b")?;
    let al = alpha.to_creal();
    let z = CReal::zero;
    let one = CReal::one;
    let ra = CReal::from_rational(a.clone()).sqrt();
    let rb = CReal::from_rational(b.clone()).sqrt();
    let row = |sign: i64, w: &CReal| {
        let sa = if sign < 0 { -&al } else { al.clone() };
        vec![
            CComplex::new(one(), z()),
            CComplex::new(sa.clone(), z()),
            CComplex::new(z(), w.clone()),
            CComplex::new(z(), w * &sa),
        ]
    };
    let l1 = row(-1, &ra);
    let l2 = row(1, &rb);
    let lf = vec![l1.clone(), l1.iter().map(CComplex::conj).collect(), l2.clone(), l2.iter().map(CComplex::conj).collect()];
    Ok(DecomposableForm::from_parts(4, CReal::one(), lf, vec![1, 0, 3, 2], None)?.with_label(format!(
        "((x1 - {s} x2)^2 + {a} (x3 - {s} x4)^2) ((x1 + {s} x2)^2 + {b} (x3 + {s} x4)^2)",
        s = alpha.symbol(),
        a = rational::fmt_rational(a),
        b = rational::fmt_rational(b)
    )))
}

/// Builds the split-pair quartic and audits `f >= c(alpha)^2 min(1, ab)` on
/// `[-r, r]^4`.
pub fn cor3_form(alpha: &CFNumber, a: &Rational, b: &Rational, r: u32) -> Result<AuditedForm> {
    let form = split_pair_form(alpha, a, b)?;
    let kappa = alpha.approximation_constant();
    let c_alpha = (rational::to_f64(&alpha.interval.0) * down(&kappa)).min(1.0);
    // certified lower bound on c(alpha)
    let c_alpha = c_alpha * (1.0 - 1e-12);
    let ab = a * b;
    let ab_min = down(&ab.clone().min(Rational::from_integer(1.into())));
    let floor = c_alpha * c_alpha * ab_min * (1.0 - 1e-12);
    let al = F64Interval::from_rat_interval(&alpha.to_creal().enclose_best(80)?);
    let al2 = al.square();
    let pair = scan_box(2, r, |z| {
        let v = F64Interval::from_int(z[0]).square().sub(al2.mul(F64Interval::from_int(z[1]).square()));
        let m = z.iter().map(|x| x.unsigned_abs()).min().unwrap_or(0).min(1) as f64;
        (abs_lower(v), abs_lower(v) >= c_alpha * m)
    });
    let fast = form.fast()?;
    let scan = scan_box(4, r, |z| (abs_lower(fast.eval(z)), true));
    let passed = pair.ok && scan.value >= floor;
    let transcript = vec![
        format!("alpha depth {} interval width {:e}", alpha.depth, alpha.width),
        format!("approximation constant {:.12} over {} convergents", rational::to_f64(&kappa), alpha.depth),
        format!("c(alpha) >= {c_alpha:.12}"),
        format!("pair inequality on [-{r}, {r}]^2: {}", if pair.ok { "holds" } else { "fails" }),
        format!("min |f| on [-{r}, {r}]^4 minus 0: {:.12} at {:?}", scan.value, scan.witness),
        format!("floor c(alpha)^2 min(1, ab) = {floor:.12}: {}", if passed { "holds" } else { "fails" }),
    ];
    Ok(AuditedForm {
        form,
        construction: Construction::SplitPairs {
            alpha: alpha.clone(),
            a: a.clone(),
            b: b.clone(),
            approximation_constant: kappa,
            c_alpha,
            pair_inequality_holds: pair.ok,
        },
        floor_expression: "c(alpha)^2 min(1, ab)".into(),
        claimed_floor: (floor, floor),
        audit_box: r,
        points_checked: scan.count,
        observed_min: scan.value,
        argmin: scan.witness,
        passed,
        transcript,
    })
}

/// Positive parameter for the deformed norm form.
#[derive(Clone, Debug)]
pub enum Parameter {
    Rational(Rational),
    /// `pi`, carried as a tagged symbol.
    Pi,
}

impl Parameter {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "pi" => Ok(Parameter::Pi),
            t => Ok(Parameter::Rational(rational::parse_rational(t)?)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Parameter::Pi => "pi".into(),
            Parameter::Rational(q) => rational::fmt_rational(q),
        }
    }

    pub fn to_creal(&self) -> CReal {
        match self {
            Parameter::Pi => CReal::tagged("pi", CReal::pi()),
            Parameter::Rational(q) => CReal::from_rational(q.clone()),
        }
    }
}

/// Norm form of `k` with one complex pair `lambda1^2 + lambda2^2` replaced by
/// `lambda1^2 + a lambda2^2`; returns the form and the deformed pair.
pub fn deformed_norm_form(k: &NumberField, a: &Parameter) -> Result<(DecomposableForm, (usize, usize))> {
    let (s, t) = k.signature();
    if s == 0 || t == 0 {
        return Err(Error::SignatureMismatch(format!("need s >= 1 and t >= 1, field has ({s}, {t})")));
    }
    let ac = a.to_creal();
    if ac.signum()? <= 0 {
        return Err(Error::NonPositiveParameter(a.name()));
    }
    let nf = k.norm_form();
    let pairing = nf.pairing().to_vec();
    let i = (0..pairing.len()).find(|&i| pairing[i] > i).expect("t >= 1");
    let j = pairing[i];
    let ra = ac.sqrt();
    let mut lf = nf.linear_forms().to_vec();
    lf[i] = lf[i].iter().map(|c| CComplex::new(c.re.clone(), &c.im * &ra)).collect();
    lf[j] = lf[i].iter().map(CComplex::conj).collect();
    let f = DecomposableForm::from_parts(nf.m(), nf.scale().clone(), lf, pairing, None)?
        .with_label(format!("norm form of Q[x]/({}) with one pair weighted by {}", k.minpoly(), a.name()));
    Ok((f, (i, j)))
}

/// Builds the deformed norm form and audits `|f| >= min(1, a)` on
/// `[-r, r]^n` using `|N_K(z)| >= 1`.
pub fn cor2_form(k: &NumberField, a: &Parameter, r: u32) -> Result<AuditedForm> {
    let (form, pair) = deformed_norm_form(k, a)?;
    let ac = a.to_creal();
    let c = CReal::one().min(&ac)?;
    let c_iv = c.enclose_best(64)?;
    let c_lo = down(&c_iv.lo);
    let c_hi = F64Interval::from_rational(&c_iv.hi).hi;
    let nk = k.norm_form();
    let expansion = nk.rational_expansion().expect("norm forms have rational expansions").clone();
    let fast = form.fast()?;
    let n = k.degree();
    let min_norm = std::sync::Mutex::new(None::<Rational>);
    let scan = scan_box(n, r, |z| {
        let zq: Vec<Rational> = z.iter().map(|&x| rational::int(x)).collect();
        let norm = expansion.eval(&zq).abs();
        let norm_ok = rational::is_integer(&norm) && norm >= Rational::from_integer(BigInt::from(1));
        {
            let mut g = min_norm.lock().unwrap();
            if g.as_ref().is_none_or(|m| norm < *m) {
                *g = Some(norm);
            }
        }
        let v = fast.eval(z);
        // a value certified below the floor would contradict the bound
        let consistent = v.abs().hi >= c_lo;
        (abs_lower(v), norm_ok && consistent)
    });
    let min_norm = min_norm.into_inner().unwrap().unwrap_or_else(Rational::zero);
    let ae = ac.enclose_best(64)?;
    let passed = scan.ok;
    let transcript = vec![
        format!("field Q[x]/({}) with signature {:?}", k.minpoly(), k.signature()),
        format!("pair {pair:?} weighted by {}", a.name()),
        format!("min |N_K| on [-{r}, {r}]^{n} minus 0: {min_norm}"),
        format!("c = min(1, {}) in [{c_lo}, {c_hi}]", a.name()),
        format!("min |f| lower bound {:.12} at {:?}", scan.value, scan.witness),
        format!("|f| >= c on the box: {}", if passed { "holds" } else { "fails" }),
    ];
    Ok(AuditedForm {
        form,
        construction: Construction::DeformedNorm {
            field: k.clone(),
            parameter: a.name(),
            parameter_enclosure: (down(&ae.lo), F64Interval::from_rational(&ae.hi).hi),
            min_norm,
            pair,
        },
        floor_expression: format!("min(1, {})", a.name()),
        claimed_floor: (c_lo, c_hi),
        audit_box: r,
        points_checked: scan.count,
        observed_min: scan.value,
        argmin: scan.witness,
        passed,
        transcript,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum WitnessVerdict {
    /// No eventual period up to `max_period` in the scanned prefix, so no
    /// element of the field has this expansion prefix-compatibly.
    NoWitness { depth: usize, max_period: usize },
    /// The prefix is eventually periodic and its quadratic field is `F`.
    WitnessFound { start: usize, period: usize, squarefree: String },
    /// Periodic, but in another quadratic field.
    OtherField { start: usize, period: usize, squarefree: String },
    Inconclusive { depth: usize, reason: String },
}

/// Looks for evidence that `alpha` lies in the real quadratic field
/// `Q(sqrt d)`, which would make the split-pair form quasi-algebraic over it.
pub fn nonquasi_witness_check(alpha: &CFNumber, d: i64, depth: usize) -> Result<WitnessVerdict> {
    let dd = BigInt::from(d);
    if d <= 1 || rational::squarefree_part(&dd) == BigInt::from(1) {
        return Err(Error::Precondition(format!("Q(sqrt {d}) is not a real quadratic field")));
    }
    if depth < MIN_WITNESS_DEPTH {
        return Ok(WitnessVerdict::Inconclusive { depth, reason: format!("depth below {MIN_WITNESS_DEPTH}") });
    }
    let word = alpha.word.prefix(depth);
    let max_period = depth / 4;
    Ok(match eventual_period(&word, max_period) {
        None => WitnessVerdict::NoWitness { depth, max_period },
        Some((start, period)) => {
            let sq = cf::periodic_field(&word, start, period);
            if sq == rational::squarefree_part(&dd) {
                WitnessVerdict::WitnessFound { start, period, squarefree: sq.to_string() }
            } else {
                WitnessVerdict::OtherField { start, period, squarefree: sq.to_string() }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    #[test]
    fn unit_vector_value() {
        let alpha = badly_approximable_alpha(32).unwrap();
        let f = split_pair_form(&alpha, &int(1), &int(1)).unwrap();
        let v = f.value_creal(&[int(1), int(0), int(0), int(0)]);
        // the alpha terms drop out exactly
        assert_eq!(v.as_rational(), Some(int(1)));
        assert_eq!(f.signature(), (0, 2));
    }

    #[test]
    fn split_pair_audit_small_box() {
        let alpha = badly_approximable_alpha(32).unwrap();
        let a = cor3_form(&alpha, &int(1), &int(1), 6).unwrap();
        assert!(a.passed, "{:?}", a.transcript);
        assert!(a.observed_min >= a.claimed_floor.0);
    }

    #[test]
    fn rejects_nonpositive() {
        let alpha = badly_approximable_alpha(16).unwrap();
        assert!(matches!(cor3_form(&alpha, &int(0), &int(1), 2), Err(Error::NonPositiveParameter(_))));
    }

    #[test]
    fn deformed_norm_audit() {
        let k = NumberField::parse("x^3-2").unwrap();
        let a = cor2_form(&k, &Parameter::Pi, 4).unwrap();
        assert!(a.passed, "{:?}", a.transcript);
        assert_eq!(a.claimed_floor, (1.0, 1.0));
        let one = cor2_form(&k, &Parameter::Rational(int(1)), 3).unwrap();
        assert!(one.passed);
        assert!((one.observed_min - 1.0).abs() < 1e-9);
        let half = cor2_form(&k, &Parameter::Rational(rational::rat(1, 2)), 3).unwrap();
        assert!(half.passed && half.observed_min >= 0.5 - 1e-12);
    }

    #[test]
    fn deformed_norm_needs_mixed_signature() {
        let k = NumberField::parse("x^2-2").unwrap();
        assert!(matches!(cor2_form(&k, &Parameter::Pi, 2), Err(Error::SignatureMismatch(_))));
    }

    #[test]
    fn witness_policy() {
        let alpha = badly_approximable_alpha(64).unwrap();
        assert_eq!(
            nonquasi_witness_check(&alpha, 2, 64).unwrap(),
            WitnessVerdict::NoWitness { depth: 64, max_period: 16 }
        );
        let control = sqrt2_cf(64).unwrap();
        assert!(matches!(
            nonquasi_witness_check(&control, 2, 64).unwrap(),
            WitnessVerdict::WitnessFound { period: 1, .. }
        ));
        assert!(matches!(
            nonquasi_witness_check(&control, 3, 64).unwrap(),
            WitnessVerdict::OtherField { period: 1, .. }
        ));
        assert!(matches!(nonquasi_witness_check(&alpha, 2, 8).unwrap(), WitnessVerdict::Inconclusive { .. }));
    }
}
