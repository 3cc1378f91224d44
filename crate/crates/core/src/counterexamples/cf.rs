//! Continued fractions with bounded partial quotients.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::rational::{self, Rational};
use crate::arith::CReal;
use crate::error::{Error, Result};

/// Depth used when a continued fraction is handed to certified arithmetic.
const CREAL_DEPTH: usize = 400;

/// Source of the partial quotients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "word")]
pub enum CfWord {
    /// `a_i = t_i + 1` with `t` the Thue-Morse word.
    ThueMorse,
    /// `prefix` followed by `period` repeated forever.
    Periodic { prefix: Vec<u32>, period: Vec<u32> },
}

impl CfWord {
    pub fn coefficient(&self, i: usize) -> u32 {
        match self {
            CfWord::ThueMorse => thue_morse(i) + 1,
            CfWord::Periodic { prefix, period } => {
                if i < prefix.len() {
                    prefix[i]
                } else {
                    period[(i - prefix.len()) % period.len()]
                }
            }
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<u32> {
        (0..len).map(|i| self.coefficient(i)).collect()
    }
}

/// `t_i`: parity of the number of ones in the binary expansion of `i`.
pub fn thue_morse(i: usize) -> u32 {
    i.count_ones() % 2
}

/// A real number given by its continued fraction, truncated at `depth`
/// partial quotients for reporting.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CFNumber {
    pub word: CfWord,
    pub depth: usize,
    /// `a_0, ..., a_{depth-1}`.
    pub coefficients: Vec<u32>,
    /// `p_k / q_k` for `k < depth`, reduced.
    #[serde(with = "big_pairs")]
    pub convergents: Vec<(BigInt, BigInt)>,
    /// Interval between `p_{depth-1}/q_{depth-1}` and `p_depth/q_depth`.
    #[serde(with = "rational::serde_rational::pair")]
    pub interval: (Rational, Rational),
    pub width: f64,
    pub approx: f64,
}

mod big_pairs {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(BigInt, BigInt)], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|(p, q)| format!("{p}/{q}")).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigInt, BigInt)>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|x| {
                let (p, q) = x.split_once('/').ok_or_else(|| serde::de::Error::custom("expected p/q"))?;
                Ok((p.parse().map_err(serde::de::Error::custom)?, q.parse().map_err(serde::de::Error::custom)?))
            })
            .collect()
    }
}

/// Convergents `p_k / q_k` for `k < len` by the usual recursion.
pub fn convergents(coeffs: &[u32]) -> Vec<(BigInt, BigInt)> {
    let (mut p2, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q2, mut q1) = (BigInt::one(), BigInt::zero());
    coeffs
        .iter()
        .map(|&a| {
            let a = BigInt::from(a);
            let p = &a * &p1 + &p2;
            let q = &a * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, p.clone());
            q2 = std::mem::replace(&mut q1, q.clone());
            (p, q)
        })
        .collect()
}

impl CFNumber {
    pub fn new(word: CfWord, depth: usize) -> Result<Self> {
        if depth < 2 {
            return Err(Error::Precondition("continued fraction depth must be at least 2".into()));
        }
        if let CfWord::Periodic { prefix, period } = &word {
            if prefix.is_empty() || period.is_empty() || prefix[1..].iter().chain(period).any(|&a| a == 0) {
                return Err(Error::InvalidInput("partial quotients after the first must be positive".into()));
            }
        }
        let all = convergents(&word.prefix(depth + 1));
        let (pa, qa) = &all[depth - 1];
        let (pb, qb) = &all[depth];
        let a = Rational::new(pa.clone(), qa.clone());
        let b = Rational::new(pb.clone(), qb.clone());
        let interval = if a <= b { (a, b) } else { (b, a) };
        let width = rational::to_f64(&(&interval.1 - &interval.0));
        let approx = rational::to_f64(&((&interval.0 + &interval.1) / rational::int(2)));
        Ok(CFNumber { coefficients: word.prefix(depth), convergents: all[..depth].to_vec(), word, depth, interval, width, approx })
    }

    pub fn convergent(&self, k: usize) -> Rational {
        let (p, q) = &self.convergents[k];
        Rational::new(p.clone(), q.clone())
    }

    /// The same number with more partial quotients.
    pub fn refined(&self, depth: usize) -> CFNumber {
        CFNumber::new(self.word.clone(), depth.max(self.depth)).expect("depth already validated")
    }

    /// Certified real tagged with the word it comes from.
    pub fn to_creal(&self) -> CReal {
        let deep = self.refined(CREAL_DEPTH);
        let (lo, hi) = deep.interval;
        CReal::tagged(self.symbol(), CReal::enclosure(lo, hi, "continued fraction"))
    }

    pub fn symbol(&self) -> String {
        match &self.word {
            CfWord::ThueMorse => "alpha_tm".into(),
            CfWord::Periodic { .. } => "alpha_periodic".into(),
        }
    }

    pub fn max_coefficient(&self) -> u32 {
        self.coefficients[1..].iter().copied().max().unwrap_or(1)
    }

    /// `|alpha - p_k/q_k| <= 1 / (q_k q_{k+1})` for every `k < depth - 1`,
    /// checked exactly against the interval.
    pub fn convergent_quality(&self) -> bool {
        (0..self.depth - 1).all(|k| {
            let c = self.convergent(k);
            let q = &self.convergents[k].1 * &self.convergents[k + 1].1;
            let bound = Rational::new(BigInt::one(), q);
            (&self.interval.0 - &c).abs() <= bound && (&self.interval.1 - &c).abs() <= bound
        })
    }

    /// Certified lower bound on `min q |q alpha - p|` over the convergents
    /// `q_k` with `k < depth`; best approximation makes it a bound for all
    /// `q < q_depth`.
    pub fn approximation_constant(&self) -> Rational {
        let deep = self.refined(self.depth + 40);
        (0..self.depth)
            .map(|k| {
                let (p, q) = (&self.convergents[k].0, &self.convergents[k].1);
                let qr = Rational::from_integer(q.clone());
                let pr = Rational::from_integer(p.clone());
                let lo = (&qr * &deep.interval.0 - &pr).abs();
                let hi = (&qr * &deep.interval.1 - &pr).abs();
                &qr * lo.min(hi)
            })
            .min()
            .expect("depth is positive")
    }
}

/// Thue-Morse continued fraction `[1; 2, 2, 1, 2, 1, 1, 2, ...]`.
pub fn badly_approximable_alpha(depth: usize) -> Result<CFNumber> {
    CFNumber::new(CfWord::ThueMorse, depth)
}

/// `sqrt(2) = [1; 2, 2, 2, ...]`.
pub fn sqrt2_cf(depth: usize) -> Result<CFNumber> {
    CFNumber::new(CfWord::Periodic { prefix: vec![1], period: vec![2] }, depth)
}

/// Smallest `(start, period)` with `period <= max_period` such that the
/// second half of `word` is periodic with that period.
pub fn eventual_period(word: &[u32], max_period: usize) -> Option<(usize, usize)> {
    let half = word.len() / 2;
    (1..=max_period).filter(|&p| half + p < word.len()).find_map(|p| {
        if (half..word.len() - p).any(|i| word[i] != word[i + p]) {
            return None;
        }
        // extend the periodic part to the left as far as it goes
        let mut start = half;
        while start > 0 && word[start - 1] == word[start - 1 + p] {
            start -= 1;
        }
        Some((start, p))
    })
}

/// Checks `q |q alpha - p| >= 1 / (a_max + 2)` for every `1 <= q <= q_max`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproximationAudit {
    pub q_max: u64,
    #[serde(with = "rational::serde_rational")]
    pub floor: Rational,
    /// Smallest certified value of `q |q alpha - p|` and its `q`.
    pub min_value: f64,
    pub argmin_q: u64,
    pub passed: bool,
}

pub fn approximation_audit(alpha: &CFNumber, q_max: u64) -> ApproximationAudit {
    let floor = Rational::new(BigInt::one(), BigInt::from(alpha.max_coefficient() + 2));
    // refine until q_max^2 * width is negligible
    let mut deep = alpha.refined(alpha.depth + 8);
    let target = Rational::new(BigInt::one(), BigInt::from(q_max).pow(2) * BigInt::from(1u64 << 40));
    while &deep.interval.1 - &deep.interval.0 > target {
        deep = deep.refined(deep.depth + 16);
    }
    let (lo, hi) = deep.interval;
    let mut best: Option<(Rational, u64)> = None;
    for q in 1..=q_max {
        let qr = rational::int(q as i64);
        let p = (&qr * &lo).round();
        let mut v: Option<Rational> = None;
        for cand in [&p - Rational::one(), p.clone(), &p + Rational::one()] {
            let a = &qr * &lo - &cand;
            let b = &qr * &hi - &cand;
            // certified lower bound of |q x - p| on [lo, hi]
            let m = if a.signum() != b.signum() { Rational::zero() } else { a.abs().min(b.abs()) };
            v = Some(v.map_or(m.clone(), |x: Rational| x.min(m)));
        }
        let val = &qr * v.expect("three candidates");
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, q));
        }
    }
    let (min, argmin_q) = best.unwrap_or((Rational::zero(), 0));
    ApproximationAudit { q_max, passed: q_max == 0 || min >= floor, min_value: rational::to_f64(&min), argmin_q, floor }
}

/// The quadratic field `Q(sqrt d)` (squarefree `d`) containing an eventually
/// periodic continued fraction with the given period.
pub fn periodic_field(word: &[u32], start: usize, period: usize) -> BigInt {
    let block = &word[start..start + period];
    // x = [block; x] = (P x + P') / (Q x + Q')
    let conv = convergents(block);
    let (p, q) = conv[period - 1].clone();
    let (pp, qp) = if period >= 2 { conv[period - 2].clone() } else { (BigInt::one(), BigInt::zero()) };
    // Q x^2 + (Q' - P) x - P' = 0
    let disc = (&qp - &p).pow(2) + BigInt::from(4) * &q * &pp;
    rational::squarefree_part(&disc)
}
