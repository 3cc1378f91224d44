//! Sturm sequences and real root isolation by bisection.

use num_traits::{Signed, Zero};

use super::algebraic::AlgebraicReal;
use super::poly::RatPoly;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Sturm chain `p, p', -rem(p, p'), ...` with every member scaled to a
/// primitive integer polynomial by a positive factor (signs are preserved).
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<RatPoly>,
}

fn positive_primitive(p: &RatPoly) -> RatPoly {
    let (c, prim) = p.primitive_part();
    let q = RatPoly::from_bigints(&prim);
    if c.is_negative() {
        -&q
    } else {
        q
    }
}

impl SturmSequence {
    pub fn new(p: &RatPoly) -> Self {
        let mut seq = vec![positive_primitive(p)];
        let d = p.derivative();
        if !d.is_zero() {
            seq.push(positive_primitive(&d));
        }
        while seq.len() >= 2 {
            let r = seq[seq.len() - 2].rem(&seq[seq.len() - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(positive_primitive(&-&r));
        }
        SturmSequence { seq }
    }

    fn count_changes(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut changes = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::count_changes(self.seq.iter().map(|p| p.sign_at(x)))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::count_changes(self.seq.iter().map(|p| {
            let s: i8 = if p.lc().is_positive() { 1 } else { -1 };
            if positive || p.deg() % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }

    /// Number of distinct roots in the half-open interval `(lo, hi]`.
    pub fn count_in(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo).saturating_sub(self.variations_at(hi))
    }

    /// Number of distinct roots in the closed interval `[lo, hi]`.
    pub fn count_closed(&self, lo: &Rational, hi: &Rational) -> usize {
        let at_lo = usize::from(self.seq[0].eval(lo).is_zero());
        self.count_in(lo, hi) + at_lo
    }
}

/// Picks a split point of `(lo, hi)` that is not a root of `p`.
fn split_point(p: &RatPoly, lo: &Rational, hi: &Rational) -> Rational {
    let w = hi - lo;
    let mut k = 2i64;
    loop {
        // midpoint first, then nearby fractions
        for num in [k / 2, 1, k - 1] {
            let c = lo + &w * Rational::new(num.into(), k.into());
            if !p.eval(&c).is_zero() {
                return c;
            }
        }
        k += 1;
    }
}

/// Isolating intervals `(lo, hi)` for all real roots of a squarefree `p`,
/// sorted ascending. Endpoints are never roots.
pub fn isolating_intervals(p: &RatPoly) -> Vec<(Rational, Rational)> {
    if p.deg() == 0 {
        return Vec::new();
    }
    let b = p.root_bound();
    isolating_intervals_in(p, &-&b, &b)
}

/// Isolating intervals for the roots of `p` in `(lo, hi)`; `lo` and `hi` must
/// not be roots.
pub fn isolating_intervals_in(p: &RatPoly, lo: &Rational, hi: &Rational) -> Vec<(Rational, Rational)> {
    let sturm = SturmSequence::new(p);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), sturm.count_in(lo, hi))];
    while let Some((a, b, n)) = stack.pop() {
        match n {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let m = split_point(p, &a, &b);
                let left = sturm.count_in(&a, &m);
                stack.push((m.clone(), b, n - left));
                stack.push((a, m, left));
            }
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// All real roots of `p`, ascending, with disjoint isolating intervals.
pub fn isolate_real_roots(p: &RatPoly) -> Result<Vec<AlgebraicReal>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("zero polynomial has no isolated roots".into()));
    }
    if !p.is_squarefree() {
        return Err(Error::NonSquarefreeInput);
    }
    Ok(isolating_intervals(p)
        .into_iter()
        .map(|(lo, hi)| AlgebraicReal::from_isolating(p.clone(), lo, hi))
        .collect())
}

/// Distinct real roots of an arbitrary nonzero polynomial (squarefree part is taken).
pub fn real_roots(p: &RatPoly) -> Vec<AlgebraicReal> {
    let q = p.squarefree_part();
    isolate_real_roots(&q).unwrap_or_default()
}

/// Number of distinct positive real roots of a nonzero polynomial.
pub fn count_positive_roots(p: &RatPoly) -> usize {
    let q = p.squarefree_part();
    if q.deg() == 0 {
        return 0;
    }
    let s = SturmSequence::new(&q);
    let zero = Rational::zero();
    s.count_in(&zero, &q.root_bound())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn root_two_pair() {
        let r = isolate_real_roots(&RatPoly::from_ints(&[-2, 0, 1])).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].interval().hi <= Rational::zero());
        assert!((r[1].to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn no_real_roots() {
        assert!(isolate_real_roots(&RatPoly::from_ints(&[1, 0, 1])).unwrap().is_empty());
    }

    #[test]
    fn cube_root_two_in_unit_interval() {
        let r = isolate_real_roots(&RatPoly::from_ints(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(r.len(), 1);
        let iv = r[0].refine(&rat(1, 1_000_000)).interval();
        assert!(iv.lo > int(1) && iv.hi < int(2));
        // sign change oracle
        let p = RatPoly::from_ints(&[-2, 0, 0, 1]);
        assert!(p.eval(&iv.lo) < Rational::zero() && p.eval(&iv.hi) > Rational::zero());
    }

    #[test]
    fn rejects_repeated_roots() {
        let p = RatPoly::from_ints(&[1, -2, 1]);
        assert_eq!(isolate_real_roots(&p).unwrap_err(), Error::NonSquarefreeInput);
    }

    #[test]
    fn rational_roots_are_isolated_strictly() {
        let p = RatPoly::from_ints(&[0, -1, 0, 1]); // roots -1, 0, 1
        let iv = isolating_intervals(&p);
        assert_eq!(iv.len(), 3);
        for (lo, hi) in &iv {
            assert!(!p.eval(lo).is_zero() && !p.eval(hi).is_zero());
        }
    }
}
