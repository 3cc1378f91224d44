//! Analytic bound on the points that can contribute to a window, for forms
//! whose factors live on disjoint sets of variables.
//!
//! A single real form `c x_i` satisfies `|c x_i| >= |c|` at nonzero integers,
//! and a pair `|l|^2 = z^T G z` on two variables satisfies
//! `|l|^2 >= lambda_min(G)`. A nonzero value in `[-b, b]` then bounds every
//! block and therefore every coordinate.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::rational::{self, Rational};
use crate::arith::{CReal, RatInterval};
use crate::error::Result;
use crate::forms::DecomposableForm;

const BITS: u32 = 128;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContributorBound {
    /// Per-variable bound on `|z_i|` for points with `0 < |f(z)| <= b`.
    pub radii: Vec<u64>,
    pub required_radius: u64,
}

enum Block {
    Linear { var: usize, coef: RatInterval },
    Quadratic { vars: [usize; 2], gram: [[RatInterval; 2]; 2] },
}

/// `Some(true)` when the coefficient is exactly zero, `None` if undecided.
fn is_zero(c: &CReal, enc: &RatInterval) -> Option<bool> {
    if !enc.contains_zero() {
        return Some(false);
    }
    if let Some(q) = c.as_rational() {
        return Some(q.is_zero());
    }
    c.as_algebraic().map(|a| a.is_zero())
}

fn support(row: &[(CReal, RatInterval)]) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for (j, (c, enc)) in row.iter().enumerate() {
        if !is_zero(c, enc)? {
            out.push(j);
        }
    }
    Some(out)
}

fn dot(a: &[RatInterval], b: &[RatInterval]) -> RatInterval {
    a.iter().zip(b).fold(RatInterval::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// Per-coordinate bound for points whose value is nonzero and lies in
/// `[-b, b]`, or `None` when the factors share variables.
pub fn contributor_bound(f: &DecomposableForm, b: &Rational) -> Result<Option<ContributorBound>> {
    let m = f.m();
    let lf = f.linear_forms();
    let enc = f.coefficient_enclosures(BITS)?;
    let mut blocks = Vec::new();
    let mut used = vec![false; m];
    let mut claim = |vars: &[usize]| -> bool {
        if vars.iter().any(|&v| used[v]) {
            return false;
        }
        vars.iter().for_each(|&v| used[v] = true);
        true
    };
    for i in f.real_indices() {
        let row: Vec<(CReal, RatInterval)> = lf[i].iter().zip(&enc[i]).map(|(c, e)| (c.re.clone(), e.re.clone())).collect();
        let Some(sup) = support(&row) else { return Ok(None) };
        if sup.len() != 1 || !claim(&sup) {
            return Ok(None);
        }
        blocks.push(Block::Linear { var: sup[0], coef: enc[i][sup[0]].re.clone() });
    }
    for (i, _) in f.pair_indices() {
        let re: Vec<(CReal, RatInterval)> = lf[i].iter().zip(&enc[i]).map(|(c, e)| (c.re.clone(), e.re.clone())).collect();
        let im: Vec<(CReal, RatInterval)> = lf[i].iter().zip(&enc[i]).map(|(c, e)| (c.im.clone(), e.im.clone())).collect();
        let (Some(mut sup), Some(s2)) = (support(&re), support(&im)) else { return Ok(None) };
        sup.extend(s2);
        sup.sort_unstable();
        sup.dedup();
        if sup.len() != 2 || !claim(&sup) {
            return Ok(None);
        }
        let col = |j: usize| [enc[i][j].re.clone(), enc[i][j].im.clone()];
        let (c0, c1) = (col(sup[0]), col(sup[1]));
        let g01 = dot(&c0, &c1);
        blocks.push(Block::Quadratic { vars: [sup[0], sup[1]], gram: [[dot(&c0, &c0), g01.clone()], [g01, dot(&c1, &c1)]] });
    }
    if used.iter().any(|u| !u) {
        return Ok(None);
    }
    // certified lower bounds on each block at nonzero integer points
    let mut floors = Vec::new();
    for blk in &blocks {
        let fl = match blk {
            Block::Linear { coef, .. } => coef.abs().lo,
            Block::Quadratic { gram, .. } => {
                let tr = gram[0][0].add(&gram[1][1]);
                let det = gram[0][0].mul(&gram[1][1]).sub(&gram[0][1].square());
                if !det.is_positive() {
                    return Ok(None);
                }
                // lambda_min = 2 det / (tr + sqrt(tr^2 - 4 det))
                let disc = tr.hi.clone() * &tr.hi - Rational::from_integer(4.into()) * &det.lo;
                let denom = &tr.hi + rational::sqrt_upper(&disc.max(Rational::zero()), BITS);
                Rational::from_integer(2.into()) * &det.lo / denom
            }
        };
        if !fl.is_positive() {
            return Ok(None);
        }
        floors.push(fl);
    }
    let scale = f.scale().enclose_best(BITS)?.abs().lo;
    if !scale.is_positive() {
        return Ok(None);
    }
    let total: Rational = floors.iter().fold(scale, |acc, x| acc * x);
    let mut radii = vec![0u64; m];
    for (blk, fl) in blocks.iter().zip(&floors) {
        // the block value is at most b * floor / (scale * prod floors)
        let cap = b * fl / &total;
        match blk {
            Block::Linear { var, coef } => {
                radii[*var] = (cap / coef.abs().lo).floor().to_integer().try_into().unwrap_or(u64::MAX);
            }
            Block::Quadratic { vars, gram } => {
                let det = gram[0][0].mul(&gram[1][1]).sub(&gram[0][1].square());
                for (k, &v) in vars.iter().enumerate() {
                    // max of z_k^2 on {z^T G z <= cap} is cap * G_other / det
                    let other = &gram[1 - k][1 - k].hi;
                    let sq = &cap * other / &det.lo;
                    radii[v] = rational::sqrt_upper(&sq, 32).floor().to_integer().try_into().unwrap_or(u64::MAX);
                }
            }
        }
    }
    let required_radius = radii.iter().copied().max().unwrap_or(0);
    Ok(Some(ContributorBound { radii, required_radius }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::forms::tests::sqrt2_example;
    use crate::numberfield::NumberField;

    #[test]
    fn sqrt2_example_radii() {
        let r = contributor_bound(&sqrt2_example(), &int(10)).unwrap().unwrap();
        // |x1| <= sqrt 10, |x2| <= sqrt(10 / sqrt 2), |x3| <= 10
        assert_eq!(r.radii, vec![3, 2, 10]);
        assert_eq!(r.required_radius, 10);
    }

    #[test]
    fn coupled_factors_have_no_bound() {
        let f = NumberField::parse("x^2-2").unwrap().norm_form();
        assert!(contributor_bound(&f, &int(10)).unwrap().is_none());
    }

    #[test]
    fn diagonal_product() {
        let f = DecomposableForm::from_int_linear(&[&[2, 0], &[0, 3]]).unwrap();
        let r = contributor_bound(&f, &int(12)).unwrap().unwrap();
        // 6 |x1 x2| <= 12
        assert_eq!(r.radii, vec![2, 2]);
    }
}
