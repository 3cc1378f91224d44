//! Lattices in `R^n`: LLL reduction and exact shortest-vector enumeration.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::arith::linalg::float::{self, FMatrix};
use crate::arith::linalg::QMatrix;
use crate::arith::rational::{self, Rational};
use crate::error::{Error, Result};

/// LLL parameter.
pub const LLL_DELTA: f64 = 0.99;

/// Relative slack when collecting ties among shortest vectors.
const TIE_SLACK: f64 = 1e-10;

/// Basis given by the columns of `b`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeBasis {
    pub b: FMatrix,
    /// Exact basis when available.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rational::serde_rational::matrix_opt")]
    pub exact: Option<QMatrix>,
}

impl LatticeBasis {
    /// Unimodular basis: `|det b| = 1` within `1e-12`.
    pub fn new(b: FMatrix) -> Result<Self> {
        let l = Self::any_covolume(b)?;
        let d = float::det(&l.b).abs();
        if (d - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("basis has covolume {d}, expected 1")));
        }
        Ok(l)
    }

    /// Any nonsingular square basis.
    pub fn any_covolume(b: FMatrix) -> Result<Self> {
        let n = b.len();
        if n == 0 || b.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("lattice basis must be square and nonempty".into()));
        }
        if b.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::IllConditioned("non-finite basis entry".into()));
        }
        Ok(LatticeBasis { b, exact: None })
    }

    pub fn from_exact(q: QMatrix) -> Result<Self> {
        let b = q.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect();
        let mut l = Self::any_covolume(b)?;
        l.exact = Some(q);
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn covolume(&self) -> f64 {
        float::det(&self.b).abs()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        self.b.iter().map(|r| r[j]).collect()
    }
}

/// Shortest nonzero vector of a lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Systole {
    pub length: f64,
    /// Exact squared length for exact bases.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub length_sq_exact: Option<Rational>,
    /// Exact length when the squared length is a rational square.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub length_exact: Option<Rational>,
    /// Integer coordinates of the witness over the input basis.
    pub witness: Vec<i64>,
    pub witness_vector: Vec<f64>,
    /// Other shortest vectors up to sign, within the tie slack.
    pub ties: Vec<Vec<i64>>,
}

mod opt_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::arith::rational::{self, Rational};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&rational::fmt_rational(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| rational::parse_rational(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram-Schmidt data: `mu[i][j]` and squared lengths of the orthogonalized vectors.
fn gram_schmidt(v: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = v.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut bb = vec![0.0; n];
    for i in 0..n {
        let mut w = v[i].clone();
        for j in 0..i {
            mu[i][j] = dotf(&v[i], &star[j]) / bb[j];
            w.iter_mut().zip(&star[j]).for_each(|(a, b)| *a -= mu[i][j] * b);
        }
        bb[i] = dotf(&w, &w);
        star.push(w);
    }
    (mu, bb)
}

/// LLL-reduces the vectors `v` in place and applies the same integer
/// operations to `coeffs`.
pub fn lll_reduce(v: &mut [Vec<f64>], coeffs: &mut [Vec<i64>], delta: f64) {
    let n = v.len();
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(v);
            let q = mu[k][j].round();
            if q != 0.0 {
                let (vj, cj) = (v[j].clone(), coeffs[j].clone());
                v[k].iter_mut().zip(&vj).for_each(|(a, b)| *a -= q * b);
                coeffs[k].iter_mut().zip(&cj).for_each(|(a, b)| *a -= q as i64 * b);
            }
        }
        let (mu, bb) = gram_schmidt(v);
        if bb[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bb[k - 1] {
            k += 1;
        } else {
            v.swap(k, k - 1);
            coeffs.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

/// Integer combinations `x` of `v` with `|sum x_i v_i|^2 <= r2`, one per sign
/// class, excluding zero.
fn enumerate_short(v: &[Vec<f64>], r2: f64) -> Vec<Vec<i64>> {
    let n = v.len();
    let (mu, bb) = gram_schmidt(v);
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn rec(
        i: usize,
        partial: f64,
        x: &mut Vec<i64>,
        mu: &[Vec<f64>],
        bb: &[f64],
        r2: f64,
        out: &mut Vec<Vec<i64>>,
    ) {
        let n = x.len();
        let c: f64 = -(i + 1..n).map(|j| x[j] as f64 * mu[j][i]).sum::<f64>();
        let room = (r2 - partial).max(0.0) / bb[i];
        let w = room.sqrt() * (1.0 + 1e-12) + 1e-12;
        let (lo, hi) = ((c - w).ceil() as i64, (c + w).floor() as i64);
        for xi in lo..=hi {
            x[i] = xi;
            let d = xi as f64 - c;
            let p = partial + d * d * bb[i];
            if p > r2 * (1.0 + 1e-12) {
                continue;
            }
            if i == 0 {
                if x.iter().any(|&t| t != 0) {
                    out.push(x.clone());
                }
            } else {
                rec(i - 1, p, x, mu, bb, r2, out);
            }
        }
        x[i] = 0;
    }
    rec(n - 1, 0.0, &mut x, &mu, &bb, r2, &mut out);
    // one representative per sign class
    out.retain(|c| c.iter().rev().find(|&&t| t != 0).is_some_and(|&t| t > 0));
    out
}

/// Shortest nonzero vector by LLL reduction followed by enumeration within
/// the shortest reduced vector.
pub fn systole(l: &LatticeBasis) -> Result<Systole> {
    let n = l.dim();
    let inv = float::inverse(&l.b).ok_or_else(|| Error::IllConditioned("singular basis".into()))?;
    let cond = float::op_norm(&l.b) * float::op_norm(&inv);
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::IllConditioned(format!("condition number {cond:e}")));
    }
    let mut v: Vec<Vec<f64>> = (0..n).map(|j| l.column(j)).collect();
    let mut coeffs: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| (i == j) as i64).collect()).collect();
    lll_reduce(&mut v, &mut coeffs, LLL_DELTA);
    let r2 = v.iter().map(|x| dotf(x, x)).fold(f64::INFINITY, f64::min) * (1.0 + 1e-9);
    let short = enumerate_short(&v, r2);
    // back to coordinates over the input basis
    let mut cands: Vec<(f64, Option<Rational>, Vec<i64>)> = short
        .into_iter()
        .map(|x| {
            let mut c = vec![0i64; n];
            for (k, &xk) in x.iter().enumerate() {
                for i in 0..n {
                    c[i] += xk * coeffs[k][i];
                }
            }
            let vec = float::mat_vec(&l.b, &c.iter().map(|&t| t as f64).collect::<Vec<_>>());
            let exact = l.exact.as_ref().map(|q| {
                let cq: Vec<Rational> = c.iter().map(|&t| rational::int(t)).collect();
                crate::arith::linalg::mat_vec(q, &cq).iter().map(|t| t * t).sum::<Rational>()
            });
            (dotf(&vec, &vec), exact, canonical_sign(c))
        })
        .collect();
    if cands.is_empty() {
        return Err(Error::IllConditioned("enumeration found no vector".into()));
    }
    let order = |c: &[i64]| -> (Vec<u64>, Vec<i64>) {
        (c.iter().rev().map(|t| t.unsigned_abs()).collect(), c.iter().rev().copied().collect())
    };
    cands.sort_by(|a, b| match (&a.1, &b.1) {
        (Some(x), Some(y)) => x.cmp(y).then_with(|| order(&a.2).cmp(&order(&b.2))),
        _ => a.0.total_cmp(&b.0).then_with(|| order(&a.2).cmp(&order(&b.2))),
    });
    let (best_sq, best_exact, witness) = cands[0].clone();
    let ties: Vec<Vec<i64>> = cands[1..]
        .iter()
        .filter(|c| match (&c.1, &best_exact) {
            (Some(x), Some(y)) => x == y,
            _ => c.0 <= best_sq * (1.0 + TIE_SLACK),
        })
        .map(|c| c.2.clone())
        .collect();
    let witness_vector = float::mat_vec(&l.b, &witness.iter().map(|&t| t as f64).collect::<Vec<_>>());
    let length_exact = best_exact.as_ref().and_then(exact_sqrt);
    let length = match &length_exact {
        Some(q) => rational::to_f64(q),
        None => best_exact.as_ref().map_or(best_sq, rational::to_f64).sqrt(),
    };
    Ok(Systole { length, length_sq_exact: best_exact, length_exact, witness, witness_vector, ties })
}

fn canonical_sign(mut c: Vec<i64>) -> Vec<i64> {
    if c.iter().find(|&&t| t != 0).is_some_and(|&t| t < 0) {
        c.iter_mut().for_each(|t| *t = -*t);
    }
    c
}

fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

fn gamma_half_integer(twice: u32) -> f64 {
    // Gamma(twice / 2)
    if twice % 2 == 0 {
        (1..twice / 2).map(|k| k as f64).product()
    } else {
        let k = twice / 2;
        // Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
        let mut g = std::f64::consts::PI.sqrt();
        for j in 0..k {
            g *= j as f64 + 0.5;
        }
        g
    }
}

/// Minkowski's bound `(2 / sqrt(pi)) Gamma(n/2 + 1)^{1/n}` on the systole of a
/// covolume-one lattice in dimension `n`.
pub fn minkowski_bound(n: usize) -> f64 {
    let g = gamma_half_integer(n as u32 + 2);
    2.0 / std::f64::consts::PI.sqrt() * g.powf(1.0 / n as f64)
}

/// Integer basis matrix.
pub fn integer_basis(m: &QMatrix) -> bool {
    m.iter().flatten().all(|q| q.is_integer()) && !m.is_empty() && m.iter().all(|r| r.len() == m.len())
}

/// `|det| = 1` check for exact bases.
pub fn is_unimodular_exact(m: &QMatrix) -> bool {
    integer_basis(m) && crate::arith::linalg::det(m).abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn integer_lattice() {
        let s = systole(&LatticeBasis::new(float::identity(2)).unwrap()).unwrap();
        assert_eq!(s.length, 1.0);
        assert_eq!(s.witness, vec![1, 0]);
        assert_eq!(s.ties, vec![vec![0, 1]]);
    }

    #[test]
    fn diagonal_lattice_exact() {
        let q = vec![vec![int(2), int(0)], vec![int(0), rat(1, 2)]];
        let s = systole(&LatticeBasis::from_exact(q).unwrap()).unwrap();
        assert_eq!(s.length_exact, Some(rat(1, 2)));
        assert_eq!(s.witness, vec![0, 1]);
        assert!(s.ties.is_empty());
    }

    #[test]
    fn hexagonal_lattice() {
        let h = 3f64.sqrt() / 2.0;
        let s = systole(&LatticeBasis::any_covolume(vec![vec![1.0, 0.5], vec![0.0, h]]).unwrap()).unwrap();
        assert!((s.length - 1.0).abs() < 1e-15);
        // six minimal vectors, three up to sign
        assert_eq!(s.ties.len(), 2);
    }

    #[test]
    fn skewed_basis_is_reduced() {
        // columns (1, 0) and (100, 1): shortest vector is e1 after reduction
        let s = systole(&LatticeBasis::new(vec![vec![1.0, 100.0], vec![0.0, 1.0]]).unwrap()).unwrap();
        assert_eq!(s.length, 1.0);
        let s = systole(&LatticeBasis::new(vec![vec![1.0, 100.0], vec![1.0, 101.0]]).unwrap()).unwrap();
        assert_eq!(s.length, 1.0);
        assert!(s.witness_vector.iter().map(|x| x * x).sum::<f64>() - 1.0 < 1e-12);
    }

    #[test]
    fn minkowski_values() {
        // dimension 1: 2 / sqrt(pi) * Gamma(3/2) = 1
        assert!((minkowski_bound(1) - 1.0).abs() < 1e-15);
        // dimension 2: 2 / sqrt(pi) * sqrt(Gamma(2)) = 2 / sqrt(pi)
        assert!((minkowski_bound(2) - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
        for n in 1..=8 {
            assert!(minkowski_bound(n) >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn ill_conditioned_rejected() {
        let b = vec![vec![1e8, 0.0], vec![0.0, 1e-8]];
        assert!(matches!(systole(&LatticeBasis::new(b).unwrap()), Err(Error::IllConditioned(_))));
    }
}
