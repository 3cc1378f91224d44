//! Variable reduction for forms with more variables than linear factors.
//!
//! When the common kernel of the linear forms is spanned by rational vectors,
//! an integral unimodular change of variables `tau` moves that kernel onto the
//! last coordinates, and `f(x) = g(pi(tau x))` for a form `g` in fewer
//! variables.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DecomposableForm;
use crate::arith::linalg::{self, QMatrix};
use crate::arith::rational::{self, Rational};
use crate::arith::AlgebraicReal;
use crate::error::{Error, Result};

const PROBES: usize = 100;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum Reduction {
    Reduced {
        /// Unimodular integer matrix with `f(x) = g(pi(tau x))`.
        #[serde(with = "rational::serde_rational::matrix")]
        tau: QMatrix,
        #[serde(with = "rational::serde_rational::matrix")]
        tau_inv: QMatrix,
        g: DecomposableForm,
        /// Primitive integer kernel vectors, one per dropped variable.
        #[serde(with = "rational::serde_rational::matrix")]
        kernel: QMatrix,
        checked_probes: usize,
    },
    /// The kernel has no rational basis; `kernel` holds a basis in reduced
    /// echelon form with an irrational entry.
    NotRationallyReducible { kernel: Vec<Vec<AlgebraicReal>> },
}

impl Reduction {
    pub fn reduced_form(&self) -> Option<&DecomposableForm> {
        match self {
            Reduction::Reduced { g, .. } => Some(g),
            Reduction::NotRationallyReducible { .. } => None,
        }
    }
}

/// Reduces a form with `m > n` variables along the common kernel of its
/// linear forms.
pub fn reduce_variables(f: &DecomposableForm) -> Result<Reduction> {
    let (m, n) = (f.m(), f.n());
    if m <= n {
        return Err(Error::Precondition(format!("reduction needs more variables than factors (m = {m}, n = {n})")));
    }
    let to_alg = |c: &crate::arith::CReal| {
        c.as_algebraic()
            .ok_or_else(|| Error::Precondition("reduction needs algebraic coefficients".into()))
    };
    let lf = f.linear_forms();
    let mut rows: Vec<Vec<AlgebraicReal>> = Vec::new();
    for i in f.real_indices() {
        rows.push(lf[i].iter().map(|c| to_alg(&c.re)).collect::<Result<_>>()?);
    }
    for (i, _) in f.pair_indices() {
        rows.push(lf[i].iter().map(|c| to_alg(&c.re)).collect::<Result<_>>()?);
        rows.push(lf[i].iter().map(|c| to_alg(&c.im)).collect::<Result<_>>()?);
    }
    let kernel = linalg::kernel(&rows);
    let rational_kernel: Option<Vec<Vec<Rational>>> =
        kernel.iter().map(|v| v.iter().map(AlgebraicReal::to_rational).collect()).collect();
    let Some(rational_kernel) = rational_kernel else {
        return Ok(Reduction::NotRationallyReducible { kernel });
    };
    let kernel: QMatrix = rational_kernel.iter().map(|v| primitive_integer(v)).collect();
    let k = kernel.len();
    let tau = unimodular_completion(&kernel, m);
    let tau_inv = linalg::inverse(&tau).expect("unimodular matrices are invertible");
    let keep = m - k;
    let t: QMatrix = tau_inv.iter().map(|row| row[..keep].to_vec()).collect();
    let g = f.substitute(&t)?;
    let checked_probes = check_probes(f, &g, &tau)?;
    Ok(Reduction::Reduced { tau, tau_inv, g, kernel, checked_probes })
}

/// Scales a rational vector to a primitive integer vector.
fn primitive_integer(v: &[Rational]) -> Vec<Rational> {
    let d = rational::common_denominator(v.iter());
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(d.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}

/// Integer unimodular `tau` such that `tau K` vanishes outside its last `k`
/// rows, where `K` has the kernel vectors as columns.
fn unimodular_completion(kernel: &[Vec<Rational>], m: usize) -> QMatrix {
    let k = kernel.len();
    let mut work: Vec<Vec<BigInt>> =
        (0..m).map(|i| kernel.iter().map(|v| v[i].to_integer()).collect()).collect();
    let mut tau: Vec<Vec<BigInt>> =
        (0..m).map(|i| (0..m).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    for j in (0..k).rev() {
        let r = m - k + j;
        for i in 0..r {
            let a = work[i][j].clone();
            if a.is_zero() {
                continue;
            }
            let b = work[r][j].clone();
            if !b.is_zero() && (&a % &b).is_zero() {
                let q = &a / &b;
                row_axpy(&mut work, i, r, &q);
                row_axpy(&mut tau, i, r, &q);
                continue;
            }
            let e = a.extended_gcd(&b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (bg, ag) = (&b / &g, &a / &g);
            combine(&mut work, i, r, &bg, &ag, &x, &y);
            combine(&mut tau, i, r, &bg, &ag, &x, &y);
        }
    }
    tau.into_iter().map(|row| row.into_iter().map(Rational::from_integer).collect()).collect()
}

/// `row_i -= q row_r`.
fn row_axpy(m: &mut [Vec<BigInt>], i: usize, r: usize, q: &BigInt) {
    for c in 0..m[i].len() {
        let v = &m[r][c] * q;
        m[i][c] -= v;
    }
}

/// `(row_i, row_r) <- (bg row_i - ag row_r, x row_i + y row_r)`, determinant one.
fn combine(m: &mut [Vec<BigInt>], i: usize, r: usize, bg: &BigInt, ag: &BigInt, x: &BigInt, y: &BigInt) {
    for c in 0..m[i].len() {
        let (u, w) = (m[i][c].clone(), m[r][c].clone());
        m[i][c] = bg * &u - ag * &w;
        m[r][c] = x * &u + y * &w;
    }
}

/// Compares `f(v)` with `g(pi(tau v))` at random integer points.
fn check_probes(f: &DecomposableForm, g: &DecomposableForm, tau: &QMatrix) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7265_6475);
    let keep = g.m();
    for _ in 0..PROBES {
        let v: Vec<Rational> = (0..f.m()).map(|_| Rational::from_integer(rng.gen_range(-9i64..=9).into())).collect();
        let w: Vec<Rational> = linalg::mat_vec(tau, &v)[..keep].to_vec();
        let agree = match (f.rational_expansion(), g.rational_expansion()) {
            (Some(fe), Some(ge)) => fe.eval(&v) == ge.eval(&w),
            _ => (&f.value_creal(&v) - &g.value_creal(&w)).enclose_best(128)?.contains_zero(),
        };
        if !agree {
            return Err(Error::Precondition("reduced form disagrees with the original".into()));
        }
    }
    Ok(PROBES)
}

/// True when `tau` is an integer matrix of determinant `+-1`.
pub fn is_unimodular(tau: &QMatrix) -> bool {
    linalg::is_integer_matrix(tau) && linalg::det(tau).abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::forms::tests::sqrt2_field;
    use crate::forms::FieldFactor;

    #[test]
    fn drops_one_rational_direction() {
        // x1 (x1 + 2 x2 + 4 x3), kernel (0, -2, 1)
        let f = DecomposableForm::from_int_linear(&[&[1, 0, 0], &[1, 2, 4]]).unwrap();
        let Reduction::Reduced { tau, g, kernel, checked_probes, .. } = reduce_variables(&f).unwrap() else {
            panic!("rational kernel")
        };
        assert_eq!(kernel, vec![vec![int(0), int(-2), int(1)]]);
        assert!(is_unimodular(&tau));
        assert_eq!(g.m(), 2);
        assert_eq!(g.to_string(), "x1^2 + 2*x1*x2");
        assert_eq!(checked_probes, 100);
    }

    #[test]
    fn irrational_kernel_is_reported() {
        // x2 (x1 - sqrt2 x3)
        let z = || vec![int(0), int(0)];
        let f = DecomposableForm::from_field_factors(
            sqrt2_field(),
            3,
            &[
                FieldFactor::Linear(vec![z(), vec![int(1), int(0)], z()]),
                FieldFactor::Linear(vec![vec![int(1), int(0)], z(), vec![int(0), int(-1)]]),
            ],
            &int(1),
        )
        .unwrap();
        let Reduction::NotRationallyReducible { kernel } = reduce_variables(&f).unwrap() else {
            panic!("kernel is irrational")
        };
        assert_eq!(kernel.len(), 1);
        let v = &kernel[0];
        assert!(v[0].equals(&AlgebraicReal::sqrt_rational(&int(2)).unwrap()));
        assert!(v[1].is_zero());
        assert!(v[2].equals(&AlgebraicReal::from_int(1)));
    }

    #[test]
    fn several_kernel_directions() {
        let f = DecomposableForm::from_int_linear(&[&[2, 3, 5, 7]]).unwrap();
        let Reduction::Reduced { tau, g, kernel, .. } = reduce_variables(&f).unwrap() else { panic!() };
        assert_eq!(kernel.len(), 3);
        assert!(is_unimodular(&tau));
        assert_eq!(g.m(), 1);
        // the single remaining variable carries the gcd of the coefficients
        let c = g.rational_expansion().unwrap().eval(&[int(1)]).abs();
        assert_eq!(c, int(1));
    }

    #[test]
    fn square_forms_are_rejected() {
        let f = DecomposableForm::from_int_linear(&[&[1, 0], &[1, 1]]).unwrap();
        assert!(matches!(reduce_variables(&f), Err(Error::Precondition(_))));
    }
}
