//! Univariate and bivariate resultants over Q.
//!
//! Bivariate polynomials are stored as coefficient lists in `y` whose entries
//! are polynomials in `x`. `Res_y` is computed by evaluating `x` at integer
//! points and interpolating.

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::poly::RatPoly;
use super::rational::{int, Rational};

/// `P(x, y) = sum_k P[k](x) y^k`.
pub type BiPoly = Vec<RatPoly>;

/// Resultant of two univariate polynomials by the Euclidean recursion.
pub fn resultant(a: &RatPoly, b: &RatPoly) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    let (m, n) = (a.deg(), b.deg());
    if n == 0 {
        return num_traits::pow(b.lc(), m);
    }
    if m == 0 {
        return num_traits::pow(a.lc(), n);
    }
    let r = a.rem(b);
    if r.is_zero() {
        return Rational::zero();
    }
    let sign = if (m * n) % 2 == 1 { -Rational::one() } else { Rational::one() };
    let k = m - r.deg();
    sign * num_traits::pow(b.lc(), k) * resultant(b, &r)
}

fn bi_degree_x(p: &BiPoly) -> usize {
    p.iter().map(RatPoly::deg).max().unwrap_or(0)
}

fn bi_eval_x(p: &BiPoly, x: &Rational) -> RatPoly {
    RatPoly::new(p.iter().map(|c| c.eval(x)).collect())
}

/// `Res_y(P, Q)` as a polynomial in `x`.
pub fn resultant_y(p: &BiPoly, q: &BiPoly) -> RatPoly {
    let dy_p = p.len().saturating_sub(1);
    let dy_q = q.len().saturating_sub(1);
    let bound = dy_p * bi_degree_x(q) + dy_q * bi_degree_x(p);
    let lc_p = p.last().cloned().unwrap_or_default();
    let lc_q = q.last().cloned().unwrap_or_default();
    let mut xs = Vec::with_capacity(bound + 1);
    let mut k = 0i64;
    while xs.len() <= bound {
        let x = int(k);
        if !lc_p.eval(&x).is_zero() && !lc_q.eval(&x).is_zero() {
            xs.push(x);
        }
        k += 1;
    }
    let ys: Vec<Rational> = xs.par_iter().map(|x| resultant(&bi_eval_x(p, x), &bi_eval_x(q, x))).collect();
    interpolate(&xs, &ys)
}

/// Newton interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> RatPoly {
    let n = xs.len();
    let mut coef = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut acc = RatPoly::zero();
    for i in (0..n).rev() {
        acc = &(&acc * &RatPoly::linear_root(&xs[i])) + &RatPoly::constant(coef[i].clone());
    }
    acc
}

fn binomial_row(k: usize) -> Vec<Rational> {
    let mut row = vec![Rational::one()];
    for i in 0..k {
        let next = &row[i] * int((k - i) as i64) / int((i + 1) as i64);
        row.push(next);
    }
    row
}

/// `p(x + s*y)` as a bivariate polynomial, `s = +-1`.
pub fn shift_bivariate(p: &RatPoly, s: i64) -> BiPoly {
    let d = p.deg();
    let mut out = vec![RatPoly::zero(); d + 1];
    for (k, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let row = binomial_row(k);
        for (j, b) in row.iter().enumerate() {
            // C(k, j) x^{k-j} (s y)^j
            let sign = if s < 0 && j % 2 == 1 { -Rational::one() } else { Rational::one() };
            let term = RatPoly::monomial(c * b * sign, k - j);
            out[j] = &out[j] + &term;
        }
    }
    out
}

/// `y^deg(p) * p(x / y)` as a bivariate polynomial.
pub fn homogenized_quotient(p: &RatPoly) -> BiPoly {
    let d = p.deg();
    let mut out = vec![RatPoly::zero(); d + 1];
    for (k, c) in p.coeffs().iter().enumerate() {
        out[d - k] = RatPoly::monomial(c.clone(), k);
    }
    out
}

/// `p(y)` viewed as bivariate with constant coefficients in `x`.
pub fn constant_in_x(p: &RatPoly) -> BiPoly {
    p.coeffs().iter().map(|c| RatPoly::constant(c.clone())).collect()
}

/// Polynomial whose roots are the sums `a + b` over roots `a` of `p`, `b` of `q`.
pub fn sum_polynomial(p: &RatPoly, q: &RatPoly) -> RatPoly {
    resultant_y(&constant_in_x(p), &shift_bivariate(q, -1))
}

/// Polynomial whose roots are the products `a * b` (requires `q(0) != 0`).
pub fn product_polynomial(p: &RatPoly, q: &RatPoly) -> RatPoly {
    resultant_y(&constant_in_x(p), &homogenized_quotient(q))
}

/// Polynomial whose roots are the differences `b - a` over roots of `p`.
pub fn difference_polynomial(p: &RatPoly) -> RatPoly {
    resultant_y(&constant_in_x(p), &shift_bivariate(p, 1))
}
