//! Dense exact linear algebra over Q and over real algebraic numbers.

use num_traits::{One, Zero};

use super::algebraic::AlgebraicReal;
use super::mpoly::MPoly;
use super::poly::RatPoly;
use super::rational::Rational;

pub type QMatrix = Vec<Vec<Rational>>;

/// Minimal field interface for Gaussian elimination.
pub trait ExactField: Clone {
    fn field_zero() -> Self;
    fn field_one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self {
        Self::field_zero().sub(self)
    }
}

impl ExactField for Rational {
    fn field_zero() -> Self {
        Zero::zero()
    }
    fn field_one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl ExactField for AlgebraicReal {
    fn field_zero() -> Self {
        AlgebraicReal::zero()
    }
    fn field_one() -> Self {
        AlgebraicReal::from_int(1)
    }
    fn is_zero(&self) -> bool {
        AlgebraicReal::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        AlgebraicReal::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        AlgebraicReal::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        AlgebraicReal::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        AlgebraicReal::div(self, o).expect("division by zero")
    }
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<T: ExactField>(m: &mut [Vec<T>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = T::field_one().div(&m[r][c]);
        for j in c..cols {
            m[r][j] = m[r][j].mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let v = m[r][j].mul(&f);
                    m[i][j] = m[i][j].sub(&v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right kernel `{v : m v = 0}`.
pub fn kernel<T: ExactField>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::field_zero(); cols];
            v[f] = T::field_one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = a[r][f].neg();
            }
            v
        })
        .collect()
}

pub fn rank<T: ExactField>(m: &[Vec<T>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Determinant by Gaussian elimination.
pub fn det<T: ExactField>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = T::field_one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return T::field_zero();
        };
        if p != c {
            a.swap(p, c);
            d = d.neg();
        }
        d = d.mul(&a[c][c]);
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].div(&a[c][c]);
            for j in c..n {
                let v = a[c][j].mul(&f);
                a[i][j] = a[i][j].sub(&v);
            }
        }
    }
    d
}

/// Inverse, `None` when singular.
pub fn inverse<T: ExactField>(m: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { T::field_one() } else { T::field_zero() }));
            r
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(Rational::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &QMatrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_add(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn mat_scale(a: &QMatrix, c: &Rational) -> QMatrix {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn is_integer_matrix(a: &QMatrix) -> bool {
    a.iter().flatten().all(|x| x.is_integer())
}

pub fn from_ints(rows: &[&[i64]]) -> QMatrix {
    rows.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect()).collect()
}

/// Row-major flattening, used for span computations over matrices.
pub fn flatten(a: &QMatrix) -> Vec<Rational> {
    a.iter().flatten().cloned().collect()
}

pub fn unflatten(v: &[Rational], n: usize) -> QMatrix {
    v.chunks(n).map(|c| c.to_vec()).collect()
}

/// Characteristic polynomial `det(x I - a)`.
pub fn charpoly(a: &QMatrix) -> RatPoly {
    let n = a.len();
    let m: Vec<Vec<MPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut e = MPoly::constant(1, -a[i][j].clone());
                    if i == j {
                        e = e.add(&MPoly::var(1, 0));
                    }
                    e
                })
                .collect()
        })
        .collect();
    let d = MPoly::det(&m, 1);
    let mut coeffs = vec![Rational::zero(); n + 1];
    for (e, c) in d.terms() {
        coeffs[e[0] as usize] = c.clone();
    }
    RatPoly::new(coeffs)
}

/// Monic minimal polynomial of a square matrix, from the first linear
/// dependence among its powers.
pub fn matrix_minpoly(a: &QMatrix) -> RatPoly {
    let n = a.len();
    let mut powers: Vec<Vec<Rational>> = vec![flatten(&identity(n))];
    let mut cur = identity(n);
    loop {
        cur = mat_mul(&cur, a);
        let v = flatten(&cur);
        // solve sum_k c_k powers[k] = v
        let k = powers.len();
        let mut sys: Vec<Vec<Rational>> = (0..n * n)
            .map(|r| {
                let mut row: Vec<Rational> = powers.iter().map(|p| p[r].clone()).collect();
                row.push(v[r].clone());
                row
            })
            .collect();
        let piv = rref(&mut sys);
        if !piv.contains(&k) {
            let mut coeffs = vec![Rational::zero(); k + 1];
            for (r, &pc) in piv.iter().enumerate() {
                coeffs[pc] = -sys[r][k].clone();
            }
            coeffs[k] = Rational::one();
            return RatPoly::new(coeffs);
        }
        powers.push(v);
    }
}

/// `f64` matrix helpers used by the lattice and torus code.
pub mod float {
    pub type FMatrix = Vec<Vec<f64>>;

    pub fn identity(n: usize) -> FMatrix {
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
    }

    pub fn mul(a: &FMatrix, b: &FMatrix) -> FMatrix {
        let k = b.len();
        let m = b.first().map_or(0, Vec::len);
        a.iter().map(|r| (0..m).map(|j| (0..k).map(|l| r[l] * b[l][j]).sum()).collect()).collect()
    }

    pub fn mat_vec(a: &FMatrix, v: &[f64]) -> Vec<f64> {
        a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
    }

    /// Determinant by partial pivoting.
    pub fn det(a: &FMatrix) -> f64 {
        let n = a.len();
        let mut m = a.clone();
        let mut d = 1.0;
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
            if m[p][c] == 0.0 {
                return 0.0;
            }
            if p != c {
                m.swap(p, c);
                d = -d;
            }
            d *= m[c][c];
            for i in c + 1..n {
                let f = m[i][c] / m[c][c];
                for j in c..n {
                    m[i][j] -= f * m[c][j];
                }
            }
        }
        d
    }

    /// Inverse by Gauss-Jordan with partial pivoting.
    pub fn inverse(a: &FMatrix) -> Option<FMatrix> {
        let n = a.len();
        let mut m: FMatrix = a
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
            if m[p][c].abs() < 1e-300 {
                return None;
            }
            m.swap(p, c);
            let piv = m[c][c];
            for v in m[c].iter_mut() {
                *v /= piv;
            }
            for i in 0..n {
                if i != c {
                    let f = m[i][c];
                    if f != 0.0 {
                        for j in 0..2 * n {
                            m[i][j] -= f * m[c][j];
                        }
                    }
                }
            }
        }
        Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    /// Operator 2-norm upper bound (Frobenius).
    pub fn frobenius(a: &FMatrix) -> f64 {
        a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest singular value by power iteration on `A^T A`.
    pub fn op_norm(a: &FMatrix) -> f64 {
        let n = a.first().map_or(0, Vec::len);
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut s = 0.0;
        for _ in 0..200 {
            let av = mat_vec(a, &v);
            let mut w = vec![0.0; n];
            for (i, row) in a.iter().enumerate() {
                for j in 0..n {
                    w[j] += row[j] * av[i];
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v = w.iter().map(|x| x / norm).collect();
            s = norm.sqrt();
        }
        s
    }
}
