//! Exact arithmetic: rationals, polynomials, real algebraic numbers,
//! certified intervals and linear algebra over Q.

pub mod algebraic;
pub mod creal;
pub mod factor;
pub mod interval;
pub mod linalg;
pub mod mpoly;
pub mod poly;
pub mod rational;
pub mod resultant;
pub mod sturm;

pub use algebraic::{complex_roots_upper, AlgebraicReal, ComplexAlgebraic};
pub use creal::{CComplex, CReal};
pub use factor::{factor_over_q, Factorization};
pub use interval::{ComplexInterval, F64Interval, RatInterval};
pub use mpoly::MPoly;
pub use poly::RatPoly;
pub use rational::Rational;
pub use sturm::{isolate_real_roots, SturmSequence};
