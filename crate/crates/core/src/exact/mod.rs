//! Exact arithmetic substrate: rational matrices, integer and rational
//! polynomials, factorization over the rationals, and truncated q-series.

pub mod decimal;
pub mod factor;
pub mod matrix;
pub mod modp;
pub mod poly;
pub mod series;

pub use factor::{factor_int, factor_over_rationals, squarefree_decomposition};
pub use matrix::{RationalMatrix, SparseMatrix, Subspace};
pub use poly::{IntPoly, RatPoly};
pub use series::QSeries;

use num_bigint::BigInt;
use num_rational::BigRational;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
