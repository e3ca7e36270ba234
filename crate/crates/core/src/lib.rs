//! Pfaffian formulas for generalized β=1 and β=4 matrix models and BCD-quiver
//! matrix chains, with brute-force integration oracles.

pub mod chain;
pub mod error;
pub mod hilbert;
pub mod kernel;
pub mod matrix;
pub mod oracle;
pub mod measure;
pub mod models;
pub mod pfaffian;
pub mod partitions;
pub mod poly;
pub mod quiver;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, Pivoting, SkewMatrix};
pub use scalar::{int, rat, Field, Rational, Scalar};
