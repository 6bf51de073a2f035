//! Five squares in arithmetic progression over quadratic fields.
//!
//! A squarefree `D` admits a non-constant progression of five squares over
//! `Q(sqrt(D))` exactly when the genus-5 curve
//!
//! ```text
//! C_D : X0^2 - 2 X1^2 + X2^2 = 0,  X1^2 - 2 X2^2 + D X3^2 = 0,  X2^2 - 2 D X3^2 + X4^2 = 0
//! ```
//!
//! has a rational point. This crate decides that question for ranges of `D`
//! through a chain of certificates (local solubility, a Mordell-Weil sieve
//! through `y^2 = x(x+2)(x+6)`, a divisor-prime test and a ternary-form
//! rank-zero criterion) and generates the progressions that do exist.

pub mod arith;
pub mod ec;
mod error;
pub mod generator;
pub mod local;
pub mod mw;
pub mod pipeline;
pub mod quintic;
mod serde_dec;
pub mod ternary;

pub use error::{Error, Result};
