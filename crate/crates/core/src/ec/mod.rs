//! Elliptic curves `y^2 = x^3 + a2 x^2 + a4 x + a6` over `Q` and `F_p`.

mod fp;
mod rational;

pub use fp::{FpCurve, FpPoint};
pub use rational::{e1, generator_point, reduce_rational, sieve_base_point, torsion_basis, QCurve, QPoint};
