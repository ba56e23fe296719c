//! Numerics for matrix-polynomial Lax flows and their linearization on
//! generalized Jacobians, specialized to the complexified spherical pendulum.
//!
//! The crate is organized around the chain
//!
//! ```text
//! pendulum state --(Cushman map + complex variables)--> 2x2 Lax matrix A(lambda)
//!              --(characteristic polynomial)--> quartic curve mu^2 = F(lambda)
//!              --(period integrals)--> rank-3 extended lattice in C^2
//!              --(eigenvector divisor + Abel map)--> straight lines on C^2/Lattice
//! ```
//!
//! with numerical continuation of the period lattice over the (h, k)-plane
//! (Picard-Lefschetz monodromy) and the frequency map of the real flows on top.
//!
//! * [`matpoly`]: complex matrix polynomials, spectral data, Lax vector fields.
//! * [`pendulum`]: the constrained pendulum, its integrals and Lax pair.
//! * [`flows`]: adaptive Runge-Kutta integration of both flows, drift diagnostics.
//! * [`curves`]: the quartic spectral curve, period integrals, Abel maps.
//! * [`jacobian`]: lattice-quotient arithmetic, flow fits, equivariance checks.
//! * [`monodromy`]: discriminant locus, period continuation, frequency map.
//! * [`selftest`]: the acceptance checks wired up as callable reports.

pub mod curves;
pub mod error;
pub mod flows;
pub mod io;
pub mod jacobian;
pub mod matpoly;
pub mod monodromy;
pub mod pendulum;
pub mod poly;
pub mod selftest;

mod eig;
mod rk;

pub use error::{Error, Result};
pub use poly::Poly;

/// Shorthand complex constructor used throughout.
pub fn c64(re: f64, im: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(re, im)
}
