//! Numerics for variable-exponent Lebesgue and Sobolev spaces and for the
//! quasilinear problem
//!
//! ```text
//! -div(|∇u|^{p(x)-2} ∇u) + |∇u|^{q(x)} = λ g(x) u^{η(x)} + f(x)   in Ω,
//!                                     u = 0                      on ∂Ω,
//! ```
//!
//! solved by truncation of the data and zero-order term together with a
//! bounded regularization of the gradient term.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `varexp` crate.
//!
//! Layout:
//!
//! * [`exponent`]: exponent fields `p`, `q`, `η`, their derived exponents and
//!   admissibility checks.
//! * [`grid`]: P1 grids on boxes in 1D/2D, grid functions and quadrature.
//! * [`modular`]: modulars, Luxemburg norms, the classical inequalities of
//!   the variable-exponent theory and Rayleigh-quotient constant estimates.
//! * [`toolkit`]: truncations, test maps, the Young-type constant, the
//!   regularized Hamiltonian and the monotonicity inequalities for vectors.
//! * [`solver`]: assembly, damped Newton, comparison barrier, the outer
//!   truncation scheme and its diagnostics.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod banded;
mod error;
pub mod exponent;
pub mod expr;
pub mod grid;
pub(crate) mod math;
pub mod modular;
pub mod report;
pub mod solver;
pub mod toolkit;

pub use error::{Error, Result};
pub use exponent::{DomainDescriptor, ExponentField, ExponentTriple, Point, Variant};
pub use grid::{Grid, GridFunction, QuadratureRule};
pub use report::{Check, ValidationReport};
