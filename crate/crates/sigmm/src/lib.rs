//! MM algorithms for geometric and signomial programming.
//!
//! A signomial is a finite sum of monomial terms `c * x1^a1 ... xn^an` over
//! the open positive orthant, with real exponents and coefficients of either
//! sign. This crate minimizes signomials (and log compositions of
//! posynomials) by the majorize-minimize principle: positive-coefficient
//! terms are majorized through the arithmetic-geometric mean inequality and
//! negative-coefficient terms through a supporting-hyperplane bound, giving a
//! surrogate with all variables separated. Each iteration then reduces to
//! independent one-dimensional minimizations, solved by safeguarded Newton in
//! the log domain.
//!
//! On top of the unconstrained driver sit:
//!
//! - a quadratic-penalty solver for signomial equality and inequality
//!   constraints ([`penalty`]),
//! - closed-form multiplicative updates for quadratic programming over the
//!   positive orthant ([`nnqp`]),
//! - optional quasi-Newton (secant) acceleration of any of the fixed-point
//!   iterations ([`driver::accelerate`]),
//! - executable diagnostics for coercivity, strict convexity, and attainment
//!   of the infimum ([`diagnostics`]),
//! - brute-force and closed-form oracles used by the test suite and the
//!   `verify` command ([`oracle`], [`verify`]).
//!
//! The bundled example problems live in [`problems`].
//!
//! # Example
//!
//! ```
//! use sigmm::{CompositeObjective, PositivePoint, Signomial, SolverConfig};
//!
//! # fn main() -> sigmm::Result<()> {
//! // minimize x1^-3 + 3 x1^-1 x2^-2 + x1 x2 from (1, 2)
//! let f = Signomial::from_terms(
//!     2,
//!     &[(1.0, &[-3.0, 0.0]), (3.0, &[-1.0, -2.0]), (1.0, &[1.0, 1.0])],
//! )?;
//! let trace = sigmm::solve(
//!     &CompositeObjective::plain(f),
//!     &PositivePoint::new(vec![1.0, 2.0])?,
//!     &SolverConfig::default(),
//! )?;
//! assert!((trace.final_objective() - 3.4128).abs() < 1e-3);
//! # Ok(()) }
//! ```

// Validation uses `!(v > 0.0)`-style comparisons deliberately: they are
// true for NaN, which must be rejected alongside nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod driver;
mod error;
pub mod nnqp;
pub mod oracle;
pub mod penalty;
pub mod problems;
mod signomial;
mod simplex;
pub mod surrogate;
pub mod verify;

pub use driver::{
    accelerate, solve, IterationRecord, IterationTrace, Outcome, SolverConfig, StepKind,
};
pub use error::{Error, Result};
pub use signomial::{CompositeObjective, Evaluation, PositivePoint, Signomial, Term};
pub use surrogate::{majorize, minimize_coordinate, InnerSolveOptions};

// Re-exported so downstream users can build [`nnqp::QpProblem`] matrices
// against the same version.
pub use nalgebra;
