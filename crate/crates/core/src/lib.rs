//! Core library for numerical and exact verification of closed G₂-structures.
//!
//! The crate is split along the natural layers of the problem:
//!
//! * [`g2_core`] — the ε-symbol tables, the standard 3-form and 4-form, and a
//!   generic exterior-algebra kernel (wedge, Hodge star, norms) over a
//!   7-dimensional orthonormal coframe.
//! * [`rep_theory`] — G₂-irreducible projections of forms and matrices, the
//!   𝔤₂ Lie algebra, the ∇T decomposition, the curvature-ansatz builder and
//!   the adjoint-orbit normal form.
//! * [`coframe_models`] — the five built-in invariant-coframe models together
//!   with the algebraic exterior-derivative engine on ℝ×G.
//! * [`torsion_curvature`] — torsion extraction, the Levi-Civita solve in the
//!   anholonomic full basis, Riemann/Scal/Ric⁰/Weyl and all residual suites.
//! * [`closure_checker`] — exact polynomial exterior calculus on the abstract
//!   21-dimensional coframe bundle, including the (λ,μ) consistency solve.
//!
//! The crate is `no_std` (with `alloc`); all floating point transcendentals
//! go through `libm`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod closure_checker;
pub mod coeff;
pub mod coframe_models;
pub mod error;
pub mod exact;
pub mod form;
pub mod g2_core;
pub mod jet;
pub mod linsolve;
pub mod rep_theory;
pub mod torsion_curvature;

/// Exact rational scalar used wherever integer/rational arithmetic is required.
pub type Rat = num_rational::BigRational;

pub use error::{Error, Result};

/// Build a rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

/// Build a rational from an integer.
pub fn rat_i(num: i64) -> Rat {
    Rat::from_integer(num.into())
}
