//! Desk-scale dilations of Markov semigroups of Fourier multipliers on
//! finite groups.
//!
//! The pipeline runs a conditionally negative type function `psi` through
//! its 1-cocycle `(H, pi, b)`, models the crossed product
//! `L^inf(Omega) x| G` by integrands over `G` valued in finite sums of
//! Gaussian exponentials, and checks `T_t = E U_t J` together with every side
//! identity of the construction. The [`hcalc`] module covers the sectorial
//! functional calculus of the generator `A lambda_s = psi(s) lambda_s`.

pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod cocycle;
pub mod config;
pub mod crossed;
pub mod dilation;
pub mod error;
pub mod gauss;
pub mod group;
pub mod hcalc;
mod linalg;
pub mod symbols;

pub use algebra::GroupAlgebraElement;
pub use cocycle::Cocycle;
pub use crossed::{Convention, CrossedElement};
pub use error::{Error, Result};
pub use gauss::{GaussExp, GaussianSampler};
pub use group::FiniteGroup;
pub use symbols::SymbolFunction;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
