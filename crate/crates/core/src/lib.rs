//! Bound-state spectra of the short-range potential
//! `V(r) = V0 (exp(-λr) - γ) / (exp(λr) - 1)`.
//!
//! Two independent engines are provided:
//!
//! * [`aim`]: the asymptotic iteration method on truncated Taylor series in
//!   extended precision ([`series`]), S-wave only.
//! * [`hdm`]: diagonalization of the Hamiltonian in the Laguerre (J-matrix)
//!   basis, where the `1/r` part is handled exactly by the tridiagonal Coulomb
//!   reference Hamiltonian and the regular remainder by Gauss quadrature.
//!
//! [`golden`] carries the published reference spectra used for regression.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aim;
pub mod error;
pub mod golden;
pub mod hdm;
pub mod linalg;
pub mod potential;
pub mod series;

pub use error::{Error, Result};
pub use potential::PotentialParams;
pub use series::{Precision, TaylorSeries};
