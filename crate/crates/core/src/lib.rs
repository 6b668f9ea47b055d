//! Finite-alphabet toolkit for two-user interference channels whose receivers
//! hold side information correlated with the sources.
//!
//! The crate is organised bottom-up:
//!
//! - [`prob`]: joint and conditional PMFs, entropies in bits, and assembly of
//!   the factored joints that the rate conditions are evaluated on.
//! - [`polytope`]: linear inequality systems over named rates, Fourier–Motzkin
//!   elimination and low-dimensional vertex enumeration.
//! - [`regions`]: margins of the sufficient and necessary conditions, Z-channel
//!   checks and rate regions as inequality systems.
//! - [`search`]: random-restart hill climbing over auxiliary distributions.
//! - [`sim`]: Monte Carlo runs of the superposition scheme and of a
//!   Slepian–Wolf separation pipeline.
//! - [`fixtures`]: ready-made channels and sources.

pub mod error;
pub mod fixtures;
pub mod polytope;
pub mod prob;
pub mod regions;
pub mod rng;
pub mod search;
pub mod simplex;
pub mod sim;

pub use error::{Error, Result};
