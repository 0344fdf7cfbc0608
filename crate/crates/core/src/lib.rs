//! Compound-Poisson subordinators built on the lower incomplete gamma
//! function, with the special functions, fractional operators and Monte
//! Carlo machinery needed to check their closed-form properties.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: gamma/incomplete-gamma/beta, Kummer ₁F₁, Prabhakar
//!   Mittag-Leffler, adaptive Gauss–Kronrod quadrature.
//! - [`rng`] and [`stats`]: reproducible random streams and Monte Carlo
//!   reductions.
//! - [`subordinator`]: the plain, tempered and ε-floored families, exact
//!   samplers, and the two-dimensional ε-family.
//! - [`operators`]: fractional operators evaluated by quadrature.
//! - [`subordination`]: time change of Lévy processes, with Brownian motion
//!   worked out in detail.
//! - [`fbm`]: fractional Brownian motion and its time change.

pub mod error;
pub mod fbm;
pub mod operators;
pub mod rng;
pub mod specfun;
pub mod stats;
pub mod subordination;
pub mod subordinator;
pub mod sum;

pub use error::{Error, Result};
