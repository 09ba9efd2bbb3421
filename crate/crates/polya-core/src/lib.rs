//! Return probabilities of the simple symmetric random walk on `Z^d`.
//!
//! A walker on the hypercubic lattice `Z^d` steps to one of its `2d` nearest
//! neighbours with equal probability. For `d >= 3` the walk is transient: the
//! probability `p(d)` of ever returning to the origin is strictly less than
//! one (Pólya 1921). Writing `u(d)` for the expected number of visits to the
//! origin (the origin Green function), the two are related by
//!
//! ```text
//! p(d) = 1 - 1 / u(d).
//! ```
//!
//! This crate evaluates `u(d)` and `p(d)` through several mutually
//! independent routes so that each result can be cross-checked:
//!
//! * [`series::u_series`] — a single-index hypergeometric series obtained by
//!   collapsing the lattice Green function over total degree, with a fitted
//!   power-law tail summed by Hurwitz zeta functions,
//! * [`series::lauricella_fc`] — direct multi-index summation of the
//!   Lauricella `F_C` hypergeometric function, of which `u(d)` is a special
//!   value,
//! * [`quad::u_quadrature`] — adaptive Gauss–Legendre quadrature of the
//!   Bessel-integral representation `u(d) = ∫ [e^{-x/d} I_0(x/d)]^d dx`,
//! * [`quad::lattice_green_integral`] — quasi-Monte Carlo evaluation of the
//!   momentum-space Green integral of Watson (1939) and
//!   Glasser & Zucker (1977),
//! * [`specfun::gamma_product_u3`] — the Glasser–Zucker closed form for
//!   `d = 3` as a product of gamma functions,
//! * [`walk::estimate_return`] — direct simulation of the walk itself.
//!
//! The [`laplace`] module provides the Laplace-transform identity for
//! products of modified Bessel functions that connects the integral and
//! series representations, together with a randomized self-check
//! ([`laplace::verify_lemma1`]) that evaluates both sides independently.
//!
//! The crate is `no_std`-compatible (requiring `alloc`); the default `std`
//! feature enables multi-threaded walk simulation and `std::error::Error`
//! impls.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod error;
pub mod laplace;
mod math;
pub mod quad;
mod rng;
pub mod series;
pub mod specfun;
mod util;
pub mod walk;

pub use error::{Error, Result};
pub use laplace::{laplace_lhs, laplace_rhs, verify_lemma1, LaplaceSpec, Lemma1Report};
pub use quad::{
    lattice_green_integral, u_quadrature, LatticeEstimate, LatticeIntegralConfig,
    QuadratureConfig, QuadratureResult,
};
pub use series::{
    lauricella_fc, return_probability, u_series, FcEval, LauricellaParams, Method,
    ReturnProbability, SeriesConfig, UValue,
};
pub use walk::{estimate_return, WalkConfig, WalkEstimate};
