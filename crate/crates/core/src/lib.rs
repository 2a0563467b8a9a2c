//! Numerical laboratory for impedance boundary conditions (IBCs) on the
//! first-order wave equation.
//!
//! The crate covers four families of positive-real impedance kernels
//! (proportional/delay, standard diffusive, extended diffusive, derivative),
//! their time-domain realizations, a 1D energy-stable coupled solver, a
//! Laplace-domain solvability lab and a spectral check of the semi-discrete
//! generator.
//!
//! ```text
//!   kernels ── measures ── realizations ── wavesim
//!      │                                     │
//!      └──── resolvent        spectrum ──────┘
//!                    config / report (CLI glue)
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod config;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod measures;
pub mod realizations;
pub mod report;
pub mod resolvent;
pub mod spectrum;
pub mod wavesim;

pub use error::{Error, Result};
pub use num_complex::Complex64;
