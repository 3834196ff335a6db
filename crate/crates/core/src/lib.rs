//! Fractional k-dimensional measures of manifolds in `R^n`.
//!
//! The crate is `no_std` (with `alloc`) and contains the numerical core:
//!
//! * [`xalg`]: dense exterior algebra over `R^n` (k-vectors, wedge and
//!   interior products, unit blades, push-forward by linear maps);
//! * [`constants`]: gamma/beta functions and the closed-form constants
//!   (ball and sphere measures, SO(n) and Stiefel measures, the integral of
//!   `|nu . omega|` over the incidence space `W` and the limit constant);
//! * [`geom`]: disks, ball domains and manifold shapes with intersection
//!   parity queries, Hausdorff measures, volume forms and uniform sampling;
//! * [`mc`]: the Monte-Carlo estimator of `Meas^k_sigma(M, Omega)` and the
//!   Monte-Carlo harnesses for the integral identities it relies on;
//! * [`identities`]: residuals of the exterior-algebra identities, shared by
//!   the property tests and the self-test;
//! * [`oracle1d`]: exact values in dimension one (closed forms and a
//!   deterministic quadrature for arbitrary finite point sets).
//!
//! Parallel drivers, file formats and the command line live in the
//! `fracmeas` companion crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod constants;
pub mod error;
pub mod geom;
pub mod identities;
pub(crate) mod linalg;
pub(crate) mod math;
pub mod mc;
pub mod oracle1d;
pub mod xalg;

pub use error::{Error, Result};

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
