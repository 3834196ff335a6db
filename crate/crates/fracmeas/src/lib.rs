//! Standard-library companion to `fracmeas-core`: a rayon driver for the
//! estimator, JSON manifold files, CSV output with run manifests, the
//! self-test suite and the `fracmeas` command line.

pub mod cli;
pub mod domain;
pub mod error;
pub mod manifold;
pub mod parallel;
pub mod report;
pub mod selftest;

pub use error::CliError;
