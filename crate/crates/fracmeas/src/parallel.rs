//! Multi-threaded drivers for the core estimator.
//!
//! Streams run on the rayon pool and their summaries are merged in stream
//! order, so the output is bit-identical to the sequential
//! [`fracmeas_core::mc::estimate_measure`] for the same configuration.

use fracmeas_core::geom::{DomainBall, ManifoldShape};
use fracmeas_core::mc::{validate_sweep, EstimateResult, Estimator, EstimatorConfig};
use fracmeas_core::Result;
use rayon::prelude::*;

pub fn run(estimator: &Estimator<'_>) -> Result<EstimateResult> {
    let summaries = (0..estimator.config().streams)
        .into_par_iter()
        .map(|s| estimator.run_stream(s))
        .collect::<Result<Vec<_>>>()?;
    estimator.finish(summaries)
}

pub fn estimate(shape: &ManifoldShape, omega: &DomainBall, cfg: &EstimatorConfig) -> Result<EstimateResult> {
    run(&Estimator::new(shape, omega, cfg)?)
}

/// Parallel counterpart of [`fracmeas_core::mc::converge_sweep`].
pub fn converge(
    shape: &ManifoldShape,
    omega: &DomainBall,
    sigmas: &[f64],
    cfg: &EstimatorConfig,
) -> Result<Vec<EstimateResult>> {
    validate_sweep(sigmas)?;
    sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            let c = EstimatorConfig { sigma, ..cfg.clone() };
            run(&Estimator::for_sweep(shape, omega, &c, i as u32)?)
        })
        .collect()
}
