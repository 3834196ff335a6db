//! Built-in verification suite behind `fracmeas selftest`.
//!
//! The quick level runs every invariant family at reduced sample counts; the
//! full level adds the convergence experiments at production sizes.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use fracmeas_core::constants::{
    fractional_length_constant, gamma, limit_constant, unit_ball_geometry, vfbound_constant,
};
use fracmeas_core::geom::{parity_count, Disk, DomainBall, ManifoldShape, Parity, PointSet, SimplicialK, SphereK};
use fracmeas_core::identities::{adjointness_exhaustive, random_trial, TrialResiduals};
use fracmeas_core::mc::{
    mc_sphere_split, mc_stiefel_contraction, mc_w_integral, stream_rng, EstimatorConfig, SphereIntegrand,
};
use fracmeas_core::oracle1d::{finite_set_measure, pair_closed_form, single_closed_form};
use fracmeas_core::constants::w_measure;
use fracmeas_core::xalg::{Blade, MultiVector};

use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub level: Level,
    pub streams: u32,
    /// Relative perturbation applied to the limit constant before the
    /// consistency checks; non-zero only for the mutation fixture.
    pub limit_constant_perturbation: f64,
}

impl Options {
    pub fn new(level: Level) -> Self {
        Self {
            level,
            streams: 4,
            limit_constant_perturbation: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, name: impl Into<String>, result: Result<String, String>) {
        let (passed, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check { name: name.into(), passed, detail });
    }
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn core_err(e: fracmeas_core::Error) -> String {
    e.to_string()
}

pub fn run(opts: &Options, mut progress: impl FnMut(&Check)) -> Report {
    let mut report = Report::default();
    let full = opts.level == Level::Full;
    let mc = if full { 1_000_000 } else { 100_000 };
    let checks: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("xalg adjointness (n <= 6)", Box::new(xalg_adjointness)),
        ("xalg identities", Box::new(move || xalg_identities(if full { 10_000 } else { 300 }))),
        ("constants examples", Box::new(constants_examples)),
        ("constants consistency ratio", Box::new(move || constants_consistency(opts.limit_constant_perturbation))),
        ("geom parity examples", Box::new(geom_examples)),
        ("oracle1d closed forms", Box::new(oracle_closed_forms)),
        ("oracle1d non-additivity", Box::new(oracle_non_additivity)),
        ("mc W integral", Box::new(move || mc_w(mc))),
        ("mc Stiefel contraction", Box::new(move || mc_stiefel(mc))),
        ("mc sphere splitting", Box::new(move || mc_sphere(mc))),
        ("mc exact 1D values", Box::new(move || mc_one_dimensional(mc, opts.streams))),
    ];
    let mut run_one = |name: &str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let out = f().map(|d| format!("{d} [{:.1} s]", t.elapsed().as_secs_f64()));
        report.record(name, out);
        progress(report.checks.last().expect("just recorded"));
    };
    for (name, f) in &checks {
        run_one(name, f.as_ref());
    }
    if full {
        run_one("mc circle sigma sweep", &|| circle_sweep(10_000_000, opts.streams));
        run_one("mc sphere at sigma = 0.99", &|| sphere_limit(10_000_000, opts.streams));
    }
    report
}

fn xalg_adjointness() -> Outcome {
    let worst = (1..=6).map(adjointness_exhaustive).try_fold(0.0f64, |m, r| r.map(|v| m.max(v))).map_err(core_err)?;
    ensure(worst < 1e-15, format!("max violation {worst:e}"))
}

fn xalg_identities(trials: u32) -> Outcome {
    let mut rng = stream_rng(0x5e1f, 0);
    let mut worst = TrialResiduals::default();
    for n in 1..=8 {
        for k in 1..=n.min(4) {
            for _ in 0..trials {
                worst.max_with(&random_trial(n, k, &mut rng).map_err(core_err)?);
            }
        }
    }
    ensure(worst.max() < 1e-10, format!("{trials} trials per (n, k), max residual {:e}", worst.max()))
}

fn constants_examples() -> Outcome {
    let cases = [
        ("Gamma(1/2)", gamma(0.5).map_err(core_err)?, PI.sqrt()),
        ("Gamma(5)", gamma(5.0).map_err(core_err)?, 24.0),
        ("omega_2", unit_ball_geometry(3).map_err(core_err)?.1, 4.0 * PI),
        ("W(2,1)", w_measure(2, 1).map_err(core_err)?, 4.0 * SQRT_2 * PI),
        ("vfbound(1,0)", vfbound_constant(1, 0).map_err(core_err)?, 4.0),
        ("vfbound(2,1)", vfbound_constant(2, 1).map_err(core_err)?, 8.0 * SQRT_2),
        ("limit(1,0)", limit_constant(1, 0).map_err(core_err)?, 4.0),
        ("limit(2,1)", limit_constant(2, 1).map_err(core_err)?, 8.0),
        ("limit(3,1)", limit_constant(3, 1).map_err(core_err)?, 2.0 * PI * PI),
        ("limit(3,2)", limit_constant(3, 2).map_err(core_err)?, 4.0 * PI),
    ];
    for (name, got, want) in cases {
        if rel(got, want) > 1e-13 {
            return Err(format!("{name} = {got} but expected {want}"));
        }
    }
    Ok(format!("{} closed-form values", cases.len()))
}

fn constants_consistency(perturbation: f64) -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        for k in 0..n {
            let limit = limit_constant(n, k).map_err(core_err)? * (1.0 + perturbation);
            let expected = 2f64.powf(-(k as f64) / 2.0) * vfbound_constant(n, k).map_err(core_err)? / (n - k) as f64;
            worst = worst.max(rel(limit, expected));
            if k == 1 {
                worst = worst.max(rel(limit, fractional_length_constant(n).map_err(core_err)?));
            }
        }
    }
    ensure(worst < 1e-12, format!("max relative deviation {worst:e} over 0 <= k < n <= 8"))
}

fn geom_examples() -> Outcome {
    let e = |i: usize, n: usize| {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    };
    let pair = ManifoldShape::PointSet(PointSet::new(1, vec![vec![-1.0], vec![1.0]]).map_err(core_err)?);
    let scalar = Blade::scalar(1, true).map_err(core_err)?;
    let r = parity_count(&pair, &Disk::new(vec![0.0], scalar, 1.5).map_err(core_err)?).map_err(core_err)?;
    if (r.count, r.parity, r.degeneracy) != (2, Parity::Even, None) {
        return Err(format!("point pair: {r:?}"));
    }
    let circle = ManifoldShape::Sphere(SphereK::unit(2).map_err(core_err)?);
    let across = Blade::from_orthonormal(2, vec![e(1, 2)]).map_err(core_err)?;
    let r = parity_count(&circle, &Disk::new(vec![0.0, 0.0], across.clone(), 3.0).map_err(core_err)?).map_err(core_err)?;
    if (r.count, r.parity, r.degeneracy) != (2, Parity::Even, None) {
        return Err(format!("circle, long chord: {r:?}"));
    }
    let r = parity_count(&circle, &Disk::new(vec![0.0, 0.0], across, 1.0).map_err(core_err)?).map_err(core_err)?;
    if r.count != 0 || !r.is_degenerate() {
        return Err(format!("circle, rim contact: {r:?}"));
    }
    let segment = ManifoldShape::Simplicial(
        SimplicialK::new(2, 1, vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![vec![0, 1]]).map_err(core_err)?,
    );
    let vertical = Blade::from_orthonormal(2, vec![e(0, 2)]).map_err(core_err)?;
    let r = parity_count(&segment, &Disk::new(vec![0.5, -0.5], vertical, 1.0).map_err(core_err)?).map_err(core_err)?;
    if (r.count, r.parity, r.degeneracy) != (1, Parity::Odd, None) {
        return Err(format!("segment: {r:?}"));
    }
    let h = segment.hausdorff_k();
    ensure((h - 1.0).abs() < 1e-14 && (circle.hausdorff_k() - 2.0 * PI).abs() < 1e-14, "4 parity configurations, 2 measures".into())
}

fn oracle_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for sigma in [0.3, 0.5, 0.7] {
        let pair = finite_set_measure(&[-1.0, 1.0], 0.0, 2.0, sigma).map_err(core_err)?;
        let right = finite_set_measure(&[1.0], 0.0, 2.0, sigma).map_err(core_err)?;
        worst = worst.max((pair - pair_closed_form(sigma).map_err(core_err)?).abs());
        worst = worst.max((right - single_closed_form(sigma).map_err(core_err)?).abs());
    }
    ensure(worst < 1e-6, format!("quadrature vs closed forms, max abs error {worst:e}"))
}

fn oracle_non_additivity() -> Outcome {
    let mut smallest = f64::INFINITY;
    for i in 1..=9 {
        let sigma = i as f64 / 10.0;
        let gap = 2.0 * single_closed_form(sigma).map_err(core_err)? - pair_closed_form(sigma).map_err(core_err)?;
        smallest = smallest.min(gap);
    }
    ensure(smallest > 0.0, format!("smallest gap {smallest:.6} on sigma = 0.1..0.9"))
}

fn mc_w(samples: u64) -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, k) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
        let frame: Vec<Vec<f64>> = (0..k).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let nu = Blade::from_orthonormal(n, frame).map_err(core_err)?;
        let est = mc_w_integral(n, k, &nu, samples, 17).map_err(core_err)?.scaled(w_measure(n, k).map_err(core_err)?);
        worst = worst.max(est.zscore_against(vfbound_constant(n, k).map_err(core_err)?).abs());
    }
    ensure(worst < 3.0, format!("max |z| {worst:.2} over 4 (n, k), {samples} samples"))
}

fn mc_stiefel(samples: u64) -> Outcome {
    let mu = MultiVector::from_coeffs(3, 2, vec![0.7, -1.2, 0.4]).map_err(core_err)?;
    let check = mc_stiefel_contraction(3, 2, 1, &mu, samples, 23).map_err(core_err)?;
    let zero = MultiVector::zero(4, 2).map_err(core_err)?;
    let null = mc_stiefel_contraction(4, 2, 1, &zero, 1_000, 23).map_err(core_err)?;
    if null.lhs.mean != 0.0 || null.rhs.mean != 0.0 {
        return Err("mu = 0 gave a non-zero integral".into());
    }
    ensure(check.zscore.abs() < 3.0, format!("(q, k, p) = (3, 2, 1): z = {:.2}", check.zscore))
}

fn mc_sphere(samples: u64) -> Outcome {
    let mut worst: f64 = 0.0;
    for (d, l, g) in [(3, 1, SphereIntegrand::One), (4, 2, SphereIntegrand::AbsFirst), (4, 2, SphereIntegrand::FirstSquared)] {
        let s = mc_sphere_split(d, l, g, samples, 29).map_err(core_err)?;
        worst = worst.max(s.zscore.abs()).max(s.iterated.zscore_against(s.exact).abs());
    }
    ensure(worst < 3.0, format!("max |z| {worst:.2} over 3 integrands"))
}

fn one_d(points: &[f64]) -> Result<ManifoldShape, String> {
    Ok(ManifoldShape::PointSet(
        PointSet::new(1, points.iter().map(|x| vec![*x]).collect()).map_err(core_err)?,
    ))
}

fn mc_one_dimensional(samples: u64, streams: u32) -> Outcome {
    let omega = DomainBall::new(vec![0.0], 2.0).map_err(core_err)?;
    let mut worst_z: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for sigma in [0.3, 0.5, 0.7] {
        for (points, exact) in [
            (&[-1.0, 1.0][..], pair_closed_form(sigma).map_err(core_err)?),
            (&[1.0][..], single_closed_form(sigma).map_err(core_err)?),
        ] {
            let cfg = EstimatorConfig::new(sigma, samples, 31).with_streams(streams);
            let est = parallel::estimate(&one_d(points)?, &omega, &cfg).map_err(core_err)?;
            worst_z = worst_z.max(((est.mean - exact) / est.stderr).abs());
            worst_rel = worst_rel.max(rel(est.mean, exact));
        }
    }
    let tol = if samples >= 1_000_000 { 0.02 } else { 0.05 };
    ensure(worst_z < 3.0 && worst_rel < tol, format!("max |z| {worst_z:.2}, max relative error {worst_rel:.4}"))
}

fn circle_sweep(samples: u64, streams: u32) -> Outcome {
    let shape = ManifoldShape::Sphere(SphereK::unit(2).map_err(core_err)?);
    let omega = DomainBall::new(vec![0.0, 0.0], 3.0).map_err(core_err)?;
    let cfg = EstimatorConfig::new(0.5, samples, 37).with_streams(streams);
    let rows = parallel::converge(&shape, &omega, &[0.5, 0.9, 0.99], &cfg).map_err(core_err)?;
    let errs: Vec<f64> = rows.iter().map(|r| r.relative_error().unwrap_or(f64::INFINITY)).collect();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    ensure(decreasing && errs[2] < 0.1, format!("relative errors {errs:.4?}"))
}

fn sphere_limit(samples: u64, streams: u32) -> Outcome {
    let shape = ManifoldShape::Sphere(SphereK::unit(3).map_err(core_err)?);
    let omega = DomainBall::new(vec![0.0; 3], 3.0).map_err(core_err)?;
    let cfg = EstimatorConfig::new(0.99, samples, 41).with_streams(streams);
    let est = parallel::estimate(&shape, &omega, &cfg).map_err(core_err)?;
    let err = est.relative_error().unwrap_or(f64::INFINITY);
    ensure(err < 0.1, format!("relative error {err:.4}"))
}
