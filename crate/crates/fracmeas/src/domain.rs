use fracmeas_core::geom::DomainBall;

use crate::error::CliError;

/// Parses `"c1,...,cn;R"` into the open ball of radius `R` about `c`.
pub fn parse_omega(spec: &str) -> Result<DomainBall, CliError> {
    let usage = |msg: &str| CliError::Usage(format!("--omega {spec:?}: {msg} (expected \"c1,...,cn;R\")"));
    let (center, radius) = spec.split_once(';').ok_or_else(|| usage("missing ';'"))?;
    let center = parse_list(center).map_err(|_| usage("bad centre coordinate"))?;
    let radius: f64 = radius.trim().parse().map_err(|_| usage("bad radius"))?;
    if center.is_empty() {
        return Err(usage("empty centre"));
    }
    Ok(DomainBall::new(center, radius)?)
}

/// Comma-separated reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    s.split(',').map(|x| x.trim().parse()).collect()
}
