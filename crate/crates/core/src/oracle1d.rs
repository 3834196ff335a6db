//! Exact `Meas^0_sigma` of finite subsets of the line.
//!
//! For `E` finite and `Omega = (c - R, c + R)`,
//!
//! ```text
//! Meas^0_sigma(E, Omega) = 2 int_R int_0^inf r^{-1-sigma} [#(E cap (p - r, p + r)) odd]
//!                                    [p - r in Omega or p + r in Omega] dr dp,
//! ```
//!
//! the factor two counting both orientations of each interval. The inner
//! integral is piecewise elementary in `r`; the outer one is computed by
//! tanh-sinh quadrature between the points where the piece structure changes.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math;

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma < 1.0 {
        Ok(())
    } else {
        Err(invalid("sigma must lie in (0, 1)"))
    }
}

/// `Meas^0_sigma({-1, 1}, (-2, 2)) = 8 / (sigma (1 - sigma))`.
pub fn pair_closed_form(sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(8.0 / (sigma * (1.0 - sigma)))
}

/// `Meas^0_sigma({1}, (-2, 2)) = 2^{3 - sigma} / (sigma (1 - sigma))`, also
/// the value for `{-1}` by symmetry.
pub fn single_closed_form(sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(math::powf(2.0, 3.0 - sigma) / (sigma * (1.0 - sigma)))
}

/// `int_a^b r^{-1-sigma} dr` for `0 <= a < b`.
fn power_piece(a: f64, b: f64, sigma: f64) -> f64 {
    let hi = if b.is_finite() { math::powf(b, -sigma) } else { 0.0 };
    (math::powf(a, -sigma) - hi) / sigma
}

/// Inner integral at centre `p = base + off`, including the orientation
/// factor two. Differences are formed as `(base - s) + off`, so distances to a
/// point equal to `base` stay exact. `dists` is scratch space.
fn inner(points: &[f64], center: f64, radius: f64, sigma: f64, base: f64, off: f64, dists: &mut Vec<f64>) -> f64 {
    dists.clear();
    dists.extend(points.iter().map(|s| math::abs((base - s) + off)));
    dists.sort_by(f64::total_cmp);
    // boundary point p + r or p - r in Omega
    let mut bands = [
        ((center - radius - base) - off, (center + radius - base) - off),
        ((base - center - radius) + off, (base - center + radius) + off),
    ];
    for b in bands.iter_mut() {
        b.0 = b.0.max(0.0);
    }
    if bands[0].0 > bands[1].0 {
        bands.swap(0, 1);
    }
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(2);
    for (lo, hi) in bands {
        if hi <= lo {
            continue;
        }
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    let mut total = 0.0;
    // the count is odd on (d_j, d_{j+1}) for j = 1, 3, 5, ... (1-based)
    let mut j = 0;
    while j < dists.len() {
        let lo = dists[j];
        let hi = dists.get(j + 1).copied().unwrap_or(f64::INFINITY);
        for &(a, b) in &merged {
            let (x, y) = (lo.max(a), hi.min(b));
            if x < y {
                total += power_piece(x, y, sigma);
            }
        }
        j += 2;
    }
    2.0 * total
}

/// Tanh-sinh quadrature on `[a, b]` of `f(dist_to_a, dist_to_b)`. Nodes are
/// passed as distances to the endpoints so that integrands singular at an
/// endpoint can be evaluated without cancellation.
fn tanh_sinh<F: FnMut(f64, f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    // keeps 1 - tanh above 1e-280, far enough for |x|^{-0.99} endpoint singularities
    const T_MAX: f64 = 6.0;
    const MAX_LEVEL: u32 = 10;
    let half = (b - a) / 2.0;
    let hpi = core::f64::consts::FRAC_PI_2;
    let mut node = |t: f64| -> f64 {
        let u = hpi * math::sinh(t);
        let ch = math::cosh(u);
        let w = hpi * math::cosh(t) / (ch * ch);
        // 1 - tanh(|u|), accurate for large |u|
        let comp = 2.0 / (1.0 + math::exp(2.0 * math::abs(u)));
        let d = half * comp;
        let (da, db) = if u >= 0.0 { (2.0 * half - d, d) } else { (d, 2.0 * half - d) };
        let v = if da > 0.0 && db > 0.0 { f(da, db) } else { 0.0 };
        w * v
    };
    let mut h = 1.0;
    let mut sum = node(0.0);
    let mut k = 1.0;
    while k * h <= T_MAX {
        sum += node(k * h) + node(-k * h);
        k += 1.0;
    }
    let mut estimate = half * h * sum;
    for level in 1..=MAX_LEVEL {
        h /= 2.0;
        let mut t = h;
        while t <= T_MAX {
            sum += node(t) + node(-t);
            t += 2.0 * h;
        }
        let next = half * h * sum;
        let diff = math::abs(next - estimate);
        estimate = next;
        if level >= 3 && diff < tol {
            break;
        }
    }
    estimate
}

/// Integral over `p > start` in closed form. Once `p` exceeds every point and
/// `center + radius`, the left boundary band is empty and the right one
/// contains every distance, so the inner integral is a sum of terms
/// `(p - x)^{-sigma} - (p - y)^{-sigma}` over the odd gaps `y < x`.
fn right_tail(sorted: &[f64], center: f64, radius: f64, sigma: f64, start: f64) -> f64 {
    let mut total = 0.0;
    let antideriv = |v: f64| math::powf(start - v, 1.0 - sigma);
    let mut it = sorted.iter().rev();
    while let Some(&x) = it.next() {
        let y = it.next().copied().unwrap_or(center - radius);
        total += antideriv(y) - antideriv(x);
    }
    2.0 * total / (sigma * (1.0 - sigma))
}

/// `Meas^0_sigma(points, (center - radius, center + radius))` by quadrature,
/// to an absolute tolerance of about `1e-8`.
pub fn finite_set_measure(points: &[f64], center: f64, radius: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if points.is_empty() {
        return Err(invalid("the point set is empty"));
    }
    if !(radius.is_finite() && radius > 0.0 && center.is_finite()) {
        return Err(invalid("the domain interval must have positive finite radius"));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(invalid("points must be finite"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("points must be distinct"));
    }
    let mut breaks: Vec<f64> = Vec::new();
    breaks.extend([center, center - radius, center + radius]);
    for (i, s) in sorted.iter().enumerate() {
        breaks.push(*s);
        breaks.push((s + center + radius) / 2.0);
        breaks.push((s + center - radius) / 2.0);
        for t in &sorted[i + 1..] {
            breaks.push((s + t) / 2.0);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let segments = breaks.len();
    let tol = 1e-9 / segments as f64;
    let mut scratch = Vec::with_capacity(sorted.len());
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        total += tanh_sinh(
            |da, db| {
                let (base, off) = if da <= db { (lo, da) } else { (hi, -db) };
                inner(&sorted, center, radius, sigma, base, off, &mut scratch)
            },
            lo,
            hi,
            tol,
        );
    }
    let first = breaks[0];
    let last = breaks[breaks.len() - 1];
    let reflected: Vec<f64> = sorted.iter().rev().map(|x| -x).collect();
    total += right_tail(&sorted, center, radius, sigma, last);
    total += right_tail(&reflected, -center, radius, sigma, -first);
    Ok(total)
}
