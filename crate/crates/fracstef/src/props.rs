//! Executable property checks over solver runs: the qualitative theory
//! (positivity, comparison envelope, front ordering, boundary exponent)
//! as pass/fail reports, plus an L2 growth monitor.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fbp::FbpRun;
use crate::grid::Grid;
use crate::split::SingularSplit;
use crate::util::linear_fit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub status: CheckStatus,
    pub worst_violation: f64,
    /// (x, t) of the worst violation where meaningful
    pub location: (Option<f64>, Option<f64>),
    pub tolerance: f64,
}

impl PropertyReport {
    fn from_violation(
        name: &str,
        worst: f64,
        loc: (Option<f64>, Option<f64>),
        tol: f64,
    ) -> Self {
        let status = if worst <= tol { CheckStatus::Pass } else { CheckStatus::Fail };
        PropertyReport { name: name.into(), status, worst_violation: worst, location: loc, tolerance: tol }
    }

    fn not_applicable(name: &str, tol: f64) -> Self {
        PropertyReport {
            name: name.into(),
            status: CheckStatus::NotApplicable,
            worst_violation: 0.0,
            location: (None, None),
            tolerance: tol,
        }
    }
}

pub const DEFAULT_POSITIVITY_TOL: f64 = 1e-8;
pub const DEFAULT_ENVELOPE_TOL: f64 = 1e-6;
pub const DEFAULT_EXPONENT_TOL: f64 = 0.02;

/// Reconstructed temperature stays nonnegative: min over frames and nodes
/// of u >= -tol.
pub fn check_positivity(run: &FbpRun, split: &SingularSplit, grid: &Grid, tol: f64) -> PropertyReport {
    let mut worst = f64::NEG_INFINITY;
    let mut loc = (None, None);
    for k in 0..run.field.n_frames() {
        for (x, u) in run.field.reconstruct_u(split, grid, k) {
            let viol = -u;
            if viol > worst {
                worst = viol;
                loc = (Some(x), Some(run.field.times[k]));
            }
        }
    }
    PropertyReport::from_violation("positivity", worst.max(0.0), loc, tol)
}

/// Comparison bound u <= M/Gamma(1+alpha) (s^alpha - x^alpha) + tol, with
/// M = sup h. Applicable only when u0 itself sits under the bound.
pub fn check_envelope(run: &FbpRun, split: &SingularSplit, grid: &Grid, tol: f64) -> PropertyReport {
    let a = run.field.alpha;
    let m = run.problem.velocity_bound(run.dt);
    let c = m / gamma(1.0 + a);
    // hypothesis: u0 <= M/Gamma(1+alpha) (b^alpha - x^alpha)
    let u0 = run.field.reconstruct_u(split, grid, 0);
    let b = run.field.front.values[0];
    let hypothesis_ok = u0
        .iter()
        .all(|&(x, u)| u <= c * (b.powf(a) - x.powf(a)) + 1e-12);
    if !hypothesis_ok {
        return PropertyReport::not_applicable("envelope", tol);
    }
    let mut worst = f64::NEG_INFINITY;
    let mut loc = (None, None);
    for k in 0..run.field.n_frames() {
        let s = run.field.front.values[k];
        for (x, u) in run.field.reconstruct_u(split, grid, k) {
            let bound = c * (s.powf(a) - x.powf(a));
            let viol = u - bound;
            if viol > worst {
                worst = viol;
                loc = (Some(x), Some(run.field.times[k]));
            }
        }
    }
    PropertyReport::from_violation("envelope", worst.max(0.0), loc, tol)
}

/// Fronts of runs with componentwise-ordered data must be pointwise ordered.
pub fn check_front_ordering(runs: &[&FbpRun], tol: f64) -> Result<PropertyReport> {
    if runs.len() < 2 {
        return Err(Error::InvalidParameter("front ordering needs at least two runs".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut loc = (None, None);
    for pair in runs.windows(2) {
        let (lo, hi) = (pair[0], pair[1]); // data ordered lo <= hi
        for (k, &t) in lo.field.times.iter().enumerate() {
            let viol = lo.field.front.values[k] - hi.front.eval(t);
            if viol > worst {
                worst = viol;
                loc = (None, Some(t));
            }
        }
    }
    Ok(PropertyReport::from_violation("front_ordering", worst.max(0.0), loc, tol))
}

/// Fit u(x,t) - u(0,t) ~ -c(t) x^alpha over the first `window_frac` of the
/// domain; the recovered coefficient must match h(t)/Gamma(1+alpha) — i.e.
/// c(t) ~ h(t) after normalization — within `tol` relative.
pub fn check_boundary_exponent(
    run: &FbpRun,
    split: &SingularSplit,
    grid: &Grid,
    window_frac: f64,
    tol: f64,
) -> Result<PropertyReport> {
    let a = run.field.alpha;
    let mut worst = f64::NEG_INFINITY;
    let mut loc = (None, None);
    let mut tested = 0usize;
    for k in 1..run.field.n_frames() {
        let t = run.field.times[k];
        let h_t = run.problem.h.eval(t);
        if h_t <= 0.0 {
            continue;
        }
        let u = run.field.reconstruct_u(split, grid, k);
        let s = run.field.front.values[k];
        let u_at_0 = u[0].1;
        let window: Vec<&(f64, f64)> =
            u.iter().skip(1).filter(|(x, _)| *x <= window_frac * s).collect();
        if window.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "boundary-exponent fit needs at least 4 nodes in the window, got {}",
                window.len()
            )));
        }
        // least squares of (u(0) - u) against x^alpha through the origin
        let num: f64 = window.iter().map(|(x, u)| (u_at_0 - u) * x.powf(a)).sum();
        let den: f64 = window.iter().map(|(x, _)| x.powf(2.0 * a)).sum();
        let coeff = num / den * gamma(1.0 + a);
        let viol = (coeff - h_t).abs() / h_t;
        if viol > worst {
            worst = viol;
            loc = (None, Some(t));
        }
        tested += 1;
    }
    if tested == 0 {
        return Ok(PropertyReport::not_applicable("boundary_exponent", tol));
    }
    Ok(PropertyReport::from_violation("boundary_exponent", worst.max(0.0), loc, tol))
}

/// Two-parameter log-log fit of u(0,t) - u(x,t) ~ c x^kappa on the window;
/// returns the fitted exponent kappa for the final frame.
pub fn fit_boundary_exponent(
    run: &FbpRun,
    split: &SingularSplit,
    grid: &Grid,
    window_frac: f64,
) -> Result<f64> {
    let k = run.field.n_frames() - 1;
    let u = run.field.reconstruct_u(split, grid, k);
    let s = run.field.front.values[k];
    let u0 = u[0].1;
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (x, uu) in u.iter().skip(1) {
        if *x <= window_frac * s && u0 - uu > 0.0 {
            lx.push(x.ln());
            ly.push((u0 - uu).ln());
        }
    }
    if lx.len() < 4 {
        return Err(Error::InvalidParameter("degenerate boundary-exponent fit window".into()));
    }
    Ok(linear_fit(&lx, &ly).0)
}

/// ||u(.,t)||_{L2(0,s(t))} per frame.
pub fn l2_monitor(run: &FbpRun, split: &SingularSplit) -> Vec<f64> {
    let n = run.field.v_frames[0].len();
    let dp = 1.0 / (n as f64 - 1.0);
    (0..run.field.n_frames())
        .map(|k| {
            let w = run.field.mapped_temperature(split, k);
            let s = run.field.front.values[k];
            let mut acc = 0.0;
            for (j, &wj) in w.iter().enumerate() {
                let weight = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                acc += weight * wj * wj;
            }
            (s * acc * dp).sqrt()
        })
        .collect()
}

/// Growth flag across a refinement-matched pair: the finer run's L2 series
/// must not exceed `factor` times the coarser one anywhere.
pub fn l2_bounded_across_refinement(
    coarse: &[f64],
    fine: &[f64],
    factor: f64,
) -> PropertyReport {
    let n = coarse.len().min(fine.len());
    let mut worst = f64::NEG_INFINITY;
    for k in 0..n {
        let ratio = if coarse[k] > 1e-300 { fine[k] / coarse[k] } else { 1.0 };
        worst = worst.max(ratio - factor);
    }
    PropertyReport::from_violation("l2_bounded", worst.max(0.0), (None, None), 0.0)
}
