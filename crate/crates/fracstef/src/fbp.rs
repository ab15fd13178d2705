//! Free-boundary coupling: march s(t) by the fractional Stefan condition,
//! or iterate the integral fixed-point operator P over front paths, and
//! reach the zero-initial-domain case through the b = 1/m sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::FracWeights;
use crate::grid::Grid;
use crate::mbp::{self, SolutionField, Stepper};
use crate::problem::{FrontPath, InitialData, StefanProblem};
use crate::split::SingularSplit;
use crate::util::trapezoid_uniform;

/// Number of consecutive zero-velocity steps that trips the stagnation alarm
/// while the data is nontrivial.
pub const STAGNATION_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FbpMode {
    TimeMarching,
    FixedPoint,
}

/// Diagnostics accumulated over a run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunDiagnostics {
    /// worst unclamped excursion of -front_flux outside [0, M]
    pub clamp_violation_max: f64,
    /// fixed-point data: sup |s_{k+1} - s_k| per iteration
    pub fixed_point_updates: Vec<f64>,
    /// worst pre-projection admissibility defect per iteration
    pub projection_defects: Vec<f64>,
    pub iterations: usize,
}

/// A complete free-boundary run.
#[derive(Debug, Clone)]
pub struct FbpRun {
    pub problem: StefanProblem,
    pub field: SolutionField,
    /// front at full step resolution
    pub front: FrontPath,
    /// integral-condition residual at the frame instants
    pub residuals: Vec<f64>,
    pub mode: FbpMode,
    pub diagnostics: RunDiagnostics,
    pub dt: f64,
}

impl FbpRun {
    pub fn final_front(&self) -> f64 {
        *self.front.values.last().unwrap()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

/// March the coupled system: the front moves with the clamped Stefan
/// velocity, then the transformed field advances one IMEX step.
pub fn solve_fbp(
    problem: &StefanProblem,
    stepper: &Stepper,
    dt: f64,
    n_frames: usize,
) -> Result<FbpRun> {
    problem.validate()?;
    if problem.b <= 0.0 {
        return Err(Error::InvalidParameter(
            "time marching needs b > 0; use the 1/m sweep for the degenerate case".into(),
        ));
    }
    let grid = stepper.grid();
    let a = problem.alpha;
    let t_start = mbp::effective_start(problem, dt);
    let n_steps = ((problem.horizon - t_start) / dt).round() as usize;
    if n_steps == 0 {
        return Err(Error::InvalidParameter("horizon shorter than one step".into()));
    }
    let clamp = problem.velocity_bound(dt);
    let u0 = problem.initial_profile(grid)?;
    let h_start = problem.h.eval(t_start);
    let mut v: Vec<f64> = (0..grid.n_nodes())
        .map(|j| u0[j] + h_start * problem.b.powf(a) * stepper.split().phi[j])
        .collect();
    v[grid.n_cells()] = 0.0;
    let mut s = problem.b;

    let data_trivial = u0.iter().all(|&x| x.abs() < 1e-14);
    let mut diag = RunDiagnostics::default();
    let mut step_times = Vec::with_capacity(n_steps + 1);
    let mut step_s = Vec::with_capacity(n_steps + 1);
    let mut step_sd = Vec::with_capacity(n_steps + 1);
    step_times.push(t_start);
    step_s.push(s);
    step_sd.push(0.0);

    let stride = mbp::frame_stride(n_steps, n_frames);
    let mut times = vec![t_start];
    let mut frames = vec![v.clone()];
    let mut h_values = vec![h_start];
    let mut fr_s = vec![s];
    let mut fr_sd = vec![0.0];

    let mut stagnant = 0usize;
    for nstep in 0..n_steps {
        let t = t_start + nstep as f64 * dt;
        let t_next = t + dt;
        let h_val = problem.h.eval(t);
        let h_next = problem.h.eval(t_next);
        let q = stepper.front_flux(&v, s, h_val)?;
        let raw = -q;
        let s_dot = raw.clamp(0.0, clamp);
        diag.clamp_violation_max =
            diag.clamp_violation_max.max(raw - clamp).max(-raw).max(0.0);
        // stagnation alarm: boundary is feeding the domain but the discrete
        // front refuses to move
        if s_dot == 0.0 && h_val > 1e-14 && !data_trivial {
            stagnant += 1;
            if stagnant >= STAGNATION_WINDOW && nstep >= STAGNATION_WINDOW {
                return Err(Error::FrontStagnation { t, window: STAGNATION_WINDOW });
            }
        } else if s_dot > 0.0 {
            stagnant = 0;
        }
        let s_next = s + dt * s_dot;
        let d_rho = h_next * s_next.powf(a) - h_val * s.powf(a);
        v = stepper.advance(&v, s, s_dot, h_val, d_rho, dt, t)?;
        s = s_next;
        step_times.push(t_next);
        step_s.push(s);
        step_sd.push(s_dot);
        if (nstep + 1) % stride == 0 || nstep + 1 == n_steps {
            times.push(t_next);
            frames.push(v.clone());
            h_values.push(h_next);
            fr_s.push(s);
            fr_sd.push(s_dot);
        }
    }

    let field = SolutionField {
        alpha: a,
        times: times.clone(),
        v_frames: frames,
        h_values,
        front: FrontPath::new(times, fr_s, fr_sd)?,
    };
    let front = FrontPath::new(step_times, step_s, step_sd)?;
    let mut run = FbpRun {
        problem: problem.clone(),
        field,
        front,
        residuals: Vec::new(),
        mode: FbpMode::TimeMarching,
        diagnostics: diag,
        dt,
    };
    run.residuals = stefan_residual(&run, stepper.split())?;
    Ok(run)
}

/// Residual of the integral Stefan condition at the frame instants:
/// r(t) = s(t) - b - int h - int u0 + int u, with the temperature integral
/// done in the transformed domain as s(t) * int_0^1 w dp.
pub fn stefan_residual(run: &FbpRun, split: &SingularSplit) -> Result<Vec<f64>> {
    let grid_spacing = 1.0 / (run.field.v_frames[0].len() as f64 - 1.0);
    let t_ref = run.field.times[0];
    let s_ref = run.field.front.values[0];
    let w0 = run.field.mapped_temperature(split, 0);
    let int_u0 = s_ref * trapezoid_uniform(&w0, grid_spacing);
    let mut out = Vec::with_capacity(run.field.n_frames());
    for k in 0..run.field.n_frames() {
        let t = run.field.times[k];
        let s = run.field.front.values[k];
        let w = run.field.mapped_temperature(split, k);
        let int_u = s * trapezoid_uniform(&w, grid_spacing);
        let int_h = run.problem.h.integral(t_ref, t);
        out.push(s - s_ref - int_h - int_u0 + int_u);
    }
    Ok(out)
}

/// One application of the integral fixed-point operator:
/// (P s)(t) = b - int_0^t (D^a_x u)(s(tau), tau) d tau, trapezoidal in time,
/// followed by projection onto the admissible set (velocities clipped to
/// [0, M]). Returns the new path and the worst pre-projection defect.
fn apply_p(
    problem: &StefanProblem,
    s_path: &FrontPath,
    stepper: &Stepper,
    dt: f64,
) -> Result<(FrontPath, f64)> {
    let grid = stepper.grid();
    let a = problem.alpha;
    let t_start = mbp::effective_start(problem, dt);
    let n_steps = ((problem.horizon - t_start) / dt).round() as usize;
    let clamp = problem.velocity_bound(dt);
    let u0 = problem.initial_profile(grid)?;
    let h_start = problem.h.eval(t_start);
    let mut v: Vec<f64> = (0..grid.n_nodes())
        .map(|j| u0[j] + h_start * problem.b.powf(a) * stepper.split().phi[j])
        .collect();
    v[grid.n_cells()] = 0.0;

    // -front_flux along the given path
    let mut neg_flux = Vec::with_capacity(n_steps + 1);
    neg_flux.push(-stepper.front_flux(&v, s_path.eval(t_start), h_start)?);
    for nstep in 0..n_steps {
        let t = t_start + nstep as f64 * dt;
        let t_next = t + dt;
        let s_val = s_path.eval(t);
        let s_next = s_path.eval(t_next);
        let s_dot = (s_next - s_val) / dt;
        let h_val = problem.h.eval(t);
        let h_next = problem.h.eval(t_next);
        let d_rho = h_next * s_next.powf(a) - h_val * s_val.powf(a);
        v = stepper.advance(&v, s_val, s_dot, h_val, d_rho, dt, t)?;
        neg_flux.push(-stepper.front_flux(&v, s_next, h_next)?);
    }

    // trapezoidal integration of the velocity, then projection onto Sigma
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut values = Vec::with_capacity(n_steps + 1);
    let mut velocities = Vec::with_capacity(n_steps + 1);
    let mut defect = 0.0f64;
    times.push(t_start);
    values.push(problem.b);
    velocities.push(neg_flux[0].clamp(0.0, clamp));
    let mut s_acc = problem.b;
    for k in 0..n_steps {
        let vel = 0.5 * (neg_flux[k] + neg_flux[k + 1]);
        defect = defect.max(-vel).max(vel - clamp).max(0.0);
        let vel = vel.clamp(0.0, clamp);
        s_acc += dt * vel;
        times.push(t_start + (k + 1) as f64 * dt);
        values.push(s_acc);
        velocities.push(vel);
    }
    Ok((FrontPath::new(times, values, velocities)?, defect))
}

/// Outer fixed-point iteration s <- P s until sup_t |s_{k+1} - s_k| <= tol.
pub fn fixed_point(
    problem: &StefanProblem,
    s_init: &FrontPath,
    max_iters: usize,
    tol: f64,
    stepper: &Stepper,
    dt: f64,
    n_frames: usize,
) -> Result<FbpRun> {
    problem.validate()?;
    if problem.b <= 0.0 {
        return Err(Error::InvalidParameter("fixed-point iteration needs b > 0".into()));
    }
    let clamp = problem.velocity_bound(dt);
    if s_init.admissibility_defect(clamp + 1e-9) > 1e-9 {
        return Err(Error::InvalidParameter("initial front guess is not admissible".into()));
    }
    let mut diag = RunDiagnostics::default();
    let mut current = s_init.clone();
    let mut converged = false;
    for _ in 0..max_iters {
        let (next, defect) = apply_p(problem, &current, stepper, dt)?;
        let update = next
            .times
            .iter()
            .map(|&t| (next.eval(t) - current.eval(t)).abs())
            .fold(0.0f64, f64::max);
        diag.fixed_point_updates.push(update);
        diag.projection_defects.push(defect);
        diag.iterations += 1;
        current = next;
        if update <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::FixedPointNonConvergence {
            iters: diag.iterations,
            last: *diag.fixed_point_updates.last().unwrap_or(&f64::NAN),
        });
    }
    // final field on the converged front
    let field = mbp::solve_mbp(problem, &current, stepper, dt, n_frames)?;
    let mut run = FbpRun {
        problem: problem.clone(),
        field,
        front: current,
        residuals: Vec::new(),
        mode: FbpMode::FixedPoint,
        diagnostics: diag,
        dt,
    };
    run.residuals = stefan_residual(&run, stepper.split())?;
    Ok(run)
}

/// Result of the b -> 0 sweep.
#[derive(Debug)]
pub struct BZeroSweep {
    pub m_list: Vec<u32>,
    pub runs: Vec<FbpRun>,
    /// Richardson-in-1/m extrapolation of the front at the shared frame
    /// instants of the last member
    pub extrapolated: FrontPath,
    /// |s_extrapolated - s_last| at the final instant, the error bar from
    /// the last two members
    pub error_estimate: f64,
    /// worst violation of the decreasing-in-m ordering (<= 0 when clean)
    pub ordering_worst: f64,
}

/// Solve the family b = 1/m (zero initial profile), assert the fronts
/// decrease in m, and extrapolate to the limit.
pub fn solve_b_zero(
    template: &StefanProblem,
    m_list: &[u32],
    grid: &Grid,
    weights: &FracWeights,
    dt: f64,
    n_frames: usize,
    ordering_tol: f64,
) -> Result<BZeroSweep> {
    if m_list.len() < 2 || m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "m_list must contain at least two increasing members".into(),
        ));
    }
    if !matches!(template.u0, InitialData::Zero) {
        return Err(Error::InvalidParameter(
            "the zero-initial-domain construction uses u0 = 0".into(),
        ));
    }
    let split = SingularSplit::build(template.alpha, grid)?;
    let stepper = Stepper::new(weights, &split)?;

    // members are independent; fan out
    let mut results: Vec<Option<Result<FbpRun>>> = (0..m_list.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for &m in m_list {
            let stepper_ref = &stepper;
            let template_ref = template;
            handles.push(scope.spawn(move || {
                let mut p = template_ref.clone();
                p.b = 1.0 / m as f64;
                solve_fbp(&p, stepper_ref, dt, n_frames)
            }));
        }
        for (slot, h) in results.iter_mut().zip(handles) {
            *slot = Some(h.join().expect("sweep member panicked"));
        }
    });
    let runs: Vec<FbpRun> =
        results.into_iter().map(|r| r.unwrap()).collect::<Result<Vec<_>>>()?;

    // ordering: s^m pointwise nonincreasing in m at shared frame instants
    let mut ordering_worst = f64::NEG_INFINITY;
    let base_times = &runs[0].field.times;
    for pair in 0..runs.len() - 1 {
        let (lo, hi) = (&runs[pair], &runs[pair + 1]); // lo has the bigger b
        for &t in base_times.iter() {
            let viol = hi.front.eval(t) - lo.front.eval(t);
            if viol > ordering_worst {
                ordering_worst = viol;
            }
            if viol > ordering_tol {
                return Err(Error::OrderingViolation {
                    t,
                    violation: viol,
                    b_hi: lo.problem.b,
                    b_lo: hi.problem.b,
                });
            }
        }
    }

    // Richardson/Aitken extrapolation in 1/m using the last three members,
    // with the empirical ratio; falls back to the last member when the
    // differences degenerate.
    let last = &runs[runs.len() - 1];
    let timesx = last.field.times.clone();
    let mut values = Vec::with_capacity(timesx.len());
    let mut velocities = Vec::with_capacity(timesx.len());
    let k3 = runs.len() - 3;
    for (i, &t) in timesx.iter().enumerate() {
        let s1 = runs[k3].front.eval(t);
        let s2 = runs[k3 + 1].front.eval(t);
        let s3 = runs[k3 + 2].front.eval(t);
        let d1 = s1 - s2;
        let d2 = s2 - s3;
        let extr = if d1.abs() > 1e-15 && (d1 - d2).abs() > 1e-15 && d1 * d2 > 0.0 {
            s3 - d2 * d2 / (d1 - d2)
        } else {
            s3
        };
        values.push(extr);
        velocities.push(last.field.front.velocities[i]);
    }
    let error_estimate =
        (values.last().unwrap() - last.front.values.last().unwrap()).abs();
    Ok(BZeroSweep {
        m_list: m_list.to_vec(),
        runs,
        extrapolated: FrontPath::new(timesx, values, velocities)?,
        error_estimate,
        ordering_worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::FluxSpec;

    fn machinery(alpha: f64, n: usize) -> (Grid, FracWeights, Stepper) {
        let grid = Grid::new(n).unwrap();
        let w = FracWeights::build(alpha, &grid).unwrap();
        let s = SingularSplit::build(alpha, &grid).unwrap();
        let st = Stepper::new(&w, &s).unwrap();
        (grid, w, st)
    }

    #[test]
    fn zero_data_front_stays_put() {
        let (_, _, st) = machinery(0.5, 16);
        let p = StefanProblem {
            alpha: 0.5,
            h: FluxSpec::Constant(0.0),
            b: 0.25,
            u0: InitialData::Zero,
            horizon: 0.05,
            t0: 0.0,
        };
        let run = solve_fbp(&p, &st, 1e-3, 10).unwrap();
        assert!(run.front.values.iter().all(|&s| (s - 0.25).abs() < 1e-15));
        assert!(run.max_residual() < 1e-14);
        for frame in &run.field.v_frames {
            assert!(frame.iter().all(|&x| x.abs() < 1e-14));
        }
    }

    #[test]
    fn constant_flux_advances_front_within_bound() {
        let (_, _, st) = machinery(0.5, 32);
        let p = StefanProblem {
            alpha: 0.5,
            h: FluxSpec::Constant(1.0),
            b: 0.5,
            u0: InitialData::Zero,
            horizon: 0.3,
            t0: 0.0,
        };
        let run = solve_fbp(&p, &st, 1e-3, 10).unwrap();
        assert!(run.final_front() > 0.5);
        // velocity bound 0 <= s_dot <= M holds by the clamp
        assert!(run.front.velocities.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
        // strict advance with h not identically 0
        assert!(run.final_front() - 0.5 > 1e-3);
    }

    #[test]
    fn fixed_point_zero_data_converges_immediately() {
        let (_, _, st) = machinery(0.5, 16);
        let p = StefanProblem {
            alpha: 0.5,
            h: FluxSpec::Constant(0.0),
            b: 0.25,
            u0: InitialData::Zero,
            horizon: 0.05,
            t0: 0.0,
        };
        let times: Vec<f64> = (0..=50).map(|i| 0.001 * i as f64).collect();
        let init = FrontPath::constant(times, 0.25);
        let run = fixed_point(&p, &init, 10, 1e-12, &st, 1e-3, 5).unwrap();
        assert!(run.diagnostics.iterations <= 2);
        assert!(run.front.values.iter().all(|&s| (s - 0.25).abs() < 1e-14));
    }

    #[test]
    fn b_zero_sweep_orders_and_extrapolates() {
        let (grid, w, _) = machinery(0.5, 24);
        let template = StefanProblem {
            alpha: 0.5,
            h: FluxSpec::Constant(1.0),
            b: f64::NAN, // overwritten per member
            u0: InitialData::Zero,
            horizon: 0.2,
            t0: 0.0,
        };
        let sweep =
            solve_b_zero(&template, &[4, 8, 16], &grid, &w, 5e-4, 10, 1e-6).unwrap();
        assert_eq!(sweep.runs.len(), 3);
        assert!(sweep.ordering_worst <= 0.0, "{}", sweep.ordering_worst);
        // extrapolated front sits below the smallest member
        let last = sweep.runs.last().unwrap();
        let sx = sweep.extrapolated.values.last().unwrap();
        assert!(*sx <= *last.front.values.last().unwrap() + 1e-12);
        assert!(sweep.error_estimate < 0.1);
    }

    #[test]
    fn b_zero_with_zero_flux_collapses_to_initial_positions() {
        // every member keeps s = 1/m; the geometric sequence extrapolates
        // to exactly zero
        let (grid, w, _) = machinery(0.5, 16);
        let template = StefanProblem {
            alpha: 0.5,
            h: FluxSpec::Constant(0.0),
            b: f64::NAN,
            u0: InitialData::Zero,
            horizon: 0.05,
            t0: 0.0,
        };
        let sweep = solve_b_zero(&template, &[4, 8, 16], &grid, &w, 1e-3, 5, 1e-12).unwrap();
        for (i, run) in sweep.runs.iter().enumerate() {
            let b = 1.0 / sweep.m_list[i] as f64;
            assert!(run.front.values.iter().all(|&s| s == b));
        }
        assert!(sweep.extrapolated.values.iter().all(|&s| s.abs() < 1e-15));
    }

    #[test]
    fn b_zero_rejects_bad_member_lists_and_data() {
        let (grid, w, _) = machinery(0.5, 16);
        let template = StefanProblem {
            alpha: 0.5,
            h: FluxSpec::Constant(1.0),
            b: 0.0,
            u0: InitialData::Zero,
            horizon: 0.1,
            t0: 0.0,
        };
        assert!(solve_b_zero(&template, &[4], &grid, &w, 1e-3, 5, 1e-6).is_err());
        assert!(solve_b_zero(&template, &[8, 4], &grid, &w, 1e-3, 5, 1e-6).is_err());
        let mut bad = template.clone();
        bad.u0 = InitialData::Envelope { scale: 0.5 };
        assert!(solve_b_zero(&bad, &[4, 8], &grid, &w, 1e-3, 5, 1e-6).is_err());
    }

    #[test]
    fn residual_vanishes_identically_for_zero_data() {
        let (_, _, st) = machinery(0.3, 16);
        let p = StefanProblem {
            alpha: 0.3,
            h: FluxSpec::Constant(0.0),
            b: 0.5,
            u0: InitialData::Zero,
            horizon: 0.05,
            t0: 0.0,
        };
        let run = solve_fbp(&p, &st, 1e-3, 5).unwrap();
        assert!(run.residuals.iter().all(|&r| r.abs() < 1e-15));
    }
}
