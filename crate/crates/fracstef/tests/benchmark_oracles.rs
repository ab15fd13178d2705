//! Cross-checks of the solver against independent oracles: the exact
//! self-similar pair, the classical Stefan limit, dual quadrature backends,
//! and the qualitative theory exercised over real runs.

mod common;

use statrs::function::gamma::gamma;

use fracstef::problem::InitialData;
use fracstef::split::SingularSplit;
use fracstef::{
    fbp, mlf, props, solve_fbp, solve_mbp, AnalyticBenchmark, Blend, CheckStatus, FluxSpec,
    FracWeights, FrontPath, Grid, StefanProblem, Stepper,
};

fn machinery(alpha: f64, n: usize) -> (Grid, FracWeights, SingularSplit, Stepper) {
    let grid = Grid::new(n).unwrap();
    let w = FracWeights::build(alpha, &grid).unwrap();
    let split = SingularSplit::build(alpha, &grid).unwrap();
    let stepper = Stepper::new(&w, &split).unwrap();
    (grid, w, split, stepper)
}

fn restart_problem(bench: &AnalyticBenchmark, grid: &Grid, t0: f64, horizon: f64) -> StefanProblem {
    let alpha = bench.alpha();
    let b = bench.front(t0);
    let u0: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&p| bench.temperature(p * b, t0).unwrap())
        .collect();
    StefanProblem {
        alpha,
        h: FluxSpec::Power { h0: bench.h0(), exponent: -alpha / (1.0 + alpha) },
        b,
        u0: InitialData::Mapped(u0),
        horizon,
        t0,
    }
}

#[test]
fn kilbas_saigo_matches_direct_series_oracle() {
    for alpha in [0.3, 0.5, 0.8] {
        let ks = mlf::KilbasSaigo::new(alpha).unwrap();
        for z in [-2.0, -1.0, -0.4, 0.0, 0.3] {
            let lib = ks.eval(z).unwrap();
            let oracle = common::ks_series_direct(alpha, z, 200);
            assert!((lib - oracle).abs() < 1e-12, "alpha={alpha} z={z}: {lib} vs {oracle}");
        }
    }
    // sigma at w = 1 against the oracle route
    let ks = mlf::KilbasSaigo::new(0.5).unwrap();
    let sigma = ks.similarity_profile(1.0).unwrap();
    let oracle = common::ks_series_direct(0.5, -1.0 / 1.5, 200);
    assert!((sigma - oracle).abs() < 1e-12);
}

#[test]
fn eta_agrees_with_classical_similarity_root_near_alpha_one() {
    // shooting oracle on the classical Neumann-flux Stefan ODE
    for h0 in [0.5, 1.0] {
        let classical = common::classical_eta_shooting(h0);
        let ks = mlf::KilbasSaigo::new(0.999).unwrap();
        let eta = mlf::eta_solve(&ks, h0, 1e-10).unwrap();
        let dev = (eta - classical).abs() / classical;
        assert!(dev < 0.02, "h0={h0}: {eta} vs classical {classical} (dev {dev})");
    }
    // sanity of the oracle itself: the closed-form root of eta = 2 h0 e^{-eta^2/4}
    let c = common::classical_eta_shooting(1.0);
    assert!((2.0 * (-c * c / 4.0f64).exp() - c).abs() < 1e-6, "{c}");
}

#[test]
fn analytic_profile_is_steady_in_mapped_coordinates() {
    // With the exact front prescribed, the mapped solution w(p) = F(p eta)
    // is time-independent; the MBP solve must hold it still.
    let bench = AnalyticBenchmark::new(0.5, 1.0, 1e-11).unwrap();
    let (grid, _w, split, stepper) = machinery(0.5, 128);
    let t0 = 0.1;
    let horizon = 0.5;
    let problem = restart_problem(&bench, &grid, t0, horizon);
    let nsteps = 1000usize;
    let times: Vec<f64> = (0..=nsteps)
        .map(|k| t0 + (horizon - t0) * k as f64 / nsteps as f64)
        .collect();
    let values: Vec<f64> = times.iter().map(|&t| bench.front(t)).collect();
    let velocities: Vec<f64> = times.iter().map(|&t| bench.front_velocity(t)).collect();
    let front = FrontPath::new(times, values, velocities).unwrap();
    let field = solve_mbp(&problem, &front, &stepper, 2e-3, 10).unwrap();
    let w_first = field.mapped_temperature(&split, 0);
    let w_last = field.mapped_temperature(&split, field.n_frames() - 1);
    let scale = w_first.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let drift = w_first
        .iter()
        .zip(&w_last)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(drift / scale < 0.02, "mapped profile drifted by {}", drift / scale);
    // reconstructed u against the analytic pair at the final frame
    let k = field.n_frames() - 1;
    let t = field.times[k];
    let mut err = 0.0f64;
    let mut umax = 0.0f64;
    for (x, u) in field.reconstruct_u(&split, &grid, k) {
        let exact = bench.temperature(x, t).unwrap();
        umax = umax.max(exact.abs());
        err = err.max((u - exact).abs());
    }
    assert!(err / umax < 0.02, "u error {}", err / umax);
}

#[test]
fn mbp_comparison_bound_against_envelope() {
    // constant h = M, admissible u0 under the envelope, prescribed front:
    // u stays below M/Gamma(1+alpha) (s^alpha - x^alpha)
    let alpha = 0.5;
    let (grid, _w, split, stepper) = machinery(alpha, 64);
    let m = 1.0;
    let problem = StefanProblem {
        alpha,
        h: FluxSpec::Constant(m),
        b: 0.4,
        u0: InitialData::Envelope { scale: 0.8 },
        horizon: 0.3,
        t0: 0.0,
    };
    let front =
        FrontPath::new(vec![0.0, 0.3], vec![0.4, 0.4 + 0.3 * 0.8 * m], vec![0.8 * m; 2]).unwrap();
    let field = solve_mbp(&problem, &front, &stepper, 1e-3, 10).unwrap();
    let c = m / gamma(1.0 + alpha);
    for k in 0..field.n_frames() {
        let s = field.front.values[k];
        for (x, u) in field.reconstruct_u(&split, &grid, k) {
            let bound = c * (s.powf(alpha) - x.powf(alpha));
            assert!(u <= bound + 1e-6, "t={} x={x}: u={u} > {bound}", field.times[k]);
        }
    }
}

#[test]
fn front_flux_on_benchmark_and_bounds() {
    // D^alpha_x u at the front for the analytic state equals -s_dot, and the
    // unclamped Stefan velocity never exceeds M by more than scheme noise
    let bench = AnalyticBenchmark::new(0.5, 1.0, 1e-11).unwrap();
    let (grid, _w, _split, stepper) = machinery(0.5, 128);
    let t = 0.2;
    let s = bench.front(t);
    let h_t = bench.boundary_flux(t);
    let rho = h_t * s.powf(0.5);
    let v: Vec<f64> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            bench.temperature(p * s, t).unwrap() + rho * stepper.split().phi[j]
        })
        .collect();
    let q = stepper.front_flux(&v, s, h_t).unwrap();
    let exact = -bench.front_velocity(t);
    assert!(q < 0.0);
    assert!((q - exact).abs() < 0.02 * exact.abs(), "{q} vs {exact}");

    // clamp diagnostics from a real run: raw velocity within [0 - tol, M + tol]
    let problem = StefanProblem {
        alpha: 0.5,
        h: FluxSpec::Constant(1.0),
        b: 0.5,
        u0: InitialData::Zero,
        horizon: 0.5,
        t0: 0.0,
    };
    let run = solve_fbp(&problem, &stepper, 1e-3, 10).unwrap();
    assert!(run.diagnostics.clamp_violation_max < 1e-4, "{}", run.diagnostics.clamp_violation_max);
}

#[test]
fn fixed_point_agrees_with_time_marching() {
    let bench = AnalyticBenchmark::new(0.5, 1.0, 1e-11).unwrap();
    let (grid, _w, _split, stepper) = machinery(0.5, 64);
    let problem = restart_problem(&bench, &grid, 0.1, 0.4);
    let dt = 2e-3;
    let marching = solve_fbp(&problem, &stepper, dt, 20).unwrap();
    let nsteps = ((0.4 - 0.1) / dt).round() as usize;
    let times: Vec<f64> = (0..=nsteps).map(|k| 0.1 + dt * k as f64).collect();
    let init = FrontPath::constant(times, problem.b);
    let tol = 1e-6;
    let fp = fbp::fixed_point(&problem, &init, 60, tol, &stepper, dt, 20).unwrap();
    let dev = fp
        .front
        .times
        .iter()
        .map(|&t| (fp.front.eval(t) - marching.front.eval(t)).abs())
        .fold(0.0f64, f64::max);
    // the outer iterations integrate the same fluxes differently (forward
    // Euler vs trapezoid), so one velocity sample of drift, O(dt), separates
    // the converged fronts
    let _ = tol;
    assert!(dev < 2.0 * dt, "fronts disagree by {dev}");
    assert_eq!(fp.mode, fracstef::FbpMode::FixedPoint);
}

#[test]
fn fixed_point_maps_admissible_set_into_itself() {
    let problem = StefanProblem {
        alpha: 0.5,
        h: FluxSpec::Constant(1.0),
        b: 0.3,
        u0: InitialData::Zero,
        horizon: 0.2,
        t0: 0.0,
    };
    let mut defects = Vec::new();
    for (n, dt) in [(32usize, 2e-3f64), (64, 1e-3)] {
        let (_, _, _, st) = machinery(0.5, n);
        let nsteps = (0.2 / dt).round() as usize;
        let times: Vec<f64> = (0..=nsteps).map(|k| dt * k as f64).collect();
        let init = FrontPath::constant(times, 0.3);
        let run = fbp::fixed_point(&problem, &init, 50, 1e-7, &st, dt, 10).unwrap();
        // every iterate was projected; the final front is admissible
        assert!(run.front.admissibility_defect(1.0 + 1e-9) <= 0.0);
        defects.push(
            run.diagnostics
                .projection_defects
                .last()
                .copied()
                .unwrap_or(0.0),
        );
    }
    // pre-projection violations must shrink under refinement
    assert!(
        defects[1] <= defects[0].max(1e-12),
        "projection defects did not shrink: {defects:?}"
    );
}

#[test]
fn uniqueness_proxy_two_initial_guesses() {
    let (_grid, _w, _split, stepper) = machinery(0.5, 32);
    let problem = StefanProblem {
        alpha: 0.5,
        h: FluxSpec::Constant(1.0),
        b: 0.3,
        u0: InitialData::Zero,
        horizon: 0.2,
        t0: 0.0,
    };
    let dt = 1e-3f64;
    let nsteps = (0.2 / dt).round() as usize;
    let times: Vec<f64> = (0..=nsteps).map(|k| dt * k as f64).collect();
    let tol = 1e-8;
    let flat = FrontPath::constant(times.clone(), 0.3);
    let ramp = FrontPath::new(
        times.clone(),
        times.iter().map(|&t| 0.3 + t).collect(),
        vec![1.0; times.len()],
    )
    .unwrap();
    let run_a = fbp::fixed_point(&problem, &flat, 80, tol, &stepper, dt, 10).unwrap();
    let run_b = fbp::fixed_point(&problem, &ramp, 80, tol, &stepper, dt, 10).unwrap();
    let dev = times
        .iter()
        .map(|&t| (run_a.front.eval(t) - run_b.front.eval(t)).abs())
        .fold(0.0f64, f64::max);
    assert!(dev <= 2.0 * tol * 10.0, "fixed points differ by {dev}");
}

#[test]
fn data_monotonicity_in_all_components() {
    // (b, u0, h) componentwise nondecreasing => fronts pointwise ordered
    let alpha = 0.5;
    let (_grid, _w, _split, stepper) = machinery(alpha, 48);
    let mk = |b: f64, scale: f64, h: f64| StefanProblem {
        alpha,
        h: FluxSpec::Constant(h),
        b,
        u0: if scale == 0.0 {
            InitialData::Zero
        } else {
            InitialData::Envelope { scale }
        },
        horizon: 0.4,
        t0: 0.0,
    };
    // verify the data really is ordered in physical space before solving
    let g = Grid::new(48).unwrap();
    let lo = mk(0.2, 0.0, 0.5);
    let mid = mk(0.25, 0.4, 0.75);
    let hi = mk(0.3, 0.8, 1.0);
    let sample = |p: &StefanProblem, x: f64| -> f64 {
        let u0 = p.initial_profile(&g).unwrap();
        if x >= p.b {
            return 0.0;
        }
        let pm = x / p.b * 48.0;
        let j = pm.floor() as usize;
        let frac = pm - j as f64;
        u0[j] * (1.0 - frac) + u0[(j + 1).min(48)] * frac
    };
    for i in 0..=20 {
        let x = 0.3 * i as f64 / 20.0;
        assert!(sample(&lo, x) <= sample(&mid, x) + 1e-12);
        assert!(sample(&mid, x) <= sample(&hi, x) + 1e-12);
    }
    let runs: Vec<_> = [lo, mid, hi]
        .iter()
        .map(|p| solve_fbp(p, &stepper, 1e-3, 20).unwrap())
        .collect();
    let refs: Vec<&fracstef::FbpRun> = runs.iter().collect();
    let rep = props::check_front_ordering(&refs, 1e-6).unwrap();
    assert_eq!(rep.status, CheckStatus::Pass, "{rep:?}");
}

#[test]
fn strict_advance_grows_with_heat_input() {
    let alpha = 0.5;
    let (_g, _w, _split, stepper) = machinery(alpha, 48);
    let mut gains = Vec::new();
    for h in [0.25, 0.5, 1.0] {
        let p = StefanProblem {
            alpha,
            h: FluxSpec::Constant(h),
            b: 0.25,
            u0: InitialData::Zero,
            horizon: 0.5,
            t0: 0.0,
        };
        let run = solve_fbp(&p, &stepper, 1e-3, 10).unwrap();
        gains.push(run.final_front() - 0.25);
    }
    assert!(gains[0] > 1e-4, "{gains:?}");
    assert!(gains[1] > gains[0] && gains[2] > gains[1], "{gains:?}");
}

#[test]
fn reconstructed_u_invariant_under_blend_choice() {
    // different admissible blends change v but not u (within scheme order)
    let alpha = 0.5;
    let bench = AnalyticBenchmark::new(alpha, 1.0, 1e-11).unwrap();
    let mut devs = Vec::new();
    for n in [48usize, 96] {
        let grid = Grid::new(n).unwrap();
        let w = FracWeights::build(alpha, &grid).unwrap();
        let problem = restart_problem(&bench, &grid, 0.1, 0.3);
        let mut fields = Vec::new();
        for blend in [Blend::Quintic, Blend::Cosine] {
            let split = SingularSplit::build_with_blend(alpha, &grid, blend).unwrap();
            let stepper = Stepper::new(&w, &split).unwrap();
            let run = solve_fbp(&problem, &stepper, 2e-3, 10).unwrap();
            let k = run.field.n_frames() - 1;
            fields.push((
                run.field.front.values[k],
                run.field
                    .reconstruct_u(&split, &grid, k)
                    .into_iter()
                    .map(|(_, u)| u)
                    .collect::<Vec<f64>>(),
            ));
        }
        let (s_a, u_a) = &fields[0];
        let (s_b, u_b) = &fields[1];
        let scale = u_a.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let mut dev = (s_a - s_b).abs() / s_a;
        for (a, b) in u_a.iter().zip(u_b) {
            dev = dev.max((a - b).abs() / scale);
        }
        devs.push(dev);
    }
    assert!(devs[0] < 0.08, "blend sensitivity {devs:?}");
    assert!(devs[1] < 0.5 * devs[0], "blend sensitivity did not shrink: {devs:?}");
}

#[test]
fn l2_monitor_bounded_and_matches_benchmark() {
    let bench = AnalyticBenchmark::new(0.5, 1.0, 1e-11).unwrap();
    // refinement-matched constant-h runs stay bounded
    let mut series = Vec::new();
    for (n, dt) in [(48usize, 2e-3), (96, 1e-3)] {
        let (_g, _w, split, stepper) = machinery(0.5, n);
        let p = StefanProblem {
            alpha: 0.5,
            h: FluxSpec::Constant(1.0),
            b: 0.25,
            u0: InitialData::Zero,
            horizon: 0.4,
            t0: 0.0,
        };
        let run = solve_fbp(&p, &stepper, dt, 20).unwrap();
        series.push(props::l2_monitor(&run, &split));
    }
    let rep = props::l2_bounded_across_refinement(&series[0], &series[1], 10.0);
    assert_eq!(rep.status, CheckStatus::Pass, "{rep:?}");

    // benchmark restart: the L2 norm matches quadrature of the analytic profile
    let (grid, _w, split, stepper) = machinery(0.5, 128);
    let problem = restart_problem(&bench, &grid, 0.1, 0.5);
    let run = solve_fbp(&problem, &stepper, 2e-3, 10).unwrap();
    let l2 = props::l2_monitor(&run, &split);
    let k = run.field.n_frames() - 1;
    let t = run.field.times[k];
    let s = bench.front(t);
    let exact = {
        let r = fracstef::quad::integrate(
            |p| bench.temperature(p * s, t).unwrap().powi(2),
            0.0,
            1.0,
            1e-10,
        )
        .unwrap();
        (s * r.value).sqrt()
    };
    assert!((l2[k] - exact).abs() / exact < 0.02, "{} vs {exact}", l2[k]);
}

#[test]
fn boundary_exponent_check_on_benchmark() {
    let bench = AnalyticBenchmark::new(0.5, 1.0, 1e-11).unwrap();
    let (grid, _w, split, stepper) = machinery(0.5, 256);
    let problem = restart_problem(&bench, &grid, 0.1, 0.5);
    let run = solve_fbp(&problem, &stepper, 1e-3, 10).unwrap();
    let rep = props::check_boundary_exponent(&run, &split, &grid, 0.05, 0.02).unwrap();
    assert_eq!(rep.status, CheckStatus::Pass, "{rep:?}");
}

#[test]
fn stefan_residual_of_analytic_pair_refines() {
    // residual evaluated (not solved): analytic frames dropped into the
    // residual formula; the quadrature-grade error halves under refinement
    let bench = AnalyticBenchmark::new(0.5, 1.0, 1e-11).unwrap();
    let mut res = Vec::new();
    for n in [64usize, 128] {
        let grid = Grid::new(n).unwrap();
        let split = SingularSplit::build(0.5, &grid).unwrap();
        let w = FracWeights::build(0.5, &grid).unwrap();
        let stepper = Stepper::new(&w, &split).unwrap();
        let problem = restart_problem(&bench, &grid, 0.1, 0.5);
        // analytic frames: v = w + rho phi on the mapped grid at two instants
        let mut times = Vec::new();
        let mut frames = Vec::new();
        let mut hv = Vec::new();
        let mut fs = Vec::new();
        for &t in &[0.1, 0.3, 0.5] {
            let s = bench.front(t);
            let rho = bench.boundary_flux(t) * s.powf(0.5);
            let v: Vec<f64> = grid
                .nodes()
                .iter()
                .enumerate()
                .map(|(j, &p)| bench.temperature(p * s, t).unwrap() + rho * split.phi[j])
                .collect();
            times.push(t);
            frames.push(v);
            hv.push(bench.boundary_flux(t));
            fs.push(s);
        }
        let field = fracstef::SolutionField {
            alpha: 0.5,
            times: times.clone(),
            v_frames: frames,
            h_values: hv,
            front: FrontPath::new(times.clone(), fs.clone(), vec![0.0; 3]).unwrap(),
        };
        let run = fracstef::FbpRun {
            problem: problem.clone(),
            field,
            front: FrontPath::new(times, fs, vec![0.0; 3]).unwrap(),
            residuals: Vec::new(),
            mode: fracstef::FbpMode::TimeMarching,
            diagnostics: Default::default(),
            dt: 1e-3,
        };
        let r = fracstef::stefan_residual(&run, stepper.split()).unwrap();
        res.push(r.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    // trapezoid on the x^alpha boundary profile refines like h^{1+alpha}
    assert!(res[1] < 0.4 * res[0], "{res:?}");
}
