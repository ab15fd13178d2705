//! Adaptive Gauss–Kronrod quadrature (G7/K15 pair) plus a deliberately
//! naive fixed-panel midpoint rule used as an independent cross-check
//! backend.

use crate::error::{Error, Result};

// QUADPACK dqk15 constants.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(c - x) + f(c + x);
        kron += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kron *= half;
    gauss *= half;
    let err = (kron - gauss).abs();
    (kron, err.max(f64::EPSILON * kron.abs()))
}

/// Adaptive integration of `f` over [a, b] to absolute tolerance `tol`,
/// worst-interval-first subdivision.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    integrate_split(f, &[a, b], tol)
}

/// Adaptive integration with interior breakpoints (panel edges are placed at
/// every consecutive pair in `points`, which must be increasing).
pub fn integrate_split<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: f64) -> Result<QuadResult> {
    let a = points[0];
    let b = *points.last().unwrap();
    if a == b {
        return Ok(QuadResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::new(); // (a, b, value, err)
    let mut evals = 0usize;
    for w in points.windows(2) {
        let (v, e) = kronrod_panel(&f, w[0], w[1]);
        evals += 15;
        intervals.push((w[0], w[1], v, e));
    }
    const MAX_INTERVALS: usize = 4000;
    loop {
        let total_err: f64 = intervals.iter().map(|i| i.3).sum();
        if total_err <= tol || intervals.len() >= MAX_INTERVALS {
            let value = intervals.iter().map(|i| i.2).sum();
            if total_err > tol.max(1e-13 * intervals.iter().map(|i| i.2.abs()).sum::<f64>()) {
                return Err(Error::QuadratureFailure { a, b, tol, err: total_err });
            }
            return Ok(QuadResult { value, error_estimate: total_err, evaluations: evals });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (ia, ib, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (ia + ib);
        if mid <= ia || mid >= ib {
            // interval exhausted at machine resolution; accept its value
            let (v, _) = kronrod_panel(&f, ia, ib);
            intervals.push((ia, ib, v, 0.0));
            continue;
        }
        let (v1, e1) = kronrod_panel(&f, ia, mid);
        let (v2, e2) = kronrod_panel(&f, mid, ib);
        evals += 30;
        intervals.push((ia, mid, v1, e1));
        intervals.push((mid, ib, v2, e2));
    }
}

/// Fixed `n`-panel midpoint rule. No adaptivity, no substitutions; this is
/// the independent backend for dual-route checks.
pub fn midpoint<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        acc += f(a + (i as f64 + 0.5) * h);
    }
    acc * h
}
