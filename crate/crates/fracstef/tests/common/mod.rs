//! Independent oracles shared by the integration suites. Everything here
//! deliberately avoids the library's own evaluation paths.
#![allow(dead_code)] // each test target uses its own subset

use statrs::function::gamma::gamma;

/// Similarity root of the classical (alpha = 1) one-phase Stefan problem
/// with prescribed flux h(t) = h0 t^{-1/2}: integrate F'' + (w/2) F' = 0 by
/// RK4 with F'(0) = -h0 and bisect for F'(eta) = -eta/2.
pub fn classical_eta_shooting(h0: f64) -> f64 {
    // z = F' solves z' = -(w/2) z, z(0) = -h0
    let z_at = |w_end: f64| -> f64 {
        let n = 4000;
        let dw = w_end / n as f64;
        let mut z = -h0;
        let mut w = 0.0;
        for _ in 0..n {
            let f = |w: f64, z: f64| -(w / 2.0) * z;
            let k1 = f(w, z);
            let k2 = f(w + dw / 2.0, z + dw / 2.0 * k1);
            let k3 = f(w + dw / 2.0, z + dw / 2.0 * k2);
            let k4 = f(w + dw, z + dw * k3);
            z += dw / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            w += dw;
        }
        z
    };
    // g(eta) = -z(eta) - eta/2 is positive at 0 and decreasing
    let mut lo = 0.0;
    let mut hi = 2.0 * h0 + 2.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if -z_at(mid) - mid / 2.0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Direct Kilbas-Saigo series with term-by-term Gamma-ratio products,
/// independent of the library's log-accumulated coefficients.
pub fn ks_series_direct(alpha: f64, z: f64, n_terms: usize) -> f64 {
    let mut sum = 0.0;
    let mut coeff = 1.0f64;
    let mut zk = 1.0f64;
    for k in 0..n_terms {
        sum += coeff * zk;
        let p = (k + 1) as f64 * (1.0 + alpha);
        let ratio = if p < 160.0 {
            gamma(p) / gamma(p + alpha)
        } else {
            // keep the tail from overflowing; by now terms are negligible
            p.powf(-alpha)
        };
        coeff *= ratio;
        zk *= z;
        if coeff * zk.abs() < 1e-18 && k > 4 {
            break;
        }
    }
    sum
}

/// Observed convergence order from a pair of errors under halved resolution.
pub fn observed_order(coarse_err: f64, fine_err: f64) -> f64 {
    (coarse_err / fine_err).log2()
}

/// Least-squares slope of ln(y) against ln(x).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let sx: f64 = lx.iter().sum();
    let sy: f64 = ly.iter().sum();
    let sxx: f64 = lx.iter().map(|v| v * v).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| a * b).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
