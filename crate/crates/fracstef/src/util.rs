//! Small numerical helpers shared across modules.

use crate::error::{Error, Result};

/// Monotone cubic (Fritsch-Carlson) resampling of a breakpoint table onto
/// `targets`. Preserves monotonicity of the data, which keeps resampled
/// initial profiles admissible.
pub fn pchip_resample(xs: &[f64], ys: &[f64], targets: &[f64]) -> Result<Vec<f64>> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter(
            "resampling needs matching tables with at least two rows".into(),
        ));
    }
    for w in xs.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(format!(
                "table abscissae must increase ({} then {})",
                w[0], w[1]
            )));
        }
    }
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

    // Fritsch-Carlson tangents
    let mut m = vec![0.0f64; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
        } else {
            let a = m[i] / delta[i];
            let b = m[i + 1] / delta[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m[i] = tau * a * delta[i];
                m[i + 1] = tau * b * delta[i];
            }
        }
    }

    let eval = |x: f64| -> f64 {
        if x <= xs[0] {
            return ys[0];
        }
        if x >= xs[n - 1] {
            return ys[n - 1];
        }
        let k = xs.partition_point(|&v| v <= x) - 1;
        let t = (x - xs[k]) / h[k];
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * ys[k] + h10 * h[k] * m[k] + h01 * ys[k + 1] + h11 * h[k] * m[k + 1]
    };
    Ok(targets.iter().map(|&x| eval(x)).collect())
}

/// Trapezoid rule over uniformly spaced nodal samples.
pub fn trapezoid_uniform(f: &[f64], spacing: f64) -> f64 {
    if f.len() < 2 {
        return 0.0;
    }
    let interior: f64 = f[1..f.len() - 1].iter().sum();
    spacing * (0.5 * (f[0] + f[f.len() - 1]) + interior)
}

/// Least-squares slope and intercept of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}
