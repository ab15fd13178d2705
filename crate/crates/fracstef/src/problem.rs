//! Problem statements and front paths.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::util::pchip_resample;

/// Prescribed non-local boundary flux h(t) >= 0 at the fixed face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FluxSpec {
    Constant(f64),
    /// h0 * t^exponent
    Power { h0: f64, exponent: f64 },
    /// piecewise-linear breakpoint table (t, h), t strictly increasing
    Table(Vec<(f64, f64)>),
}

impl FluxSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FluxSpec::Constant(h) => {
                if !(*h >= 0.0) || !h.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "constant flux must satisfy h >= 0, got {h}"
                    )));
                }
            }
            FluxSpec::Power { h0, exponent } => {
                if !(*h0 >= 0.0) || !h0.is_finite() || !exponent.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "power flux needs h0 >= 0 and finite exponent, got h0={h0}, p={exponent}"
                    )));
                }
            }
            FluxSpec::Table(rows) => {
                if rows.len() < 2 {
                    return Err(Error::InvalidParameter(
                        "flux table needs at least two breakpoints".into(),
                    ));
                }
                for w in rows.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::InvalidParameter(format!(
                            "flux table breakpoints must increase ({} then {})",
                            w[0].0, w[1].0
                        )));
                    }
                }
                for (t, h) in rows {
                    if !(*h >= 0.0) || !h.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "flux must be nonnegative at every breakpoint; h({t}) = {h}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            FluxSpec::Constant(h) => *h,
            FluxSpec::Power { h0, exponent } => h0 * t.powf(*exponent),
            FluxSpec::Table(rows) => {
                if t <= rows[0].0 {
                    return rows[0].1;
                }
                if t >= rows[rows.len() - 1].0 {
                    return rows[rows.len() - 1].1;
                }
                let k = rows.partition_point(|r| r.0 <= t) - 1;
                let (t0, h0) = rows[k];
                let (t1, h1) = rows[k + 1];
                h0 + (h1 - h0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// dh/dt (right derivative at table breakpoints).
    pub fn eval_dot(&self, t: f64) -> f64 {
        match self {
            FluxSpec::Constant(_) => 0.0,
            FluxSpec::Power { h0, exponent } => {
                if *exponent == 0.0 {
                    0.0
                } else {
                    h0 * exponent * t.powf(exponent - 1.0)
                }
            }
            FluxSpec::Table(rows) => {
                if t < rows[0].0 || t >= rows[rows.len() - 1].0 {
                    return 0.0;
                }
                let k = rows.partition_point(|r| r.0 <= t) - 1;
                let (t0, h0) = rows[k];
                let (t1, h1) = rows[k + 1];
                (h1 - h0) / (t1 - t0)
            }
        }
    }

    /// int_{t0}^{t} h (closed form for the presets, exact trapezoid on the
    /// breakpoints for tables).
    pub fn integral(&self, t0: f64, t: f64) -> f64 {
        match self {
            FluxSpec::Constant(h) => h * (t - t0),
            FluxSpec::Power { h0, exponent } => {
                let p = exponent + 1.0;
                if p.abs() < 1e-14 {
                    h0 * (t.ln() - t0.max(f64::MIN_POSITIVE).ln())
                } else {
                    h0 / p * (t.powf(p) - t0.powf(p))
                }
            }
            FluxSpec::Table(_) => {
                // trapezoid over a fine uniform refinement between the bounds,
                // plus exact handling would need breakpoint splitting; the
                // table is piecewise linear so trapezoid on breakpoints is
                // exact. Build merged knots.
                let mut knots = vec![t0];
                if let FluxSpec::Table(rows) = self {
                    for &(tk, _) in rows {
                        if tk > t0 && tk < t {
                            knots.push(tk);
                        }
                    }
                }
                knots.push(t);
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    acc += 0.5 * (self.eval(w[0]) + self.eval(w[1])) * (w[1] - w[0]);
                }
                acc
            }
        }
    }

    /// True when h(t) is finite at `t` (the similarity flux diverges at 0).
    pub fn finite_at(&self, t: f64) -> bool {
        self.eval(t).is_finite()
    }

    /// sup of h over [t0, T], sampling the presets where needed.
    pub fn sup(&self, t0: f64, t_end: f64) -> f64 {
        match self {
            FluxSpec::Constant(h) => *h,
            FluxSpec::Power { h0, exponent } => {
                if *exponent >= 0.0 {
                    h0 * t_end.powf(*exponent)
                } else {
                    h0 * t0.powf(*exponent)
                }
            }
            FluxSpec::Table(rows) => rows
                .iter()
                .filter(|(t, _)| *t >= t0 && *t <= t_end)
                .map(|(_, h)| *h)
                .chain([self.eval(t0), self.eval(t_end)])
                .fold(0.0f64, f64::max),
        }
    }
}

/// Initial temperature profile on [0, b], stored on the mapped grid p = x/b.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialData {
    Zero,
    /// nodal samples on the mapped grid
    Mapped(Vec<f64>),
    /// physical-space table (x, u) on [0, b]; resampled monotone-cubically
    PhysicalTable(Vec<(f64, f64)>),
    /// scale * M/Gamma(1+alpha) * (b^alpha - x^alpha), the comparison bound
    Envelope { scale: f64 },
}

impl InitialData {
    /// Nodal samples on the mapped grid for a given problem geometry.
    pub fn resolve(&self, grid: &Grid, alpha: f64, b: f64, sup_h: f64) -> Result<Vec<f64>> {
        let n = grid.n_nodes();
        let out = match self {
            InitialData::Zero => vec![0.0; n],
            InitialData::Mapped(v) => {
                grid.check_len(v)?;
                v.clone()
            }
            InitialData::PhysicalTable(rows) => {
                let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
                let us: Vec<f64> = rows.iter().map(|r| r.1).collect();
                let targets: Vec<f64> = grid.nodes().iter().map(|&p| p * b).collect();
                pchip_resample(&xs, &us, &targets)?
            }
            InitialData::Envelope { scale } => {
                let c = scale * sup_h / gamma(1.0 + alpha);
                grid.nodes()
                    .iter()
                    .map(|&p| c * (b.powf(alpha) - (p * b).powf(alpha)))
                    .collect()
            }
        };
        Ok(out)
    }
}

/// Full problem statement for the b > 0 free-boundary solve.
#[derive(Debug, Clone)]
pub struct StefanProblem {
    pub alpha: f64,
    pub h: FluxSpec,
    pub b: f64,
    pub u0: InitialData,
    pub horizon: f64,
    /// restart instant; 0 for a fresh start
    pub t0: f64,
}

impl StefanProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        self.h.validate()?;
        if !(self.b >= 0.0) || !self.b.is_finite() {
            return Err(Error::InvalidParameter(format!("b must be >= 0, got {}", self.b)));
        }
        if !(self.horizon > self.t0) {
            return Err(Error::InvalidParameter(format!(
                "horizon {} must exceed t0 {}",
                self.horizon, self.t0
            )));
        }
        Ok(())
    }

    /// Resolve u0 to mapped nodal samples and check admissibility
    /// (nonnegative, vanishing at the front).
    pub fn initial_profile(&self, grid: &Grid) -> Result<Vec<f64>> {
        let m = self.h.sup(self.t0.max(1e-12), self.horizon);
        let u0 = self.u0.resolve(grid, self.alpha, self.b, m)?;
        if u0.iter().any(|v| !v.is_finite() || *v < -1e-12) {
            return Err(Error::InvalidParameter("u0 must be nonnegative".into()));
        }
        if self.b > 0.0 {
            let last = *u0.last().unwrap();
            if last.abs() > 1e-9 * (1.0 + m) {
                return Err(Error::InvalidParameter(format!(
                    "u0 must vanish at the front (u0(b) = {last})"
                )));
            }
        }
        Ok(u0)
    }

    /// Velocity bound M = sup h used for the admissible set.
    pub fn velocity_bound(&self, dt: f64) -> f64 {
        let start = if self.t0 > 0.0 { self.t0 } else { dt };
        self.h.sup(start, self.horizon)
    }
}

/// The free boundary as a time series with velocities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl FrontPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>, velocities: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() != velocities.len() || times.is_empty() {
            return Err(Error::InvalidParameter("front path arrays must share a length".into()));
        }
        Ok(FrontPath { times, values, velocities })
    }

    /// Constant path s = b (admissible initial guess for the fixed point).
    pub fn constant(times: Vec<f64>, b: f64) -> Self {
        let n = times.len();
        FrontPath { times, values: vec![b; n], velocities: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Linear interpolation of s(t); clamps outside the stored range.
    pub fn eval(&self, t: f64) -> f64 {
        let ts = &self.times;
        if t <= ts[0] {
            return self.values[0];
        }
        if t >= ts[ts.len() - 1] {
            return self.values[ts.len() - 1];
        }
        let k = ts.partition_point(|&tk| tk <= t) - 1;
        let frac = (t - ts[k]) / (ts[k + 1] - ts[k]);
        self.values[k] + (self.values[k + 1] - self.values[k]) * frac
    }

    /// Worst violations of the admissibility invariants
    /// (monotone, velocity in [0, bound]); all <= 0 when admissible.
    pub fn admissibility_defect(&self, bound: f64) -> f64 {
        let mut worst: f64 = f64::NEG_INFINITY;
        for w in self.values.windows(2) {
            worst = worst.max(w[0] - w[1]); // must be nondecreasing
        }
        for &v in &self.velocities {
            worst = worst.max(-v).max(v - bound);
        }
        worst
    }
}
