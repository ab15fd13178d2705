//! Discrete fractional calculus on a uniform grid.
//!
//! All operators are product-integration (L1-type) rules: the data is
//! reconstructed piecewise-linearly and the weakly singular kernels
//! (x-p)^{alpha-1} / (x-p)^{-alpha} are integrated exactly against that
//! reconstruction, cell by cell. Weights are therefore exact for linear
//! data, and the Caputo tables annihilate constants identically because
//! they act on nodal differences.

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Dense product-integration tables for one (alpha, grid) pair.
///
/// * `integral_weights`  — (N+1)×(N+1) lower triangular, nodal I^alpha.
/// * `flux_weights`      — (N+2)×(N+1), Caputo D^alpha at 0, the N cell
///   midpoints, and 1 (rows act on nodal values via interior differences).
/// * `divergence_weights`— (N+1)×(N+1), conservative flux difference
///   (q_{i+1/2} - q_{i-1/2})/h per node; the boundary datum enters
///   separately in [`FracWeights::flux_divergence`].
#[derive(Debug, Clone)]
pub struct FracWeights {
    alpha: f64,
    grid: Grid,
    integral_weights: DMatrix<f64>,
    /// I^{1-alpha} table, used by the Riemann-Liouville derivative.
    integral_weights_conj: DMatrix<f64>,
    /// Caputo moments against cell slopes; the apply path.
    slope_weights: DMatrix<f64>,
    flux_weights: DMatrix<f64>,
    divergence_weights: DMatrix<f64>,
}

/// Nodal table of I^beta on `grid` (exact hat-function moments).
fn integral_table(beta: f64, grid: &Grid) -> DMatrix<f64> {
    let n = grid.n_cells();
    let h = grid.spacing();
    let inv_gamma = 1.0 / gamma(beta);
    let mut w = DMatrix::zeros(n + 1, n + 1);
    for i in 1..=n {
        let x = grid.node(i);
        for j in 0..i {
            // q = x - p over the cell [x_j, x_{j+1}]: q in [b_, a_]
            let a_ = x - grid.node(j);
            let b_ = x - grid.node(j + 1);
            let pow_a = a_.powf(beta);
            let pow_b = b_.powf(beta);
            let m0 = (a_ * pow_a - b_ * pow_b) / (beta + 1.0); // int q^beta dq
            let m1 = (pow_a - pow_b) / beta; // int q^{beta-1} dq
            // left hat (x_{j+1}-p)/h = (q - b_)/h, right hat (p-x_j)/h = (a_ - q)/h
            let left = (m0 - b_ * m1) / h;
            let right = (a_ * m1 - m0) / h;
            w[(i, j)] += inv_gamma * left;
            w[(i, j + 1)] += inv_gamma * right;
        }
    }
    w
}

/// Caputo kernel moments against the cell slopes, rows at the positions of
/// [`Grid::flux_positions`]: D^alpha f(x_r) = sum_j S[r][j] (f_{j+1} - f_j).
/// Acting on differences makes constants map to exactly zero.
fn slope_table(alpha: f64, grid: &Grid) -> DMatrix<f64> {
    let n = grid.n_cells();
    let h = grid.spacing();
    let c = 1.0 / gamma(1.0 - alpha);
    let pos = grid.flux_positions();
    let mut s = DMatrix::zeros(n + 2, n);
    for (r, &x) in pos.iter().enumerate() {
        if x <= 0.0 {
            continue; // row 0: D^alpha f(0+) of the linear interpolant is 0
        }
        for j in 0..n {
            let a_ = grid.node(j);
            if a_ >= x {
                break;
            }
            let b_ = grid.node(j + 1).min(x);
            // int_a^b (x-p)^{-alpha} dp, exact
            let k = ((x - a_).powf(1.0 - alpha) - (x - b_).powf(1.0 - alpha)) / (1.0 - alpha);
            s[(r, j)] = c * k / h;
        }
    }
    s
}

/// Nodal-basis flux rows derived from the slope moments.
fn flux_table(slope: &DMatrix<f64>) -> DMatrix<f64> {
    let rows = slope.nrows();
    let n = slope.ncols();
    let mut w = DMatrix::zeros(rows, n + 1);
    for r in 0..rows {
        for j in 0..n {
            w[(r, j)] -= slope[(r, j)];
            w[(r, j + 1)] += slope[(r, j)];
        }
    }
    w
}

impl FracWeights {
    /// Build all tables for order `alpha` in (0,1).
    pub fn build(alpha: f64, grid: &Grid) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        if grid.n_cells() < 4 {
            return Err(Error::InvalidParameter(format!(
                "need at least 4 cells, got {}",
                grid.n_cells()
            )));
        }
        let slope_weights = slope_table(alpha, grid);
        let flux_weights = flux_table(&slope_weights);
        let n = grid.n_cells();
        let h = grid.spacing();
        // node i sits between the faces i-1/2 and i+1/2 (flux rows i and i+1);
        // node 0 pairs the face 1/2 with the boundary datum, node N pairs the
        // endpoint row at 1 with the face N-1/2.
        let mut divergence_weights = DMatrix::zeros(n + 1, n + 1);
        for i in 0..=n {
            let upper = if i < n { flux_weights.row(i + 1) } else { flux_weights.row(n + 1) };
            for j in 0..=n {
                let lower = if i > 0 { flux_weights[(i, j)] } else { 0.0 };
                divergence_weights[(i, j)] = (upper[j] - lower) / h;
            }
        }
        Ok(FracWeights {
            alpha,
            grid: grid.clone(),
            integral_weights: integral_table(alpha, grid),
            integral_weights_conj: integral_table(1.0 - alpha, grid),
            slope_weights,
            flux_weights,
            divergence_weights,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn integral_weights(&self) -> &DMatrix<f64> {
        &self.integral_weights
    }

    pub fn flux_weights(&self) -> &DMatrix<f64> {
        &self.flux_weights
    }

    pub fn divergence_weights(&self) -> &DMatrix<f64> {
        &self.divergence_weights
    }

    /// Row of D^alpha at p = 1 (the last flux row), used for the front flux.
    pub fn endpoint_flux_row(&self) -> Vec<f64> {
        self.flux_weights.row(self.grid.n_cells() + 1).iter().copied().collect()
    }

    /// (I^alpha f) at every node; the value at x = 0 is 0.
    pub fn frac_integral(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(f)?;
        let v = &self.integral_weights * DVector::from_column_slice(f);
        Ok(v.data.into())
    }

    /// Right-sided integral I^alpha_- on the same grid; test helper for the
    /// mirrored operator identities. Value at x = 1 is 0.
    pub fn frac_integral_right(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(f)?;
        let rev: Vec<f64> = f.iter().rev().copied().collect();
        let mut out = self.frac_integral(&rev)?;
        out.reverse();
        Ok(out)
    }

    /// Caputo derivative D^alpha f at 0, the cell midpoints, and 1
    /// (length `n_cells + 2`). Exact for linear data; identically zero on
    /// constants.
    pub fn caputo_derivative(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(f)?;
        let diffs = DVector::from_fn(self.grid.n_cells(), |j, _| f[j + 1] - f[j]);
        let v = &self.slope_weights * diffs;
        Ok(v.data.into())
    }

    /// Riemann-Liouville derivative d/dx I^{1-alpha} f at the interior nodes
    /// x_1..x_{N-1}, by centered differencing of the I^{1-alpha} table.
    pub fn rl_derivative(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(f)?;
        let iconj = &self.integral_weights_conj * DVector::from_column_slice(f);
        let h = self.grid.spacing();
        Ok((1..self.grid.n_cells())
            .map(|i| (iconj[i + 1] - iconj[i - 1]) / (2.0 * h))
            .collect())
    }

    /// Conservative divergence of the Caputo flux, one value per node
    /// (node i owns the faces i∓1/2). `left_flux` is the prescribed value of
    /// -D^alpha f at x = 0 and replaces the table row there; the face at
    /// x = 1 uses the endpoint row. Summed against the spacing the result
    /// telescopes to q(1) - q(0).
    pub fn flux_divergence(&self, f: &[f64], left_flux: f64) -> Result<Vec<f64>> {
        self.grid.check_len(f)?;
        if !left_flux.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite left_flux {left_flux}")));
        }
        let n = self.grid.n_cells();
        let h = self.grid.spacing();
        let q = self.caputo_derivative(f)?; // [q(0)=0, q_{1/2}, .., q_{N-1/2}, q(1)]
        let q0 = -left_flux;
        let mut d = Vec::with_capacity(n + 1);
        d.push((q[1] - q0) / h);
        for i in 1..n {
            d.push((q[i + 1] - q[i]) / h);
        }
        d.push((q[n + 1] - q[n]) / h);
        Ok(d)
    }

    /// Both sides of the discrete conservation identity
    /// `spacing * sum(flux_divergence) = q(1) - q(0)`.
    pub fn conservation_defect(&self, f: &[f64], left_flux: f64) -> Result<(f64, f64)> {
        let d = self.flux_divergence(f, left_flux)?;
        let q = self.caputo_derivative(f)?;
        let lhs = self.grid.spacing() * d.iter().sum::<f64>();
        let rhs = q[self.grid.n_cells() + 1] - (-left_flux);
        Ok((lhs, rhs))
    }
}
