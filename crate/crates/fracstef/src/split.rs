//! The singular split: phi carries the x^alpha boundary layer forced by the
//! prescribed fractional flux, so the remaining unknown v is regular and the
//! discrete Caputo tables act only on smooth data.
//!
//! phi(x) = x^alpha / Gamma(1+alpha) on [0, 1/2], blends C^2-smoothly to 0
//! on [1/2, 3/4] (quintic smoothstep), vanishes on [3/4, 1]. Its fractional
//! derivatives are precomputed by adaptive quadrature with exact endpoint
//! substitutions; the grid tables are never applied to the singular kernel.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quad;

const BLEND_LO: f64 = 0.5;
const BLEND_HI: f64 = 0.75;
const BLEND_WIDTH: f64 = BLEND_HI - BLEND_LO;

/// Admissible blend shapes for phi on [1/2, 3/4]. Any choice changes v but
/// must leave the reconstructed u invariant (within scheme tolerance): the
/// quintic is the default, the cosine ramp exists to test exactly that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Blend {
    #[default]
    Quintic,
    Cosine,
}

impl Blend {
    fn eval(self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        if z >= 1.0 {
            return 0.0;
        }
        match self {
            Blend::Quintic => 1.0 - z * z * z * (10.0 - 15.0 * z + 6.0 * z * z),
            Blend::Cosine => 0.5 * (1.0 + (std::f64::consts::PI * z).cos()),
        }
    }

    fn d1(self, z: f64) -> f64 {
        if z <= 0.0 || z >= 1.0 {
            return 0.0;
        }
        match self {
            Blend::Quintic => -30.0 * z * z * (1.0 - z) * (1.0 - z),
            Blend::Cosine => {
                -0.5 * std::f64::consts::PI * (std::f64::consts::PI * z).sin()
            }
        }
    }

    fn d2(self, z: f64) -> f64 {
        if z <= 0.0 || z >= 1.0 {
            return 0.0;
        }
        match self {
            Blend::Quintic => -60.0 * z * (1.0 - z) * (1.0 - 2.0 * z),
            Blend::Cosine => {
                -0.5 * std::f64::consts::PI * std::f64::consts::PI
                    * (std::f64::consts::PI * z).cos()
            }
        }
    }
}

fn phi_with(blend: Blend, alpha: f64, x: f64) -> f64 {
    if x <= 0.0 || x >= BLEND_HI {
        return 0.0;
    }
    blend.eval((x - BLEND_LO) / BLEND_WIDTH) * x.powf(alpha) / gamma(1.0 + alpha)
}

fn phi_deriv_with(blend: Blend, alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x >= BLEND_HI {
        return 0.0;
    }
    let z = (x - BLEND_LO) / BLEND_WIDTH;
    let g1 = gamma(1.0 + alpha);
    blend.d1(z) / BLEND_WIDTH * x.powf(alpha) / g1
        + blend.eval(z) * alpha * x.powf(alpha - 1.0) / g1
}

fn phi_deriv2_with(blend: Blend, alpha: f64, x: f64) -> f64 {
    if x <= 0.0 || x >= BLEND_HI {
        return 0.0;
    }
    let z = (x - BLEND_LO) / BLEND_WIDTH;
    let g1 = gamma(1.0 + alpha);
    blend.d2(z) / (BLEND_WIDTH * BLEND_WIDTH) * x.powf(alpha) / g1
        + 2.0 * blend.d1(z) / BLEND_WIDTH * alpha * x.powf(alpha - 1.0) / g1
        + blend.eval(z) * alpha * (alpha - 1.0) * x.powf(alpha - 2.0) / g1
}

/// phi with the default quintic blend (derivative unbounded at 0).
pub fn phi(alpha: f64, x: f64) -> f64 {
    phi_with(Blend::Quintic, alpha, x)
}

pub fn phi_deriv(alpha: f64, x: f64) -> f64 {
    phi_deriv_with(Blend::Quintic, alpha, x)
}

/// D^alpha phi at X by quadrature. Exactly 1 on (0, 1/2] (power rule);
/// the value at 0 is the right-hand limit, also 1.
pub fn caputo_phi(alpha: f64, x_pos: f64, tol: f64) -> Result<f64> {
    caputo_phi_with(Blend::Quintic, alpha, x_pos, tol)
}

fn caputo_phi_with(blend: Blend, alpha: f64, x_pos: f64, tol: f64) -> Result<f64> {
    if x_pos <= BLEND_LO {
        return Ok(1.0);
    }
    let a = alpha;
    // history over [0, 1/2]: phi' = p^{alpha-1}/Gamma(alpha); u = p^alpha
    // removes the singularity exactly.
    let il = quad::integrate(
        |u| (x_pos - u.powf(1.0 / a)).powf(-a),
        0.0,
        BLEND_LO.powf(a),
        tol,
    )?
    .value
        / (a * gamma(a));
    // blend region [1/2, min(X, 3/4)]
    let hi = x_pos.min(BLEND_HI);
    let ir = if x_pos <= BLEND_HI + 1e-14 {
        // kernel endpoint touches the integration range: y = (X-p)^{1-a}
        let y_hi = (x_pos - BLEND_LO).powf(1.0 - a);
        let y_lo = if x_pos > BLEND_HI { (x_pos - BLEND_HI).powf(1.0 - a) } else { 0.0 };
        quad::integrate(
            |y| phi_deriv_with(blend, a, x_pos - y.powf(1.0 / (1.0 - a))),
            y_lo,
            y_hi,
            tol,
        )?
        .value
            / (1.0 - a)
    } else {
        quad::integrate(|p| (x_pos - p).powf(-a) * phi_deriv_with(blend, a, p), BLEND_LO, hi, tol)?
            .value
    };
    Ok((il + ir) / gamma(1.0 - a))
}

/// d/dx D^alpha phi at x by quadrature of the differentiated product-
/// integration form; identically zero on [0, 1/2].
pub fn div_caputo_phi(alpha: f64, x: f64, tol: f64) -> Result<f64> {
    div_caputo_phi_with(Blend::Quintic, alpha, x, tol)
}

fn div_caputo_phi_with(blend: Blend, alpha: f64, x: f64, tol: f64) -> Result<f64> {
    if x <= BLEND_LO {
        return Ok(0.0);
    }
    let a = alpha;
    // A(x) = int_0^x (x-p)^{-a} phi'(p) dp = x^{1-a} int_0^1 (1-r)^{-a} phi'(xr) dr
    // A'(x) = (1-a) x^{-a} J1 + x^{1-a} J2,
    //   J1 = int_0^1 (1-r)^{-a} phi'(xr) dr,
    //   J2 = int_0^1 (1-r)^{-a} r phi''(xr) dr.
    // Left halves (r <= 1/2, so xr <= 1/2 stays in the pure power region)
    // share the substituted core integral int (1 - u^{1/a})^{-a} du.
    let core = quad::integrate(|u| (1.0 - u.powf(1.0 / a)).powf(-a), 0.0, 0.5f64.powf(a), tol)?
        .value;
    let j1_left = x.powf(a - 1.0) / (a * gamma(a)) * core;
    let j2_left = (a - 1.0) * x.powf(a - 2.0) / (a * gamma(a)) * core;
    // Right halves: y = (1-r)^{1-a}; junction kinks at xr = 1/2 and 3/4.
    let y_of_r = |r: f64| (1.0 - r).powf(1.0 - a);
    let y_hi = y_of_r(0.5);
    let mut splits = vec![0.0];
    for rj in [BLEND_LO / x, BLEND_HI / x] {
        if rj > 0.5 && rj < 1.0 {
            splits.push(y_of_r(rj));
        }
    }
    splits.push(y_hi);
    splits.sort_by(f64::total_cmp);
    let r_of_y = |y: f64| 1.0 - y.powf(1.0 / (1.0 - a));
    let j1_right = quad::integrate_split(|y| phi_deriv_with(blend, a, x * r_of_y(y)), &splits, tol)?
        .value
        / (1.0 - a);
    let j2_right = quad::integrate_split(
        |y| {
            let r = r_of_y(y);
            r * phi_deriv2_with(blend, a, x * r)
        },
        &splits,
        tol,
    )?
    .value
        / (1.0 - a);
    let a_prime = (1.0 - a) * x.powf(-a) * (j1_left + j1_right)
        + x.powf(1.0 - a) * (j2_left + j2_right);
    Ok(a_prime / gamma(1.0 - a))
}

/// Precomputed singular-split data on a grid.
#[derive(Debug, Clone)]
pub struct SingularSplit {
    alpha: f64,
    blend: Blend,
    /// phi at the nodes
    pub phi: Vec<f64>,
    /// x * phi'(x) at the nodes (finite everywhere, 0 at x = 0)
    pub x_phi_deriv: Vec<f64>,
    /// D^alpha phi at the flux positions (0, midpoints, 1)
    pub d_alpha_phi: Vec<f64>,
    /// d/dx D^alpha phi at the nodes
    pub div_phi: Vec<f64>,
}

impl SingularSplit {
    pub fn build(alpha: f64, grid: &Grid) -> Result<Self> {
        Self::build_with_blend(alpha, grid, Blend::Quintic)
    }

    pub fn build_with_blend(alpha: f64, grid: &Grid, blend: Blend) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        let tol = 1e-12;
        let phi_nodes: Vec<f64> =
            grid.nodes().iter().map(|&x| phi_with(blend, alpha, x)).collect();
        let x_phi_deriv = grid
            .nodes()
            .iter()
            .map(|&x| if x == 0.0 { 0.0 } else { x * phi_deriv_with(blend, alpha, x) })
            .collect();
        let d_alpha_phi = grid
            .flux_positions()
            .iter()
            .map(|&x| caputo_phi_with(blend, alpha, x, tol))
            .collect::<Result<Vec<f64>>>()?;
        let div_phi = grid
            .nodes()
            .iter()
            .map(|&x| div_caputo_phi_with(blend, alpha, x, tol))
            .collect::<Result<Vec<f64>>>()?;
        Ok(SingularSplit { alpha, blend, phi: phi_nodes, x_phi_deriv, d_alpha_phi, div_phi })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn blend(&self) -> Blend {
        self.blend
    }

    /// D^alpha phi at p = 1, the piece of the front flux carried by the
    /// singular part.
    pub fn d_alpha_phi_at_one(&self) -> f64 {
        *self.d_alpha_phi.last().unwrap()
    }
}

/// Source of the phi-auxiliary problem for the split w = v - h s^alpha phi:
/// g = rho_dot phi - s_dot s^{alpha-1} h x phi' - (h/s) d/dx D^alpha phi,
/// with rho = h s^alpha.
pub fn transformed_source(
    split: &SingularSplit,
    h_val: f64,
    h_dot: f64,
    s_val: f64,
    s_dot: f64,
    grid: &Grid,
) -> Result<Vec<f64>> {
    if !(s_val > 0.0) {
        return Err(Error::InvalidParameter(format!("front position must be positive, got {s_val}")));
    }
    let a = split.alpha;
    let rho_dot = h_dot * s_val.powf(a) + a * h_val * s_val.powf(a - 1.0) * s_dot;
    let adv = s_dot * s_val.powf(a - 1.0) * h_val;
    let dif = h_val / s_val;
    Ok((0..grid.n_nodes())
        .map(|i| rho_dot * split.phi[i] - adv * split.x_phi_deriv[i] - dif * split.div_phi[i])
        .collect())
}
