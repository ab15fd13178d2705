//! One-phase, one-dimensional space-fractional Stefan problem with a
//! prescribed non-local (Caputo) flux at the fixed face.
//!
//! The governing equation is u_t = d/dx D^alpha_x u on the melting region
//! 0 < x < s(t), with -D^alpha_x u(0+, t) = h(t), u(s(t), t) = 0 and the
//! fractional Stefan condition s_dot = -D^alpha_x u(s(t), t). The solver
//! front-fixes onto the unit cylinder, splits off the x^alpha boundary
//! layer, and integrates the regular remainder with an IMEX product-
//! integration scheme. The exact self-similar pair built from Kilbas-Saigo
//! functions provides the quantitative benchmark; the qualitative theory
//! (positivity, comparison envelope, front monotonicity) runs as an
//! executable property suite.

// `!(x > 0.0)` style guards are used on purpose: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifact;
pub mod error;
pub mod fbp;
pub mod fracops;
pub mod grid;
pub mod linalg;
pub mod mbp;
pub mod mlf;
pub mod problem;
pub mod props;
pub mod quad;
pub mod split;
pub mod util;

pub use error::{Error, Result};
pub use fbp::{solve_b_zero, solve_fbp, stefan_residual, BZeroSweep, FbpMode, FbpRun};
pub use fracops::FracWeights;
pub use grid::Grid;
pub use mbp::{solve_mbp, SolutionField, Stepper};
pub use mlf::{eta_solve, h_alpha, ml3, AnalyticBenchmark, KilbasSaigo, MlParams};
pub use problem::{FluxSpec, FrontPath, InitialData, StefanProblem};
pub use props::{CheckStatus, PropertyReport};
pub use split::{transformed_source, Blend, SingularSplit};
