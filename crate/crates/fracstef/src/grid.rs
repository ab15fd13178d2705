//! Uniform partition of the fixed cylinder [0, 1].

use crate::error::{Error, Result};

/// Uniform grid on [0, 1] with `n_cells` cells and `n_cells + 1` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_cells: usize,
    spacing: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidParameter("grid needs at least one cell".into()));
        }
        let n = n_cells as f64;
        let nodes: Vec<f64> = (0..=n_cells).map(|i| i as f64 / n).collect();
        Ok(Grid { n_cells, spacing: 1.0 / n, nodes })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Number of nodes, `n_cells + 1`.
    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Positions where the Caputo flux is tabulated: 0, the cell midpoints,
    /// and 1. Length `n_cells + 2`.
    pub fn flux_positions(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_cells + 2);
        p.push(0.0);
        for i in 0..self.n_cells {
            p.push((i as f64 + 0.5) * self.spacing);
        }
        p.push(1.0);
        p
    }

    pub(crate) fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.n_nodes() {
            return Err(Error::LengthMismatch { got: f.len(), want: self.n_nodes() });
        }
        Ok(())
    }
}
