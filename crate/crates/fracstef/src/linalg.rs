//! Shifted dense solves (I - c A) x = b reusing one Hessenberg reduction.
//!
//! The diffusion matrix is fixed per grid while the scalar c = dt / s^{1+a}
//! changes every step. Reducing A = Q H Q^T once makes each shifted solve an
//! O(N^2) Hessenberg elimination instead of an O(N^3) refactorization.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ShiftedSolver {
    q: DMatrix<f64>,
    h: DMatrix<f64>,
    n: usize,
}

impl ShiftedSolver {
    pub fn new(a: DMatrix<f64>) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "matrix must be square");
        let hess = nalgebra::linalg::Hessenberg::new(a);
        let q = hess.q();
        let h = hess.h();
        ShiftedSolver { q, h, n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve (I - c A) x = b. `t` only labels the error report.
    pub fn solve(&self, c: f64, b: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        let n = self.n;
        let y = self.q.tr_mul(b);
        // m = I - c H, upper Hessenberg
        let mut m = self.h.clone();
        m.iter_mut().for_each(|v| *v *= -c);
        for i in 0..n {
            m[(i, i)] += 1.0;
        }
        // Hessenberg elimination with adjacent-row partial pivoting
        let mut rhs = y;
        for k in 0..n - 1 {
            if m[(k + 1, k)].abs() > m[(k, k)].abs() {
                m.swap_rows(k, k + 1);
                rhs.swap_rows(k, k + 1);
            }
            let pivot = m[(k, k)];
            if pivot.abs() < 1e-300 {
                return Err(Error::SingularSystem { t, pivot });
            }
            let factor = m[(k + 1, k)] / pivot;
            if factor != 0.0 {
                for j in k..n {
                    let upper = m[(k, j)];
                    m[(k + 1, j)] -= factor * upper;
                }
                let r = rhs[k];
                rhs[k + 1] -= factor * r;
            }
        }
        if m[(n - 1, n - 1)].abs() < 1e-300 {
            return Err(Error::SingularSystem { t, pivot: m[(n - 1, n - 1)] });
        }
        // back substitution
        let mut z = DVector::zeros(n);
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for j in i + 1..n {
                acc -= m[(i, j)] * z[j];
            }
            z[i] = acc / m[(i, i)];
        }
        Ok(&self.q * z)
    }
}
