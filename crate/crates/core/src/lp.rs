//! Dense primal simplex for small linear programs
//! `max c·x  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! The slack basis is feasible from the start, so a single phase suffices.
//! Bland's rule keeps degenerate pivots from cycling.

use crate::error::{Error, Result};

const TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

/// Optimal primal point, objective value and dual multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per constraint row, `≥ 0`.
    pub dual: Vec<f64>,
}

pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::Solver("inconsistent dimensions".into()));
    }
    if b.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::Solver(
            "right-hand side must be finite and >= 0".into(),
        ));
    }
    if c.iter().chain(a.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite coefficient".into()));
    }
    let width = n + m + 1;
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        t[i * width..i * width + n].copy_from_slice(&a[i]);
        t[i * width + n + i] = 1.0;
        t[i * width + width - 1] = b[i];
    }
    for j in 0..n {
        t[m * width + j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..MAX_PIVOTS {
        let obj = &t[m * width..(m + 1) * width];
        let Some(enter) = (0..n + m).find(|&j| obj[j] < -TOL) else {
            let mut x = vec![0.0; n + m];
            for (i, &bv) in basis.iter().enumerate() {
                x[bv] = t[i * width + width - 1];
            }
            let dual = (0..m).map(|i| t[m * width + n + i].max(0.0)).collect();
            x.truncate(n);
            return Ok(LpSolution {
                x,
                objective: t[m * width + width - 1],
                dual,
            });
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let piv = t[i * width + enter];
            if piv > TOL {
                let ratio = t[i * width + width - 1] / piv;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - TOL || (ratio <= lr + TOL && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Solver("objective is unbounded".into()));
        };
        let piv = t[row * width + enter];
        for v in &mut t[row * width..(row + 1) * width] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
        for i in 0..=m {
            if i == row {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for (v, p) in t[i * width..(i + 1) * width].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        basis[row] = enter;
    }
    Err(Error::Solver(format!(
        "no optimum after {MAX_PIVOTS} pivots"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y; x <= 4; 2y <= 12; 3x + 2y <= 18  ->  (2, 6), 36.
        let s = maximize(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        // Strong duality.
        let dual_obj: f64 = s
            .dual
            .iter()
            .zip([4.0, 12.0, 18.0])
            .map(|(y, b)| y * b)
            .sum();
        assert!((dual_obj - 36.0).abs() < 1e-10);
    }

    #[test]
    fn unbounded_is_reported() {
        let r = maximize(&[1.0], &[vec![-1.0]], &[1.0]);
        assert!(matches!(r, Err(Error::Solver(_))));
    }

    #[test]
    fn degenerate_rows() {
        let s = maximize(
            &[1.0, 1.0],
            &[
                vec![1.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0],
            ],
            &[0.0, 0.0, 1.0, 1.0],
        )
        .unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }
}
