//! Dense simplex solver for small matrix games.
//!
//! The Gamma-membership test reduces, per queue, to the value of the
//! two-player zero-sum game with payoff M[j][k]: the maximizing player
//! mixes over rows (the simplex vector theta), the minimizing player over
//! columns (directions v on a coordinate face). Both optimal strategies
//! are recovered from one primal simplex run.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GameSolution {
    /// Value of the game: max_theta min_k (theta^T M)_k.
    pub value: f64,
    /// Optimal mixed strategy over rows (length = rows of M).
    pub row_strategy: Vec<f64>,
    /// Optimal mixed strategy over columns (length = cols of M).
    pub col_strategy: Vec<f64>,
}

/// Solve the matrix game max_{theta in simplex} min_k (theta^T M)_k.
///
/// Shifts M positive, then solves max 1.y s.t. M'y <= 1, y >= 0 by primal
/// simplex from the slack basis; the row strategy comes from the duals.
pub fn solve_matrix_game(m: &[Vec<f64>]) -> Result<GameSolution> {
    let rows = m.len();
    if rows == 0 {
        return Err(Error::LpFailure("game has no rows".into()));
    }
    let cols = m[0].len();
    if cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(Error::LpFailure("game matrix is ragged or empty".into()));
    }

    let min_entry = m
        .iter()
        .flat_map(|r| r.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min_entry;

    // Tableau: rows constraints, columns = y variables + slacks + rhs.
    let width = cols + rows + 1;
    let mut tab: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            let mut row = vec![0.0; width];
            for k in 0..cols {
                row[k] = m[i][k] + shift;
            }
            row[cols + i] = 1.0;
            row[width - 1] = 1.0;
            row
        })
        .collect();
    // Objective row holds reduced costs (maximize sum of y).
    let mut obj = vec![0.0; width];
    for k in 0..cols {
        obj[k] = 1.0;
    }
    let mut basis: Vec<usize> = (0..rows).map(|i| cols + i).collect();

    const EPS: f64 = 1e-12;
    for _ in 0..20_000 {
        // Bland's rule: smallest index with positive reduced cost.
        let Some(enter) = (0..cols + rows).find(|&j| obj[j] > EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for (i, row) in tab.iter().enumerate() {
            if row[enter] > EPS {
                let ratio = row[width - 1] / row[enter];
                if ratio < best_ratio - EPS
                    || (ratio < best_ratio + EPS
                        && leave.is_some_and(|l| basis[i] < basis[l]))
                {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return Err(Error::LpFailure("unbounded game LP".into()));
        };
        // pivot
        let pivot = tab[leave][enter];
        for v in tab[leave].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = tab[leave].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != leave && row[enter].abs() > 0.0 {
                let factor = row[enter];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        let factor = obj[enter];
        if factor.abs() > 0.0 {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
        }
        basis[leave] = enter;
    }

    // Optimal y and objective
    let mut y = vec![0.0; cols];
    for (i, &b) in basis.iter().enumerate() {
        if b < cols {
            y[b] = tab[i][width - 1];
        }
    }
    let y_sum: f64 = y.iter().sum();
    if y_sum <= EPS {
        return Err(Error::LpFailure("degenerate game: zero objective".into()));
    }
    let shifted_value = 1.0 / y_sum;

    // Duals: negated reduced costs on the slack columns.
    let mut x = vec![0.0; rows];
    for i in 0..rows {
        x[i] = (-obj[cols + i]).max(0.0);
    }
    let x_sum: f64 = x.iter().sum();
    if x_sum <= EPS {
        return Err(Error::LpFailure("degenerate game: zero dual".into()));
    }

    Ok(GameSolution {
        value: shifted_value - shift,
        row_strategy: x.iter().map(|v| v / x_sum).collect(),
        col_strategy: y.iter().map(|v| v / y_sum).collect(),
    })
}
