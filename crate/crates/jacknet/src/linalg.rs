//! Small dense linear algebra helpers.
//!
//! Networks are tiny (d up to a few dozen), so everything here is plain
//! partial-pivot elimination on row-major `Vec<Vec<f64>>` matrices.

use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<f64>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn zeros(n: usize) -> Matrix {
    vec![vec![0.0; n]; n]
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn mat_add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

/// Row vector times matrix: (v A)_j.
pub fn vec_mat(v: &[f64], a: &Matrix) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|j| (0..n).map(|i| v[i] * a[i][j]).sum())
        .collect()
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::Dimension(format!(
            "rhs length {} does not match matrix order {n}",
            b.len()
        )));
    }
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let (piv, piv_val) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if piv_val < 1e-14 {
            return Err(Error::Singular(format!("pivot {piv_val:.3e} in column {col}")));
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for c in col..=n {
                m[r][c] -= factor * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = m[row][n];
        for c in row + 1..n {
            s -= m[row][c] * x[c];
        }
        x[row] = s / m[row][row];
    }
    Ok(x)
}

/// Inverse by solving against each unit vector.
pub fn invert(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve_linear(a, &e)?);
    }
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

/// Spectral radius of a nonnegative matrix via Gelfand's formula with
/// repeated squaring: rho = lim ||A^{2^m}||^{1/2^m}.
///
/// Each squaring is preceded by a max-entry rescale whose logarithm is
/// accumulated, so nilpotent and periodic matrices (where plain power
/// iteration stalls) are handled exactly; after 64 squarings the implicit
/// exponent 2^64 drives the polynomial Jordan factors below rounding.
pub fn spectral_radius(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let max_entry =
        |m: &Matrix| m.iter().flatten().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let mut b = a.clone();
    let mut log_r = 0.0;
    let mut weight = 1.0;
    for _ in 0..64 {
        let s = max_entry(&b);
        if s == 0.0 {
            return 0.0;
        }
        log_r += weight * s.ln();
        let normalized = scale(&b, 1.0 / s);
        b = mat_mul(&normalized, &normalized);
        weight *= 0.5;
    }
    log_r.exp()
}

pub fn mat_vec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn scale(a: &Matrix, s: f64) -> Matrix {
    a.iter().map(|row| row.iter().map(|x| x * s).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_roundtrip() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_linear(&a, &[5.0, 10.0]).unwrap();
        assert!((2.0 * x[0] + x[1] - 5.0).abs() < 1e-12);
        assert!((x[0] + 3.0 * x[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn invert_matches_identity() {
        let a = vec![vec![1.0, -0.5, 0.0], vec![0.2, 1.0, -0.3], vec![0.0, -0.1, 1.0]];
        let inv = invert(&a).unwrap();
        let prod = mat_mul(&a, &inv);
        assert!(max_abs_diff(&prod, &identity(3)) < 1e-12);
    }

    #[test]
    fn singular_reported() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(matches!(solve_linear(&a, &[1.0, 1.0]), Err(Error::Singular(_))));
    }

    #[test]
    fn spectral_radius_nilpotent() {
        // strictly upper triangular => nilpotent, radius 0
        let a = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
        assert!(spectral_radius(&a) < 1e-9);
    }

    #[test]
    fn spectral_radius_doubly_stochastic() {
        let a = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!((spectral_radius(&a) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_radius_substochastic() {
        let a = vec![vec![0.0, 0.5], vec![0.25, 0.0]];
        // eigenvalues +/- sqrt(0.125)
        assert!((spectral_radius(&a) - 0.125f64.sqrt()).abs() < 1e-9);
    }
}
