//! Dense real matrices at desk scale (the closed loop is 2n x 2n with n
//! small). Everything is deterministic: fixed elimination order, fixed
//! Jacobi sweep order, no randomized starts.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row major
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows_in: &[Vec<f64>]) -> Self {
        let rows = rows_in.len();
        let cols = if rows == 0 { 0 } else { rows_in[0].len() };
        let mut data = Vec::with_capacity(rows * cols);
        for r in rows_in {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dimensions");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Induced 2-norm (largest singular value), computed as the square root
    /// of the top eigenvalue of A^T A via cyclic Jacobi.
    pub fn spectral_norm(&self) -> f64 {
        if self.max_abs() == 0.0 {
            return 0.0;
        }
        let gram = self.transpose().matmul(self);
        symmetric_eigmax(&gram).max(0.0).sqrt()
    }

    /// Characteristic polynomial coefficients [1, c1, ..., cN] of a square
    /// matrix (lambda^N + c1 lambda^{N-1} + ... + cN), by the
    /// Faddeev-LeVerrier recursion. Exact arithmetic flow, O(N^4).
    pub fn char_poly_coeffs(&self) -> Vec<f64> {
        assert_eq!(self.rows, self.cols, "char poly of non-square matrix");
        let n = self.rows;
        let mut coeffs = vec![0.0; n + 1];
        coeffs[0] = 1.0;
        let mut m = Mat::identity(n);
        for k in 1..=n {
            let am = self.matmul(&m);
            let c = -am.trace() / k as f64;
            coeffs[k] = c;
            m = am;
            for i in 0..n {
                let v = m.get(i, i) + c;
                m.set(i, i, v);
            }
        }
        coeffs
    }
}

/// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
fn symmetric_eigmax(a: &Mat) -> f64 {
    let n = a.rows();
    let mut m = a.clone();
    let scale = m.max_abs().max(1.0);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    (0..n)
        .map(|i| m.get(i, i))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Gaussian elimination with partial pivoting. A pivot below
/// 1e-12 * max|entry| declares the system singular.
pub fn solve_gaussian(m: &Mat, rhs: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(m.rows(), m.cols(), "solve requires a square matrix");
    assert_eq!(m.rows(), rhs.len(), "rhs length");
    let n = m.rows();
    let threshold = 1e-12 * m.max_abs();
    let mut a = m.clone();
    let mut b = rhs.to_vec();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = a.get(col, col).abs();
        for r in (col + 1)..n {
            let mag = a.get(r, col).abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag <= threshold {
            return Err(Error::SingularSylvester(format!(
                "pivot {pivot_mag:e} at column {col} below threshold {threshold:e}"
            )));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a.get(col, j);
                a.set(col, j, a.get(pivot_row, j));
                a.set(pivot_row, j, tmp);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a.get(col, col);
        for r in (col + 1)..n {
            let factor = a.get(r, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            a.set(r, col, 0.0);
            for j in (col + 1)..n {
                let v = a.get(r, j) - factor * a.get(col, j);
                a.set(r, j, v);
            }
            b[r] -= factor * b[col];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc -= a.get(i, j) * x[j];
        }
        x[i] = acc / a.get(i, i);
    }
    Ok(x)
}

/// |det M| via the same elimination; 0 when a pivot vanishes.
pub fn det_abs(m: &Mat) -> f64 {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut a = m.clone();
    let mut det = 1.0f64;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = a.get(col, col).abs();
        for r in (col + 1)..n {
            let mag = a.get(r, col).abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a.get(col, j);
                a.set(col, j, a.get(pivot_row, j));
                a.set(pivot_row, j, tmp);
            }
        }
        let pivot = a.get(col, col);
        det *= pivot;
        for r in (col + 1)..n {
            let factor = a.get(r, col) / pivot;
            for j in col..n {
                let v = a.get(r, j) - factor * a.get(col, j);
                a.set(r, j, v);
            }
        }
    }
    det.abs()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_hand_matrix() {
        // A = [[1,2],[-0.5,-1]]: A^T A has eigenvalues {6.25, 0}, so ||A|| = 2.5.
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![-0.5, -1.0]]);
        assert!((a.spectral_norm() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_diagonal_and_zero() {
        let d = Mat::from_rows(&[vec![3.0, 0.0], vec![0.0, -7.0]]);
        assert!((d.spectral_norm() - 7.0).abs() < 1e-12);
        assert_eq!(Mat::zeros(3, 3).spectral_norm(), 0.0);
    }

    #[test]
    fn char_poly_of_companion_recovers_coefficients() {
        // Companion of z^3 - 2z^2 + 0.5z - 0.25.
        let c = Mat::from_rows(&[
            vec![2.0, -0.5, 0.25],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let p = c.char_poly_coeffs();
        let want = [1.0, -2.0, 0.5, -0.25];
        for (got, want) in p.iter().zip(want.iter()) {
            assert!((got - want).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn char_poly_of_deadbeat_block() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![-0.5, -1.0]]);
        let p = a.char_poly_coeffs();
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert!(p[1].abs() < 1e-15 && p[2].abs() < 1e-15, "{p:?}");
    }

    #[test]
    fn gaussian_solve_identity_and_singular() {
        let id = Mat::identity(2);
        let x = solve_gaussian(&id, &[3.0, 4.0]).unwrap();
        assert_eq!(x, vec![3.0, 4.0]);

        let sing = Mat::from_rows(&[vec![1.0, 2.0], vec![0.0, 0.0]]);
        assert!(matches!(
            solve_gaussian(&sing, &[1.0, 1.0]),
            Err(Error::SingularSylvester(_))
        ));
    }

    #[test]
    fn det_abs_matches_hand_values() {
        let m = Mat::from_rows(&[vec![1.0, 0.0], vec![-1.0, 2.0]]);
        assert!((det_abs(&m) - 2.0).abs() < 1e-12);
        let z = Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(det_abs(&z), 0.0);
    }
}
