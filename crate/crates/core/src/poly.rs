//! Polynomials in the backward-shift variable z^{-1}, the Sylvester system
//! behind pole placement, coprimeness margins, and Schur stability tests.
//!
//! A polynomial is a dense coefficient vector c0..cm where ck multiplies
//! z^{-k}; the degree is implied by the length. Degrees here are tiny, so
//! there is no sparse form.

use crate::error::{Error, Result};
use crate::matrix::{self, Mat};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "polynomial needs at least one coefficient"
        );
        debug_assert!(coeffs.iter().all(|c| c.is_finite()));
        Poly { coeffs }
    }

    pub fn one() -> Self {
        Poly::new(vec![1.0])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of z^{-k}; zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// c0 == 1 exactly (A, A_hat, L_hat, A* are monic).
    pub fn is_monic(&self) -> bool {
        self.coeffs[0] == 1.0
    }

    /// c0 == 0 exactly (B, B_hat, P_hat are strictly causal).
    pub fn is_strictly_causal(&self) -> bool {
        self.coeffs[0] == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Value at z = 1, i.e. the plain sum of coefficients.
    pub fn eval_at_one(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn inf_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Coefficient convolution; degree = deg p + deg q.
    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }
}

/// 1 - z^{-1}, the differencing factor used by the step-tracking design.
pub fn one_minus_shift() -> Poly {
    Poly::new(vec![1.0, -1.0])
}

/// The linear system whose solution is the Diophantine controller pair.
/// Unknowns are ordered (l1..ln, p1..pn); row k equates the z^{-k}
/// coefficient of A_hat*L_hat + B_hat*P_hat with that of A*.
#[derive(Clone, Debug)]
pub struct SylvesterSystem {
    pub matrix: Mat,
    pub rhs: Vec<f64>,
}

/// Build the coefficient-matching system for
/// A_hat(z^{-1}) L_hat(z^{-1}) + B_hat(z^{-1}) P_hat(z^{-1}) = A*(z^{-1}),
/// with A_hat monic of (structural) degree n, B_hat strictly causal of
/// degree n, and deg A* <= 2n. The shorter of A_hat/B_hat is zero-padded.
pub fn sylvester_system(a_hat: &Poly, b_hat: &Poly, a_star: &Poly) -> Result<SylvesterSystem> {
    if !a_hat.is_monic() {
        return Err(Error::DimensionMismatch("A_hat must be monic".into()));
    }
    if !b_hat.is_strictly_causal() {
        return Err(Error::DimensionMismatch(
            "B_hat must be strictly causal (zero constant term)".into(),
        ));
    }
    if !a_star.is_monic() {
        return Err(Error::DimensionMismatch("A* must be monic".into()));
    }
    let n = a_hat.degree().max(b_hat.degree()).max(1);
    if a_star.degree() > 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "deg A* = {} exceeds 2n = {}",
            a_star.degree(),
            2 * n
        )));
    }

    let dim = 2 * n;
    let mut m = Mat::zeros(dim, dim);
    let mut rhs = vec![0.0; dim];
    for k in 1..=dim {
        for i in 1..=n {
            if k >= i {
                m.set(k - 1, i - 1, a_hat.coeff(k - i));
                m.set(k - 1, n + i - 1, b_hat.coeff(k - i));
            }
        }
        rhs[k - 1] = a_star.coeff(k) - a_hat.coeff(k);
    }
    Ok(SylvesterSystem { matrix: m, rhs })
}

/// Solve the system by Gaussian elimination with partial pivoting, then
/// verify the residual against the solved system.
pub fn solve_linear(sys: &SylvesterSystem) -> Result<Vec<f64>> {
    let x = matrix::solve_gaussian(&sys.matrix, &sys.rhs)?;
    let mut resid = 0.0f64;
    for i in 0..sys.rhs.len() {
        let mut acc = -sys.rhs[i];
        for j in 0..x.len() {
            acc += sys.matrix.get(i, j) * x[j];
        }
        resid = resid.max(acc.abs());
    }
    let rhs_scale = sys.rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if resid > 1e-10 * rhs_scale {
        return Err(Error::SingularSylvester(format!(
            "solution residual {resid:e} exceeds 1e-10 * {rhs_scale:e}"
        )));
    }
    Ok(x)
}

/// Coprimeness of (A_hat, B_hat), quantified as |det| of the Sylvester
/// matrix scaled by its induced norm. Zero iff the pair shares a root at
/// the declared degrees (up to numerics).
pub fn coprimeness_margin(a_hat: &Poly, b_hat: &Poly) -> f64 {
    let n = a_hat.degree().max(b_hat.degree()).max(1);
    let dim = 2 * n;
    let mut m = Mat::zeros(dim, dim);
    for k in 1..=dim {
        for i in 1..=n {
            if k >= i {
                m.set(k - 1, i - 1, a_hat.coeff(k - i));
                m.set(k - 1, n + i - 1, b_hat.coeff(k - i));
            }
        }
    }
    let norm = m.spectral_norm();
    if norm == 0.0 {
        return 0.0;
    }
    matrix::det_abs(&m) / norm.powi(dim as i32)
}

/// Schur test: true iff every root of z^m p(z^{-1}) lies strictly inside
/// the unit disk. Implemented as the Schur-Cohn/Jury reduction, which runs
/// in exact arithmetic flow (no root extraction).
pub fn jury_stable(p: &Poly) -> bool {
    assert!(p.is_monic(), "jury_stable expects a monic polynomial");
    let m = p.degree();
    // Ascending coefficients of q(z) = z^m p(z^{-1}).
    let mut q: Vec<f64> = (0..=m).map(|i| p.coeff(m - i)).collect();
    while q.len() > 1 {
        let deg = q.len() - 1;
        let a0 = q[0];
        let an = q[deg];
        if a0.abs() >= an.abs() {
            return false;
        }
        let mut next = vec![0.0; deg];
        for k in 0..deg {
            next[k] = an * q[k + 1] - a0 * q[deg - 1 - k];
        }
        q = next;
    }
    true
}

const POWER_ITER_BUDGET: usize = 100_000;
const POWER_ITER_TOL: f64 = 1e-10;

/// Largest root magnitude of z^m p(z^{-1}), from the companion matrix by
/// iterated power steps with a deterministic start vector. The all-zero
/// (nilpotent) case is detected explicitly since power iteration
/// degenerates there. A dominant complex pair is resolved through the
/// two-step recurrence fit; spectra with three-way magnitude ties are
/// reported as NoConvergence and left to the caller.
pub fn spectral_radius(p: &Poly) -> Result<f64> {
    assert!(p.is_monic(), "spectral_radius expects a monic polynomial");
    let m = p.degree();
    if m == 0 || p.coeffs()[1..].iter().all(|c| *c == 0.0) {
        return Ok(0.0);
    }

    // Companion of z^m + c1 z^{m-1} + ... + cm.
    let mut c = Mat::zeros(m, m);
    for j in 0..m {
        c.set(0, j, -p.coeff(j + 1));
    }
    for i in 1..m {
        c.set(i, i - 1, 1.0);
    }

    let mut x: Vec<f64> = vec![1.0 / (m as f64).sqrt(); m];
    for _ in 0..POWER_ITER_BUDGET {
        let x1 = c.matvec(&x);
        let n1 = matrix::norm2(&x1);
        if n1 == 0.0 {
            return Ok(0.0);
        }

        // Candidate: real dominant eigenvalue via the Rayleigh quotient.
        let lam = matrix::dot(&x, &x1);
        let resid_real = {
            let mut s = 0.0;
            for i in 0..m {
                let d = x1[i] - lam * x[i];
                s += d * d;
            }
            s.sqrt()
        };
        if resid_real <= POWER_ITER_TOL * lam.abs().max(1.0) {
            return Ok(lam.abs());
        }

        // Candidate: dominant pair via x2 ~ s*x1 + t*x.
        let x2 = c.matvec(&x1);
        let g11 = matrix::dot(&x1, &x1);
        let g12 = matrix::dot(&x1, &x);
        let g22 = matrix::dot(&x, &x);
        let det = g11 * g22 - g12 * g12;
        if det > 1e-12 * g11 * g22 {
            let b1 = matrix::dot(&x1, &x2);
            let b2 = matrix::dot(&x, &x2);
            let s = (b1 * g22 - b2 * g12) / det;
            let t = (b2 * g11 - b1 * g12) / det;
            let mut resid_pair = 0.0;
            for i in 0..m {
                let d = x2[i] - s * x1[i] - t * x[i];
                resid_pair += d * d;
            }
            let resid_pair = resid_pair.sqrt();
            let scale = matrix::norm2(&x2).max(1.0);
            if resid_pair <= POWER_ITER_TOL * scale {
                let disc = s * s + 4.0 * t;
                let r = if disc >= 0.0 {
                    let sq = disc.sqrt();
                    (((s + sq) / 2.0).abs()).max(((s - sq) / 2.0).abs())
                } else {
                    (-t).sqrt()
                };
                return Ok(r);
            }
        }

        for i in 0..m {
            x[i] = x1[i] / n1;
        }
    }
    Err(Error::NoConvergence(POWER_ITER_BUDGET))
}
