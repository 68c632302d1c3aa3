//! Certainty-equivalence pole placement: solve the Diophantine equation
//! A_hat L_hat + B_hat P_hat = A* for the controller polynomials, form the
//! strictly proper control input and feedforward term, and build the
//! closed-loop state matrix whose characteristic polynomial is pinned to
//! z^{2n} A*(z^{-1}).

use crate::error::{Error, Result};
use crate::estimation::{theta_to_polys, ThetaBox};
use crate::matrix::Mat;
use crate::poly::{self, one_minus_shift, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControllerMode {
    Standard,
    /// The differenced design of the step-tracking controller:
    /// L_hat = (1 - z^-1) L_tilde with one extra coefficient on each side.
    StepTracking,
}

#[derive(Clone, Debug)]
pub struct ControllerCoeffs {
    l: Vec<f64>,
    p: Vec<f64>,
    mode: ControllerMode,
}

impl ControllerCoeffs {
    /// l1..; the leading 1 of L_hat is implicit.
    pub fn l(&self) -> &[f64] {
        &self.l
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn mode(&self) -> ControllerMode {
        self.mode
    }

    pub fn l_poly(&self) -> Poly {
        Poly::new(std::iter::once(1.0).chain(self.l.iter().copied()).collect())
    }

    pub fn p_poly(&self) -> Poly {
        Poly::new(std::iter::once(0.0).chain(self.p.iter().copied()).collect())
    }
}

const DIOPHANTINE_RESIDUAL_TOL: f64 = 1e-10;

fn residual_check(a: &Poly, l: &Poly, b: &Poly, p: &Poly, target: &Poly) -> Result<()> {
    let resid = a.mul(l).add(&b.mul(p)).sub(target).inf_norm();
    let scale = target.inf_norm().max(1.0);
    if resid > DIOPHANTINE_RESIDUAL_TOL * scale {
        return Err(Error::SingularSylvester(format!(
            "Diophantine residual {resid:e} exceeds tolerance"
        )));
    }
    Ok(())
}

/// Standard design: unique (L_hat, P_hat) of degree n solving
/// A_hat L_hat + B_hat P_hat = A*, with deg A* <= 2n and A* Schur.
pub fn place_poles(a_hat: &Poly, b_hat: &Poly, a_star: &Poly) -> Result<ControllerCoeffs> {
    if !poly::jury_stable(a_star) {
        return Err(Error::UnstableTarget);
    }
    let n = a_hat.degree().max(b_hat.degree()).max(1);
    let sys = poly::sylvester_system(a_hat, b_hat, a_star)?;
    let x = poly::solve_linear(&sys)?;
    let coeffs = ControllerCoeffs {
        l: x[0..n].to_vec(),
        p: x[n..2 * n].to_vec(),
        mode: ControllerMode::Standard,
    };
    residual_check(a_hat, &coeffs.l_poly(), b_hat, &coeffs.p_poly(), a_star)?;
    Ok(coeffs)
}

const B_AT_ONE_MARGIN: f64 = 1e-8;

/// Step-tracking design: difference the denominator,
/// A_tilde = (1 - z^-1) A_hat, solve
/// A_tilde L_tilde + B_hat P_hat = A* with deg A* <= 2n + 2, and return
/// L_hat = (1 - z^-1) L_tilde of degree n + 2 alongside P_hat of degree
/// n + 1. Requires the estimated numerator to have no zero at z = 1.
pub fn place_poles_step_tracking(
    a_hat: &Poly,
    b_hat: &Poly,
    a_star: &Poly,
) -> Result<ControllerCoeffs> {
    let b_at_one = b_hat.eval_at_one();
    if b_at_one.abs() < B_AT_ONE_MARGIN {
        return Err(Error::ZeroAtOne(b_at_one.abs()));
    }
    if !poly::jury_stable(a_star) {
        return Err(Error::UnstableTarget);
    }
    let n = a_hat.degree().max(b_hat.degree()).max(1);
    let a_tilde = one_minus_shift().mul(a_hat);
    // Pad B_hat to the augmented structural degree n + 1.
    let mut b_padded = b_hat.coeffs().to_vec();
    b_padded.resize(n + 2, 0.0);
    let b_padded = Poly::new(b_padded);
    if a_star.degree() > 2 * n + 2 {
        return Err(Error::DimensionMismatch(format!(
            "deg A* = {} exceeds 2n + 2 = {}",
            a_star.degree(),
            2 * n + 2
        )));
    }
    let sys = poly::sylvester_system(&a_tilde, &b_padded, a_star)?;
    let x = poly::solve_linear(&sys)?;
    let l_tilde = Poly::new(
        std::iter::once(1.0)
            .chain(x[0..n + 1].iter().copied())
            .collect(),
    );
    let p = x[n + 1..2 * n + 2].to_vec();
    let l_hat = one_minus_shift().mul(&l_tilde);
    let coeffs = ControllerCoeffs {
        l: l_hat.coeffs()[1..].to_vec(),
        p,
        mode: ControllerMode::StepTracking,
    };
    residual_check(&a_tilde, &l_tilde, &b_padded, &coeffs.p_poly(), a_star)?;
    Ok(coeffs)
}

/// The strictly proper control law: with histories ordered most recent
/// first (`u_past[0]` = u(t-1), `y_past[0]` = y(t-1), ...),
/// u(t) = -sum_i l_i u(t-i) - sum_i p_i (y(t-i) - y*(t-i)),
/// using the coefficients synthesized one step earlier.
pub fn control_input(
    coeffs: &ControllerCoeffs,
    u_past: &[f64],
    y_past: &[f64],
    ystar_past: &[f64],
) -> Result<f64> {
    if u_past.len() < coeffs.l.len() {
        return Err(Error::InsufficientHistory {
            need: coeffs.l.len(),
            have: u_past.len(),
        });
    }
    if y_past.len() < coeffs.p.len() || ystar_past.len() < coeffs.p.len() {
        return Err(Error::InsufficientHistory {
            need: coeffs.p.len(),
            have: y_past.len().min(ystar_past.len()),
        });
    }
    let mut u = 0.0;
    for (i, l) in coeffs.l.iter().enumerate() {
        u -= l * u_past[i];
    }
    for (i, p) in coeffs.p.iter().enumerate() {
        u -= p * (y_past[i] - ystar_past[i]);
    }
    Ok(u)
}

/// r(t) = sum_i p_i y*(t+1-i), with `ystar_recent[0]` = y*(t).
pub fn feedforward_r(coeffs: &ControllerCoeffs, ystar_recent: &[f64]) -> Result<f64> {
    if ystar_recent.len() < coeffs.p.len() {
        return Err(Error::InsufficientHistory {
            need: coeffs.p.len(),
            have: ystar_recent.len(),
        });
    }
    Ok(coeffs
        .p
        .iter()
        .enumerate()
        .map(|(i, p)| p * ystar_recent[i])
        .sum())
}

/// The 2n x 2n closed-loop matrix of the standard design, with the block
/// companion structure: row 1 carries theta_hat, row n+1 carries
/// (-p_hat, -l_hat), and the remaining rows shift the y and u histories.
#[derive(Clone, Debug)]
pub struct ClosedLoopMatrix {
    mat: Mat,
    n: usize,
    char_poly: Poly,
}

impl ClosedLoopMatrix {
    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// B1 = e_1: the prediction error enters the y slot.
    pub fn b1_index(&self) -> usize {
        0
    }

    /// B2 = e_{n+1}: the feedforward term enters the u slot.
    pub fn b2_index(&self) -> usize {
        self.n
    }

    pub fn norm(&self) -> f64 {
        self.mat.spectral_norm()
    }

    /// Characteristic polynomial written in z^{-1}: by construction of the
    /// pole placement it equals z^{2n} A*(z^{-1}); computed here from the
    /// matrix itself by Faddeev-LeVerrier so the identity can be checked.
    pub fn char_poly(&self) -> &Poly {
        &self.char_poly
    }
}

pub fn closed_loop_matrix(
    theta_hat: &[f64],
    coeffs: &ControllerCoeffs,
) -> Result<ClosedLoopMatrix> {
    if coeffs.mode != ControllerMode::Standard {
        return Err(Error::ModeMismatch);
    }
    if theta_hat.len() % 2 != 0 || theta_hat.is_empty() {
        return Err(Error::DimensionMismatch(
            "theta_hat must have even length".into(),
        ));
    }
    let n = theta_hat.len() / 2;
    if coeffs.l.len() != n || coeffs.p.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "controller order {} vs plant order {n}",
            coeffs.l.len()
        )));
    }
    let dim = 2 * n;
    let mut m = Mat::zeros(dim, dim);
    for j in 0..dim {
        m.set(0, j, theta_hat[j]);
    }
    for i in 1..n {
        m.set(i, i - 1, 1.0);
    }
    for j in 0..n {
        m.set(n, j, -coeffs.p[j]);
        m.set(n, n + j, -coeffs.l[j]);
    }
    for i in 1..n {
        m.set(n + i, n + i - 1, 1.0);
    }
    let char_poly = Poly::new(m.char_poly_coeffs());
    Ok(ClosedLoopMatrix {
        mat: m,
        n,
        char_poly,
    })
}

/// Sampled estimate of a_bar = max over the box of ||A_bar(theta)||.
/// The true value is a maximum over S; this reports a deterministic
/// lower estimate from low-discrepancy samples.
pub fn a_bar_estimate(bounds: &ThetaBox, a_star: &Poly, samples: usize) -> Result<f64> {
    let n = bounds.n();
    let mut worst = 0.0f64;
    for k in 0..samples {
        let theta = bounds.sample(k);
        let (a_hat, b_hat) = theta_to_polys(&theta, n);
        let coeffs = place_poles(&a_hat, &b_hat, a_star)?;
        let cl = closed_loop_matrix(&theta, &coeffs)?;
        worst = worst.max(cl.norm());
    }
    Ok(worst)
}
