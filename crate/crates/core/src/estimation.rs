//! Parameter estimation: the ideal projection algorithm with an optional
//! deadzone, plus the classical normalized-gradient algorithm for
//! comparison runs. Estimates live in theta-coordinates
//! (-a1..-an, b1..bn) and are kept inside an axis-aligned admissible box
//! by exact clamping, which for boxes is the Euclidean projection.

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2};
use crate::poly::{self, Poly};
use crate::sample;

/// The admissible set S as an axis-aligned box in theta-space.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    n: usize,
}

/// Outcome of the sampled coprimeness scan over a box. A small margin is a
/// warning, not a hard failure: it flags configurations where the
/// pole-placement equation may lose its unique solution.
#[derive(Clone, Debug)]
pub struct CoprimenessReport {
    pub min_margin: f64,
    pub worst_theta: Vec<f64>,
    pub points_checked: usize,
}

impl ThetaBox {
    /// Build from per-coefficient plant intervals: a_i in [lo, hi] becomes
    /// the theta-coordinate -a_i in [-hi, -lo]; b_i passes through.
    pub fn from_plant_intervals(a: &[[f64; 2]], b: &[[f64; 2]]) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::DimensionMismatch(
                "need equal, nonzero counts of a and b intervals".into(),
            ));
        }
        let n = a.len();
        let mut lo = Vec::with_capacity(2 * n);
        let mut hi = Vec::with_capacity(2 * n);
        for iv in a {
            lo.push(-iv[1]);
            hi.push(-iv[0]);
        }
        for iv in b {
            lo.push(iv[0]);
            hi.push(iv[1]);
        }
        Self::from_theta_bounds(lo, hi)
    }

    pub fn from_theta_bounds(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(
                "theta bounds must have equal even length".into(),
            ));
        }
        for (l, h) in lo.iter().zip(hi.iter()) {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(Error::ConfigInvalid(format!(
                    "box interval [{l}, {h}] is empty or not finite"
                )));
            }
        }
        let n = lo.len() / 2;
        Ok(ThetaBox { lo, hi, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// ||S|| = max over the box of the Euclidean norm; for a box this is
    /// attained at a corner, coordinate by coordinate.
    pub fn set_norm(&self) -> f64 {
        self.lo
            .iter()
            .zip(self.hi.iter())
            .map(|(l, h)| (l * l).max(h * h))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .all(|(t, (l, h))| *t >= *l && *t <= *h)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(self.hi.iter())
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    /// Deterministic low-discrepancy sample of the box.
    pub fn sample(&self, index: usize) -> Vec<f64> {
        sample::box_point(&self.lo, &self.hi, index)
    }

    pub fn corners(&self) -> Vec<Vec<f64>> {
        let dim = self.dim();
        assert!(dim <= 20, "corner enumeration capped at dimension 20");
        (0..1usize << dim)
            .map(|mask| {
                (0..dim)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            self.hi[i]
                        } else {
                            self.lo[i]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Coprimeness margin at every corner plus `interior` deterministic
    /// interior samples.
    pub fn coprimeness_report(&self, interior: usize) -> CoprimenessReport {
        let mut min_margin = f64::INFINITY;
        let mut worst = self.midpoint();
        let mut count = 0;
        let check = |theta: Vec<f64>, min_margin: &mut f64, worst: &mut Vec<f64>| {
            let (a, b) = theta_to_polys(&theta, self.n);
            let margin = poly::coprimeness_margin(&a, &b);
            if margin < *min_margin {
                *min_margin = margin;
                *worst = theta;
            }
        };
        if self.dim() <= 20 {
            for corner in self.corners() {
                check(corner, &mut min_margin, &mut worst);
                count += 1;
            }
        }
        for k in 0..interior {
            check(self.sample(k), &mut min_margin, &mut worst);
            count += 1;
        }
        CoprimenessReport {
            min_margin,
            worst_theta: worst,
            points_checked: count,
        }
    }
}

/// Split theta = (-a1..-an, b1..bn) into the monic denominator
/// A_hat = 1 + a1 z^-1 + ... and the strictly causal numerator
/// B_hat = b1 z^-1 + ... .
pub fn theta_to_polys(theta: &[f64], n: usize) -> (Poly, Poly) {
    assert_eq!(theta.len(), 2 * n);
    let mut a = Vec::with_capacity(n + 1);
    a.push(1.0);
    for i in 0..n {
        a.push(-theta[i]);
    }
    let mut b = Vec::with_capacity(n + 1);
    b.push(0.0);
    for i in 0..n {
        b.push(theta[n + i]);
    }
    (Poly::new(a), Poly::new(b))
}

/// Componentwise clamp into the box; equals the Euclidean projection for
/// axis-aligned boxes and never increases the distance to any box point.
pub fn project_box(v: &[f64], bounds: &ThetaBox) -> Result<Vec<f64>> {
    if v.len() != bounds.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} vs box dimension {}",
            v.len(),
            bounds.dim()
        )));
    }
    Ok(v.iter()
        .zip(bounds.lo.iter().zip(bounds.hi.iter()))
        .map(|(x, (l, h))| x.max(*l).min(*h))
        .collect())
}

/// The regressor phi(t) = (y(t)..y(t-n+1), u(t)..u(t-n+1)).
#[derive(Clone, Debug)]
pub struct Regressor {
    phi: Vec<f64>,
}

impl Regressor {
    pub fn new(phi: Vec<f64>) -> Self {
        debug_assert!(phi.iter().all(|x| x.is_finite()));
        Regressor { phi }
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.phi)
    }

    /// Exact test on phi^T phi (a sum of squares, so no cancellation):
    /// zero iff every entry is zero or so small that the squared norm
    /// underflows, in which case the gradient direction phi/(phi^T phi)
    /// is not representable and the update must be skipped.
    pub fn is_zero(&self) -> bool {
        dot(&self.phi, &self.phi) == 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EstimatorVariant {
    /// Ideal projection algorithm; `delta` may be `f64::INFINITY`, in
    /// which case the deadzone test collapses (with the infinity * 0 = 0
    /// convention for a zero regressor).
    Ideal { delta: f64 },
    /// Classical normalized-gradient algorithm, projected onto the box.
    Classical { alpha: f64, beta: f64 },
}

#[derive(Clone, Debug)]
pub struct EstimatorState {
    theta_hat: Vec<f64>,
    variant: EstimatorVariant,
    bounds: ThetaBox,
}

impl EstimatorState {
    pub fn new(theta0: Vec<f64>, variant: EstimatorVariant, bounds: ThetaBox) -> Result<Self> {
        if !bounds.contains(&theta0) {
            return Err(Error::ConfigInvalid(
                "initial estimate lies outside the admissible box".into(),
            ));
        }
        match variant {
            EstimatorVariant::Ideal { delta } if !(delta > 0.0) => {
                return Err(Error::ConfigInvalid(
                    "deadzone delta must be positive".into(),
                ))
            }
            EstimatorVariant::Classical { alpha, beta }
                if !(alpha > 0.0 && alpha < 2.0 && beta > 0.0) =>
            {
                return Err(Error::ConfigInvalid(
                    "classical gains require 0 < alpha < 2 and beta > 0".into(),
                ))
            }
            _ => {}
        }
        Ok(EstimatorState {
            theta_hat: theta0,
            variant,
            bounds,
        })
    }

    pub fn theta_hat(&self) -> &[f64] {
        &self.theta_hat
    }

    pub fn variant(&self) -> &EstimatorVariant {
        &self.variant
    }

    pub fn bounds(&self) -> &ThetaBox {
        &self.bounds
    }

    /// e(t+1) = y(t+1) - phi(t)^T theta_hat(t).
    pub fn prediction_error(&self, phi: &Regressor, y_next: f64) -> f64 {
        y_next - dot(phi.phi(), &self.theta_hat)
    }

    /// The deadzone indicator: 1 iff |e(t+1)| < (2||S|| + delta) ||phi(t)||,
    /// with infinity * 0 = 0 so a zero regressor always yields 0.
    pub fn rho(&self, phi: &Regressor, e_next: f64) -> bool {
        let delta = match self.variant {
            EstimatorVariant::Ideal { delta } => delta,
            EstimatorVariant::Classical { .. } => {
                panic!("rho is defined for the ideal variant only")
            }
        };
        if phi.is_zero() {
            return false;
        }
        if delta.is_infinite() {
            return true;
        }
        e_next.abs() < (2.0 * self.bounds.set_norm() + delta) * phi.norm()
    }

    /// One ideal-algorithm step: gradient correction along phi / (phi^T phi)
    /// gated by rho, then projection onto the box.
    pub fn update_ideal(&self, phi: &Regressor, y_next: f64) -> EstimatorState {
        let e = self.prediction_error(phi, y_next);
        let mut check = self.theta_hat.clone();
        if self.rho(phi, e) {
            let denom = dot(phi.phi(), phi.phi());
            let gain = e / denom;
            for (c, p) in check.iter_mut().zip(phi.phi()) {
                *c += gain * p;
            }
            if let EstimatorVariant::Ideal { delta } = self.variant {
                if delta.is_finite() {
                    let step = norm2(
                        &check
                            .iter()
                            .zip(self.theta_hat.iter())
                            .map(|(c, t)| c - t)
                            .collect::<Vec<_>>(),
                    );
                    debug_assert!(step <= 2.0 * self.bounds.set_norm() + delta + 1e-9);
                }
            }
        }
        let projected = project_box(&check, &self.bounds).expect("dimensions fixed");
        EstimatorState {
            theta_hat: projected,
            variant: self.variant.clone(),
            bounds: self.bounds.clone(),
        }
    }

    /// One classical-algorithm step with the vanishing gain
    /// alpha phi / (beta + phi^T phi), then projection onto the box.
    pub fn update_classical(&self, phi: &Regressor, y_next: f64) -> EstimatorState {
        let (alpha, beta) = match self.variant {
            EstimatorVariant::Classical { alpha, beta } => (alpha, beta),
            EstimatorVariant::Ideal { .. } => {
                panic!("update_classical is defined for the classical variant only")
            }
        };
        let e = self.prediction_error(phi, y_next);
        let denom = beta + dot(phi.phi(), phi.phi());
        let gain = alpha * e / denom;
        let check: Vec<f64> = self
            .theta_hat
            .iter()
            .zip(phi.phi())
            .map(|(t, p)| t + gain * p)
            .collect();
        let projected = project_box(&check, &self.bounds).expect("dimensions fixed");
        EstimatorState {
            theta_hat: projected,
            variant: self.variant.clone(),
            bounds: self.bounds.clone(),
        }
    }

    /// Dispatch on the configured variant.
    pub fn update(&self, phi: &Regressor, y_next: f64) -> EstimatorState {
        match self.variant {
            EstimatorVariant::Ideal { .. } => self.update_ideal(phi, y_next),
            EstimatorVariant::Classical { .. } => self.update_classical(phi, y_next),
        }
    }

    /// V(t) = ||theta_hat - theta*||^2.
    pub fn lyapunov_v(&self, theta_star: &[f64]) -> f64 {
        assert_eq!(theta_star.len(), self.theta_hat.len());
        self.theta_hat
            .iter()
            .zip(theta_star.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_box_n1() -> ThetaBox {
        // theta-coordinates [1,2] x [1,2] (the first-order counterexample box).
        ThetaBox::from_theta_bounds(vec![1.0, 1.0], vec![2.0, 2.0]).unwrap()
    }

    fn ideal(theta0: Vec<f64>, bounds: ThetaBox) -> EstimatorState {
        EstimatorState::new(
            theta0,
            EstimatorVariant::Ideal {
                delta: f64::INFINITY,
            },
            bounds,
        )
        .unwrap()
    }

    #[test]
    fn plant_interval_conversion_flips_a() {
        let bx = ThetaBox::from_plant_intervals(&[[0.0, 2.0]], &[[1.0, 3.0]]).unwrap();
        assert_eq!(bx.lo(), &[-2.0, 1.0]);
        assert_eq!(bx.hi(), &[0.0, 3.0]);
    }

    #[test]
    fn set_norm_is_worst_corner() {
        assert!((unit_box_n1().set_norm() - 8.0f64.sqrt()).abs() < 1e-15);
        let bx =
            ThetaBox::from_plant_intervals(&[[0.0, 2.0], [1.0, 3.0]], &[[0.0, 1.0], [-5.0, -2.0]])
                .unwrap();
        // max over corners of sqrt(a1^2 + a2^2 + b1^2 + b2^2) = sqrt(4+9+1+25).
        assert!((bx.set_norm() - 39.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn prediction_error_examples() {
        let st = ideal(vec![1.0, 2.0], unit_box_n1());
        // theta_hat exact, no disturbance.
        let phi = Regressor::new(vec![0.3, -0.4]);
        let y_next = 0.3 * 1.0 + -0.4 * 2.0;
        assert_eq!(st.prediction_error(&phi, y_next), 0.0);
        // The first-order counterexample's first step: e = 1.5 eps.
        let eps = 0.01;
        let phi = Regressor::new(vec![eps, -0.5 * eps]);
        let e = st.prediction_error(&phi, 1.5 * eps);
        assert!((e - 1.5 * eps).abs() < 1e-15);
        // Zero regressor passes the disturbance through.
        let phi0 = Regressor::new(vec![0.0, 0.0]);
        assert_eq!(st.prediction_error(&phi0, 0.37), 0.37);
    }

    #[test]
    fn rho_examples() {
        let st = ideal(vec![1.0, 2.0], unit_box_n1());
        let phi = Regressor::new(vec![1.0, 0.0]);
        assert!(st.rho(&phi, 1e9));
        assert!(!st.rho(&Regressor::new(vec![0.0, 0.0]), 1.0));

        let st_dz = EstimatorState::new(
            vec![1.0, 2.0],
            EstimatorVariant::Ideal { delta: 1.0 },
            unit_box_n1(),
        )
        .unwrap();
        // threshold = 2 sqrt(8) + 1 ~= 6.657 < 7.
        assert!(!st_dz.rho(&phi, 7.0 * phi.norm()));
        assert!(st_dz.rho(&phi, 6.0 * phi.norm()));
    }

    #[test]
    fn update_ideal_hand_step_projects_to_box() {
        // theta_hat = (1,2), phi = (eps, -0.5 eps), y_next = 1.5 eps:
        // unprojected (2.2, 1.4), projected (2, 1.4).
        let eps = 0.01;
        let st = ideal(vec![1.0, 2.0], unit_box_n1());
        let phi = Regressor::new(vec![eps, -0.5 * eps]);
        let next = st.update_ideal(&phi, 1.5 * eps);
        assert!((next.theta_hat()[0] - 2.0).abs() < 1e-12);
        assert!((next.theta_hat()[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn update_ideal_freezes_on_zero_error_or_zero_regressor() {
        let st = ideal(vec![1.0, 2.0], unit_box_n1());
        let phi = Regressor::new(vec![0.5, 0.5]);
        let y_exact = 0.5 * 1.0 + 0.5 * 2.0;
        assert_eq!(st.update_ideal(&phi, y_exact).theta_hat(), st.theta_hat());
        let phi0 = Regressor::new(vec![0.0, 0.0]);
        assert_eq!(st.update_ideal(&phi0, 123.0).theta_hat(), st.theta_hat());
    }

    #[test]
    fn update_classical_hand_step() {
        let eps = 0.01;
        let st = EstimatorState::new(
            vec![1.0, 2.0],
            EstimatorVariant::Classical {
                alpha: 1.0,
                beta: 1.0,
            },
            unit_box_n1(),
        )
        .unwrap();
        let phi = Regressor::new(vec![eps, -0.5 * eps]);
        let next = st.update_classical(&phi, 1.5 * eps);
        // Direct arithmetic oracle.
        let denom = 1.0 + eps * eps * 1.25;
        let e = 1.5 * eps;
        assert!((next.theta_hat()[0] - (1.0 + eps * e / denom)).abs() < 1e-15);
        assert!((next.theta_hat()[1] - (2.0 - 0.5 * eps * e / denom)).abs() < 1e-15);
        // Zero regressor leaves the estimate alone.
        let phi0 = Regressor::new(vec![0.0, 0.0]);
        assert_eq!(st.update_classical(&phi0, 5.0).theta_hat(), st.theta_hat());
    }

    #[test]
    fn finite_deadzone_caps_the_raw_update() {
        // With delta finite the pre-projection step is at most
        // 2 ||S|| + delta; beyond the deadzone there is no update at all.
        let bx = unit_box_n1();
        let delta = 1.0;
        let cap = 2.0 * bx.set_norm() + delta;
        let st = EstimatorState::new(
            vec![1.5, 1.5],
            EstimatorVariant::Ideal { delta },
            bx.clone(),
        )
        .unwrap();
        let phi = Regressor::new(vec![0.3, -0.4]);
        // Just inside the deadzone: |e| = 0.99 cap ||phi||.
        let e = 0.99 * cap * phi.norm();
        let y_next = dot(phi.phi(), st.theta_hat()) + e;
        let next = st.update_ideal(&phi, y_next);
        let step = norm2(
            &next
                .theta_hat()
                .iter()
                .zip(st.theta_hat())
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        assert!(step <= cap + 1e-12, "step {step} vs cap {cap}");
        // Outside the deadzone: frozen.
        let e = 1.01 * cap * phi.norm();
        let y_next = dot(phi.phi(), st.theta_hat()) + e;
        assert_eq!(st.update_ideal(&phi, y_next).theta_hat(), st.theta_hat());
    }

    #[test]
    fn project_box_examples() {
        let bx = ThetaBox::from_theta_bounds(vec![0.0, 1.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(project_box(&[1.0, 2.0], &bx).unwrap(), vec![1.0, 2.0]);
        assert_eq!(project_box(&[3.0, 0.5], &bx).unwrap(), vec![2.0, 1.0]);
        assert!(project_box(&[1.0], &bx).is_err());
        let bx2 = unit_box_n1();
        assert_eq!(project_box(&[2.2, 1.4], &bx2).unwrap(), vec![2.0, 1.4]);
    }

    #[test]
    fn lyapunov_examples() {
        let st = ideal(vec![1.0, 2.0], unit_box_n1());
        assert_eq!(st.lyapunov_v(&[1.0, 2.0]), 0.0);
        assert_eq!(st.lyapunov_v(&[2.0, 1.0]), 2.0);
    }

    #[test]
    fn coprimeness_report_flags_shared_root() {
        // A = 1 - z^-1, B = z^-1 - z^-2 share the root z = 1.
        let bx = ThetaBox::from_plant_intervals(
            &[[-1.0, -1.0], [0.0, 0.0]],
            &[[1.0, 1.0], [-1.0, -1.0]],
        )
        .unwrap();
        let report = bx.coprimeness_report(10);
        assert!(report.min_margin < 1e-10, "margin {}", report.min_margin);
    }

    #[test]
    fn coprimeness_report_clean_on_example_box() {
        let bx =
            ThetaBox::from_plant_intervals(&[[0.0, 2.0], [1.0, 3.0]], &[[0.0, 1.0], [-5.0, -2.0]])
                .unwrap();
        let report = bx.coprimeness_report(100);
        assert!(report.min_margin > 1e-8, "margin {}", report.min_margin);
        assert_eq!(report.points_checked, 16 + 100);
    }

    // The proof's projector identities: W1 = phi phi^T/(phi^T phi) is
    // idempotent and absorbs W2 = phi/(phi^T phi).
    #[test]
    fn projector_identities() {
        for k in 0..50 {
            let phi = crate::sample::box_point(&[-3.0, -3.0, -3.0, -3.0], &[3.0, 3.0, 3.0, 3.0], k);
            let pp = dot(&phi, &phi);
            if pp == 0.0 {
                continue;
            }
            let m = phi.len();
            // W1^2 == W1 entrywise.
            for i in 0..m {
                for j in 0..m {
                    let w1 = phi[i] * phi[j] / pp;
                    let w1sq: f64 = (0..m)
                        .map(|k2| (phi[i] * phi[k2] / pp) * (phi[k2] * phi[j] / pp))
                        .sum();
                    assert!((w1sq - w1).abs() <= 1e-12);
                }
            }
            // W1 W2 == W2 entrywise.
            for i in 0..m {
                let w2 = phi[i] / pp;
                let w1w2: f64 = (0..m)
                    .map(|k2| (phi[i] * phi[k2] / pp) * (phi[k2] / pp))
                    .sum();
                assert!((w1w2 - w2).abs() <= 1e-12);
            }
        }
    }

    proptest! {
        // Projection never increases the distance to any point of the box.
        #[test]
        fn projection_is_nonexpansive(
            v in proptest::collection::vec(-10.0f64..10.0, 4),
            s_unit in proptest::collection::vec(0.0f64..1.0, 4),
        ) {
            let bx = ThetaBox::from_plant_intervals(&[[0.0, 2.0], [1.0, 3.0]], &[[0.0, 1.0], [-5.0, -2.0]]).unwrap();
            let s: Vec<f64> = bx.lo().iter().zip(bx.hi().iter()).zip(s_unit.iter())
                .map(|((l, h), u)| l + u * (h - l)).collect();
            let pv = project_box(&v, &bx).unwrap();
            let dist = |a: &[f64], b: &[f64]| -> f64 {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            };
            prop_assert!(dist(&pv, &s) <= dist(&v, &s) + 1e-12);
        }

        // Single-step estimator bounds: drift <= rho |e| / ||phi|| and
        // V(t+1) - V(t) <= rho (-e^2/2 + 2 d^2) / ||phi||^2.
        #[test]
        fn single_update_satisfies_drift_and_energy_bounds(
            t_unit in proptest::collection::vec(0.0f64..1.0, 4),
            s_unit in proptest::collection::vec(0.0f64..1.0, 4),
            phi_raw in proptest::collection::vec(-5.0f64..5.0, 4),
            d in -2.0f64..2.0,
            finite_delta in proptest::bool::ANY,
        ) {
            let bx = ThetaBox::from_plant_intervals(&[[0.0, 2.0], [1.0, 3.0]], &[[0.0, 1.0], [-5.0, -2.0]]).unwrap();
            let lift = |u: &[f64]| -> Vec<f64> {
                bx.lo().iter().zip(bx.hi().iter()).zip(u.iter())
                    .map(|((l, h), x)| l + x * (h - l)).collect()
            };
            let theta_hat = lift(&t_unit);
            let theta_star = lift(&s_unit);
            let delta = if finite_delta { 0.5 } else { f64::INFINITY };
            let st = EstimatorState::new(theta_hat.clone(), EstimatorVariant::Ideal { delta }, bx).unwrap();
            let phi = Regressor::new(phi_raw);
            let y_next = dot(phi.phi(), &theta_star) + d;
            let e = st.prediction_error(&phi, y_next);
            let rho = if phi.is_zero() { false } else { st.rho(&phi, e) };
            let next = st.update_ideal(&phi, y_next);

            let drift = norm2(&next.theta_hat().iter().zip(st.theta_hat())
                .map(|(a, b)| a - b).collect::<Vec<_>>());
            let drift_bound = if rho { e.abs() / phi.norm() } else { 0.0 };
            prop_assert!(drift <= drift_bound + 1e-12 * drift_bound.max(1.0));

            let dv = next.lyapunov_v(&theta_star) - st.lyapunov_v(&theta_star);
            let energy_bound = if rho {
                let pp = dot(phi.phi(), phi.phi());
                (-0.5 * e * e + 2.0 * d * d) / pp
            } else {
                0.0
            };
            prop_assert!(dv <= energy_bound + 1e-9 * energy_bound.abs().max(1.0));
        }
    }
}
