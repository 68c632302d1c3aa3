//! Empirical verification on concrete trajectories: the estimator's
//! per-step drift and energy inequalities, exponential envelope
//! certificates, gain measurements, closed-loop matrix decay, and the
//! counterexample experiment separating the ideal and classical
//! estimators.

use crate::error::{Error, Result};
use crate::estimation::{EstimatorState, EstimatorVariant, Regressor, ThetaBox};
use crate::matrix::{norm2, Mat};
use crate::poly;
use crate::simulation::Trace;
use crate::synthesis::{closed_loop_matrix, ClosedLoopMatrix, ControllerMode};

pub const DEFAULT_LAMBDA_GRID: [f64; 15] = [
    0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 0.99,
];

const REL_TOL: f64 = 1e-9;

/// Pathwise check of the estimator's two per-step inequalities on a
/// constant-parameter trace: the drift bound
/// ||theta_hat(t+1) - theta_hat(t)|| <= rho |e(t+1)| / ||phi(t)|| and the
/// energy descent
/// V(t+1) - V(t) <= rho (-e(t+1)^2/2 + 2 d(t)^2) / ||phi(t)||^2.
#[derive(Clone, Debug)]
pub struct Prop1Report {
    pub pairs: usize,
    /// Worst signed slack violation of the drift bound (negative = slack).
    pub drift_max_violation: f64,
    pub energy_max_violation: f64,
    pub drift_violations: usize,
    pub energy_violations: usize,
}

impl Prop1Report {
    pub fn clean(&self) -> bool {
        self.drift_violations == 0 && self.energy_violations == 0
    }
}

pub fn check_prop1(trace: &Trace, theta_star: &[f64]) -> Result<Prop1Report> {
    if !trace.ideal_estimator {
        return Err(Error::NotApplicable(
            "the descent property is stated for the ideal/deadzone estimator".into(),
        ));
    }
    if !trace.theta_star_is_constant() {
        return Err(Error::NotApplicable(
            "the descent property assumes a fixed true parameter".into(),
        ));
    }
    if let Some(first) = trace.rows.first() {
        if first.theta_star != theta_star {
            return Err(Error::NotApplicable(
                "theta_star differs from the traced parameter".into(),
            ));
        }
    }

    let v_of = |theta_hat: &[f64]| -> f64 {
        theta_hat
            .iter()
            .zip(theta_star.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    };

    let mut report = Prop1Report {
        pairs: 0,
        drift_max_violation: f64::NEG_INFINITY,
        energy_max_violation: f64::NEG_INFINITY,
        drift_violations: 0,
        energy_violations: 0,
    };

    for w in trace.rows.windows(2) {
        let (cur, next) = (&w[0], &w[1]);
        let rho = next.rho as f64;
        let drift = norm2(
            &next
                .theta_hat
                .iter()
                .zip(cur.theta_hat.iter())
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        let drift_bound = if next.rho == 1 {
            next.e.abs() / cur.phi_norm
        } else {
            0.0
        };
        let drift_violation = drift - drift_bound;
        report.drift_max_violation = report.drift_max_violation.max(drift_violation);
        if drift_violation > REL_TOL * drift_bound.max(1.0) {
            report.drift_violations += 1;
        }

        let dv = v_of(&next.theta_hat) - v_of(&cur.theta_hat);
        let energy_bound = if next.rho == 1 {
            let pp = cur.phi_norm * cur.phi_norm;
            rho * (-0.5 * next.e * next.e + 2.0 * cur.d * cur.d) / pp
        } else {
            0.0
        };
        let energy_violation = dv - energy_bound;
        report.energy_max_violation = report.energy_max_violation.max(energy_violation);
        if energy_violation > REL_TOL * energy_bound.abs().max(v_of(&cur.theta_hat)).max(1.0) {
            report.energy_violations += 1;
        }
        report.pairs += 1;
    }
    Ok(report)
}

/// Sum over the trace of rho e^2 / ||phi||^2 -- the quantity the descent
/// inequality telescopes into 2 V(t0) <= 8 ||S||^2 when d = 0.
pub fn update_energy_sum(trace: &Trace) -> f64 {
    trace
        .rows
        .windows(2)
        .map(|w| {
            if w[1].rho == 1 {
                let pp = w[0].phi_norm * w[0].phi_norm;
                w[1].e * w[1].e / pp
            } else {
                0.0
            }
        })
        .sum()
}

/// Per-lambda envelope certificate c(lambda) = max_k ||phi(k)|| /
/// (lambda^{k-t0} ||phi(t0)||). Entries are infinite when the trace shows
/// no decay at that rate (the maximum keeps growing through the last
/// sample).
#[derive(Clone, Debug)]
pub struct EnvelopeFit {
    pub lambda_grid: Vec<f64>,
    pub c_of_lambda: Vec<f64>,
    /// (lambda*, c*) minimizing c over the finite entries.
    pub best: Option<(f64, f64)>,
}

pub fn fit_envelope(trace: &Trace, lambda_grid: &[f64]) -> Result<EnvelopeFit> {
    if trace.rows.iter().any(|r| r.d != 0.0 || r.ystar != 0.0) {
        return Err(Error::NotApplicable(
            "envelope fitting requires d = 0 and y* = 0".into(),
        ));
    }
    fit_envelope_norms(&trace.phi_norms(), lambda_grid)
}

pub fn fit_envelope_norms(norms: &[f64], lambda_grid: &[f64]) -> Result<EnvelopeFit> {
    let phi0 = *norms.first().ok_or(Error::ZeroInitialState)?;
    if phi0 == 0.0 {
        return Err(Error::ZeroInitialState);
    }
    let mut c_of_lambda = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let mut c = 0.0f64;
        let mut argmax = 0usize;
        let mut denom = phi0;
        let mut flagged = false;
        for (k, &nk) in norms.iter().enumerate() {
            if k > 0 {
                denom *= lambda;
            }
            if nk == 0.0 {
                continue;
            }
            if denom == 0.0 {
                flagged = true;
                break;
            }
            let ratio = nk / denom;
            if ratio > c {
                c = ratio;
                argmax = k;
            }
        }
        // A maximum still growing at the end of the data certifies nothing.
        if flagged || (norms.len() >= 2 && argmax == norms.len() - 1) {
            c_of_lambda.push(f64::INFINITY);
        } else {
            c_of_lambda.push(c);
        }
    }
    let mut best: Option<(f64, f64)> = None;
    for (lambda, c) in lambda_grid.iter().zip(c_of_lambda.iter()) {
        if c.is_finite() && best.is_none_or(|(_, bc)| *c < bc) {
            best = Some((*lambda, *c));
        }
    }
    Ok(EnvelopeFit {
        lambda_grid: lambda_grid.to_vec(),
        c_of_lambda,
        best,
    })
}

/// Peak state against peak input, plus l1/l2 variants.
#[derive(Clone, Debug)]
pub struct GainReport {
    pub sup_phi: f64,
    /// sup |d| + sup |r|.
    pub input_level: f64,
    pub ratio: Option<f64>,
    pub l1_ratio: Option<f64>,
    pub l2_ratio: Option<f64>,
}

pub fn gain_estimate(trace: &Trace) -> GainReport {
    let sup_phi = trace.rows.iter().fold(0.0f64, |m, r| m.max(r.phi_norm));
    let sup_d = trace.rows.iter().fold(0.0f64, |m, r| m.max(r.d.abs()));
    let sup_r = trace.rows.iter().fold(0.0f64, |m, r| m.max(r.r.abs()));
    let input_level = sup_d + sup_r;
    let lp = |p: f64| -> Option<f64> {
        let phi: f64 = trace
            .rows
            .iter()
            .map(|r| r.phi_norm.powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        let d: f64 = trace
            .rows
            .iter()
            .map(|r| r.d.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        let rr: f64 = trace
            .rows
            .iter()
            .map(|r| r.r.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        if d + rr > 0.0 {
            Some(phi / (d + rr))
        } else {
            None
        }
    };
    GainReport {
        sup_phi,
        input_level,
        ratio: if input_level > 0.0 {
            Some(sup_phi / input_level)
        } else {
            None
        },
        l1_ratio: lp(1.0),
        l2_ratio: lp(2.0),
    }
}

/// gamma_emp = max_{k <= k_max} ||A_bar^k|| / sigma^k. The reference decay
/// rate lambda_lower comes from the matrix's own characteristic
/// polynomial, which pole placement pins to z^{2n} A*(z^{-1}).
pub fn matrix_decay(a_bar: &ClosedLoopMatrix, sigma: f64, k_max: usize) -> Result<f64> {
    let lambda_lower = poly::spectral_radius(a_bar.char_poly())?;
    if sigma <= lambda_lower {
        return Err(Error::SigmaTooSmall {
            sigma,
            lambda_lower,
        });
    }
    let dim = a_bar.mat().rows();
    let mut gamma = 1.0f64; // k = 0: ||I|| = 1
    let mut power = Mat::identity(dim);
    let mut sigma_k = 1.0f64;
    for _k in 1..=k_max {
        power = a_bar.mat().matmul(&power);
        sigma_k *= sigma;
        gamma = gamma.max(power.spectral_norm() / sigma_k);
    }
    Ok(gamma)
}

/// Rebuild the per-step closed-loop matrices of a standard-mode trace.
pub fn a_bar_sequence(trace: &Trace) -> Result<Vec<ClosedLoopMatrix>> {
    if trace.mode != ControllerMode::Standard {
        return Err(Error::NotApplicable(
            "the closed-loop matrix exists for the standard design only".into(),
        ));
    }
    trace
        .rows
        .iter()
        .zip(trace.coeffs.iter())
        .map(|(row, coeffs)| closed_loop_matrix(&row.theta_hat, coeffs))
        .collect()
}

/// The two sums of the slow-variation bound over a window, and their
/// Cauchy-Schwarz-style ratio drift / sqrt(energy * window).
#[derive(Clone, Debug)]
pub struct DriftReport {
    pub drift_sum: f64,
    pub energy_sum: f64,
    pub pairs: usize,
    pub ratio: Option<f64>,
}

pub fn estimator_drift_sum(trace: &Trace, from: usize, to: usize) -> Result<DriftReport> {
    if from >= to || to > trace.rows.len() {
        return Err(Error::DimensionMismatch(format!(
            "window [{from}, {to}) out of range for {} rows",
            trace.rows.len()
        )));
    }
    let seq = a_bar_sequence(trace)?;
    let mut drift_sum = 0.0f64;
    let mut energy_sum = 0.0f64;
    let mut pairs = 0usize;
    for j in from..to.saturating_sub(1) {
        drift_sum += seq[j + 1].mat().sub(seq[j].mat()).spectral_norm();
        let row_next = &trace.rows[j + 1];
        if row_next.rho == 1 {
            let pp = trace.rows[j].phi_norm * trace.rows[j].phi_norm;
            energy_sum += row_next.e * row_next.e / pp;
        }
        pairs += 1;
    }
    let denom = (energy_sum * pairs as f64).sqrt();
    Ok(DriftReport {
        drift_sum,
        energy_sum,
        pairs,
        ratio: if denom > 0.0 {
            Some(drift_sum / denom)
        } else {
            None
        },
    })
}

/// Norms of the left products A_bar(t-1) ... A_bar(tau) per window length
/// (index 0 is the empty product).
pub fn transition_norms(seq: &[ClosedLoopMatrix]) -> Vec<f64> {
    if seq.is_empty() {
        return vec![1.0];
    }
    let dim = seq[0].mat().rows();
    let mut norms = Vec::with_capacity(seq.len() + 1);
    norms.push(1.0);
    let mut product = Mat::identity(dim);
    for cl in seq {
        product = cl.mat().matmul(&product);
        norms.push(product.spectral_norm());
    }
    norms
}

/// N(eps) = int[ln(1/eps) / (2 ln 1.5)], the window over which the
/// first-order counterexample's output keeps growing.
pub fn n_of_eps(eps: f64) -> usize {
    ((1.0 / eps).ln() / (2.0 * 1.5f64.ln())).floor() as usize
}

#[derive(Clone, Debug)]
pub struct Remark2Row {
    pub eps: f64,
    pub n_eps: usize,
    /// |y(N(eps))| / eps under the classical estimator.
    pub classical_ratio: f64,
    /// Envelope constant of the ideal-estimator companion run.
    pub ideal_c_star: f64,
}

const REMARK2_IDEAL_HORIZON: usize = 50;

/// The first-order counterexample: plant (a1, b1) admissible in
/// [-2, -1] x [1, 2] with true theta* = (2, 1) in (-a1, b1) coordinates,
/// static deadbeat law u = (a1_hat / b1_hat) y, no disturbance, y(0) = eps.
/// The classical update stalls for small eps (ratio grows without bound);
/// the ideal run's trajectory is scale-invariant, so its envelope constant
/// does not depend on eps.
pub fn remark2_experiment(eps_list: &[f64]) -> Vec<Remark2Row> {
    eps_list
        .iter()
        .map(|&eps| {
            let n_eps = n_of_eps(eps);
            let (ys, _) = remark2_loop(eps, true, n_eps + 1);
            let classical_ratio = ys[n_eps].abs() / eps;
            let (_, norms) = remark2_loop(eps, false, REMARK2_IDEAL_HORIZON);
            let fit =
                fit_envelope_norms(&norms, &DEFAULT_LAMBDA_GRID).expect("nonzero initial state");
            let ideal_c_star = fit.best.map(|(_, c)| c).unwrap_or(f64::INFINITY);
            Remark2Row {
                eps,
                n_eps,
                classical_ratio,
                ideal_c_star,
            }
        })
        .collect()
}

/// Returns (outputs y(0)..y(horizon), regressor norms ||phi(0)||..).
fn remark2_loop(eps: f64, classical: bool, horizon: usize) -> (Vec<f64>, Vec<f64>) {
    let bounds = ThetaBox::from_theta_bounds(vec![1.0, 1.0], vec![2.0, 2.0]).expect("box");
    let variant = if classical {
        EstimatorVariant::Classical {
            alpha: 1.0,
            beta: 1.0,
        }
    } else {
        EstimatorVariant::Ideal {
            delta: f64::INFINITY,
        }
    };
    let mut est = EstimatorState::new(vec![1.0, 2.0], variant, bounds).expect("estimator");
    let mut y = eps;
    let mut ys = vec![y];
    let mut norms = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let a1_hat = -est.theta_hat()[0];
        let b1_hat = est.theta_hat()[1];
        let u = (a1_hat / b1_hat) * y;
        let phi = Regressor::new(vec![y, u]);
        norms.push(phi.norm());
        let y_next = 2.0 * y + u;
        est = est.update(&phi, y_next);
        y = y_next;
        ys.push(y);
    }
    (ys, norms)
}

/// Mean |y - y*| over the constant stretches of the reference, skipping
/// the first `settle` steps after each level change.
pub fn plateau_tracking_error(trace: &Trace, settle: usize) -> f64 {
    let mut total = 0.0f64;
    let mut count = 0usize;
    let mut plateau_start = 0usize;
    for (idx, row) in trace.rows.iter().enumerate() {
        if idx > 0 && row.ystar != trace.rows[idx - 1].ystar {
            plateau_start = idx;
        }
        if idx - plateau_start >= settle {
            total += (row.y - row.ystar).abs();
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figures;
    use crate::simulation::simulate;

    #[test]
    fn prop1_clean_on_deadbeat_exact_run() {
        let trace = simulate(&figures::deadbeat_exact()).unwrap();
        let report = check_prop1(&trace, &[-2.0, -3.0, 1.0, -2.0]).unwrap();
        assert!(report.clean(), "{report:?}");
        assert!(report.pairs > 0);
    }

    #[test]
    fn prop1_not_applicable_on_time_varying_or_classical() {
        let mut cfg = figures::fig2();
        cfg.horizon = 50;
        let trace = simulate(&cfg).unwrap();
        assert!(matches!(
            check_prop1(&trace, &trace.rows[0].theta_star.clone()),
            Err(Error::NotApplicable(_))
        ));

        let mut cfg = figures::fig1a(figures::classical());
        cfg.horizon = 50;
        let trace = simulate(&cfg).unwrap();
        assert!(matches!(
            check_prop1(&trace, &[-2.0, -3.0, 1.0, -2.0]),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn remark2_single_step_energy_descent() {
        // One ideal step of the counterexample: V(0) = 2,
        // V(1) = 0.16 <= 2 - 0.9 = 1.1.
        let bounds = ThetaBox::from_theta_bounds(vec![1.0, 1.0], vec![2.0, 2.0]).unwrap();
        let est = EstimatorState::new(
            vec![1.0, 2.0],
            EstimatorVariant::Ideal {
                delta: f64::INFINITY,
            },
            bounds,
        )
        .unwrap();
        let theta_star = [2.0, 1.0];
        assert_eq!(est.lyapunov_v(&theta_star), 2.0);
        let eps = 0.01;
        let phi = Regressor::new(vec![eps, -0.5 * eps]);
        let y_next = 2.0 * eps + (-0.5 * eps);
        let next = est.update_ideal(&phi, y_next);
        let v1 = next.lyapunov_v(&theta_star);
        assert!((v1 - 0.16).abs() < 1e-12, "V(1) = {v1}");
        assert!(v1 <= 1.1 + 1e-12);
    }

    #[test]
    fn envelope_fit_synthetic_traces() {
        let norms: Vec<f64> = (0..40).map(|k| 0.5f64.powi(k)).collect();
        let fit = fit_envelope_norms(&norms, &[0.25, 0.5, 0.9]).unwrap();
        assert!(fit.c_of_lambda[0].is_infinite()); // rate mismatch
        assert!((fit.c_of_lambda[1] - 1.0).abs() < 1e-12);
        assert!(fit.c_of_lambda[2].is_finite());
        let (lambda_star, c_star) = fit.best.unwrap();
        assert_eq!(lambda_star, 0.5);
        assert!((c_star - 1.0).abs() < 1e-12);

        // Scaled trace: c is measured relative to ||phi_0||.
        let norms: Vec<f64> = (0..40).map(|k| 2.0 * 0.5f64.powi(k)).collect();
        let fit = fit_envelope_norms(&norms, &[0.25, 0.5]).unwrap();
        assert!(fit.c_of_lambda[0].is_infinite());
        assert!((fit.c_of_lambda[1] - 1.0).abs() < 1e-12);

        assert!(matches!(
            fit_envelope_norms(&[0.0, 1.0], &[0.5]),
            Err(Error::ZeroInitialState)
        ));
    }

    #[test]
    fn envelope_c_is_nonincreasing_in_lambda() {
        let mut cfg = figures::fig1a(figures::ideal());
        cfg.horizon = 400;
        let trace = simulate(&cfg).unwrap();
        let fit = fit_envelope(&trace, &DEFAULT_LAMBDA_GRID).unwrap();
        for w in fit.c_of_lambda.windows(2) {
            assert!(w[0] >= w[1] - 1e-9, "{:?}", fit.c_of_lambda);
        }
        assert!(fit.best.is_some());
    }

    #[test]
    fn envelope_rejects_noisy_trace() {
        let mut cfg = figures::fig1b(figures::ideal());
        cfg.horizon = 50;
        let trace = simulate(&cfg).unwrap();
        assert!(matches!(
            fit_envelope(&trace, &DEFAULT_LAMBDA_GRID),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn gain_estimate_zero_trace() {
        let mut cfg = figures::fig1a(figures::ideal());
        cfg.y_init = vec![];
        cfg.u_init = vec![];
        cfg.horizon = 50;
        let trace = simulate(&cfg).unwrap();
        let report = gain_estimate(&trace);
        assert_eq!(report.sup_phi, 0.0);
        assert_eq!(report.input_level, 0.0);
        assert!(report.ratio.is_none());
    }

    #[test]
    fn matrix_decay_hand_case_and_monotonicity() {
        // Deadbeat n = 1: A_bar = [[1,2],[-0.5,-1]], ||A_bar|| = 2.5,
        // A_bar^2 = 0, so gamma(0.5) = max(1, 2.5/0.5) = 5.
        let coeffs = crate::synthesis::place_poles(
            &poly::Poly::new(vec![1.0, -1.0]),
            &poly::Poly::new(vec![0.0, 2.0]),
            &poly::Poly::one(),
        )
        .unwrap();
        let cl = closed_loop_matrix(&[1.0, 2.0], &coeffs).unwrap();
        let gamma = matrix_decay(&cl, 0.5, 20).unwrap();
        assert!((gamma - 5.0).abs() < 1e-9, "gamma = {gamma}");
        let gamma_tight = matrix_decay(&cl, 0.25, 20).unwrap();
        assert!(gamma_tight >= gamma);

        // sigma at or below the target radius is rejected.
        let coeffs = crate::synthesis::place_poles(
            &poly::Poly::new(vec![1.0, -1.0]),
            &poly::Poly::new(vec![0.0, 2.0]),
            &poly::Poly::new(vec![1.0, -0.5]),
        )
        .unwrap();
        let cl = closed_loop_matrix(&[1.0, 2.0], &coeffs).unwrap();
        assert!(matches!(
            matrix_decay(&cl, 0.3, 20),
            Err(Error::SigmaTooSmall { .. })
        ));
    }

    #[test]
    fn transition_norms_nilpotent_and_identity() {
        let coeffs = crate::synthesis::place_poles(
            &poly::Poly::new(vec![1.0, -1.0]),
            &poly::Poly::new(vec![0.0, 2.0]),
            &poly::Poly::one(),
        )
        .unwrap();
        let cl = closed_loop_matrix(&[1.0, 2.0], &coeffs).unwrap();
        let seq = vec![cl.clone(), cl.clone(), cl];
        let norms = transition_norms(&seq);
        assert_eq!(norms[0], 1.0);
        assert!(norms[2] < 1e-12, "window 2n hits zero: {norms:?}");
        assert!(norms[3] < 1e-12);

        // Frozen identity-like sequence: theta_hat = 0 with zero gains has
        // A_bar equal to the shift structure; use the trivial 1-step check
        // via the empty sequence instead.
        assert_eq!(transition_norms(&[]), vec![1.0]);
    }

    #[test]
    fn drift_sum_zero_for_frozen_estimator() {
        let trace = simulate(&figures::deadbeat_exact()).unwrap();
        let report = estimator_drift_sum(&trace, 0, trace.rows.len()).unwrap();
        assert_eq!(report.drift_sum, 0.0);
        assert_eq!(report.energy_sum, 0.0);
        assert!(report.ratio.is_none());
    }

    #[test]
    fn drift_sum_bounded_ratio_on_adapting_run() {
        let mut cfg = figures::fig1a(figures::ideal());
        cfg.horizon = 300;
        let trace = simulate(&cfg).unwrap();
        let report = estimator_drift_sum(&trace, 0, trace.rows.len()).unwrap();
        assert!(report.drift_sum > 0.0);
        let ratio = report.ratio.unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
    }

    #[test]
    fn n_of_eps_examples() {
        assert_eq!(n_of_eps(0.01), 5);
        assert_eq!(n_of_eps(1e-6), 17);
    }

    #[test]
    fn remark2_classical_ratio_grows_and_ideal_c_is_stable() {
        let eps_list = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        let rows = remark2_experiment(&eps_list);
        for w in rows.windows(2) {
            assert!(
                w[1].classical_ratio > w[0].classical_ratio,
                "classical ratios must grow: {:?}",
                rows.iter().map(|r| r.classical_ratio).collect::<Vec<_>>()
            );
        }
        let cs: Vec<f64> = rows.iter().map(|r| r.ideal_c_star).collect();
        let (lo, hi) = cs
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), c| (l.min(*c), h.max(*c)));
        assert!(hi / lo < 2.0, "ideal c* spread: {cs:?}");
    }

    #[test]
    fn energy_sum_respects_initial_distance_bound() {
        // With delta = infinity and d = 0 the telescoped descent gives
        // sum rho e^2/||phi||^2 <= 2 V(t0) <= 8 ||S||^2.
        let mut cfg = figures::fig1a(figures::ideal());
        cfg.horizon = 1000;
        let trace = simulate(&cfg).unwrap();
        let bx = cfg.theta_box().unwrap();
        let sum = update_energy_sum(&trace);
        let v0 = trace.rows[0].v;
        assert!(
            sum <= 2.0 * v0 + 1e-9,
            "sum = {sum}, 2 V(t0) = {}",
            2.0 * v0
        );
        assert!(2.0 * v0 <= 8.0 * bx.set_norm() * bx.set_norm());
    }

    #[test]
    fn envelope_certificate_holds_pointwise() {
        let trace = simulate(&figures::fig1a(figures::ideal())).unwrap();
        let fit = fit_envelope(&trace, &DEFAULT_LAMBDA_GRID).unwrap();
        let (lambda_star, c_star) = fit.best.unwrap();
        let norms = trace.phi_norms();
        let mut envelope = c_star * norms[0];
        for (k, nk) in norms.iter().enumerate() {
            assert!(*nk <= envelope, "index {k}: {nk:e} > {envelope:e}");
            envelope *= lambda_star;
        }
    }

    #[test]
    fn finite_deadzone_run_satisfies_prop1() {
        let mut cfg = figures::fig1b(figures::ideal());
        cfg.estimator = crate::config::EstimatorKind::Ideal { delta: Some(0.5) };
        cfg.horizon = 800;
        let trace = simulate(&cfg).unwrap();
        let report = check_prop1(&trace, &[-2.0, -3.0, 1.0, -2.0]).unwrap();
        assert!(report.clean(), "{report:?}");
        // The deadzone must actually gate some updates to be exercised.
        assert!(trace.rows.iter().any(|r| r.rho == 0 && r.phi_norm > 0.0));
    }

    #[test]
    fn matrix_decay_uniformly_capped_over_sampled_box() {
        // Sampling experiment (baseline recorded): gamma_emp stayed below
        // 109 over the box with sigma = 0.5.
        let bx = figures::fig1a(figures::ideal()).theta_box().unwrap();
        let mut worst = 0.0f64;
        for k in 0..1000 {
            let theta = bx.sample(k);
            let (a, b) = crate::estimation::theta_to_polys(&theta, 2);
            let coeffs = crate::synthesis::place_poles(&a, &b, &poly::Poly::one()).unwrap();
            let cl = closed_loop_matrix(&theta, &coeffs).unwrap();
            let gamma = matrix_decay(&cl, 0.5, 10).unwrap();
            assert!(gamma.is_finite());
            worst = worst.max(gamma);
        }
        assert!(worst <= 150.0, "gamma cap regressed: {worst}");
    }

    #[test]
    fn transition_products_decay_on_settled_run() {
        // Once the estimator settles, windowed products of the closed-loop
        // matrices collapse geometrically (baseline: < 1e-6 within 8 steps
        // starting from t = 100, peak below 20).
        let trace = simulate(&figures::fig1a(figures::ideal())).unwrap();
        let seq = a_bar_sequence(&trace).unwrap();
        let norms = transition_norms(&seq[100..130]);
        let peak = norms.iter().fold(0.0f64, |m, n| m.max(*n));
        assert!(peak <= 20.0, "peak {peak}");
        for (k, n) in norms.iter().enumerate().skip(8) {
            assert!(*n <= 1e-6, "window {k}: {n:e}");
        }
    }

    #[test]
    fn drift_ratio_bounded_over_windows() {
        // Baseline recorded: the Cauchy-Schwarz-style ratio stayed below
        // 0.51 on every window tried; freeze a 1.0 cap.
        let trace = simulate(&figures::fig1a(figures::ideal())).unwrap();
        for (from, to) in [(0usize, 2000usize), (0, 200), (100, 500), (50, 1200)] {
            let report = estimator_drift_sum(&trace, from, to).unwrap();
            if let Some(ratio) = report.ratio {
                assert!(ratio <= 1.0, "window ({from},{to}): ratio {ratio}");
            }
        }
    }

    #[test]
    fn plateau_error_ignores_settling_window() {
        let mut cfg = figures::fig3();
        cfg.horizon = 700;
        let trace = simulate(&cfg).unwrap();
        let err_all = plateau_tracking_error(&trace, 0);
        let err_settled = plateau_tracking_error(&trace, 50);
        assert!(err_settled.is_finite() && err_all.is_finite());
        assert!(err_settled <= err_all + 1e-12);
    }
}
