//! Closed-loop driver: plant, estimator, and certainty-equivalence
//! controller, with deterministic disturbances, time-varying parameter
//! schedules, and the exponentially weighted unmodelled-dynamics block.
//!
//! Step ordering at time t (fixed by the control law indexing its
//! coefficients at t-1):
//!   1. read y(t), produced by the previous plant step;
//!   2. estimator update with phi(t-1) and y(t) gives theta_hat(t);
//!   3. synthesize controller coefficients from theta_hat(t);
//!   4. u(t) from the coefficients synthesized at t-1;
//!   5. form phi(t) and advance the plant to y(t+1).

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::estimation::{theta_to_polys, Regressor};
use crate::matrix::dot;
use crate::signal::ParamSchedule;
use crate::synthesis::{
    self, closed_loop_matrix, place_poles, place_poles_step_tracking, ControllerCoeffs,
    ControllerMode,
};

/// Exponentially weighted surrogate for strictly causal unmodelled
/// dynamics: m(t+1) = beta (m(t) + ||phi(t)||), emitting
/// d_Delta(t) = g(t) (m(t) + ||phi(t)||) with piecewise-constant g.
#[derive(Clone, Debug)]
pub struct UnmodelledBlock {
    beta: f64,
    m: f64,
    gain: Vec<(i64, f64)>,
}

impl UnmodelledBlock {
    pub fn new(beta: f64, m0: f64, gain: Vec<(i64, f64)>) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::ConfigInvalid(
                "unmodelled beta must lie in (0, 1)".into(),
            ));
        }
        Ok(UnmodelledBlock { beta, m: m0, gain })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn gain_at(&self, t: i64) -> f64 {
        let mut g = 0.0;
        for (from, gain) in &self.gain {
            if t >= *from {
                g = *gain;
            } else {
                break;
            }
        }
        g
    }

    /// Emit d_Delta(t) and advance the internal state.
    pub fn step(&self, phi_norm: f64, t: i64) -> (f64, UnmodelledBlock) {
        let d_delta = self.gain_at(t) * (self.m + phi_norm);
        let next = UnmodelledBlock {
            beta: self.beta,
            m: self.beta * (self.m + phi_norm),
            gain: self.gain.clone(),
        };
        (d_delta, next)
    }
}

/// y(t+1) = phi(t)^T theta*(t) + d(t) + d_Delta(t).
pub fn plant_step(phi: &Regressor, theta_star_t: &[f64], d_t: f64, d_delta_t: f64) -> f64 {
    dot(phi.phi(), theta_star_t) + d_t + d_delta_t
}

/// Per-step record. `e` and `rho` describe the estimator update that
/// produced this row's theta_hat (so row t holds e(t) computed from
/// phi(t-1)); `d` and `ddelta` are the disturbances entering y(t+1).
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub t: i64,
    pub y: f64,
    pub u: f64,
    pub ystar: f64,
    pub d: f64,
    pub ddelta: f64,
    pub e: f64,
    pub rho: u8,
    pub v: f64,
    pub phi_norm: f64,
    pub theta_hat: Vec<f64>,
    pub theta_star: Vec<f64>,
    /// Feedforward r(t); carried for gain analysis, not part of the CSV.
    pub r: f64,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub n: usize,
    pub mode: ControllerMode,
    /// True when the run used the ideal/deadzone estimator.
    pub ideal_estimator: bool,
    pub rows: Vec<TraceRow>,
    /// Coefficients synthesized at each step (aligned with rows).
    pub coeffs: Vec<ControllerCoeffs>,
    /// max over steps of ||phi(t+1) - (A_bar phi + B1 e + B2 r)||_inf
    /// scaled by (||phi(t)|| + 1); zero for step-tracking runs, which have
    /// no closed-loop matrix.
    pub keyeq_max_dev: f64,
}

impl Trace {
    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    pub fn phi_norms(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.phi_norm).collect()
    }

    pub fn theta_star_is_constant(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[0].theta_star == w[1].theta_star)
    }
}

fn push_front(hist: &mut Vec<f64>, value: f64, depth: usize) {
    hist.insert(0, value);
    hist.truncate(depth);
}

/// Run the closed loop for `horizon` steps. Deterministic: identical
/// configs produce identical traces.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Trace> {
    cfg.validate()?;
    let n = cfg.n;
    let depth = n + 3;
    let bounds = cfg.theta_box()?;
    let a_star = cfg.a_star_poly()?;
    let mut estimator = cfg.initial_estimator()?;
    let mode = if cfg.step_tracking {
        ControllerMode::StepTracking
    } else {
        ControllerMode::Standard
    };

    let mut y_hist = cfg.y_init.clone();
    y_hist.resize(depth, 0.0);
    let mut u_hist = cfg.u_init.clone();
    u_hist.resize(depth, 0.0);
    // The reference is exogenous and defined for all time.
    let mut ystar_hist: Vec<f64> = (1..=depth as i64)
        .map(|k| cfg.ystar.eval(cfg.t0 - k))
        .collect();

    let mut unmodelled = match &cfg.unmodelled {
        Some(um) => Some(UnmodelledBlock::new(
            um.beta,
            um.m0,
            um.gain.iter().map(|g| (g.from, g.gain)).collect(),
        )?),
        None => None,
    };

    let mut rows: Vec<TraceRow> = Vec::with_capacity(cfg.horizon);
    let mut coeffs_log: Vec<ControllerCoeffs> = Vec::with_capacity(cfg.horizon);
    let mut keyeq_max_dev = 0.0f64;

    let mut phi_prev: Option<Regressor> = None;
    let mut coeffs_prev: Option<ControllerCoeffs> = None;
    let mut r_prev = 0.0f64;

    for t in cfg.t0..cfg.t0 + cfg.horizon as i64 {
        let y_t = y_hist[0];
        push_front(&mut ystar_hist, cfg.ystar.eval(t), depth + 1);

        // Estimator update from phi(t-1), y(t).
        let theta_before = estimator.theta_hat().to_vec();
        let (e_t, rho_t) = match &phi_prev {
            Some(phi) => {
                let e = estimator.prediction_error(phi, y_t);
                let rho = if cfg.estimator.is_ideal() {
                    estimator.rho(phi, e)
                } else {
                    !phi.is_zero()
                };
                estimator = estimator.update(phi, y_t);
                (e, rho)
            }
            None => (0.0, false),
        };
        debug_assert!(bounds.contains(estimator.theta_hat()));

        // Synthesis from theta_hat(t).
        let (a_hat, b_hat) = theta_to_polys(estimator.theta_hat(), n);
        let coeffs_t = match mode {
            ControllerMode::Standard => place_poles(&a_hat, &b_hat, &a_star)?,
            ControllerMode::StepTracking => place_poles_step_tracking(&a_hat, &b_hat, &a_star)?,
        };

        // Control from the coefficients synthesized one step earlier.
        let active = coeffs_prev.as_ref().unwrap_or(&coeffs_t);
        let u_t = synthesis::control_input(active, &u_hist, &y_hist[1..], &ystar_hist[1..])?;
        push_front(&mut u_hist, u_t, depth);

        // phi(t) = (y(t)..y(t-n+1), u(t)..u(t-n+1)).
        let mut phi_vec = Vec::with_capacity(2 * n);
        phi_vec.extend_from_slice(&y_hist[..n]);
        phi_vec.extend_from_slice(&u_hist[..n]);
        let phi_t = Regressor::new(phi_vec);
        let phi_norm = phi_t.norm();

        let r_t = synthesis::feedforward_r(&coeffs_t, &ystar_hist)?;

        // Key-equation consistency check against the scalar recurrences.
        if mode == ControllerMode::Standard {
            if let (Some(phi_p), Some(coeffs_p)) = (&phi_prev, &coeffs_prev) {
                let cl = closed_loop_matrix(&theta_before, coeffs_p)?;
                let mut pred = cl.mat().matvec(phi_p.phi());
                pred[cl.b1_index()] += e_t;
                pred[cl.b2_index()] += r_prev;
                let dev = phi_t
                    .phi()
                    .iter()
                    .zip(pred.iter())
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                keyeq_max_dev = keyeq_max_dev.max(dev / (phi_p.norm() + 1.0));
            }
        }

        // Disturbances entering y(t+1).
        let d_t = cfg.d.eval(t);
        let ddelta_t = match unmodelled.take() {
            Some(block) => {
                let (d_delta, next) = block.step(phi_norm, t);
                unmodelled = Some(next);
                d_delta
            }
            None => 0.0,
        };
        let theta_star_t = cfg.theta_star.theta_at(t);
        let y_next = plant_step(&phi_t, &theta_star_t, d_t, ddelta_t);

        rows.push(TraceRow {
            t,
            y: y_t,
            u: u_t,
            ystar: ystar_hist[0],
            d: d_t,
            ddelta: ddelta_t,
            e: e_t,
            rho: rho_t as u8,
            v: estimator.lyapunov_v(&theta_star_t),
            phi_norm,
            theta_hat: estimator.theta_hat().to_vec(),
            theta_star: theta_star_t,
            r: r_t,
        });
        coeffs_log.push(coeffs_t.clone());

        push_front(&mut y_hist, y_next, depth);
        phi_prev = Some(phi_t);
        coeffs_prev = Some(coeffs_t);
        r_prev = r_t;
    }

    Ok(Trace {
        n,
        mode,
        ideal_estimator: cfg.estimator.is_ideal(),
        rows,
        coeffs: coeffs_log,
        keyeq_max_dev,
    })
}

/// Smallest (c0, eps) envelope such that the parameter variation over
/// every subwindow [t1', t2') of [t1, t2) is at most c0 + eps (t2' - t1').
/// eps is the long-run slope of the worst-window variation; c0 then covers
/// every subwindow by construction.
pub fn variation_budget(schedule: &ParamSchedule, t1: i64, t2: i64) -> (f64, f64) {
    assert!(t2 > t1, "variation window must be nonempty");
    let per_step: Vec<f64> = (t1..t2 - 1)
        .map(|t| {
            let a = schedule.theta_at(t);
            let b = schedule.theta_at(t + 1);
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    variation_budget_path(&per_step)
}

/// Same fit over an explicit per-step variation sequence
/// (`per_step[j]` = ||theta*(j+1) - theta*(j)||).
pub fn variation_budget_path(per_step: &[f64]) -> (f64, f64) {
    let len = per_step.len();
    if len == 0 {
        return (0.0, 0.0);
    }
    let mut prefix = Vec::with_capacity(len + 1);
    prefix.push(0.0f64);
    for v in per_step {
        let last = *prefix.last().unwrap();
        prefix.push(last + v);
    }
    let worst_window = |w: usize| -> f64 {
        (0..=len - w)
            .map(|s| prefix[s + w] - prefix[s])
            .fold(0.0f64, f64::max)
    };
    let eps = if len < 2 {
        0.0
    } else {
        let half = len / 2;
        ((worst_window(len) - worst_window(half)) / (len - half) as f64).max(0.0)
    };
    // c0 = sup over subwindows of (variation - eps * length), via a
    // running minimum of prefix[t] - eps t.
    let mut c0 = 0.0f64;
    let mut min_q = 0.0f64;
    for t in 1..=len {
        let q = prefix[t] - eps * t as f64;
        c0 = c0.max(q - min_q);
        min_q = min_q.min(q);
    }
    (c0.max(0.0), eps)
}
