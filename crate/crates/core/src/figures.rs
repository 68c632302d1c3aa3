//! Built-in experiment configs: the second-order benchmark plant with
//! a1 in `[0,2]`, a2 in `[1,3]`, b1 in `[0,1]`, b2 in `[-5,-2]` (every admissible
//! model unstable and non-minimum phase), deadbeat pole placement, and
//! the disturbance, schedule, and unmodelled-dynamics settings of the
//! standard runs. These builders are the single source of truth for those
//! numbers; user configs may override any field.

use crate::config::{EstimatorKind, ExperimentConfig, GainPiece, PlantPoint, UnmodelledConfig};
use crate::signal::{AmplitudePiece, ParamSchedule, ScheduleTerm, Signal};

fn stability_box_a() -> Vec<[f64; 2]> {
    vec![[0.0, 2.0], [1.0, 3.0]]
}

fn stability_box_b() -> Vec<[f64; 2]> {
    vec![[0.0, 1.0], [-5.0, -2.0]]
}

fn midpoint_estimate() -> PlantPoint {
    PlantPoint {
        a: vec![1.0, 2.0],
        b: vec![0.5, -3.5],
    }
}

fn base(estimator: EstimatorKind) -> ExperimentConfig {
    ExperimentConfig {
        n: 2,
        a_intervals: stability_box_a(),
        b_intervals: stability_box_b(),
        theta_star: ParamSchedule::constant(&[2.0, 3.0], &[1.0, -2.0]),
        estimator,
        a_star: vec![1.0],
        step_tracking: false,
        d: Signal::Zero,
        ystar: Signal::Zero,
        y_init: vec![],
        u_init: vec![],
        theta_hat0: midpoint_estimate(),
        horizon: 2000,
        t0: 0,
        unmodelled: None,
    }
}

pub fn ideal() -> EstimatorKind {
    EstimatorKind::Ideal { delta: None }
}

pub fn classical() -> EstimatorKind {
    EstimatorKind::Classical {
        alpha: 1.0,
        beta: 1.0,
    }
}

/// Nonzero initial condition, no noise: y(0) = y(-1) = 0.01, u(-1) = 0.
pub fn fig1a(estimator: EstimatorKind) -> ExperimentConfig {
    let mut cfg = base(estimator);
    cfg.y_init = vec![0.01, 0.01];
    cfg.u_init = vec![0.0];
    cfg
}

/// Zero initial condition with noise d(t) = 0.01 sin(5t).
pub fn fig1b(estimator: EstimatorKind) -> ExperimentConfig {
    let mut cfg = base(estimator);
    cfg.d = Signal::Sinusoid {
        amplitude: 0.01,
        omega: 5.0,
    };
    cfg
}

/// Time-varying parameters with the unmodelled-dynamics block switching
/// on at t = 5000; horizon 10^4.
pub fn fig2() -> ExperimentConfig {
    let mut cfg = base(ideal());
    cfg.theta_star = ParamSchedule {
        a: vec![
            ScheduleTerm::Sinusoid {
                offset: 1.0,
                amplitude: 1.0,
                omega: 0.001,
            },
            ScheduleTerm::Cosine {
                offset: 2.0,
                amplitude: 1.0,
                omega: 0.001,
            },
        ],
        b: vec![
            ScheduleTerm::Sinusoid {
                offset: 0.5,
                amplitude: 0.5,
                omega: 0.005,
            },
            ScheduleTerm::Sinusoid {
                offset: -3.5,
                amplitude: -1.5,
                omega: 0.005,
            },
        ],
    };
    cfg.d = Signal::Sinusoid {
        amplitude: 0.01,
        omega: 5.0,
    };
    cfg.unmodelled = Some(UnmodelledConfig {
        beta: 0.75,
        m0: 0.0,
        gain: vec![
            GainPiece { from: 0, gain: 0.0 },
            GainPiece {
                from: 5000,
                gain: 0.025,
            },
        ],
    });
    cfg.horizon = 10_000;
    cfg
}

/// Step tracking on the sub-box with a2 = 1, b2 = -3.5 fixed: square-wave
/// reference sgn(sin(0.01 t)) and noise stepping 0.01 -> 0.05 at t = 2500.
pub fn fig3() -> ExperimentConfig {
    ExperimentConfig {
        n: 2,
        a_intervals: vec![[0.0, 2.0], [1.0, 1.0]],
        b_intervals: vec![[0.0, 1.0], [-3.5, -3.5]],
        theta_star: ParamSchedule {
            a: vec![
                ScheduleTerm::Sinusoid {
                    offset: 1.0,
                    amplitude: 1.0,
                    omega: 0.002,
                },
                ScheduleTerm::Constant { value: 1.0 },
            ],
            b: vec![
                ScheduleTerm::Cosine {
                    offset: 0.5,
                    amplitude: 0.5,
                    omega: 0.005,
                },
                ScheduleTerm::Constant { value: -3.5 },
            ],
        },
        estimator: ideal(),
        a_star: vec![1.0],
        step_tracking: true,
        d: Signal::PiecewiseAmplitude {
            omega: 5.0,
            pieces: vec![
                AmplitudePiece {
                    from: 0,
                    amplitude: 0.01,
                },
                AmplitudePiece {
                    from: 2500,
                    amplitude: 0.05,
                },
            ],
        },
        ystar: Signal::SquareSign { omega: 0.01 },
        y_init: vec![],
        u_init: vec![],
        theta_hat0: PlantPoint {
            a: vec![1.0, 1.0],
            b: vec![0.5, -3.5],
        },
        horizon: 5000,
        t0: 0,
        unmodelled: None,
    }
}

/// Exact initial estimate with the deadbeat design: the state is
/// annihilated after 2n steps and the estimator never moves.
pub fn deadbeat_exact() -> ExperimentConfig {
    let mut cfg = fig1a(ideal());
    cfg.theta_hat0 = PlantPoint {
        a: vec![2.0, 3.0],
        b: vec![1.0, -2.0],
    };
    cfg.horizon = 50;
    cfg
}

/// Constant unit reference on the tracking sub-box, no noise: the
/// step-tracking design should drive |y - 1| to numerical zero.
pub fn step_constant_reference() -> ExperimentConfig {
    ExperimentConfig {
        n: 2,
        a_intervals: vec![[0.0, 2.0], [1.0, 1.0]],
        b_intervals: vec![[0.0, 1.0], [-3.5, -3.5]],
        theta_star: ParamSchedule::constant(&[1.5, 1.0], &[0.75, -3.5]),
        estimator: ideal(),
        a_star: vec![1.0],
        step_tracking: true,
        d: Signal::Zero,
        ystar: Signal::Constant { value: 1.0 },
        y_init: vec![],
        u_init: vec![],
        theta_hat0: PlantPoint {
            a: vec![1.0, 1.0],
            b: vec![0.5, -3.5],
        },
        horizon: 2000,
        t0: 0,
        unmodelled: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtin_configs_validate() {
        for cfg in [
            fig1a(ideal()),
            fig1a(classical()),
            fig1b(ideal()),
            fig1b(classical()),
            fig2(),
            fig3(),
            deadbeat_exact(),
            step_constant_reference(),
        ] {
            cfg.validate().unwrap();
        }
    }
}
