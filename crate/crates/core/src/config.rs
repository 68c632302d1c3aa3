//! Config-file data model: everything a run needs, with plant-coordinate
//! intervals for the box (a_i, b_i are what a person reads off a model)
//! converted to theta-coordinates internally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{EstimatorState, EstimatorVariant, ThetaBox};
use crate::poly::{self, Poly};
use crate::signal::{ParamSchedule, Signal};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorKind {
    /// delta omitted means the pure ideal algorithm (delta = infinity).
    Ideal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
    },
    Classical {
        #[serde(default = "default_gain")]
        alpha: f64,
        #[serde(default = "default_gain")]
        beta: f64,
    },
}

fn default_gain() -> f64 {
    1.0
}

impl EstimatorKind {
    pub fn variant(&self) -> EstimatorVariant {
        match self {
            EstimatorKind::Ideal { delta } => EstimatorVariant::Ideal {
                delta: delta.unwrap_or(f64::INFINITY),
            },
            EstimatorKind::Classical { alpha, beta } => EstimatorVariant::Classical {
                alpha: *alpha,
                beta: *beta,
            },
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, EstimatorKind::Ideal { .. })
    }
}

/// Initial estimate in plant coordinates.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PlantPoint {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl PlantPoint {
    pub fn theta(&self) -> Vec<f64> {
        self.a
            .iter()
            .map(|v| -v)
            .chain(self.b.iter().copied())
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct UnmodelledConfig {
    pub beta: f64,
    #[serde(default)]
    pub m0: f64,
    /// Piecewise-constant feedback gain g(t); zero before the first piece.
    pub gain: Vec<GainPiece>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GainPiece {
    pub from: i64,
    pub gain: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    /// Model order; the estimate has 2n entries.
    pub n: usize,
    /// Admissible interval per a_i.
    pub a_intervals: Vec<[f64; 2]>,
    /// Admissible interval per b_i.
    pub b_intervals: Vec<[f64; 2]>,
    /// True-parameter trajectory (constant terms for the LTI case).
    pub theta_star: ParamSchedule,
    pub estimator: EstimatorKind,
    /// Coefficients of the monic target A*(z^{-1}); `[1]` is the deadbeat
    /// design. Degree at most 2n (2n + 2 with step tracking); shorter
    /// vectors are implicitly zero-padded by the solver.
    pub a_star: Vec<f64>,
    #[serde(default)]
    pub step_tracking: bool,
    #[serde(default = "zero_signal")]
    pub d: Signal,
    #[serde(default = "zero_signal")]
    pub ystar: Signal,
    /// y(t0), y(t0-1), ... ; shorter histories are zero-padded.
    #[serde(default)]
    pub y_init: Vec<f64>,
    /// u(t0-1), u(t0-2), ... ; shorter histories are zero-padded.
    #[serde(default)]
    pub u_init: Vec<f64>,
    pub theta_hat0: PlantPoint,
    pub horizon: usize,
    #[serde(default)]
    pub t0: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unmodelled: Option<UnmodelledConfig>,
}

fn zero_signal() -> Signal {
    Signal::Zero
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn theta_box(&self) -> Result<ThetaBox> {
        ThetaBox::from_plant_intervals(&self.a_intervals, &self.b_intervals)
    }

    pub fn a_star_poly(&self) -> Result<Poly> {
        if self.a_star.is_empty() || self.a_star.iter().any(|c| !c.is_finite()) {
            return Err(Error::ConfigInvalid(
                "a_star must be nonempty and finite".into(),
            ));
        }
        let p = Poly::new(self.a_star.clone());
        if !p.is_monic() {
            return Err(Error::ConfigInvalid("a_star must be monic".into()));
        }
        Ok(p)
    }

    pub fn initial_estimator(&self) -> Result<EstimatorState> {
        EstimatorState::new(
            self.theta_hat0.theta(),
            self.estimator.variant(),
            self.theta_box()?,
        )
    }

    /// Validate every config invariant. Returns non-fatal warnings (the
    /// sampled coprimeness margin scan) for the caller to surface.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.n == 0 {
            return Err(Error::ConfigInvalid(
                "model order n must be at least 1".into(),
            ));
        }
        if self.horizon == 0 {
            return Err(Error::ConfigInvalid("horizon must be at least 1".into()));
        }
        if self.a_intervals.len() != self.n || self.b_intervals.len() != self.n {
            return Err(Error::ConfigInvalid(format!(
                "need exactly n = {} a-intervals and b-intervals",
                self.n
            )));
        }
        let bounds = self.theta_box()?;
        if self.theta_star.n() != self.n {
            return Err(Error::ConfigInvalid(
                "theta_star schedule order differs from n".into(),
            ));
        }
        self.theta_star.validate()?;
        self.theta_star
            .validate_within(&bounds, self.t0, self.horizon)?;
        self.d.validate()?;
        self.ystar.validate()?;
        if self.theta_hat0.a.len() != self.n || self.theta_hat0.b.len() != self.n {
            return Err(Error::ConfigInvalid(
                "theta_hat0 must have n a's and n b's".into(),
            ));
        }
        if !bounds.contains(&self.theta_hat0.theta()) {
            return Err(Error::ConfigInvalid(
                "theta_hat0 lies outside the box".into(),
            ));
        }
        self.initial_estimator()?;
        let a_star = self.a_star_poly()?;
        let max_deg = if self.step_tracking {
            2 * self.n + 2
        } else {
            2 * self.n
        };
        if a_star.degree() > max_deg {
            return Err(Error::ConfigInvalid(format!(
                "deg a_star = {} exceeds {max_deg}",
                a_star.degree()
            )));
        }
        if !poly::jury_stable(&a_star) {
            return Err(Error::UnstableTarget);
        }
        if self
            .y_init
            .iter()
            .chain(self.u_init.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::ConfigInvalid(
                "initial history must be finite".into(),
            ));
        }
        if let Some(um) = &self.unmodelled {
            if !(um.beta > 0.0 && um.beta < 1.0) {
                return Err(Error::ConfigInvalid(
                    "unmodelled beta must lie in (0, 1)".into(),
                ));
            }
            if !um.m0.is_finite() {
                return Err(Error::ConfigInvalid("unmodelled m0 must be finite".into()));
            }
            if um
                .gain
                .iter()
                .any(|g| !(g.gain >= 0.0) || !g.gain.is_finite())
            {
                return Err(Error::ConfigInvalid("unmodelled gains must be >= 0".into()));
            }
            if um.gain.windows(2).any(|w| w[0].from >= w[1].from) {
                return Err(Error::ConfigInvalid(
                    "unmodelled gain pieces must be ordered".into(),
                ));
            }
        }

        let mut warnings = Vec::new();
        let report = bounds.coprimeness_report(100);
        if report.min_margin <= 1e-8 {
            warnings.push(format!(
                "coprimeness margin {:e} at theta = {:?} is below 1e-8; the box may contain \
                 degenerate pole-placement problems",
                report.min_margin, report.worst_theta
            ));
        }
        Ok(warnings)
    }
}
