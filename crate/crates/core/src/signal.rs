//! Deterministic exogenous signals (disturbance and reference) and
//! time-varying true-parameter schedules. All angular frequencies are in
//! radians per step; the same t always produces the same value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::ThetaBox;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AmplitudePiece {
    pub from: i64,
    pub amplitude: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Signal {
    Zero,
    Constant {
        value: f64,
    },
    Sinusoid {
        amplitude: f64,
        omega: f64,
    },
    /// sgn(sin(omega t)) with sgn(0) = 0.
    SquareSign {
        omega: f64,
    },
    /// amplitude(t) * sin(omega t) with a piecewise-constant amplitude;
    /// before the first breakpoint the amplitude is zero.
    PiecewiseAmplitude {
        omega: f64,
        pieces: Vec<AmplitudePiece>,
    },
    /// `values[t]` for t in `[0, len)`, zero elsewhere.
    Samples {
        values: Vec<f64>,
    },
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl Signal {
    pub fn eval(&self, t: i64) -> f64 {
        match self {
            Signal::Zero => 0.0,
            Signal::Constant { value } => *value,
            Signal::Sinusoid { amplitude, omega } => amplitude * (omega * t as f64).sin(),
            Signal::SquareSign { omega } => sign((omega * t as f64).sin()),
            Signal::PiecewiseAmplitude { omega, pieces } => {
                let mut amp = 0.0;
                for piece in pieces {
                    if t >= piece.from {
                        amp = piece.amplitude;
                    } else {
                        break;
                    }
                }
                amp * (omega * t as f64).sin()
            }
            Signal::Samples { values } => {
                if t < 0 || t as usize >= values.len() {
                    0.0
                } else {
                    values[t as usize]
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        let ok = match self {
            Signal::Zero => true,
            Signal::Constant { value } => finite(*value),
            Signal::Sinusoid { amplitude, omega } => finite(*amplitude) && finite(*omega),
            Signal::SquareSign { omega } => finite(*omega),
            Signal::PiecewiseAmplitude { omega, pieces } => {
                finite(*omega)
                    && pieces.iter().all(|p| finite(p.amplitude))
                    && pieces.windows(2).all(|w| w[0].from < w[1].from)
            }
            Signal::Samples { values } => values.iter().all(|v| finite(*v)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(
                "signal has non-finite or unordered data".into(),
            ))
        }
    }
}

/// One coefficient's trajectory in plant coordinates.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleTerm {
    Constant {
        value: f64,
    },
    Sinusoid {
        offset: f64,
        amplitude: f64,
        omega: f64,
    },
    Cosine {
        offset: f64,
        amplitude: f64,
        omega: f64,
    },
}

impl ScheduleTerm {
    pub fn eval(&self, t: i64) -> f64 {
        match self {
            ScheduleTerm::Constant { value } => *value,
            ScheduleTerm::Sinusoid {
                offset,
                amplitude,
                omega,
            } => offset + amplitude * (omega * t as f64).sin(),
            ScheduleTerm::Cosine {
                offset,
                amplitude,
                omega,
            } => offset + amplitude * (omega * t as f64).cos(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            ScheduleTerm::Constant { value } => value.is_finite(),
            ScheduleTerm::Sinusoid {
                offset,
                amplitude,
                omega,
            }
            | ScheduleTerm::Cosine {
                offset,
                amplitude,
                omega,
            } => offset.is_finite() && amplitude.is_finite() && omega.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(
                "schedule term has non-finite data".into(),
            ))
        }
    }
}

/// True-parameter trajectory theta*(t), specified per plant coefficient
/// a1(t)..an(t), b1(t)..bn(t).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ParamSchedule {
    pub a: Vec<ScheduleTerm>,
    pub b: Vec<ScheduleTerm>,
}

impl ParamSchedule {
    pub fn constant(a: &[f64], b: &[f64]) -> Self {
        ParamSchedule {
            a: a.iter()
                .map(|v| ScheduleTerm::Constant { value: *v })
                .collect(),
            b: b.iter()
                .map(|v| ScheduleTerm::Constant { value: *v })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn is_constant(&self) -> bool {
        self.a
            .iter()
            .chain(self.b.iter())
            .all(|term| matches!(term, ScheduleTerm::Constant { .. }))
    }

    /// theta*(t) in theta-coordinates (-a1(t)..-an(t), b1(t)..bn(t)).
    pub fn theta_at(&self, t: i64) -> Vec<f64> {
        let mut theta = Vec::with_capacity(self.a.len() + self.b.len());
        for term in &self.a {
            theta.push(-term.eval(t));
        }
        for term in &self.b {
            theta.push(term.eval(t));
        }
        theta
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.b.len() || self.a.is_empty() {
            return Err(Error::ConfigInvalid(
                "schedule needs equal, nonzero counts of a and b terms".into(),
            ));
        }
        for term in self.a.iter().chain(self.b.iter()) {
            term.validate()?;
        }
        Ok(())
    }

    /// Check theta*(t) in S over the whole horizon scan.
    pub fn validate_within(&self, bounds: &ThetaBox, t0: i64, horizon: usize) -> Result<()> {
        for t in t0..t0 + horizon as i64 {
            let theta = self.theta_at(t);
            if !bounds.contains(&theta) {
                return Err(Error::ConfigInvalid(format!(
                    "theta*({t}) leaves the admissible box"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_sign_is_zero_at_origin_and_flips() {
        let s = Signal::SquareSign { omega: 0.01 };
        assert_eq!(s.eval(0), 0.0);
        assert_eq!(s.eval(1), 1.0);
        // First sign flip after t = pi / 0.01 ~= 314.16.
        assert_eq!(s.eval(314), 1.0);
        assert_eq!(s.eval(315), -1.0);
    }

    #[test]
    fn piecewise_amplitude_steps() {
        let s = Signal::PiecewiseAmplitude {
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
        };
        assert_eq!(s.eval(-1), 0.0);
        assert!((s.eval(10) - 0.01 * (50.0f64).sin()).abs() < 1e-15);
        assert!((s.eval(2500) - 0.05 * (12500.0f64).sin()).abs() < 1e-15);
    }

    #[test]
    fn samples_out_of_range_are_zero() {
        let s = Signal::Samples {
            values: vec![1.0, 2.0],
        };
        assert_eq!(s.eval(-1), 0.0);
        assert_eq!(s.eval(0), 1.0);
        assert_eq!(s.eval(2), 0.0);
    }

    #[test]
    fn schedule_theta_coordinates_flip_a() {
        let sched = ParamSchedule::constant(&[2.0, 3.0], &[1.0, -2.0]);
        assert_eq!(sched.theta_at(0), vec![-2.0, -3.0, 1.0, -2.0]);
        assert!(sched.is_constant());
    }

    #[test]
    fn sinusoid_schedule_stays_in_box() {
        let sched = ParamSchedule {
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
        let bx =
            ThetaBox::from_plant_intervals(&[[0.0, 2.0], [1.0, 3.0]], &[[0.0, 1.0], [-5.0, -2.0]])
                .unwrap();
        sched.validate_within(&bx, 0, 10_000).unwrap();
        assert!(!sched.is_constant());
    }
}
