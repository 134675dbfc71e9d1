//! Shared parameter types: system-level constants, beam schemes, mode
//! switching policies, and rate-energy result points.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("parameter `{field}` is invalid: {reason}")]
    InvalidField { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: String) -> ParamError {
    ParamError::InvalidField { field, reason }
}

/// System-level constants, all in linear SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Transmit power [W].
    pub p_tx: f64,
    /// Transmit antenna count.
    pub n_t: u32,
    /// Large-scale power gain (dimensionless).
    pub theta: f64,
    /// Noise power over the signal bandwidth [W].
    pub sigma2: f64,
    /// Energy conversion efficiency in (0, 1].
    pub zeta: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.p_tx > 0.0) || !self.p_tx.is_finite() {
            return Err(invalid("p_tx", format!("must be a positive finite wattage, got {}", self.p_tx)));
        }
        if self.n_t < 1 {
            return Err(invalid("n_t", format!("must be at least 1, got {}", self.n_t)));
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return Err(invalid("theta", format!("must be a positive finite gain, got {}", self.theta)));
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(invalid("sigma2", format!("must be a positive finite wattage, got {}", self.sigma2)));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(invalid("zeta", format!("must lie in (0, 1], got {}", self.zeta)));
        }
        Ok(())
    }

    /// Mean received signal power before fading, theta * P [W].
    pub fn rx_power_w(&self) -> f64 {
        self.theta * self.p_tx
    }

    /// Receive SNR scale theta * P / sigma2 (the factor multiplying A inside the log).
    pub fn snr_scale(&self) -> f64 {
        self.theta * self.p_tx / self.sigma2
    }
}

/// Beam construction family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamKind {
    Gaussian,
    Unitary,
    Binary,
}

/// A random-beam scheme: construction family plus beam count N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamScheme {
    pub kind: BeamKind,
    pub n_beams: u32,
}

impl BeamScheme {
    pub fn gaussian(n_beams: u32) -> Self {
        BeamScheme { kind: BeamKind::Gaussian, n_beams }
    }

    pub fn unitary(n_beams: u32) -> Self {
        BeamScheme { kind: BeamKind::Unitary, n_beams }
    }

    pub fn binary(n_beams: u32) -> Self {
        BeamScheme { kind: BeamKind::Binary, n_beams }
    }

    pub fn validate(&self, n_t: u32) -> Result<(), ParamError> {
        if self.n_beams < 1 || self.n_beams > n_t {
            return Err(invalid(
                "n_beams",
                format!("must satisfy 1 <= N <= n_t = {n_t}, got {}", self.n_beams),
            ));
        }
        Ok(())
    }
}

/// Receiver mode switching policy.
///
/// TS decodes a sub-block iff its equivalent channel power A satisfies
/// A <= a_bar (ties decode, fixed for determinism); `a_bar` may be
/// `f64::INFINITY` for all-ID operation. PS decodes a fixed fraction `tau`
/// of every block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SwitchPolicy {
    Ts { a_bar: f64 },
    Ps { tau: f64 },
}

impl SwitchPolicy {
    pub fn validate(&self) -> Result<(), ParamError> {
        match *self {
            SwitchPolicy::Ts { a_bar } => {
                if a_bar.is_nan() || a_bar < 0.0 {
                    return Err(invalid("a_bar", format!("must be >= 0 (or +inf), got {a_bar}")));
                }
            }
            SwitchPolicy::Ps { tau } => {
                if !(0.0..=1.0).contains(&tau) {
                    return Err(invalid("tau", format!("must lie in [0, 1], got {tau}")));
                }
            }
        }
        Ok(())
    }
}

/// Origin of a rate-energy point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum PointSource {
    Analytic,
    MonteCarlo { stderr_rate: f64, stderr_power: f64 },
}

/// One point on a rate-energy trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct REPoint {
    /// Spectral efficiency [bits/s/Hz].
    pub rate: f64,
    /// Harvested power [W].
    pub power: f64,
    pub source: PointSource,
}

impl REPoint {
    pub fn analytic(rate: f64, power: f64) -> Self {
        REPoint { rate, power, source: PointSource::Analytic }
    }

    pub fn monte_carlo(rate: f64, stderr_rate: f64, power: f64, stderr_power: f64) -> Self {
        REPoint { rate, power, source: PointSource::MonteCarlo { stderr_rate, stderr_power } }
    }
}
