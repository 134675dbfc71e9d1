//! Experiment spec files: schema, unit handling, and per-kind validation.
//!
//! Specs are written in TOML. Physical quantities are accepted in dBm / dB
//! only at this boundary and converted to linear SI on ingest; everything
//! past `Plan` is watts and linear gains.

use serde::Deserialize;
use std::collections::BTreeMap;
use swipt_core::{BeamKind, BeamScheme, McConfig, SwitchPolicy, SystemParams};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("unknown unit {0:?} (expected dBm, dB, W, or linear)")]
    UnknownUnit(String),
    #[error("spec parse error: {0}")]
    Parse(#[from] toml::de::Error),
}

fn invalid(field: &str, reason: impl Into<String>) -> SpecError {
    SpecError::Invalid { field: field.to_string(), reason: reason.into() }
}

/// Converts a value in the named unit to its linear SI equivalent.
pub fn unit_convert(value: f64, unit: &str) -> Result<f64, SpecError> {
    match unit {
        "dBm" | "dbm" => Ok(10f64.powf((value - 30.0) / 10.0)),
        "dB" | "db" => Ok(10f64.powf(value / 10.0)),
        "W" | "w" | "linear" => Ok(value),
        other => Err(SpecError::UnknownUnit(other.to_string())),
    }
}

/// Inverse of [`unit_convert`] for the logarithmic units; used when a sweep
/// runs on a dBm axis but a report wants the linear value alongside.
pub fn watts_to_dbm(p_w: f64) -> f64 {
    10.0 * p_w.log10() + 30.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ReTradeoff,
    RateVsH,
    PowerVsH,
    ScalingTradeoff,
    OutageVsP,
    RateVsPMatchedPower,
    NetworkThroughput,
    BeamComparison,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::ReTradeoff,
        ExperimentKind::RateVsH,
        ExperimentKind::PowerVsH,
        ExperimentKind::ScalingTradeoff,
        ExperimentKind::OutageVsP,
        ExperimentKind::RateVsPMatchedPower,
        ExperimentKind::NetworkThroughput,
        ExperimentKind::BeamComparison,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ReTradeoff => "re_tradeoff",
            ExperimentKind::RateVsH => "rate_vs_h",
            ExperimentKind::PowerVsH => "power_vs_h",
            ExperimentKind::ScalingTradeoff => "scaling_tradeoff",
            ExperimentKind::OutageVsP => "outage_vs_p",
            ExperimentKind::RateVsPMatchedPower => "rate_vs_p_matched_power",
            ExperimentKind::NetworkThroughput => "network_throughput",
            ExperimentKind::BeamComparison => "beam_comparison",
        }
    }

    pub fn blurb(self) -> &'static str {
        match self {
            ExperimentKind::ReTradeoff => {
                "rate-energy boundary traces for PS and TS at a fixed multicast channel"
            }
            ExperimentKind::RateVsH => "block rate against channel power (or transmit power)",
            ExperimentKind::PowerVsH => "per-block harvested power against channel power",
            ExperimentKind::ScalingTradeoff => "rate and power scaling factors across thresholds",
            ExperimentKind::OutageVsP => "power outage probability against transmit power",
            ExperimentKind::RateVsPMatchedPower => {
                "average rate of all beam schemes at one matched power scaling"
            }
            ExperimentKind::NetworkThroughput => {
                "multicast network throughput and sum harvested power against the rate target"
            }
            ExperimentKind::BeamComparison => "average rate/power of the three beam schemes",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Montecarlo,
}

impl Engine {
    pub fn tag(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Montecarlo => "montecarlo",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Sweep {
    /// Inclusive linear grid over [min, max]; a single point sits at min.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + step * i as f64).collect()
    }

    fn validate(&self) -> Result<(), SpecError> {
        if self.points == 0 {
            return Err(invalid("sweep.points", "must be >= 1"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(invalid("sweep", format!("range [{}, {}] is empty or non-finite", self.min, self.max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub kind: ExperimentKind,
    pub sweep: Sweep,
    #[serde(default)]
    pub fixed: BTreeMap<String, toml::Value>,
    pub engines: Vec<Engine>,
    #[serde(default)]
    pub mc: McConfig,
    pub output: String,
}

/// Which switching policy a spec pinned, read from the `a_bar` / `tau` keys.
fn policy_from_fixed(spec: &ExperimentSpec) -> Result<SwitchPolicy, SpecError> {
    match (spec.fixed.contains_key("a_bar"), spec.fixed.contains_key("tau")) {
        (true, true) => Err(invalid("fixed", "give exactly one of a_bar (TS) or tau (PS), not both")),
        (false, false) => Err(invalid("fixed", "missing switching policy: set a_bar (TS) or tau (PS)")),
        (true, false) => {
            let a_bar = spec.fixed_f64("a_bar")?;
            if !(a_bar >= 0.0) {
                return Err(invalid("fixed.a_bar", "must be >= 0"));
            }
            Ok(SwitchPolicy::Ts { a_bar })
        }
        (false, true) => {
            let tau = spec.fixed_f64("tau")?;
            if !(0.0..=1.0).contains(&tau) {
                return Err(invalid("fixed.tau", "must lie in [0, 1]"));
            }
            Ok(SwitchPolicy::Ps { tau })
        }
    }
}

/// System constants shared by most kinds; `p_w` is None when the sweep axis
/// supplies the transmit power.
#[derive(Debug, Clone, Copy)]
pub struct PhysBase {
    pub n_t: u32,
    pub theta: f64,
    pub sigma2: f64,
    pub zeta: f64,
    pub p_w: Option<f64>,
}

impl PhysBase {
    pub fn sys_at(&self, p_w: f64) -> SystemParams {
        SystemParams { p_tx: p_w, n_t: self.n_t, theta: self.theta, sigma2: self.sigma2, zeta: self.zeta }
    }

    pub fn sys_fixed(&self) -> SystemParams {
        self.sys_at(self.p_w.expect("plan guarantees a fixed transmit power for this kind"))
    }
}

/// Fully validated, unit-normalized description of what to run.
#[derive(Debug, Clone)]
pub enum Plan {
    ReTradeoff { base: PhysBase, h_users: Vec<f64>, max_beams: u32 },
    RateVsH { base: PhysBase, n_beams: u32, policy: SwitchPolicy, h_fixed: Option<f64> },
    PowerVsH { base: PhysBase, scheme: BeamScheme, policy: SwitchPolicy },
    ScalingTradeoff { n_t: u32, max_beams: u32 },
    OutageVsP { base: PhysBase, scheme: BeamScheme, policy: SwitchPolicy, q_hat_w: f64 },
    RateVsPMatchedPower { base: PhysBase, pi_target: f64 },
    NetworkThroughput { net: swipt_core::NetworkSpec, seeds: Vec<u64> },
    BeamComparison { base: PhysBase, a_bar_fixed: Option<f64> },
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self, SpecError> {
        Ok(toml::from_str(text)?)
    }

    fn fixed_value(&self, key: &str) -> Result<&toml::Value, SpecError> {
        self.fixed
            .get(key)
            .ok_or_else(|| invalid(&format!("fixed.{key}"), "required by this kind but missing"))
    }

    pub fn fixed_f64(&self, key: &str) -> Result<f64, SpecError> {
        let v = self.fixed_value(key)?;
        v.as_float()
            .or_else(|| v.as_integer().map(|i| i as f64))
            .ok_or_else(|| invalid(&format!("fixed.{key}"), "must be a number"))
    }

    pub fn fixed_u32(&self, key: &str) -> Result<u32, SpecError> {
        let v = self.fixed_value(key)?;
        v.as_integer()
            .filter(|&i| i >= 0 && i <= u32::MAX as i64)
            .map(|i| i as u32)
            .ok_or_else(|| invalid(&format!("fixed.{key}"), "must be a non-negative integer"))
    }

    pub fn fixed_str(&self, key: &str) -> Result<&str, SpecError> {
        self.fixed_value(key)?
            .as_str()
            .ok_or_else(|| invalid(&format!("fixed.{key}"), "must be a string"))
    }

    /// Reads a power given as `{base}_w` (watts) or `{base}_dbm`.
    fn power_key(&self, stem: &str, required: bool) -> Result<Option<f64>, SpecError> {
        let kw = format!("{stem}_w");
        let kd = format!("{stem}_dbm");
        match (self.fixed.contains_key(&kw), self.fixed.contains_key(&kd)) {
            (true, true) => Err(invalid(&format!("fixed.{kw}"), format!("conflicts with fixed.{kd}; give one"))),
            (true, false) => Ok(Some(self.fixed_f64(&kw)?)),
            (false, true) => Ok(Some(unit_convert(self.fixed_f64(&kd)?, "dBm")?)),
            (false, false) if required => {
                Err(invalid(&format!("fixed.{kw}"), format!("required (or fixed.{kd}) but missing")))
            }
            (false, false) => Ok(None),
        }
    }

    /// Reads a linear gain given as `{stem}` or `{stem}_db`.
    fn gain_key(&self, stem: &str, required: bool) -> Result<Option<f64>, SpecError> {
        let kd = format!("{stem}_db");
        match (self.fixed.contains_key(stem), self.fixed.contains_key(&kd)) {
            (true, true) => Err(invalid(&format!("fixed.{stem}"), format!("conflicts with fixed.{kd}; give one"))),
            (true, false) => Ok(Some(self.fixed_f64(stem)?)),
            (false, true) => Ok(Some(unit_convert(self.fixed_f64(&kd)?, "dB")?)),
            (false, false) if required => {
                Err(invalid(&format!("fixed.{stem}"), format!("required (or fixed.{kd}) but missing")))
            }
            (false, false) => Ok(None),
        }
    }

    fn beam_kind(&self, default: BeamKind) -> Result<BeamKind, SpecError> {
        if !self.fixed.contains_key("beam") {
            return Ok(default);
        }
        match self.fixed_str("beam")? {
            "gaussian" => Ok(BeamKind::Gaussian),
            "unitary" => Ok(BeamKind::Unitary),
            "binary" => Ok(BeamKind::Binary),
            other => Err(invalid("fixed.beam", format!("unknown scheme {other:?} (gaussian | unitary | binary)"))),
        }
    }

    fn phys_base(&self, p_from_axis: bool) -> Result<PhysBase, SpecError> {
        self.phys_base_with(p_from_axis, true)
    }

    fn phys_base_with(&self, p_from_axis: bool, theta_required: bool) -> Result<PhysBase, SpecError> {
        let n_t = self.fixed_u32("n_t")?;
        if n_t == 0 {
            return Err(invalid("fixed.n_t", "must be >= 1"));
        }
        // the network kind derives per-user gains from pathloss and
        // shadowing, so theta is meaningless there and defaults out
        let theta = self.gain_key("theta", theta_required)?.unwrap_or(1.0);
        if !(theta > 0.0) {
            return Err(invalid("fixed.theta", "must be > 0"));
        }
        // default noise floor: -110 dBm/Hz over a 10 MHz band
        let sigma2 = self.gain_key("sigma2", false)?.map_or(1e-7, |v| v);
        if !(sigma2 > 0.0) {
            return Err(invalid("fixed.sigma2", "must be > 0"));
        }
        let zeta = if self.fixed.contains_key("zeta") { self.fixed_f64("zeta")? } else { 1.0 };
        if !(zeta > 0.0 && zeta <= 1.0) {
            return Err(invalid("fixed.zeta", "must lie in (0, 1]"));
        }
        let p_w = if p_from_axis {
            if self.fixed.contains_key("p_w") || self.fixed.contains_key("p_dbm") {
                return Err(invalid("fixed.p_w", "conflicts with the transmit-power sweep axis"));
            }
            None
        } else {
            let p = self.power_key("p", true)?.expect("required power is present");
            if !(p > 0.0) {
                return Err(invalid("fixed.p_w", "must be > 0"));
            }
            Some(p)
        };
        Ok(PhysBase { n_t, theta, sigma2, zeta, p_w })
    }

    fn n_beams_checked(&self, n_t: u32) -> Result<u32, SpecError> {
        let n = self.fixed_u32("n_beams")?;
        if n < 1 || n > n_t {
            return Err(invalid("fixed.n_beams", format!("must satisfy 1 <= n_beams <= n_t = {n_t}")));
        }
        Ok(n)
    }

    fn axis_must_be(&self, allowed: &[&str]) -> Result<(), SpecError> {
        if allowed.contains(&self.sweep.axis.as_str()) {
            Ok(())
        } else {
            Err(invalid(
                "sweep.axis",
                format!("kind {} sweeps one of {:?}, got {:?}", self.kind.name(), allowed, self.sweep.axis),
            ))
        }
    }

    fn engines_checked(&self, allowed: &[Engine]) -> Result<(), SpecError> {
        if self.engines.is_empty() {
            return Err(invalid("engines", "must name at least one engine"));
        }
        let mut seen = Vec::new();
        for e in &self.engines {
            if seen.contains(e) {
                return Err(invalid("engines", format!("duplicate engine {:?}", e.tag())));
            }
            if !allowed.contains(e) {
                return Err(invalid(
                    "engines",
                    format!("kind {} does not support the {} engine", self.kind.name(), e.tag()),
                ));
            }
            seen.push(*e);
        }
        Ok(())
    }

    pub fn has_engine(&self, e: Engine) -> bool {
        self.engines.contains(&e)
    }

    /// Validates the experiment spec and lowers it to a typed, unit-normalized plan.
    /// `validate` and `run` both go through here, so they cannot diverge.
    pub fn plan(&self) -> Result<Plan, SpecError> {
        if self.name.trim().is_empty() {
            return Err(invalid("name", "must be non-empty"));
        }
        if self.output.trim().is_empty() {
            return Err(invalid("output", "must be non-empty"));
        }
        if self.mc.n_channel_draws < 1 || self.mc.n_subblock_draws < 1 {
            return Err(invalid("mc", "draw counts must be >= 1"));
        }
        if self.mc.worker_count < 1 {
            return Err(invalid("mc.worker_count", "must be >= 1"));
        }
        self.sweep.validate()?;
        let both = [Engine::Analytic, Engine::Montecarlo];

        match self.kind {
            ExperimentKind::ReTradeoff => {
                self.engines_checked(&both)?;
                self.axis_must_be(&["policy_param"])?;
                if self.sweep.min < 0.0 || self.sweep.max > 1.0 {
                    return Err(invalid("sweep", "policy_param runs over [0, 1]"));
                }
                let base = self.phys_base(false)?;
                let max_beams = self.fixed_u32("max_beams")?;
                if max_beams < 1 || max_beams > base.n_t {
                    return Err(invalid("fixed.max_beams", format!("must satisfy 1 <= max_beams <= n_t = {}", base.n_t)));
                }
                let mut h_users = vec![self.fixed_f64("h1")?];
                if self.fixed.contains_key("h2") {
                    h_users.push(self.fixed_f64("h2")?);
                }
                if h_users.iter().any(|&h| !(h > 0.0)) {
                    return Err(invalid("fixed.h1", "channel powers must be > 0"));
                }
                Ok(Plan::ReTradeoff { base, h_users, max_beams })
            }
            ExperimentKind::RateVsH => {
                self.engines_checked(&both)?;
                self.axis_must_be(&["h", "p_dbm"])?;
                if self.beam_kind(BeamKind::Gaussian)? != BeamKind::Gaussian {
                    return Err(invalid("fixed.beam", "rate_vs_h covers the gaussian scheme only"));
                }
                let p_from_axis = self.sweep.axis == "p_dbm";
                let base = self.phys_base(p_from_axis)?;
                let n_beams = self.n_beams_checked(base.n_t)?;
                let policy = policy_from_fixed(self)?;
                let h_fixed = if p_from_axis {
                    let h = self.fixed_f64("h")?;
                    if !(h > 0.0) {
                        return Err(invalid("fixed.h", "must be > 0"));
                    }
                    Some(h)
                } else {
                    if self.sweep.min <= 0.0 {
                        return Err(invalid("sweep.min", "channel power must be > 0"));
                    }
                    None
                };
                Ok(Plan::RateVsH { base, n_beams, policy, h_fixed })
            }
            ExperimentKind::PowerVsH => {
                self.engines_checked(&both)?;
                self.axis_must_be(&["h"])?;
                if self.sweep.min <= 0.0 {
                    return Err(invalid("sweep.min", "channel power must be > 0"));
                }
                let base = self.phys_base(false)?;
                let n_beams = self.n_beams_checked(base.n_t)?;
                let kind = self.beam_kind(BeamKind::Gaussian)?;
                let scheme = match kind {
                    BeamKind::Gaussian => BeamScheme::gaussian(n_beams),
                    BeamKind::Unitary => {
                        if base.n_t != 2 || n_beams != 1 {
                            return Err(invalid("fixed.beam", "unitary closed forms need n_t = 2, n_beams = 1"));
                        }
                        BeamScheme::unitary(1)
                    }
                    BeamKind::Binary => {
                        return Err(invalid(
                            "fixed.beam",
                            "binary per-block power depends on per-antenna gains, not a scalar h",
                        ))
                    }
                };
                let policy = policy_from_fixed(self)?;
                Ok(Plan::PowerVsH { base, scheme, policy })
            }
            ExperimentKind::ScalingTradeoff => {
                self.engines_checked(&[Engine::Analytic])?;
                self.axis_must_be(&["a_bar"])?;
                if self.sweep.min < 0.0 {
                    return Err(invalid("sweep.min", "thresholds are >= 0"));
                }
                let n_t = self.fixed_u32("n_t")?;
                if n_t == 0 {
                    return Err(invalid("fixed.n_t", "must be >= 1"));
                }
                let max_beams = self.fixed_u32("max_beams")?;
                if max_beams < 1 || max_beams > n_t {
                    return Err(invalid("fixed.max_beams", format!("must satisfy 1 <= max_beams <= n_t = {n_t}")));
                }
                Ok(Plan::ScalingTradeoff { n_t, max_beams })
            }
            ExperimentKind::OutageVsP => {
                self.engines_checked(&both)?;
                self.axis_must_be(&["p_dbm"])?;
                let base = self.phys_base(true)?;
                let n_beams = self.n_beams_checked(base.n_t)?;
                let kind = self.beam_kind(BeamKind::Gaussian)?;
                if kind != BeamKind::Gaussian && (base.n_t != 2 || n_beams != 1) {
                    return Err(invalid("fixed.beam", "unitary/binary outage needs n_t = 2, n_beams = 1"));
                }
                let scheme = BeamScheme { kind, n_beams };
                let policy = policy_from_fixed(self)?;
                if kind != BeamKind::Gaussian && matches!(policy, SwitchPolicy::Ps { .. }) {
                    return Err(invalid("fixed.tau", "PS outage is defined for the gaussian scheme only"));
                }
                let q_hat_w = self
                    .power_key("q_hat", true)?
                    .expect("required power is present");
                if !(q_hat_w >= 0.0) {
                    return Err(invalid("fixed.q_hat_w", "must be >= 0"));
                }
                Ok(Plan::OutageVsP { base, scheme, policy, q_hat_w })
            }
            ExperimentKind::RateVsPMatchedPower => {
                self.engines_checked(&both)?;
                self.axis_must_be(&["p_dbm"])?;
                let base = self.phys_base(true)?;
                if base.n_t != 2 {
                    return Err(invalid("fixed.n_t", "matched-power comparison covers n_t = 2 (one beam)"));
                }
                let pi_target = self.fixed_f64("pi_target")?;
                if !(pi_target > 0.0 && pi_target < 1.0) {
                    return Err(invalid("fixed.pi_target", "must lie strictly in (0, 1)"));
                }
                Ok(Plan::RateVsPMatchedPower { base, pi_target })
            }
            ExperimentKind::NetworkThroughput => {
                self.engines_checked(&[Engine::Montecarlo])?;
                self.axis_must_be(&["rate_target_bps_hz"])?;
                if self.sweep.min < 0.0 {
                    return Err(invalid("sweep.min", "rate targets are >= 0"));
                }
                let base = self.phys_base_with(false, false)?;
                let n_beams = self.n_beams_checked(base.n_t)?;
                if self.beam_kind(BeamKind::Gaussian)? != BeamKind::Gaussian {
                    return Err(invalid("fixed.beam", "the network tables cover the gaussian scheme only"));
                }
                let n_users = self.fixed_u32("n_users")?;
                if n_users < 1 {
                    return Err(invalid("fixed.n_users", "must be >= 1"));
                }
                let dist_min = self.fixed_f64("dist_min_m")?;
                let dist_max = self.fixed_f64("dist_max_m")?;
                if !(dist_min > 0.0 && dist_max >= dist_min) {
                    return Err(invalid("fixed.dist_min_m", "need 0 < dist_min_m <= dist_max_m"));
                }
                let pathloss_ref_db = self.fixed_f64("pathloss_ref_db")?;
                let pathloss_exp = self.fixed_f64("pathloss_exp")?;
                if !(pathloss_exp > 0.0) {
                    return Err(invalid("fixed.pathloss_exp", "must be > 0"));
                }
                let shadow_sigma_db = self.fixed_f64("shadow_sigma_db")?;
                if !(shadow_sigma_db >= 0.0) {
                    return Err(invalid("fixed.shadow_sigma_db", "must be >= 0"));
                }
                let n_seeds = self.fixed_u32("seeds")?;
                if n_seeds < 1 {
                    return Err(invalid("fixed.seeds", "must be >= 1"));
                }
                let net = swipt_core::NetworkSpec {
                    n_users,
                    dist_range: (dist_min, dist_max),
                    pathloss_ref_db,
                    pathloss_exp,
                    shadow_sigma_db,
                    rate_target: self.sweep.min.max(0.0),
                    beam: BeamScheme::gaussian(n_beams),
                    params: base.sys_fixed(),
                };
                net.validate()
                    .map_err(|e| invalid("fixed", e.to_string()))?;
                let seeds = (0..n_seeds as u64).map(|i| self.mc.base_seed.wrapping_add(i)).collect();
                Ok(Plan::NetworkThroughput { net, seeds })
            }
            ExperimentKind::BeamComparison => {
                self.engines_checked(&both)?;
                self.axis_must_be(&["a_bar", "p_dbm"])?;
                let p_from_axis = self.sweep.axis == "p_dbm";
                let base = self.phys_base(p_from_axis)?;
                if base.n_t != 2 || self.n_beams_checked(base.n_t)? != 1 {
                    return Err(invalid("fixed.n_t", "beam comparison covers n_t = 2 with one beam"));
                }
                let a_bar_fixed = if p_from_axis {
                    let a = self.fixed_f64("a_bar")?;
                    if !(a >= 0.0) {
                        return Err(invalid("fixed.a_bar", "must be >= 0"));
                    }
                    Some(a)
                } else {
                    if self.sweep.min < 0.0 {
                        return Err(invalid("sweep.min", "thresholds are >= 0"));
                    }
                    None
                };
                Ok(Plan::BeamComparison { base, a_bar_fixed })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversions_round_trip() {
        assert!((unit_convert(30.0, "dBm").unwrap() - 1.0).abs() < 1e-12);
        assert!((unit_convert(-40.0, "dB").unwrap() - 1e-4).abs() < 1e-16);
        assert_eq!(unit_convert(1.0, "dB").unwrap(), 10f64.powf(0.1));
        assert_eq!(unit_convert(0.25, "W").unwrap(), 0.25);
        assert_eq!(unit_convert(3.0, "linear").unwrap(), 3.0);
        for x in [-17.0, 0.0, 13.5, 44.0] {
            let w = unit_convert(x, "dBm").unwrap();
            assert!((watts_to_dbm(w) - x).abs() < 1e-12);
        }
        assert!(matches!(unit_convert(1.0, "furlongs"), Err(SpecError::UnknownUnit(_))));
    }

    #[test]
    fn sweep_grid_is_inclusive() {
        let s = Sweep { axis: "h".into(), min: 1.0, max: 3.0, points: 5 };
        assert_eq!(s.values(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        let one = Sweep { axis: "h".into(), min: 2.0, max: 2.0, points: 1 };
        assert_eq!(one.values(), vec![2.0]);
    }

    #[test]
    fn missing_required_key_names_the_field() {
        let text = r#"
            name = "t"
            kind = "outage_vs_p"
            output = "o.csv"
            engines = ["analytic"]
            [sweep]
            axis = "p_dbm"
            min = 10.0
            max = 40.0
            points = 4
            [fixed]
            n_t = 2
            n_beams = 1
            theta_db = -40.0
            a_bar = 0.5
        "#;
        let spec = ExperimentSpec::from_toml_str(text).unwrap();
        let err = spec.plan().unwrap_err();
        match err {
            SpecError::Invalid { field, .. } => assert_eq!(field, "fixed.q_hat_w"),
            other => panic!("expected a named-field error, got {other}"),
        }
    }

    #[test]
    fn beams_above_antennas_are_rejected() {
        let text = r#"
            name = "t"
            kind = "rate_vs_h"
            output = "o.csv"
            engines = ["analytic"]
            [sweep]
            axis = "h"
            min = 0.1
            max = 2.0
            points = 4
            [fixed]
            n_t = 2
            n_beams = 3
            p_dbm = 30.0
            theta_db = -40.0
            a_bar = 0.5
        "#;
        let spec = ExperimentSpec::from_toml_str(text).unwrap();
        match spec.plan().unwrap_err() {
            SpecError::Invalid { field, .. } => assert_eq!(field, "fixed.n_beams"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn conflicting_unit_spellings_are_rejected() {
        let text = r#"
            name = "t"
            kind = "power_vs_h"
            output = "o.csv"
            engines = ["analytic"]
            [sweep]
            axis = "h"
            min = 0.1
            max = 2.0
            points = 4
            [fixed]
            n_t = 2
            n_beams = 1
            p_dbm = 30.0
            p_w = 1.0
            theta_db = -40.0
            tau = 0.5
        "#;
        let spec = ExperimentSpec::from_toml_str(text).unwrap();
        match spec.plan().unwrap_err() {
            SpecError::Invalid { field, .. } => assert_eq!(field, "fixed.p_w"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn analytic_only_kind_rejects_montecarlo() {
        let text = r#"
            name = "t"
            kind = "scaling_tradeoff"
            output = "o.csv"
            engines = ["analytic", "montecarlo"]
            [sweep]
            axis = "a_bar"
            min = 0.0
            max = 5.0
            points = 11
            [fixed]
            n_t = 4
            max_beams = 4
        "#;
        let spec = ExperimentSpec::from_toml_str(text).unwrap();
        match spec.plan().unwrap_err() {
            SpecError::Invalid { field, .. } => assert_eq!(field, "engines"),
            other => panic!("unexpected error {other}"),
        }
    }
}
