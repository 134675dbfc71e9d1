//! Closed-form evaluators for the constant-envelope beam designs: unitary
//! random beams (TS-U) and binary antenna-selection beams (TS-B).
//!
//! The closed forms hold for the two-antenna, single-beam case (n_t = 2,
//! N = 1), where the sub-block power A given H = h is uniform on [0, 2h] for
//! TS-U and picks one of the two antenna gains equiprobably for TS-B; other
//! configurations return `AnalyticsUnavailable` and are served by the Monte
//! Carlo engine instead.
//!
//! Unconditionally (after averaging over the channel) A is Exp(1) for both
//! schemes, which is why their block-averaged rate and power coincide with
//! each other and with the single-antenna threshold expressions at h = 1.

use crate::analytic::{self, AnalyticError};
use crate::channel;
use crate::params::SystemParams;
use crate::specfun;

const SUPPORTED_NT: u32 = 2;

fn require_supported(params: &SystemParams) -> Result<(), AnalyticError> {
    if params.n_t != SUPPORTED_NT {
        return Err(AnalyticError::AnalyticsUnavailable { n_t: params.n_t, n_beams: 1 });
    }
    Ok(())
}

/// Antenna-gain order statistics for the binary scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrbOrderStats {
    /// max(|h_1|^2, |h_2|^2)
    pub v: f64,
    /// min(|h_1|^2, |h_2|^2)
    pub w: f64,
}

impl BrbOrderStats {
    pub fn new(v: f64, w: f64) -> Self {
        assert!(v >= w && w >= 0.0, "BrbOrderStats invariant: v >= w >= 0, got v={v} w={w}");
        BrbOrderStats { v, w }
    }

    pub fn from_gains(g1: f64, g2: f64) -> Self {
        BrbOrderStats { v: g1.max(g2), w: g1.min(g2) }
    }
}

// ---------------------------------------------------------------------------
// unitary random beams
// ---------------------------------------------------------------------------

/// TS-U per-block harvested power [W]: with A | h uniform on [0, 2h],
///   zeta theta P (h - a_bar^2/(4h)) for a_bar <= 2h, else 0.
pub fn urb_block_power(params: &SystemParams, h: f64, a_bar: f64) -> Result<f64, AnalyticError> {
    require_supported(params)?;
    assert!(h > 0.0, "urb_block_power domain: h > 0, got {h}");
    assert!(!(a_bar < 0.0) && !a_bar.is_nan(), "urb_block_power domain: a_bar >= 0");
    if a_bar >= 2.0 * h {
        return Ok(0.0);
    }
    Ok(params.zeta * params.rx_power_w() * (h - a_bar * a_bar / (4.0 * h)))
}

/// TS-U block-averaged harvested power [W]: zeta theta P Γ(2, a_bar).
pub fn urb_avg_power(params: &SystemParams, a_bar: f64) -> Result<f64, AnalyticError> {
    require_supported(params)?;
    assert!(!(a_bar < 0.0) && !a_bar.is_nan(), "urb_avg_power domain: a_bar >= 0");
    if a_bar.is_infinite() {
        return Ok(0.0);
    }
    Ok(params.zeta * params.rx_power_w() * specfun::upper_incomplete_gamma(2.0, a_bar))
}

/// TS-U block-averaged rate [bits/s/Hz]; with the unconditional A ~ Exp(1)
/// this is the single-beam threshold rate at h = 1.
pub fn urb_avg_rate(params: &SystemParams, a_bar: f64) -> Result<f64, AnalyticError> {
    require_supported(params)?;
    Ok(analytic::ts_rate_closed_n1(params, 1.0, a_bar))
}

/// TS-U energy outage: the block power is monotone in h, so outage is
/// F_H(h*) with h* solving h - a_bar^2/(4h) = q_hat/(zeta theta P), i.e.
/// h* = (q + sqrt(q^2 + a_bar^2))/2.
pub fn urb_outage(params: &SystemParams, a_bar: f64, q_hat_w: f64) -> Result<f64, AnalyticError> {
    require_supported(params)?;
    if q_hat_w <= 0.0 {
        return Ok(0.0);
    }
    if a_bar.is_infinite() {
        return Ok(1.0);
    }
    let q = q_hat_w / (params.zeta * params.rx_power_w());
    let h_star = 0.5 * (q + (q * q + a_bar * a_bar).sqrt());
    Ok(channel::cdf_h(h_star, SUPPORTED_NT))
}

// ---------------------------------------------------------------------------
// binary random beams
// ---------------------------------------------------------------------------

/// TS-B per-block harvested power [W]. The pick is V or W equiprobably and a
/// sub-block harvests iff its A exceeds a_bar (ties decode):
///   zeta theta P (v 1(v > a_bar) + w 1(w > a_bar)) / 2.
pub fn brb_block_power(
    params: &SystemParams,
    stats: BrbOrderStats,
    a_bar: f64,
) -> Result<f64, AnalyticError> {
    require_supported(params)?;
    assert!(!(a_bar < 0.0) && !a_bar.is_nan(), "brb_block_power domain: a_bar >= 0");
    let BrbOrderStats { v, w } = stats;
    assert!(v >= w && w >= 0.0, "brb_block_power domain: v >= w >= 0, got v={v} w={w}");
    let mut acc = 0.0;
    if v > a_bar {
        acc += v;
    }
    if w > a_bar {
        acc += w;
    }
    Ok(params.zeta * params.rx_power_w() * acc / 2.0)
}

/// TS-B block-averaged harvested power [W]; equals the TS-U value because
/// the unconditional pick is Exp(1) for both schemes.
pub fn brb_avg_power(params: &SystemParams, a_bar: f64) -> Result<f64, AnalyticError> {
    urb_avg_power(params, a_bar)
}

/// TS-B block-averaged rate [bits/s/Hz] via the order-statistics densities
/// f_V(a) = 2e^{-a}(1 - e^{-a}) and f_W(a) = 2e^{-2a}, combined as
/// (f_V + f_W)/2 and integrated term by term. Kept as an independent route:
/// it must agree with `urb_avg_rate` identically.
pub fn brb_avg_rate_orderstat(params: &SystemParams, a_bar: f64) -> Result<f64, AnalyticError> {
    require_supported(params)?;
    // exponential pieces map onto the single-beam closed form: a density
    // lambda e^{-lambda a} is that of A|h at h = 1/lambda
    let rate_lambda1 = analytic::ts_rate_closed_n1(params, 1.0, a_bar);
    let rate_lambda2 = analytic::ts_rate_closed_n1(params, 0.5, a_bar);
    let v_part = rate_lambda1 - 0.5 * rate_lambda2; // (1/2) integral of L f_V
    let w_part = 0.5 * rate_lambda2; // (1/2) integral of L f_W
    Ok(v_part + w_part)
}

/// TS-B energy outage with D = q_hat/(zeta theta P):
///   (1-e^{-a_bar})^2
///   + 1(a_bar < 2D) 2(1-e^{-a_bar})(e^{-a_bar} - e^{-2D})
///   + 1(a_bar < D) (e^{-2 a_bar} - (1 + 2(D - a_bar)) e^{-2D})
///
/// covering, in order: both picks decoded, only the V pick harvesting but
/// V/2 short of the requirement, and both picks harvesting (V+W)/2 short.
pub fn brb_outage(params: &SystemParams, a_bar: f64, q_hat_w: f64) -> Result<f64, AnalyticError> {
    require_supported(params)?;
    assert!(!(a_bar < 0.0) && !a_bar.is_nan(), "brb_outage domain: a_bar >= 0");
    if q_hat_w <= 0.0 {
        return Ok(0.0);
    }
    if a_bar.is_infinite() {
        return Ok(1.0);
    }
    let d = q_hat_w / (params.zeta * params.rx_power_w());
    let ea = (-a_bar).exp();
    let mut p = (1.0 - ea) * (1.0 - ea);
    if a_bar < 2.0 * d {
        p += 2.0 * (1.0 - ea) * (ea - (-2.0 * d).exp());
    }
    if a_bar < d {
        p += (-2.0 * a_bar).exp() - (1.0 + 2.0 * (d - a_bar)) * (-2.0 * d).exp();
    }
    Ok(p.clamp(0.0, 1.0))
}
