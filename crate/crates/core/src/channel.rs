//! Channel randomness and its distributions: i.i.d. Rayleigh MISO draws, the
//! three random-beam constructions, per-sub-block equivalent channel powers
//! A(k), and the conditional/unconditional laws of A.
//!
//! Normalizations used throughout: the block channel power is
//! H = ||h||^2 / N_t with E[H] = 1, so H ~ Gamma(N_t, 1/N_t); given H = h,
//! a Gaussian-beam sub-block power is A ~ Gamma(N, h/N) with E[A|h] = h.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::params::{BeamKind, BeamScheme};
use crate::quad::QuadError;
use crate::specfun;

/// A reproducible RNG handle: the same (seed, stream_id) pair yields the same
/// draw sequence on any platform and under any worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One small-scale fading realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Per-antenna fading coefficients, each CN(0, 1).
    pub h: Vec<Complex64>,
    /// Normalized block channel power ||h||^2 / N_t.
    pub cap_h: f64,
}

impl ChannelRealization {
    /// Builds from explicit coefficients, recomputing `cap_h`.
    pub fn from_coefficients(h: Vec<Complex64>) -> Self {
        let cap_h = h.iter().map(|c| c.norm_sqr()).sum::<f64>() / h.len() as f64;
        ChannelRealization { h, cap_h }
    }

    /// Per-antenna power gains |h_i|^2.
    pub fn antenna_gains(&self) -> Vec<f64> {
        self.h.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// One standard circularly-symmetric complex Gaussian draw, variance 1.
fn sample_cn01<R: Rng>(rng: &mut R) -> Complex64 {
    use rand_distr::StandardNormal;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws an n_t-antenna Rayleigh channel, h_i i.i.d. CN(0, 1).
pub fn draw_channel<R: Rng>(n_t: u32, rng: &mut R) -> ChannelRealization {
    let h: Vec<Complex64> = (0..n_t).map(|_| sample_cn01(rng)).collect();
    ChannelRealization::from_coefficients(h)
}

/// Exp(1) via inverse CDF; kept explicit so the draw count per sample is fixed.
fn sample_exp1<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    -(-u).ln_1p()
}

/// Draws one sub-block equivalent channel power A(k) given the realization,
/// without materializing the beam matrix.
///
/// Gaussian: A | H=h ~ Gamma(N, h/N) (mean of N unit-mean exponentials scaled
/// by h). Unitary: mean of N terms n_t h B_j with B_j ~ Beta(1, n_t - 1).
/// Binary: mean of |h_i|^2 over a uniformly chosen N-subset of antennas,
/// fresh per sub-block.
pub fn draw_subblock_power<R: Rng>(scheme: BeamScheme, chan: &ChannelRealization, rng: &mut R) -> f64 {
    let n = scheme.n_beams;
    let n_t = chan.h.len() as u32;
    assert!(n >= 1 && n <= n_t, "draw_subblock_power: need 1 <= N <= n_t, got N={n}, n_t={n_t}");
    match scheme.kind {
        BeamKind::Gaussian => {
            let mut acc = 0.0;
            for _ in 0..n {
                acc += sample_exp1(rng);
            }
            chan.cap_h * acc / n as f64
        }
        BeamKind::Unitary => {
            let norm2 = n_t as f64 * chan.cap_h;
            let mut acc = 0.0;
            for _ in 0..n {
                acc += norm2 * sample_beta_1_b(n_t - 1, rng);
            }
            acc / n as f64
        }
        BeamKind::Binary => {
            let idx = rand::seq::index::sample(rng, n_t as usize, n as usize);
            idx.iter().map(|i| chan.h[i].norm_sqr()).sum::<f64>() / n as f64
        }
    }
}

/// Beta(1, b) by inverse CDF; b = 0 degenerates to the point mass at 1.
fn sample_beta_1_b<R: Rng>(b: u32, rng: &mut R) -> f64 {
    if b == 0 {
        return 1.0;
    }
    let u: f64 = rng.gen();
    1.0 - (1.0 - u).powf(1.0 / b as f64)
}

/// Samples the beam matrix itself (N columns of length n_t). Exists so tests
/// can verify the direct sampler against A = ||Phi^H h||^2 / N.
pub fn sample_beam_matrix<R: Rng>(scheme: BeamScheme, n_t: u32, rng: &mut R) -> Vec<Vec<Complex64>> {
    let n = scheme.n_beams;
    assert!(n >= 1 && n <= n_t, "sample_beam_matrix: need 1 <= N <= n_t, got N={n}, n_t={n_t}");
    match scheme.kind {
        BeamKind::Gaussian => (0..n)
            .map(|_| {
                (0..n_t)
                    .map(|_| sample_cn01(rng) / (n_t as f64).sqrt())
                    .collect()
            })
            .collect(),
        BeamKind::Unitary => (0..n)
            .map(|_| {
                let v: Vec<Complex64> = (0..n_t).map(|_| sample_cn01(rng)).collect();
                let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                v.into_iter().map(|c| c / norm).collect()
            })
            .collect(),
        BeamKind::Binary => {
            let idx = rand::seq::index::sample(rng, n_t as usize, n as usize);
            idx.iter()
                .map(|sel| {
                    (0..n_t as usize)
                        .map(|i| if i == sel { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
                        .collect()
                })
                .collect()
        }
    }
}

/// A(k) = (1/N) sum_j |<phi_j, h>|^2 from an explicit beam matrix.
pub fn subblock_power_from_beams(beams: &[Vec<Complex64>], chan: &ChannelRealization) -> f64 {
    let n = beams.len();
    assert!(n >= 1, "subblock_power_from_beams: empty beam matrix");
    let mut acc = 0.0;
    for col in beams {
        assert_eq!(col.len(), chan.h.len(), "beam/channel dimension mismatch");
        let dot: Complex64 = col.iter().zip(&chan.h).map(|(p, hi)| p.conj() * hi).sum();
        acc += dot.norm_sqr();
    }
    acc / n as f64
}

// ---------------------------------------------------------------------------
// distributions
// ---------------------------------------------------------------------------

/// Density of H ~ Gamma(n_t, 1/n_t): n_t^{n_t} h^{n_t-1} e^{-n_t h} / Γ(n_t).
pub fn pdf_h(h: f64, n_t: u32) -> f64 {
    assert!(h >= 0.0, "pdf_h domain: h >= 0, got {h}");
    if h == 0.0 {
        return if n_t == 1 { 1.0 } else { 0.0 };
    }
    let nt = n_t as f64;
    (nt * nt.ln() + (nt - 1.0) * h.ln() - nt * h - specfun::ln_gamma(nt)).exp()
}

/// CDF of H: F_H(h) = P(n_t, n_t h).
pub fn cdf_h(h: f64, n_t: u32) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    if h.is_infinite() {
        return 1.0;
    }
    specfun::gamma_lower_regularized(n_t as f64, n_t as f64 * h)
}

/// Conditional density f_{A|H}(a | h) for Gaussian beams:
/// a^{N-1} e^{-Na/h} / ((h/N)^N Γ(N)).
pub fn conditional_pdf_a(a: f64, h: f64, n_beams: u32) -> f64 {
    assert!(h > 0.0, "conditional_pdf_a domain: h > 0, got {h}");
    assert!(a >= 0.0, "conditional_pdf_a domain: a >= 0, got {a}");
    assert!(n_beams >= 1, "conditional_pdf_a domain: n_beams >= 1");
    let n = n_beams as f64;
    if a == 0.0 {
        return if n_beams == 1 { 1.0 / h } else { 0.0 };
    }
    ((n - 1.0) * a.ln() - n * a / h - n * (h / n).ln() - specfun::ln_gamma(n)).exp()
}

/// Conditional CDF F_{A|H}(a | h) = P(N, Na/h) for Gaussian beams.
pub fn conditional_cdf_a(a: f64, h: f64, n_beams: u32) -> f64 {
    assert!(h > 0.0, "conditional_cdf_a domain: h > 0, got {h}");
    assert!(a >= 0.0 || a.is_nan(), "conditional_cdf_a domain: a >= 0, got {a}");
    if a == 0.0 {
        return 0.0;
    }
    if a.is_infinite() {
        return 1.0;
    }
    specfun::gamma_lower_regularized(n_beams as f64, n_beams as f64 * a / h)
}

/// Unconditional CDF of A for Gaussian beams after averaging over H:
///   F_A(a) = 1 - (2/Γ(n_t)) Σ_{k=0}^{N-1} β^{n_t+k}/k! · K_{n_t-k}(2β),
/// β = sqrt(n_t N a). Clamped to [0, 1] against terminal rounding.
pub fn unconditional_cdf_a(a: f64, n_t: u32, n_beams: u32) -> Result<f64, QuadError> {
    assert!(n_t >= 1 && n_beams >= 1, "unconditional_cdf_a domain: n_t, n_beams >= 1");
    assert!(!(a < 0.0) && !a.is_nan(), "unconditional_cdf_a domain: a >= 0, got {a}");
    if a == 0.0 {
        return Ok(0.0);
    }
    if a.is_infinite() {
        return Ok(1.0);
    }
    let nt = n_t as f64;
    let beta = (nt * n_beams as f64 * a).sqrt();
    let mut sum = 0.0;
    for k in 0..n_beams {
        let kf = k as f64;
        let ln_coeff = (nt + kf) * beta.ln() - specfun::ln_gamma(kf + 1.0);
        let bessel = specfun::bessel_k(nt - kf, 2.0 * beta)?;
        if bessel > 0.0 {
            sum += (ln_coeff + bessel.ln()).exp();
        }
    }
    Ok((1.0 - 2.0 / specfun::gamma(nt) * sum).clamp(0.0, 1.0))
}

/// Smallest grid point h with upper tail mass of H below `tail_mass`;
/// used as a finite upper limit when integrating against f_H.
pub fn h_upper_cutoff(n_t: u32, tail_mass: f64) -> f64 {
    let mut hi = 4.0;
    while specfun::gamma_upper_regularized(n_t as f64, n_t as f64 * hi) >= tail_mass {
        hi += 4.0;
        if hi > 4096.0 {
            break;
        }
    }
    hi
}
