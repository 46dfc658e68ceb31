//! Geometric-approach spectral subtraction gain.
//!
//! With posterior SNR `beta = |Y|^2 / |V|^2` and a-priori SNR
//! `sigma = |X|^2 / |V|^2`, the cosines of the noise-to-noisy and
//! noise-to-clean phase differences follow from the law of cosines:
//!
//! ```text
//! c_yv = (beta + 1 - sigma) / (2 sqrt(beta))
//! c_xv = (beta - 1 - sigma) / (2 sqrt(sigma))
//! G    = sqrt((1 - c_yv^2) / (1 - c_xv^2))
//! ```
//!
//! The squared cosines are clamped just below 1 so the ratio stays finite,
//! and `G` is clamped to `[gain_floor, gain_cap]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::ComplexSpectrum;

/// Floor applied to noise power, and to `beta`/`sigma` before square roots.
pub const SNR_DENOM_FLOOR: f64 = 1e-12;
/// Floor applied to the decision-directed a-priori SNR.
pub const SIGMA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainParams {
    /// Decision-directed weight on the previous frame's clean estimate.
    pub smoothing: f64,
    pub gain_floor: f64,
    pub gain_cap: f64,
    /// Squared cosines are clamped to at most `1 - cos_clamp_eps`.
    pub cos_clamp_eps: f64,
}

impl Default for GainParams {
    fn default() -> Self {
        Self { smoothing: 0.98, gain_floor: 0.05, gain_cap: 1.0, cos_clamp_eps: 1e-6 }
    }
}

impl GainParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.smoothing) {
            return Err(Error::InvalidConfig(format!("smoothing {} not in [0, 1)", self.smoothing)));
        }
        if !(self.gain_floor >= 0.0 && self.gain_floor <= self.gain_cap) {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= gain_floor ({}) <= gain_cap ({})",
                self.gain_floor, self.gain_cap
            )));
        }
        if !(self.cos_clamp_eps > 0.0 && self.cos_clamp_eps < 1.0) {
            return Err(Error::InvalidConfig(format!("cos_clamp_eps {} not in (0, 1)", self.cos_clamp_eps)));
        }
        Ok(())
    }
}

/// Per-stream gain state: parameters plus the previous frame's gain and
/// posterior SNR for the decision-directed estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct GainContext {
    pub params: GainParams,
    pub prev_gain: Vec<f64>,
    pub prev_beta: Vec<f64>,
}

/// Per-bin SNRs and gain computed for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub beta: Vec<f64>,
    pub sigma: Vec<f64>,
    pub gain: Vec<f64>,
}

impl GainContext {
    pub fn new(params: GainParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, prev_gain: Vec::new(), prev_beta: Vec::new() })
    }

    /// Compute beta, sigma and G for one frame and remember them for the next.
    pub fn process(&mut self, noisy_mag: &[f64], noise_mag: &[f64]) -> Result<GaParams> {
        if noisy_mag.len() != noise_mag.len() {
            return Err(Error::LengthMismatch { expected: noisy_mag.len(), actual: noise_mag.len() });
        }
        let beta = posterior_snr(noisy_mag, noise_mag);
        let sigma = a_priori_snr(&beta, self);
        let gain = ga_gain(&beta, &sigma, &self.params);
        self.prev_gain.clone_from(&gain);
        self.prev_beta.clone_from(&beta);
        Ok(GaParams { beta, sigma, gain })
    }
}

pub fn posterior_snr(noisy_mag: &[f64], noise_mag: &[f64]) -> Vec<f64> {
    noisy_mag
        .iter()
        .zip(noise_mag)
        .map(|(y, v)| (y * y) / (v * v).max(SNR_DENOM_FLOOR))
        .collect()
}

/// Decision-directed a-priori SNR. Missing memory (first frame) counts as zero.
pub fn a_priori_snr(beta: &[f64], ctx: &GainContext) -> Vec<f64> {
    let s = ctx.params.smoothing;
    beta.iter()
        .enumerate()
        .map(|(k, &b)| {
            let g = ctx.prev_gain.get(k).copied().unwrap_or(0.0);
            let pb = ctx.prev_beta.get(k).copied().unwrap_or(0.0);
            (s * g * g * pb + (1.0 - s) * (b - 1.0).max(0.0)).max(SIGMA_FLOOR)
        })
        .collect()
}

/// Scalar geometric gain for one bin.
pub fn geometric_gain(beta: f64, sigma: f64, params: &GainParams) -> f64 {
    let beta = if beta.is_nan() { SNR_DENOM_FLOOR } else { beta.max(SNR_DENOM_FLOOR) };
    let sigma = if sigma.is_nan() { SNR_DENOM_FLOOR } else { sigma.max(SNR_DENOM_FLOOR) };
    let limit = 1.0 - params.cos_clamp_eps;

    let c_yv = (beta + 1.0 - sigma) / (2.0 * beta.sqrt());
    let c_xv = (beta - 1.0 - sigma) / (2.0 * sigma.sqrt());
    // NaN-safe: inf/inf style overflows collapse to the clamp edge
    let c_yv2 = if (c_yv * c_yv) < limit { c_yv * c_yv } else { limit };
    let c_xv2 = if (c_xv * c_xv) < limit { c_xv * c_xv } else { limit };

    let gain = ((1.0 - c_yv2) / (1.0 - c_xv2)).sqrt();
    gain.clamp(params.gain_floor, params.gain_cap)
}

pub fn ga_gain(beta: &[f64], sigma: &[f64], params: &GainParams) -> Vec<f64> {
    beta.iter().zip(sigma).map(|(&b, &s)| geometric_gain(b, s, params)).collect()
}

/// `Z[k] = G[k] Y[k]`: scale magnitudes, keep the noisy phase. The gain must
/// be even (`G[k] == G[N - k]`) so the result stays conjugate-symmetric.
pub fn apply_gain(noisy: &ComplexSpectrum, gain: &[f64]) -> Result<ComplexSpectrum> {
    let n = noisy.len();
    if gain.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: gain.len() });
    }
    if let Some(bin) = (1..n).find(|&k| (gain[k] - gain[n - k]).abs() > 1e-12 * gain[k].abs().max(1.0)) {
        return Err(Error::AsymmetricGain { bin });
    }
    Ok(ComplexSpectrum {
        bins: noisy.bins.iter().zip(gain).map(|(y, g)| y * *g).collect(),
        index: noisy.index,
    })
}
