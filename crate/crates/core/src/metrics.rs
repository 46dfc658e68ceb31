//! Noise mixing at a target SNR and objective SNR-improvement metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::AudioSignal;

/// Overall SNR reported when the residual energy is at or below this.
const RESIDUAL_FLOOR: f64 = 1e-20;
const OVERALL_SNR_CAP_DB: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegSnrParams {
    /// Non-overlapping scoring frame length in samples.
    pub frame_len: usize,
    pub min_db: f64,
    pub max_db: f64,
    /// Frames whose reference energy is below this are skipped.
    pub energy_floor: f64,
}

impl Default for SegSnrParams {
    fn default() -> Self {
        Self { frame_len: 256, min_db: -10.0, max_db: 35.0, energy_floor: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub snrseg_improvement_db: f64,
    pub overall_snr_improvement_db: f64,
    pub frames_scored: usize,
}

fn check_pair(reference: &AudioSignal, test: &AudioSignal) -> Result<()> {
    if reference.len() != test.len() {
        return Err(Error::LengthMismatch { expected: reference.len(), actual: test.len() });
    }
    if reference.sample_rate != test.sample_rate {
        return Err(Error::SampleRateMismatch(reference.sample_rate, test.sample_rate));
    }
    Ok(())
}

/// Add `noise` (truncated to the clean length) scaled so the mixture has the
/// requested SNR, measured as mean-square power over the full length.
pub fn mix_at_snr(clean: &AudioSignal, noise: &AudioSignal, snr_db: f64) -> Result<AudioSignal> {
    if clean.sample_rate != noise.sample_rate {
        return Err(Error::SampleRateMismatch(clean.sample_rate, noise.sample_rate));
    }
    if noise.len() < clean.len() {
        return Err(Error::LengthMismatch { expected: clean.len(), actual: noise.len() });
    }
    if !snr_db.is_finite() {
        return Err(Error::NonFinite("target SNR"));
    }
    let noise = &noise.samples[..clean.len()];
    let p_clean = clean.power();
    let p_noise = noise.iter().map(|s| s * s).sum::<f64>() / noise.len().max(1) as f64;
    if p_clean <= 0.0 {
        return Err(Error::ZeroPower("clean"));
    }
    if p_noise <= 0.0 {
        return Err(Error::ZeroPower("noise"));
    }
    let g = noise_scale(p_clean, p_noise, snr_db);
    let samples = clean.samples.iter().zip(noise).map(|(c, v)| c + g * v).collect();
    AudioSignal::new(samples, clean.sample_rate)
}

/// Noise amplitude factor giving `10 log10(p_clean / (g^2 p_noise)) == snr_db`.
pub fn noise_scale(p_clean: f64, p_noise: f64, snr_db: f64) -> f64 {
    (p_clean / (p_noise * 10f64.powf(snr_db / 10.0))).sqrt()
}

/// Mean per-frame clamped SNR of `test` against `reference`, and the number
/// of frames that were scored.
pub fn segmental_snr(reference: &AudioSignal, test: &AudioSignal, params: &SegSnrParams) -> Result<(f64, usize)> {
    check_pair(reference, test)?;
    if params.frame_len == 0 {
        return Err(Error::InvalidConfig("segmental SNR frame length must be positive".into()));
    }
    // signals shorter than one scoring frame are scored as a single frame
    let frame_len = params.frame_len.min(reference.len().max(1));
    let mut total = 0.0;
    let mut scored = 0;
    for (c, x) in reference.samples.chunks_exact(frame_len).zip(test.samples.chunks_exact(frame_len)) {
        let signal: f64 = c.iter().map(|v| v * v).sum();
        if signal < params.energy_floor {
            continue;
        }
        let residual: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        let snr = if residual > 0.0 { 10.0 * (signal / residual).log10() } else { params.max_db };
        total += snr.clamp(params.min_db, params.max_db);
        scored += 1;
    }
    if scored == 0 {
        return Err(Error::NoScorableFrames);
    }
    Ok((total / scored as f64, scored))
}

/// Whole-signal SNR of `test` against `reference`, capped at 100 dB.
pub fn overall_snr(reference: &AudioSignal, test: &AudioSignal) -> Result<f64> {
    check_pair(reference, test)?;
    let signal: f64 = reference.samples.iter().map(|v| v * v).sum();
    if signal <= 0.0 {
        return Err(Error::ZeroPower("reference"));
    }
    let residual: f64 = reference.samples.iter().zip(&test.samples).map(|(a, b)| (a - b) * (a - b)).sum();
    if residual <= RESIDUAL_FLOOR {
        return Ok(OVERALL_SNR_CAP_DB);
    }
    Ok((10.0 * (signal / residual).log10()).min(OVERALL_SNR_CAP_DB))
}

pub fn segmental_snr_improvement(
    clean: &AudioSignal,
    noisy: &AudioSignal,
    enhanced: &AudioSignal,
    params: &SegSnrParams,
) -> Result<f64> {
    let (after, _) = segmental_snr(clean, enhanced, params)?;
    let (before, _) = segmental_snr(clean, noisy, params)?;
    Ok(after - before)
}

pub fn overall_snr_improvement(clean: &AudioSignal, noisy: &AudioSignal, enhanced: &AudioSignal) -> Result<f64> {
    Ok(overall_snr(clean, enhanced)? - overall_snr(clean, noisy)?)
}

/// Both improvements plus the number of frames the segmental score used.
pub fn evaluate(
    clean: &AudioSignal,
    noisy: &AudioSignal,
    enhanced: &AudioSignal,
    params: &SegSnrParams,
) -> Result<MetricReport> {
    let (after, frames_scored) = segmental_snr(clean, enhanced, params)?;
    let (before, _) = segmental_snr(clean, noisy, params)?;
    let report = MetricReport {
        snrseg_improvement_db: after - before,
        overall_snr_improvement_db: overall_snr_improvement(clean, noisy, enhanced)?,
        frames_scored,
    };
    if !report.snrseg_improvement_db.is_finite() || !report.overall_snr_improvement_db.is_finite() {
        return Err(Error::NonFinite("metric report"));
    }
    Ok(report)
}
