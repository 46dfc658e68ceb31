//! Recursive silence-frame noise estimate with a low-band tracking factor.
//!
//! The base estimate is the mean magnitude spectrum of the first few frames,
//! refreshed by exponential forgetting on every frame classified as silence.
//! Between silence frames the estimate is rescaled each frame by the ratio of
//! noisy to estimated magnitude inside a speech-free low band (0-50 Hz).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{AmsConfig, ComplexSpectrum};

/// Denominator below which the tracking factor falls back to 1.
const TRACKING_DENOM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Number of leading frames averaged into the initial estimate.
    pub init_frames: usize,
    /// Forgetting factor of the silence-frame recursion, in (0, 1).
    pub forgetting: f64,
    /// Frames whose energy exceeds the estimate by less than this are silence.
    pub silence_threshold_db: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Upper edge of the tracking band in Hz.
    pub band_hz_high: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            init_frames: 6,
            forgetting: 0.9,
            silence_threshold_db: 3.0,
            alpha_min: 0.1,
            alpha_max: 10.0,
            band_hz_high: 50.0,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.forgetting > 0.0 && self.forgetting < 1.0) {
            return Err(Error::InvalidConfig(format!("forgetting factor {} not in (0, 1)", self.forgetting)));
        }
        if self.init_frames == 0 {
            return Err(Error::InvalidConfig("init_frames must be at least 1".into()));
        }
        if !(self.alpha_min > 0.0 && self.alpha_min <= self.alpha_max && self.alpha_max.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tracking clamp [{}, {}] is not a positive finite interval",
                self.alpha_min, self.alpha_max
            )));
        }
        if !self.silence_threshold_db.is_finite() || self.band_hz_high.is_nan() || self.band_hz_high < 0.0 {
            return Err(Error::InvalidConfig("silence threshold and band edge must be finite".into()));
        }
        Ok(())
    }
}

/// Bins whose center frequency lies in `[0, hz_high]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowBand {
    pub hz_high: f64,
    pub bin_indices: Vec<usize>,
}

impl LowBand {
    pub fn new(config: &AmsConfig, hz_high: f64) -> Self {
        let bin_indices = (0..=config.fft_size / 2)
            .take_while(|&k| k == 0 || config.bin_hz(k) <= hz_high)
            .collect();
        Self { hz_high, bin_indices }
    }
}

/// Noise magnitude estimate taken at the most recent silence frame.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseState {
    pub base_magnitude: Vec<f64>,
    /// Ordinal of the last frame that refreshed `base_magnitude`.
    pub last_silence_index: Option<usize>,
    pub params: NoiseParams,
    pub initialized: bool,
}

/// Average the magnitudes of the first `params.init_frames` spectra.
pub fn init_noise(initial_spectra: &[ComplexSpectrum], params: NoiseParams) -> Result<NoiseState> {
    params.validate()?;
    let needed = params.init_frames;
    if initial_spectra.len() < needed {
        return Err(Error::InsufficientInitFrames { needed, got: initial_spectra.len() });
    }
    let used = &initial_spectra[..needed];
    let bins = used[0].len();
    if let Some(bad) = used.iter().find(|s| s.len() != bins) {
        return Err(Error::LengthMismatch { expected: bins, actual: bad.len() });
    }
    let mut base = vec![0.0; bins];
    for spectrum in used {
        for (b, y) in base.iter_mut().zip(&spectrum.bins) {
            *b += y.norm();
        }
    }
    base.iter_mut().for_each(|b| *b /= needed as f64);
    Ok(NoiseState {
        base_magnitude: base,
        last_silence_index: used.last().map(|s| s.index),
        params,
        initialized: true,
    })
}

/// Frame-to-estimate energy ratio in dB. `+inf` when the estimate is all
/// zero, `-inf` when the frame is.
pub fn energy_ratio_db(spectrum: &ComplexSpectrum, state: &NoiseState) -> f64 {
    let base_energy: f64 = state.base_magnitude.iter().map(|b| b * b).sum();
    if base_energy <= 0.0 {
        return f64::INFINITY;
    }
    let frame_energy: f64 = spectrum.bins.iter().map(|y| y.norm_sqr()).sum();
    10.0 * (frame_energy / base_energy).log10()
}

/// True when the frame's energy is within `threshold_db` of the estimate.
pub fn classify_silence(spectrum: &ComplexSpectrum, state: &NoiseState, threshold_db: f64) -> bool {
    energy_ratio_db(spectrum, state) < threshold_db
}

/// Fold a silence frame into the base estimate:
/// `base <- nu * base + (1 - nu) * |Y|`.
pub fn update_silence_noise(state: &mut NoiseState, spectrum: &ComplexSpectrum) -> Result<()> {
    if spectrum.len() != state.base_magnitude.len() {
        return Err(Error::LengthMismatch { expected: state.base_magnitude.len(), actual: spectrum.len() });
    }
    let nu = state.params.forgetting;
    for (b, y) in state.base_magnitude.iter_mut().zip(&spectrum.bins) {
        *b = nu * *b + (1.0 - nu) * y.norm();
    }
    state.last_silence_index = Some(spectrum.index);
    Ok(())
}

/// Unclamped low-band ratio `sum |Y| / sum base`; `None` when the estimate
/// has no energy in the band.
pub fn tracking_ratio(spectrum: &ComplexSpectrum, state: &NoiseState, band: &LowBand) -> Option<f64> {
    let (num, den) = band.bin_indices.iter().fold((0.0, 0.0), |(n, d), &k| {
        (n + spectrum.bins[k].norm(), d + state.base_magnitude[k])
    });
    (den >= TRACKING_DENOM_FLOOR).then(|| num / den)
}

/// Tracking factor clamped to `[alpha_min, alpha_max]`, 1 when undefined.
pub fn tracking_factor(spectrum: &ComplexSpectrum, state: &NoiseState, band: &LowBand) -> f64 {
    match tracking_ratio(spectrum, state, band) {
        Some(ratio) => ratio.clamp(state.params.alpha_min, state.params.alpha_max),
        None => 1.0,
    }
}

pub fn current_noise(state: &NoiseState, alpha: f64) -> Vec<f64> {
    state.base_magnitude.iter().map(|b| alpha * b).collect()
}
