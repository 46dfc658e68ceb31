//! Two-stage enhancement.
//!
//! Stage 1 runs a full analysis-synthesis pass that scales each noisy bin by
//! the geometric gain, using a noise estimate that is refreshed on silence
//! frames and rescaled every frame by the low-band tracking factor. Stage 2
//! re-analyses the intermediate signal from scratch, applies phase
//! compensation, and resynthesizes from the real part of each inverse frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{AmsConfig, AudioSignal, Stft};
use crate::gain::{apply_gain, GainContext, GainParams};
use crate::noise::{
    classify_silence, current_noise, energy_ratio_db, init_noise, tracking_factor, update_silence_noise, LowBand,
    NoiseParams, NoiseState,
};
use crate::phase::{antisymmetry_mask, compensate_frame, PscConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct PipelineConfig {
    pub stage1: AmsConfig,
    pub stage2: AmsConfig,
    pub noise: NoiseParams,
    pub gain: GainParams,
    pub psc: PscConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.stage1.validate()?;
        self.stage2.validate()?;
        self.noise.validate()?;
        self.gain.validate()?;
        self.psc.validate()
    }

    /// Set both stages' framing to the same frame length, hop and FFT size.
    pub fn with_framing(mut self, frame_len: usize, hop: usize, fft_size: usize) -> Self {
        for stage in [&mut self.stage1, &mut self.stage2] {
            stage.frame_len = frame_len;
            stage.hop = hop;
            stage.fft_size = fft_size;
        }
        self
    }

    /// Shortest input stage 1 accepts: enough for the initialization frames
    /// plus one more.
    pub fn min_input_len(&self) -> usize {
        self.stage1.frame_len + self.noise.init_frames * self.stage1.hop
    }
}

/// What stage 1 decided for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameTrace {
    pub index: usize,
    /// Frame was classified as silence and folded into the estimate.
    pub silence: bool,
    pub energy_ratio_db: f64,
    pub alpha: f64,
    /// Energy of the base estimate after this frame's update, if any.
    pub base_energy: f64,
    pub mean_gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage1Trace {
    pub frames: Vec<FrameTrace>,
    pub final_noise: NoiseState,
}

impl Stage1Trace {
    pub fn silence_frames(&self) -> usize {
        self.frames.iter().filter(|f| f.silence).count()
    }

    pub fn mean_alpha(&self) -> f64 {
        self.frames.iter().map(|f| f.alpha).sum::<f64>() / self.frames.len().max(1) as f64
    }
}

fn at_rate(config: &AmsConfig, sample_rate: u32) -> AmsConfig {
    AmsConfig { sample_rate, ..*config }
}

fn ensure_finite(signal: AudioSignal, what: &'static str) -> Result<AudioSignal> {
    if signal.samples.iter().all(|s| s.is_finite()) {
        Ok(signal)
    } else {
        Err(Error::NonFinite(what))
    }
}

pub fn enhance_stage1(noisy: &AudioSignal, config: &PipelineConfig) -> Result<AudioSignal> {
    enhance_stage1_traced(noisy, config).map(|(signal, _)| signal)
}

/// Stage 1 with a per-frame record of the noise tracker's decisions.
pub fn enhance_stage1_traced(noisy: &AudioSignal, config: &PipelineConfig) -> Result<(AudioSignal, Stage1Trace)> {
    config.validate()?;
    let ams = at_rate(&config.stage1, noisy.sample_rate);
    let needed = config.min_input_len();
    if noisy.len() < needed {
        return Err(Error::SignalTooShort { len: noisy.len(), needed });
    }

    let stft = Stft::new(ams)?;
    let spectra = stft.analyze(noisy)?;
    let init_frames = config.noise.init_frames;
    let mut state = init_noise(&spectra[..init_frames], config.noise)?;
    let band = LowBand::new(&ams, config.noise.band_hz_high);
    let mut gain_ctx = GainContext::new(config.gain)?;
    let threshold = config.noise.silence_threshold_db;

    let mut traces = Vec::with_capacity(spectra.len());
    let mut modified = Vec::with_capacity(spectra.len());
    for (t, spectrum) in spectra.iter().enumerate() {
        let ratio_db = energy_ratio_db(spectrum, &state);
        let silence = t >= init_frames && classify_silence(spectrum, &state, threshold);
        if silence {
            update_silence_noise(&mut state, spectrum)?;
        }
        let alpha = tracking_factor(spectrum, &state, &band);
        let noise = current_noise(&state, alpha);
        let ga = gain_ctx.process(&spectrum.magnitudes(), &noise)?;
        modified.push(apply_gain(spectrum, &ga.gain)?);

        traces.push(FrameTrace {
            index: spectrum.index,
            silence,
            energy_ratio_db: ratio_db,
            alpha,
            base_energy: state.base_magnitude.iter().map(|b| b * b).sum(),
            mean_gain: ga.gain.iter().sum::<f64>() / ga.gain.len() as f64,
        });
    }

    let intermediate = ensure_finite(stft.synthesize(&modified, noisy.len())?, "stage 1 output")?;
    log::debug!(
        "stage 1: {} frames, {} silence, final base energy {:.3e}",
        traces.len(),
        traces.iter().filter(|f| f.silence).count(),
        state.base_magnitude.iter().map(|b| b * b).sum::<f64>()
    );
    Ok((intermediate, Stage1Trace { frames: traces, final_noise: state }))
}

pub fn enhance_stage2(intermediate: &AudioSignal, config: &PipelineConfig) -> Result<AudioSignal> {
    config.validate()?;
    let ams = at_rate(&config.stage2, intermediate.sample_rate);
    let stft = Stft::new(ams)?;
    let psi = antisymmetry_mask(ams.fft_size);
    let compensated = stft
        .analyze(intermediate)?
        .iter()
        .map(|z| compensate_frame(z, &psi, &config.psc))
        .collect::<Result<Vec<_>>>()?;
    ensure_finite(stft.synthesize(&compensated, intermediate.len())?, "stage 2 output")
}

/// Magnitude compensation followed by phase compensation.
pub fn enhance(noisy: &AudioSignal, config: &PipelineConfig) -> Result<AudioSignal> {
    let intermediate = enhance_stage1(noisy, config)?;
    enhance_stage2(&intermediate, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(len: usize) -> AudioSignal {
        AudioSignal::new((0..len).map(|n| 0.5 * (n as f64 * 0.3).sin()).collect(), 8000).unwrap()
    }

    #[test]
    fn length_preserved() {
        let cfg = PipelineConfig::default();
        for len in [384, 385, 431, 1000] {
            let out = enhance(&tone(len), &cfg).unwrap();
            assert_eq!(out.len(), len);
        }
    }

    #[test]
    fn too_short_is_rejected() {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.min_input_len(), 384);
        let err = enhance_stage1(&tone(383), &cfg).unwrap_err();
        assert!(matches!(err, Error::SignalTooShort { len: 383, needed: 384 }));
    }

    #[test]
    fn init_frames_are_never_silence_updates() {
        let (_, trace) = enhance_stage1_traced(&tone(2000), &PipelineConfig::default()).unwrap();
        assert!(trace.frames[..6].iter().all(|f| !f.silence));
        assert_eq!(trace.frames.len(), AmsConfig::default().frame_count(2000));
    }

    #[test]
    fn framing_helper_sets_both_stages() {
        let cfg = PipelineConfig::default().with_framing(128, 64, 512);
        assert_eq!(cfg.stage1, cfg.stage2);
        assert_eq!(cfg.stage1.fft_size, 512);
        assert!(PipelineConfig::default().with_framing(128, 64, 64).validate().is_err());
    }
}
