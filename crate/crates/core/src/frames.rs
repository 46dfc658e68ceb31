//! Analysis-modification-synthesis substrate: framing, windowing, forward and
//! inverse transforms, and envelope-normalized overlap-add.
//!
//! Forward transforms use the unnormalized convention
//! `Y[k] = sum_n y[n] exp(-j 2 pi n k / N)` and inverse transforms carry the
//! `1/N` factor, so an unmodified round trip is the identity.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest window envelope value used as a divisor in overlap-add.
pub const ENVELOPE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// DFT-even Hamming window, `0.54 - 0.46 cos(2 pi n / L)`.
    #[default]
    HammingPeriodic,
}

impl WindowKind {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            WindowKind::HammingPeriodic => (0..len)
                .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / len as f64).cos())
                .collect(),
        }
    }
}

/// Framing and transform parameters for one analysis-synthesis pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmsConfig {
    pub frame_len: usize,
    pub hop: usize,
    /// Transform length; frames are zero-padded up to it.
    pub fft_size: usize,
    pub window_kind: WindowKind,
    pub sample_rate: u32,
}

impl Default for AmsConfig {
    fn default() -> Self {
        Self {
            frame_len: 96,
            hop: 48,
            fft_size: 256,
            window_kind: WindowKind::HammingPeriodic,
            sample_rate: 8000,
        }
    }
}

impl AmsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hop == 0 || self.hop > self.frame_len || self.frame_len > self.fft_size {
            return Err(Error::InvalidConfig(format!(
                "need 0 < hop ({}) <= frame_len ({}) <= fft_size ({})",
                self.hop, self.frame_len, self.fft_size
            )));
        }
        if self.sample_rate == 0 {
            return Err(Error::InvalidConfig("sample_rate must be positive".into()));
        }
        Ok(())
    }

    pub fn window(&self) -> Vec<f64> {
        self.window_kind.coefficients(self.frame_len)
    }

    /// Number of frames `segment_signal` produces for `len` samples.
    pub fn frame_count(&self, len: usize) -> usize {
        if len < self.frame_len {
            return 0;
        }
        let full = (len - self.frame_len) / self.hop + 1;
        if !(len - self.frame_len).is_multiple_of(self.hop) {
            full + 1
        } else {
            full
        }
    }

    /// Center frequency of bin `k` in Hz.
    pub fn bin_hz(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate as f64 / self.fft_size as f64
    }
}

/// Mono sample sequence with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidConfig("sample_rate must be positive".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("audio samples"));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean squared sample value.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64
    }

    pub fn rms(&self) -> f64 {
        self.power().sqrt()
    }
}

/// One frame of time-domain samples; `index` is the frame ordinal, so the
/// frame starts at sample `index * hop`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub samples: Vec<f64>,
    pub index: usize,
}

/// Full `fft_size`-point complex spectrum of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    pub bins: Vec<Complex64>,
    pub index: usize,
}

impl ComplexSpectrum {
    pub fn zeros(len: usize, index: usize) -> Self {
        Self { bins: vec![Complex64::new(0.0, 0.0); len], index }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.norm()).collect()
    }

    /// Largest relative deviation from `bins[k] == conj(bins[N - k])`.
    pub fn symmetry_error(&self) -> f64 {
        let n = self.bins.len();
        let scale = self.bins.iter().map(|b| b.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        (1..n)
            .map(|k| (self.bins[k] - self.bins[n - k].conj()).norm() / scale)
            .fold(0.0, f64::max)
    }
}

/// Split a signal into overlapping frames starting at `t * hop`. A trailing
/// remainder produces one extra frame, zero-padded to `frame_len`.
pub fn segment_signal(signal: &AudioSignal, config: &AmsConfig) -> Result<Vec<Frame>> {
    config.validate()?;
    let len = signal.len();
    if len < config.frame_len {
        return Err(Error::SignalTooShort { len, needed: config.frame_len });
    }
    let frames = (0..config.frame_count(len))
        .map(|t| {
            let start = t * config.hop;
            let end = (start + config.frame_len).min(len);
            let mut samples = signal.samples[start..end].to_vec();
            samples.resize(config.frame_len, 0.0);
            Frame { samples, index: t }
        })
        .collect();
    Ok(frames)
}

pub fn apply_window(frame: &Frame, config: &AmsConfig) -> Result<Frame> {
    if frame.samples.len() != config.frame_len {
        return Err(Error::LengthMismatch { expected: config.frame_len, actual: frame.samples.len() });
    }
    let window = config.window();
    Ok(Frame {
        samples: frame.samples.iter().zip(&window).map(|(s, w)| s * w).collect(),
        index: frame.index,
    })
}

/// Transform engine for a fixed [`AmsConfig`]. Holds the window and the
/// planned FFTs; cheap to clone and safe to share between threads.
#[derive(Clone)]
pub struct Stft {
    config: AmsConfig,
    window: Vec<f64>,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Stft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Stft").field("config", &self.config).finish_non_exhaustive()
    }
}

impl Stft {
    pub fn new(config: AmsConfig) -> Result<Self> {
        config.validate()?;
        let forward = RealFftPlanner::<f64>::new().plan_fft_forward(config.fft_size);
        let inverse = FftPlanner::<f64>::new().plan_fft_inverse(config.fft_size);
        Ok(Self { config, window: config.window(), forward, inverse })
    }

    pub fn config(&self) -> &AmsConfig {
        &self.config
    }

    pub fn window(&self) -> &[f64] {
        &self.window
    }

    /// Zero-pad a (windowed) frame to `fft_size` and transform it. The upper
    /// half of the spectrum is filled by conjugate mirroring, so the symmetry
    /// `bins[k] == conj(bins[N - k])` holds exactly.
    pub fn forward_spectrum(&self, frame: &Frame) -> Result<ComplexSpectrum> {
        let n = self.config.fft_size;
        if frame.samples.len() > n {
            return Err(Error::LengthMismatch { expected: n, actual: frame.samples.len() });
        }
        let mut input = vec![0.0; n];
        input[..frame.samples.len()].copy_from_slice(&frame.samples);
        let mut half = self.forward.make_output_vec();
        self.forward
            .process(&mut input, &mut half)
            .expect("buffer lengths match the planned transform");

        let mut bins = Vec::with_capacity(n);
        bins.extend_from_slice(&half);
        bins.extend((half.len()..n).map(|k| half[n - k].conj()));
        Ok(ComplexSpectrum { bins, index: frame.index })
    }

    /// Inverse transform keeping only the real part and the first
    /// `frame_len` samples.
    pub fn inverse_frame(&self, spectrum: &ComplexSpectrum) -> Result<Frame> {
        self.inverse_frame_with_residue(spectrum).map(|(frame, _)| frame)
    }

    /// Like [`Stft::inverse_frame`], also returning the largest magnitude of
    /// the discarded imaginary part.
    pub fn inverse_frame_with_residue(&self, spectrum: &ComplexSpectrum) -> Result<(Frame, f64)> {
        let n = self.config.fft_size;
        if spectrum.bins.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: spectrum.bins.len() });
        }
        let mut buffer = spectrum.bins.clone();
        self.inverse.process(&mut buffer);
        let scale = 1.0 / n as f64;
        let residue = buffer.iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max);
        let samples = buffer[..self.config.frame_len].iter().map(|c| c.re * scale).collect();
        Ok((Frame { samples, index: spectrum.index }, residue))
    }

    /// Segment, window and transform a whole signal.
    pub fn analyze(&self, signal: &AudioSignal) -> Result<Vec<ComplexSpectrum>> {
        segment_signal(signal, &self.config)?
            .iter()
            .map(|frame| {
                let windowed = Frame {
                    samples: frame.samples.iter().zip(&self.window).map(|(s, w)| s * w).collect(),
                    index: frame.index,
                };
                self.forward_spectrum(&windowed)
            })
            .collect()
    }

    /// Inverse-transform every spectrum and overlap-add to `total_len` samples.
    pub fn synthesize(&self, spectra: &[ComplexSpectrum], total_len: usize) -> Result<AudioSignal> {
        let frames = spectra.iter().map(|s| self.inverse_frame(s)).collect::<Result<Vec<_>>>()?;
        overlap_add(&frames, &self.config, total_len)
    }
}

/// Sum frames at their `index * hop` offsets and divide by the summed
/// analysis-window envelope. Output is truncated to `total_len`.
pub fn overlap_add(frames: &[Frame], config: &AmsConfig, total_len: usize) -> Result<AudioSignal> {
    config.validate()?;
    if frames.is_empty() {
        return Err(Error::NoFrames);
    }
    let window = config.window();
    let mut acc = vec![0.0; total_len];
    let mut envelope = vec![0.0; total_len];
    for frame in frames {
        if frame.samples.len() != config.frame_len {
            return Err(Error::LengthMismatch { expected: config.frame_len, actual: frame.samples.len() });
        }
        let start = frame.index * config.hop;
        if start >= total_len {
            continue;
        }
        let end = (start + config.frame_len).min(total_len);
        for (n, pos) in (start..end).enumerate() {
            acc[pos] += frame.samples[n];
            envelope[pos] += window[n];
        }
    }
    let samples = acc
        .iter()
        .zip(&envelope)
        .map(|(a, e)| a / e.max(ENVELOPE_FLOOR))
        .collect();
    Ok(AudioSignal { samples, sample_rate: config.sample_rate })
}
