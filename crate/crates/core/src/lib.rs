//! Speech enhancement by magnitude compensation followed by phase
//! compensation.
//!
//! Stage 1 subtracts a non-stationary noise estimate with a geometric gain
//! rule; stage 2 perturbs conjugate bin pairs so that low-energy components
//! cancel on resynthesis. The crate also carries the evaluation pieces
//! around that pipeline: WAV I/O, noise mixing, SNR metrics and spectrograms.

pub mod error;
pub mod frames;
pub mod gain;
pub mod metrics;
pub mod noise;
pub mod phase;
pub mod pipeline;
pub mod spectrogram;
pub mod synth;
pub mod wav;

pub use error::{Error, Result};
pub use frames::{AmsConfig, AudioSignal, ComplexSpectrum, Frame, Stft, WindowKind};
pub use gain::{GainContext, GainParams};
pub use metrics::{MetricReport, SegSnrParams};
pub use noise::{LowBand, NoiseParams, NoiseState};
pub use phase::{CompensationFunction, PscConfig};
pub use pipeline::{enhance, enhance_stage1, enhance_stage2, PipelineConfig};
pub use spectrogram::SpectrogramMatrix;
pub use wav::WavFormat;
