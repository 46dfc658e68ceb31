use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use spectral_enhance::pipeline::{enhance_stage1_traced, enhance_stage2, FrameTrace};
use spectral_enhance::spectrogram::compute_spectrogram;
use spectral_enhance::wav::{read_wav, read_wav_with_format, soft_clip, write_wav};
use spectral_enhance::{metrics, AmsConfig, AudioSignal, Error, MetricReport, PipelineConfig, Result, SegSnrParams};

use crate::Tuning;

pub fn json_error(err: serde_json::Error) -> Error {
    Error::Io(io::Error::other(err))
}

impl Tuning {
    /// Library defaults with the given overrides applied, validated.
    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        let mut config = PipelineConfig::default();
        if let Some(lambda) = self.lambda {
            config.psc.lambda = lambda;
        }
        if let Some(nu) = self.nu {
            config.noise.forgetting = nu;
        }
        if let Some(n) = self.init_frames {
            config.noise.init_frames = n;
        }
        if let Some(db) = self.silence_db {
            config.noise.silence_threshold_db = db;
        }
        if let Some(floor) = self.gain_floor {
            config.gain.gain_floor = floor;
        }
        if let Some(cap) = self.gain_cap {
            config.gain.gain_cap = cap;
        }
        if let Some(s) = self.smoothing {
            config.gain.smoothing = s;
        }
        let base = config.stage1;
        config = config.with_framing(
            self.frame.unwrap_or(base.frame_len),
            self.hop.unwrap_or(base.hop),
            self.fft.unwrap_or(base.fft_size),
        );
        config.validate()?;
        Ok(config)
    }
}

/// Stage 1 with its trace, then stage 2.
pub fn run_pipeline(noisy: &AudioSignal, config: &PipelineConfig) -> Result<(AudioSignal, Vec<FrameTrace>)> {
    let (intermediate, trace) = enhance_stage1_traced(noisy, config)?;
    let enhanced = enhance_stage2(&intermediate, config)?;
    Ok((enhanced, trace.frames))
}

#[derive(Debug, Serialize)]
struct EnhanceReport<'a> {
    input: String,
    output: String,
    format: spectral_enhance::WavFormat,
    sample_rate: u32,
    samples: usize,
    frames: usize,
    silence_frames: usize,
    mean_alpha: f64,
    input_rms: f64,
    output_rms: f64,
    /// Samples the output limiter changed.
    limited_samples: usize,
    config: &'a PipelineConfig,
    trace: &'a [FrameTrace],
}

pub fn enhance(input: &Path, out: &Path, report: Option<&Path>, tuning: &Tuning) -> Result<()> {
    let config = tuning.pipeline_config()?;
    let (noisy, format) = read_wav_with_format(input)?;
    let (enhanced, trace) = run_pipeline(&noisy, &config)?;

    let limited_samples = enhanced.samples.iter().filter(|s| soft_clip(**s) != **s).count();
    let limited = AudioSignal::new(enhanced.samples.iter().map(|&s| soft_clip(s)).collect(), enhanced.sample_rate)?;
    write_wav(&limited, out, format)?;
    if limited_samples > 0 {
        log::warn!("{limited_samples} output samples passed through the limiter");
    }

    if let Some(path) = report {
        let silence_frames = trace.iter().filter(|f| f.silence).count();
        let mean_alpha = trace.iter().map(|f| f.alpha).sum::<f64>() / trace.len().max(1) as f64;
        let summary = EnhanceReport {
            input: input.display().to_string(),
            output: out.display().to_string(),
            format,
            sample_rate: noisy.sample_rate,
            samples: noisy.len(),
            frames: trace.len(),
            silence_frames,
            mean_alpha,
            input_rms: noisy.rms(),
            output_rms: limited.rms(),
            limited_samples,
            config: &config,
            trace: &trace,
        };
        let mut file = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut file, &summary).map_err(json_error)?;
        writeln!(file)?;
        file.flush()?;
    }
    Ok(())
}

pub fn mix(clean: &Path, noise: &Path, snr_db: f64, out: &Path) -> Result<()> {
    let (clean, format) = read_wav_with_format(clean)?;
    let noise = read_wav(noise)?;
    let mixed = metrics::mix_at_snr(&clean, &noise, snr_db)?;
    let over = mixed.samples.iter().filter(|s| s.abs() > 1.0).count();
    if over > 0 && format == spectral_enhance::WavFormat::Pcm16 {
        log::warn!("{over} mixture samples exceed full scale and will be clamped");
    }
    write_wav(&mixed, out, format)
}

pub fn metrics(clean: &Path, noisy: &Path, enhanced: &Path, json: bool) -> Result<()> {
    let clean = read_wav(clean)?;
    let noisy = read_wav(noisy)?;
    let enhanced = read_wav(enhanced)?;
    let report: MetricReport = metrics::evaluate(&clean, &noisy, &enhanced, &SegSnrParams::default())?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if json {
        serde_json::to_writer_pretty(&mut out, &report).map_err(json_error)?;
        writeln!(out)?;
    } else {
        writeln!(out, "snrseg_improvement_db: {:.4}", report.snrseg_improvement_db)?;
        writeln!(out, "overall_snr_improvement_db: {:.4}", report.overall_snr_improvement_db)?;
        writeln!(out, "frames_scored: {}", report.frames_scored)?;
    }
    Ok(())
}

pub fn spectrogram(input: &Path, out: &Path, fft: Option<usize>, hop: Option<usize>) -> Result<()> {
    let signal = read_wav(input)?;
    let defaults = AmsConfig::default();
    let fft_size = fft.unwrap_or(defaults.fft_size);
    // shrink the frame for transforms shorter than the default frame
    let frame_len = defaults.frame_len.min(fft_size);
    let config = AmsConfig {
        frame_len,
        hop: hop.unwrap_or(frame_len / 2).max(1),
        fft_size,
        sample_rate: signal.sample_rate,
        ..defaults
    };
    config.validate()?;
    compute_spectrogram(&signal, &config)?.write_csv(out)
}
