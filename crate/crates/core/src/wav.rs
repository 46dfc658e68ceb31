//! Mono WAV input and output (16-bit PCM and 32-bit IEEE float).

use std::fs::File;
use std::io::{BufReader, Read, Seek, SeekFrom};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::AudioSignal;

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_IEEE_FLOAT: u16 = 0x0003;

/// Rate the enhancement defaults are tuned for.
pub const NOMINAL_SAMPLE_RATE: u32 = 8000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WavFormat {
    #[default]
    Pcm16,
    Float32,
}

impl WavFormat {
    fn spec(self, sample_rate: u32) -> WavSpec {
        let (bits_per_sample, sample_format) = match self {
            WavFormat::Pcm16 => (16, SampleFormat::Int),
            WavFormat::Float32 => (32, SampleFormat::Float),
        };
        WavSpec { channels: 1, sample_rate, bits_per_sample, sample_format }
    }
}

impl std::str::FromStr for WavFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pcm16" => Ok(WavFormat::Pcm16),
            "float32" => Ok(WavFormat::Float32),
            other => Err(format!("unknown WAV format {other:?} (expected pcm16 or float32)")),
        }
    }
}

/// Format tag and bit depth from the `fmt ` chunk, read without decoding.
fn sniff_format(path: &Path) -> Option<(u16, u16)> {
    let mut file = BufReader::new(File::open(path).ok()?);
    let mut header = [0u8; 12];
    file.read_exact(&mut header).ok()?;
    if &header[0..4] != b"RIFF" || &header[8..12] != b"WAVE" {
        return None;
    }
    loop {
        let mut chunk = [0u8; 8];
        file.read_exact(&mut chunk).ok()?;
        let size = u32::from_le_bytes([chunk[4], chunk[5], chunk[6], chunk[7]]);
        if &chunk[0..4] == b"fmt " {
            let mut fmt = [0u8; 16];
            file.read_exact(&mut fmt).ok()?;
            let tag = u16::from_le_bytes([fmt[0], fmt[1]]);
            let bits = u16::from_le_bytes([fmt[14], fmt[15]]);
            return Some((tag, bits));
        }
        file.seek(SeekFrom::Current(i64::from(size) + i64::from(size & 1))).ok()?;
    }
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioSignal> {
    read_wav_with_format(path).map(|(signal, _)| signal)
}

/// Read a mono WAV file, normalizing samples to `[-1, 1]`, and report which
/// of the supported encodings it used.
pub fn read_wav_with_format(path: impl AsRef<Path>) -> Result<(AudioSignal, WavFormat)> {
    let path = path.as_ref();
    let reader = match WavReader::open(path) {
        Ok(reader) => reader,
        Err(err @ (hound::Error::Unsupported | hound::Error::FormatError(_))) => {
            return Err(match sniff_format(path) {
                Some((tag, bits)) => Error::UnsupportedFormat { tag, bits },
                None => Error::Wav(err),
            });
        }
        Err(err) => return Err(err.into()),
    };
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::MonoRequired { channels: spec.channels });
    }
    if spec.sample_rate != NOMINAL_SAMPLE_RATE {
        log::warn!(
            "{}: sample rate {} Hz differs from the nominal {} Hz",
            path.display(),
            spec.sample_rate,
            NOMINAL_SAMPLE_RATE
        );
    }

    let (samples, format) = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => {
            let samples = reader
                .into_samples::<i16>()
                .map(|s| s.map(|v| f64::from(v) / 32768.0))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            (samples, WavFormat::Pcm16)
        }
        (SampleFormat::Float, 32) => {
            let samples = reader
                .into_samples::<f32>()
                .map(|s| s.map(f64::from))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            (samples, WavFormat::Float32)
        }
        (sample_format, bits) => {
            let tag = sniff_format(path).map(|(tag, _)| tag).unwrap_or(match sample_format {
                SampleFormat::Int => FORMAT_PCM,
                SampleFormat::Float => FORMAT_IEEE_FLOAT,
            });
            return Err(Error::UnsupportedFormat { tag, bits });
        }
    };
    Ok((AudioSignal::new(samples, spec.sample_rate)?, format))
}

/// 16-bit quantization: clamp to `[-1, 1]`, scale by 32768, round half away
/// from zero, saturate at the `i16` range.
pub fn quantize_pcm16(sample: f64) -> i16 {
    (sample.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

pub fn write_wav(signal: &AudioSignal, path: impl AsRef<Path>, format: WavFormat) -> Result<()> {
    if signal.samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("samples to write"));
    }
    let mut writer = WavWriter::create(path, format.spec(signal.sample_rate))?;
    match format {
        WavFormat::Pcm16 => {
            for &s in &signal.samples {
                writer.write_sample(quantize_pcm16(s))?;
            }
        }
        WavFormat::Float32 => {
            for &s in &signal.samples {
                writer.write_sample(s as f32)?;
            }
        }
    }
    writer.finalize()?;
    Ok(())
}

/// Smooth limiter for the file-writing boundary: identity up to 0.9 in
/// magnitude, then a tanh knee approaching 1.
pub fn soft_clip(sample: f64) -> f64 {
    const KNEE: f64 = 0.9;
    let magnitude = sample.abs();
    if magnitude <= KNEE {
        sample
    } else {
        sample.signum() * (KNEE + (1.0 - KNEE) * ((magnitude - KNEE) / (1.0 - KNEE)).tanh())
    }
}
