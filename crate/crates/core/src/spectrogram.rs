//! Magnitude spectrogram in dB and its CSV form.
//!
//! The CSV has a header row with each bin's center frequency in Hz, then one
//! row per frame. Cells are written with 9 significant digits, enough for
//! `f32` values to parse back bit-exactly.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::frames::{AmsConfig, AudioSignal, Stft};

pub const DB_FLOOR: f32 = -120.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramMatrix {
    /// Center frequency of each column (bins `0..=N/2`).
    pub frequencies_hz: Vec<f64>,
    /// One row per frame, in time order.
    pub rows: Vec<Vec<f32>>,
}

fn to_db(magnitude: f64) -> f32 {
    let db = 20.0 * magnitude.log10();
    if db.is_nan() || db < f64::from(DB_FLOOR) {
        DB_FLOOR
    } else {
        db as f32
    }
}

pub fn compute_spectrogram(signal: &AudioSignal, config: &AmsConfig) -> Result<SpectrogramMatrix> {
    let config = AmsConfig { sample_rate: signal.sample_rate, ..*config };
    let stft = Stft::new(config)?;
    let half = config.fft_size / 2 + 1;
    let rows = stft
        .analyze(signal)?
        .iter()
        .map(|spectrum| spectrum.bins[..half].iter().map(|b| to_db(b.norm())).collect())
        .collect();
    Ok(SpectrogramMatrix { frequencies_hz: (0..half).map(|k| config.bin_hz(k)).collect(), rows })
}

impl SpectrogramMatrix {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(fs::File::create(path)?);
        let header: Vec<String> = self.frequencies_hz.iter().map(|f| format!("{f}")).collect();
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.8e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let parse_err = |what: &str| Error::InvalidConfig(format!("malformed spectrogram CSV: {what}"));
        let header = lines.next().ok_or_else(|| parse_err("missing header"))?;
        let frequencies_hz = header
            .split(',')
            .map(|f| f.trim().parse::<f64>().map_err(|_| parse_err(f)))
            .collect::<Result<Vec<_>>>()?;
        let rows = lines
            .filter(|l| !l.trim().is_empty())
            .map(|line| {
                let row = line
                    .split(',')
                    .map(|v| v.trim().parse::<f32>().map_err(|_| parse_err(v)))
                    .collect::<Result<Vec<_>>>()?;
                if row.len() == frequencies_hz.len() {
                    Ok(row)
                } else {
                    Err(parse_err("row width differs from header"))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { frequencies_hz, rows })
    }
}
