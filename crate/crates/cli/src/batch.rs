//! Manifest-driven mix, enhance and score runs.
//!
//! Each manifest row is `clean,noise,snr`; relative paths resolve against the
//! manifest's directory and a header row is optional. Rows run in parallel
//! and are reported in manifest order, followed by per-SNR means.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use spectral_enhance::metrics::{evaluate, mix_at_snr, segmental_snr};
use spectral_enhance::wav::{read_wav, write_wav};
use spectral_enhance::{Error, PipelineConfig, Result, SegSnrParams, WavFormat};

use crate::commands::run_pipeline;
use crate::Tuning;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub clean: PathBuf,
    pub noise: PathBuf,
    pub snr_db: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchResult {
    pub clean: String,
    pub noise: String,
    pub snr_db: f64,
    pub input_snrseg_db: f64,
    pub snrseg_improvement_db: f64,
    pub overall_snr_improvement_db: f64,
    pub frames_scored: usize,
}

fn csv_error(err: csv::Error) -> Error {
    Error::Io(io::Error::other(err))
}

fn bad_manifest(line: usize, what: impl std::fmt::Display) -> Error {
    Error::Io(io::Error::new(io::ErrorKind::InvalidData, format!("manifest line {line}: {what}")))
}

pub fn parse_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_error)?;

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(bad_manifest(line, format!("expected 3 fields, found {}", record.len())));
        }
        let snr_db = match record[2].parse::<f64>() {
            Ok(v) => v,
            // a non-numeric SNR on the first row is a header
            Err(_) if i == 0 => continue,
            Err(_) => return Err(bad_manifest(line, format!("bad SNR {:?}", &record[2]))),
        };
        rows.push(ManifestRow { clean: base.join(&record[0]), noise: base.join(&record[1]), snr_db });
    }
    if rows.is_empty() {
        return Err(bad_manifest(0, "no rows"));
    }
    Ok(rows)
}

pub fn process_row(
    index: usize,
    row: &ManifestRow,
    config: &PipelineConfig,
    out_dir: Option<&Path>,
) -> Result<BatchResult> {
    let clean = read_wav(&row.clean)?;
    let noise = read_wav(&row.noise)?;
    let noisy = mix_at_snr(&clean, &noise, row.snr_db)?;
    let (enhanced, _) = run_pipeline(&noisy, config)?;
    let params = SegSnrParams::default();
    let report = evaluate(&clean, &noisy, &enhanced, &params)?;
    let (input_snrseg_db, _) = segmental_snr(&clean, &noisy, &params)?;

    if let Some(dir) = out_dir {
        write_wav(&noisy, dir.join(format!("{index:04}_noisy.wav")), WavFormat::Float32)?;
        write_wav(&enhanced, dir.join(format!("{index:04}_enhanced.wav")), WavFormat::Float32)?;
    }
    log::info!("row {index}: {} at {} dB done", row.clean.display(), row.snr_db);

    Ok(BatchResult {
        clean: row.clean.display().to_string(),
        noise: row.noise.display().to_string(),
        snr_db: row.snr_db,
        input_snrseg_db,
        snrseg_improvement_db: report.snrseg_improvement_db,
        overall_snr_improvement_db: report.overall_snr_improvement_db,
        frames_scored: report.frames_scored,
    })
}

fn print_table(out: &mut impl Write, results: &[BatchResult]) -> io::Result<()> {
    writeln!(
        out,
        "{:>4}  {:>8}  {:>12}  {:>14}  {:>15}  {:>7}  clean / noise",
        "row", "snr_db", "in_snrseg", "snrseg_impr", "overall_impr", "frames"
    )?;
    for (i, r) in results.iter().enumerate() {
        writeln!(
            out,
            "{:>4}  {:>8.2}  {:>12.3}  {:>14.3}  {:>15.3}  {:>7}  {} / {}",
            i, r.snr_db, r.input_snrseg_db, r.snrseg_improvement_db, r.overall_snr_improvement_db, r.frames_scored,
            r.clean, r.noise
        )?;
    }

    let mut by_snr: BTreeMap<i64, (f64, f64, f64, usize)> = BTreeMap::new();
    for r in results {
        // group on millidecibels so equal targets land in one bucket
        let entry = by_snr.entry((r.snr_db * 1000.0).round() as i64).or_default();
        entry.0 += r.snrseg_improvement_db;
        entry.1 += r.overall_snr_improvement_db;
        entry.2 += r.input_snrseg_db;
        entry.3 += 1;
    }
    writeln!(out)?;
    writeln!(out, "{:>8}  {:>5}  {:>12}  {:>14}  {:>15}", "snr_db", "files", "in_snrseg", "snrseg_impr", "overall_impr")?;
    for (key, (seg, overall, input, n)) in by_snr {
        let n_f = n as f64;
        writeln!(
            out,
            "{:>8.2}  {:>5}  {:>12.3}  {:>14.3}  {:>15.3}",
            key as f64 / 1000.0,
            n,
            input / n_f,
            seg / n_f,
            overall / n_f
        )?;
    }
    Ok(())
}

pub fn run(manifest: &Path, results_csv: Option<&Path>, out_dir: Option<&Path>, tuning: &Tuning) -> Result<()> {
    let config = tuning.pipeline_config()?;
    let rows = parse_manifest(manifest)?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }

    let results = rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| process_row(i, row, &config, out_dir))
        .collect::<Result<Vec<_>>>()?;

    let stdout = io::stdout();
    print_table(&mut stdout.lock(), &results)?;

    if let Some(path) = results_csv {
        let mut writer = csv::Writer::from_path(path).map_err(csv_error)?;
        for r in &results {
            writer.serialize(r).map_err(csv_error)?;
        }
        writer.flush()?;
    }
    Ok(())
}
