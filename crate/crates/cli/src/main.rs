use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spectral_enhance::Error;

mod batch;
mod commands;

/// Two-stage speech enhancement and its evaluation tools.
#[derive(Debug, Parser)]
#[command(name = "spectral-enhance", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enhance a noisy mono WAV file.
    Enhance(EnhanceArgs),
    /// Add noise to a clean file at a target SNR.
    Mix {
        #[arg(long)]
        clean: PathBuf,
        #[arg(long)]
        noise: PathBuf,
        /// Target SNR in dB.
        #[arg(long, allow_negative_numbers = true)]
        snr: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Segmental and overall SNR improvement of an enhanced file.
    Metrics {
        #[arg(long)]
        clean: PathBuf,
        #[arg(long)]
        noisy: PathBuf,
        #[arg(long)]
        enhanced: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write a dB magnitude spectrogram as CSV.
    Spectrogram {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        fft: Option<usize>,
        #[arg(long)]
        hop: Option<usize>,
    },
    /// Mix, enhance and score every `clean,noise,snr` row of a manifest.
    Batch {
        #[arg(long)]
        manifest: PathBuf,
        /// Also write the results table to this CSV file.
        #[arg(long)]
        results: Option<PathBuf>,
        /// Keep the noisy and enhanced files of every row here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
}

#[derive(Debug, Args)]
struct EnhanceArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Write a JSON summary of the run here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

/// Pipeline overrides; anything left unset keeps the library default.
#[derive(Debug, Args, Clone, Default)]
pub struct Tuning {
    /// Phase compensation scale (0 disables stage 2).
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Forgetting factor of the silence-frame noise recursion.
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Leading frames averaged into the initial noise estimate.
    #[arg(long)]
    pub init_frames: Option<usize>,
    /// Silence threshold in dB above the noise estimate.
    #[arg(long, allow_negative_numbers = true)]
    pub silence_db: Option<f64>,
    /// Frame length in samples (both stages).
    #[arg(long)]
    pub frame: Option<usize>,
    /// Hop in samples (both stages).
    #[arg(long)]
    pub hop: Option<usize>,
    /// FFT size (both stages).
    #[arg(long)]
    pub fft: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub gain_floor: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gain_cap: Option<f64>,
    /// Decision-directed smoothing of the a-priori SNR.
    #[arg(long, allow_negative_numbers = true)]
    pub smoothing: Option<f64>,
}

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) => EXIT_USAGE,
        e if e.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_IO,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };

    let result = match cli.command {
        Command::Enhance(args) => commands::enhance(&args.input, &args.out, args.report.as_deref(), &args.tuning),
        Command::Mix { clean, noise, snr, out } => commands::mix(&clean, &noise, snr, &out),
        Command::Metrics { clean, noisy, enhanced, json } => commands::metrics(&clean, &noisy, &enhanced, json),
        Command::Spectrogram { input, out, fft, hop } => commands::spectrogram(&input, &out, fft, hop),
        Command::Batch { manifest, results, out_dir, tuning } => {
            batch::run(&manifest, results.as_deref(), out_dir.as_deref(), &tuning)
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::InvalidConfig("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::ZeroPower("noise")), EXIT_NUMERIC);
        assert_eq!(exit_code(&Error::NoScorableFrames), EXIT_NUMERIC);
        assert_eq!(exit_code(&Error::MonoRequired { channels: 2 }), EXIT_IO);
        assert_eq!(exit_code(&Error::SignalTooShort { len: 1, needed: 2 }), EXIT_IO);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
