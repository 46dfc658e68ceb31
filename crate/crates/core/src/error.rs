use thiserror::Error;

/// Errors raised by the enhancement library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("signal too short: {len} samples, need at least {needed}")]
    SignalTooShort { len: usize, needed: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("insufficient initialization frames: need {needed}, got {got}")]
    InsufficientInitFrames { needed: usize, got: usize },

    #[error("gain breaks conjugate symmetry at bin {bin}")]
    AsymmetricGain { bin: usize },

    #[error("overlap-add needs at least one frame")]
    NoFrames,

    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(u32, u32),

    #[error("{0} signal has zero power")]
    ZeroPower(&'static str),

    #[error("no frame carries enough reference energy to be scored")]
    NoScorableFrames,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("mono required, file has {channels} channels")]
    MonoRequired { channels: u16 },

    #[error("unsupported WAV format: format tag {tag:#06x}, {bits} bits per sample")]
    UnsupportedFormat { tag: u16, bits: u16 },

    #[error("WAV error: {0}")]
    Wav(#[from] hound::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the failure is a numerical one (as opposed to I/O, format or configuration).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ZeroPower(_) | Error::NoScorableFrames | Error::NonFinite(_) | Error::AsymmetricGain { .. }
        )
    }

    /// Whether the failure came from reading or writing a file, or from its contents.
    pub fn is_io_or_format(&self) -> bool {
        matches!(
            self,
            Error::Io(_)
                | Error::Wav(_)
                | Error::MonoRequired { .. }
                | Error::UnsupportedFormat { .. }
                | Error::SignalTooShort { .. }
                | Error::SampleRateMismatch(..)
                | Error::LengthMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
