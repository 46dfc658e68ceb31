//! Seeded synthetic signals for experiments and tests.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::frames::AudioSignal;

/// Zero-mean Gaussian white noise with standard deviation `std_dev`.
pub fn white_noise(len: usize, std_dev: f64, sample_rate: u32, seed: u64) -> AudioSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std_dev).expect("finite, non-negative std_dev");
    AudioSignal { samples: (0..len).map(|_| normal.sample(&mut rng)).collect(), sample_rate }
}

/// Sum of a fundamental and its first `harmonics` overtones with `1/k`
/// amplitudes, normalized to peak `amplitude`, preceded by `lead_in`
/// samples of silence. A slow 3 Hz envelope gives it a syllabic shape.
pub fn harmonic_vowel(
    len: usize,
    fundamental_hz: f64,
    harmonics: usize,
    amplitude: f64,
    lead_in: usize,
    sample_rate: u32,
) -> AudioSignal {
    let fs = sample_rate as f64;
    let raw: Vec<f64> = (0..len)
        .map(|n| {
            if n < lead_in {
                return 0.0;
            }
            let t = (n - lead_in) as f64 / fs;
            let envelope = 0.6 + 0.4 * (2.0 * PI * 3.0 * t).sin();
            let tone: f64 = (1..=harmonics + 1)
                .map(|k| (2.0 * PI * fundamental_hz * k as f64 * t).sin() / k as f64)
                .sum();
            envelope * tone
        })
        .collect();
    let peak = raw.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
    AudioSignal { samples: raw.iter().map(|s| s * scale).collect(), sample_rate }
}
