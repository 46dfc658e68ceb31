#![allow(dead_code)]

/// Relative RMS error of `actual` against `expected`.
pub fn rel_rms(actual: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(actual.len(), expected.len());
    let err: f64 = actual.iter().zip(expected).map(|(a, e)| (a - e) * (a - e)).sum();
    let reference: f64 = expected.iter().map(|e| e * e).sum();
    (err / reference.max(f64::MIN_POSITIVE)).sqrt()
}

pub fn rms(samples: &[f64]) -> f64 {
    (samples.iter().map(|s| s * s).sum::<f64>() / samples.len().max(1) as f64).sqrt()
}

/// Samples `[frame_len, len - frame_len)`, away from the analysis edges.
pub fn interior(samples: &[f64], frame_len: usize) -> &[f64] {
    &samples[frame_len..samples.len() - frame_len]
}
