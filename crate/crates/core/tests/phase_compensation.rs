//! Phase compensation structure and its selective attenuation of weak
//! conjugate pairs.

mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_enhance::phase::{antisymmetry_mask, compensate_frame, compensate_phase, compensation_function, rms_noise_scalar};
use spectral_enhance::{AmsConfig, ComplexSpectrum, PscConfig, Stft};

fn mask_oracle(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let r = k as f64 / n as f64;
            if 0.0 < r && r < 0.5 {
                1.0
            } else if 0.5 < r && r < 1.0 {
                -1.0
            } else {
                0.0
            }
        })
        .collect()
}

#[test]
fn mask_matches_piecewise_definition() {
    for n in [2, 3, 5, 8, 96, 255, 256, 257, 1024] {
        let psi = antisymmetry_mask(n);
        assert_eq!(psi, mask_oracle(n), "N = {n}");
        let phi = compensation_function(&psi, 1.7, &PscConfig::default());
        assert_eq!(phi.values[0], 0.0);
        for k in 1..n {
            assert_eq!(phi.values[k], -phi.values[n - k]);
        }
        if n % 2 == 0 {
            assert_eq!(phi.values[n / 2], 0.0);
        }
    }
}

/// Amplitude of the real sinusoid a bin pair contributes after `Re(IFFT)`:
/// half the magnitude of `X[k] + conj(X[N-k])`, computed from the two
/// compensated angles directly.
fn pair_retention_oracle(m: f64, theta: f64, phi: f64) -> f64 {
    let upper = Complex64::from_polar(m, theta) + phi;
    let lower = Complex64::from_polar(m, -theta) - phi;
    let a = upper.im.atan2(upper.re);
    let b = -lower.im.atan2(lower.re);
    // |m e^{ja} + m e^{jb}| / 2 relative to the uncompensated amplitude m
    ((a - b) / 2.0).cos().abs()
}

fn pair_retention(m: f64, theta: f64, phi: f64) -> f64 {
    let n = 8;
    let k = 1;
    let mut z = ComplexSpectrum::zeros(n, 0);
    z.bins[k] = Complex64::from_polar(m, theta);
    z.bins[n - k] = z.bins[k].conj();
    let mut values = vec![0.0; n];
    values[k] = phi;
    values[n - k] = -phi;
    let x = compensate_phase(&z, &spectral_enhance::CompensationFunction { values }).unwrap();
    (x.bins[k] + x.bins[n - k].conj()).norm() / (2.0 * m)
}

#[test]
fn weak_pairs_are_attenuated_more() {
    for theta in [PI / 6.0, PI / 3.0, PI / 2.0] {
        let mut previous = f64::INFINITY;
        for m in [10.0, 1.0, 0.1] {
            let r = pair_retention(m, theta, 1.0);
            assert!((r - pair_retention_oracle(m, theta, 1.0)).abs() < 1e-12);
            assert!(r <= previous, "retention rose as m fell: theta {theta} m {m}");
            previous = r;
        }
        assert!(pair_retention(0.1, theta, 1.0) < pair_retention(10.0, theta, 1.0));
    }
}

#[test]
fn pair_retention_seen_through_inverse_transform() {
    // amplitude of the resynthesized cosine at bin 1 equals the retention
    let cfg = AmsConfig { frame_len: 8, hop: 4, fft_size: 8, ..AmsConfig::default() };
    let stft = Stft::new(cfg).unwrap();
    for (m, theta) in [(0.1, PI / 3.0), (10.0, PI / 6.0), (1.0, PI / 2.0)] {
        let mut z = ComplexSpectrum::zeros(8, 0);
        z.bins[1] = Complex64::from_polar(m, theta);
        z.bins[7] = z.bins[1].conj();
        let phi = compensation_function(&antisymmetry_mask(8), 1.0, &PscConfig { lambda: 1.0 });
        let x = compensate_phase(&z, &phi).unwrap();
        let frame = stft.inverse_frame(&x).unwrap();
        // x[n] = (2 A / N) cos(2 pi n / N + c)
        let energy: f64 = frame.samples.iter().map(|s| s * s).sum();
        let amplitude = (energy * 2.0 / 8.0).sqrt() * 8.0 / 2.0;
        let expected = pair_retention_oracle(m, theta, 1.0) * m;
        assert!((amplitude - expected).abs() < 1e-9, "{amplitude} vs {expected}");
    }
}

#[test]
fn magnitudes_preserved_on_random_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..100 {
        let n = 8 + trial % 250;
        let bins = (0..n).map(|_| Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0))).collect();
        let z = ComplexSpectrum { bins, index: trial };
        let x = compensate_frame(&z, &antisymmetry_mask(n), &PscConfig::default()).unwrap();
        for (xk, zk) in x.bins.iter().zip(&z.bins) {
            assert!((xk.norm() - zk.norm()).abs() <= 4.0 * f64::EPSILON * zk.norm());
        }
    }
}

#[test]
fn lambda_zero_is_identity() {
    let z = ComplexSpectrum {
        bins: (0..16).map(|k| Complex64::new(k as f64 - 3.0, (k * k) as f64 * 0.1)).collect(),
        index: 0,
    };
    let x = compensate_frame(&z, &antisymmetry_mask(16), &PscConfig { lambda: 0.0 }).unwrap();
    assert_eq!(x, z);
}

proptest! {
    #[test]
    fn rms_is_invariant_under_conjugation(parts in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..64)) {
        let z = ComplexSpectrum { bins: parts.iter().map(|&(r, i)| Complex64::new(r, i)).collect(), index: 0 };
        let conj = ComplexSpectrum { bins: z.bins.iter().map(|b| b.conj()).collect(), index: 0 };
        prop_assert!((rms_noise_scalar(&z) - rms_noise_scalar(&conj)).abs() < 1e-12);
    }
}
