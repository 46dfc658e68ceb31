//! Phase spectrum compensation.
//!
//! An anti-symmetric offset `Phi[k] = lambda * psi[k] * D` is added to each
//! bin before taking its angle, while the magnitude is kept. Conjugate pairs
//! are pushed apart in phase by an amount that shrinks as their magnitude
//! grows, so weak (noise-dominated) pairs partially cancel when the real part
//! of the inverse transform is taken, and strong pairs survive nearly intact.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::ComplexSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PscConfig {
    /// Scale of the compensation offset; 0 disables the stage.
    pub lambda: f64,
}

impl Default for PscConfig {
    fn default() -> Self {
        Self { lambda: 3.74 }
    }
}

impl PscConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!("lambda {} must be finite and >= 0", self.lambda)));
        }
        Ok(())
    }
}

/// Real offsets added to each bin; `values[k] == -values[N - k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensationFunction {
    pub values: Vec<f64>,
}

/// `+1` on the lower half of the non-DC bins, `-1` on their mirrors, `0` on
/// DC and (for even `n`) the Nyquist bin.
pub fn antisymmetry_mask(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            // compare 2k against n to avoid rounding in k / n
            if k == 0 || 2 * k == n {
                0.0
            } else if 2 * k < n {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

/// Root-mean-square bin magnitude over the full spectrum.
pub fn rms_noise_scalar(z: &ComplexSpectrum) -> f64 {
    if z.bins.is_empty() {
        return 0.0;
    }
    (z.bins.iter().map(|b| b.norm_sqr()).sum::<f64>() / z.bins.len() as f64).sqrt()
}

pub fn compensation_function(psi: &[f64], dhat: f64, config: &PscConfig) -> CompensationFunction {
    let scale = config.lambda * dhat;
    CompensationFunction { values: psi.iter().map(|p| scale * p).collect() }
}

/// `X[k] = |Z[k]| exp(j arg(Z[k] + Phi[k]))`.
pub fn compensate_phase(z: &ComplexSpectrum, phi: &CompensationFunction) -> Result<ComplexSpectrum> {
    if z.len() != phi.values.len() {
        return Err(Error::LengthMismatch { expected: z.len(), actual: phi.values.len() });
    }
    let bins = z
        .bins
        .iter()
        .zip(&phi.values)
        .map(|(&zk, &offset)| {
            if offset == 0.0 {
                return zk;
            }
            let shifted = zk + offset;
            Complex64::from_polar(zk.norm(), shifted.im.atan2(shifted.re))
        })
        .collect();
    Ok(ComplexSpectrum { bins, index: z.index })
}

/// Full compensation of one frame with the mask for its length.
pub fn compensate_frame(z: &ComplexSpectrum, psi: &[f64], config: &PscConfig) -> Result<ComplexSpectrum> {
    let phi = compensation_function(psi, rms_noise_scalar(z), config);
    compensate_phase(z, &phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_shapes() {
        assert_eq!(antisymmetry_mask(8), vec![0.0, 1.0, 1.0, 1.0, 0.0, -1.0, -1.0, -1.0]);
        assert_eq!(antisymmetry_mask(2), vec![0.0, 0.0]);
        assert_eq!(antisymmetry_mask(5), vec![0.0, 1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn rms_values() {
        let two = ComplexSpectrum { bins: vec![Complex64::new(0.0, 2.0); 6], index: 0 };
        assert!((rms_noise_scalar(&two) - 2.0).abs() < 1e-15);
        assert_eq!(rms_noise_scalar(&ComplexSpectrum::zeros(6, 0)), 0.0);
        let pair = ComplexSpectrum { bins: vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)], index: 0 };
        assert!((rms_noise_scalar(&pair) - 12.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn compensation_values() {
        let psi = antisymmetry_mask(8);
        let phi = compensation_function(&psi, 2.0, &PscConfig { lambda: 1.0 });
        assert_eq!(phi.values, vec![0.0, 2.0, 2.0, 2.0, 0.0, -2.0, -2.0, -2.0]);
        let off = compensation_function(&psi, 2.0, &PscConfig { lambda: 0.0 });
        assert!(off.values.iter().all(|&v| v == 0.0));
        let none = compensation_function(&psi, 0.0, &PscConfig::default());
        assert!(none.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn phase_compensation_cases() {
        let z = ComplexSpectrum {
            bins: vec![Complex64::new(10.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.3, -0.7)],
            index: 2,
        };
        let zero = CompensationFunction { values: vec![0.0; 3] };
        assert_eq!(compensate_phase(&z, &zero).unwrap(), z);

        let phi = CompensationFunction { values: vec![1.0, 10.0, 0.0] };
        let x = compensate_phase(&z, &phi).unwrap();
        assert!((x.bins[0] - Complex64::new(10.0, 0.0)).norm() < 1e-15);
        let angle = 1.0f64.atan2(10.0);
        assert!((angle - 0.09967).abs() < 1e-5);
        assert!((x.bins[1] - Complex64::from_polar(1.0, angle)).norm() < 1e-15);
        assert_eq!(x.index, 2);

        assert!(compensate_phase(&z, &CompensationFunction { values: vec![0.0; 2] }).is_err());
    }

    #[test]
    fn zero_bin_stays_zero() {
        let z = ComplexSpectrum::zeros(4, 0);
        let phi = CompensationFunction { values: vec![0.0, 5.0, 0.0, -5.0] };
        let x = compensate_phase(&z, &phi).unwrap();
        assert!(x.bins.iter().all(|b| b.norm() == 0.0));
    }
}
