//! Transmit QPSK waveforms, jammer waveforms and receiver noise.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{orthonormalize_columns, CMatrix, CVector, C64};
use crate::rng::{complex_gaussian, derive_seed, rng_from_seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Entries `(+-1 +- j) / sqrt(2L)`; every column has unit norm.
    #[default]
    RawQpsk,
    /// Raw QPSK followed by modified Gram-Schmidt, so `X^H X = I`.
    ColumnOrthonormal,
}

/// The `L x M_t` matrix of transmit samples, one column per transmit node.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveformMatrix {
    pub samples: CMatrix,
    pub mode: NormalizationMode,
    /// Number of rank-deficient draws skipped before this one.
    pub redraws: u32,
}

impl WaveformMatrix {
    pub fn snapshots(&self) -> usize {
        self.samples.nrows()
    }

    pub fn num_transmit(&self) -> usize {
        self.samples.ncols()
    }
}

const MAX_REDRAWS: u32 = 16;

pub fn generate_qpsk(
    l: usize,
    m_t: usize,
    mode: NormalizationMode,
    seed: u64,
) -> Result<WaveformMatrix> {
    if l == 0 || m_t == 0 {
        return Err(invalid("waveform dimensions must be positive"));
    }
    if mode == NormalizationMode::ColumnOrthonormal && l < m_t {
        return Err(invalid(format!(
            "cannot orthonormalize {m_t} columns of length {l}"
        )));
    }
    let amp = FRAC_1_SQRT_2 / (l as f64).sqrt();
    for attempt in 0..MAX_REDRAWS {
        let mut rng = rng_from_seed(derive_seed(seed, attempt as u64));
        let mut samples = CMatrix::from_fn(l, m_t, |_, _| {
            let re = if rng.random::<bool>() { amp } else { -amp };
            let im = if rng.random::<bool>() { amp } else { -amp };
            C64::new(re, im)
        });
        if mode == NormalizationMode::ColumnOrthonormal
            && !orthonormalize_columns(&mut samples, 1e-10)
        {
            continue;
        }
        return Ok(WaveformMatrix {
            samples,
            mode,
            redraws: attempt,
        });
    }
    Err(Error::RankDeficient {
        attempts: MAX_REDRAWS,
    })
}

/// White Gaussian jammer samples, one length-`L` vector per pulse.
#[derive(Clone, Debug, PartialEq)]
pub struct JammerWaveform {
    pub pulses: Vec<CVector>,
}

/// Entries are i.i.d. circular Gaussian with variance `1/L`, so each pulse has unit
/// expected energy.
pub fn generate_jammer_waveform(l: usize, n_p: usize, seed: u64) -> JammerWaveform {
    let mut rng = rng_from_seed(seed);
    let var = 1.0 / l as f64;
    let pulses = (0..n_p)
        .map(|_| CVector::from_fn(l, |_, _| complex_gaussian(&mut rng, var)))
        .collect();
    JammerWaveform { pulses }
}

/// Circular Gaussian noise with per-sample variance `variance`.
pub fn generate_noise(l: usize, variance: f64, seed: u64) -> Result<CVector> {
    if !(variance >= 0.0) {
        return Err(invalid("noise variance must be nonnegative"));
    }
    if variance == 0.0 {
        return Ok(CVector::zeros(l));
    }
    let mut rng = rng_from_seed(seed);
    Ok(CVector::from_fn(l, |_, _| {
        complex_gaussian(&mut rng, variance)
    }))
}

/// Per-sample noise variance for an SNR defined against the per-node transmit
/// power. A unit-norm column spread over `L` samples carries `1/L` per sample, so
/// 0 dB means a per-sample noise variance of `1/L`.
pub fn noise_variance_for_snr(snr_db: f64, l: usize) -> f64 {
    10f64.powf(-snr_db / 10.0) / l as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram, inner, norm_sqr};

    #[test]
    fn raw_qpsk_entry_modulus() {
        let x = generate_qpsk(512, 30, NormalizationMode::RawQpsk, 1).unwrap();
        let target = 1.0 / 512f64.sqrt();
        assert!(x.samples.iter().all(|v| (v.norm() - target).abs() < 1e-15));
        for c in x.samples.column_iter() {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_column_unit_norm_both_modes() {
        for mode in [
            NormalizationMode::RawQpsk,
            NormalizationMode::ColumnOrthonormal,
        ] {
            let x = generate_qpsk(16, 1, mode, 5).unwrap();
            assert!((x.samples.column(0).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orthonormal_mode_is_orthonormal() {
        let x = generate_qpsk(64, 30, NormalizationMode::ColumnOrthonormal, 9).unwrap();
        let g = gram(&x.samples);
        let err = (g - CMatrix::identity(30, 30))
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert!(generate_qpsk(10, 20, NormalizationMode::ColumnOrthonormal, 0).is_err());
    }

    #[test]
    fn qpsk_cross_correlation_bound() {
        // Largest |(X^H X)_ij|, i != j, over 100 seeds at L = 512, M_t = 30.
        let mut worst: f64 = 0.0;
        for seed in 0..100 {
            let x = generate_qpsk(512, 30, NormalizationMode::RawQpsk, seed).unwrap();
            let g = gram(&x.samples);
            for i in 0..30 {
                for j in 0..30 {
                    if i != j {
                        worst = worst.max(g[(i, j)].norm());
                    }
                }
            }
        }
        assert!(worst < 0.15, "{worst}");
    }

    #[test]
    fn jammer_energy_normalization() {
        let trials = 100_000;
        let w = generate_jammer_waveform(8, trials, 17);
        let mean = w.pulses.iter().map(norm_sqr).sum::<f64>() / trials as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
        let single = generate_jammer_waveform(1, 50_000, 3);
        let var = single.pulses.iter().map(|p| p[0].norm_sqr()).sum::<f64>() / 50_000.0;
        assert!((var - 1.0).abs() < 0.03);
    }

    #[test]
    fn jammer_uncorrelated_with_qpsk() {
        let l = 512;
        let x = generate_qpsk(l, 1, NormalizationMode::RawQpsk, 4).unwrap();
        let col = x.samples.column(0).clone_owned();
        let w = generate_jammer_waveform(l, 1, 8);
        let c = inner(&col, &w.pulses[0]).norm();
        assert!(c < 3.0 / (l as f64).sqrt(), "{c}");
    }

    #[test]
    fn noise_variance_and_zero() {
        assert!(generate_noise(10, 0.0, 1)
            .unwrap()
            .iter()
            .all(|v| *v == C64::new(0.0, 0.0)));
        let n = generate_noise(1_000_000, 0.3, 2).unwrap();
        let var = norm_sqr(&n) / 1e6;
        assert!((var - 0.3).abs() / 0.3 < 0.01);
        assert!(generate_noise(4, -1.0, 0).is_err());
    }

    #[test]
    fn snr_zero_db_matches_waveform_power() {
        let l = 512;
        let x = generate_qpsk(l, 3, NormalizationMode::RawQpsk, 0).unwrap();
        let per_sample_power = x.samples.column(0).norm_squared() / l as f64;
        assert!((noise_variance_for_snr(0.0, l) - per_sample_power).abs() < 1e-15);
        assert!((noise_variance_for_snr(-40.0, l) * l as f64 - 1e4).abs() < 1e-8);
    }
}
