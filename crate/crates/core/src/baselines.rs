//! Reference estimators on uncompressed snapshots: the matched filter and the
//! Capon and MUSIC spatial spectra.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{cis, CMatrix, CVector, C64};
use crate::scene::{NodePlacement, RadarParams};
use crate::sensing::{block_phase, core_column, AngleDopplerGrid};
use crate::signal::{pulse_phase, ReceivedPulse};
use crate::waveform::WaveformMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    MatchedFilter,
    Capon,
    Music,
}

impl SpectrumMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::MatchedFilter => "matched_filter",
            Self::Capon => "capon",
            Self::Music => "music",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEstimate {
    pub grid: AngleDopplerGrid,
    pub values: Vec<f64>,
    pub method: SpectrumMethod,
}

impl SpectrumEstimate {
    /// Index of the largest value.
    pub fn peak(&self) -> usize {
        (0..self.values.len()).fold(0, |best, i| {
            if self.values[i] > self.values[best] {
                i
            } else {
                best
            }
        })
    }

    /// Indices of the `k` largest values, largest first.
    pub fn top_k(&self, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        idx.truncate(k);
        idx
    }

    /// Complex-vector view of the amplitude spectrum (`sqrt` of power values),
    /// for use with the ratio metrics.
    pub fn amplitudes(&self) -> CVector {
        CVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|v| C64::new(v.sqrt(), 0.0)),
        )
    }
}

fn check_pulses(pulses: &[ReceivedPulse], n_r: usize, n_p: usize, l: usize) -> Result<()> {
    if pulses.is_empty() {
        return Err(invalid("no received pulses"));
    }
    for p in pulses {
        if p.node_index >= n_r || p.pulse_index == 0 || p.pulse_index > n_p {
            return Err(invalid(format!(
                "pulse (node {}, pulse {}) outside the array",
                p.node_index, p.pulse_index
            )));
        }
        if p.snapshots.len() != l {
            return Err(Error::DimensionMismatch {
                context: "received snapshots vs L",
                expected: l,
                found: p.snapshots.len(),
            });
        }
    }
    Ok(())
}

/// Coherent matched filter: `|sum_{l,m} c_lmn^H z_lm|^2 / sum_{l,m} |c_lmn|^2` with
/// `c_lmn` the noiseless response of grid point `n` at node `l`, pulse `m`.
pub fn matched_filter(
    pulses: &[ReceivedPulse],
    params: &RadarParams,
    placement: &NodePlacement,
    waveforms: &WaveformMatrix,
    grid: &AngleDopplerGrid,
) -> Result<SpectrumEstimate> {
    check_pulses(
        pulses,
        placement.num_receive(),
        params.num_pulses,
        waveforms.snapshots(),
    )?;
    let cores: Vec<CVector> = grid
        .points()
        .iter()
        .map(|&p| core_column(params, placement, waveforms, p))
        .collect();
    let core_matrix = CMatrix::from_columns(&cores);
    let z = CMatrix::from_columns(
        &pulses
            .iter()
            .map(|p| p.snapshots.clone())
            .collect::<Vec<_>>(),
    );
    // Correlation of every core column with every pulse: N x (pulses).
    let corr = core_matrix.ad_mul(&z);
    let values = grid
        .points()
        .iter()
        .enumerate()
        .map(|(n, &pt)| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, p) in pulses.iter().enumerate() {
                acc += block_phase(params, placement, p.node_index, p.pulse_index, pt).conj()
                    * corr[(n, j)];
            }
            let energy = cores[n].norm_squared() * pulses.len() as f64;
            if energy > 0.0 {
                acc.norm_sqr() / energy
            } else {
                0.0
            }
        })
        .collect();
    Ok(SpectrumEstimate {
        grid: grid.clone(),
        values,
        method: SpectrumMethod::MatchedFilter,
    })
}

/// Receive-array sample covariance `R = (1 / (L N_p)) sum_{m,n} y_mn y_mn^H`, where
/// `y_mn` stacks sample `n` of pulse `m` across the receive nodes.
pub fn receive_covariance(pulses: &[ReceivedPulse], n_r: usize) -> Result<CMatrix> {
    if pulses.is_empty() {
        return Err(invalid("no received pulses"));
    }
    let l = pulses[0].snapshots.len();
    let n_p = pulses.iter().map(|p| p.pulse_index).max().unwrap_or(1);
    let mut y = CMatrix::zeros(n_r, l * n_p);
    for p in pulses {
        if p.node_index >= n_r || p.pulse_index == 0 || p.snapshots.len() != l {
            return Err(invalid("pulses do not form a consistent receive array"));
        }
        let base = (p.pulse_index - 1) * l;
        for (n, v) in p.snapshots.iter().enumerate() {
            y[(p.node_index, base + n)] = *v;
        }
    }
    Ok(&y * y.adjoint() / C64::new((l * n_p) as f64, 0.0))
}

/// Receive steering `g_l(a) = exp(j 2pi/lambda eta_l(a))`.
pub fn receive_steering(
    placement: &NodePlacement,
    params: &RadarParams,
    azimuth_rad: f64,
) -> CVector {
    let k = 2.0 * PI / params.wavelength_m();
    CVector::from_iterator(
        placement.num_receive(),
        placement
            .receive
            .iter()
            .map(|n| cis(k * n.eta(azimuth_rad))),
    )
}

/// Noise-subspace projector `E_n E_n^H` of a Hermitian covariance.
pub fn noise_projector(r: &CMatrix, num_sources: usize) -> Result<CMatrix> {
    let dim = r.nrows();
    if num_sources >= dim {
        return Err(invalid(format!(
            "MUSIC needs more receive nodes ({dim}) than sources ({num_sources})"
        )));
    }
    let eig = SymmetricEigen::new(r.clone());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let noise: Vec<CVector> = order[..dim - num_sources]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let en = CMatrix::from_columns(&noise);
    Ok(&en * en.adjoint())
}

/// Capon or MUSIC spectrum over the grid from the receive-array covariance
/// built from all `L N_p` snapshots. `diagonal_loading` defaults to
/// `1e-6 Tr(R) / N_r`.
///
/// Capon is the MIMO amplitude estimate: the receive Capon beamformer applied
/// to the outputs matched to the transmit mixture `D(b) X v(a)`, so the
/// transmit steering adds the virtual-array resolution. The value is
/// `|a^H R^-1 w|^2 / (N_p a^H R^-1 a |c|^2)^2` with `c` the mixture and `w` the
/// per-node matched outputs. MUSIC is `1 / (a^H E_n E_n^H a)` on the receive
/// steering `a`, which needs more receive nodes than sources.
pub fn covariance_spectrum(
    pulses: &[ReceivedPulse],
    params: &RadarParams,
    placement: &NodePlacement,
    waveforms: &WaveformMatrix,
    grid: &AngleDopplerGrid,
    method: SpectrumMethod,
    num_sources: usize,
    diagonal_loading: Option<f64>,
) -> Result<SpectrumEstimate> {
    let n_r = placement.num_receive();
    let n_p = params.num_pulses;
    check_pulses(pulses, n_r, n_p, waveforms.snapshots())?;
    let mut r = receive_covariance(pulses, n_r)?;
    let trace: f64 = r.diagonal().iter().map(|v| v.re).sum();
    let load = diagonal_loading.unwrap_or(1e-6 * trace / n_r as f64);
    if !(load >= 0.0) {
        return Err(invalid("diagonal loading must be nonnegative"));
    }
    for i in 0..n_r {
        r[(i, i)] += load;
    }
    let values = match method {
        SpectrumMethod::Capon => {
            let r_inv = r
                .cholesky()
                .ok_or_else(|| Error::Numerical("covariance is not positive definite".into()))?
                .inverse();
            grid.points()
                .iter()
                .map(|&p| {
                    let c = core_column(params, placement, waveforms, p);
                    let a = receive_steering(placement, params, p.azimuth_rad);
                    let mut w = CVector::zeros(n_r);
                    for z in pulses {
                        let l = z.node_index;
                        let pulse = pulse_phase(p.doppler_hz, z.pulse_index, params);
                        w[l] += pulse.conj() * c.dotc(&z.snapshots);
                    }
                    let ra = &r_inv * &a;
                    let den = n_p as f64 * a.dotc(&ra).re * c.norm_squared();
                    if den > 0.0 {
                        (ra.dotc(&w).norm() / den).powi(2)
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        SpectrumMethod::Music => {
            let proj = noise_projector(&r, num_sources)?;
            grid.points()
                .iter()
                .map(|p| {
                    let a = receive_steering(placement, params, p.azimuth_rad);
                    let q = a.dotc(&(&proj * &a)).re;
                    if q > 0.0 {
                        1.0 / q
                    } else {
                        f64::MAX
                    }
                })
                .collect()
        }
        SpectrumMethod::MatchedFilter => {
            return Err(invalid("matched filter is not a covariance method"))
        }
    };
    Ok(SpectrumEstimate {
        grid: grid.clone(),
        values,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{rad, sample_node_placement, Jammer, Scene, Target};
    use crate::signal::synthesize_all;
    use crate::waveform::{
        generate_jammer_waveform, generate_qpsk, noise_variance_for_snr, NormalizationMode,
    };

    fn scene(
        targets: Vec<Target>,
        jammer: Option<Jammer>,
        n_r: usize,
        n_p: usize,
    ) -> (Scene, WaveformMatrix) {
        let params = RadarParams::standard().with_snapshots(256).with_pulses(n_p);
        let placement = sample_node_placement(&params, 10, n_r, 4).unwrap();
        let x = generate_qpsk(256, 10, NormalizationMode::RawQpsk, 2).unwrap();
        (
            Scene {
                params,
                placement,
                targets,
                jammer,
            },
            x,
        )
    }

    #[test]
    fn matched_filter_peaks_at_truth() {
        let grid =
            AngleDopplerGrid::uniform(rad(-3.0), rad(3.0), rad(0.5), 0.0, 4000.0, 1000.0).unwrap();
        let truth = grid.points()[17];
        let params = RadarParams::standard();
        let t = Target::new(
            truth.azimuth_rad,
            params.speed_mps(truth.doppler_hz),
            10_000.0,
            C64::new(1.0, 0.0),
        );
        let (s, x) = scene(vec![t], None, 3, 4);
        let pulses = synthesize_all(&s, &x, None, 0.0, 0).unwrap();
        let mf = matched_filter(&pulses, &s.params, &s.placement, &x, &grid).unwrap();
        assert_eq!(mf.peak(), 17);
        // Global phase rotation of the data leaves the spectrum unchanged.
        let rotated: Vec<ReceivedPulse> = pulses
            .iter()
            .map(|p| ReceivedPulse {
                snapshots: &p.snapshots * cis(1.234),
                ..p.clone()
            })
            .collect();
        let mf2 = matched_filter(&rotated, &s.params, &s.placement, &x, &grid).unwrap();
        for (a, b) in mf.values.iter().zip(&mf2.values) {
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn covariance_methods_find_target_and_jammer() {
        let grid = AngleDopplerGrid::angles(rad(-8.0), rad(8.0), rad(0.2)).unwrap();
        let t = Target::stationary(rad(-2.0));
        let j = Jammer::from_power(rad(7.0), 10_000.0, 4.0).unwrap();
        let (s, x) = scene(vec![t], Some(j), 12, 1);
        let jwf = generate_jammer_waveform(256, 1, 3);
        let pulses =
            synthesize_all(&s, &x, Some(&jwf), noise_variance_for_snr(20.0, 256), 9).unwrap();
        let ti = grid.nearest(rad(-2.0), 0.0);
        let ji = grid.nearest(rad(7.0), 0.0);
        for method in [SpectrumMethod::Capon, SpectrumMethod::Music] {
            let est =
                covariance_spectrum(&pulses, &s.params, &s.placement, &x, &grid, method, 2, None)
                    .unwrap();
            let mut top = est.top_k(2);
            top.sort_unstable();
            assert_eq!(top, vec![ti, ji], "{method:?}");
            assert!(est.values.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
        assert!(covariance_spectrum(
            &pulses,
            &s.params,
            &s.placement,
            &x,
            &grid,
            SpectrumMethod::Music,
            12,
            None
        )
        .is_err());
    }

    #[test]
    fn covariance_is_order_invariant_and_projector_idempotent() {
        let (s, x) = scene(vec![Target::stationary(0.0)], None, 6, 2);
        let pulses = synthesize_all(&s, &x, None, 0.01, 1).unwrap();
        let r = receive_covariance(&pulses, 6).unwrap();
        let mut rev = pulses.clone();
        rev.reverse();
        assert!((receive_covariance(&rev, 6).unwrap() - &r).norm() < 1e-12);
        let p = noise_projector(&r, 1).unwrap();
        assert!((&p * &p - &p).norm() < 1e-10);
        assert!((p.adjoint() - &p).norm() < 1e-12);
    }
}
