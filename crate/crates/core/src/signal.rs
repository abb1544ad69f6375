//! Received baseband snapshots: targets, jammer and thermal noise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{cis, CMatrix, CVector, C64};
use crate::rng::derive_seed;
use crate::scene::{receive_phase, steering_vector, RadarParams, Scene, Target};
use crate::sensing::AngleDopplerGrid;
use crate::waveform::{generate_noise, JammerWaveform, WaveformMatrix};

/// Diagonal intra-pulse Doppler progression `diag(exp(j 2 pi f n T_s))`, `n = 0..L-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DopplerMatrix {
    pub diagonal: CVector,
}

impl DopplerMatrix {
    pub fn new(doppler_hz: f64, l: usize, sample_period_s: f64) -> Self {
        let w = 2.0 * PI * doppler_hz * sample_period_s;
        Self {
            diagonal: CVector::from_fn(l, |n, _| cis(w * n as f64)),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.diagonal)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        self.diagonal.component_mul(v)
    }
}

/// Inter-pulse Doppler phase `exp(j 2 pi f (m - 1) T)` for 1-based pulse `m`.
pub fn pulse_phase(doppler_hz: f64, pulse_index: usize, params: &RadarParams) -> C64 {
    cis(2.0 * PI * doppler_hz * (pulse_index as f64 - 1.0) * params.pulse_repetition_s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedPulse {
    /// Receive node `l`, 0-based.
    pub node_index: usize,
    /// Pulse `m`, 1-based.
    pub pulse_index: usize,
    pub snapshots: CVector,
}

/// Sparse ground truth over a grid: `gamma_k` at occupied points, zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthVector {
    pub values: Vec<C64>,
    pub support: Vec<usize>,
}

impl GroundTruthVector {
    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.values)
    }
}

/// Maps targets onto grid points that lie within `angle_tol` / `doppler_tol`.
/// Off-grid targets do not contribute to the vector.
pub fn ground_truth(
    targets: &[Target],
    grid: &AngleDopplerGrid,
    params: &RadarParams,
    angle_tol: f64,
    doppler_tol: f64,
) -> GroundTruthVector {
    let mut values = vec![C64::new(0.0, 0.0); grid.len()];
    let mut support = Vec::new();
    for t in targets {
        if let Some(i) = grid.find(t.azimuth_rad, t.doppler_hz(params), angle_tol, doppler_tol) {
            values[i] += t.gamma(params);
            if !support.contains(&i) {
                support.push(i);
            }
        }
    }
    support.sort_unstable();
    GroundTruthVector { values, support }
}

/// `X v(theta)` for the given transmit geometry.
pub fn transmit_mixture(scene: &Scene, waveforms: &WaveformMatrix, azimuth_rad: f64) -> CVector {
    &waveforms.samples * steering_vector(&scene.placement, &scene.params, azimuth_rad)
}

fn check_dims(scene: &Scene, waveforms: &WaveformMatrix, node: usize, pulse: usize) -> Result<()> {
    let p = &scene.params;
    if waveforms.num_transmit() != scene.placement.num_transmit() {
        return Err(Error::DimensionMismatch {
            context: "waveform columns vs transmit nodes",
            expected: scene.placement.num_transmit(),
            found: waveforms.num_transmit(),
        });
    }
    if waveforms.snapshots() != p.snapshots_per_pulse {
        return Err(Error::DimensionMismatch {
            context: "waveform rows vs snapshots per pulse",
            expected: p.snapshots_per_pulse,
            found: waveforms.snapshots(),
        });
    }
    if node >= scene.placement.num_receive() {
        return Err(invalid(format!("receive node {node} out of range")));
    }
    if pulse == 0 || pulse > p.num_pulses {
        return Err(invalid(format!(
            "pulse index {pulse} outside 1..={}",
            p.num_pulses
        )));
    }
    Ok(())
}

/// Received samples `z_lm` at node `l` during pulse `m` (1-based):
/// the target sum, the jammer term (when the scene has a jammer) and noise with
/// per-sample variance `noise_variance`.
pub fn synthesize_received(
    scene: &Scene,
    waveforms: &WaveformMatrix,
    jammer_wf: Option<&JammerWaveform>,
    noise_variance: f64,
    node_index: usize,
    pulse_index: usize,
    seed: u64,
) -> Result<ReceivedPulse> {
    check_dims(scene, waveforms, node_index, pulse_index)?;
    let p = &scene.params;
    let l = p.snapshots_per_pulse;
    let mut z = CVector::zeros(l);
    for t in &scene.targets {
        let f = t.doppler_hz(p);
        let scale = t.gamma(p)
            * receive_phase(&scene.placement, p, node_index, t.azimuth_rad)
            * pulse_phase(f, pulse_index, p);
        let col = DopplerMatrix::new(f, l, p.sample_period_s).apply(&transmit_mixture(
            scene,
            waveforms,
            t.azimuth_rad,
        ));
        z.axpy(scale, &col, C64::new(1.0, 0.0));
    }
    if let Some(j) = &scene.jammer {
        let wf = jammer_wf
            .ok_or_else(|| invalid("scene has a jammer but no jammer waveform was supplied"))?;
        let x = wf
            .pulses
            .get(pulse_index - 1)
            .ok_or_else(|| invalid("jammer waveform has too few pulses"))?;
        if x.len() != l {
            return Err(Error::DimensionMismatch {
                context: "jammer waveform length",
                expected: l,
                found: x.len(),
            });
        }
        let k = 2.0 * PI / p.wavelength_m();
        let eta = scene.placement.receive[node_index].eta(j.azimuth_rad);
        let scale = j.amplitude * cis(-k * (j.range_m - eta));
        z.axpy(scale, x, C64::new(1.0, 0.0));
    }
    if noise_variance > 0.0 {
        z += generate_noise(l, noise_variance, seed)?;
    }
    Ok(ReceivedPulse {
        node_index,
        pulse_index,
        snapshots: z,
    })
}

/// All `N_r * N_p` pulses ordered with the node index outer and the pulse index
/// inner. Noise for `(l, m)` uses a seed derived from `seed`.
pub fn synthesize_all(
    scene: &Scene,
    waveforms: &WaveformMatrix,
    jammer_wf: Option<&JammerWaveform>,
    noise_variance: f64,
    seed: u64,
) -> Result<Vec<ReceivedPulse>> {
    let n_p = scene.params.num_pulses;
    let mut out = Vec::with_capacity(scene.placement.num_receive() * n_p);
    for l in 0..scene.placement.num_receive() {
        for m in 1..=n_p {
            let s = derive_seed(seed, (l * n_p + m) as u64);
            out.push(synthesize_received(
                scene,
                waveforms,
                jammer_wf,
                noise_variance,
                l,
                m,
                s,
            )?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{rad, sample_node_placement, Jammer};
    use crate::waveform::{generate_jammer_waveform, generate_qpsk, NormalizationMode};

    fn scene(targets: Vec<Target>, jammer: Option<Jammer>) -> (Scene, WaveformMatrix) {
        let params = RadarParams::standard().with_snapshots(64).with_pulses(3);
        let placement = sample_node_placement(&params, 6, 3, 5).unwrap();
        let x = generate_qpsk(64, 6, NormalizationMode::RawQpsk, 1).unwrap();
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
    fn doppler_matrix_properties() {
        let d0 = DopplerMatrix::new(0.0, 8, 1e-6);
        assert_eq!(d0.to_dense(), CMatrix::identity(8, 8));
        let d = DopplerMatrix::new(1234.5, 8, 1e-6).to_dense();
        assert!((d.adjoint() * &d - CMatrix::identity(8, 8)).norm() < 1e-12);
        let l = 16;
        let ts = 1e-6;
        let half = DopplerMatrix::new(1.0 / (l as f64 * ts), l, ts);
        assert!((half.diagonal[l / 2] - C64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn empty_scene_is_silent() {
        let (s, x) = scene(vec![], None);
        let z = synthesize_received(&s, &x, None, 0.0, 0, 1, 0).unwrap();
        assert!(z.snapshots.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn superposition_is_linear() {
        let a = Target::new(rad(1.0), 30.0, 9_000.0, C64::new(0.7, 0.2));
        let b = Target::new(rad(-2.0), -10.0, 12_000.0, C64::new(-0.3, 1.1));
        let (sa, x) = scene(vec![a], None);
        let (sb, _) = scene(vec![b], None);
        let (sab, _) = scene(vec![a, b], None);
        for (l, m) in [(0, 1), (2, 3)] {
            let za = synthesize_received(&sa, &x, None, 0.0, l, m, 0)
                .unwrap()
                .snapshots;
            let zb = synthesize_received(&sb, &x, None, 0.0, l, m, 0)
                .unwrap()
                .snapshots;
            let zab = synthesize_received(&sab, &x, None, 0.0, l, m, 0)
                .unwrap()
                .snapshots;
            assert!((zab - za - zb).norm() < 1e-12);
        }
    }

    #[test]
    fn jammer_requires_waveform_and_dims_checked() {
        let j = Jammer::from_power(rad(7.0), 10_000.0, 400.0).unwrap();
        let (s, x) = scene(vec![], Some(j));
        assert!(synthesize_received(&s, &x, None, 0.0, 0, 1, 0).is_err());
        let wf = generate_jammer_waveform(64, 3, 2);
        let z = synthesize_received(&s, &x, Some(&wf), 0.0, 0, 1, 0).unwrap();
        assert!((z.snapshots.norm_squared() - 400.0 * wf.pulses[0].norm_squared()).abs() < 1e-9);
        let wrong = generate_qpsk(64, 5, NormalizationMode::RawQpsk, 1).unwrap();
        assert!(synthesize_received(&s, &wrong, Some(&wf), 0.0, 0, 1, 0).is_err());
        assert!(synthesize_received(&s, &x, Some(&wf), 0.0, 0, 4, 0).is_err());
    }

    #[test]
    fn ground_truth_on_grid() {
        let params = RadarParams::standard();
        let grid = AngleDopplerGrid::angles(rad(-8.0), rad(8.0), rad(0.2)).unwrap();
        let targets = [
            Target::stationary(rad(0.2)),
            Target::stationary(rad(-0.2)),
            Target::stationary(rad(0.1)),
        ];
        let gt = ground_truth(&targets, &grid, &params, rad(0.01), 1.0);
        assert_eq!(gt.support, vec![39, 41]);
        assert!((gt.values[41] - targets[0].gamma(&params)).norm() < 1e-15);
    }
}
