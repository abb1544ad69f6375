use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{cis, C64};
use crate::rng::{derive_seed, rng_from_seed};
use crate::scene::{sample_disk_point, sample_node_placement, Jammer, RadarParams, Scene, Target};
use crate::sensing::{MeasurementKind, MeasurementReuse, MeasurementSet};
use crate::signal::synthesize_all;
use crate::waveform::{generate_jammer_waveform, generate_qpsk, NormalizationMode};

use super::bessel::jinc;

/// `2 J_1(x pi r / lambda) / (x pi r / lambda)`.
pub fn varsigma(x: f64, params: &RadarParams) -> f64 {
    jinc(x * PI * params.disk_radius_m / params.wavelength_m())
}

/// Cross-target term `sum_{k != k'} beta_k^* beta_k' exp(j 4pi/lambda (d_k - d_k')) varsigma_kk'^2`
/// with `varsigma_kk' = varsigma(4 sin((theta_k' - theta_k) / 2))`.
pub fn phi(targets: &[Target], params: &RadarParams) -> f64 {
    let k4 = 4.0 * PI / params.wavelength_m();
    let mut acc = C64::new(0.0, 0.0);
    for (i, a) in targets.iter().enumerate() {
        for (j, b) in targets.iter().enumerate() {
            if i == j {
                continue;
            }
            let s = varsigma(4.0 * ((b.azimuth_rad - a.azimuth_rad) / 2.0).sin(), params);
            acc += a.reflectivity.conj()
                * b.reflectivity
                * cis(k4 * (a.initial_range_m - b.initial_range_m))
                * (s * s);
        }
    }
    acc.re
}

/// Inputs of the closed-form signal-to-jammer analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SjrInputs {
    pub params: RadarParams,
    pub targets: Vec<Target>,
    pub jammer: Jammer,
    pub num_transmit: usize,
    pub measurements: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SjrReport {
    pub analytic_standard: f64,
    pub analytic_modified: f64,
    pub empirical: Option<f64>,
    /// Compressed signal power per node for the requested kind.
    pub signal_power: f64,
    /// Compressed jammer power per node, `N_p |beta|^2 M / L`.
    pub jammer_power: f64,
    pub phi: f64,
}

/// Closed-form SJR per receive node. Standard: `M_t (sum |beta_k|^2 + phi) / |beta|^2`;
/// modified: `L (sum |beta_k|^2 + phi) / |beta|^2`.
pub fn analytic_sjr(inputs: &SjrInputs, kind: MeasurementKind) -> SjrReport {
    let p = &inputs.params;
    let l = p.snapshots_per_pulse as f64;
    let m = inputs.measurements as f64;
    let m_t = inputs.num_transmit as f64;
    let n_p = p.num_pulses as f64;
    let ph = phi(&inputs.targets, p);
    let energy = inputs
        .targets
        .iter()
        .map(|t| t.reflectivity.norm_sqr())
        .sum::<f64>()
        + ph;
    let jp = inputs.jammer.power();
    let ratio = |gain: f64| {
        if jp > 0.0 {
            gain * energy / jp
        } else {
            f64::INFINITY
        }
    };
    let signal_power = match kind {
        MeasurementKind::Gaussian => n_p * m * m_t / l * energy,
        MeasurementKind::Modified => n_p * m * energy,
    };
    SjrReport {
        analytic_standard: ratio(m_t),
        analytic_modified: ratio(l),
        empirical: None,
        signal_power,
        jammer_power: n_p * jp * m / l,
        phi: ph,
    }
}

/// Ratio of mean signal power to mean jammer power over trials.
pub fn sjr_from_powers(signal: &[f64], jammer: &[f64]) -> Result<f64> {
    if signal.is_empty() || jammer.is_empty() {
        return Err(invalid("empirical SJR needs at least one trial"));
    }
    let ps = signal.iter().sum::<f64>() / signal.len() as f64;
    let pj = jammer.iter().sum::<f64>() / jammer.len() as f64;
    Ok(if pj > 0.0 { ps / pj } else { f64::INFINITY })
}

/// Monte Carlo over placements, waveforms and measurement matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSjrConfig {
    pub params: RadarParams,
    pub num_transmit: usize,
    pub num_receive: usize,
    pub measurements: usize,
    pub kind: MeasurementKind,
    pub waveform_mode: NormalizationMode,
    pub targets: Vec<Target>,
    pub jammer: Option<Jammer>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSjr {
    /// Mean compressed signal power per node.
    pub signal_power: f64,
    /// Mean compressed jammer power per node.
    pub jammer_power: f64,
    pub sjr: f64,
    pub trials: usize,
}

/// Compressed signal-only and jammer-only powers, synthesized noiselessly and
/// averaged over nodes and trials.
pub fn empirical_sjr(cfg: &EmpiricalSjrConfig) -> Result<EmpiricalSjr> {
    if cfg.trials == 0 {
        return Err(invalid("empirical SJR needs at least one trial"));
    }
    let p = cfg.params;
    let l = p.snapshots_per_pulse;
    let mut signal = Vec::with_capacity(cfg.trials);
    let mut jammer = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let s = derive_seed(cfg.seed, trial as u64);
        let placement =
            sample_node_placement(&p, cfg.num_transmit, cfg.num_receive, derive_seed(s, 0))?;
        let x = generate_qpsk(l, cfg.num_transmit, cfg.waveform_mode, derive_seed(s, 1))?;
        let jwf = generate_jammer_waveform(l, p.num_pulses, derive_seed(s, 2));
        let ms = MeasurementSet::generate(
            cfg.kind,
            cfg.measurements,
            &x,
            cfg.num_receive,
            p.num_pulses,
            MeasurementReuse::PerNode,
            false,
            derive_seed(s, 3),
        )?;
        let power = |scene: &Scene| -> Result<f64> {
            let pulses = synthesize_all(scene, &x, Some(&jwf), 0.0, 0)?;
            Ok(pulses
                .iter()
                .map(|z| {
                    (&ms.get(z.node_index, z.pulse_index).matrix * &z.snapshots).norm_squared()
                })
                .sum::<f64>()
                / cfg.num_receive as f64)
        };
        let signal_scene = Scene {
            params: p,
            placement: placement.clone(),
            targets: cfg.targets.clone(),
            jammer: None,
        };
        signal.push(power(&signal_scene)?);
        let jammer_scene = Scene {
            params: p,
            placement,
            targets: Vec::new(),
            jammer: cfg.jammer,
        };
        jammer.push(power(&jammer_scene)?);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(EmpiricalSjr {
        signal_power: mean(&signal),
        jammer_power: mean(&jammer),
        sjr: sjr_from_powers(&signal, &jammer)?,
        trials: cfg.trials,
    })
}

/// Monte Carlo `Re E{exp(j alpha h)}` with `h = (rho / r) sin(psi - psi_0)` for
/// points uniform on a disk of radius `r`, against `2 J_1(alpha) / alpha`.
pub fn bessel_expectation_check(alpha: f64, num_samples: usize, seed: u64) -> Result<(f64, f64)> {
    if num_samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let mut rng = rng_from_seed(seed);
    let psi0 = 0.3;
    let mut acc = 0.0;
    for _ in 0..num_samples {
        let node = sample_disk_point(&mut rng, 1.0);
        let h = node.radius_m * (node.angle_rad - psi0).sin();
        acc += (alpha * h).cos();
    }
    Ok((acc / num_samples as f64, jinc(alpha)))
}
