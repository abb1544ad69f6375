//! End-to-end recovery of two stationary targets next to a strong jammer,
//! assembled from the individual building blocks.

use csmimo::scene::{deg, rad, sample_node_placement, Jammer, RadarParams, Scene, Target};
use csmimo::sensing::{
    build_sensing_problem, AngleDopplerGrid, MeasurementKind, MeasurementReuse, MeasurementSet,
};
use csmimo::signal::synthesize_all;
use csmimo::solver::{effective_noise_variance, mu_bounds, solve_dantzig, top_k, DantzigConfig};
use csmimo::waveform::{
    generate_jammer_waveform, generate_qpsk, noise_variance_for_snr, NormalizationMode,
};

fn main() -> csmimo::Result<()> {
    let params = RadarParams::standard();
    let (m_t, n_r, m) = (30, 1, 30);
    let placement = sample_node_placement(&params, m_t, n_r, 1)?;
    let x = generate_qpsk(
        params.snapshots_per_pulse,
        m_t,
        NormalizationMode::RawQpsk,
        2,
    )?;

    let scene = Scene {
        params,
        placement: placement.clone(),
        targets: vec![Target::stationary(rad(-0.2)), Target::stationary(rad(0.2))],
        jammer: Some(Jammer::from_power(rad(7.0), 10_000.0, 400.0)?),
    };
    let jammer_wf = generate_jammer_waveform(params.snapshots_per_pulse, params.num_pulses, 3);
    let sigma2 = noise_variance_for_snr(0.0, params.snapshots_per_pulse);
    let pulses = synthesize_all(&scene, &x, Some(&jammer_wf), sigma2, 4)?;

    let ms = MeasurementSet::generate(
        MeasurementKind::Modified,
        m,
        &x,
        n_r,
        params.num_pulses,
        MeasurementReuse::PerNode,
        false,
        5,
    )?;
    let grid = AngleDopplerGrid::angles(rad(-8.0), rad(8.0), rad(0.2))?;
    let problem = build_sensing_problem(&params, &placement, &x, &grid, &ms, &pulses)?;

    let (lower, upper) = mu_bounds(&problem, effective_noise_variance(&problem, sigma2))?;
    println!("mu bounds: [{lower:.2}, {upper:.2}]");

    let result = solve_dantzig(&problem, &DantzigConfig::explicit(26.0))?;
    println!(
        "status {:?} after {} iterations, |s|_1 = {:.4}, residual {:.3} <= mu {}",
        result.status, result.iterations, result.objective, result.residual_inf_norm, result.mu
    );
    for i in top_k(&result.estimate, 3) {
        let a = result.estimate[i];
        println!(
            "peak at {:6.2} deg: |s| = {:.4}",
            deg(grid.points()[i].azimuth_rad),
            a.norm()
        );
    }
    let jammer_cell = grid.nearest(rad(7.0), 0.0);
    println!(
        "estimate at the jammer angle: {:.2e}",
        result.estimate[jammer_cell].norm()
    );
    Ok(())
}
