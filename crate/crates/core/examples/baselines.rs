//! Capon and MUSIC spatial spectra and the matched filter on uncompressed
//! snapshots of the same scene.

use csmimo::baselines::{covariance_spectrum, matched_filter, SpectrumMethod};
use csmimo::scene::{deg, rad, sample_node_placement, Jammer, RadarParams, Scene, Target};
use csmimo::sensing::AngleDopplerGrid;
use csmimo::signal::synthesize_all;
use csmimo::waveform::{
    generate_jammer_waveform, generate_qpsk, noise_variance_for_snr, NormalizationMode,
};

fn main() -> csmimo::Result<()> {
    let params = RadarParams::standard();
    let placement = sample_node_placement(&params, 30, 10, 1)?;
    let x = generate_qpsk(
        params.snapshots_per_pulse,
        30,
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
    let pulses = synthesize_all(
        &scene,
        &x,
        Some(&jammer_wf),
        noise_variance_for_snr(0.0, params.snapshots_per_pulse),
        4,
    )?;
    let grid = AngleDopplerGrid::angles(rad(-8.0), rad(8.0), rad(0.2))?;

    let estimates = [
        matched_filter(&pulses, &params, &placement, &x, &grid)?,
        covariance_spectrum(
            &pulses,
            &params,
            &placement,
            &x,
            &grid,
            SpectrumMethod::Capon,
            3,
            None,
        )?,
        covariance_spectrum(
            &pulses,
            &params,
            &placement,
            &x,
            &grid,
            SpectrumMethod::Music,
            3,
            None,
        )?,
    ];
    for e in &estimates {
        let peaks: Vec<String> = e
            .top_k(3)
            .into_iter()
            .map(|i| format!("{:.1}", deg(grid.points()[i].azimuth_rad)))
            .collect();
        println!(
            "{:>14}: strongest peaks at {} deg",
            e.method.name(),
            peaks.join(", ")
        );
    }
    Ok(())
}
