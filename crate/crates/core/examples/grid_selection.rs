//! Picks the coarsest angle grid whose half-step column correlation stays
//! above a threshold.

use csmimo::scene::{deg, rad, sample_node_placement, RadarParams};
use csmimo::sensing::{
    half_step_correlation, select_grid_step, GridRegion, MeasurementKind, MeasurementReuse,
    MeasurementSet, SensingOperator,
};
use csmimo::waveform::{generate_qpsk, NormalizationMode};

fn main() -> csmimo::Result<()> {
    let params = RadarParams::standard();
    let (m_t, n_r, m) = (30, 10, 30);
    let placement = sample_node_placement(&params, m_t, n_r, 1)?;
    let x = generate_qpsk(
        params.snapshots_per_pulse,
        m_t,
        NormalizationMode::RawQpsk,
        2,
    )?;
    let ms = MeasurementSet::generate(
        MeasurementKind::Modified,
        m,
        &x,
        n_r,
        params.num_pulses,
        MeasurementReuse::PerNode,
        false,
        3,
    )?;
    let op = SensingOperator::new(&params, &placement, &x, &ms)?;

    let region = GridRegion::stationary(rad(-8.0), rad(8.0));
    let steps = [1.0, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.02];
    for &d in &steps {
        let c = half_step_correlation(&op, &region, rad(d), 0.0)?;
        println!("step {d:4.2} deg: mean half-step correlation {c:.4}");
    }
    let candidates: Vec<(f64, f64)> = steps.iter().map(|&d| (rad(d), 0.0)).collect();
    for threshold in [0.5, 0.7, 0.9] {
        match select_grid_step(&op, &region, &candidates, threshold) {
            Ok(sel) => println!(
                "threshold {threshold}: step {:.2} deg",
                deg(sel.angle_step_rad)
            ),
            Err(e) => println!("threshold {threshold}: {e}"),
        }
    }
    Ok(())
}
