//! Random node placement on the disk, steering vectors and the unambiguous
//! speed span of the pulse train.

use csmimo::scene::{rad, sample_node_placement, steering_vector, RadarParams};
use csmimo::sensing::unambiguous_speed_span;

fn main() -> csmimo::Result<()> {
    let params = RadarParams::standard();
    let placement = sample_node_placement(&params, 8, 4, 7)?;
    println!(
        "wavelength {:.4} m, disk radius {} m, L = {}, N_p = {}",
        params.wavelength_m(),
        params.disk_radius_m,
        params.snapshots_per_pulse,
        params.num_pulses
    );
    for (i, node) in placement.transmit.iter().enumerate() {
        println!(
            "tx {i}: rho = {:7.2} m, psi = {:6.3} rad",
            node.radius_m, node.angle_rad
        );
    }

    let a = steering_vector(&placement, &params, rad(0.0));
    let b = steering_vector(&placement, &params, rad(0.2));
    let corr = (a.dotc(&b)).norm() / (a.norm() * b.norm());
    println!("transmit steering correlation between 0 and 0.2 deg: {corr:.4}");

    println!(
        "unambiguous speed span: {:.2} m/s",
        unambiguous_speed_span(&params)
    );
    println!("Doppler of 70 m/s: {:.1} Hz", params.doppler_hz(70.0));
    Ok(())
}
