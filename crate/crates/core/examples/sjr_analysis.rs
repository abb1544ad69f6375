//! Closed-form signal-to-jammer ratio for the standard and modified
//! measurement matrices, checked by Monte Carlo.

use csmimo::metrics::{analytic_sjr, empirical_sjr, EmpiricalSjrConfig, SjrInputs};
use csmimo::scene::{rad, Jammer, RadarParams, Target};
use csmimo::sensing::MeasurementKind;
use csmimo::waveform::NormalizationMode;

fn main() -> csmimo::Result<()> {
    let params = RadarParams::standard();
    let targets = vec![Target::stationary(rad(-0.2)), Target::stationary(rad(0.2))];
    let jammer = Jammer::from_power(rad(7.0), 10_000.0, 400.0)?;
    let inputs = SjrInputs {
        params,
        targets: targets.clone(),
        jammer,
        num_transmit: 30,
        measurements: 30,
    };
    for kind in [MeasurementKind::Gaussian, MeasurementKind::Modified] {
        let analytic = analytic_sjr(&inputs, kind);
        let empirical = empirical_sjr(&EmpiricalSjrConfig {
            params,
            num_transmit: 30,
            num_receive: 1,
            measurements: 30,
            kind,
            waveform_mode: NormalizationMode::ColumnOrthonormal,
            targets: targets.clone(),
            jammer: Some(jammer),
            trials: 300,
            seed: 9,
        })?;
        let predicted = match kind {
            MeasurementKind::Gaussian => analytic.analytic_standard,
            MeasurementKind::Modified => analytic.analytic_modified,
        };
        println!(
            "{kind:?}: analytic SJR {:.2} dB, empirical {:.2} dB (signal {:.2}, jammer {:.2})",
            10.0 * predicted.log10(),
            10.0 * empirical.sjr.log10(),
            empirical.signal_power,
            empirical.jammer_power
        );
    }
    println!(
        "expected gain L / M_t = {:.2} dB",
        10.0 * (512.0f64 / 30.0).log10()
    );
    Ok(())
}
