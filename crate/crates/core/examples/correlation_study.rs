//! How column correlation of the sensing matrix falls with more receive and
//! transmit nodes, and how more pulses separate Doppler hypotheses.

use csmimo::scene::{rad, RadarParams};
use csmimo::sensing::{CorrelationStudy, GridPoint, MeasurementKind, MeasurementReuse};
use csmimo::waveform::NormalizationMode;

fn study(first: GridPoint, second: GridPoint) -> CorrelationStudy {
    CorrelationStudy {
        params: RadarParams::standard(),
        num_transmit: 30,
        num_receive: 1,
        measurements: 30,
        kind: MeasurementKind::Gaussian,
        reuse: MeasurementReuse::PerNode,
        waveform_mode: NormalizationMode::RawQpsk,
        first,
        second,
    }
}

fn main() -> csmimo::Result<()> {
    let seeds = 0..50;
    let a = GridPoint::new(0.0, 0.0);
    let b = GridPoint::new(rad(0.2), 0.0);
    for n_r in [1, 5, 25] {
        let mut s = study(a, b);
        s.num_receive = n_r;
        println!(
            "N_r = {n_r:3}: mean normalized correlation {:.4}",
            s.mean_normalized(seeds.clone())?
        );
    }
    for m_t in [5, 15, 45] {
        let mut s = study(a, b);
        s.num_transmit = m_t;
        println!(
            "M_t = {m_t:3}: mean normalized correlation {:.4}",
            s.mean_normalized(seeds.clone())?
        );
    }
    let doppler = RadarParams::standard().doppler_hz(10.0);
    for n_p in [1, 2, 4, 8] {
        let mut s = study(a, GridPoint::new(0.0, doppler));
        s.params = s.params.with_pulses(n_p);
        println!(
            "N_p = {n_p}: mean auto/cross ratio {:.4}",
            s.mean_auto_cross_ratio(seeds.clone())?
        );
    }
    Ok(())
}
