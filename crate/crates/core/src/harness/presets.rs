use crate::scene::RadarParams;
use crate::sensing::{MeasurementKind, MeasurementReuse};
use crate::waveform::NormalizationMode;

use super::config::{
    Baseline, GridSpec, JammerSpec, MuSpec, PlacementMode, ScenarioConfig, SolverSettings,
    TargetSpec,
};

/// Every preset name, aliases excluded.
pub const PRESET_NAMES: &[&str] = &[
    "fig2",
    "fig4-beta20",
    "fig4-beta40",
    "fig4-beta60",
    "fig5-nr10",
    "fig5-nr30",
    "fig6-d0.4",
    "fig6-d0.3",
    "fig6-d0.2",
    "fig7-beta20",
    "fig7-beta40",
    "fig7-beta60",
    "fig8-d0.4",
    "fig8-d0.3",
    "fig8-d0.2",
    "fig9",
    "fig11",
    "fig12",
    "fig12-nr10",
    "fig13",
];

const ALIASES: &[(&str, &str)] = &[
    ("fig4", "fig4-beta20"),
    ("fig5", "fig5-nr30"),
    ("fig6", "fig6-d0.4"),
    ("fig7", "fig7-beta20"),
    ("fig8", "fig8-d0.4"),
];

fn pair(d_deg: f64) -> Vec<TargetSpec> {
    vec![
        TargetSpec::new(-d_deg / 2.0, 0.0),
        TargetSpec::new(d_deg / 2.0, 0.0),
    ]
}

/// Two targets `d` apart on a 0.1 deg grid; odd multiples of 0.1 are shifted
/// by half a cell so both stay on grid.
fn spaced_pair(c: &mut ScenarioConfig, d_deg: f64) {
    c.grid.angle_step_deg = 0.1;
    let cells = (d_deg / 0.1).round() as i64;
    let left = -((cells / 2) as f64) * 0.1;
    c.targets = vec![
        TargetSpec::new(left, 0.0),
        TargetSpec::new(left + cells as f64 * 0.1, 0.0),
    ];
}

/// Two stationary targets 0.4 deg apart, jammer at 7 deg, 30 transmitters,
/// 30 modified measurements per node, 0 dB SNR.
fn stationary(name: &str, num_receive: usize, jammer_power: f64, mu: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        radar: RadarParams::standard(),
        num_transmit: 30,
        num_receive,
        measurements: 30,
        grid: GridSpec::angles(-8.0, 8.0, 0.2),
        targets: pair(0.4),
        jammer: Some(JammerSpec {
            azimuth_deg: 7.0,
            range_m: 10_000.0,
            power: jammer_power,
        }),
        snr_db: 0.0,
        mu: MuSpec::Explicit { mu },
        measurement_kind: MeasurementKind::Modified,
        measurement_reuse: MeasurementReuse::PerNode,
        orthonormal_rows: false,
        waveform_mode: NormalizationMode::RawQpsk,
        placement: PlacementMode::Fixed,
        trials: 1000,
        seed: 1,
        baselines: vec![
            Baseline::Capon,
            Baseline::Music,
            Baseline::Apes,
            Baseline::Glrt,
        ],
        detection_threshold: 0.5,
        threshold_sweep: Vec::new(),
        solver: SolverSettings::default(),
        export_spectra: 1,
        output_dir: None,
    }
}

fn moving(
    name: &str,
    num_receive: usize,
    targets: Vec<TargetSpec>,
    angle_step: f64,
    mu: f64,
) -> ScenarioConfig {
    let mut c = stationary(name, num_receive, 400.0, mu);
    c.radar = c.radar.with_pulses(5);
    c.grid = GridSpec {
        angle_start_deg: -8.0,
        angle_stop_deg: 8.0,
        angle_step_deg: angle_step,
        speed_start_mps: 50.0,
        speed_stop_mps: 110.0,
        speed_step_mps: 5.0,
    };
    c.targets = targets;
    c.baselines = vec![Baseline::MatchedFilter];
    c.trials = 50;
    c
}

fn three_movers(angles: [f64; 3], speeds: [f64; 3]) -> Vec<TargetSpec> {
    angles
        .iter()
        .zip(speeds)
        .map(|(&a, v)| TargetSpec::new(a, v))
        .collect()
}

/// Scenario for a preset name or alias; `None` when unknown.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let canonical = ALIASES
        .iter()
        .find(|(a, _)| *a == name)
        .map_or(name, |(_, c)| *c);
    let c = match canonical {
        "fig2" => {
            let mut c = stationary(canonical, 1, 400.0, 26.0);
            c.baselines = vec![Baseline::Capon, Baseline::Apes, Baseline::Glrt];
            c
        }
        "fig4-beta20" => stationary(canonical, 10, 400.0, 120.0),
        "fig4-beta40" => stationary(canonical, 10, 1600.0, 190.0),
        "fig4-beta60" => stationary(canonical, 10, 3600.0, 280.0),
        "fig5-nr10" => stationary(canonical, 10, 3600.0, 280.0),
        "fig5-nr30" => stationary(canonical, 30, 3600.0, 800.0),
        "fig6-d0.4" | "fig6-d0.3" | "fig6-d0.2" => {
            let (d, mu) = match canonical {
                "fig6-d0.4" => (0.4, 280.0),
                "fig6-d0.3" => (0.3, 260.0),
                _ => (0.2, 280.0),
            };
            let mut c = stationary(canonical, 10, 3600.0, mu);
            spaced_pair(&mut c, d);
            c
        }
        "fig7-beta20" | "fig7-beta40" | "fig7-beta60" => {
            let (power, mu) = match canonical {
                "fig7-beta20" => (400.0, 350.0),
                "fig7-beta40" => (1600.0, 440.0),
                _ => (3600.0, 550.0),
            };
            let mut c = stationary(canonical, 20, power, mu);
            c.snr_db = -40.0;
            c
        }
        "fig8-d0.4" | "fig8-d0.3" | "fig8-d0.2" => {
            let d = match canonical {
                "fig8-d0.4" => 0.4,
                "fig8-d0.3" => 0.3,
                _ => 0.2,
            };
            let mut c = stationary(canonical, 20, 400.0, 350.0);
            c.snr_db = -40.0;
            spaced_pair(&mut c, d);
            c
        }
        "fig9" => {
            let mut c = stationary(canonical, 20, 400.0, 350.0);
            c.snr_db = -40.0;
            c.baselines = vec![Baseline::Capon, Baseline::Apes, Baseline::Glrt];
            c.threshold_sweep = (1..=19).map(|i| i as f64 * 0.05).collect();
            c
        }
        "fig11" => {
            let mut c = stationary(canonical, 10, 400.0, 120.0);
            c.targets = [-1.1, -0.3, 0.3, 1.1]
                .iter()
                .map(|&a| TargetSpec::new(a, 0.0))
                .collect();
            c.trials = 200;
            c
        }
        "fig12" => moving(
            canonical,
            1,
            three_movers([-1.0, 0.0, 1.0], [60.0, 70.0, 80.0]),
            0.5,
            10.0,
        ),
        "fig12-nr10" => moving(
            canonical,
            10,
            three_movers([-1.0, 0.0, 1.0], [60.0, 70.0, 80.0]),
            0.5,
            120.0,
        ),
        "fig13" => {
            let mut c = moving(
                canonical,
                1,
                three_movers([-1.1, 0.1, 1.1], [62.5, 72.5, 82.5]),
                0.2,
                10.0,
            );
            c.trials = 10;
            c
        }
        _ => return None,
    };
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESET_NAMES.iter().chain(ALIASES.iter().map(|(a, _)| a)) {
            let c = preset(name).unwrap();
            c.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset("fig99").is_none());
    }

    #[test]
    fn preset_values() {
        let f2 = preset("fig2").unwrap();
        assert_eq!(
            (f2.num_receive, f2.num_transmit, f2.measurements),
            (1, 30, 30)
        );
        assert_eq!(f2.mu, MuSpec::Explicit { mu: 26.0 });
        assert_eq!(f2.jammer.unwrap().power, 400.0);
        let f12 = preset("fig12").unwrap();
        let grid = f12.grid.build(&f12.radar).unwrap();
        assert_eq!(grid.len(), 33 * 13);
    }
}
