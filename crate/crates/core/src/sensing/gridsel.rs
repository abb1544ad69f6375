use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::{normalized_correlation, AngleDopplerGrid, GridPoint, SensingOperator};

/// Angle-Doppler region over which a grid step is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRegion {
    pub angle_start_rad: f64,
    pub angle_stop_rad: f64,
    pub doppler_start_hz: f64,
    pub doppler_stop_hz: f64,
}

impl GridRegion {
    pub fn stationary(angle_start_rad: f64, angle_stop_rad: f64) -> Self {
        Self {
            angle_start_rad,
            angle_stop_rad,
            doppler_start_hz: 0.0,
            doppler_stop_hz: 0.0,
        }
    }

    fn has_doppler_axis(&self) -> bool {
        self.doppler_start_hz != self.doppler_stop_hz
    }

    pub fn grid(&self, angle_step: f64, doppler_step: f64) -> Result<AngleDopplerGrid> {
        AngleDopplerGrid::uniform(
            self.angle_start_rad,
            self.angle_stop_rad,
            angle_step,
            self.doppler_start_hz,
            self.doppler_stop_hz,
            doppler_step,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepScore {
    pub angle_step_rad: f64,
    pub doppler_step_hz: f64,
    pub average_correlation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridStepSelection {
    pub angle_step_rad: f64,
    pub doppler_step_hz: f64,
    /// Scores of every candidate evaluated, coarsest first.
    pub scores: Vec<StepScore>,
}

/// Average normalized correlation between each grid column and the column of a
/// hypothesis half a step away on every axis.
pub fn half_step_correlation(
    op: &SensingOperator<'_>,
    region: &GridRegion,
    angle_step: f64,
    doppler_step: f64,
) -> Result<f64> {
    let grid = region.grid(angle_step, doppler_step)?;
    let db = if region.has_doppler_axis() {
        doppler_step / 2.0
    } else {
        0.0
    };
    let total: f64 = grid
        .points()
        .iter()
        .map(|p| {
            let shifted = GridPoint::new(p.azimuth_rad + angle_step / 2.0, p.doppler_hz + db);
            normalized_correlation(&op.column(*p), &op.column(shifted))
        })
        .sum();
    Ok(total / grid.len() as f64)
}

/// Scans `candidates` coarsest-first and returns the first (largest) step whose
/// half-step correlation reaches `threshold`.
pub fn select_grid_step(
    op: &SensingOperator<'_>,
    region: &GridRegion,
    candidates: &[(f64, f64)],
    threshold: f64,
) -> Result<GridStepSelection> {
    if candidates.is_empty() {
        return Err(invalid("no candidate grid steps"));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(invalid(format!("threshold {threshold} outside [0, 1]")));
    }
    if candidates
        .windows(2)
        .any(|w| w[1].0 > w[0].0 || w[1].1 > w[0].1)
    {
        return Err(invalid(
            "candidate steps must be sorted from coarsest to finest",
        ));
    }
    let mut scores = Vec::new();
    for &(da, db) in candidates {
        let avg = half_step_correlation(op, region, da, db)?;
        scores.push(StepScore {
            angle_step_rad: da,
            doppler_step_hz: db,
            average_correlation: avg,
        });
        if avg >= threshold {
            return Ok(GridStepSelection {
                angle_step_rad: da,
                doppler_step_hz: db,
                scores,
            });
        }
    }
    Err(Error::NoFeasibleStep { threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{rad, sample_node_placement, RadarParams};
    use crate::sensing::{MeasurementKind, MeasurementReuse, MeasurementSet};
    use crate::waveform::{generate_qpsk, NormalizationMode};

    fn with_op<T>(f: impl FnOnce(&SensingOperator<'_>) -> T) -> T {
        let p = RadarParams::standard().with_snapshots(64);
        let placement = sample_node_placement(&p, 6, 3, 1).unwrap();
        let x = generate_qpsk(64, 6, NormalizationMode::RawQpsk, 2).unwrap();
        let ms = MeasurementSet::generate(
            MeasurementKind::Gaussian,
            10,
            &x,
            3,
            1,
            MeasurementReuse::PerNode,
            false,
            3,
        )
        .unwrap();
        let op = SensingOperator::new(&p, &placement, &x, &ms).unwrap();
        f(&op)
    }

    fn steps(deg: &[f64]) -> Vec<(f64, f64)> {
        deg.iter().map(|&d| (rad(d), 0.0)).collect()
    }

    #[test]
    fn zero_threshold_takes_coarsest() {
        with_op(|op| {
            let region = GridRegion::stationary(rad(-4.0), rad(4.0));
            let sel = select_grid_step(op, &region, &steps(&[2.0, 1.0, 0.5]), 0.0).unwrap();
            assert_eq!(sel.angle_step_rad, rad(2.0));
            assert_eq!(sel.scores.len(), 1);
        });
    }

    #[test]
    fn vanishing_step_is_fully_correlated() {
        with_op(|op| {
            let region = GridRegion::stationary(rad(-1.0), rad(1.0));
            let c = half_step_correlation(op, &region, rad(1e-6), 0.0).unwrap();
            assert!(c > 1.0 - 1e-9, "{c}");
        });
    }

    #[test]
    fn raising_threshold_never_coarsens() {
        with_op(|op| {
            let region = GridRegion::stationary(rad(-4.0), rad(4.0));
            let cands = steps(&[2.0, 1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01]);
            let mut last = f64::INFINITY;
            for t in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
                let step = select_grid_step(op, &region, &cands, t)
                    .unwrap()
                    .angle_step_rad;
                assert!(step <= last);
                last = step;
            }
        });
    }

    #[test]
    fn rejects_bad_inputs() {
        with_op(|op| {
            let region = GridRegion::stationary(rad(-4.0), rad(4.0));
            assert!(select_grid_step(op, &region, &[], 0.5).is_err());
            assert!(select_grid_step(op, &region, &steps(&[0.5, 1.0]), 0.5).is_err());
            assert!(select_grid_step(op, &region, &steps(&[1.0]), 1.5).is_err());
            assert!(matches!(
                select_grid_step(op, &region, &steps(&[2.0]), 1.0),
                Err(Error::NoFeasibleStep { .. })
            ));
        });
    }
}
