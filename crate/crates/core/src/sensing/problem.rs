use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::scene::{NodePlacement, RadarParams};
use crate::signal::ReceivedPulse;
use crate::waveform::WaveformMatrix;

use super::{AngleDopplerGrid, MeasurementSet, SensingOperator};

/// Stacked compressed observations `r` and sensing matrix `Theta` for one grid.
#[derive(Clone, Debug)]
pub struct SensingProblem {
    pub theta: CMatrix,
    pub observations: CVector,
    pub grid: AngleDopplerGrid,
    pub measurements: MeasurementSet,
    /// Largest column norm of `theta`.
    pub sigma_max: f64,
    /// Rows per `(l, m)` block.
    pub block_rows: usize,
    pub num_receive: usize,
    pub num_pulses: usize,
}

impl SensingProblem {
    pub fn from_parts(
        theta: CMatrix,
        observations: CVector,
        grid: AngleDopplerGrid,
        measurements: MeasurementSet,
    ) -> Result<Self> {
        if theta.nrows() != observations.len() {
            return Err(Error::DimensionMismatch {
                context: "theta rows vs observations",
                expected: theta.nrows(),
                found: observations.len(),
            });
        }
        if theta.ncols() != grid.len() {
            return Err(Error::DimensionMismatch {
                context: "theta columns vs grid points",
                expected: grid.len(),
                found: theta.ncols(),
            });
        }
        let block_rows = measurements.rows();
        let (num_receive, num_pulses) = (measurements.num_receive, measurements.num_pulses);
        if theta.nrows() != block_rows * num_receive * num_pulses {
            return Err(Error::DimensionMismatch {
                context: "theta rows vs M * N_r * N_p",
                expected: block_rows * num_receive * num_pulses,
                found: theta.nrows(),
            });
        }
        let sigma_max = theta.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        Ok(Self {
            theta,
            observations,
            grid,
            measurements,
            sigma_max,
            block_rows,
            num_receive,
            num_pulses,
        })
    }

    /// Rows of `theta` belonging to node `l` (0-based) and pulse `m` (1-based).
    pub fn block(&self, l: usize, m: usize) -> CMatrix {
        let b = l * self.num_pulses + (m - 1);
        self.theta
            .rows(b * self.block_rows, self.block_rows)
            .into_owned()
    }

    /// `Theta^H r`.
    pub fn correlated_observations(&self) -> CVector {
        self.theta.ad_mul(&self.observations)
    }
}

/// Compresses each received pulse with its measurement matrix and stacks the
/// result with `Theta` in `(node outer, pulse inner)` order.
pub fn build_sensing_problem(
    params: &RadarParams,
    placement: &NodePlacement,
    waveforms: &WaveformMatrix,
    grid: &AngleDopplerGrid,
    measurements: &MeasurementSet,
    pulses: &[ReceivedPulse],
) -> Result<SensingProblem> {
    let op = SensingOperator::new(params, placement, waveforms, measurements)?;
    let (n_r, n_p) = (op.num_receive(), op.num_pulses());
    if pulses.len() != n_r * n_p {
        return Err(Error::DimensionMismatch {
            context: "received pulses vs N_r * N_p",
            expected: n_r * n_p,
            found: pulses.len(),
        });
    }
    let rows = measurements.rows();
    let mut r = CVector::zeros(op.rows());
    for p in pulses {
        if p.node_index >= n_r || p.pulse_index == 0 || p.pulse_index > n_p {
            return Err(crate::error::invalid(format!(
                "pulse (node {}, pulse {}) outside the array",
                p.node_index, p.pulse_index
            )));
        }
        if p.snapshots.len() != waveforms.snapshots() {
            return Err(Error::DimensionMismatch {
                context: "received snapshots vs L",
                expected: waveforms.snapshots(),
                found: p.snapshots.len(),
            });
        }
        let b = p.node_index * n_p + (p.pulse_index - 1);
        let phi = &measurements.get(p.node_index, p.pulse_index).matrix;
        r.rows_mut(b * rows, rows).copy_from(&(phi * &p.snapshots));
    }
    SensingProblem::from_parts(op.theta(grid), r, grid.clone(), measurements.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::scene::{rad, sample_node_placement, NodePlacement, Scene, Target};
    use crate::sensing::{AngleDopplerGrid, MeasurementKind, MeasurementReuse};
    use crate::signal::{ground_truth, synthesize_all};
    use crate::waveform::{generate_qpsk, NormalizationMode};

    fn setup(
        n_r: usize,
        n_p: usize,
        reuse: MeasurementReuse,
    ) -> (Scene, WaveformMatrix, MeasurementSet, AngleDopplerGrid) {
        let params = RadarParams::standard().with_snapshots(128).with_pulses(n_p);
        let placement = sample_node_placement(&params, 10, n_r, 3).unwrap();
        let x = generate_qpsk(128, 10, NormalizationMode::RawQpsk, 4).unwrap();
        let ms =
            MeasurementSet::generate(MeasurementKind::Gaussian, 8, &x, n_r, n_p, reuse, false, 5)
                .unwrap();
        let grid =
            AngleDopplerGrid::uniform(rad(-2.0), rad(2.0), rad(0.5), 0.0, 2000.0, 500.0).unwrap();
        let targets = vec![
            Target::new(
                rad(-1.0),
                params.speed_mps(500.0),
                10_000.0,
                C64::new(1.0, 0.0),
            ),
            Target::new(
                rad(0.5),
                params.speed_mps(1500.0),
                10_000.0,
                C64::new(0.0, 0.7),
            ),
        ];
        (
            Scene {
                params,
                placement,
                targets,
                jammer: None,
            },
            x,
            ms,
            grid,
        )
    }

    #[test]
    fn noiseless_model_consistency() {
        for reuse in [MeasurementReuse::PerNode, MeasurementReuse::PerPulse] {
            let (scene, x, ms, grid) = setup(3, 2, reuse);
            let pulses = synthesize_all(&scene, &x, None, 0.0, 0).unwrap();
            let prob =
                build_sensing_problem(&scene.params, &scene.placement, &x, &grid, &ms, &pulses)
                    .unwrap();
            assert_eq!(prob.theta.shape(), (8 * 3 * 2, grid.len()));
            let gt = ground_truth(&scene.targets, &grid, &scene.params, 1e-9, 1e-6);
            assert_eq!(gt.support.len(), 2);
            let err = (&prob.observations - &prob.theta * gt.to_vector()).camax();
            assert!(err < 1e-10, "{err}");
        }
    }

    #[test]
    fn blocks_are_phi_times_psi() {
        let (scene, x, ms, grid) = setup(2, 3, MeasurementReuse::PerPulse);
        let pulses = synthesize_all(&scene, &x, None, 0.0, 0).unwrap();
        let prob = build_sensing_problem(&scene.params, &scene.placement, &x, &grid, &ms, &pulses)
            .unwrap();
        let op = SensingOperator::new(&scene.params, &scene.placement, &x, &ms).unwrap();
        for l in 0..2 {
            for m in 1..=3 {
                let expect = &ms.get(l, m).matrix * op.basis_matrix(&grid, l, m);
                assert!((prob.block(l, m) - expect).camax() < 1e-12);
            }
        }
        let sm = prob
            .theta
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert_eq!(prob.sigma_max, sm);
    }

    #[test]
    fn origin_nodes_give_plain_mixture() {
        let params = RadarParams::standard().with_snapshots(32);
        let placement = NodePlacement::at_origin(4, 1);
        let x = generate_qpsk(32, 4, NormalizationMode::RawQpsk, 1).unwrap();
        let ms = MeasurementSet::generate(
            MeasurementKind::Gaussian,
            4,
            &x,
            1,
            1,
            MeasurementReuse::PerNode,
            false,
            1,
        )
        .unwrap();
        let grid = AngleDopplerGrid::angles(rad(-8.0), rad(8.0), rad(0.2)).unwrap();
        let op = SensingOperator::new(&params, &placement, &x, &ms).unwrap();
        let psi = op.basis_matrix(&grid, 0, 1);
        let expect = &x.samples * CVector::from_element(4, C64::new(1.0, 0.0));
        assert!((psi.column(7) - expect).camax() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let (scene, x, ms, grid) = setup(2, 1, MeasurementReuse::PerNode);
        let pulses = synthesize_all(&scene, &x, None, 0.0, 0).unwrap();
        assert!(build_sensing_problem(
            &scene.params,
            &scene.placement,
            &x,
            &grid,
            &ms,
            &pulses[..1]
        )
        .is_err());
        let other = MeasurementSet::generate(
            MeasurementKind::Gaussian,
            8,
            &x,
            3,
            1,
            MeasurementReuse::PerNode,
            false,
            5,
        )
        .unwrap();
        assert!(
            build_sensing_problem(&scene.params, &scene.placement, &x, &grid, &other, &pulses)
                .is_err()
        );
    }
}
