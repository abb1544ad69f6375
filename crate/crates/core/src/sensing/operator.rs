use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{cis, CMatrix, CVector, C64};
use crate::scene::{steering_vector, NodePlacement, RadarParams};
use crate::signal::{pulse_phase, DopplerMatrix};
use crate::waveform::WaveformMatrix;

use super::{AngleDopplerGrid, GridPoint, MeasurementSet};

/// `D(b) X v(a)`, the part of a basis column shared by every `(l, m)` block.
pub fn core_column(
    params: &RadarParams,
    placement: &NodePlacement,
    waveforms: &WaveformMatrix,
    point: GridPoint,
) -> CVector {
    let v = steering_vector(placement, params, point.azimuth_rad);
    let xv = &waveforms.samples * v;
    DopplerMatrix::new(
        point.doppler_hz,
        params.snapshots_per_pulse,
        params.sample_period_s,
    )
    .apply(&xv)
}

/// Scalar factor `exp(j 2pi/lambda eta_l(a)) exp(j 2pi b (m-1) T)` of block `(l, m)`,
/// node `l` 0-based and pulse `m` 1-based.
pub fn block_phase(
    params: &RadarParams,
    placement: &NodePlacement,
    l: usize,
    m: usize,
    point: GridPoint,
) -> C64 {
    let k = 2.0 * PI / params.wavelength_m();
    cis(k * placement.receive[l].eta(point.azimuth_rad)) * pulse_phase(point.doppler_hz, m, params)
}

/// `Psi_lm` over a grid (`L x N`).
pub fn basis_matrix(
    params: &RadarParams,
    placement: &NodePlacement,
    waveforms: &WaveformMatrix,
    grid: &AngleDopplerGrid,
    l: usize,
    m: usize,
) -> CMatrix {
    let cols: Vec<CVector> = grid
        .points()
        .iter()
        .map(|&p| {
            core_column(params, placement, waveforms, p) * block_phase(params, placement, l, m, p)
        })
        .collect();
    CMatrix::from_columns(&cols)
}

/// Maps angle-Doppler hypotheses to basis columns (`Psi_lm`) and stacked sensing
/// columns (`Theta`) for one geometry, waveform set and measurement set.
#[derive(Clone, Debug)]
pub struct SensingOperator<'a> {
    pub params: &'a RadarParams,
    pub placement: &'a NodePlacement,
    pub waveforms: &'a WaveformMatrix,
    pub measurements: &'a MeasurementSet,
}

impl<'a> SensingOperator<'a> {
    pub fn new(
        params: &'a RadarParams,
        placement: &'a NodePlacement,
        waveforms: &'a WaveformMatrix,
        measurements: &'a MeasurementSet,
    ) -> Result<Self> {
        if waveforms.num_transmit() != placement.num_transmit() {
            return Err(Error::DimensionMismatch {
                context: "waveform columns vs transmit nodes",
                expected: placement.num_transmit(),
                found: waveforms.num_transmit(),
            });
        }
        if measurements.distinct()[0].matrix.ncols() != waveforms.snapshots() {
            return Err(Error::DimensionMismatch {
                context: "measurement columns vs snapshots",
                expected: waveforms.snapshots(),
                found: measurements.distinct()[0].matrix.ncols(),
            });
        }
        if measurements.num_receive != placement.num_receive()
            || measurements.num_pulses != params.num_pulses
        {
            return Err(Error::DimensionMismatch {
                context: "measurement set vs receive nodes",
                expected: placement.num_receive(),
                found: measurements.num_receive,
            });
        }
        Ok(Self {
            params,
            placement,
            waveforms,
            measurements,
        })
    }

    pub fn num_receive(&self) -> usize {
        self.placement.num_receive()
    }

    pub fn num_pulses(&self) -> usize {
        self.params.num_pulses
    }

    pub fn rows(&self) -> usize {
        self.measurements.rows() * self.num_receive() * self.num_pulses()
    }

    pub fn core_column(&self, point: GridPoint) -> CVector {
        core_column(self.params, self.placement, self.waveforms, point)
    }

    pub fn block_phase(&self, l: usize, m: usize, point: GridPoint) -> C64 {
        block_phase(self.params, self.placement, l, m, point)
    }

    /// Column of `Psi_lm` for one hypothesis.
    pub fn basis_column(&self, l: usize, m: usize, point: GridPoint) -> CVector {
        self.core_column(point) * self.block_phase(l, m, point)
    }

    pub fn basis_matrix(&self, grid: &AngleDopplerGrid, l: usize, m: usize) -> CMatrix {
        basis_matrix(self.params, self.placement, self.waveforms, grid, l, m)
    }

    /// Stacked sensing column over all blocks in `(l outer, m inner)` order.
    pub fn column(&self, point: GridPoint) -> CVector {
        let core = self.core_column(point);
        let projected: Vec<CVector> = self
            .measurements
            .distinct()
            .iter()
            .map(|phi| &phi.matrix * &core)
            .collect();
        let rows = self.measurements.rows();
        let mut out = CVector::zeros(self.rows());
        for l in 0..self.num_receive() {
            for m in 1..=self.num_pulses() {
                let b = l * self.num_pulses() + (m - 1);
                let p = &projected[self.measurements.slot(l, m)];
                let phase = self.block_phase(l, m, point);
                out.rows_mut(b * rows, rows).copy_from(&(p * phase));
            }
        }
        out
    }

    /// The stacked sensing matrix `Theta` over `grid`.
    pub fn theta(&self, grid: &AngleDopplerGrid) -> CMatrix {
        let n = grid.len();
        let cores: Vec<CVector> = grid.points().iter().map(|&p| self.core_column(p)).collect();
        let core_matrix = CMatrix::from_columns(&cores);
        let projected: Vec<CMatrix> = self
            .measurements
            .distinct()
            .iter()
            .map(|phi| &phi.matrix * &core_matrix)
            .collect();
        let rows = self.measurements.rows();
        let mut theta = CMatrix::zeros(self.rows(), n);
        for l in 0..self.num_receive() {
            for m in 1..=self.num_pulses() {
                let b = l * self.num_pulses() + (m - 1);
                let p = &projected[self.measurements.slot(l, m)];
                for (j, &pt) in grid.points().iter().enumerate() {
                    let phase = self.block_phase(l, m, pt);
                    for i in 0..rows {
                        theta[(b * rows + i, j)] = p[(i, j)] * phase;
                    }
                }
            }
        }
        theta
    }
}
