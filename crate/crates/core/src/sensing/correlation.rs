//! Column correlations of basis/sensing matrices and the Monte Carlo studies of
//! how receive nodes, transmit nodes and pulses decorrelate hypotheses.

use crate::error::{invalid, Result};
use crate::linalg::{inner, CMatrix, CVector};
use crate::rng::derive_seed;
use crate::scene::{sample_node_placement, RadarParams};
use crate::waveform::{generate_qpsk, NormalizationMode};

use super::{GridPoint, MeasurementKind, MeasurementReuse, MeasurementSet, SensingOperator};

/// `|g_i^H g_j|` for columns of `matrix`.
pub fn column_correlation(matrix: &CMatrix, i: usize, j: usize) -> f64 {
    matrix.column(i).dotc(&matrix.column(j)).norm()
}

/// `|g_i^H g_j| / (|g_i| |g_j|)`, zero when either column vanishes.
pub fn normalized_column_correlation(matrix: &CMatrix, i: usize, j: usize) -> f64 {
    let d = matrix.column(i).norm() * matrix.column(j).norm();
    if d == 0.0 {
        0.0
    } else {
        column_correlation(matrix, i, j) / d
    }
}

pub fn normalized_correlation(a: &CVector, b: &CVector) -> f64 {
    let d = a.norm() * b.norm();
    if d == 0.0 {
        0.0
    } else {
        inner(a, b).norm() / d
    }
}

/// Configuration of one correlation experiment: two hypotheses observed through
/// a freshly drawn geometry, waveform set and measurement set per seed.
#[derive(Clone, Debug)]
pub struct CorrelationStudy {
    pub params: RadarParams,
    pub num_transmit: usize,
    pub num_receive: usize,
    pub measurements: usize,
    pub kind: MeasurementKind,
    pub reuse: MeasurementReuse,
    pub waveform_mode: NormalizationMode,
    pub first: GridPoint,
    pub second: GridPoint,
}

/// Raw auto- and cross-correlation of the two stacked columns for one seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationSample {
    /// `|g_1|^2`
    pub auto: f64,
    /// `|g_1^H g_2|`
    pub cross: f64,
    /// `|g_1^H g_2| / (|g_1| |g_2|)`
    pub normalized: f64,
}

impl CorrelationStudy {
    pub fn sample(&self, seed: u64) -> Result<CorrelationSample> {
        let placement = sample_node_placement(
            &self.params,
            self.num_transmit,
            self.num_receive,
            derive_seed(seed, 0),
        )?;
        let x = generate_qpsk(
            self.params.snapshots_per_pulse,
            self.num_transmit,
            self.waveform_mode,
            derive_seed(seed, 1),
        )?;
        let ms = MeasurementSet::generate(
            self.kind,
            self.measurements,
            &x,
            self.num_receive,
            self.params.num_pulses,
            self.reuse,
            false,
            derive_seed(seed, 2),
        )?;
        let op = SensingOperator::new(&self.params, &placement, &x, &ms)?;
        let g1 = op.column(self.first);
        let g2 = op.column(self.second);
        Ok(CorrelationSample {
            auto: g1.norm_squared(),
            cross: inner(&g1, &g2).norm(),
            normalized: normalized_correlation(&g1, &g2),
        })
    }

    pub fn samples(&self, seeds: std::ops::Range<u64>) -> Result<Vec<CorrelationSample>> {
        if seeds.is_empty() {
            return Err(invalid("correlation study needs at least one seed"));
        }
        seeds.map(|s| self.sample(s)).collect()
    }

    /// Mean normalized cross-correlation over seeds.
    pub fn mean_normalized(&self, seeds: std::ops::Range<u64>) -> Result<f64> {
        let s = self.samples(seeds)?;
        Ok(s.iter().map(|c| c.normalized).sum::<f64>() / s.len() as f64)
    }

    /// Mean of the auto/cross ratio `p_kk / p_kk'` over seeds.
    pub fn mean_auto_cross_ratio(&self, seeds: std::ops::Range<u64>) -> Result<f64> {
        let s = self.samples(seeds)?;
        Ok(s.iter().map(|c| c.auto / c.cross).sum::<f64>() / s.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::scene::rad;

    #[test]
    fn diagonal_is_squared_norm() {
        let m = CMatrix::from_fn(5, 3, |i, j| C64::new(i as f64 - j as f64, 0.5 * j as f64));
        for i in 0..3 {
            assert!((column_correlation(&m, i, i) - m.column(i).norm_squared()).abs() < 1e-12);
            assert!((normalized_column_correlation(&m, i, i) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn same_point_is_fully_correlated() {
        let p = GridPoint::new(rad(1.0), 0.0);
        let study = CorrelationStudy {
            params: RadarParams::standard().with_snapshots(64),
            num_transmit: 5,
            num_receive: 3,
            measurements: 5,
            kind: MeasurementKind::Modified,
            reuse: MeasurementReuse::PerNode,
            waveform_mode: NormalizationMode::RawQpsk,
            first: p,
            second: p,
        };
        let s = study.sample(0).unwrap();
        assert!((s.normalized - 1.0).abs() < 1e-12);
        assert!((s.auto - s.cross).abs() < 1e-9 * s.auto);
    }
}
