use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{orthonormalize_rows, CMatrix};
use crate::rng::{complex_gaussian, derive_seed, rng_from_seed};
use crate::waveform::WaveformMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementKind {
    /// i.i.d. complex Gaussian entries with variance `1/L`.
    Gaussian,
    /// `Phi' X^H` with `Phi'` an `M x M_t` Gaussian factor (variance `1/M_t`), which
    /// correlates the received samples against the transmit waveforms.
    #[default]
    Modified,
}

/// How measurement matrices are assigned to `(node, pulse)` blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementReuse {
    /// One matrix per receive node, reused over all pulses.
    #[default]
    PerNode,
    /// A fresh matrix for every `(node, pulse)`.
    PerPulse,
    /// A single matrix shared by every node and pulse.
    Shared,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementMatrix {
    pub kind: MeasurementKind,
    /// `M x L` compressing projection.
    pub matrix: CMatrix,
    /// `M x M_t` Gaussian factor of the modified kind.
    pub generator: Option<CMatrix>,
}

impl MeasurementMatrix {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    /// Mean of `sum_j |Phi_ij|^2` over rows; scales white noise through `Phi`.
    pub fn mean_row_energy(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.matrix.nrows() as f64
    }
}

pub fn generate_measurement_matrix(
    kind: MeasurementKind,
    m: usize,
    l: usize,
    waveforms: Option<&WaveformMatrix>,
    orthonormal_rows: bool,
    seed: u64,
) -> Result<MeasurementMatrix> {
    if m == 0 || m >= l {
        return Err(invalid(format!("need 0 < M < L, got M = {m}, L = {l}")));
    }
    let mut rng = rng_from_seed(seed);
    match kind {
        MeasurementKind::Gaussian => {
            let var = 1.0 / l as f64;
            let mut matrix = CMatrix::from_fn(m, l, |_, _| complex_gaussian(&mut rng, var));
            if orthonormal_rows && !orthonormalize_rows(&mut matrix, 1e-10) {
                return Err(invalid("Gaussian measurement matrix lost rank"));
            }
            Ok(MeasurementMatrix {
                kind,
                matrix,
                generator: None,
            })
        }
        MeasurementKind::Modified => {
            let x = waveforms
                .ok_or_else(|| invalid("modified measurement matrix needs the waveform matrix"))?;
            if x.snapshots() != l {
                return Err(invalid("waveform length does not match L"));
            }
            let m_t = x.num_transmit();
            if m > m_t {
                return Err(invalid(format!(
                    "modified measurement needs M <= M_t, got M = {m}, M_t = {m_t}"
                )));
            }
            let var = 1.0 / m_t as f64;
            let mut generator = CMatrix::from_fn(m, m_t, |_, _| complex_gaussian(&mut rng, var));
            if orthonormal_rows && !orthonormalize_rows(&mut generator, 1e-10) {
                return Err(invalid("measurement generator lost rank"));
            }
            let matrix = &generator * x.samples.adjoint();
            Ok(MeasurementMatrix {
                kind,
                matrix,
                generator: Some(generator),
            })
        }
    }
}

/// Measurement matrices for every receive node and pulse.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    pub reuse: MeasurementReuse,
    pub num_receive: usize,
    pub num_pulses: usize,
    matrices: Vec<MeasurementMatrix>,
}

impl MeasurementSet {
    pub fn new(
        reuse: MeasurementReuse,
        num_receive: usize,
        num_pulses: usize,
        matrices: Vec<MeasurementMatrix>,
    ) -> Result<Self> {
        let expected = match reuse {
            MeasurementReuse::PerNode => num_receive,
            MeasurementReuse::PerPulse => num_receive * num_pulses,
            MeasurementReuse::Shared => 1,
        };
        if matrices.len() != expected {
            return Err(invalid(format!(
                "expected {expected} measurement matrices, got {}",
                matrices.len()
            )));
        }
        let rows = matrices[0].rows();
        let cols = matrices[0].matrix.ncols();
        if matrices
            .iter()
            .any(|m| m.rows() != rows || m.matrix.ncols() != cols)
        {
            return Err(invalid("measurement matrices must share one shape"));
        }
        Ok(Self {
            reuse,
            num_receive,
            num_pulses,
            matrices,
        })
    }

    pub fn generate(
        kind: MeasurementKind,
        m: usize,
        waveforms: &WaveformMatrix,
        num_receive: usize,
        num_pulses: usize,
        reuse: MeasurementReuse,
        orthonormal_rows: bool,
        seed: u64,
    ) -> Result<Self> {
        let count = match reuse {
            MeasurementReuse::PerNode => num_receive,
            MeasurementReuse::PerPulse => num_receive * num_pulses,
            MeasurementReuse::Shared => 1,
        };
        let l = waveforms.snapshots();
        let matrices = (0..count)
            .map(|i| {
                generate_measurement_matrix(
                    kind,
                    m,
                    l,
                    Some(waveforms),
                    orthonormal_rows,
                    derive_seed(seed, i as u64),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(reuse, num_receive, num_pulses, matrices)
    }

    /// Index into the distinct matrices for node `l` (0-based) and pulse `m` (1-based).
    pub fn slot(&self, l: usize, m: usize) -> usize {
        match self.reuse {
            MeasurementReuse::PerNode => l,
            MeasurementReuse::PerPulse => l * self.num_pulses + (m - 1),
            MeasurementReuse::Shared => 0,
        }
    }

    pub fn get(&self, l: usize, m: usize) -> &MeasurementMatrix {
        &self.matrices[self.slot(l, m)]
    }

    pub fn distinct(&self) -> &[MeasurementMatrix] {
        &self.matrices
    }

    pub fn rows(&self) -> usize {
        self.matrices[0].rows()
    }

    pub fn kind(&self) -> MeasurementKind {
        self.matrices[0].kind
    }

    pub fn mean_row_energy(&self) -> f64 {
        self.matrices
            .iter()
            .map(MeasurementMatrix::mean_row_energy)
            .sum::<f64>()
            / self.matrices.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::waveform::{generate_qpsk, NormalizationMode};

    #[test]
    fn preconditions() {
        let x = generate_qpsk(64, 8, NormalizationMode::RawQpsk, 0).unwrap();
        assert!(
            generate_measurement_matrix(MeasurementKind::Gaussian, 64, 64, None, false, 0).is_err()
        );
        assert!(
            generate_measurement_matrix(MeasurementKind::Modified, 9, 64, Some(&x), false, 0)
                .is_err()
        );
        assert!(
            generate_measurement_matrix(MeasurementKind::Modified, 8, 64, None, false, 0).is_err()
        );
        assert!(
            generate_measurement_matrix(MeasurementKind::Modified, 8, 64, Some(&x), false, 0)
                .is_ok()
        );
    }

    #[test]
    fn modified_is_generator_times_waveform_adjoint() {
        let x = generate_qpsk(64, 8, NormalizationMode::RawQpsk, 0).unwrap();
        let phi = generate_measurement_matrix(MeasurementKind::Modified, 6, 64, Some(&x), false, 3)
            .unwrap();
        let g = phi.generator.clone().unwrap();
        assert_eq!(phi.matrix, &g * x.samples.adjoint());
    }

    #[test]
    fn orthonormal_rows() {
        let phi =
            generate_measurement_matrix(MeasurementKind::Gaussian, 10, 40, None, true, 1).unwrap();
        let p = &phi.matrix * phi.matrix.adjoint();
        assert!((p - CMatrix::identity(10, 10)).norm() < 1e-12);
    }

    #[test]
    fn modified_trace_identity() {
        // Orthonormal Phi' and X^H X = I give Tr(Phi~ X X^H Phi~^H) = M.
        let x = generate_qpsk(128, 12, NormalizationMode::ColumnOrthonormal, 2).unwrap();
        let phi = generate_measurement_matrix(MeasurementKind::Modified, 7, 128, Some(&x), true, 5)
            .unwrap();
        let t = &phi.matrix * &x.samples * x.samples.adjoint() * phi.matrix.adjoint();
        let tr: C64 = t.diagonal().iter().sum();
        assert!((tr - C64::new(7.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn gaussian_trace_expectation() {
        // E Tr(Phi^H Phi) = M with entry variance 1/L.
        let (m, l, trials) = (30, 512, 10_000u64);
        let mut acc = 0.0;
        for s in 0..trials {
            let phi = generate_measurement_matrix(MeasurementKind::Gaussian, m, l, None, false, s)
                .unwrap();
            acc += phi.matrix.iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let mean = acc / trials as f64;
        assert!((mean - m as f64).abs() / (m as f64) < 0.02, "{mean}");
    }

    #[test]
    fn set_slots() {
        let x = generate_qpsk(64, 8, NormalizationMode::RawQpsk, 0).unwrap();
        let s = MeasurementSet::generate(
            MeasurementKind::Gaussian,
            4,
            &x,
            3,
            2,
            MeasurementReuse::PerPulse,
            false,
            0,
        )
        .unwrap();
        assert_eq!(s.distinct().len(), 6);
        assert_eq!(s.slot(2, 2), 5);
        let s = MeasurementSet::generate(
            MeasurementKind::Gaussian,
            4,
            &x,
            3,
            2,
            MeasurementReuse::PerNode,
            false,
            0,
        )
        .unwrap();
        assert_eq!(s.get(1, 1), s.get(1, 2));
    }
}
