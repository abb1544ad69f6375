//! Grids, measurement matrices, the stacked sensing matrix and the column
//! correlation analyses built on it.

mod correlation;
mod grid;
mod gridsel;
mod measurement;
mod operator;
mod problem;

pub use correlation::{
    column_correlation, normalized_column_correlation, normalized_correlation, CorrelationSample,
    CorrelationStudy,
};
pub use grid::{AngleDopplerGrid, GridPoint};
pub use gridsel::{
    half_step_correlation, select_grid_step, GridRegion, GridStepSelection, StepScore,
};
pub use measurement::{
    generate_measurement_matrix, MeasurementKind, MeasurementMatrix, MeasurementReuse,
    MeasurementSet,
};
pub use operator::{basis_matrix, block_phase, core_column, SensingOperator};
pub use problem::{build_sensing_problem, SensingProblem};

use crate::scene::RadarParams;

/// Span of radial speeds `c / (2 f T)` that the pulse train resolves without
/// Doppler aliasing.
pub fn unambiguous_speed_span(params: &RadarParams) -> f64 {
    params.speed_of_light() / (2.0 * params.carrier_freq_hz * params.pulse_repetition_s)
}
