use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub azimuth_rad: f64,
    pub doppler_hz: f64,
}

impl GridPoint {
    pub fn new(azimuth_rad: f64, doppler_hz: f64) -> Self {
        Self {
            azimuth_rad,
            doppler_hz,
        }
    }
}

/// Discretization of the angle-Doppler plane. Uniform grids list the angle axis
/// fastest: `(a_1, b_1), (a_2, b_1), ..., (a_1, b_2), ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleDopplerGrid {
    points: Vec<GridPoint>,
    angle_step: Option<f64>,
    doppler_step: Option<f64>,
}

fn axis(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if start == stop {
        return Ok(vec![start]);
    }
    if !(step > 0.0) || stop < start {
        return Err(invalid(format!(
            "bad axis [{start}, {stop}] with step {step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

impl AngleDopplerGrid {
    pub fn from_points(points: Vec<GridPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("grid must contain at least one point"));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].iter().any(|q| q == p) {
                return Err(invalid(format!("duplicate grid point {p:?}")));
            }
        }
        Ok(Self {
            points,
            angle_step: None,
            doppler_step: None,
        })
    }

    /// Uniform grid over `[angle_start, angle_stop] x [doppler_start, doppler_stop]`.
    /// A degenerate axis (start == stop) has a single value and no step.
    pub fn uniform(
        angle_start: f64,
        angle_stop: f64,
        angle_step: f64,
        doppler_start: f64,
        doppler_stop: f64,
        doppler_step: f64,
    ) -> Result<Self> {
        let angles = axis(angle_start, angle_stop, angle_step)?;
        let dopplers = axis(doppler_start, doppler_stop, doppler_step)?;
        let points = dopplers
            .iter()
            .flat_map(|&b| angles.iter().map(move |&a| GridPoint::new(a, b)))
            .collect();
        Ok(Self {
            points,
            angle_step: (angles.len() > 1).then_some(angle_step),
            doppler_step: (dopplers.len() > 1).then_some(doppler_step),
        })
    }

    /// Stationary grid: angles only, zero Doppler.
    pub fn angles(start: f64, stop: f64, step: f64) -> Result<Self> {
        Self::uniform(start, stop, step, 0.0, 0.0, 0.0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn angle_step(&self) -> Option<f64> {
        self.angle_step
    }

    pub fn doppler_step(&self) -> Option<f64> {
        self.doppler_step
    }

    /// Index of the point closest to `(azimuth, doppler)`, distances measured in
    /// units of the grid steps (or raw units when an axis has no step).
    pub fn nearest(&self, azimuth_rad: f64, doppler_hz: f64) -> usize {
        let sa = self.angle_step.unwrap_or(1.0);
        let sb = self.doppler_step.unwrap_or(1.0);
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let d = ((p.azimuth_rad - azimuth_rad) / sa).powi(2)
                + ((p.doppler_hz - doppler_hz) / sb).powi(2);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Index of a point within the given absolute tolerances, if any.
    pub fn find(
        &self,
        azimuth_rad: f64,
        doppler_hz: f64,
        angle_tol: f64,
        doppler_tol: f64,
    ) -> Option<usize> {
        let i = self.nearest(azimuth_rad, doppler_hz);
        let p = self.points[i];
        ((p.azimuth_rad - azimuth_rad).abs() <= angle_tol
            && (p.doppler_hz - doppler_hz).abs() <= doppler_tol)
            .then_some(i)
    }
}
