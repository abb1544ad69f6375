//! Radar geometry: node placement on a disk, targets, jammer and the per-node
//! projection terms.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{cis, CVector, C64};
use crate::rng::rng_from_seed;

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Carrier, timing and array-size parameters shared by every stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarParams {
    pub carrier_freq_hz: f64,
    pub sample_period_s: f64,
    pub pulse_repetition_s: f64,
    /// Samples per pulse (L).
    pub snapshots_per_pulse: usize,
    pub num_pulses: usize,
    pub disk_radius_m: f64,
}

impl RadarParams {
    /// 5 GHz carrier, 20 MHz sampling, 4 kHz PRF, 512 samples, one pulse, 10 m disk.
    pub fn standard() -> Self {
        Self {
            carrier_freq_hz: 5e9,
            sample_period_s: 1.0 / 20e6,
            pulse_repetition_s: 1.0 / 4000.0,
            snapshots_per_pulse: 512,
            num_pulses: 1,
            disk_radius_m: 10.0,
        }
    }

    pub fn with_pulses(mut self, num_pulses: usize) -> Self {
        self.num_pulses = num_pulses;
        self
    }

    pub fn with_snapshots(mut self, l: usize) -> Self {
        self.snapshots_per_pulse = l;
        self
    }

    pub fn with_disk_radius(mut self, r: f64) -> Self {
        self.disk_radius_m = r;
        self
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }

    pub fn speed_of_light(&self) -> f64 {
        SPEED_OF_LIGHT
    }

    /// Doppler shift `2 v f / c` of a target closing at `speed_mps`.
    pub fn doppler_hz(&self, speed_mps: f64) -> f64 {
        2.0 * speed_mps * self.carrier_freq_hz / SPEED_OF_LIGHT
    }

    pub fn speed_mps(&self, doppler_hz: f64) -> f64 {
        doppler_hz * SPEED_OF_LIGHT / (2.0 * self.carrier_freq_hz)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("sample_period_s", self.sample_period_s),
            ("pulse_repetition_s", self.pulse_repetition_s),
            ("disk_radius_m", self.disk_radius_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.snapshots_per_pulse == 0 || self.num_pulses == 0 {
            return Err(invalid(
                "snapshots_per_pulse and num_pulses must be at least 1",
            ));
        }
        if self.snapshots_per_pulse as f64 * self.sample_period_s
            > self.pulse_repetition_s * (1.0 + 1e-12)
        {
            return Err(invalid(format!(
                "{} samples at {} s do not fit in a {} s pulse interval",
                self.snapshots_per_pulse, self.sample_period_s, self.pulse_repetition_s
            )));
        }
        Ok(())
    }
}

/// Polar position of one antenna relative to the disk center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodePosition {
    pub radius_m: f64,
    pub angle_rad: f64,
}

impl NodePosition {
    pub fn new(radius_m: f64, angle_rad: f64) -> Self {
        Self {
            radius_m,
            angle_rad,
        }
    }

    /// Projection `r cos(theta - alpha)` of the node onto direction `azimuth_rad`.
    #[inline]
    pub fn eta(&self, azimuth_rad: f64) -> f64 {
        eta(*self, azimuth_rad)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodePlacement {
    pub transmit: Vec<NodePosition>,
    pub receive: Vec<NodePosition>,
}

impl NodePlacement {
    pub fn at_origin(m_t: usize, n_r: usize) -> Self {
        let origin = NodePosition::new(0.0, 0.0);
        Self {
            transmit: vec![origin; m_t],
            receive: vec![origin; n_r],
        }
    }

    pub fn num_transmit(&self) -> usize {
        self.transmit.len()
    }

    pub fn num_receive(&self) -> usize {
        self.receive.len()
    }
}

/// Draws a point uniformly on a disk of radius `radius`: radius by inverse CDF
/// (`r sqrt(u)`), angle uniform on `[-pi, pi)`.
pub fn sample_disk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> NodePosition {
    let u: f64 = rng.random();
    let angle = rng.random_range(-PI..PI);
    NodePosition::new(radius * u.sqrt(), angle)
}

/// Places `m_t` transmit and `n_r` receive nodes independently and uniformly on the disk.
pub fn sample_node_placement(
    params: &RadarParams,
    m_t: usize,
    n_r: usize,
    seed: u64,
) -> Result<NodePlacement> {
    if m_t == 0 || n_r == 0 {
        return Err(invalid(
            "placement needs at least one transmit and one receive node",
        ));
    }
    let mut rng = rng_from_seed(seed);
    let r = params.disk_radius_m;
    let transmit = (0..m_t).map(|_| sample_disk_point(&mut rng, r)).collect();
    let receive = (0..n_r).map(|_| sample_disk_point(&mut rng, r)).collect();
    Ok(NodePlacement { transmit, receive })
}

#[inline]
pub fn eta(node: NodePosition, azimuth_rad: f64) -> f64 {
    node.radius_m * (azimuth_rad - node.angle_rad).cos()
}

/// Transmit steering vector: element `i` is `exp(j 2 pi / lambda * eta_i(theta))`.
pub fn steering_vector(
    placement: &NodePlacement,
    params: &RadarParams,
    azimuth_rad: f64,
) -> CVector {
    let k = 2.0 * PI / params.wavelength_m();
    CVector::from_iterator(
        placement.transmit.len(),
        placement
            .transmit
            .iter()
            .map(|n| cis(k * n.eta(azimuth_rad))),
    )
}

/// Receive-side phase `exp(j 2 pi / lambda * eta_l(theta))` for node `l`.
pub fn receive_phase(
    placement: &NodePlacement,
    params: &RadarParams,
    node: usize,
    azimuth_rad: f64,
) -> C64 {
    let k = 2.0 * PI / params.wavelength_m();
    cis(k * placement.receive[node].eta(azimuth_rad))
}

/// Thresholds used to check the far-field and slow-target assumptions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelLimits {
    /// Minimum `initial_range / disk_radius`.
    pub far_field_ratio: f64,
    /// Maximum `|f_k| * T_s`.
    pub max_doppler_sample_product: f64,
}

impl Default for ModelLimits {
    fn default() -> Self {
        Self {
            far_field_ratio: 100.0,
            max_doppler_sample_product: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub azimuth_rad: f64,
    pub radial_speed_mps: f64,
    pub initial_range_m: f64,
    pub reflectivity: C64,
}

impl Target {
    pub fn new(
        azimuth_rad: f64,
        radial_speed_mps: f64,
        initial_range_m: f64,
        reflectivity: C64,
    ) -> Self {
        Self {
            azimuth_rad,
            radial_speed_mps,
            initial_range_m,
            reflectivity,
        }
    }

    /// Unit-reflectivity stationary target at 10 km.
    pub fn stationary(azimuth_rad: f64) -> Self {
        Self::new(azimuth_rad, 0.0, 10_000.0, C64::new(1.0, 0.0))
    }

    pub fn doppler_hz(&self, params: &RadarParams) -> f64 {
        params.doppler_hz(self.radial_speed_mps)
    }

    /// Complex amplitude with the two-way range phase folded in:
    /// `beta * exp(-j 2 pi / lambda * 2 d(0))`.
    pub fn gamma(&self, params: &RadarParams) -> C64 {
        let k = 2.0 * PI / params.wavelength_m();
        self.reflectivity * cis(-k * 2.0 * self.initial_range_m)
    }

    pub fn validate(&self, params: &RadarParams, limits: &ModelLimits) -> Result<()> {
        if !(self.initial_range_m > 0.0) {
            return Err(invalid("target range must be positive"));
        }
        if self.initial_range_m < limits.far_field_ratio * params.disk_radius_m {
            return Err(invalid(format!(
                "target at {} m violates the far-field ratio {} for a {} m disk",
                self.initial_range_m, limits.far_field_ratio, params.disk_radius_m
            )));
        }
        let product = self.doppler_hz(params).abs() * params.sample_period_s;
        if product >= limits.max_doppler_sample_product {
            return Err(invalid(format!(
                "target speed {} m/s gives f_k T_s = {product:.3e}, above the slow-target limit {}",
                self.radial_speed_mps, limits.max_doppler_sample_product
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jammer {
    pub azimuth_rad: f64,
    pub range_m: f64,
    /// Square root of the jammer power over one pulse.
    pub amplitude: f64,
}

impl Jammer {
    pub fn new(azimuth_rad: f64, range_m: f64, amplitude: f64) -> Result<Self> {
        if !(amplitude >= 0.0) {
            return Err(invalid("jammer amplitude must be nonnegative"));
        }
        Ok(Self {
            azimuth_rad,
            range_m,
            amplitude,
        })
    }

    pub fn from_power(azimuth_rad: f64, range_m: f64, power: f64) -> Result<Self> {
        if !(power >= 0.0) {
            return Err(invalid("jammer power must be nonnegative"));
        }
        Self::new(azimuth_rad, range_m, power.sqrt())
    }

    pub fn power(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// The physical world one trial runs in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub params: RadarParams,
    pub placement: NodePlacement,
    pub targets: Vec<Target>,
    pub jammer: Option<Jammer>,
}

impl Scene {
    pub fn validate(&self, limits: &ModelLimits) -> Result<()> {
        self.params.validate()?;
        for t in &self.targets {
            t.validate(&self.params, limits)?;
        }
        let r = self.params.disk_radius_m * (1.0 + 1e-12);
        let nodes = self
            .placement
            .transmit
            .iter()
            .chain(&self.placement.receive);
        for n in nodes {
            if n.radius_m < 0.0 || n.radius_m > r {
                return Err(invalid(format!(
                    "node radius {} outside the disk",
                    n.radius_m
                )));
            }
        }
        Ok(())
    }
}

pub fn deg(rad: f64) -> f64 {
    rad.to_degrees()
}

pub fn rad(deg: f64) -> f64 {
    deg.to_radians()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn placement_counts_and_bounds() {
        let params = RadarParams::standard();
        let p = sample_node_placement(&params, 30, 10, 42).unwrap();
        assert_eq!(p.transmit.len(), 30);
        assert_eq!(p.receive.len(), 10);
        for n in p.transmit.iter().chain(&p.receive) {
            assert!(n.radius_m <= 10.0 && n.radius_m >= 0.0);
            assert!(n.angle_rad >= -PI && n.angle_rad < PI);
        }
        assert_eq!(p, sample_node_placement(&params, 30, 10, 42).unwrap());
    }

    #[test]
    fn degenerate_disk_puts_nodes_at_origin() {
        let params = RadarParams::standard().with_disk_radius(1e-300);
        let p = sample_node_placement(&params, 4, 2, 1).unwrap();
        for n in p.transmit.iter().chain(&p.receive) {
            assert!(n.eta(0.3).abs() < 1e-299);
        }
        let v = steering_vector(&NodePlacement::at_origin(5, 1), &params, 0.7);
        assert!(v.iter().all(|x| (x - C64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn eta_examples() {
        assert!((eta(NodePosition::new(5.0, 0.0), 0.0) - 5.0).abs() < 1e-15);
        assert!(eta(NodePosition::new(5.0, PI / 2.0), 0.0).abs() < 1e-15);
        let expected = 3.0 * (-0.3f64).cos();
        assert!((eta(NodePosition::new(3.0, 0.4), 0.1) - expected).abs() < 1e-15);
    }

    #[test]
    fn radius_moment_and_ks() {
        let params = RadarParams::standard();
        let n = 1_000_000;
        let mut rng = rng_from_seed(11);
        let mut radii: Vec<f64> = (0..n)
            .map(|_| sample_disk_point(&mut rng, params.disk_radius_m).radius_m)
            .collect();
        let r2 = params.disk_radius_m.powi(2);
        let mean_sq = radii.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!((mean_sq - r2 / 2.0).abs() / (r2 / 2.0) < 0.01);

        radii.sort_by(f64::total_cmp);
        let ks = radii
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let cdf = x * x / r2;
                (cdf - i as f64 / n as f64)
                    .abs()
                    .max(((i + 1) as f64 / n as f64 - cdf).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.002, "KS distance {ks}");
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = RadarParams::standard();
        p.snapshots_per_pulse = 10_000;
        assert!(p.validate().is_err());
        assert!(RadarParams::standard().validate().is_ok());
        let params = RadarParams::standard();
        assert!(Target::stationary(0.0)
            .validate(&params, &ModelLimits::default())
            .is_ok());
        let near = Target::new(0.0, 0.0, 50.0, C64::new(1.0, 0.0));
        assert!(near.validate(&params, &ModelLimits::default()).is_err());
        assert!(Jammer::new(0.0, 1e4, -1.0).is_err());
    }

    #[test]
    fn wavelength_is_c_over_f() {
        let p = RadarParams::standard();
        assert_eq!(p.wavelength_m(), SPEED_OF_LIGHT / 5e9);
    }

    proptest! {
        #[test]
        fn eta_bounded(r in 0.0f64..20.0, a in -PI..PI, theta in -10.0f64..10.0) {
            prop_assert!(eta(NodePosition::new(r, a), theta).abs() <= r + 1e-12);
        }

        #[test]
        fn steering_unit_modulus_and_periodic(seed in 0u64..500, theta in -PI..PI) {
            let params = RadarParams::standard();
            let p = sample_node_placement(&params, 8, 1, seed).unwrap();
            let v = steering_vector(&p, &params, theta);
            for x in v.iter() {
                prop_assert!((x.norm() - 1.0).abs() < 1e-12);
            }
            let energy: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            prop_assert!((energy - 8.0).abs() < 1e-10);
            let w = steering_vector(&p, &params, theta + 2.0 * PI);
            prop_assert!((v - w).norm() < 1e-8);
        }
    }
}
