use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::scene::{rad, Jammer, ModelLimits, RadarParams, Target};
use crate::sensing::{AngleDopplerGrid, MeasurementKind, MeasurementReuse};
use crate::solver::DantzigConfig;
use crate::waveform::NormalizationMode;

/// Angle-speed grid in degrees and m/s. A speed axis with equal start and stop
/// is a single value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub angle_start_deg: f64,
    pub angle_stop_deg: f64,
    pub angle_step_deg: f64,
    #[serde(default)]
    pub speed_start_mps: f64,
    #[serde(default)]
    pub speed_stop_mps: f64,
    #[serde(default)]
    pub speed_step_mps: f64,
}

impl GridSpec {
    pub fn angles(start_deg: f64, stop_deg: f64, step_deg: f64) -> Self {
        Self {
            angle_start_deg: start_deg,
            angle_stop_deg: stop_deg,
            angle_step_deg: step_deg,
            speed_start_mps: 0.0,
            speed_stop_mps: 0.0,
            speed_step_mps: 0.0,
        }
    }

    pub fn build(&self, params: &RadarParams) -> Result<AngleDopplerGrid> {
        AngleDopplerGrid::uniform(
            rad(self.angle_start_deg),
            rad(self.angle_stop_deg),
            rad(self.angle_step_deg),
            params.doppler_hz(self.speed_start_mps),
            params.doppler_hz(self.speed_stop_mps),
            params.doppler_hz(self.speed_step_mps),
        )
    }
}

fn default_range() -> f64 {
    10_000.0
}

fn default_reflectivity() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub azimuth_deg: f64,
    #[serde(default)]
    pub speed_mps: f64,
    /// Initial range; omitted ranges default to 10 km for every target.
    #[serde(default = "default_range")]
    pub range_m: f64,
    /// `[re, im]` of `beta_k`.
    #[serde(default = "default_reflectivity")]
    pub reflectivity: [f64; 2],
}

impl TargetSpec {
    pub fn new(azimuth_deg: f64, speed_mps: f64) -> Self {
        Self {
            azimuth_deg,
            speed_mps,
            range_m: default_range(),
            reflectivity: default_reflectivity(),
        }
    }

    pub fn to_target(&self) -> Target {
        Target::new(
            rad(self.azimuth_deg),
            self.speed_mps,
            self.range_m,
            C64::new(self.reflectivity[0], self.reflectivity[1]),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JammerSpec {
    pub azimuth_deg: f64,
    #[serde(default = "default_range")]
    pub range_m: f64,
    /// `|beta|^2`.
    pub power: f64,
}

impl JammerSpec {
    pub fn to_jammer(&self) -> Result<Jammer> {
        Jammer::from_power(rad(self.azimuth_deg), self.range_m, self.power)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", deny_unknown_fields)]
pub enum MuSpec {
    Explicit {
        mu: f64,
    },
    /// `(1 + 1/t)` times the noise-derived lower bound.
    LowerBoundScaled {
        t: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PlacementMode {
    /// One placement per scenario, drawn from the base seed.
    #[default]
    Fixed,
    PerTrial,
}

/// Comparison methods the config may name. APES and GLRT are accepted so that
/// reports can state their absence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    MatchedFilter,
    Capon,
    Music,
    Apes,
    Glrt,
}

impl Baseline {
    pub fn is_supported(self) -> bool {
        matches!(
            self,
            Baseline::MatchedFilter | Baseline::Capon | Baseline::Music
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Baseline::MatchedFilter => "matched_filter",
            Baseline::Capon => "capon",
            Baseline::Music => "music",
            Baseline::Apes => "apes",
            Baseline::Glrt => "glrt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "matched_filter" | "mf" => Some(Baseline::MatchedFilter),
            "capon" => Some(Baseline::Capon),
            "music" => Some(Baseline::Music),
            "apes" => Some(Baseline::Apes),
            "glrt" => Some(Baseline::Glrt),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    pub feasibility_tol: f64,
    pub duality_gap_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let d = DantzigConfig::default();
        Self {
            feasibility_tol: d.feasibility_tol,
            duality_gap_tol: d.duality_gap_tol,
            max_iterations: d.max_iterations,
        }
    }
}

fn default_threshold() -> f64 {
    0.5
}

fn default_export() -> usize {
    1
}

/// One Monte Carlo experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub radar: RadarParams,
    pub num_transmit: usize,
    pub num_receive: usize,
    /// Compressed samples per pulse (M).
    pub measurements: usize,
    pub grid: GridSpec,
    pub targets: Vec<TargetSpec>,
    #[serde(default)]
    pub jammer: Option<JammerSpec>,
    pub snr_db: f64,
    pub mu: MuSpec,
    #[serde(default)]
    pub measurement_kind: MeasurementKind,
    #[serde(default)]
    pub measurement_reuse: MeasurementReuse,
    #[serde(default)]
    pub orthonormal_rows: bool,
    #[serde(default)]
    pub waveform_mode: NormalizationMode,
    #[serde(default)]
    pub placement: PlacementMode,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub baselines: Vec<Baseline>,
    /// `tau` for the per-trial support, MSE and PFA, relative to the peak.
    #[serde(default = "default_threshold")]
    pub detection_threshold: f64,
    /// Extra `tau` values summarized as an MSE/PFA sweep.
    #[serde(default)]
    pub threshold_sweep: Vec<f64>,
    #[serde(default)]
    pub solver: SolverSettings,
    /// Number of leading trials whose full estimates are exported.
    #[serde(default = "default_export")]
    pub export_spectra: usize,
    /// Output directory; not part of the scenario hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the canonical JSON with the output directory removed.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn dantzig(&self) -> DantzigConfig {
        DantzigConfig {
            feasibility_tol: self.solver.feasibility_tol,
            duality_gap_tol: self.solver.duality_gap_tol,
            max_iterations: self.solver.max_iterations,
            ..DantzigConfig::default()
        }
    }

    pub fn targets(&self) -> Vec<Target> {
        self.targets.iter().map(TargetSpec::to_target).collect()
    }

    pub fn jammer(&self) -> Result<Option<Jammer>> {
        self.jammer.as_ref().map(JammerSpec::to_jammer).transpose()
    }

    pub fn supported_baselines(&self) -> Vec<Baseline> {
        self.baselines
            .iter()
            .copied()
            .filter(|b| b.is_supported())
            .collect()
    }

    pub fn excluded_baselines(&self) -> Vec<Baseline> {
        self.baselines
            .iter()
            .copied()
            .filter(|b| !b.is_supported())
            .collect()
    }

    /// Checks every precondition the trials rely on and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let p = &self.radar;
        if let Err(e) = p.validate() {
            errs.push(format!("radar: {e}"));
        }
        if self.num_transmit == 0 {
            errs.push("num_transmit must be positive".into());
        }
        if self.num_receive == 0 {
            errs.push("num_receive must be positive".into());
        }
        if self.measurements == 0 {
            errs.push("measurements must be positive".into());
        }
        if self.measurements > p.snapshots_per_pulse {
            errs.push(format!(
                "measurements {} exceed snapshots per pulse {}",
                self.measurements, p.snapshots_per_pulse
            ));
        }
        if self.waveform_mode == NormalizationMode::ColumnOrthonormal
            && self.num_transmit > p.snapshots_per_pulse
        {
            errs.push("orthonormal waveforms need num_transmit <= snapshots_per_pulse".into());
        }
        if self.orthonormal_rows {
            let cols = match self.measurement_kind {
                MeasurementKind::Gaussian => p.snapshots_per_pulse,
                MeasurementKind::Modified => self.num_transmit,
            };
            if self.measurements > cols {
                errs.push(format!("orthonormal rows need measurements <= {cols}"));
            }
        }
        if !self.snr_db.is_finite() {
            errs.push("snr_db must be finite".into());
        }
        match self.mu {
            MuSpec::Explicit { mu } if !(mu > 0.0 && mu.is_finite()) => {
                errs.push(format!("mu must be positive, got {mu}"))
            }
            MuSpec::LowerBoundScaled { t } if !(t > 0.0 && t.is_finite()) => {
                errs.push(format!("lower-bound scalar t must be positive, got {t}"))
            }
            _ => {}
        }
        if !(self.detection_threshold > 0.0 && self.detection_threshold <= 1.0) {
            errs.push("detection_threshold must lie in (0, 1]".into());
        }
        if self.threshold_sweep.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            errs.push("threshold_sweep values must lie in (0, 1]".into());
        }
        if self.solver.max_iterations == 0
            || !(self.solver.feasibility_tol > 0.0)
            || !(self.solver.duality_gap_tol > 0.0)
        {
            errs.push("solver tolerances and iteration limit must be positive".into());
        }
        if self.targets.is_empty() {
            errs.push("at least one target is required".into());
        }
        let limits = ModelLimits::default();
        for (i, t) in self.targets.iter().enumerate() {
            if let Err(e) = t.to_target().validate(p, &limits) {
                errs.push(format!("target {i}: {e}"));
            }
        }
        if let Some(j) = &self.jammer {
            if let Err(e) = j.to_jammer() {
                errs.push(format!("jammer: {e}"));
            }
        }
        if self.baselines.contains(&Baseline::Music)
            && self.num_receive <= self.targets.len() + usize::from(self.jammer.is_some())
        {
            errs.push("MUSIC needs more receive nodes than sources (targets plus jammer)".into());
        }
        match self.grid.build(p) {
            Err(e) => errs.push(format!("grid: {e}")),
            Ok(grid) => {
                let mut cells: Vec<usize> = Vec::new();
                for (i, t) in self.targets().iter().enumerate() {
                    let c = grid.nearest(t.azimuth_rad, t.doppler_hz(p));
                    if cells.contains(&c) {
                        errs.push(format!(
                            "target {i} shares its nearest grid cell with another target"
                        ));
                    }
                    cells.push(c);
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}
