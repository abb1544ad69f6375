//! Scenario configuration, figure presets, the parallel Monte Carlo runner and
//! result files.

mod config;
mod output;
mod presets;
mod runner;

pub use config::{
    Baseline, GridSpec, JammerSpec, MuSpec, PlacementMode, ScenarioConfig, SolverSettings,
    TargetSpec,
};
pub use output::{read_summary, write_results, OutputFiles};
pub use presets::{preset, PRESET_NAMES};
pub use runner::{
    run_scenario, run_scenario_with_workers, run_trial, worker_count, MethodSummary, MethodTrial,
    RecoveryDiagnostics, RunResult, RunSummary, SweepPoint, TrialContext, TrialRecord, WORKERS_ENV,
};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An `f64` that serializes non-finite values as the strings `"inf"`, `"-inf"`
/// and `"nan"`, so JSON can carry the infinite ratio sentinels.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Real(v)),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(Real(f64::INFINITY)),
                "-inf" => Ok(Real(f64::NEG_INFINITY)),
                "nan" => Ok(Real(f64::NAN)),
                _ => Err(serde::de::Error::custom(format!("not a number: {t}"))),
            },
        }
    }
}
