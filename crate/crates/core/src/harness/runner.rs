use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{covariance_spectrum, matched_filter, SpectrumMethod};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::metrics::{mse_pfa, pjr, prr, EmpiricalCdf, TrialMetrics};
use crate::rng::derive_seed;
use crate::scene::{rad, sample_node_placement, Jammer, NodePlacement, Scene, Target};
use crate::sensing::{build_sensing_problem, AngleDopplerGrid, MeasurementSet};
use crate::signal::synthesize_all;
use crate::solver::{detect_support, effective_noise_variance, solve_dantzig, top_k, MuPolicy};
use crate::waveform::{generate_jammer_waveform, generate_qpsk, noise_variance_for_snr};

use super::config::{Baseline, MuSpec, PlacementMode, ScenarioConfig};
use super::Real;

/// Environment variable that overrides the worker count.
pub const WORKERS_ENV: &str = "CSMIMO_WORKERS";

/// Seed stream of the scenario-wide placement in fixed-placement mode.
const FIXED_PLACEMENT_STREAM: u64 = 0x706c_6163;

/// Worker threads: the override variable when set to a positive integer, else
/// the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Scenario state shared read-only by every trial.
#[derive(Clone, Debug)]
pub struct TrialContext {
    pub config: ScenarioConfig,
    pub hash: String,
    pub grid: AngleDopplerGrid,
    pub targets: Vec<Target>,
    pub jammer: Option<Jammer>,
    /// Nearest grid cell of every target.
    pub target_cells: Vec<usize>,
    /// Jammer cell, when the jammer lies on the grid.
    pub jammer_cell: Option<usize>,
    pub fixed_placement: Option<NodePlacement>,
    pub noise_variance: f64,
}

impl TrialContext {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let p = config.radar;
        let grid = config.grid.build(&p)?;
        let targets = config.targets();
        let jammer = config.jammer()?;
        let target_cells = targets
            .iter()
            .map(|t| grid.nearest(t.azimuth_rad, t.doppler_hz(&p)))
            .collect();
        let angle_tol = grid.angle_step().unwrap_or(rad(1e-6)) * 1e-6;
        let doppler_tol = grid.doppler_step().unwrap_or(1.0) * 1e-6;
        let jammer_cell =
            jammer.and_then(|j| grid.find(j.azimuth_rad, 0.0, angle_tol, doppler_tol));
        let fixed_placement = match config.placement {
            PlacementMode::Fixed => Some(sample_node_placement(
                &p,
                config.num_transmit,
                config.num_receive,
                derive_seed(config.seed, FIXED_PLACEMENT_STREAM),
            )?),
            PlacementMode::PerTrial => None,
        };
        Ok(Self {
            hash: config.hash(),
            config: config.clone(),
            grid,
            targets,
            jammer,
            target_cells,
            jammer_cell,
            fixed_placement,
            noise_variance: noise_variance_for_snr(config.snr_db, p.snapshots_per_pulse),
        })
    }

    /// Method labels in record order: the CS estimate first, then supported baselines.
    pub fn methods(&self) -> Vec<String> {
        std::iter::once("cs".to_string())
            .chain(
                self.config
                    .supported_baselines()
                    .iter()
                    .map(|b| b.name().to_string()),
            )
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub tau: f64,
    pub mse: f64,
    pub pfa: f64,
}

/// Outcome of one method in one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodTrial {
    pub method: String,
    pub metrics: Option<TrialMetrics>,
    /// The `K` largest magnitudes sit exactly on the target cells.
    pub top_k_hit: bool,
    pub sweep: Vec<SweepPoint>,
    pub error: Option<String>,
    /// `|s_n|` over the grid; kept in memory for spectra and profiles only.
    #[serde(skip)]
    pub magnitudes: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryDiagnostics {
    pub mu: f64,
    pub objective: f64,
    pub residual_inf_norm: f64,
    pub iterations: usize,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub scenario_hash: String,
    /// CS first, then each supported baseline.
    pub methods: Vec<MethodTrial>,
    pub diagnostics: Option<RecoveryDiagnostics>,
    pub wall_ms: f64,
}

fn evaluate(ctx: &TrialContext, method: &str, estimate: &CVector) -> MethodTrial {
    let tau = ctx.config.detection_threshold;
    let cells = &ctx.target_cells;
    let build = || -> Result<(TrialMetrics, Vec<SweepPoint>)> {
        let prr_per_target = prr(estimate, cells, ctx.jammer_cell)?;
        let pjr = ctx
            .jammer_cell
            .map(|j| pjr(estimate, cells, j))
            .transpose()?;
        let (mse, pfa) = mse_pfa(estimate, cells, tau)?;
        let sweep = ctx
            .config
            .threshold_sweep
            .iter()
            .map(|&t| mse_pfa(estimate, cells, t).map(|(mse, pfa)| SweepPoint { tau: t, mse, pfa }))
            .collect::<Result<_>>()?;
        let metrics = TrialMetrics {
            prr_per_target,
            pjr,
            mse,
            pfa,
            detected_support: detect_support(estimate, tau),
        };
        Ok((metrics, sweep))
    };
    let mut top = top_k(estimate, cells.len());
    top.sort_unstable();
    let mut truth = cells.clone();
    truth.sort_unstable();
    let top_k_hit = estimate.iter().any(|v| v.norm() > 0.0) && top == truth;
    let magnitudes = estimate.iter().map(|v| v.norm()).collect();
    match build() {
        Ok((metrics, sweep)) => MethodTrial {
            method: method.to_string(),
            metrics: Some(metrics),
            top_k_hit,
            sweep,
            error: None,
            magnitudes,
        },
        Err(e) => failed(method, &e),
    }
}

fn failed(method: &str, e: &Error) -> MethodTrial {
    MethodTrial {
        method: method.to_string(),
        metrics: None,
        top_k_hit: false,
        sweep: Vec::new(),
        error: Some(e.to_string()),
        magnitudes: Vec::new(),
    }
}

/// One Monte Carlo trial with seed `base + trial`. Failures are captured in
/// the record rather than returned.
pub fn run_trial(ctx: &TrialContext, trial: usize) -> TrialRecord {
    let start = Instant::now();
    let cfg = &ctx.config;
    let seed = cfg.seed.wrapping_add(trial as u64);
    let mut record = TrialRecord {
        trial,
        seed,
        scenario_hash: ctx.hash.clone(),
        methods: Vec::new(),
        diagnostics: None,
        wall_ms: 0.0,
    };
    if let Err(e) = run_trial_inner(ctx, seed, &mut record) {
        record.methods.clear();
        for m in ctx.methods() {
            record.methods.push(failed(&m, &e));
        }
    }
    record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    record
}

fn run_trial_inner(ctx: &TrialContext, seed: u64, record: &mut TrialRecord) -> Result<()> {
    let cfg = &ctx.config;
    let p = cfg.radar;
    let placement = match &ctx.fixed_placement {
        Some(pl) => pl.clone(),
        None => sample_node_placement(&p, cfg.num_transmit, cfg.num_receive, derive_seed(seed, 0))?,
    };
    let x = generate_qpsk(
        p.snapshots_per_pulse,
        cfg.num_transmit,
        cfg.waveform_mode,
        derive_seed(seed, 1),
    )?;
    let jwf = generate_jammer_waveform(p.snapshots_per_pulse, p.num_pulses, derive_seed(seed, 2));
    let ms = MeasurementSet::generate(
        cfg.measurement_kind,
        cfg.measurements,
        &x,
        cfg.num_receive,
        p.num_pulses,
        cfg.measurement_reuse,
        cfg.orthonormal_rows,
        derive_seed(seed, 3),
    )?;
    let scene = Scene {
        params: p,
        placement,
        targets: ctx.targets.clone(),
        jammer: ctx.jammer,
    };
    let pulses = synthesize_all(
        &scene,
        &x,
        Some(&jwf),
        ctx.noise_variance,
        derive_seed(seed, 4),
    )?;

    let problem = build_sensing_problem(&p, &scene.placement, &x, &ctx.grid, &ms, &pulses)?;
    let mut dz = cfg.dantzig();
    match cfg.mu {
        MuSpec::Explicit { mu } => dz.mu_policy = MuPolicy::Explicit { mu },
        MuSpec::LowerBoundScaled { t } => {
            dz.mu_policy = MuPolicy::LowerBoundScaled {
                effective_noise_variance: effective_noise_variance(&problem, ctx.noise_variance),
            };
            dz.t_scalar = t;
        }
    }
    record.methods.push(match solve_dantzig(&problem, &dz) {
        Ok(res) => {
            record.diagnostics = Some(RecoveryDiagnostics {
                mu: res.mu,
                objective: res.objective,
                residual_inf_norm: res.residual_inf_norm,
                iterations: res.iterations,
                status: format!("{:?}", res.status).to_lowercase(),
            });
            evaluate(ctx, "cs", &res.estimate)
        }
        Err(e) => failed("cs", &e),
    });

    let sources = ctx.targets.len() + usize::from(ctx.jammer.is_some());
    for b in cfg.supported_baselines() {
        let spectrum = match b {
            Baseline::MatchedFilter => matched_filter(&pulses, &p, &scene.placement, &x, &ctx.grid),
            Baseline::Capon => covariance_spectrum(
                &pulses,
                &p,
                &scene.placement,
                &x,
                &ctx.grid,
                SpectrumMethod::Capon,
                sources,
                None,
            ),
            Baseline::Music => covariance_spectrum(
                &pulses,
                &p,
                &scene.placement,
                &x,
                &ctx.grid,
                SpectrumMethod::Music,
                sources,
                None,
            ),
            Baseline::Apes | Baseline::Glrt => {
                unreachable!("unsupported baselines are filtered out")
            }
        };
        record.methods.push(match spectrum {
            Ok(s) => evaluate(ctx, b.name(), &s.amplitudes()),
            Err(e) => failed(b.name(), &e),
        });
    }
    Ok(())
}

/// Aggregates of one method over the successful trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub succeeded: usize,
    pub failed: usize,
    /// Median PRR per target.
    pub prr_median: Vec<Real>,
    pub pjr_median: Option<Real>,
    pub mse_mean: Option<f64>,
    pub pfa_mean: Option<f64>,
    /// Fraction of all trials whose `K` largest entries are the target cells.
    pub top_k_hit_rate: f64,
    pub sweep: Vec<SweepPoint>,
}

/// Deterministic run summary; holds no timing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub scenario_hash: String,
    pub trials: usize,
    pub grid_points: usize,
    pub target_cells: Vec<usize>,
    pub jammer_cell: Option<usize>,
    pub mean_mu: Option<f64>,
    pub solver_status_counts: Vec<(String, usize)>,
    pub methods: Vec<MethodSummary>,
    /// Requested comparison methods that are not implemented.
    pub excluded_baselines: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub context: TrialContext,
    pub records: Vec<TrialRecord>,
    pub summary: RunSummary,
}

impl RunResult {
    /// Pooled per-target PRR samples of one method.
    pub fn prr_samples(&self, method: usize) -> Vec<f64> {
        self.records
            .iter()
            .filter_map(|r| r.methods.get(method)?.metrics.as_ref())
            .flat_map(|m| m.prr_per_target.iter().copied())
            .collect()
    }

    pub fn pjr_samples(&self, method: usize) -> Vec<f64> {
        self.records
            .iter()
            .filter_map(|r| r.methods.get(method)?.metrics.as_ref()?.pjr)
            .collect()
    }

    /// Mean and standard deviation of `|s_n|` per grid point over successful trials.
    pub fn amplitude_profile(&self, method: usize) -> Option<(Vec<f64>, Vec<f64>)> {
        let rows: Vec<&Vec<f64>> = self
            .records
            .iter()
            .filter_map(|r| r.methods.get(method))
            .filter(|m| m.metrics.is_some() && !m.magnitudes.is_empty())
            .map(|m| &m.magnitudes)
            .collect();
        let n = rows.first()?.len();
        let count = rows.len() as f64;
        let mean: Vec<f64> = (0..n)
            .map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / count)
            .collect();
        let std = (0..n)
            .map(|i| (rows.iter().map(|r| (r[i] - mean[i]).powi(2)).sum::<f64>() / count).sqrt())
            .collect();
        Some((mean, std))
    }
}

fn median(samples: &[f64]) -> Option<Real> {
    EmpiricalCdf::new(samples).ok().map(|c| Real(c.median()))
}

fn summarize(ctx: &TrialContext, records: &[TrialRecord]) -> RunSummary {
    let cfg = &ctx.config;
    let methods = ctx
        .methods()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let ok: Vec<&TrialMetrics> = records
                .iter()
                .filter_map(|r| r.methods.get(i)?.metrics.as_ref())
                .collect();
            let prr_median = (0..ctx.target_cells.len())
                .filter_map(|k| median(&ok.iter().map(|m| m.prr_per_target[k]).collect::<Vec<_>>()))
                .collect();
            let pjrs: Vec<f64> = ok.iter().filter_map(|m| m.pjr).collect();
            let mean = |f: &dyn Fn(&TrialMetrics) -> f64| {
                (!ok.is_empty()).then(|| ok.iter().map(|m| f(m)).sum::<f64>() / ok.len() as f64)
            };
            let sweep = cfg
                .threshold_sweep
                .iter()
                .enumerate()
                .map(|(j, &tau)| {
                    let pts: Vec<&SweepPoint> = records
                        .iter()
                        .filter_map(|r| r.methods.get(i)?.sweep.get(j))
                        .collect();
                    let n = pts.len().max(1) as f64;
                    SweepPoint {
                        tau,
                        mse: pts.iter().map(|p| p.mse).sum::<f64>() / n,
                        pfa: pts.iter().map(|p| p.pfa).sum::<f64>() / n,
                    }
                })
                .collect();
            let hits = records
                .iter()
                .filter(|r| r.methods.get(i).is_some_and(|m| m.top_k_hit))
                .count();
            MethodSummary {
                method: name.clone(),
                succeeded: ok.len(),
                failed: records.len() - ok.len(),
                prr_median,
                pjr_median: median(&pjrs),
                mse_mean: mean(&|m| m.mse),
                pfa_mean: mean(&|m| m.pfa),
                top_k_hit_rate: if records.is_empty() {
                    0.0
                } else {
                    hits as f64 / records.len() as f64
                },
                sweep,
            }
        })
        .collect();

    let mus: Vec<f64> = records
        .iter()
        .filter_map(|r| r.diagnostics.as_ref().map(|d| d.mu))
        .collect();
    let mut status_counts: Vec<(String, usize)> = Vec::new();
    for r in records {
        let s = r
            .diagnostics
            .as_ref()
            .map_or("error".to_string(), |d| d.status.clone());
        match status_counts.iter_mut().find(|(k, _)| *k == s) {
            Some(e) => e.1 += 1,
            None => status_counts.push((s, 1)),
        }
    }
    status_counts.sort();

    let mut notes = Vec::new();
    if ctx
        .targets
        .windows(2)
        .all(|w| w[0].initial_range_m == w[1].initial_range_m)
    {
        notes.push("all targets share one initial range; phi is real".to_string());
    }
    if ctx.jammer.is_some() && ctx.jammer_cell.is_none() {
        notes.push("jammer is off the grid; PJR is not reported".to_string());
    }
    let p = cfg.radar;
    for (k, (t, &c)) in ctx.targets.iter().zip(&ctx.target_cells).enumerate() {
        let g = ctx.grid.points()[c];
        if (g.azimuth_rad - t.azimuth_rad).abs() > 1e-9
            || (g.doppler_hz - t.doppler_hz(&p)).abs() > 1e-6
        {
            notes.push(format!(
                "target {k} is off the grid; metrics use its nearest cell {c}"
            ));
        }
    }

    RunSummary {
        scenario: cfg.name.clone(),
        scenario_hash: ctx.hash.clone(),
        trials: records.len(),
        grid_points: ctx.grid.len(),
        target_cells: ctx.target_cells.clone(),
        jammer_cell: ctx.jammer_cell,
        mean_mu: (!mus.is_empty()).then(|| mus.iter().sum::<f64>() / mus.len() as f64),
        solver_status_counts: status_counts,
        methods,
        excluded_baselines: cfg
            .excluded_baselines()
            .iter()
            .map(|b| b.name().to_string())
            .collect(),
        notes,
    }
}

/// Validates `config`, runs every trial on a worker pool and reduces the
/// records in trial order.
/// Runs every trial on [`worker_count`] threads.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunResult> {
    run_scenario_with_workers(config, worker_count())
}

/// Runs every trial on `workers` threads. Results do not depend on `workers`.
pub fn run_scenario_with_workers(config: &ScenarioConfig, workers: usize) -> Result<RunResult> {
    let ctx = TrialContext::new(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    let records: Vec<TrialRecord> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(&ctx, i))
            .collect()
    });
    let summary = summarize(&ctx, &records);
    Ok(RunResult {
        context: ctx,
        records,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::preset;

    fn small() -> ScenarioConfig {
        let mut c = preset("fig4").unwrap();
        c.radar = c.radar.with_snapshots(64);
        c.num_transmit = 8;
        c.num_receive = 4;
        c.measurements = 8;
        c.grid = crate::harness::GridSpec::angles(-2.0, 2.0, 0.2);
        c.jammer = None;
        c.mu = MuSpec::LowerBoundScaled { t: 3.0 };
        c.trials = 3;
        c.baselines = vec![Baseline::Capon, Baseline::Glrt];
        c
    }

    #[test]
    fn records_follow_trial_order() {
        let r = run_scenario(&small()).unwrap();
        assert_eq!(
            r.records.iter().map(|t| t.trial).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        assert_eq!(r.records[2].seed, 3);
        assert_eq!(r.summary.excluded_baselines, vec!["glrt"]);
        assert_eq!(r.summary.methods.len(), 2);
        assert!(r
            .records
            .iter()
            .all(|t| t.scenario_hash == r.summary.scenario_hash));
    }

    #[test]
    fn zero_trials() {
        let mut c = small();
        c.trials = 0;
        let r = run_scenario(&c).unwrap();
        assert!(r.records.is_empty());
        assert_eq!(r.summary.methods[0].succeeded, 0);
        assert_eq!(r.summary.methods[0].mse_mean, None);
    }

    #[test]
    fn invalid_config_lists_problems() {
        let mut c = small();
        c.num_receive = 0;
        c.detection_threshold = 2.0;
        match run_scenario(&c) {
            Err(Error::Config(v)) => assert!(v.len() >= 2, "{v:?}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }
}
