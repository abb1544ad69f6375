use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use csmimo::harness::{
    preset, run_scenario, write_results, Baseline, ScenarioConfig, PRESET_NAMES,
};
use csmimo::metrics::{analytic_sjr, empirical_sjr, EmpiricalSjrConfig, SjrInputs};
use csmimo::scene::{rad, sample_node_placement, Jammer, Target};
use csmimo::sensing::{
    select_grid_step, CorrelationStudy, GridPoint, GridRegion, MeasurementKind, MeasurementReuse,
    MeasurementSet, SensingOperator,
};
use csmimo::waveform::{generate_qpsk, NormalizationMode};
use csmimo::{Error, Result};

#[derive(Parser)]
#[command(
    name = "csmimo",
    version,
    about = "Compressive-sensing MIMO radar experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo scenario from a JSON config or a named preset.
    Run(RunArgs),
    /// Analytic and empirical signal-to-jammer ratios.
    Sjr(SjrArgs),
    /// Pick the coarsest grid step whose half-step correlation reaches a threshold.
    Gridsel(GridselArgs),
    /// Column-correlation studies over receive nodes, transmit nodes and pulses.
    Correlate(CorrelateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gaussian,
    Modified,
}

impl From<Kind> for MeasurementKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Gaussian => MeasurementKind::Gaussian,
            Kind::Modified => MeasurementKind::Modified,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Named preset (see `run --list-presets`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    measurement: Option<Kind>,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config in JSON.
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    /// Output directory for CSV and JSON results.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated comparison methods: matched_filter, capon, music, apes, glrt.
    #[arg(long, value_delimiter = ',')]
    baselines: Option<Vec<String>>,
    /// Print the preset names and exit.
    #[arg(long)]
    list_presets: bool,
    /// Print the resolved config and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Args)]
struct SjrArgs {
    #[command(flatten)]
    common: Common,
    /// Target angular separation in degrees (two stationary targets).
    #[arg(long, default_value_t = 0.4)]
    separation_deg: f64,
    #[arg(long, default_value_t = 400.0)]
    jammer_power: f64,
    #[arg(long, default_value_t = 30)]
    num_transmit: usize,
    #[arg(long, default_value_t = 30)]
    measurements: usize,
    #[arg(long, default_value_t = 1)]
    pulses: usize,
    /// Orthonormalize the waveform columns.
    #[arg(long)]
    orthonormal: bool,
}

#[derive(Args)]
struct GridselArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
    /// Candidate angle steps in degrees, coarsest first.
    #[arg(long, value_delimiter = ',', default_value = "1.0,0.5,0.4,0.3,0.2,0.1")]
    angle_steps: Vec<f64>,
    /// Candidate speed steps in m/s, one per angle step; ignored for stationary grids.
    #[arg(long, value_delimiter = ',')]
    speed_steps: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Study {
    Receive,
    Transmit,
    Pulses,
}

#[derive(Args)]
struct CorrelateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Study::Receive)]
    study: Study,
    /// Swept values; defaults depend on the study.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<usize>>,
    /// Angular separation of the two hypotheses in degrees.
    #[arg(long, default_value_t = 0.2)]
    angle_sep_deg: f64,
    /// Speed separation of the two hypotheses in m/s.
    #[arg(long, default_value_t = 0.0)]
    speed_sep_mps: f64,
}

fn base_config(common: &Common, path: Option<&PathBuf>) -> Result<ScenarioConfig> {
    let mut cfg = match (path, &common.preset) {
        (Some(p), None) => ScenarioConfig::from_json(&std::fs::read_to_string(p)?)?,
        (None, Some(name)) => {
            preset(name).ok_or_else(|| Error::Config(vec![format!("unknown preset {name}")]))?
        }
        (Some(_), Some(_)) => {
            return Err(Error::Config(vec![
                "give either a config path or --preset, not both".into(),
            ]))
        }
        (None, None) => preset("fig2").expect("fig2 preset exists"),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(t) = common.trials {
        cfg.trials = t;
    }
    if let Some(k) = common.measurement {
        cfg.measurement_kind = k.into();
    }
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<serde_json::Value> {
    if args.list_presets {
        return Ok(json!(PRESET_NAMES));
    }
    let mut cfg = base_config(&args.common, args.config.as_ref())?;
    if let Some(list) = &args.baselines {
        let mut parsed = Vec::new();
        let mut bad = Vec::new();
        for name in list.iter().filter(|s| !s.trim().is_empty()) {
            match Baseline::parse(name) {
                Some(b) => parsed.push(b),
                None => bad.push(format!("unknown baseline {name}")),
            }
        }
        if !bad.is_empty() {
            return Err(Error::Config(bad));
        }
        cfg.baselines = parsed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = Some(out.display().to_string());
    }
    if args.dump_config {
        return Ok(serde_json::to_value(&cfg)?);
    }
    let result = run_scenario(&cfg)?;
    if let Some(dir) = &cfg.output_dir {
        write_results(&result, std::path::Path::new(dir))?;
    }
    Ok(serde_json::to_value(&result.summary)?)
}

fn sjr(args: SjrArgs) -> Result<serde_json::Value> {
    let cfg = base_config(&args.common, None)?;
    let params = cfg.radar.with_pulses(args.pulses);
    let half = rad(args.separation_deg / 2.0);
    let targets = vec![Target::stationary(-half), Target::stationary(half)];
    let jammer = Jammer::from_power(rad(7.0), 10_000.0, args.jammer_power)?;
    let kind: MeasurementKind = args
        .common
        .measurement
        .map_or(MeasurementKind::Gaussian, Into::into);
    let inputs = SjrInputs {
        params,
        targets: targets.clone(),
        jammer,
        num_transmit: args.num_transmit,
        measurements: args.measurements,
    };
    let mut report = analytic_sjr(&inputs, kind);
    let empirical = empirical_sjr(&EmpiricalSjrConfig {
        params,
        num_transmit: args.num_transmit,
        num_receive: 1,
        measurements: args.measurements,
        kind,
        waveform_mode: if args.orthonormal {
            NormalizationMode::ColumnOrthonormal
        } else {
            NormalizationMode::RawQpsk
        },
        targets,
        jammer: Some(jammer),
        trials: args.common.trials.unwrap_or(500),
        seed: args.common.seed.unwrap_or(0),
    })?;
    report.empirical = Some(empirical.sjr);
    Ok(json!({ "kind": kind, "report": report, "empirical": empirical }))
}

fn gridsel(args: GridselArgs) -> Result<serde_json::Value> {
    let cfg = base_config(&args.common, None)?;
    let p = cfg.radar;
    let seed = cfg.seed;
    let placement = sample_node_placement(&p, cfg.num_transmit, cfg.num_receive, seed)?;
    let x = generate_qpsk(
        p.snapshots_per_pulse,
        cfg.num_transmit,
        cfg.waveform_mode,
        seed.wrapping_add(1),
    )?;
    let ms = MeasurementSet::generate(
        cfg.measurement_kind,
        cfg.measurements,
        &x,
        cfg.num_receive,
        p.num_pulses,
        cfg.measurement_reuse,
        cfg.orthonormal_rows,
        seed.wrapping_add(2),
    )?;
    let op = SensingOperator::new(&p, &placement, &x, &ms)?;
    let g = cfg.grid;
    let region = GridRegion {
        angle_start_rad: rad(g.angle_start_deg),
        angle_stop_rad: rad(g.angle_stop_deg),
        doppler_start_hz: p.doppler_hz(g.speed_start_mps),
        doppler_stop_hz: p.doppler_hz(g.speed_stop_mps),
    };
    let speeds = args
        .speed_steps
        .unwrap_or_else(|| vec![g.speed_step_mps; args.angle_steps.len()]);
    if speeds.len() != args.angle_steps.len() {
        return Err(Error::Config(vec![
            "--speed-steps needs one value per angle step".into(),
        ]));
    }
    let candidates: Vec<(f64, f64)> = args
        .angle_steps
        .iter()
        .zip(&speeds)
        .map(|(&a, &v)| (rad(a), p.doppler_hz(v)))
        .collect();
    let sel = select_grid_step(&op, &region, &candidates, args.threshold)?;
    let scores: Vec<_> = sel
        .scores
        .iter()
        .map(|s| {
            json!({
                "angle_step_deg": s.angle_step_rad.to_degrees(),
                "speed_step_mps": p.speed_mps(s.doppler_step_hz),
                "average_correlation": s.average_correlation,
            })
        })
        .collect();
    Ok(json!({
        "scenario": cfg.name,
        "threshold": args.threshold,
        "angle_step_deg": sel.angle_step_rad.to_degrees(),
        "speed_step_mps": p.speed_mps(sel.doppler_step_hz),
        "scores": scores,
    }))
}

fn correlate(args: CorrelateArgs) -> Result<serde_json::Value> {
    let cfg = base_config(&args.common, None)?;
    let seeds = args.common.trials.unwrap_or(200) as u64;
    let base = args.common.seed.unwrap_or(0);
    let kind: MeasurementKind = args
        .common
        .measurement
        .map_or(MeasurementKind::Gaussian, Into::into);
    let values = args.values.unwrap_or_else(|| match args.study {
        Study::Receive => vec![1, 5, 25, 125],
        Study::Transmit => vec![5, 15, 45],
        Study::Pulses => vec![1, 2, 4, 8],
    });
    let first = GridPoint::new(0.0, 0.0);
    let second = GridPoint::new(
        rad(args.angle_sep_deg),
        cfg.radar.doppler_hz(args.speed_sep_mps),
    );
    let mut rows = Vec::new();
    for &v in &values {
        let mut study = CorrelationStudy {
            params: cfg.radar,
            num_transmit: cfg.num_transmit,
            num_receive: 1,
            measurements: cfg.measurements,
            kind,
            reuse: MeasurementReuse::PerNode,
            waveform_mode: cfg.waveform_mode,
            first,
            second,
        };
        match args.study {
            Study::Receive => study.num_receive = v,
            Study::Transmit => study.num_transmit = v,
            Study::Pulses => study.params = study.params.with_pulses(v),
        }
        if kind == MeasurementKind::Modified {
            study.measurements = study.measurements.min(study.num_transmit);
        }
        let range = base..base + seeds;
        rows.push(json!({
            "value": v,
            "mean_normalized_correlation": study.mean_normalized(range.clone())?,
            "mean_auto_cross_ratio": study.mean_auto_cross_ratio(range)?,
        }));
    }
    Ok(
        json!({ "study": format!("{:?}", kind).to_lowercase(), "sweep": match args.study {
        Study::Receive => "num_receive",
        Study::Transmit => "num_transmit",
        Study::Pulses => "num_pulses",
    }, "seeds": seeds, "rows": rows }),
    )
}

fn error_json(e: &Error) -> serde_json::Value {
    let (kind, details) = match e {
        Error::Config(v) => ("config", v.clone()),
        Error::InvalidParameter(_) => ("invalid_parameter", Vec::new()),
        Error::DimensionMismatch { .. } => ("dimension_mismatch", Vec::new()),
        Error::RankDeficient { .. } => ("rank_deficient", Vec::new()),
        Error::NoFeasibleStep { .. } => ("no_feasible_step", Vec::new()),
        Error::NoDetection => ("no_detection", Vec::new()),
        Error::Numerical(_) => ("numerical", Vec::new()),
        Error::Io(_) => ("io", Vec::new()),
        Error::Json(_) => ("json", Vec::new()),
    };
    json!({ "error": kind, "message": e.to_string(), "details": details })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sjr(a) => sjr(a),
        Command::Gridsel(a) => gridsel(a),
        Command::Correlate(a) => correlate(a),
    };
    match result {
        Ok(v) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&v).expect("JSON value serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&error_json(&e)).expect("JSON value serializes")
            );
            ExitCode::from(if matches!(e, Error::Config(_)) { 2 } else { 1 })
        }
    }
}
