use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::metrics::EmpiricalCdf;
use crate::scene::deg;

use super::runner::{RunResult, RunSummary};

/// Paths written by [`write_results`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputFiles {
    pub summary: PathBuf,
    pub config: PathBuf,
    pub trials: Vec<PathBuf>,
    pub cdfs: Vec<PathBuf>,
    pub spectra: Vec<PathBuf>,
    pub profiles: Vec<PathBuf>,
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn write(path: PathBuf, text: &str, list: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, text)?;
    list.push(path);
    Ok(())
}

/// Trial table of one method. Columns: trial, seed, `prr_1..prr_K`, pjr, mse,
/// pfa, residual_norm, status, wall_ms. Baseline tables leave residual_norm empty.
fn trials_csv(result: &RunResult, method: usize) -> String {
    let k = result.context.target_cells.len();
    let mut s = String::from("trial,seed,");
    for i in 1..=k {
        let _ = write!(s, "prr_{i},");
    }
    s.push_str("pjr,mse,pfa,residual_norm,status,wall_ms\n");
    for r in &result.records {
        let Some(m) = r.methods.get(method) else {
            continue;
        };
        let _ = write!(s, "{},{},", r.trial, r.seed);
        match &m.metrics {
            Some(t) => {
                for v in &t.prr_per_target {
                    let _ = write!(s, "{},", num(*v));
                }
                let _ = write!(s, "{},{},{},", opt(t.pjr), num(t.mse), num(t.pfa));
            }
            None => s.push_str(&",".repeat(k + 3)),
        }
        let (residual, status) = match (method, &r.diagnostics, &m.error) {
            (_, _, Some(_)) => (String::new(), "error".to_string()),
            (0, Some(d), None) => (num(d.residual_inf_norm), d.status.clone()),
            _ => (String::new(), "ok".to_string()),
        };
        let _ = writeln!(s, "{residual},{status},{:.3}", r.wall_ms);
    }
    s
}

fn cdf_csv(samples: &[f64]) -> String {
    let mut s = String::from("value,cumulative_probability\n");
    if let Ok(cdf) = EmpiricalCdf::new(samples) {
        for (v, p) in cdf.steps() {
            let _ = writeln!(s, "{},{}", num(v), num(p));
        }
    }
    s
}

fn grid_prefix(result: &RunResult, i: usize) -> String {
    let p = result.context.config.radar;
    let g = result.context.grid.points()[i];
    format!(
        "{},{}",
        num(deg(g.azimuth_rad)),
        num(p.speed_mps(g.doppler_hz))
    )
}

/// Writes `summary.json`, `config.json`, one trial table per method, PRR/PJR
/// CDFs, the first `export_spectra` estimates and per-point amplitude profiles.
pub fn write_results(result: &RunResult, dir: &Path) -> Result<OutputFiles> {
    fs::create_dir_all(dir)?;
    let mut out = OutputFiles {
        summary: dir.join("summary.json"),
        config: dir.join("config.json"),
        ..OutputFiles::default()
    };
    fs::write(
        &out.summary,
        serde_json::to_string_pretty(&result.summary)? + "\n",
    )?;
    fs::write(&out.config, result.context.config.to_json()? + "\n")?;

    let methods = result.context.methods();
    for (i, name) in methods.iter().enumerate() {
        let file = if i == 0 {
            "trials.csv".to_string()
        } else {
            format!("trials_{name}.csv")
        };
        write(dir.join(file), &trials_csv(result, i), &mut out.trials)?;
        write(
            dir.join(format!("cdf_prr_{name}.csv")),
            &cdf_csv(&result.prr_samples(i)),
            &mut out.cdfs,
        )?;
        if result.context.jammer_cell.is_some() {
            write(
                dir.join(format!("cdf_pjr_{name}.csv")),
                &cdf_csv(&result.pjr_samples(i)),
                &mut out.cdfs,
            )?;
        }
    }

    let header = format!("angle_deg,doppler_mps,{}\n", methods.join(","));
    for r in result
        .records
        .iter()
        .take(result.context.config.export_spectra)
    {
        let mut s = header.clone();
        for n in 0..result.context.grid.len() {
            s.push_str(&grid_prefix(result, n));
            for m in &r.methods {
                let _ = write!(
                    s,
                    ",{}",
                    m.magnitudes.get(n).map_or(String::new(), |v| num(*v))
                );
            }
            s.push('\n');
        }
        write(
            dir.join(format!("spectrum_trial{}.csv", r.trial)),
            &s,
            &mut out.spectra,
        )?;
    }

    for (i, name) in methods.iter().enumerate() {
        let Some((mean, std)) = result.amplitude_profile(i) else {
            continue;
        };
        let mut s = String::from("angle_deg,doppler_mps,mean,std\n");
        for n in 0..mean.len() {
            let _ = writeln!(
                s,
                "{},{},{}",
                grid_prefix(result, n),
                num(mean[n]),
                num(std[n])
            );
        }
        write(
            dir.join(format!("profile_{name}.csv")),
            &s,
            &mut out.profiles,
        )?;
    }
    Ok(out)
}

pub fn read_summary(path: &Path) -> Result<RunSummary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
