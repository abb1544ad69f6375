//! Runs a scenario preset (or a JSON config file) through the parallel Monte
//! Carlo harness and writes the result tables.
//!
//! `cargo run --release --example monte_carlo -- fig4 20 /tmp/fig4`

use std::path::PathBuf;

use csmimo::harness::{preset, run_scenario, write_results, ScenarioConfig};

fn main() -> csmimo::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig4".into());
    let trials: usize = args.next().and_then(|v| v.parse().ok()).unwrap_or(10);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "target/monte_carlo".into()));

    let mut config = match preset(&name) {
        Some(c) => c,
        None => ScenarioConfig::from_json(&std::fs::read_to_string(&name)?)?,
    };
    config.trials = trials;
    let result = run_scenario(&config)?;
    let files = write_results(&result, &out)?;

    let s = &result.summary;
    println!(
        "{} ({} trials, hash {})",
        s.scenario,
        s.trials,
        &s.scenario_hash[..12]
    );
    for m in &s.methods {
        let prr: Vec<String> = m
            .prr_median
            .iter()
            .map(|v| format!("{:.1}", 10.0 * v.0.log10()))
            .collect();
        println!(
            "{:>8}: top-K hit rate {:.2}, median PRR [{}] dB, failures {}",
            m.method,
            m.top_k_hit_rate,
            prr.join(", "),
            m.failed
        );
    }
    for note in &s.notes {
        println!("note: {note}");
    }
    println!(
        "wrote {} and {} trial tables",
        files.summary.display(),
        files.trials.len()
    );
    Ok(())
}
