use std::fmt::Write as _;

use cdseq_core::driver::multi_start;
use cdseq_core::objective_f_theta;
use clap::Args;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::manifest::{create_dir, write_json, Manifest};
use crate::options::{
    config_json, isl_db, metrics, parse_theta, psl_db, seeds_of, start_seed, RunArgs, DB_NOTE,
};

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Pareto weight: 1 minimizes PSL, 0 minimizes ISL.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
}

pub const SEQUENCE_FILE: &str = "sequence.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const REPORT_FILE: &str = "report.json";

pub fn run(args: &DesignArgs) -> CliResult<()> {
    let theta = parse_theta(args.theta)?;
    let cfg = args.run.config(theta)?;
    let n = args.run.n;
    let dir = &args.run.out_dir;
    let outputs = [SEQUENCE_FILE, TRACE_FILE, REPORT_FILE].map(String::from);
    let manifest = Manifest::new(
        "design",
        config_json(&cfg, n),
        &seeds_of(&cfg.starts),
        &[],
        &outputs,
    );
    create_dir(dir)?;

    let report = multi_start(&cfg, n)?;
    let hash = manifest.hash();

    let mut seq = report.best_sequence.to_json_value();
    seq["manifest_sha256"] = json!(hash);
    write_json(&dir.join(SEQUENCE_FILE), &seq)?;

    let mut trace = String::from("start,label,step,objective,manifest\n");
    for (i, s) in report.runs.iter().enumerate() {
        for (step, v) in s.run.trace.iter().enumerate() {
            writeln!(trace, "{i},{},{step},{v},{hash}", s.start).expect("string write");
        }
    }
    let path = dir.join(TRACE_FILE);
    std::fs::write(&path, trace).map_err(|e| CliError::output(&path, e))?;

    let (psl, isl) = metrics(&report.best_sequence);
    let runs: Vec<_> = report
        .runs
        .iter()
        .map(|s| {
            let (p, i) = metrics(&s.run.sequence);
            json!({
                "start": s.start.to_string(),
                "seed": start_seed(&s.start),
                "sweeps": s.run.sweeps,
                "mbi_steps": s.run.mbi_steps,
                "accepted_steps": s.run.accepted_steps,
                "objective": objective_f_theta(&s.run.sequence, theta),
                "psl": p,
                "isl": i,
                "psl_db": psl_db(p, n),
                "isl_db": isl_db(i, n),
            })
        })
        .collect();
    let body = json!({
        "n": n,
        "alphabet": cfg.alphabet.to_string(),
        "theta": theta.value(),
        "best_start": report.best_start,
        "best_start_label": report.runs[report.best_start].start.to_string(),
        "best_objective": objective_f_theta(&report.best_sequence, theta),
        "best_psl": psl,
        "best_isl": isl,
        "best_psl_db": psl_db(psl, n),
        "best_isl_db": isl_db(isl, n),
        "db_normalization": DB_NOTE,
        "iterations": report.iterations,
        "mbi_steps": report.runs.iter().map(|s| s.run.mbi_steps).sum::<usize>(),
        "wall_time_secs": report.wall_time_secs,
        "runs": runs,
        "manifest_sha256": hash,
    });
    write_json(&dir.join(REPORT_FILE), &body)?;
    manifest.write(dir)?;

    println!(
        "N={n} {} theta={}: PSL {psl} ({:.2} dB), ISL {isl} ({:.2} dB), best start {} -> {}",
        cfg.alphabet,
        theta.value(),
        psl_db(psl, n),
        isl_db(isl, n),
        report.runs[report.best_start].start,
        dir.display()
    );
    Ok(())
}
