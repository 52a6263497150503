use std::fmt::Write as _;

use cdseq_core::driver::{default_pareto_thetas, pareto_sweep};
use cdseq_core::ParetoWeight;
use clap::Args;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::manifest::{create_dir, write_json, Manifest};
use crate::options::{
    config_json, isl_db, metrics, parse_f64_list, parse_theta, psl_db, seeds_of, RunArgs,
};

#[derive(Debug, Args)]
pub struct ParetoArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Strictly decreasing weights, e.g. `1,0.5,0`. Defaults to
    /// 1.0, 0.8, ..., 0.0.
    #[arg(long)]
    pub thetas: Option<String>,
}

pub const PARETO_FILE: &str = "pareto.csv";

fn sequence_file(i: usize, theta: ParetoWeight) -> String {
    format!("sequence_{i:02}_theta_{}.json", theta.value())
}

pub fn run(args: &ParetoArgs) -> CliResult<()> {
    let thetas = match &args.thetas {
        None => default_pareto_thetas(),
        Some(s) => parse_f64_list(s, "theta")?
            .into_iter()
            .map(parse_theta)
            .collect::<CliResult<Vec<_>>>()?,
    };
    if thetas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Usage(
            "--thetas must be strictly decreasing".into(),
        ));
    }
    let cfg = args.run.config(thetas[0])?;
    let n = args.run.n;
    let dir = &args.run.out_dir;

    let mut outputs = vec![PARETO_FILE.to_string()];
    outputs.extend(thetas.iter().enumerate().map(|(i, &t)| sequence_file(i, t)));
    let mut config = config_json(&cfg, n);
    config["thetas"] = json!(thetas.iter().map(|t| t.value()).collect::<Vec<_>>());
    let manifest = Manifest::new("pareto", config, &seeds_of(&cfg.starts), &[], &outputs);
    create_dir(dir)?;

    let points = pareto_sweep(&cfg, n, &thetas)?;
    let hash = manifest.hash();
    let mut csv = String::from("theta,psl,isl,psl_db,isl_db,objective,sequence,manifest\n");
    for (i, p) in points.iter().enumerate() {
        let file = sequence_file(i, p.theta);
        let mut seq = p.sequence.to_json_value();
        seq["theta"] = json!(p.theta.value());
        seq["manifest_sha256"] = json!(hash);
        write_json(&dir.join(&file), &seq)?;
        let (psl, isl) = metrics(&p.sequence);
        let objective = cdseq_core::objective_f_theta(&p.sequence, p.theta);
        writeln!(
            csv,
            "{},{psl},{isl},{},{},{objective},{file},{hash}",
            p.theta.value(),
            psl_db(psl, n),
            isl_db(isl, n)
        )
        .expect("string write");
        println!(
            "theta={}: PSL {psl} ({:.2} dB), ISL {isl} ({:.2} dB)",
            p.theta.value(),
            psl_db(psl, n),
            isl_db(isl, n)
        );
    }
    let path = dir.join(PARETO_FILE);
    std::fs::write(&path, csv).map_err(|e| CliError::output(&path, e))?;
    manifest.write(dir)
}
