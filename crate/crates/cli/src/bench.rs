use std::fmt::Write as _;
use std::path::PathBuf;

use cdseq_core::driver::{multi_start, DesignConfig, DEFAULT_MAX_SWEEPS};
use cdseq_core::{Alphabet, ParetoWeight};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::manifest::{create_dir, Manifest};
use crate::options::{
    isl_db, metrics, parse_alphabet, parse_lp_init, parse_usize_list, psl_db, random_start,
    start_seed,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Psl,
    Isl,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated sequence lengths.
    #[arg(long)]
    pub n_grid: String,

    /// Comma-separated alphabets: `continuous`, `binary`, `m:<M>` or a bare
    /// alphabet size.
    #[arg(long, default_value = "continuous")]
    pub m_grid: String,

    /// Objective to minimize: `psl` (theta = 1) or `isl` (theta = 0).
    #[arg(long, value_enum, default_value = "psl")]
    pub metric: Metric,

    /// Random starts per cell; the best one is reported.
    #[arg(long, default_value_t = 5)]
    pub runs: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// `on`, `off` or an exponent schedule; defaults to on for PSL.
    #[arg(long)]
    pub lp_init: Option<String>,

    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,

    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

pub const BENCH_FILE: &str = "bench.csv";

fn parse_alphabets(s: &str) -> CliResult<Vec<Alphabet>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<u32>() {
            Ok(m) => parse_alphabet(&format!("m:{m}")),
            Err(_) => parse_alphabet(t),
        })
        .collect()
}

pub fn run(args: &BenchArgs) -> CliResult<()> {
    let ns = parse_usize_list(&args.n_grid, "n-grid")?;
    let alphabets = parse_alphabets(&args.m_grid)?;
    if ns.is_empty() || alphabets.is_empty() {
        return Err(CliError::Usage("empty grid".into()));
    }
    if let Some(&n) = ns.iter().find(|&&n| n < 2) {
        return Err(CliError::Usage(format!("grid length {n} is below 2")));
    }
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be positive".into()));
    }
    let theta = match args.metric {
        Metric::Psl => ParetoWeight::PSL,
        Metric::Isl => ParetoWeight::ISL,
    };
    let lp_init = parse_lp_init(args.lp_init.as_deref(), theta)?;
    let seeds: Vec<u64> = (args.seed..args.seed + args.runs).collect();

    let cells: Vec<(usize, Alphabet)> = ns
        .iter()
        .flat_map(|&n| alphabets.iter().map(move |&a| (n, a)))
        .collect();
    let config = json!({
        "n_grid": ns,
        "m_grid": alphabets.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "metric": format!("{:?}", args.metric).to_lowercase(),
        "theta": theta.value(),
        "runs": args.runs,
        "max_sweeps": args.max_sweeps,
        "lp_init": lp_init.as_ref().map(|s| s.exponents.clone()),
    });
    let manifest = Manifest::new("bench", config, &seeds, &[], &[BENCH_FILE.to_string()]);
    create_dir(&args.out_dir)?;

    let rows = cells
        .par_iter()
        .map(|&(n, alphabet)| {
            let starts = seeds.iter().map(|&s| random_start(alphabet, s)).collect();
            let mut cfg = DesignConfig::new(theta, alphabet, starts);
            cfg.lp_init = lp_init.clone();
            cfg.max_outer_sweeps = args.max_sweeps;
            let report = multi_start(&cfg, n)?;
            let (psl, isl) = metrics(&report.best_sequence);
            let best_seed =
                start_seed(&report.runs[report.best_start].start).expect("bench starts are random");
            Ok((n, alphabet, psl, isl, best_seed))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let hash = manifest.hash();
    let metric = format!("{:?}", args.metric).to_lowercase();
    let seed_list = seeds
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(";");
    let mut csv = String::from(
        "n,alphabet,metric,theta,runs,best_psl,best_isl,psl_db,isl_db,best_seed,seeds,manifest\n",
    );
    for (n, alphabet, psl, isl, best_seed) in rows {
        writeln!(
            csv,
            "{n},{alphabet},{metric},{},{},{psl},{isl},{},{},{best_seed},{seed_list},{hash}",
            theta.value(),
            args.runs,
            psl_db(psl, n),
            isl_db(isl, n)
        )
        .expect("string write");
        println!(
            "N={n} {alphabet}: PSL {psl} ({:.2} dB), ISL {isl} ({:.2} dB)",
            psl_db(psl, n),
            isl_db(isl, n)
        );
    }
    let path = args.out_dir.join(BENCH_FILE);
    std::fs::write(&path, csv).map_err(|e| CliError::output(&path, e))?;
    manifest.write(&args.out_dir)
}
