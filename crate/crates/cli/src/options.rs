use std::path::PathBuf;

use cdseq_core::driver::{
    DesignConfig, Rule, DEFAULT_EPS, DEFAULT_MAX_MBI_STEPS, DEFAULT_MAX_SWEEPS,
};
use cdseq_core::lp::LpSchedule;
use cdseq_core::{Alphabet, Generator, ParetoWeight, PhaseSequence};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Cyclic,
    MbiRefine,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Cyclic => Rule::Cyclic,
            RuleArg::MbiRefine => Rule::MbiRefine,
        }
    }
}

/// Flags shared by `design` and `pareto`.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Sequence length N (at least 2).
    #[arg(long)]
    pub n: usize,

    /// `continuous`, `binary` or `m:<M>`.
    #[arg(long, default_value = "continuous")]
    pub alphabet: String,

    /// Comma-separated starts: `frank`, `golomb`, `random:<count>`.
    /// Defaults to frank (square N only), golomb and random:5.
    #[arg(long)]
    pub starts: Option<String>,

    /// Base seed; random starts use consecutive seeds from here.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Stop when a sweep improves the objective by less than this.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,

    /// Bisection accuracy of the continuous coordinate solver.
    #[arg(long, default_value_t = cdseq_core::continuous::DEFAULT_EPS1)]
    pub eps1: f64,

    /// `on`, `off`, or a comma-separated exponent schedule such as
    /// `2,4,8,16`. Defaults to on for theta > 0.
    #[arg(long)]
    pub lp_init: Option<String>,

    #[arg(long, value_enum, default_value = "cyclic")]
    pub rule: RuleArg,

    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,

    #[arg(long, default_value_t = DEFAULT_MAX_MBI_STEPS)]
    pub max_mbi_steps: usize,

    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

pub fn parse_alphabet(s: &str) -> CliResult<Alphabet> {
    s.parse::<Alphabet>().map_err(CliError::from)
}

pub fn parse_theta(v: f64) -> CliResult<ParetoWeight> {
    ParetoWeight::new(v).map_err(CliError::from)
}

pub fn parse_f64_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid {what} entry `{t}`")))
        })
        .collect()
}

pub fn parse_usize_list(s: &str, what: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("invalid {what} entry `{t}`")))
        })
        .collect()
}

fn is_square(n: usize) -> bool {
    let l = (n as f64).sqrt().round() as usize;
    l * l == n
}

/// A random start for `alphabet`: binary codes draw signs directly.
pub fn random_start(alphabet: Alphabet, seed: u64) -> Generator {
    if alphabet.is_binary() {
        Generator::BinaryRandom { seed }
    } else {
        Generator::Random { seed }
    }
}

/// Expands the `--starts` list. Random entries take consecutive seeds
/// from `seed`, in order of appearance.
pub fn parse_starts(
    spec: Option<&str>,
    n: usize,
    alphabet: Alphabet,
    seed: u64,
) -> CliResult<Vec<Generator>> {
    let default;
    let spec = match spec {
        Some(s) => s,
        None => {
            default = if is_square(n) {
                "frank,golomb,random:5"
            } else {
                "golomb,random:5"
            };
            default
        }
    };
    let mut next_seed = seed;
    let mut starts = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "frank" => {
                if !is_square(n) {
                    return Err(CliError::Usage(format!(
                        "frank-length-not-square: N = {n} is not a perfect square"
                    )));
                }
                starts.push(Generator::Frank);
            }
            "golomb" => starts.push(Generator::Golomb),
            _ => {
                let count = match item.strip_prefix("random") {
                    Some("") => 1,
                    Some(rest) => rest
                        .strip_prefix(':')
                        .and_then(|c| c.parse::<u64>().ok())
                        .filter(|&c| c > 0)
                        .ok_or_else(|| {
                            CliError::Usage(format!("invalid start `{item}` (use random:<count>)"))
                        })?,
                    None => {
                        return Err(CliError::Usage(format!(
                            "unknown start `{item}` (expected frank, golomb or random:<count>)"
                        )))
                    }
                };
                for s in next_seed..next_seed + count {
                    starts.push(random_start(alphabet, s));
                }
                next_seed += count;
            }
        }
    }
    if starts.is_empty() {
        return Err(CliError::Usage("no starts given".into()));
    }
    Ok(starts)
}

pub fn start_seed(g: &Generator) -> Option<u64> {
    match *g {
        Generator::Random { seed } | Generator::BinaryRandom { seed } => Some(seed),
        _ => None,
    }
}

/// `None` keeps the default for the weight.
pub fn parse_lp_init(spec: Option<&str>, theta: ParetoWeight) -> CliResult<Option<LpSchedule>> {
    match spec.map(str::trim) {
        None => Ok((theta.value() > 0.0).then(LpSchedule::default)),
        Some("on") => Ok(Some(LpSchedule::default())),
        Some("off") => Ok(None),
        Some(list) => {
            let schedule = LpSchedule {
                exponents: parse_f64_list(list, "lp-init exponent")?,
                ..LpSchedule::default()
            };
            schedule.validate()?;
            Ok(Some(schedule))
        }
    }
}

impl RunArgs {
    pub fn config(&self, theta: ParetoWeight) -> CliResult<DesignConfig> {
        if self.n < 2 {
            return Err(CliError::Usage("--n must be at least 2".into()));
        }
        let alphabet = parse_alphabet(&self.alphabet)?;
        let starts = parse_starts(self.starts.as_deref(), self.n, alphabet, self.seed)?;
        let mut cfg = DesignConfig::new(theta, alphabet, starts);
        cfg.eps = self.eps;
        cfg.eps1 = self.eps1;
        cfg.rule = self.rule.into();
        cfg.max_outer_sweeps = self.max_sweeps;
        cfg.max_mbi_steps = self.max_mbi_steps;
        cfg.lp_init = parse_lp_init(self.lp_init.as_deref(), theta)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Settings echo for manifests and reports.
pub fn config_json(cfg: &DesignConfig, n: usize) -> Value {
    json!({
        "n": n,
        "alphabet": cfg.alphabet.to_string(),
        "theta": cfg.theta.value(),
        "starts": cfg.starts.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "eps": cfg.eps,
        "eps1": cfg.eps1,
        "rule": cfg.rule,
        "max_sweeps": cfg.max_outer_sweeps,
        "max_mbi_steps": cfg.max_mbi_steps,
        "lp_init": cfg.lp_init.as_ref().map(|s| json!({
            "exponents": s.exponents,
            "inner_eps": s.inner_eps,
            "max_sweeps": s.max_sweeps,
        })),
    })
}

pub fn seeds_of(starts: &[Generator]) -> Vec<u64> {
    starts.iter().filter_map(start_seed).collect()
}

pub const DB_NOTE: &str = "dB values are relative to the mainlobe r_0 = N: \
psl_db = 20 log10(PSL / N), isl_db = 10 log10(ISL / N^2).";

/// `20 log10(PSL / N)`: sidelobe peak relative to the mainlobe `r_0 = N`.
pub fn psl_db(psl: f64, n: usize) -> f64 {
    20.0 * (psl / n as f64).log10()
}

/// `10 log10(ISL / N^2)`.
pub fn isl_db(isl: f64, n: usize) -> f64 {
    10.0 * (isl / (n * n) as f64).log10()
}

/// PSL and ISL recomputed from the sequence itself.
pub fn metrics(seq: &PhaseSequence) -> (f64, f64) {
    let r = cdseq_core::autocorrelation(seq);
    (r.psl(), r.isl())
}
