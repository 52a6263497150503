use std::path::PathBuf;

use cdseq_core::autocorr::write_acf_csv;
use cdseq_core::{autocorrelation, PhaseSequence};
use clap::Args;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::options::{isl_db, psl_db};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Sequence file (as written by `design` or `pareto`).
    pub path: PathBuf,

    /// Also write the two-sided autocorrelation table to this CSV file.
    #[arg(long)]
    pub acf: Option<PathBuf>,

    /// Print the metrics as a JSON object.
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: &EvaluateArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.path.display())))?;
    let seq = PhaseSequence::from_json_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.path.display())))?;
    let r = autocorrelation(&seq);
    let n = seq.len();
    let (psl, isl) = (r.psl(), r.isl());

    if let Some(path) = &args.acf {
        let file = std::fs::File::create(path).map_err(|e| CliError::output(path, e))?;
        write_acf_csv(&r, std::io::BufWriter::new(file)).map_err(|e| CliError::output(path, e))?;
    }

    if args.json {
        let body = json!({
            "n": n,
            "alphabet": seq.alphabet().to_string(),
            "psl": psl,
            "isl": isl,
            "psl_db": psl_db(psl, n),
            "isl_db": isl_db(isl, n),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&body).expect("serializes")
        );
    } else {
        println!("n: {n}");
        println!("alphabet: {}", seq.alphabet());
        println!("psl: {psl}");
        println!("isl: {isl}");
        println!("psl_db: {}", psl_db(psl, n));
        println!("isl_db: {}", isl_db(isl, n));
    }
    Ok(())
}
