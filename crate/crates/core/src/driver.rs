//! Outer coordinate-descent loop, MBI refinement, multi-start and Pareto
//! sweeps.

use std::time::Instant;

use log::{debug, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::autocorr::ParetoWeight;
use crate::continuous::{cpm_state_step, DEFAULT_EPS1};
use crate::discrete::{dpm_step, DftSolver};
use crate::error::{Error, Result};
use crate::lp::{lp_schedule_run, LpSchedule};
use crate::sequence::{Alphabet, Generator, PhaseSequence};
use crate::state::WorkingState;

pub const DEFAULT_EPS: f64 = 1e-5;
pub const DEFAULT_MAX_SWEEPS: usize = 1000;
pub const DEFAULT_MAX_MBI_STEPS: usize = 10_000;

/// Lag drift above which the cached autocorrelation is reported.
const DRIFT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Cyclic,
    /// Cyclic sweeps followed by maximum-block-improvement steps.
    MbiRefine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignConfig {
    pub theta: ParetoWeight,
    pub alphabet: Alphabet,
    /// Minimum objective improvement per sweep.
    pub eps: f64,
    /// Bisection accuracy of the continuous solver.
    pub eps1: f64,
    pub rule: Rule,
    pub max_outer_sweeps: usize,
    pub max_mbi_steps: usize,
    pub starts: Vec<Generator>,
    pub lp_init: Option<LpSchedule>,
}

impl DesignConfig {
    /// Defaults: `eps = 1e-5`, `eps1 = 1e-6`, cyclic rule, and the l_p
    /// initialization only when `theta > 0`.
    pub fn new(theta: ParetoWeight, alphabet: Alphabet, starts: Vec<Generator>) -> Self {
        Self {
            theta,
            alphabet,
            eps: DEFAULT_EPS,
            eps1: DEFAULT_EPS1,
            rule: Rule::Cyclic,
            max_outer_sweeps: DEFAULT_MAX_SWEEPS,
            max_mbi_steps: DEFAULT_MAX_MBI_STEPS,
            starts,
            lp_init: (theta.value() > 0.0).then(LpSchedule::default),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.alphabet.validate()?;
        if !(self.eps > 0.0) || !(self.eps1 > 0.0) {
            return Err(Error::InvalidConfig("eps and eps1 must be positive".into()));
        }
        if self.starts.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one start is required".into(),
            ));
        }
        if let Some(s) = &self.lp_init {
            s.validate()?;
        }
        Ok(())
    }
}

/// Result of a single descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub sequence: PhaseSequence,
    /// Objective before the first sweep, then after every sweep and every
    /// applied MBI step.
    pub trace: Vec<f64>,
    pub sweeps: usize,
    pub mbi_steps: usize,
    /// Coordinate updates that changed an entry.
    pub accepted_steps: usize,
    pub objective: f64,
    pub psl: f64,
    pub isl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartReport {
    pub start: Generator,
    pub run: RunReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub best_sequence: PhaseSequence,
    pub best_start: usize,
    pub runs: Vec<StartReport>,
    pub final_objective: f64,
    pub final_psl: f64,
    pub final_isl: f64,
    /// Total sweeps over all starts.
    pub iterations: usize,
    pub wall_time_secs: f64,
}

enum Solver {
    Continuous { eps1: f64 },
    Discrete(DftSolver),
}

impl Solver {
    fn for_alphabet(alphabet: Alphabet, eps1: f64) -> Result<Self> {
        Ok(match alphabet {
            Alphabet::Continuous => Solver::Continuous { eps1 },
            Alphabet::Discrete(m) => Solver::Discrete(DftSolver::new(m)?),
        })
    }

    /// Best move for coordinate `d`: `(improvement, apply)`.
    fn propose(&self, state: &WorkingState, d: usize, theta: ParetoWeight) -> Proposal {
        match self {
            Solver::Continuous { eps1 } => {
                let step = cpm_state_step(state, d, theta, *eps1);
                Proposal {
                    gain: step.previous - step.value,
                    change: step.changed.then_some(Change::Phase(step.phi_star)),
                }
            }
            Solver::Discrete(solver) => {
                let current = state.seq.indices().expect("discrete state")[d];
                let step = dpm_step(solver, &state.context(d), current, theta);
                Proposal {
                    gain: step.previous - step.value,
                    change: step.changed.then_some(Change::Index(step.index_star)),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Change {
    Phase(f64),
    Index(u32),
}

struct Proposal {
    gain: f64,
    change: Option<Change>,
}

fn apply(state: &mut WorkingState, d: usize, change: Change) {
    match change {
        Change::Phase(phi) => state.set_phase(d, phi),
        Change::Index(i) => state.set_index(d, i),
    }
}

fn check_alphabet(config: &DesignConfig, seq: &PhaseSequence) -> Result<()> {
    if seq.alphabet() != config.alphabet {
        return Err(Error::AlphabetMismatch {
            expected: config.alphabet.to_string(),
            found: seq.alphabet().to_string(),
        });
    }
    Ok(())
}

/// Cyclic coordinate descent from `seq0` (plus MBI refinement if
/// configured). No l_p initialization is applied here.
pub fn cd_run(config: &DesignConfig, seq0: &PhaseSequence) -> Result<RunReport> {
    config.validate()?;
    check_alphabet(config, seq0)?;
    let solver = Solver::for_alphabet(config.alphabet, config.eps1)?;
    let theta = config.theta;
    let n = seq0.len();
    let mut state = WorkingState::new(seq0.clone());
    let mut trace = vec![state.objective(theta)];
    let mut sweeps = 0;
    let mut accepted_steps = 0;

    while sweeps < config.max_outer_sweeps {
        for d in 0..n {
            if let Some(change) = solver.propose(&state, d, theta).change {
                apply(&mut state, d, change);
                accepted_steps += 1;
            }
        }
        let drift = state.refresh();
        if drift > DRIFT_TOL {
            warn!("autocorrelation drift {drift:e} after sweep {sweeps}");
        }
        sweeps += 1;
        let value = state.objective(theta);
        let prev = trace[trace.len() - 1];
        trace.push(value);
        debug!("sweep {sweeps}: objective {value}");
        if prev - value < config.eps {
            break;
        }
    }

    let mut mbi_steps = 0;
    if config.rule == Rule::MbiRefine {
        let threshold = match config.alphabet {
            Alphabet::Continuous => config.eps,
            Alphabet::Discrete(_) => 0.0,
        };
        while mbi_steps < config.max_mbi_steps {
            let (d, proposal) = best_block(&solver, &state, theta);
            match proposal.change {
                Some(change) if proposal.gain > threshold => {
                    apply(&mut state, d, change);
                    state.refresh();
                    mbi_steps += 1;
                    trace.push(state.objective(theta));
                }
                _ => break,
            }
        }
    }

    let r = state.autocorr();
    Ok(RunReport {
        objective: state.objective(theta),
        psl: r.psl(),
        isl: r.isl(),
        sequence: state.seq,
        trace,
        sweeps,
        mbi_steps,
        accepted_steps,
    })
}

/// Largest single-coordinate improvement; ties go to the smallest `d`.
fn best_block(solver: &Solver, state: &WorkingState, theta: ParetoWeight) -> (usize, Proposal) {
    let mut best: Option<(usize, Proposal)> = None;
    for d in 0..state.len() {
        let p = solver.propose(state, d, theta);
        if best.as_ref().is_none_or(|(_, b)| p.gain > b.gain) {
            best = Some((d, p));
        }
    }
    best.expect("sequence is non-empty")
}

/// Result of one MBI step.
#[derive(Debug, Clone, PartialEq)]
pub struct MbiStep {
    pub d_best: usize,
    pub improvement: f64,
    pub seq_next: PhaseSequence,
}

/// Evaluates every coordinate and applies only the best one (if it
/// improves at all).
pub fn mbi_step(seq: &PhaseSequence, theta: ParetoWeight, eps1: f64) -> Result<MbiStep> {
    let solver = Solver::for_alphabet(seq.alphabet(), eps1)?;
    let mut state = WorkingState::new(seq.clone());
    let (d, proposal) = best_block(&solver, &state, theta);
    match proposal.change {
        Some(change) if proposal.gain > 0.0 => {
            apply(&mut state, d, change);
            Ok(MbiStep {
                d_best: d,
                improvement: proposal.gain,
                seq_next: state.seq,
            })
        }
        _ => Ok(MbiStep {
            d_best: d,
            improvement: 0.0,
            seq_next: seq.clone(),
        }),
    }
}

/// Builds the starting code for `start`, with the l_p initialization if
/// configured, and runs the descent.
pub fn run_start(config: &DesignConfig, n: usize, start: &Generator) -> Result<RunReport> {
    let seq0 = start.generate(n, config.alphabet)?;
    let seq0 = match &config.lp_init {
        Some(schedule) => lp_schedule_run(&seq0, schedule)?.sequence,
        None => seq0,
    };
    cd_run(config, &seq0)
}

/// Runs every start in parallel and keeps the best final objective (ties go
/// to the earliest start).
pub fn multi_start(config: &DesignConfig, n: usize) -> Result<DesignReport> {
    config.validate()?;
    let t0 = Instant::now();
    let runs = config
        .starts
        .par_iter()
        .map(|start| run_start(config, n, start).map(|run| StartReport { start: *start, run }))
        .collect::<Result<Vec<_>>>()?;
    let best_start = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.run.objective.total_cmp(&b.run.objective).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one start");
    let best = &runs[best_start].run;
    Ok(DesignReport {
        best_sequence: best.sequence.clone(),
        best_start,
        final_objective: best.objective,
        final_psl: best.psl,
        final_isl: best.isl,
        iterations: runs.iter().map(|r| r.run.sweeps).sum(),
        wall_time_secs: t0.elapsed().as_secs_f64(),
        runs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub theta: ParetoWeight,
    pub psl: f64,
    pub isl: f64,
    pub objective: f64,
    pub sequence: PhaseSequence,
}

/// Warm-started chain over strictly decreasing `thetas`: the first point is
/// a multi-start run, every later one starts from its predecessor.
pub fn pareto_sweep(
    config: &DesignConfig,
    n: usize,
    thetas: &[ParetoWeight],
) -> Result<Vec<ParetoPoint>> {
    if thetas.is_empty() || thetas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig(
            "Pareto weights must be non-empty and strictly decreasing".into(),
        ));
    }
    let first = DesignConfig {
        theta: thetas[0],
        ..config.clone()
    };
    let report = multi_start(&first, n)?;
    let mut points = vec![ParetoPoint {
        theta: thetas[0],
        psl: report.final_psl,
        isl: report.final_isl,
        objective: report.final_objective,
        sequence: report.best_sequence,
    }];
    for &theta in &thetas[1..] {
        let cfg = DesignConfig {
            theta,
            ..config.clone()
        };
        let prev = &points[points.len() - 1].sequence;
        let run = cd_run(&cfg, prev)?;
        points.push(ParetoPoint {
            theta,
            psl: run.psl,
            isl: run.isl,
            objective: run.objective,
            sequence: run.sequence,
        });
    }
    Ok(points)
}

/// `1.0, 0.8, ..., 0.0`.
pub fn default_pareto_thetas() -> Vec<ParetoWeight> {
    (0..6)
        .map(|i| ParetoWeight::new(1.0 - f64::from(i) / 5.0).expect("in range"))
        .collect()
}
