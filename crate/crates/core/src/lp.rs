//! l_p-norm initialization.
//!
//! Minimizes `sum_k |r_k|^p` by majorization-minimization and coordinate
//! descent, for an increasing sequence of exponents, each stage warm-started
//! from the previous one. On `[0, t]` with `t = ||r||_p`, the scalar map
//! `y -> y^p` is majorized at `y0 = |r_k|` by the quadratic
//! `tau y^2 + lambda y + const`; the linear term is in turn handled through
//! `|r| >= Re{conj(r) s}` with `s` the current phase of the lag.
//!
//! Weights are kept in scaled form: the true `tau_k, lambda_k` equal the
//! stored ones times `t^(p - 2)`, which is one common factor and does not
//! change any minimizer. This keeps `p` in the thousands representable.

use num_complex::Complex64;

use crate::context::CoordinateContext;
use crate::continuous::{lag_quartics, LagQuartic};
use crate::discrete::{pick_min, DftSolver};
use crate::error::{Error, Result};
use crate::quartic::QuarticPoly;
use crate::sequence::{Alphabet, PhaseSequence};
use crate::state::WorkingState;

/// `2, 4, 8, ..., 8192`.
pub fn default_schedule() -> Vec<f64> {
    (1..=13).map(|e| f64::from(1u32 << e)).collect()
}

pub const DEFAULT_INNER_EPS: f64 = 1e-5;
pub const DEFAULT_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateWeights {
    pub tau: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `t = (sum_k |r_k|^p)^(1/p)`.
    pub t: f64,
    pub p: f64,
    /// `ln` of the common factor `t^(p - 2)` removed from `tau` and `lambda`.
    pub log_scale: f64,
}

impl SurrogateWeights {
    /// The unscaled `tau_k` (may overflow for large `p`).
    pub fn true_tau(&self, k: usize) -> f64 {
        self.tau[k - 1] * self.log_scale.exp()
    }

    pub fn true_lambda(&self, k: usize) -> f64 {
        self.lambda[k - 1] * self.log_scale.exp()
    }
}

/// `(1 - rho^p - p rho^(p-1) delta) / delta^2` with `delta = 1 - rho`.
///
/// Expanding `1 = (rho + delta)^p` binomially gives the cancellation-free
/// series `sum_{j >= 2} C(p, j) rho^(p-j) delta^(j-2)`, used when
/// `p delta` is small.
fn scaled_tau(rho: f64, p: f64) -> f64 {
    let delta = 1.0 - rho;
    if p * delta >= 1.0 {
        let num = 1.0 - rho.powf(p) - p * rho.powf(p - 1.0) * delta;
        return num / (delta * delta);
    }
    let mut binom = p * (p - 1.0) / 2.0;
    let mut delta_pow = 1.0;
    let mut total = 0.0;
    let mut j = 2.0;
    while j <= 60.0 {
        let term = binom * rho.powf(p - j) * delta_pow;
        total += term;
        if term.abs() <= 1e-17 * total.abs() || binom == 0.0 {
            break;
        }
        binom *= (p - j) / (j + 1.0);
        delta_pow *= delta;
        j += 1.0;
    }
    total
}

/// Weights of the quadratic majorizer at the current lags.
pub fn surrogate_weights(lags: &[Complex64], p: f64) -> Result<SurrogateWeights> {
    if !(p >= 2.0) {
        return Err(Error::InvalidConfig(format!(
            "l_p exponent must be >= 2, got {p}"
        )));
    }
    let mags: Vec<f64> = lags.iter().map(|r| r.norm()).collect();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        let n = mags.len();
        return Ok(SurrogateWeights {
            tau: vec![1.0; n],
            lambda: vec![0.0; n],
            t: 0.0,
            p,
            log_scale: 0.0,
        });
    }
    // t = peak * (sum (|r|/peak)^p)^(1/p), safe for any p
    let t = peak
        * mags
            .iter()
            .map(|m| (m / peak).powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
    if p == 2.0 {
        let n = mags.len();
        return Ok(SurrogateWeights {
            tau: vec![1.0; n],
            lambda: vec![0.0; n],
            t,
            p,
            log_scale: 0.0,
        });
    }
    let mut tau = Vec::with_capacity(mags.len());
    let mut lambda = Vec::with_capacity(mags.len());
    for &m in &mags {
        let rho = (m / t).min(1.0);
        let tk = scaled_tau(rho, p);
        tau.push(tk);
        lambda.push(t * (p * rho.powf(p - 1.0) - 2.0 * tk * rho));
    }
    Ok(SurrogateWeights {
        tau,
        lambda,
        t,
        p,
        log_scale: (p - 2.0) * t.ln(),
    })
}

/// Numerator of `Re{conj(r_k) s_k}` over `(1 + beta^2)^2`, where
/// `conj(r_k) = a u + b conj(u) + c` in the context convention and `s_k` is
/// a unit complex number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpLagQuartic {
    pub h: QuarticPoly,
}

pub fn lp_lag_coefficients(a: Complex64, b: Complex64, c: Complex64, s: Complex64) -> LpLagQuartic {
    let (a, b, c) = (a * s, b * s, c * s);
    // Re{..} = P cos + Q sin + C
    let p = a.re + b.re;
    let q = b.im - a.im;
    let cr = c.re;
    LpLagQuartic {
        h: QuarticPoly::new([cr - p, 2.0 * q, 2.0 * cr, 2.0 * q, cr + p]),
    }
}

/// Unit direction `r_k / |r_k|` per lag in the context convention, i.e. the
/// factor that makes `Re{(a u + b conj(u) + c) s}` equal `|r_k|` now.
fn lag_directions(lags: &[Complex64]) -> Vec<Option<Complex64>> {
    lags.iter()
        .map(|r| {
            let m = r.norm();
            (m > 0.0).then(|| r / m)
        })
        .collect()
}

/// Outcome of one surrogate coordinate step.
#[derive(Debug, Clone, PartialEq)]
pub struct LpStep {
    pub phi_star: f64,
    /// Surrogate value at `phi_star` (scaled weights).
    pub value: f64,
    pub previous: f64,
}

fn surrogate_value(
    ctx: &CoordinateContext,
    weights: &SurrogateWeights,
    dirs: &[Option<Complex64>],
    u: Complex64,
) -> f64 {
    (0..ctx.lags())
        .map(|i| {
            let z = ctx.lag_value(i + 1, u);
            let lin = dirs[i].map_or(0.0, |s| (z * s).re);
            weights.tau[i] * z.norm_sqr() + weights.lambda[i] * lin
        })
        .sum()
}

/// Exact minimizer of the surrogate for one continuous entry.
pub fn lp_entry_continuous(
    seq: &PhaseSequence,
    d: usize,
    weights: &SurrogateWeights,
) -> Result<LpStep> {
    let ctx = CoordinateContext::build(seq, d)?;
    let lags = crate::autocorr::autocorrelation(seq).lags;
    Ok(lp_continuous_step(&ctx, &lags, seq.phase(d), weights))
}

pub(crate) fn lp_continuous_step(
    ctx: &CoordinateContext,
    lags: &[Complex64],
    current: f64,
    weights: &SurrogateWeights,
) -> LpStep {
    let dirs = lag_directions(lags);
    let quartics: Vec<LagQuartic> = lag_quartics(ctx);
    let mut n = QuarticPoly::zero();
    for (i, q) in quartics.iter().enumerate() {
        n = n + q.p * weights.tau[i];
        if let Some(s) = dirs[i] {
            if weights.lambda[i] != 0.0 {
                let h = lp_lag_coefficients(ctx.a[i], ctx.b[i], ctx.c[i], s).h;
                n = n + h * weights.lambda[i];
            }
        }
    }
    // d/dbeta [n / (1 + beta^2)^2] = 0  <=>  n'(1 + beta^2) - 4 beta n = 0,
    // whose degree-5 terms cancel
    let [n4, n3, n2, n1, n0] = n.coeffs;
    let stationary = QuarticPoly::new([
        -n3,
        4.0 * n4 - 2.0 * n2,
        3.0 * n3 - 3.0 * n1,
        2.0 * n2 - 4.0 * n0,
        n1,
    ]);
    let value_at = |phi: f64| surrogate_value(ctx, weights, &dirs, Complex64::from_polar(1.0, phi));

    let previous = value_at(current);
    let mut best = (current, previous);
    let candidates = stationary
        .real_roots()
        .unwrap_or_default()
        .into_iter()
        .map(|beta| 2.0 * beta.atan())
        .chain(std::iter::once(std::f64::consts::PI));
    for phi in candidates {
        let v = value_at(phi);
        if v < best.1 {
            best = (phi, v);
        }
    }
    LpStep {
        phi_star: best.0,
        value: best.1,
        previous,
    }
}

/// Outcome of one discrete surrogate step.
#[derive(Debug, Clone, PartialEq)]
pub struct LpDiscreteStep {
    pub index_star: u32,
    pub value: f64,
    pub previous: f64,
}

/// Exact alphabet minimizer of `sum_k tau_k |r_k|^2 + lambda_k |r_k|`.
pub fn lp_entry_discrete(
    seq: &PhaseSequence,
    d: usize,
    weights: &SurrogateWeights,
) -> Result<LpDiscreteStep> {
    let (m, idx) = match (seq.alphabet(), seq.indices()) {
        (Alphabet::Discrete(m), Some(idx)) => (m, idx),
        (found, _) => {
            return Err(Error::AlphabetMismatch {
                expected: "discrete".into(),
                found: found.to_string(),
            })
        }
    };
    let ctx = CoordinateContext::build(seq, d)?;
    Ok(lp_discrete_step(&DftSolver::new(m)?, &ctx, idx[d], weights))
}

pub(crate) fn lp_discrete_step(
    solver: &DftSolver,
    ctx: &CoordinateContext,
    current: u32,
    weights: &SurrogateWeights,
) -> LpDiscreteStep {
    let table = solver.table(ctx);
    let mut y = vec![0.0; solver.m() as usize];
    for (k, row) in table.nu.iter().enumerate() {
        let (tau, lambda) = (weights.tau[k], weights.lambda[k]);
        for (acc, &v) in y.iter_mut().zip(row) {
            *acc += tau * v + lambda * v.sqrt();
        }
    }
    let index_star = pick_min(&y, current);
    LpDiscreteStep {
        index_star,
        value: y[index_star as usize],
        previous: y[current as usize],
    }
}

/// `ln sum_k |r_k|^p`, computed without overflow.
pub fn log_lp_power(lags: &[Complex64], p: f64) -> f64 {
    let peak = lags.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return f64::NEG_INFINITY;
    }
    let s: f64 = lags.iter().map(|r| (r.norm() / peak).powf(p)).sum();
    p * peak.ln() + s.ln()
}

/// Per-stage record of an l_p run.
#[derive(Debug, Clone, PartialEq)]
pub struct LpStage {
    pub p: f64,
    pub sweeps: usize,
    /// `ln sum_k |r_k|^p` before the first sweep and after each sweep.
    pub log_power_trace: Vec<f64>,
    /// Coordinate steps rejected because the true objective went up.
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRun {
    pub sequence: PhaseSequence,
    pub stages: Vec<LpStage>,
}

/// Options for [`lp_schedule_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpSchedule {
    pub exponents: Vec<f64>,
    /// Relative improvement of `||r||_p` per sweep below which a stage ends.
    pub inner_eps: f64,
    pub max_sweeps: usize,
}

impl Default for LpSchedule {
    fn default() -> Self {
        Self {
            exponents: default_schedule(),
            inner_eps: DEFAULT_INNER_EPS,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

impl LpSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = self.exponents.first() == Some(&2.0)
            && self.exponents.windows(2).all(|w| w[1] > w[0])
            && self.inner_eps > 0.0
            && self.max_sweeps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "l_p schedule must start at 2 and strictly increase".into(),
            ))
        }
    }
}

/// Runs every stage of `schedule` from `seq0`.
pub fn lp_schedule_run(seq0: &PhaseSequence, schedule: &LpSchedule) -> Result<LpRun> {
    schedule.validate()?;
    let mut state = WorkingState::new(seq0.clone());
    let solver = match seq0.alphabet() {
        Alphabet::Continuous => None,
        Alphabet::Discrete(m) => Some(DftSolver::new(m)?),
    };
    let stages = schedule
        .exponents
        .iter()
        .map(|&p| run_stage(&mut state, solver.as_ref(), p, schedule))
        .collect::<Result<Vec<_>>>()?;
    Ok(LpRun {
        sequence: state.seq,
        stages,
    })
}

fn run_stage(
    state: &mut WorkingState,
    solver: Option<&DftSolver>,
    p: f64,
    schedule: &LpSchedule,
) -> Result<LpStage> {
    let n = state.len();
    let mut trace = vec![log_lp_power(&state.lags, p)];
    let mut rejected = 0;
    let mut sweeps = 0;
    while sweeps < schedule.max_sweeps {
        for d in 0..n {
            if !lp_coordinate(state, solver, d, p)? {
                rejected += 1;
            }
        }
        state.refresh();
        sweeps += 1;
        let before = trace[trace.len() - 1];
        let after = log_lp_power(&state.lags, p);
        trace.push(after);
        // relative change of the norm: 1 - exp((after - before) / p)
        let gain = -((after - before) / p).exp_m1();
        if !(gain >= schedule.inner_eps) {
            break;
        }
    }
    Ok(LpStage {
        p,
        sweeps,
        log_power_trace: trace,
        rejected,
    })
}

/// One surrogate step on coordinate `d`; returns `false` if the proposed
/// move raised `sum |r_k|^p` and was undone.
pub(crate) fn lp_coordinate(
    state: &mut WorkingState,
    solver: Option<&DftSolver>,
    d: usize,
    p: f64,
) -> Result<bool> {
    let weights = surrogate_weights(&state.lags, p)?;
    let ctx = state.context(d);
    let before = log_lp_power(&state.lags, p);
    match solver {
        None => {
            let old = state.seq.phase(d);
            let step = lp_continuous_step(&ctx, &state.lags, old, &weights);
            if step.phi_star == old {
                return Ok(true);
            }
            state.set_phase(d, step.phi_star);
            if log_lp_power(&state.lags, p) > before {
                state.set_phase(d, old);
                return Ok(false);
            }
        }
        Some(solver) => {
            let old = state.seq.indices().expect("discrete state")[d];
            let step = lp_discrete_step(solver, &ctx, old, &weights);
            if step.index_star == old {
                return Ok(true);
            }
            state.set_index(d, step.index_star);
            if log_lp_power(&state.lags, p) > before {
                state.set_index(d, old);
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autocorr::autocorrelation;
    use crate::sequence::Generator;

    #[test]
    fn p_two_is_exact() {
        let s = Generator::Random { seed: 1 }
            .generate(20, Alphabet::Continuous)
            .unwrap();
        let w = surrogate_weights(&autocorrelation(&s).lags, 2.0).unwrap();
        assert!(w.tau.iter().all(|&t| t == 1.0));
        assert!(w.lambda.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn tau_series_matches_direct_formula() {
        for &p in &[3.0, 4.0, 16.0, 7.5] {
            for &rho in &[0.5, 0.9, 0.99] {
                let delta: f64 = 1.0 - rho;
                let direct = (1.0 - rho.powf(p) - p * rho.powf(p - 1.0) * delta) / (delta * delta);
                let mut binom = p * (p - 1.0) / 2.0;
                let mut series = 0.0;
                for j in 2..200 {
                    series += binom * rho.powf(p - j as f64) * delta.powi(j - 2);
                    binom *= (p - j as f64) / (j as f64 + 1.0);
                }
                assert!((scaled_tau(rho, p) - direct).abs() < 1e-9 * direct.abs());
                assert!((series - direct).abs() < 1e-9 * direct.abs());
            }
            // limit at rho = 1
            assert!((scaled_tau(1.0, p) - p * (p - 1.0) / 2.0).abs() < 1e-12 * p * p);
        }
    }

    #[test]
    fn equal_magnitudes_use_the_limit() {
        let lags = vec![Complex64::new(0.0, 2.0); 4];
        let p = 4.0;
        let w = surrogate_weights(&lags, p).unwrap();
        assert!((w.t - 4f64.powf(0.25) * 2.0).abs() < 1e-12);
        // symmetric difference quotient of the printed formula around |r| = 2
        let t = w.t;
        let f = |y: f64| (t.powf(p) - y.powf(p) - p * y.powf(p - 1.0) * (t - y)) / (t - y).powi(2);
        let tau_true = w.true_tau(1);
        assert!((tau_true - f(2.0)).abs() < 1e-9 * tau_true);
        let lambda = p * 2f64.powf(p - 1.0) - 2.0 * tau_true * 2.0;
        assert!((w.true_lambda(1) - lambda).abs() < 1e-10 * (1.0 + lambda.abs()));
    }

    #[test]
    fn huge_exponents_stay_finite() {
        let s = Generator::Random { seed: 2 }
            .generate(64, Alphabet::Continuous)
            .unwrap();
        let w = surrogate_weights(&autocorrelation(&s).lags, 8192.0).unwrap();
        assert!(w.tau.iter().chain(&w.lambda).all(|v| v.is_finite()));
        assert!(w.tau.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn stage_monotone() {
        let s = Generator::Random { seed: 4 }
            .generate(24, Alphabet::Continuous)
            .unwrap();
        let sched = LpSchedule {
            exponents: vec![2.0, 4.0, 16.0],
            ..LpSchedule::default()
        };
        let run = lp_schedule_run(&s, &sched).unwrap();
        for stage in &run.stages {
            for w in stage.log_power_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{:?}", stage);
            }
        }
    }
}
