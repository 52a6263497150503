//! Exact-to-`eps1` minimization of one phase over the whole circle.
//!
//! With `beta = tan(phi / 2)` every lag power becomes a ratio of quartics
//! sharing the denominator `(1 + beta^2)^2`, so `g(phi) <= gamma` turns into
//! a family of quartic sign conditions. Bisection on `gamma` then needs only
//! root finding and an interval union per level. `phi = pi` lies outside the
//! chart and is checked directly from the leading coefficients.

use num_complex::Complex64;

use crate::autocorr::ParetoWeight;
use crate::context::CoordinateContext;
use crate::error::Result;
use crate::quartic::{union, IntervalSet, QuarticPoly};
use crate::sequence::PhaseSequence;
use crate::state::WorkingState;

/// Default bisection accuracy.
pub const DEFAULT_EPS1: f64 = 1e-6;

/// Numerator of `|a e^{j phi} + b e^{-j phi} + c|^2` in `beta = tan(phi/2)`,
/// over the denominator `(1 + beta^2)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagQuartic {
    pub p: QuarticPoly,
}

impl LagQuartic {
    pub fn ratio(&self, beta: f64) -> f64 {
        let q = 1.0 + beta * beta;
        self.p.eval(beta) / (q * q)
    }

    /// Value at `phi = pi`, the limit `beta -> +-inf`.
    pub fn at_pi(&self) -> f64 {
        self.p.coeffs[0]
    }
}

/// The real and imaginary parts of `a u + b conj(u) + c` are each
/// `P cos + Q sin + C`; multiplying by `1 + beta^2` gives the quadratic
/// `(C - P) beta^2 + 2 Q beta + (C + P)`, whose square is summed.
pub fn lemma1_coefficients(a: Complex64, b: Complex64, c: Complex64) -> LagQuartic {
    let part = |p: f64, q: f64, c: f64| -> [f64; 5] {
        let lo = c - p;
        let hi = c + p;
        [
            lo * lo,
            4.0 * q * lo,
            4.0 * q * q + 2.0 * c * c - 2.0 * p * p,
            4.0 * q * hi,
            hi * hi,
        ]
    };
    let re = part(a.re + b.re, b.im - a.im, c.re);
    let im = part(a.im + b.im, a.re - b.re, c.im);
    let mut coeffs = [0.0; 5];
    for i in 0..5 {
        coeffs[i] = re[i] + im[i];
    }
    LagQuartic {
        p: QuarticPoly::new(coeffs),
    }
}

pub fn lag_quartics(ctx: &CoordinateContext) -> Vec<LagQuartic> {
    (0..ctx.lags())
        .map(|i| lemma1_coefficients(ctx.a[i], ctx.b[i], ctx.c[i]))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// A point of the chart meeting every constraint, if one exists.
    pub witness_beta: Option<f64>,
    /// Whether `phi = pi` meets every constraint.
    pub pi_feasible: bool,
}

/// Sum of all lag numerators; shared by every `theta`-weighted row.
pub fn sum_quartic(quartics: &[LagQuartic]) -> QuarticPoly {
    quartics.iter().map(|q| q.p).sum()
}

/// Is there a phase with `theta |r_k|^2 + (1 - theta) sum_l |r_l|^2 <= gamma`
/// for every lag `k`?
pub fn feasibility_check(
    quartics: &[LagQuartic],
    sum: &QuarticPoly,
    theta: ParetoWeight,
    gamma: f64,
) -> Feasibility {
    let t = theta.value();
    let shared = *sum * (1.0 - t) - QuarticPoly::one_plus_sq_squared() * gamma;

    let pi_peak = quartics.iter().map(|q| q.at_pi()).fold(0.0, f64::max);
    let pi_feasible = t * pi_peak + (1.0 - t) * sum.coeffs[0] <= gamma;

    let rows: Vec<QuarticPoly> = if t == 0.0 {
        // every row is the same polynomial
        vec![shared]
    } else {
        quartics.iter().map(|q| q.p * t + shared).collect()
    };
    let mut sets = Vec::with_capacity(rows.len());
    let mut covered = false;
    for row in &rows {
        let set = positive_set(row);
        if set.covers_reals() {
            covered = true;
            break;
        }
        if !set.is_empty() {
            sets.push(set);
        }
    }
    let witness_beta = if covered {
        None
    } else {
        union(&sets).complement_witness()
    };
    Feasibility {
        feasible: witness_beta.is_some() || pi_feasible,
        witness_beta,
        pi_feasible,
    }
}

/// `{beta : row(beta) > 0}`; an identically zero row is positive nowhere.
fn positive_set(row: &QuarticPoly) -> IntervalSet {
    row.strict_positive_set()
        .unwrap_or_else(|_| IntervalSet::empty())
}

/// Outcome of one coordinate update.
#[derive(Debug, Clone, PartialEq)]
pub struct CpmStep {
    /// Chosen phase (the current one when nothing better was found).
    pub phi_star: f64,
    /// `g_theta(phi_star)`.
    pub value: f64,
    /// `g_theta` at the phase before the step.
    pub previous: f64,
    pub changed: bool,
    pub iterations: usize,
    /// `(w, u)` after every bisection iteration.
    pub bracket: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
enum Witness {
    Chart(f64),
    Pi,
}

/// Optimizes entry `d` of `seq` (zero-based).
pub fn cpm_entry_optimize(
    seq: &PhaseSequence,
    d: usize,
    theta: ParetoWeight,
    eps1: f64,
) -> Result<CpmStep> {
    let ctx = CoordinateContext::build(seq, d)?;
    Ok(cpm_step(&ctx, seq.phase(d), theta, eps1))
}

pub(crate) fn cpm_state_step(
    state: &WorkingState,
    d: usize,
    theta: ParetoWeight,
    eps1: f64,
) -> CpmStep {
    cpm_step(&state.context(d), state.seq.phase(d), theta, eps1)
}

pub(crate) fn cpm_step(
    ctx: &CoordinateContext,
    current: f64,
    theta: ParetoWeight,
    eps1: f64,
) -> CpmStep {
    let previous = ctx.g_theta(current, theta);
    let quartics = lag_quartics(ctx);
    let sum = sum_quartic(&quartics);

    // tracking the width keeps the iteration count exact
    let mut w = 0.0;
    let mut width = previous;
    let mut witness = None;
    let mut bracket = Vec::new();
    while width > eps1 {
        let gamma = w + 0.5 * width;
        let check = feasibility_check(&quartics, &sum, theta, gamma);
        if let Some(beta) = check.witness_beta {
            witness = Some(Witness::Chart(beta));
        } else if check.pi_feasible {
            witness = Some(Witness::Pi);
        } else {
            w = gamma;
        }
        width *= 0.5;
        bracket.push((w, w + width));
    }

    let iterations = bracket.len();
    let found = witness
        .map(|wt| match wt {
            Witness::Chart(beta) => 2.0 * beta.atan(),
            Witness::Pi => std::f64::consts::PI,
        })
        .map(|phi| (phi, ctx.g_theta(phi, theta)))
        // keep the current phase unless the witness is strictly better
        .filter(|&(_, value)| value < previous);
    let (phi_star, value, changed) = match found {
        Some((phi, value)) => (phi, value, true),
        None => (current, previous, false),
    };
    CpmStep {
        phi_star,
        value,
        previous,
        changed,
        iterations,
        bracket,
    }
}
