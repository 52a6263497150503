//! Exhaustive minimization of one phase over an M-ary alphabet.
//!
//! For `x_d = e^{j phi}` the lag value is `a e^{j phi} + c + b e^{-j phi}`
//! up to a unit factor, i.e. a three-tap filter. Its magnitude on the M
//! alphabet points is the M-point DFT of `[a, c, b, 0, ..., 0]`, so one FFT
//! per lag evaluates every candidate at once. The binary alphabet folds the
//! taps to `[a + b, c]` and needs no transform.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::autocorr::ParetoWeight;
use crate::context::CoordinateContext;
use crate::error::{Error, Result};
use crate::sequence::{Alphabet, PhaseSequence};

/// Values within `TIE_TOL * (1 + |v|)` of the minimum count as ties.
pub const TIE_TOL: f64 = 1e-11;

/// `nu[k - 1][i] = |r_k|^2` with `x_d` set to alphabet point `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DftLagTable {
    pub m: u32,
    pub nu: Vec<Vec<f64>>,
}

impl DftLagTable {
    /// Column sums `sum_k nu_k[i]`.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.m as usize];
        for row in &self.nu {
            for (acc, v) in s.iter_mut().zip(row) {
                *acc += v;
            }
        }
        s
    }

    /// Column maxima `max_k nu_k[i]`.
    pub fn column_maxima(&self) -> Vec<f64> {
        let mut s = vec![0.0f64; self.m as usize];
        for row in &self.nu {
            for (acc, v) in s.iter_mut().zip(row) {
                *acc = acc.max(*v);
            }
        }
        s
    }
}

/// Caches the FFT plan for one alphabet size.
#[derive(Clone)]
pub struct DftSolver {
    m: u32,
    fft: Option<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for DftSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftSolver").field("m", &self.m).finish()
    }
}

impl DftSolver {
    pub fn new(m: u32) -> Result<Self> {
        Alphabet::Discrete(m).validate()?;
        let fft = (m >= 3).then(|| FftPlanner::new().plan_fft_forward(m as usize));
        Ok(Self { m, fft })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn table(&self, ctx: &CoordinateContext) -> DftLagTable {
        let m = self.m as usize;
        let rows = ctx.lags();
        let nu = match &self.fft {
            None => (0..rows)
                .map(|i| {
                    let abar = ctx.a[i] + ctx.b[i];
                    let c = ctx.c[i];
                    vec![(c + abar).norm_sqr(), (c - abar).norm_sqr()]
                })
                .collect(),
            Some(fft) => {
                let zero = Complex64::new(0.0, 0.0);
                let mut buf = vec![zero; rows * m];
                for (i, chunk) in buf.chunks_exact_mut(m).enumerate() {
                    chunk[0] = ctx.a[i];
                    chunk[1] = ctx.c[i];
                    chunk[2] = ctx.b[i];
                }
                // rustfft transforms each consecutive block of length m
                fft.process(&mut buf);
                buf.chunks_exact(m)
                    .map(|chunk| chunk.iter().map(|v| v.norm_sqr()).collect())
                    .collect()
            }
        };
        DftLagTable { m: self.m, nu }
    }
}

/// `nu` table of the context on the `m`-point alphabet.
pub fn dft_lag_table(ctx: &CoordinateContext, m: u32) -> Result<DftLagTable> {
    Ok(DftSolver::new(m)?.table(ctx))
}

/// Outcome of one discrete coordinate update.
#[derive(Debug, Clone, PartialEq)]
pub struct DpmStep {
    pub index_star: u32,
    /// Objective with `x_d` at `index_star`.
    pub value: f64,
    /// Objective before the step.
    pub previous: f64,
    pub changed: bool,
}

/// Index of the minimum of `values`. Near-ties are resolved in favour of
/// `current`, then of the smallest index.
pub(crate) fn pick_min(values: &[f64], current: u32) -> u32 {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = TIE_TOL * (1.0 + best.abs());
    let ties = |v: f64| v <= best + tol;
    if ties(values[current as usize]) {
        return current;
    }
    values
        .iter()
        .position(|&v| ties(v))
        .expect("minimum is attained") as u32
}

/// `theta max_k nu_k + (1 - theta) sum_k nu_k` for every candidate.
pub(crate) fn minmax_values(table: &DftLagTable, theta: ParetoWeight) -> Vec<f64> {
    let t = theta.value();
    table
        .column_maxima()
        .into_iter()
        .zip(table.column_sums())
        .map(|(peak, sum)| t * peak + (1.0 - t) * sum)
        .collect()
}

pub(crate) fn dpm_step(
    solver: &DftSolver,
    ctx: &CoordinateContext,
    current: u32,
    theta: ParetoWeight,
) -> DpmStep {
    let values = minmax_values(&solver.table(ctx), theta);
    let index_star = pick_min(&values, current);
    DpmStep {
        index_star,
        value: values[index_star as usize],
        previous: values[current as usize],
        changed: index_star != current,
    }
}

fn discrete_parts(seq: &PhaseSequence) -> Result<(u32, &[u32])> {
    match (seq.alphabet(), seq.indices()) {
        (Alphabet::Discrete(m), Some(idx)) => Ok((m, idx)),
        (found, _) => Err(Error::AlphabetMismatch {
            expected: "discrete".into(),
            found: found.to_string(),
        }),
    }
}

/// Optimizes entry `d` (zero-based) of an M-ary code, `M >= 3`.
pub fn dpm_entry_optimize(seq: &PhaseSequence, d: usize, theta: ParetoWeight) -> Result<DpmStep> {
    let (m, idx) = discrete_parts(seq)?;
    if m < 3 {
        return Err(Error::InvalidConfig(
            "the DFT solver needs M >= 3; use the binary solver".into(),
        ));
    }
    let ctx = CoordinateContext::build(seq, d)?;
    Ok(dpm_step(&DftSolver::new(m)?, &ctx, idx[d], theta))
}

/// Optimizes entry `d` (zero-based) of a binary code.
pub fn binary_entry_optimize(
    seq: &PhaseSequence,
    d: usize,
    theta: ParetoWeight,
) -> Result<DpmStep> {
    let (m, idx) = discrete_parts(seq).map_err(|_| Error::NotBinary)?;
    if m != 2 {
        return Err(Error::NotBinary);
    }
    let ctx = CoordinateContext::build(seq, d)?;
    Ok(dpm_step(&DftSolver::new(2)?, &ctx, idx[d], theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autocorr::objective_f_theta;
    use crate::sequence::{unit_root, Generator};

    #[test]
    fn single_tap_is_flat() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        for (a, c) in [(one, zero), (zero, one)] {
            let ctx = CoordinateContext {
                d: 0,
                a: vec![a],
                b: vec![zero],
                c: vec![c],
            };
            let t = dft_lag_table(&ctx, 4).unwrap();
            for v in &t.nu[0] {
                assert!((v - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn table_matches_direct_evaluation() {
        for m in [2u32, 3, 4, 5, 8, 64] {
            let s = Generator::Random { seed: u64::from(m) }
                .generate(17, Alphabet::Continuous)
                .unwrap();
            let ctx = CoordinateContext::build(&s, 6).unwrap();
            let t = dft_lag_table(&ctx, m).unwrap();
            for k in 1..17 {
                for i in 0..m {
                    let direct = ctx.lag_value(k, unit_root(i, m)).norm_sqr();
                    assert!((t.nu[k - 1][i as usize] - direct).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn two_entry_ties() {
        let s = PhaseSequence::discrete(4, vec![0, 0]).unwrap();
        let step = dpm_entry_optimize(&s, 1, ParetoWeight::PSL).unwrap();
        assert_eq!(step.index_star, 0);
        assert_eq!(step.value, 1.0);

        let s = PhaseSequence::from_signs(&[1, 1]).unwrap();
        let step = binary_entry_optimize(&s, 1, ParetoWeight::PSL).unwrap();
        assert_eq!((step.index_star, step.value), (0, 1.0));
    }

    #[test]
    fn rejects_wrong_alphabets() {
        let c = PhaseSequence::continuous(vec![0.0; 4]).unwrap();
        assert!(dpm_entry_optimize(&c, 0, ParetoWeight::PSL).is_err());
        assert_eq!(
            binary_entry_optimize(&c, 0, ParetoWeight::PSL),
            Err(Error::NotBinary)
        );
        let q = PhaseSequence::discrete(4, vec![0; 4]).unwrap();
        assert_eq!(
            binary_entry_optimize(&q, 0, ParetoWeight::PSL),
            Err(Error::NotBinary)
        );
    }

    #[test]
    fn exhaustive_agreement() {
        for seed in 0..60u64 {
            let m = [2u32, 4, 8, 16][seed as usize % 4];
            let n = 3 + seed as usize % 20;
            let theta = ParetoWeight::new([0.0, 0.5, 1.0][seed as usize % 3]).unwrap();
            let s = Generator::Random { seed }
                .generate(n, Alphabet::Discrete(m))
                .unwrap();
            let d = (seed as usize * 3) % n;
            let step = if m == 2 {
                binary_entry_optimize(&s, d, theta).unwrap()
            } else {
                dpm_entry_optimize(&s, d, theta).unwrap()
            };
            let values: Vec<f64> = (0..m)
                .map(|i| {
                    let mut t = s.clone();
                    t.set_index(d, i).unwrap();
                    objective_f_theta(&t, theta)
                })
                .collect();
            let current = s.indices().unwrap()[d];
            assert_eq!(step.index_star, pick_min(&values, current));
            assert!(
                (step.value - values[step.index_star as usize]).abs() < 1e-10 * (1.0 + step.value)
            );
        }
    }
}
