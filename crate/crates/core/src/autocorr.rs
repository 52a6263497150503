//! Aperiodic autocorrelation and the sidelobe metrics built on it.

use std::io::{self, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::sequence::PhaseSequence;

/// Autocorrelation `r_k = sum_i conj(x_i) x_{i+k}` for `k = 0..N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrVector {
    /// Lag-0 value; equals `N` for unimodular codes.
    pub r0: f64,
    /// Lags `1..N-1`; `lags[k - 1] = r_k`.
    pub lags: Vec<Complex64>,
}

impl AutocorrVector {
    pub fn len(&self) -> usize {
        self.lags.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `r_k` for `1 <= k <= N - 1`.
    pub fn lag(&self, k: usize) -> Complex64 {
        self.lags[k - 1]
    }

    pub fn psl(&self) -> f64 {
        self.lags.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub fn isl(&self) -> f64 {
        self.lags.iter().map(|r| r.norm_sqr()).sum()
    }

    /// `theta * max_k |r_k|^2 + (1 - theta) * sum_k |r_k|^2`.
    pub fn objective(&self, theta: ParetoWeight) -> f64 {
        let t = theta.value();
        let peak = self.lags.iter().map(|r| r.norm_sqr()).fold(0.0, f64::max);
        t * peak + (1.0 - t) * self.isl()
    }
}

/// Pareto weight `theta` in `[0, 1]`: 1 is pure PSL, 0 is pure ISL.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ParetoWeight(f64);

impl ParetoWeight {
    pub const PSL: ParetoWeight = ParetoWeight(1.0);
    pub const ISL: ParetoWeight = ParetoWeight(0.0);

    pub fn new(theta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&theta) {
            Ok(Self(theta))
        } else {
            Err(Error::InvalidConfig(format!(
                "Pareto weight must lie in [0, 1], got {theta}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Direct O(N^2) evaluation.
pub fn autocorrelation(seq: &PhaseSequence) -> AutocorrVector {
    autocorrelation_of_entries(&seq.entries())
}

pub(crate) fn autocorrelation_of_entries(x: &[Complex64]) -> AutocorrVector {
    let n = x.len();
    let lags = (1..n)
        .map(|k| (0..n - k).map(|i| x[i].conj() * x[i + k]).sum())
        .collect();
    AutocorrVector { r0: n as f64, lags }
}

/// O(N log N) evaluation through a zero-padded FFT.
pub fn autocorrelation_fft(seq: &PhaseSequence) -> AutocorrVector {
    let x = seq.entries();
    let n = x.len();
    let size = (2 * n - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);

    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    buf[..n].copy_from_slice(&x);
    forward.process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    inverse.process(&mut buf);
    // |X|^2 transforms back to sum_i conj(x_i) x_{i+k} at index k
    let scale = 1.0 / size as f64;
    let lags = (1..n).map(|k| buf[k] * scale).collect();
    AutocorrVector { r0: n as f64, lags }
}

pub fn psl(r: &AutocorrVector) -> f64 {
    r.psl()
}

pub fn isl(r: &AutocorrVector) -> f64 {
    r.isl()
}

pub fn objective_f_theta(seq: &PhaseSequence, theta: ParetoWeight) -> f64 {
    autocorrelation(seq).objective(theta)
}

/// Two-sided ACF table with header `lag,k,re,im,abs`: `lag` runs over
/// `-(N-1)..=N-1` and `k = |lag|`; negative lags hold `conj(r_k)`.
pub fn write_acf_csv<W: Write>(r: &AutocorrVector, mut out: W) -> io::Result<()> {
    writeln!(out, "lag,k,re,im,abs")?;
    let n = r.len() as i64;
    for lag in -(n - 1)..n {
        let k = lag.unsigned_abs() as usize;
        let v = if k == 0 {
            Complex64::new(r.r0, 0.0)
        } else if lag < 0 {
            r.lag(k).conj()
        } else {
            r.lag(k)
        };
        writeln!(out, "{lag},{k},{},{},{}", v.re, v.im, v.norm())?;
    }
    Ok(())
}
