//! Per-coordinate decomposition of the autocorrelation.
//!
//! With every entry except `x_d` frozen, each lag is affine in `u = x_d`
//! and its conjugate:
//!
//! ```text
//! a_k u + b_k conj(u) + c_k = conj(r_k)
//! a_k = conj(x_{d+k}),  b_k = x_{d-k},  c_k = sum_{i != d, d-k} x_i conj(x_{i+k})
//! ```
//!
//! (`a_k`, `b_k` vanish when the index leaves `0..N`). Only `|r_k|` enters
//! the objectives, so the conjugate is immaterial.

use num_complex::Complex64;

use crate::autocorr::ParetoWeight;
use crate::error::{Error, Result};
use crate::sequence::PhaseSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateContext {
    /// Zero-based coordinate.
    pub d: usize,
    /// `a[k - 1] = a_k` for lags `k = 1..N-1`; likewise `b`, `c`.
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub c: Vec<Complex64>,
}

impl CoordinateContext {
    /// Direct construction from the definitions, O(N^2).
    pub fn build(seq: &PhaseSequence, d: usize) -> Result<Self> {
        let n = seq.len();
        if d >= n {
            return Err(Error::IndexOutOfRange { index: d, len: n });
        }
        let x = seq.entries();
        let zero = Complex64::new(0.0, 0.0);
        let mut a = Vec::with_capacity(n - 1);
        let mut b = Vec::with_capacity(n - 1);
        let mut c = Vec::with_capacity(n - 1);
        for k in 1..n {
            a.push(if d + k < n { x[d + k].conj() } else { zero });
            b.push(if d >= k { x[d - k] } else { zero });
            c.push(
                (0..n - k)
                    .filter(|&i| i != d && i + k != d)
                    .map(|i| x[i] * x[i + k].conj())
                    .sum(),
            );
        }
        Ok(Self { d, a, b, c })
    }

    /// O(N) construction from the entries and the current lags
    /// (`lags[k - 1] = r_k`): `c_k = conj(r_k) - a_k x_d - b_k conj(x_d)`.
    pub fn from_lags(x: &[Complex64], lags: &[Complex64], d: usize) -> Self {
        let n = x.len();
        let zero = Complex64::new(0.0, 0.0);
        let xd = x[d];
        let mut a = Vec::with_capacity(n - 1);
        let mut b = Vec::with_capacity(n - 1);
        let mut c = Vec::with_capacity(n - 1);
        for k in 1..n {
            let ak = if d + k < n { x[d + k].conj() } else { zero };
            let bk = if d >= k { x[d - k] } else { zero };
            a.push(ak);
            b.push(bk);
            c.push(lags[k - 1].conj() - ak * xd - bk * xd.conj());
        }
        Self { d, a, b, c }
    }

    pub fn lags(&self) -> usize {
        self.a.len()
    }

    /// `a_k u + b_k conj(u) + c_k` for lag `k` (1-based).
    pub fn lag_value(&self, k: usize, u: Complex64) -> Complex64 {
        let i = k - 1;
        self.a[i] * u + self.b[i] * u.conj() + self.c[i]
    }

    /// `|r_k|^2` for every lag with `x_d = e^{j phi}`.
    pub fn lag_powers(&self, phi: f64) -> impl Iterator<Item = f64> + '_ {
        let u = Complex64::from_polar(1.0, phi);
        self.powers_at(u)
    }

    pub(crate) fn powers_at(&self, u: Complex64) -> impl Iterator<Item = f64> + '_ {
        let uc = u.conj();
        self.a
            .iter()
            .zip(&self.b)
            .zip(&self.c)
            .map(move |((a, b), c)| (a * u + b * uc + c).norm_sqr())
    }

    /// `g(phi) = theta max_k |r_k|^2 + (1 - theta) sum_k |r_k|^2`.
    pub fn g_theta(&self, phi: f64, theta: ParetoWeight) -> f64 {
        self.g_theta_at(Complex64::from_polar(1.0, phi), theta)
    }

    pub(crate) fn g_theta_at(&self, u: Complex64, theta: ParetoWeight) -> f64 {
        let (peak, sum) = self
            .powers_at(u)
            .fold((0.0f64, 0.0), |(m, s), v| (m.max(v), s + v));
        let t = theta.value();
        t * peak + (1.0 - t) * sum
    }
}
