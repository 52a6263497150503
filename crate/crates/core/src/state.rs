use num_complex::Complex64;

use crate::autocorr::{autocorrelation_of_entries, AutocorrVector, ParetoWeight};
use crate::context::CoordinateContext;
use crate::sequence::PhaseSequence;

/// A code together with its cached entries and autocorrelation lags,
/// updated in O(N) per changed entry.
#[derive(Debug, Clone)]
pub(crate) struct WorkingState {
    pub seq: PhaseSequence,
    pub x: Vec<Complex64>,
    /// `lags[k - 1] = r_k`
    pub lags: Vec<Complex64>,
}

impl WorkingState {
    pub fn new(seq: PhaseSequence) -> Self {
        let x = seq.entries();
        let lags = autocorrelation_of_entries(&x).lags;
        Self { seq, x, lags }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn context(&self, d: usize) -> CoordinateContext {
        CoordinateContext::from_lags(&self.x, &self.lags, d)
    }

    pub fn autocorr(&self) -> AutocorrVector {
        AutocorrVector {
            r0: self.len() as f64,
            lags: self.lags.clone(),
        }
    }

    pub fn objective(&self, theta: ParetoWeight) -> f64 {
        let (peak, sum) = self
            .lags
            .iter()
            .map(|r| r.norm_sqr())
            .fold((0.0f64, 0.0), |(m, s), v| (m.max(v), s + v));
        let t = theta.value();
        t * peak + (1.0 - t) * sum
    }

    pub fn set_phase(&mut self, d: usize, phi: f64) {
        self.seq
            .set_phase(d, phi)
            .expect("working state holds a continuous code");
        self.update_entry(d);
    }

    pub fn set_index(&mut self, d: usize, index: u32) {
        self.seq
            .set_index(d, index)
            .expect("working state holds a discrete code");
        self.update_entry(d);
    }

    /// `r_k` changes only through the products touching `x_d`.
    fn update_entry(&mut self, d: usize) {
        let n = self.len();
        let old = self.x[d];
        let new = self.seq.entry(d);
        let dc = new.conj() - old.conj();
        let dx = new - old;
        for k in 1..n {
            let mut delta = Complex64::new(0.0, 0.0);
            if d + k < n {
                delta += dc * self.x[d + k];
            }
            if d >= k {
                delta += self.x[d - k].conj() * dx;
            }
            self.lags[k - 1] += delta;
        }
        self.x[d] = new;
    }

    /// Full recompute; returns the largest drift seen in any lag.
    pub fn refresh(&mut self) -> f64 {
        let exact = autocorrelation_of_entries(&self.x).lags;
        let drift = exact
            .iter()
            .zip(&self.lags)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        self.lags = exact;
        drift
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{Alphabet, Generator};

    #[test]
    fn incremental_matches_full() {
        let seq = Generator::Random { seed: 11 }
            .generate(40, Alphabet::Continuous)
            .unwrap();
        let mut st = WorkingState::new(seq);
        for step in 0..200 {
            st.set_phase((step * 7) % 40, 0.1 * step as f64);
        }
        assert!(st.refresh() < 1e-10);

        let seq = Generator::Random { seed: 12 }
            .generate(33, Alphabet::Discrete(8))
            .unwrap();
        let mut st = WorkingState::new(seq);
        for step in 0..200u32 {
            st.set_index((step as usize * 5) % 33, step % 8);
        }
        assert!(st.refresh() < 1e-10);
    }
}
