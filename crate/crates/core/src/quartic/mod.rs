//! Real polynomials of degree at most four.
//!
//! Root finding is closed form (quadratic formula, Cardano, Ferrari) with a
//! Newton polish on every candidate. When the closed-form roots fail to
//! reproduce the coefficients (large backward error, as near clustered
//! roots), companion-matrix eigenvalues are added to the candidate pool.
//! Candidates are kept only if the polynomial residual at the polished point
//! is at rounding level.

mod interval;
mod roots;

use std::ops::{Add, Mul, Sub};

pub use interval::{union, IntervalSet};

use crate::error::{Error, Result};

/// Leading coefficients below this fraction of `max |coef|` are dropped.
pub const TRIM_TOL: f64 = 1e-12;
/// Roots closer than `MERGE_TOL * (1 + |r|)` are reported once.
pub const MERGE_TOL: f64 = 1e-9;

/// Relative thresholds under which `p^(j)(x_i)` counts as zero in the
/// root-by-root sign analysis (`j = 1, 2, 3`). They grow with the order
/// because a root of multiplicity `m` is only resolved to `eps^(1/m)`.
const DERIVATIVE_ZERO_TOL: [f64; 3] = [1e-7, 1e-4, 1e-3];

/// A value is trusted for its sign when it exceeds this fraction of
/// `sum_i |c_i| |x|^i`.
const SIGN_TOL: f64 = 1e-12;

/// `a x^4 + b x^3 + c x^2 + d x + e`, stored as `[a, b, c, d, e]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuarticPoly {
    pub coeffs: [f64; 5],
}

impl QuarticPoly {
    pub const fn new(coeffs: [f64; 5]) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `(1 + x^2)^2`
    pub fn one_plus_sq_squared() -> Self {
        Self::new([1.0, 0.0, 2.0, 0.0, 1.0])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Formal derivative (still stored as a quartic with leading zero).
    pub fn derivative(&self) -> Self {
        let [a, b, c, d, _] = self.coeffs;
        Self::new([0.0, 4.0 * a, 3.0 * b, 2.0 * c, d])
    }

    /// `p^(order)(x)` together with `sum_i |c_i| i!/(i-order)! |x|^(i-order)`,
    /// the magnitude against which that value is judged to be zero.
    fn derivative_with_scale(&self, order: usize, x: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut scale = 0.0;
        let ax = x.abs();
        for (pos, &c) in self.coeffs.iter().enumerate() {
            let deg = 4 - pos;
            if deg < order || c == 0.0 {
                continue;
            }
            let factor: f64 = (deg - order + 1..=deg).map(|v| v as f64).product();
            let pw = (deg - order) as i32;
            value += c * factor * x.powi(pw);
            scale += c.abs() * factor * ax.powi(pw);
        }
        (value, scale)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Degree after trimming leading coefficients below `tol * max |coef|`;
    /// `None` for the zero polynomial.
    pub fn degree(&self, tol: f64) -> Option<usize> {
        let m = self.max_abs();
        if m == 0.0 {
            return None;
        }
        self.coeffs
            .iter()
            .position(|c| c.abs() > tol * m)
            .map(|pos| 4 - pos)
    }

    /// Distinct real roots in ascending order, using the default tolerances.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        self.real_roots_tol(TRIM_TOL)
    }

    /// Distinct real roots, trimming leading coefficients below
    /// `trim_tol * max |coef|` first.
    pub fn real_roots_tol(&self, trim_tol: f64) -> Result<Vec<f64>> {
        let m = self.max_abs();
        if m == 0.0 || !m.is_finite() {
            return Err(Error::ZeroPolynomial);
        }
        let mut c = self.coeffs.map(|v| v / m);
        for v in c.iter_mut() {
            if v.abs() <= trim_tol {
                *v = 0.0;
            } else {
                break;
            }
        }
        Ok(roots::real_roots_normalized(c))
    }

    /// The open set `{x : p(x) > 0}`.
    ///
    /// The sign on each gap between consecutive roots is read off the
    /// midpoint value when that value stands clear of rounding; otherwise
    /// (roots too close to separate numerically) the first derivative that
    /// does not vanish at the left root decides. The unbounded gaps follow
    /// the leading term.
    pub fn strict_positive_set(&self) -> Result<IntervalSet> {
        let roots = self.real_roots()?;
        let trimmed = self.trimmed();
        let (lead_pos, deg) = trimmed
            .coeffs
            .iter()
            .enumerate()
            .find(|(_, &c)| c != 0.0)
            .map(|(pos, &c)| (c > 0.0, 4 - pos))
            .expect("non-zero polynomial");
        if roots.is_empty() {
            return Ok(if lead_pos {
                IntervalSet::reals()
            } else {
                IntervalSet::empty()
            });
        }
        let l = roots.len();
        // positive[j] covers the gap (x_j, x_{j+1}) with x_0 = -inf, x_{L+1} = +inf.
        let mut positive = vec![false; l + 1];
        positive[0] = lead_pos != (deg % 2 == 1);
        positive[l] = lead_pos;
        for j in 1..l {
            let (lo, hi) = (roots[j - 1], roots[j]);
            let (value, scale) = trimmed.derivative_with_scale(0, 0.5 * (lo + hi));
            positive[j] = if value.abs() > SIGN_TOL * scale {
                value > 0.0
            } else {
                matches!(
                    trimmed.root_behaviour(lo),
                    RootBehaviour::Increasing | RootBehaviour::LocalMin
                )
            };
        }
        let bounds: Vec<f64> = std::iter::once(f64::NEG_INFINITY)
            .chain(roots.iter().copied())
            .chain(std::iter::once(f64::INFINITY))
            .collect();
        Ok(IntervalSet::from_intervals(
            positive
                .iter()
                .enumerate()
                .filter(|(_, &pos)| pos)
                .map(|(j, _)| (bounds[j], bounds[j + 1])),
        ))
    }

    fn trimmed(&self) -> Self {
        let m = self.max_abs();
        let mut out = *self;
        for v in out.coeffs.iter_mut() {
            if v.abs() <= TRIM_TOL * m {
                *v = 0.0;
            } else {
                break;
            }
        }
        out
    }

    fn root_behaviour(&self, x: f64) -> RootBehaviour {
        for order in 1..=4 {
            let (value, scale) = self.derivative_with_scale(order, x);
            let vanishes = match order {
                4 => value == 0.0,
                _ => value.abs() <= DERIVATIVE_ZERO_TOL[order - 1] * scale,
            };
            if vanishes {
                continue;
            }
            let positive = value > 0.0;
            return match (order % 2 == 1, positive) {
                (true, true) => RootBehaviour::Increasing,
                (true, false) => RootBehaviour::Decreasing,
                (false, true) => RootBehaviour::LocalMin,
                (false, false) => RootBehaviour::LocalMax,
            };
        }
        RootBehaviour::LocalMax
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RootBehaviour {
    Increasing,
    Decreasing,
    LocalMin,
    LocalMax,
}

impl Add for QuarticPoly {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.coeffs;
        for (a, b) in c.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        Self::new(c)
    }
}

impl Sub for QuarticPoly {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.coeffs;
        for (a, b) in c.iter_mut().zip(rhs.coeffs) {
            *a -= b;
        }
        Self::new(c)
    }
}

impl Mul<f64> for QuarticPoly {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.coeffs.map(|c| c * s))
    }
}

impl std::iter::Sum for QuarticPoly {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn poly(c: [f64; 5]) -> QuarticPoly {
        QuarticPoly::new(c)
    }

    fn assert_roots(p: QuarticPoly, expected: &[f64]) {
        let r = p.real_roots().unwrap();
        assert_eq!(r.len(), expected.len(), "roots {r:?} vs {expected:?}");
        for (a, b) in r.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9, "roots {r:?} vs {expected:?}");
        }
    }

    #[test]
    fn root_examples() {
        assert_roots(poly([1.0, 0.0, 0.0, 0.0, -1.0]), &[-1.0, 1.0]);
        assert_roots(poly([1.0, 2.0, -3.0, -4.0, 4.0]), &[-2.0, 1.0]);
        assert_roots(poly([1.0, 0.0, 0.0, 0.0, 1.0]), &[]);
        assert_eq!(QuarticPoly::zero().real_roots(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn degenerate_degrees() {
        assert_roots(poly([0.0, 1.0, -6.0, 11.0, -6.0]), &[1.0, 2.0, 3.0]);
        assert_roots(poly([0.0, 0.0, 1.0, 0.0, -4.0]), &[-2.0, 2.0]);
        assert_roots(poly([0.0, 0.0, 0.0, 2.0, -1.0]), &[0.5]);
        assert_roots(poly([0.0, 0.0, 0.0, 0.0, 3.0]), &[]);
        // leading coefficient below the trim threshold
        assert_roots(poly([1e-14, 0.0, 1.0, 0.0, -1.0]), &[-1.0, 1.0]);
    }

    #[test]
    fn multiple_roots() {
        // (x - 1)^4
        assert_roots(poly([1.0, -4.0, 6.0, -4.0, 1.0]), &[1.0]);
        // (x - 1)^3 (x + 2)
        assert_roots(poly([1.0, -1.0, -3.0, 5.0, -2.0]), &[-2.0, 1.0]);
        // x^4
        assert_roots(poly([1.0, 0.0, 0.0, 0.0, 0.0]), &[0.0]);
        // (x^2 - 2)^2
        let s = 2f64.sqrt();
        assert_roots(poly([1.0, 0.0, -4.0, 0.0, 4.0]), &[-s, s]);
    }

    #[test]
    fn positive_set_examples() {
        let s = poly([0.0, 0.0, 1.0, 0.0, -1.0])
            .strict_positive_set()
            .unwrap();
        assert_eq!(s.intervals(), &[(-INF, -1.0), (1.0, INF)]);

        let s = poly([0.0, 0.0, -1.0, 0.0, -1.0])
            .strict_positive_set()
            .unwrap();
        assert!(s.is_empty());

        let s = poly([1.0, 2.0, -3.0, -4.0, 4.0])
            .strict_positive_set()
            .unwrap();
        let iv = s.intervals();
        assert_eq!(iv.len(), 3);
        assert_eq!(iv[0].0, -INF);
        assert_eq!(iv[2].1, INF);
        assert!((iv[0].1 + 2.0).abs() < 1e-9 && (iv[1].0 + 2.0).abs() < 1e-9);
        assert!((iv[1].1 - 1.0).abs() < 1e-9 && (iv[2].0 - 1.0).abs() < 1e-9);
        assert!(!s.covers_reals());

        assert!(poly([0.0, 0.0, 0.0, 0.0, 2.0])
            .strict_positive_set()
            .unwrap()
            .covers_reals());
        assert!(poly([0.0, 0.0, 0.0, 0.0, -2.0])
            .strict_positive_set()
            .unwrap()
            .is_empty());
        assert_eq!(
            QuarticPoly::zero().strict_positive_set(),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn positive_set_inflection_and_flat_roots() {
        // (x - 1)^3 (x + 2): positive left of -2 and right of 1
        let s = poly([1.0, -1.0, -3.0, 5.0, -2.0])
            .strict_positive_set()
            .unwrap();
        assert_eq!(s.intervals().len(), 2);
        assert!(s.contains(-3.0) && !s.contains(0.0) && s.contains(2.0));
        // -(x - 1)^4: nowhere positive
        let s = poly([-1.0, 4.0, -6.0, 4.0, -1.0])
            .strict_positive_set()
            .unwrap();
        assert!(s.is_empty());
        // (x - 1)^4: everywhere except the root
        let s = poly([1.0, -4.0, 6.0, -4.0, 1.0])
            .strict_positive_set()
            .unwrap();
        assert!(!s.covers_reals());
        assert_eq!(s.complement_witness(), Some(1.0));
    }

    #[test]
    fn arithmetic() {
        let p = poly([1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(p.eval(2.0), 16.0 + 16.0 + 12.0 + 8.0 + 5.0);
        assert_eq!(p.derivative().coeffs, [0.0, 4.0, 6.0, 6.0, 4.0]);
        assert_eq!((p - p).coeffs, [0.0; 5]);
        assert_eq!((p * 2.0 + p).coeffs, [3.0, 6.0, 9.0, 12.0, 15.0]);
        assert_eq!(QuarticPoly::one_plus_sq_squared().eval(1.0), 4.0);
        assert_eq!(p.degree(TRIM_TOL), Some(4));
        assert_eq!(QuarticPoly::zero().degree(TRIM_TOL), None);
    }
}
