use nalgebra::DMatrix;
use num_complex::Complex64;

use super::MERGE_TOL;

/// Complex candidates with `|im| <= NEAR_REAL * (1 + |re|)` are treated as
/// perturbed real roots (double roots split under rounding).
const NEAR_REAL: f64 = 1e-5;
/// Backward error of the closed-form roots above which companion-matrix
/// eigenvalues are added to the candidates.
const ILL_CONDITIONED: f64 = 1e-10;
/// Residual acceptance relative to `1 + sum |c_i| |x|^i`.
const RESIDUAL_TOL: f64 = 1e-8;
/// Derivative-Newton may move a candidate at most this far (relative).
const LOCAL: f64 = 1e-3;
/// Midpoint residual below which two neighbouring roots are one root.
const CLUSTER_TOL: f64 = 1e-13;

/// `c` is `[a, b, c, d, e]` with `max |c_i| = 1` and trimmed leading zeros.
pub(super) fn real_roots_normalized(c: [f64; 5]) -> Vec<f64> {
    let lead = match c.iter().position(|&v| v != 0.0) {
        Some(pos) => pos,
        None => return Vec::new(),
    };
    let poly = &c[lead..];
    let complex = match poly.len() - 1 {
        0 => return Vec::new(),
        1 => return vec![-poly[1] / poly[0]],
        2 => quadratic(poly[0].into(), poly[1].into(), poly[2].into()).to_vec(),
        3 => cubic(poly[0], poly[1], poly[2], poly[3]).to_vec(),
        _ => {
            let closed = ferrari(poly);
            let mut v = closed.to_vec();
            if backward_error(poly, &closed) > ILL_CONDITIONED {
                v.extend(companion_roots(poly));
            }
            v
        }
    };

    let derivs = derivative_chain(poly);
    let mut roots: Vec<f64> = complex
        .into_iter()
        .filter(|z| z.re.is_finite() && z.im.abs() <= NEAR_REAL * (1.0 + z.re.abs()))
        .map(|z| polish(&derivs, z.re))
        .filter(|&x| accepted(poly, x))
        .collect();
    roots.sort_by(f64::total_cmp);
    merge_clusters(&derivs, &roots)
}

/// Collapses neighbours that are numerically the same root: either within
/// the merge radius, or with the polynomial at rounding level all the way
/// between them (a multiple root resolved to `eps^(1/m)` only).
fn merge_clusters(derivs: &[Vec<f64>], sorted: &[f64]) -> Vec<f64> {
    let poly = &derivs[0];
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &x in sorted {
        let joins = clusters.last().is_some_and(|c| {
            let last = c[c.len() - 1];
            let (value, scale) = eval_with_scale(poly, 0.5 * (last + x));
            (x - last).abs() <= MERGE_TOL * (1.0 + x.abs())
                || value.abs() <= CLUSTER_TOL * (1.0 + scale)
        });
        match clusters.last_mut() {
            Some(c) if joins => c.push(x),
            _ => clusters.push(vec![x]),
        }
    }
    clusters
        .into_iter()
        .map(|c| representative(derivs, &c))
        .collect()
}

/// The cluster point with the smallest joint derivative score, also trying
/// Newton on the derivatives from the cluster mean.
fn representative(derivs: &[Vec<f64>], cluster: &[f64]) -> f64 {
    if cluster.len() == 1 {
        return cluster[0];
    }
    let poly = &derivs[0];
    let lo = cluster[0];
    let hi = cluster[cluster.len() - 1];
    let slack = (hi - lo).max(MERGE_TOL * (1.0 + hi.abs()));
    let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
    let extra = derivs[1..]
        .iter()
        .filter(|d| d.len() > 1)
        .map(|d| newton(d, mean))
        .filter(|x| *x >= lo - slack && *x <= hi + slack && accepted(poly, *x));
    cluster
        .iter()
        .copied()
        .chain(extra)
        .min_by(|a, b| score(derivs, *a).total_cmp(&score(derivs, *b)))
        .expect("cluster is non-empty")
}

/// Newton on `p`, and also on its first two derivatives, which converge to
/// multiple roots quadratically. Among results passing the residual test
/// the one with the smallest joint derivative score wins.
fn polish(derivs: &[Vec<f64>], x0: f64) -> f64 {
    let poly = &derivs[0];
    let mut best = newton(poly, x0);
    let mut best_score = score(derivs, best);
    for d in derivs[1..].iter().take(2).filter(|d| d.len() > 1) {
        let x = newton(d, x0);
        if (x - x0).abs() <= LOCAL * (1.0 + x0.abs()) && accepted(poly, x) {
            let sc = score(derivs, x);
            if sc < best_score {
                best = x;
                best_score = sc;
            }
        }
    }
    best
}

fn accepted(poly: &[f64], x: f64) -> bool {
    let (value, scale) = eval_with_scale(poly, x);
    value.abs() <= RESIDUAL_TOL * (1.0 + scale)
}

/// `p, p', p'', p'''` as far as the degree allows.
fn derivative_chain(poly: &[f64]) -> Vec<Vec<f64>> {
    let mut derivs = vec![poly.to_vec()];
    while derivs.len() < 4 && derivs[derivs.len() - 1].len() > 1 {
        let next = derivative(&derivs[derivs.len() - 1]);
        derivs.push(next);
    }
    derivs
}

/// `sum_j w^j |p^(j)(x)| / S_j(x)` with `w << 1`; smallest at the exact
/// location of a multiple root, where several derivatives vanish together.
/// The decaying weight lets lower orders dominate.
fn score(derivs: &[Vec<f64>], x: f64) -> f64 {
    let mut weight = 1.0;
    let mut total = 0.0;
    for d in derivs {
        let (value, scale) = eval_with_scale(d, x);
        total += weight * value.abs() / (scale + f64::MIN_POSITIVE);
        weight *= 1e-3;
    }
    total
}

fn eval(poly: &[f64], x: f64) -> f64 {
    poly.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn eval_with_scale(poly: &[f64], x: f64) -> (f64, f64) {
    let ax = x.abs();
    let scale = poly.iter().fold(0.0, |acc, &c| acc * ax + c.abs());
    (eval(poly, x), scale)
}

fn derivative(poly: &[f64]) -> Vec<f64> {
    let deg = poly.len() - 1;
    poly[..deg]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (deg - i) as f64)
        .collect()
}

fn newton(poly: &[f64], x0: f64) -> f64 {
    let dp = derivative(poly);
    let mut x = x0;
    let mut fx = eval(poly, x).abs();
    for _ in 0..32 {
        if fx == 0.0 {
            break;
        }
        let slope = eval(&dp, x);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = x - eval(poly, x) / slope;
        let f_next = eval(poly, next).abs();
        if !(f_next < fx) {
            break;
        }
        x = next;
        fx = f_next;
    }
    x
}

fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // pick the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

/// Cardano in complex arithmetic for `a x^3 + b x^2 + c x + d`.
fn cubic(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 3] {
    let (b, c, d) = (b / a, c / a, d / a);
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = Complex64::new(q * q / 4.0 + p * p * p / 27.0, 0.0).sqrt();
    let half_q = Complex64::new(-q / 2.0, 0.0);
    let u3 = if (half_q + disc).norm() >= (half_q - disc).norm() {
        half_q + disc
    } else {
        half_q - disc
    };
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    if u3.norm() == 0.0 {
        let t = Complex64::new(-shift, 0.0);
        return [t; 3];
    }
    let u = u3.cbrt();
    let mut out = [Complex64::new(0.0, 0.0); 3];
    let mut w = Complex64::new(1.0, 0.0);
    for slot in out.iter_mut() {
        let uk = u * w;
        *slot = uk - p / (3.0 * uk) - shift;
        w *= omega;
    }
    out
}

/// Ferrari's method for a quartic with nonzero leading coefficient.
fn ferrari(poly: &[f64]) -> [Complex64; 4] {
    let a = poly[0];
    let (b, c, d, e) = (poly[1] / a, poly[2] / a, poly[3] / a, poly[4] / a);
    let shift = b / 4.0;
    let b2 = b * b;
    let p = c - 3.0 * b2 / 8.0;
    let q = d - b * c / 2.0 + b2 * b / 8.0;
    let r = e - b * d / 4.0 + b2 * c / 16.0 - 3.0 * b2 * b2 / 256.0;

    let scale = 1.0 + p.abs() + q.abs().sqrt() + r.abs().sqrt();
    let m = cubic(1.0, p, p * p / 4.0 - r, -q * q / 8.0)
        .iter()
        .filter(|z| z.im.abs() <= 1e-9 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);

    let one = Complex64::new(1.0, 0.0);
    let ys: [Complex64; 4] = if !(m > 1e-14 * scale) {
        // biquadratic: y^4 + p y^2 + r
        let [z1, z2] = quadratic(one, p.into(), r.into());
        let (s1, s2) = (z1.sqrt(), z2.sqrt());
        [s1, -s1, s2, -s2]
    } else {
        let s = (2.0 * m).sqrt();
        let base = p / 2.0 + m;
        let t = q / (2.0 * s);
        let [y1, y2] = quadratic(one, (-s).into(), (base + t).into());
        let [y3, y4] = quadratic(one, s.into(), (base - t).into());
        [y1, y2, y3, y4]
    };
    ys.map(|y| y - shift)
}

/// Largest coefficient mismatch between the monic polynomial and the
/// product of its computed linear factors, relative to the coefficient size.
fn backward_error(poly: &[f64], roots: &[Complex64; 4]) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let mut prod = [
        one,
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ];
    for (deg, r) in roots.iter().enumerate() {
        for i in (1..=deg + 1).rev() {
            prod[i] -= prod[i - 1] * r;
        }
    }
    let lead = poly[0];
    let scale = poly.iter().fold(0.0f64, |m, c| m.max((c / lead).abs()));
    (1..5)
        .map(|i| (prod[i] - poly[i] / lead).norm())
        .fold(0.0, f64::max)
        / scale
}

/// Eigenvalues of the companion matrix.
pub(super) fn companion_roots(poly: &[f64]) -> Vec<Complex64> {
    let n = poly.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -poly[n - i] / poly[0];
    }
    // bounded iteration count: the unbounded variant can spin on
    // nilpotent companions such as that of x^4
    match m.try_schur(f64::EPSILON, 500) {
        Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
        None => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn expand(roots: &[f64]) -> [f64; 5] {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &v) in c.iter().enumerate() {
                next[i] += v;
                next[i + 1] -= v * r;
            }
            c = next;
        }
        let mut out = [0.0; 5];
        out[5 - c.len()..].copy_from_slice(&c);
        out
    }

    fn normalized(c: [f64; 5]) -> [f64; 5] {
        let m = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        c.map(|v| v / m)
    }

    #[test]
    fn cubic_real_roots() {
        let r = cubic(1.0, -6.0, 11.0, -6.0);
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (a, b) in re.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tiny_coefficient_gaps() {
        // roots 1e-3 apart
        let c = normalized(expand(&[0.5, 0.501, -3.0, 7.0]));
        let r = real_roots_normalized(c);
        assert_eq!(r.len(), 4, "{r:?}");
    }

    proptest! {
        #[test]
        fn agrees_with_companion_oracle(
            base in prop::collection::vec(-30.0f64..30.0, 4),
            lead in prop_oneof![Just(1.0), -5.0f64..-0.2, 0.2f64..5.0],
        ) {
            let mut r = base.clone();
            r.sort_by(f64::total_cmp);
            // keep roots well separated
            for i in 1..4 {
                if r[i] - r[i - 1] < 0.5 {
                    r[i] = r[i - 1] + 0.5;
                }
            }
            let c = normalized(expand(&r).map(|v| v * lead));
            let found = real_roots_normalized(c);
            let mut oracle: Vec<f64> = companion_roots(&c)
                .into_iter()
                .filter(|z| z.im.abs() < 1e-6)
                .map(|z| z.re)
                .collect();
            oracle.sort_by(f64::total_cmp);
            prop_assert_eq!(found.len(), oracle.len());
            for (a, b) in found.iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-7, "{:?} vs {:?}", found, oracle);
            }
        }

        #[test]
        fn double_roots_found(x in -10.0f64..10.0, y in -10.0f64..10.0) {
            prop_assume!((x - y).abs() > 0.1);
            let c = normalized(expand(&[x, x, y, y]));
            let found = real_roots_normalized(c);
            prop_assert_eq!(found.len(), 2, "{:?}", found);
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            prop_assert!((found[0] - lo).abs() < 1e-6 && (found[1] - hi).abs() < 1e-6);
        }
    }
}
