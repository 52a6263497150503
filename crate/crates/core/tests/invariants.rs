use cdseq_core::{autocorrelation, PhaseSequence};
use proptest::prelude::*;

fn metrics(phases: Vec<f64>) -> (f64, f64) {
    let r = autocorrelation(&PhaseSequence::continuous(phases).unwrap());
    (r.psl(), r.isl())
}

fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    let tol = |x: f64| 1e-9 * (1.0 + x);
    (a.0 - b.0).abs() < tol(a.0) && (a.1 - b.1).abs() < tol(a.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Constant offset, linear phase ramp, reversal and conjugation all
    /// leave every |r_k| unchanged.
    #[test]
    fn sidelobes_are_invariant(
        phases in prop::collection::vec(-3.2f64..3.2, 2..48),
        offset in -3.2f64..3.2,
        slope in -3.2f64..3.2,
    ) {
        let base = metrics(phases.clone());
        let shifted: Vec<f64> = phases
            .iter()
            .enumerate()
            .map(|(i, p)| p + offset + slope * i as f64)
            .collect();
        prop_assert!(close(base, metrics(shifted)));
        let reversed: Vec<f64> = phases.iter().rev().copied().collect();
        prop_assert!(close(base, metrics(reversed)));
        let conjugated: Vec<f64> = phases.iter().map(|p| -p).collect();
        prop_assert!(close(base, metrics(conjugated)));
    }
}
