//! Finite unions of disjoint open intervals on the extended real line.

use std::cmp::Ordering;

/// Sorted, pairwise-disjoint open intervals `(lo, hi)` with `lo < hi`.
///
/// Endpoints may be infinite. Two intervals that only touch at a point stay
/// separate, so the shared endpoint is not a member of the set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn reals() -> Self {
        Self {
            intervals: vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    /// Builds a normalized set from arbitrary open intervals; empty or
    /// malformed ones (`lo >= hi`, NaN) are dropped.
    pub fn from_intervals<I: IntoIterator<Item = (f64, f64)>>(intervals: I) -> Self {
        sweep(intervals.into_iter())
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo < x && x < hi)
    }

    /// True iff the set is the whole real line.
    pub fn covers_reals(&self) -> bool {
        matches!(self.intervals.as_slice(), [(lo, hi)] if *lo == f64::NEG_INFINITY && *hi == f64::INFINITY)
    }

    /// A point outside the set, taken from the lowest gap: the midpoint of
    /// a bounded gap (the point itself for a single-point gap), or the
    /// finite endpoint moved outward by one for an unbounded gap.
    pub fn complement_witness(&self) -> Option<f64> {
        let first = match self.intervals.first() {
            None => return Some(0.0),
            Some(&first) => first,
        };
        if first.0 > f64::NEG_INFINITY {
            return Some(first.0 - 1.0);
        }
        if let [(_, gap_lo), (gap_hi, _), ..] = self.intervals[..] {
            return Some(gap_lo + 0.5 * (gap_hi - gap_lo));
        }
        let last = self.intervals[self.intervals.len() - 1];
        if last.1 < f64::INFINITY {
            Some(last.1 + 1.0)
        } else {
            None
        }
    }
}

/// Set-theoretic union of several interval sets.
pub fn union(sets: &[IntervalSet]) -> IntervalSet {
    sweep(sets.iter().flat_map(|s| s.intervals.iter().copied()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Endpoint {
    // Right endpoints sort first on ties so touching open intervals stay apart.
    Upper,
    Lower,
}

/// Endpoint sweep with an overlap counter.
fn sweep<I: Iterator<Item = (f64, f64)>>(intervals: I) -> IntervalSet {
    let mut events: Vec<(f64, Endpoint)> = Vec::new();
    for (lo, hi) in intervals {
        if lo < hi {
            events.push((lo, Endpoint::Lower));
            events.push((hi, Endpoint::Upper));
        }
    }
    events.sort_by(|a, b| match a.0.total_cmp(&b.0) {
        Ordering::Equal => a.1.cmp(&b.1),
        other => other,
    });

    let mut out = Vec::new();
    let mut count = 0usize;
    let mut start = 0.0;
    for (x, kind) in events {
        match kind {
            Endpoint::Lower => {
                if count == 0 {
                    start = x;
                }
                count += 1;
            }
            Endpoint::Upper => {
                count -= 1;
                if count == 0 {
                    out.push((start, x));
                }
            }
        }
    }
    IntervalSet { intervals: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INF: f64 = f64::INFINITY;

    fn set(v: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::from_intervals(v.iter().copied())
    }

    #[test]
    fn union_examples() {
        assert_eq!(
            union(&[set(&[(0.0, 1.0)]), set(&[(1.0, 2.0)])]).intervals(),
            &[(0.0, 1.0), (1.0, 2.0)]
        );
        assert_eq!(
            union(&[set(&[(0.0, 2.0)]), set(&[(1.0, 3.0)])]).intervals(),
            &[(0.0, 3.0)]
        );
        assert!(union(&[set(&[(-INF, 0.0)]), set(&[(-1.0, INF)])]).covers_reals());
    }

    #[test]
    fn covers_examples() {
        assert!(IntervalSet::reals().covers_reals());
        assert!(!set(&[(-INF, 1.0), (1.0, INF)]).covers_reals());
        assert!(!IntervalSet::empty().covers_reals());
    }

    #[test]
    fn witness_examples() {
        assert_eq!(
            set(&[(-INF, 0.0), (2.0, INF)]).complement_witness(),
            Some(1.0)
        );
        assert_eq!(
            set(&[(-INF, 1.0), (1.0, INF)]).complement_witness(),
            Some(1.0)
        );
        assert_eq!(IntervalSet::reals().complement_witness(), None);
        assert_eq!(set(&[(0.0, 1.0)]).complement_witness(), Some(-1.0));
        assert_eq!(set(&[(-INF, 3.0)]).complement_witness(), Some(4.0));
        assert_eq!(IntervalSet::empty().complement_witness(), Some(0.0));
    }

    #[test]
    fn drops_degenerate_input() {
        assert!(set(&[(1.0, 1.0), (2.0, 0.0), (f64::NAN, 1.0)]).is_empty());
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        // Small integer grid so touching and shared endpoints are common.
        let endpoint = prop_oneof![
            1 => Just(-INF),
            1 => Just(INF),
            8 => (-6i32..6).prop_map(f64::from),
        ];
        prop::collection::vec((endpoint.clone(), endpoint), 0..5)
            .prop_map(IntervalSet::from_intervals)
    }

    fn member_on_grid(s: &IntervalSet) -> Vec<bool> {
        (-16..=16).map(|i| s.contains(f64::from(i) * 0.5)).collect()
    }

    proptest! {
        #[test]
        fn union_is_a_lattice_join(a in arb_set(), b in arb_set(), c in arb_set()) {
            let ab = union(&[a.clone(), b.clone()]);
            prop_assert_eq!(&ab, &union(&[b.clone(), a.clone()]));
            prop_assert_eq!(&union(&[a.clone(), a.clone()]), &a);
            prop_assert_eq!(
                union(&[ab.clone(), c.clone()]),
                union(&[a.clone(), union(&[b.clone(), c.clone()])])
            );
            if ab.covers_reals() {
                prop_assert!(union(&[ab.clone(), c.clone()]).covers_reals());
            }
            let grid_a = member_on_grid(&a);
            let grid_b = member_on_grid(&b);
            let grid_ab = member_on_grid(&ab);
            for i in 0..grid_ab.len() {
                prop_assert_eq!(grid_ab[i], grid_a[i] || grid_b[i]);
            }
        }

        #[test]
        fn witness_lies_outside(a in arb_set()) {
            match a.complement_witness() {
                Some(w) => prop_assert!(!a.contains(w)),
                None => prop_assert!(a.covers_reals()),
            }
        }
    }
}
