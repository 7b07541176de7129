//! Instrumented quicksort.
//!
//! The variant is fixed: last element as pivot, Lomuto partition with a
//! strict less-than test, both sides recursed, no cutoff to insertion sort,
//! no median-of-three, no randomization. Keys equal to the pivot always land
//! on the right, so a run of `m` equal keys costs `m(m-1)/2` comparisons.

use std::ops::Add;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OperationCounts {
    /// Key comparisons against the pivot.
    pub comparisons: u64,
    /// Executed swap statements, self-swaps and the final pivot placement included.
    pub exchanges: u64,
    /// Partition passes over subarrays of length two or more.
    pub partition_calls: u64,
}

impl OperationCounts {
    pub fn total(&self) -> u64 {
        self.comparisons + self.exchanges + self.partition_calls
    }
}

impl Add for OperationCounts {
    type Output = OperationCounts;

    fn add(self, rhs: Self) -> Self {
        OperationCounts {
            comparisons: self.comparisons + rhs.comparisons,
            exchanges: self.exchanges + rhs.exchanges,
            partition_calls: self.partition_calls + rhs.partition_calls,
        }
    }
}

/// Per-operation weights, in the same order as [`OperationCounts`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector {
    pub comparison: f64,
    pub exchange: f64,
    pub partition_call: f64,
}

impl WeightVector {
    pub const UNIT: WeightVector = WeightVector {
        comparison: 1.0,
        exchange: 1.0,
        partition_call: 1.0,
    };

    pub const COMPARISONS_ONLY: WeightVector = WeightVector {
        comparison: 1.0,
        exchange: 0.0,
        partition_call: 0.0,
    };

    pub fn new(comparison: f64, exchange: f64, partition_call: f64) -> Result<Self> {
        let w = WeightVector {
            comparison,
            exchange,
            partition_call,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let ws = [self.comparison, self.exchange, self.partition_call];
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid(format!(
                "weights must be finite and non-negative, got {ws:?}"
            )));
        }
        if ws.iter().all(|&w| w == 0.0) {
            return Err(Error::invalid("at least one weight must be positive"));
        }
        Ok(())
    }
}

/// `sum over types of count * weight`.
pub fn weighted_cost(counts: &OperationCounts, w: &WeightVector) -> Result<f64> {
    w.validate()?;
    Ok(counts.comparisons as f64 * w.comparison
        + counts.exchanges as f64 * w.exchange
        + counts.partition_calls as f64 * w.partition_call)
}

/// Sorts `keys` in place and returns the operation counts.
pub fn quicksort_instrumented<T: Ord>(keys: &mut [T]) -> OperationCounts {
    quicksort_instrumented_by(keys, |a, b| a < b)
}

/// [`quicksort_instrumented`] with an explicit strict less-than.
pub fn quicksort_instrumented_by<T, F>(keys: &mut [T], mut is_less: F) -> OperationCounts
where
    F: FnMut(&T, &T) -> bool,
{
    let mut counts = OperationCounts::default();
    if keys.len() < 2 {
        return counts;
    }
    // Inclusive ranges. The larger side is pushed first so the stack stays
    // logarithmic even when every partition is maximally unbalanced.
    let mut stack: Vec<(usize, usize)> = vec![(0, keys.len() - 1)];
    while let Some((lo, hi)) = stack.pop() {
        let p = partition(keys, lo, hi, &mut is_less, &mut counts);
        let left = (p > lo + 1).then(|| (lo, p - 1));
        let right = (p + 1 < hi).then(|| (p + 1, hi));
        match (left, right) {
            (Some(l), Some(r)) => {
                if l.1 - l.0 > r.1 - r.0 {
                    stack.push(l);
                    stack.push(r);
                } else {
                    stack.push(r);
                    stack.push(l);
                }
            }
            (Some(s), None) | (None, Some(s)) => stack.push(s),
            (None, None) => {}
        }
    }
    counts
}

fn partition<T, F>(
    keys: &mut [T],
    lo: usize,
    hi: usize,
    is_less: &mut F,
    counts: &mut OperationCounts,
) -> usize
where
    F: FnMut(&T, &T) -> bool,
{
    counts.partition_calls += 1;
    let mut store = lo;
    for j in lo..hi {
        counts.comparisons += 1;
        if is_less(&keys[j], &keys[hi]) {
            keys.swap(store, j);
            counts.exchanges += 1;
            store += 1;
        }
    }
    keys.swap(store, hi);
    counts.exchanges += 1;
    store
}

/// Sorts a copy of `keys` and returns it with the counts.
pub fn sorted_with_counts<T: Ord + Clone>(keys: &[T]) -> (Vec<T>, OperationCounts) {
    let mut v = keys.to_vec();
    let c = quicksort_instrumented(&mut v);
    (v, c)
}

/// Total order on floats for sorting heavy-tail samples.
pub fn f64_less(a: &f64, b: &f64) -> bool {
    a.total_cmp(b).is_lt()
}
