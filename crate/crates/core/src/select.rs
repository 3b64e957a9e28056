//! Linear-time order statistics for the cardinality screening rule.

use crate::error::{invalid, Result};

/// The `k`-th and `(k+1)`-st largest entries of `values` (1-based `k`).
///
/// Uses introselect from the standard library (expected and worst-case
/// linear time). Duplicates count separately, so `(5, 5, 1)` with `k = 1`
/// gives `(5, 5)`. When `k = n` the second value is `-inf`.
pub fn kth_largest_pair(values: &[f64], k: usize) -> Result<(f64, f64)> {
    let n = values.len();
    if k == 0 || k > n {
        return Err(invalid(format!("k = {k} out of range for {n} values")));
    }
    let mut buf = values.to_vec();
    let (_, kth, rest) = buf.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    let kth = *kth;
    let next = rest.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((kth, next))
}
