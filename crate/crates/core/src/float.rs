//! Cost comparisons.
//!
//! Costs are real-valued and accumulate rounding error along paths, so every
//! solver compares them with a relative tolerance. Weights are integers and
//! are always compared exactly.

use std::cmp::Ordering;

/// Relative tolerance used for every cost comparison.
pub const COST_RTOL: f64 = 1e-9;

/// `true` when `a` and `b` agree within [`COST_RTOL`] relative to the larger magnitude.
#[inline]
pub fn cost_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= COST_RTOL * a.abs().max(b.abs())
}

/// `a < b` by more than the tolerance.
#[inline]
pub fn cost_lt(a: f64, b: f64) -> bool {
    a < b && !cost_eq(a, b)
}

/// `a <= b` up to the tolerance.
#[inline]
pub fn cost_le(a: f64, b: f64) -> bool {
    a <= b || cost_eq(a, b)
}

/// Three-way comparison that reports `Equal` for costs within tolerance.
#[inline]
pub fn cost_cmp(a: f64, b: f64) -> Ordering {
    if cost_eq(a, b) {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

/// Picks the best item under "least cost, then `tie`" without depending on
/// iteration order: the minimum cost is found exactly first, then every item
/// within tolerance of it competes on `tie` alone.
pub fn min_by_cost_then<T, F, K>(items: impl IntoIterator<Item = T>, cost: F, tie: K) -> Option<T>
where
    F: Fn(&T) -> f64,
    K: Fn(&T, &T) -> Ordering,
{
    let items: Vec<T> = items.into_iter().collect();
    let best = items.iter().map(&cost).min_by(f64::total_cmp)?;
    items
        .into_iter()
        .filter(|item| cost_eq(cost(item), best))
        .min_by(|a, b| tie(a, b))
}
