//! Fixture families shared by the benchmarks in `benches/`.

use projclass_core::family::{FiniteFamily, IndexSet, ProjectionFamily};

/// The first `t` sets of the triangular family.
pub fn triangular_window(t: usize) -> FiniteFamily {
    ProjectionFamily::triangular().window(t).expect("triangular family is infinite")
}

/// `sets` sets over `{1..ground}`, each a deterministic sliding window of `width`.
pub fn banded(sets: usize, ground: u64, width: u64) -> FiniteFamily {
    (0..sets as u64)
        .map(|i| (0..width).map(|d| (i * 7 + d * 3) % ground + 1).collect::<IndexSet>())
        .collect()
}

/// Prefix `[{1},{1}]` followed by triangular blocks, the simplest family with
/// a nonzero trivial multiplicity.
pub fn doubled_prefix() -> ProjectionFamily {
    ProjectionFamily::with_blocks(vec![IndexSet::from([1]), IndexSet::from([1])], 1, 0, 2).expect("valid family")
}
