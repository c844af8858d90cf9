//! Fixed inputs shared by the benchmarks.

use kwise_core::{linked_cubes, pair_of_cubes, Mask, SetFamily};

/// Balanced pair of linked cubes on `[n]`.
pub fn balanced_linked_cubes(n: usize) -> SetFamily {
    let s = Mask::new((1u32 << (n / 2)) - 1, n).expect("valid width");
    linked_cubes(n, s).expect("valid split")
}

/// Balanced pair of cubes on `[n]`.
pub fn balanced_pair_of_cubes(n: usize) -> SetFamily {
    let s = Mask::new((1u32 << (n / 2)) - 1, n).expect("valid width");
    pair_of_cubes(n, s).expect("valid split")
}
