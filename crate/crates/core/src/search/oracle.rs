//! Brute-force `f(n,k)` used to check the search. It shares no code with
//! the k-wise checkers: every collection is tested by direct enumeration.

use crate::error::{Error, Result};
use crate::kwise::KwiseMode;

/// Some choice of exactly `r` members (starting at `start`) meets to `acc ∩ … = ∅`.
fn some_empty_meet(members: &[u32], r: usize, start: usize, acc: u32) -> bool {
    if r == 0 {
        return acc == 0;
    }
    (start..members.len()).any(|i| some_empty_meet(members, r - 1, i + 1, acc & members[i]))
}

fn naive_kwise(members: &[u32], n: usize, k: usize, mode: KwiseMode) -> bool {
    let full = (1u32 << n) - 1;
    match mode {
        KwiseMode::Distinct => members.len() < k || !some_empty_meet(members, k, 0, full),
        KwiseMode::WithRepetition => (1..=k.min(members.len())).all(|r| !some_empty_meet(members, r, 0, full)),
    }
}

fn naive_maximal(members: &[u32], n: usize, k: usize, mode: KwiseMode) -> bool {
    if !naive_kwise(members, n, k, mode) {
        return false;
    }
    (0..1u32 << n).filter(|m| !members.contains(m)).all(|m| {
        let mut grown = members.to_vec();
        grown.push(m);
        !naive_kwise(&grown, n, k, mode)
    })
}

fn members_of(bits: u64, universe: u32) -> Vec<u32> {
    (0..universe).filter(|&m| bits >> m & 1 == 1).collect()
}

/// Up-sets of `2^[n]` as bitmaps, from the split `F = F0 ∪ {A + n : A ∈ F1}`
/// with `F0 ⊆ F1` both up-sets on one element fewer.
fn up_sets(n: usize) -> Vec<u64> {
    if n == 0 {
        return vec![0, 1];
    }
    let lower = up_sets(n - 1);
    let shift = 1u32 << (n - 1);
    let mut out = Vec::new();
    for &f0 in &lower {
        for &f1 in &lower {
            if f0 & !f1 == 0 {
                out.push(f0 | f1 << shift);
            }
        }
    }
    out
}

fn small_families(universe: u32, below: usize, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, start: u32) {
    if !cur.is_empty() {
        out.push(cur.clone());
    }
    if cur.len() + 1 >= below {
        return;
    }
    for m in start..universe {
        cur.push(m);
        small_families(universe, below, out, cur, m + 1);
        cur.pop();
    }
}

/// Minimum size of a maximal k-wise intersecting family. All families are
/// filtered for `n ≤ 4`; at `n = 5` the candidates are the up-sets plus
/// every family with fewer than `k` members.
pub fn oracle_min(n: usize, k: usize, mode: KwiseMode) -> Result<usize> {
    if n == 0 || n > 5 {
        return Err(Error::GroundSizeTooLarge { n, max: 5 });
    }
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    let universe = 1u32 << n;
    let candidates: Vec<Vec<u32>> = if n <= 4 {
        (0..1u64 << universe).map(|bits| members_of(bits, universe)).collect()
    } else {
        let mut c: Vec<Vec<u32>> = up_sets(n).into_iter().map(|bits| members_of(bits, universe)).collect();
        small_families(universe, k, &mut c, &mut Vec::new(), 0);
        c
    };
    let mut best: Option<usize> = None;
    for members in candidates {
        if best.is_some_and(|b| members.len() >= b) {
            continue;
        }
        if naive_maximal(&members, n, k, mode) {
            best = Some(members.len());
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("no maximal family".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedekind_counts() {
        let counts: Vec<usize> = (0..=5).map(|n| up_sets(n).len()).collect();
        assert_eq!(counts, vec![2, 3, 6, 20, 168, 7581]);
    }

    #[test]
    fn small_values() {
        assert_eq!(oracle_min(2, 3, KwiseMode::Distinct).unwrap(), 2);
        assert!(oracle_min(6, 3, KwiseMode::Distinct).is_err());
    }
}
