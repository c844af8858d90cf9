//! The k-wise intersecting predicate, maximality and closure.
//!
//! All three reduce to the set `R_j` of masks that are intersections of at
//! most `j` members (repeats allowed). Once a family has at least `k`
//! members, it fails the distinct-sets property iff some collection of at
//! most `k` distinct members has empty intersection, since the collection can
//! be padded with further members without growing the intersection. So the
//! smallest `j` with `∅ ∈ R_j` decides everything and no tuple enumeration
//! is needed.

use crate::error::{Error, Result};
use crate::family::SetFamily;

/// How a "collection of k sets" is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum KwiseMode {
    /// Every `k` pairwise distinct members meet. Families with fewer than
    /// `k` members are vacuously intersecting.
    #[default]
    Distinct,
    /// Collections may repeat members, so every `j <= k` distinct members
    /// (including a single member on its own) must meet.
    WithRepetition,
}

impl KwiseMode {
    pub fn as_str(self) -> &'static str {
        match self {
            KwiseMode::Distinct => "distinct",
            KwiseMode::WithRepetition => "repetition",
        }
    }
}

impl std::str::FromStr for KwiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distinct" => Ok(KwiseMode::Distinct),
            "repetition" | "with-repetition" => Ok(KwiseMode::WithRepetition),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// Masks expressible as an intersection of at most `depth` members.
pub fn reachable_intersections(f: &SetFamily, depth: usize) -> SetFamily {
    let mut reach = SetFamily::new(f.n()).expect("same ground");
    if depth == 0 || f.is_empty() {
        return reach;
    }
    let members = f.members();
    let mut frontier = members.clone();
    for &m in &members {
        reach.insert(m);
    }
    for _ in 1..depth {
        let mut next = Vec::new();
        for &i in &frontier {
            for &g in &members {
                let x = i & g;
                if reach.insert(x) {
                    next.push(x);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    reach
}

/// Smallest number of distinct members with empty intersection, if it is at
/// most `limit`.
pub fn min_empty_intersection(f: &SetFamily, limit: usize) -> Option<usize> {
    if f.is_empty() || limit == 0 {
        return None;
    }
    if f.contains(0) {
        return Some(1);
    }
    let members = f.members();
    let mut reach = f.clone();
    let mut frontier = members.clone();
    for depth in 2..=limit {
        let mut next = Vec::new();
        for &i in &frontier {
            for &g in &members {
                let x = i & g;
                if x == 0 {
                    return Some(depth);
                }
                if reach.insert(x) {
                    next.push(x);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        frontier = next;
    }
    None
}

fn intersecting_unchecked(f: &SetFamily, k: usize, mode: KwiseMode) -> bool {
    match mode {
        KwiseMode::Distinct => f.len() < k || min_empty_intersection(f, k).is_none(),
        KwiseMode::WithRepetition => min_empty_intersection(f, k).is_none(),
    }
}

pub fn is_k_wise_intersecting(f: &SetFamily, k: usize, mode: KwiseMode) -> Result<bool> {
    check_k(k)?;
    Ok(intersecting_unchecked(f, k, mode))
}

/// Non-members `m` such that `F ∪ {m}` is still k-wise intersecting.
pub fn addable_masks(f: &SetFamily, k: usize, mode: KwiseMode) -> Result<SetFamily> {
    check_k(k)?;
    let n = f.n();
    if mode == KwiseMode::Distinct && f.len() + 1 < k {
        return Ok(f.complement_in_powerset());
    }
    if min_empty_intersection(f, k).is_some() {
        return SetFamily::new(n);
    }
    // m is blocked iff m is disjoint from some intersection of at most k-1
    // members, i.e. m lies below the complement of such an intersection.
    let reach = reachable_intersections(f, k - 1);
    let mut blocked = reach.complement_family().down_closure();
    blocked.insert(0);
    Ok(blocked.union(f)?.complement_in_powerset())
}

pub fn is_maximal_k_wise(f: &SetFamily, k: usize, mode: KwiseMode) -> Result<bool> {
    Ok(addable_witness(f, k, mode)?.is_none())
}

/// The smallest mask that can be added while keeping the property, or
/// `None` if the family is maximal. Errors if `f` is not intersecting.
pub fn addable_witness(f: &SetFamily, k: usize, mode: KwiseMode) -> Result<Option<u32>> {
    if !is_k_wise_intersecting(f, k, mode)? {
        return Err(Error::NotIntersecting { k });
    }
    Ok(addable_masks(f, k, mode)?.iter().next())
}

/// Extends `f` to a maximal family by scanning masks in ascending order,
/// adding each one that keeps the property, until a pass adds nothing.
///
/// Addability only shrinks as the family grows, so repeatedly taking the
/// smallest addable mask gives exactly the ascending scan.
pub fn maximal_closure(f: &SetFamily, k: usize, mode: KwiseMode) -> Result<SetFamily> {
    if !is_k_wise_intersecting(f, k, mode)? {
        return Err(Error::NotIntersecting { k });
    }
    let mut out = f.clone();
    while let Some(m) = addable_masks(&out, k, mode)?.iter().next() {
        out.insert(m);
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Direct check over all collections of `j` distinct members.
    pub(crate) fn naive_intersecting(f: &SetFamily, k: usize, mode: KwiseMode) -> bool {
        let members = f.members();
        let full = f.full_mask();
        let sizes: Vec<usize> = match mode {
            KwiseMode::Distinct => vec![k],
            KwiseMode::WithRepetition => (1..=k.min(members.len())).collect(),
        };
        fn rec(members: &[u32], start: usize, left: usize, acc: u32) -> bool {
            if left == 0 {
                return acc != 0;
            }
            (start..members.len()).all(|i| rec(members, i + 1, left - 1, acc & members[i]))
        }
        sizes.into_iter().all(|j| j > members.len() || rec(&members, 0, j, full))
    }

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_sets(n, sets).unwrap()
    }

    #[test]
    fn intersecting_examples() {
        let d = KwiseMode::Distinct;
        assert!(is_k_wise_intersecting(&fam(3, &[&[1], &[1, 2], &[1, 2, 3]]), 3, d).unwrap());
        let tri = fam(3, &[&[1, 2], &[2, 3], &[1, 3]]);
        assert!(!is_k_wise_intersecting(&tri, 3, d).unwrap());
        assert!(is_k_wise_intersecting(&tri, 2, d).unwrap());
        let f = fam(2, &[&[], &[1, 2]]);
        assert!(is_k_wise_intersecting(&f, 3, d).unwrap());
        assert!(!is_k_wise_intersecting(&f, 3, KwiseMode::WithRepetition).unwrap());
        assert!(is_k_wise_intersecting(&f, 1, d).is_err());
    }

    #[test]
    fn agrees_with_naive_on_all_small_families() {
        for n in 1..=3usize {
            for bits in 0u64..(1 << (1 << n)) {
                let f = SetFamily::from_masks(n, (0..(1u32 << n)).filter(|m| bits >> m & 1 == 1)).unwrap();
                for k in 2..=4 {
                    for mode in [KwiseMode::Distinct, KwiseMode::WithRepetition] {
                        assert_eq!(
                            is_k_wise_intersecting(&f, k, mode).unwrap(),
                            naive_intersecting(&f, k, mode),
                            "{f:?} k={k} {mode:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn maximal_examples() {
        let d = KwiseMode::Distinct;
        assert!(is_maximal_k_wise(&fam(2, &[&[], &[1, 2]]), 3, d).unwrap());
        let star = fam(3, &[&[1, 2], &[1, 3], &[1, 2, 3]]);
        assert!(!is_maximal_k_wise(&star, 3, d).unwrap());
        assert_eq!(addable_witness(&star, 3, d).unwrap(), Some(0b001));
        let tri = fam(3, &[&[1, 2], &[2, 3], &[1, 3]]);
        assert_eq!(is_maximal_k_wise(&tri, 3, d), Err(Error::NotIntersecting { k: 3 }));
    }

    #[test]
    fn addable_agrees_with_naive_on_all_small_families() {
        for n in 1..=3usize {
            for bits in 0u64..(1 << (1 << n)) {
                let f = SetFamily::from_masks(n, (0..(1u32 << n)).filter(|m| bits >> m & 1 == 1)).unwrap();
                for k in 2..=4 {
                    for mode in [KwiseMode::Distinct, KwiseMode::WithRepetition] {
                        if !naive_intersecting(&f, k, mode) {
                            continue;
                        }
                        let got = addable_masks(&f, k, mode).unwrap();
                        for m in 0..(1u32 << n) {
                            let want = !f.contains(m) && {
                                let mut g = f.clone();
                                g.insert(m);
                                naive_intersecting(&g, k, mode)
                            };
                            assert_eq!(got.contains(m), want, "{f:?} + {m} k={k} {mode:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closure_examples() {
        let d = KwiseMode::Distinct;
        let c = maximal_closure(&fam(2, &[&[1, 2]]), 3, d).unwrap();
        assert_eq!(c, fam(2, &[&[], &[1, 2]]));
        assert_eq!(maximal_closure(&c, 3, d).unwrap(), c);
        let top = fam(4, &[&[1, 2, 3, 4]]);
        let c = maximal_closure(&top, 3, d).unwrap();
        assert!(c.contains(0b1111));
        assert!(is_maximal_k_wise(&c, 3, d).unwrap());
    }

    #[test]
    fn closure_matches_literal_ascending_scan() {
        fn scan(f: &SetFamily, k: usize, mode: KwiseMode) -> SetFamily {
            let mut out = f.clone();
            loop {
                let mut added = false;
                for m in 0..(1u32 << f.n()) {
                    if out.contains(m) {
                        continue;
                    }
                    out.insert(m);
                    if naive_intersecting(&out, k, mode) {
                        added = true;
                    } else {
                        out.remove(m);
                    }
                }
                if !added {
                    return out;
                }
            }
        }
        for n in 2..=4usize {
            for seed in 0..(1u32 << n) {
                let f = SetFamily::from_masks(n, [seed | 1, (1 << n) - 1]).unwrap();
                for k in 2..=3 {
                    for mode in [KwiseMode::Distinct, KwiseMode::WithRepetition] {
                        if naive_intersecting(&f, k, mode) {
                            assert_eq!(maximal_closure(&f, k, mode).unwrap(), scan(&f, k, mode));
                        }
                    }
                }
            }
        }
    }
}
