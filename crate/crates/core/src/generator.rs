//! Coverage by disjoint unions: which subsets of `[n]` are a union of at most
//! `k` pairwise disjoint members of a family.

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::kwise::{is_maximal_k_wise, KwiseMode};
use crate::mask::submasks;
use crate::ratio::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub covered: SetFamily,
    pub count: usize,
}

impl Coverage {
    pub fn uncovered(&self) -> SetFamily {
        self.covered.complement_in_powerset()
    }
}

fn mark(words: &mut [u64], x: u32) {
    words[(x >> 6) as usize] |= 1 << (x & 63);
}

/// Masks expressible as a disjoint union of `1..=k` members of `g`.
pub fn coverage(g: &SetFamily, k: usize) -> Result<Coverage> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let members = g.members();
    let full = g.full_mask();
    // disjoint partners of `a`: scan the members or the subsets of `a^c`,
    // whichever is shorter
    let room = |a: u32| 1usize << (full & !a).count_ones();
    let mut covered = g.clone();
    if k >= 2 {
        let mut words = covered.words().to_vec();
        for (i, &a) in members.iter().enumerate() {
            if room(a) < members.len() - i {
                for b in submasks(full & !a) {
                    if g.contains(b) {
                        mark(&mut words, a | b);
                    }
                }
            } else {
                for &b in &members[i..] {
                    if a & b == 0 {
                        mark(&mut words, a | b);
                    }
                }
            }
        }
        let level2 = SetFamily::from_words(g.n(), words);
        let mut frontier: Vec<u32> = level2.difference(&covered)?.members();
        covered = level2;
        for _ in 2..k {
            let mut next = Vec::new();
            for &c in &frontier {
                if room(c) < members.len() {
                    for m in submasks(full & !c) {
                        if g.contains(m) && covered.insert(c | m) {
                            next.push(c | m);
                        }
                    }
                } else {
                    for &m in &members {
                        if c & m == 0 && covered.insert(c | m) {
                            next.push(c | m);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
    }
    let count = covered.len();
    Ok(Coverage { covered, count })
}

/// Whether `g` is a `(1-eps)`-`k`-generator: at most `eps·2^n` subsets are
/// left uncovered. The comparison is exact.
pub fn is_generator(g: &SetFamily, k: usize, eps: Rational) -> Result<bool> {
    if eps < Rational::from_integer(0) || eps > Rational::from_integer(1) {
        return Err(Error::InvalidParameter(format!("eps must lie in [0, 1], got {eps}")));
    }
    let cov = coverage(g, k)?;
    let total = g.universe_size() as i128;
    let uncovered = total - cov.count as i128;
    Ok(uncovered * eps.denom() <= eps.numer() * total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    pub holds: bool,
    /// Non-members of `F` that are not a union of at most `k-1` disjoint
    /// members of the complement family.
    pub violations: Vec<u32>,
}

/// Checks that every set outside a maximal k-wise intersecting family is a
/// disjoint union of at most `k-1` complements of members.
pub fn verify_maximal_generator_correspondence(f: &SetFamily, k: usize) -> Result<Correspondence> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    if !is_maximal_k_wise(f, k, KwiseMode::Distinct).unwrap_or(false) {
        return Err(Error::NotMaximal { k });
    }
    let cov = coverage(&f.complement_family(), k - 1)?;
    let violations: Vec<u32> = f
        .complement_in_powerset()
        .iter()
        .filter(|&m| !cov.covered.contains(m))
        .collect();
    Ok(Correspondence { holds: violations.is_empty(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{linked_cubes, pair_of_cubes, series_of_cubes, Partition};
    use crate::mask::Mask;

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_sets(n, sets).unwrap()
    }

    /// Every union of at most k pairwise disjoint distinct members.
    fn naive_coverage(g: &SetFamily, k: usize) -> SetFamily {
        let members = g.members();
        let mut out = SetFamily::new(g.n()).unwrap();
        fn rec(ms: &[u32], start: usize, left: usize, acc: u32, any: bool, out: &mut SetFamily) {
            if any {
                out.insert(acc);
            }
            if left == 0 {
                return;
            }
            for i in start..ms.len() {
                if ms[i] & acc == 0 {
                    rec(ms, i + 1, left - 1, acc | ms[i], true, out);
                }
            }
        }
        rec(&members, 0, k, 0, false, &mut out);
        out
    }

    #[test]
    fn coverage_examples() {
        let c = coverage(&fam(2, &[&[]]), 2).unwrap();
        assert_eq!(c.covered, fam(2, &[&[]]));
        assert_eq!(c.count, 1);
        let c = coverage(&fam(3, &[&[1], &[2]]), 2).unwrap();
        assert_eq!(c.covered, fam(3, &[&[1], &[2], &[1, 2]]));
        assert!(coverage(&fam(3, &[&[1]]), 0).is_err());
    }

    #[test]
    fn pair_of_cubes_covers_everything() {
        for n in 1..=10 {
            for s in 0..(1u32 << n) {
                let g = pair_of_cubes(n, Mask::new(s, n).unwrap()).unwrap();
                assert_eq!(coverage(&g, 2).unwrap().count, 1 << n);
            }
        }
    }

    #[test]
    fn generator_examples() {
        let p = Partition::balanced(6, 3).unwrap();
        assert!(is_generator(&series_of_cubes(&p).unwrap(), 3, Rational::from_integer(0)).unwrap());
        assert!(!is_generator(&fam(1, &[&[]]), 2, Rational::from_integer(0)).unwrap());
        assert!(is_generator(&fam(1, &[&[]]), 2, Rational::new(1, 2)).unwrap());
        assert!(is_generator(&fam(1, &[&[]]), 2, Rational::new(3, 2)).is_err());
        // An up-set has few disjoint pairs: only [n] ∪ {} style unions survive.
        let lc = linked_cubes(5, Mask::from_elements(5, &[1, 2]).unwrap()).unwrap();
        let cov = coverage(&lc, 2).unwrap();
        assert_eq!(cov.count, 9);
        assert!(!is_generator(&lc, 2, Rational::from_integer(0)).unwrap());
    }

    #[test]
    fn agrees_with_naive_enumeration() {
        for n in 1..=4usize {
            for seed in 0..300u64 {
                let mut x = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ n as u64;
                let mut g = SetFamily::new(n).unwrap();
                for m in 0..(1u32 << n) {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    if x.is_multiple_of(3) {
                        g.insert(m);
                    }
                }
                for k in 1..=4 {
                    assert_eq!(coverage(&g, k).unwrap().covered, naive_coverage(&g, k), "{g:?} k={k}");
                }
            }
        }
    }

    #[test]
    fn coverage_is_monotone() {
        let g = fam(4, &[&[1], &[2], &[3, 4]]);
        let g2 = fam(4, &[&[1], &[2], &[3, 4], &[3]]);
        for k in 1..=3 {
            let a = coverage(&g, k).unwrap().covered;
            assert!(a.is_subfamily_of(&coverage(&g2, k).unwrap().covered).unwrap());
            assert!(a.is_subfamily_of(&coverage(&g, k + 1).unwrap().covered).unwrap());
        }
        assert_eq!(coverage(&g, 1).unwrap().covered, g);
    }

    #[test]
    fn down_sets_cover_down_sets() {
        let g = fam(5, &[&[1, 2], &[3], &[4, 5]]).down_closure();
        for k in 1..=3 {
            assert!(coverage(&g, k).unwrap().covered.is_down_closed());
        }
    }

    #[test]
    fn correspondence_examples() {
        let s = Mask::from_elements(5, &[1, 2]).unwrap();
        let lc = linked_cubes(5, s).unwrap();
        assert!(verify_maximal_generator_correspondence(&lc, 3).unwrap().holds);
        let tiny = fam(2, &[&[], &[1, 2]]);
        let c = verify_maximal_generator_correspondence(&tiny, 3).unwrap();
        assert!(!c.holds);
        assert_eq!(c.violations, vec![0b01, 0b10]);
        let star = fam(3, &[&[1, 2], &[1, 3], &[1, 2, 3]]);
        assert_eq!(verify_maximal_generator_correspondence(&star, 3), Err(Error::NotMaximal { k: 3 }));
    }
}
