//! Isomorphism-invariant representatives under coordinate permutations.

use crate::error::{Error, Result};
use crate::family::SetFamily;

/// Largest ground set accepted by [`canonical_form`].
pub const CANONICAL_MAX_N: usize = 10;

/// All permutations of `0..n` in Heap's order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.push(p.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Splits a permutation of up to 10 coordinates into two 32-entry lookup
/// tables so a mask is relabelled with two loads.
struct PermTable {
    lo: [u32; 32],
    hi: [u32; 32],
}

impl PermTable {
    fn new(perm: &[usize]) -> Self {
        let mut lo = [0u32; 32];
        let mut hi = [0u32; 32];
        for m in 0..32u32 {
            for i in 0..5 {
                if m >> i & 1 == 1 {
                    if i < perm.len() {
                        lo[m as usize] |= 1 << perm[i];
                    }
                    if i + 5 < perm.len() {
                        hi[m as usize] |= 1 << perm[i + 5];
                    }
                }
            }
        }
        Self { lo, hi }
    }

    #[inline]
    fn apply(&self, m: u32) -> u32 {
        self.lo[(m & 31) as usize] | self.hi[(m >> 5) as usize]
    }
}

/// Compares bitmaps as integers (most significant word first).
fn bitmap_less(a: &[u64], b: &[u64]) -> bool {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// The relabelling of `f` whose membership bitmap, read as an integer (the
/// hex serialization), is smallest.
pub fn canonical_form(f: &SetFamily) -> Result<SetFamily> {
    let n = f.n();
    if n > CANONICAL_MAX_N {
        return Err(Error::GroundSizeTooLarge { n, max: CANONICAL_MAX_N });
    }
    let members = f.members();
    let words = f.words().len();
    let mut best = f.words().to_vec();
    let mut scratch = vec![0u64; words];
    for perm in permutations(n) {
        let t = PermTable::new(&perm);
        scratch.iter_mut().for_each(|w| *w = 0);
        for &m in &members {
            let x = t.apply(m);
            scratch[(x >> 6) as usize] |= 1 << (x & 63);
        }
        if bitmap_less(&scratch, &best) {
            best.copy_from_slice(&scratch);
        }
    }
    Ok(SetFamily::from_words(n, best))
}

pub fn are_isomorphic(a: &SetFamily, b: &SetFamily) -> Result<bool> {
    if a.n() != b.n() || a.len() != b.len() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::linked_cubes;
    use crate::mask::Mask;

    #[test]
    fn heap_enumerates_all() {
        let ps = permutations(4);
        assert_eq!(ps.len(), 24);
        let mut sorted = ps.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 24);
        assert_eq!(permutations(0).len(), 1);
    }

    #[test]
    fn invariant_under_relabelling() {
        let f = SetFamily::from_sets(5, &[&[1], &[2, 3], &[1, 4, 5], &[]]).unwrap();
        let c = canonical_form(&f).unwrap();
        for perm in [[4, 3, 2, 1, 0], [1, 0, 2, 4, 3], [2, 4, 0, 1, 3]] {
            assert_eq!(canonical_form(&f.permuted(&perm).unwrap()).unwrap(), c);
        }
        assert_eq!(canonical_form(&c).unwrap(), c);
        assert_eq!(c.len(), f.len());
    }

    #[test]
    fn balanced_linked_cubes_are_isomorphic() {
        let a = linked_cubes(5, Mask::from_elements(5, &[1, 2]).unwrap()).unwrap();
        let b = linked_cubes(5, Mask::from_elements(5, &[4, 5]).unwrap()).unwrap();
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
        let c = linked_cubes(5, Mask::from_elements(5, &[1]).unwrap()).unwrap();
        assert!(!are_isomorphic(&a, &c).unwrap());
    }

    #[test]
    fn rejects_wide_grounds() {
        assert!(canonical_form(&SetFamily::new(11).unwrap()).is_err());
    }
}
