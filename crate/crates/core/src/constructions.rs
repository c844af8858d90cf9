//! The extremal families and their closed-form sizes.

use std::fmt;

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::mask::{elements_of, full_bits, submasks, Mask};
use crate::ratio::Rational;

/// An ordered partition of `[n]` into nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<u32>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<u32>) -> Result<Self> {
        if n == 0 || n > crate::mask::MAX_MASK_WIDTH {
            return Err(Error::GroundSizeTooLarge { n, max: crate::mask::MAX_MASK_WIDTH });
        }
        let mut seen = 0u32;
        for &b in &blocks {
            if b == 0 {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if b & !full_bits(n) != 0 {
                return Err(Error::InvalidPartition(format!("block {b:#x} exceeds [{n}]")));
            }
            if b & seen != 0 {
                return Err(Error::InvalidPartition("blocks overlap".into()));
            }
            seen |= b;
        }
        if seen != full_bits(n) {
            return Err(Error::InvalidPartition("blocks do not cover the ground set".into()));
        }
        Ok(Self { n, blocks })
    }

    /// Contiguous blocks `{1..}`, `{..}`, ... with sizes differing by at most
    /// one, larger blocks first.
    pub fn balanced(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!("cannot split [{n}] into {k} nonempty blocks")));
        }
        let (q, r) = (n / k, n % k);
        let mut start = 0;
        let blocks = (0..k)
            .map(|i| {
                let len = q + usize::from(i < r);
                let b = full_bits(len) << start;
                start += len;
                b
            })
            .collect();
        Self::new(n, blocks)
    }

    /// Parses `"1,2|3,4,5"`.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let blocks = s
            .split('|')
            .map(|b| {
                let elems = b
                    .split(',')
                    .map(|e| e.trim().parse::<usize>().map_err(|_| Error::InvalidPartition(format!("bad element {e:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Mask::from_elements(n, &elems)?.bits())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn is_balanced(&self) -> bool {
        let k = self.blocks.len();
        let (lo, hi) = (self.n / k, self.n.div_ceil(k));
        self.blocks.iter().all(|b| (lo..=hi).contains(&(b.count_ones() as usize)))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|&b| elements_of(b).iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

fn check_width(n: usize, s: Mask) -> Result<()> {
    if s.width() != n {
        return Err(Error::GroundSizeMismatch { left: n, right: s.width() });
    }
    Ok(())
}

/// Strict supersets of `S` together with strict supersets of `S^c`.
pub fn linked_cubes(n: usize, s: Mask) -> Result<SetFamily> {
    check_width(n, s)?;
    if s.is_empty() || s.len() == n {
        return Err(Error::InvalidParameter("S must be a nonempty proper subset".into()));
    }
    let mut f = SetFamily::new(n)?;
    let full = full_bits(n);
    for side in [s.bits(), s.complement().bits()] {
        let rest = full & !side;
        for extra in submasks(rest) {
            if extra != 0 {
                f.insert(side | extra);
            }
        }
    }
    Ok(f)
}

/// `2^S ∪ 2^{S^c}`.
pub fn pair_of_cubes(n: usize, s: Mask) -> Result<SetFamily> {
    check_width(n, s)?;
    let mut f = SetFamily::new(n)?;
    for side in [s.bits(), s.complement().bits()] {
        for sub in submasks(side) {
            f.insert(sub);
        }
    }
    Ok(f)
}

/// Union of the power sets of the partition blocks.
pub fn series_of_cubes(p: &Partition) -> Result<SetFamily> {
    let mut f = SetFamily::new(p.n())?;
    for &b in p.blocks() {
        for sub in submasks(b) {
            f.insert(sub);
        }
    }
    Ok(f)
}

fn pow2(e: usize) -> Result<u128> {
    1u128.checked_shl(e as u32).filter(|_| e < 127).ok_or_else(|| Error::InvalidParameter(format!("2^{e} overflows")))
}

fn exact_div(n: usize, d: usize, what: &str) -> Result<usize> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::Divisibility(format!("{what}: {d} must divide n = {n}")));
    }
    Ok(n / d)
}

/// `2^{n-|S|} + 2^{|S|} - 3`.
pub fn linked_cubes_size(n: usize, s_len: usize) -> Result<u128> {
    if s_len == 0 || s_len >= n {
        return Err(Error::InvalidParameter("need 0 < |S| < n".into()));
    }
    Ok(pow2(n - s_len)? + pow2(s_len)? - 3)
}

/// Size of a balanced pair of linked cubes, `2^⌈n/2⌉ + 2^⌊n/2⌋ - 3`.
pub fn balanced_linked_cubes_size(n: usize) -> Result<u128> {
    linked_cubes_size(n, n / 2)
}

/// `2^{|S|} + 2^{n-|S|} - 1`.
pub fn pair_of_cubes_size(n: usize, s_len: usize) -> Result<u128> {
    if s_len > n {
        return Err(Error::InvalidParameter("|S| exceeds n".into()));
    }
    Ok(pow2(s_len)? + pow2(n - s_len)? - 1)
}

/// `|F_{n,k}| = k·2^{n/k} - (k-1)` for `k | n`.
pub fn series_of_cubes_size(n: usize, k: usize) -> Result<u128> {
    let e = exact_div(n, k, "balanced series of cubes")?;
    Ok(k as u128 * pow2(e)? - (k as u128 - 1))
}

/// `|F_{n,k-1}| = (k-1)·2^{n/(k-1)} - k + 2`, the lower reference for `f(n,k)`.
pub fn series_k_minus_one_size(n: usize, k: usize) -> Result<u128> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("k must be at least 3, got {k}")));
    }
    series_of_cubes_size(n, k - 1)
}

/// Size of Janzer's construction, `(k-1)·2^{k-3}·2^{n/(k-1)} - (k-2)(2^{k-1}-1)`.
pub fn janzer_size(n: usize, k: usize) -> Result<u128> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("k must be at least 3, got {k}")));
    }
    let e = exact_div(n, k - 1, "Janzer size")?;
    let lead = (k as u128 - 1) * pow2(k - 3)? * pow2(e)?;
    Ok(lead - (k as u128 - 2) * (pow2(k - 1)? - 1))
}

/// Reference curves `c·2^{n/(k-1)}` and `d·2^{n/⌈k/2⌉}` around `f(n,k)`.
pub fn reference_bounds(n: usize, k: usize, c: Rational, d: Rational) -> Result<(Rational, Rational)> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("k must be at least 3, got {k}")));
    }
    let lo_e = exact_div(n, k - 1, "lower reference exponent n/(k-1)")?;
    let hi_e = exact_div(n, k.div_ceil(2), "upper reference exponent n/ceil(k/2)")?;
    let lo = c * Rational::from_integer(pow2(lo_e)? as i128);
    let hi = d * Rational::from_integer(pow2(hi_e)? as i128);
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kwise::{is_k_wise_intersecting, KwiseMode};

    fn m(n: usize, e: &[usize]) -> Mask {
        Mask::from_elements(n, e).unwrap()
    }

    #[test]
    fn linked_cubes_sizes() {
        assert_eq!(linked_cubes(5, m(5, &[1, 2])).unwrap().len(), 9);
        assert_eq!(linked_cubes(4, m(4, &[1, 2])).unwrap().len(), 5);
        assert_eq!(balanced_linked_cubes_size(5).unwrap(), 9);
        assert!(linked_cubes(3, m(3, &[])).is_err());
        assert!(linked_cubes(3, m(3, &[1, 2, 3])).is_err());
    }

    #[test]
    fn full_set_is_the_only_common_strict_superset() {
        for n in 2..=7 {
            for s in 1..(full_bits(n)) {
                let s = Mask::new(s, n).unwrap();
                let f = linked_cubes(n, s).unwrap();
                let both: Vec<u32> = f
                    .iter()
                    .filter(|&a| a != s.bits() && a & s.bits() == s.bits())
                    .filter(|&a| {
                        let c = s.complement().bits();
                        a != c && a & c == c
                    })
                    .collect();
                assert_eq!(both, vec![full_bits(n)]);
                assert_eq!(f.len() as u128, linked_cubes_size(n, s.len()).unwrap());
            }
        }
    }

    #[test]
    fn pair_of_cubes_examples() {
        let f = pair_of_cubes(3, m(3, &[1])).unwrap();
        assert_eq!(f, SetFamily::from_sets(3, &[&[], &[1], &[2], &[3], &[2, 3]]).unwrap());
        for l in 1..=6 {
            let n = 2 * l + 1;
            let s = Mask::new(full_bits(l), n).unwrap();
            assert_eq!(pair_of_cubes(n, s).unwrap().len(), 3 * (1 << l) - 1);
        }
        assert_eq!(pair_of_cubes(3, m(3, &[])).unwrap().len(), 8);
    }

    #[test]
    fn complement_of_linked_cubes_is_pair_of_cubes_minus_tops() {
        let n = 5;
        for s in 1..full_bits(n) {
            let s = Mask::new(s, n).unwrap();
            let mut want = pair_of_cubes(n, s).unwrap();
            want.remove(s.bits());
            want.remove(s.complement().bits());
            assert_eq!(linked_cubes(n, s).unwrap().complement_family(), want);
        }
    }

    #[test]
    fn series_examples() {
        let p = Partition::parse(4, "1,2|3,4").unwrap();
        assert_eq!(series_of_cubes(&p).unwrap().len(), 7);
        let p = Partition::balanced(6, 3).unwrap();
        assert!(p.is_balanced());
        assert_eq!(series_of_cubes(&p).unwrap().len(), 10);
        let p = Partition::balanced(5, 1).unwrap();
        assert_eq!(series_of_cubes(&p).unwrap().len(), 32);
        let p = Partition::parse(5, "1,2|3,4,5").unwrap();
        let s = m(5, &[1, 2]);
        assert_eq!(series_of_cubes(&p).unwrap(), pair_of_cubes(5, s).unwrap());
        assert!(series_of_cubes(&p).unwrap().is_down_closed());
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::parse(4, "1,2|2,3,4").is_err());
        assert!(Partition::parse(4, "1,2|3").is_err());
        assert!(Partition::new(3, vec![0b011, 0, 0b100]).is_err());
        assert!(!Partition::parse(5, "1|2,3,4,5").unwrap().is_balanced());
        assert_eq!(Partition::balanced(7, 3).unwrap().to_string(), "1,2,3|4,5|6,7");
    }

    #[test]
    fn formulas() {
        assert_eq!(janzer_size(8, 5).unwrap(), 19);
        assert_eq!(series_k_minus_one_size(8, 5).unwrap(), 13);
        assert!(matches!(janzer_size(9, 3), Err(Error::Divisibility(_))));
        // at k = 3 Janzer's size is the balanced linked cubes size for even n
        for n in (2..=20).step_by(2) {
            assert_eq!(janzer_size(n, 3).unwrap(), balanced_linked_cubes_size(n).unwrap());
        }
        let one = Rational::from_integer(1);
        assert_eq!(
            reference_bounds(12, 4, one, one).unwrap(),
            (Rational::from_integer(16), Rational::from_integer(64))
        );
        assert!(reference_bounds(10, 4, one, one).is_err());
        assert_eq!(series_of_cubes_size(4, 2).unwrap(), 7);
    }

    #[test]
    fn linked_cubes_are_three_wise_intersecting() {
        for n in 2..=8 {
            for s in 1..full_bits(n) {
                let f = linked_cubes(n, Mask::new(s, n).unwrap()).unwrap();
                assert!(is_k_wise_intersecting(&f, 3, KwiseMode::Distinct).unwrap());
            }
        }
    }
}
