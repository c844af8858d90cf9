//! Explicit set families stored as a `2^n`-bit membership bitmap.

use std::fmt;

use crate::error::{Error, Result};
use crate::mask::{full_bits, Mask};

/// Largest ground set for an explicit family bitmap (2^26 bits = 8 MiB).
pub const MAX_FAMILY_WIDTH: usize = 26;

/// Masks with bit `i` clear, repeated across a 64-bit word, for `i < 6`.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// A family of subsets of `[n]`. Bit `m` of the membership bitmap is set iff
/// the subset with mask `m` is a member.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: u8,
    words: Vec<u64>,
    size: usize,
}

fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn valid_bits(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

impl SetFamily {
    /// The empty family on `[n]`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_FAMILY_WIDTH {
            return Err(Error::GroundSizeTooLarge { n, max: MAX_FAMILY_WIDTH });
        }
        Ok(Self { n: n as u8, words: vec![0; word_count(n)], size: 0 })
    }

    /// `2^[n]`.
    pub fn power_set(n: usize) -> Result<Self> {
        let mut f = Self::new(n)?;
        for w in f.words.iter_mut() {
            *w = u64::MAX;
        }
        f.words[0] &= valid_bits(n);
        f.size = 1 << n;
        Ok(f)
    }

    pub fn from_masks<I: IntoIterator<Item = u32>>(n: usize, masks: I) -> Result<Self> {
        let mut f = Self::new(n)?;
        let full = full_bits(n);
        for m in masks {
            if m & !full != 0 {
                return Err(Error::MaskOutOfRange { bits: m, n });
            }
            f.insert(m);
        }
        Ok(f)
    }

    /// Builds a family from sets given as 1-based element lists.
    pub fn from_sets(n: usize, sets: &[&[usize]]) -> Result<Self> {
        let masks = sets
            .iter()
            .map(|s| Mask::from_elements(n, s).map(Mask::bits))
            .collect::<Result<Vec<_>>>()?;
        Self::from_masks(n, masks)
    }

    pub(crate) fn from_words(n: usize, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), word_count(n));
        words[0] &= valid_bits(n);
        let size = words.iter().map(|w| w.count_ones() as usize).sum();
        Self { n: n as u8, words, size }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// The all-ones mask `[n]`.
    #[inline]
    pub fn full_mask(&self) -> u32 {
        full_bits(self.n())
    }

    #[inline]
    pub fn universe_size(&self) -> usize {
        1 << self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, m: u32) -> bool {
        let m = m as usize;
        m < self.universe_size() && self.words[m >> 6] >> (m & 63) & 1 == 1
    }

    /// Inserts `m`; returns whether it was newly added. Panics if `m` is not
    /// a subset of `[n]`.
    pub fn insert(&mut self, m: u32) -> bool {
        assert!((m as usize) < self.universe_size(), "mask {m:#x} out of range");
        let (w, b) = ((m >> 6) as usize, m & 63);
        let fresh = self.words[w] >> b & 1 == 0;
        self.words[w] |= 1 << b;
        self.size += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, m: u32) -> bool {
        if !self.contains(m) {
            return false;
        }
        self.words[(m >> 6) as usize] &= !(1u64 << (m & 63));
        self.size -= 1;
        true
    }

    /// Members in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let base = (wi as u32) << 6;
            BitIter(w).map(move |b| base | b)
        })
    }

    pub fn members(&self) -> Vec<u32> {
        self.iter().collect()
    }

    fn check_same_ground(&self, other: &SetFamily) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GroundSizeMismatch { left: self.n(), right: other.n() });
        }
        Ok(())
    }

    fn zip_with(&self, other: &SetFamily, op: impl Fn(u64, u64) -> u64) -> Result<SetFamily> {
        self.check_same_ground(other)?;
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect();
        Ok(SetFamily::from_words(self.n(), words))
    }

    pub fn union(&self, other: &SetFamily) -> Result<SetFamily> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &SetFamily) -> Result<SetFamily> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &SetFamily) -> Result<SetFamily> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> Result<bool> {
        self.check_same_ground(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0))
    }

    /// `|F \ G|`.
    pub fn set_difference_count(&self, other: &SetFamily) -> Result<usize> {
        self.check_same_ground(other)?;
        Ok(self.words.iter().zip(&other.words).map(|(&a, &b)| (a & !b).count_ones() as usize).sum())
    }

    /// `|F Δ G|`.
    pub fn symmetric_difference_count(&self, other: &SetFamily) -> Result<usize> {
        self.check_same_ground(other)?;
        Ok(self.words.iter().zip(&other.words).map(|(&a, &b)| (a ^ b).count_ones() as usize).sum())
    }

    /// `{F^c : F ∈ F}`. Complementing every mask reverses the bitmap.
    pub fn complement_family(&self) -> SetFamily {
        let n = self.n();
        let words = if n >= 6 {
            self.words.iter().rev().map(|w| w.reverse_bits()).collect()
        } else {
            vec![self.words[0].reverse_bits() >> (64 - (1 << n))]
        };
        SetFamily::from_words(n, words)
    }

    /// `2^[n] \ F`.
    pub fn complement_in_powerset(&self) -> SetFamily {
        let words = self.words.iter().map(|w| !w).collect();
        SetFamily::from_words(self.n(), words)
    }

    /// Smallest up-set containing `F`, by one sweep per coordinate.
    pub fn up_closure(&self) -> SetFamily {
        let mut words = self.words.clone();
        for i in 0..self.n() {
            if i < 6 {
                let shift = 1 << i;
                for w in words.iter_mut() {
                    *w |= (*w & LOW_HALF[i]) << shift;
                }
            } else {
                let stride = 1 << (i - 6);
                for block in words.chunks_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (h, l) in hi.iter_mut().zip(lo.iter()) {
                        *h |= *l;
                    }
                }
            }
        }
        SetFamily::from_words(self.n(), words)
    }

    /// Smallest down-set containing `F`.
    pub fn down_closure(&self) -> SetFamily {
        let mut words = self.words.clone();
        for i in 0..self.n() {
            if i < 6 {
                let shift = 1 << i;
                for w in words.iter_mut() {
                    *w |= (*w >> shift) & LOW_HALF[i];
                }
            } else {
                let stride = 1 << (i - 6);
                for block in words.chunks_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (l, h) in lo.iter_mut().zip(hi.iter()) {
                        *l |= *h;
                    }
                }
            }
        }
        SetFamily::from_words(self.n(), words)
    }

    pub fn is_up_closed(&self) -> bool {
        self.up_closure().size == self.size
    }

    pub fn is_down_closed(&self) -> bool {
        self.down_closure().size == self.size
    }

    fn check_elem(&self, i: usize) -> Result<u32> {
        if i == 0 || i > self.n() {
            return Err(Error::ElementOutOfRange { elem: i, n: self.n() });
        }
        Ok(1 << (i - 1))
    }

    /// `H_i^+ = {H \ {i} : i ∈ H ∈ H}`, on the same ground set.
    pub fn restrict_plus(&self, i: usize) -> Result<SetFamily> {
        let bit = self.check_elem(i)?;
        SetFamily::from_masks(self.n(), self.iter().filter(|m| m & bit != 0).map(|m| m & !bit))
    }

    /// `H_i^- = {H ∈ H : i ∉ H}`.
    pub fn restrict_minus(&self, i: usize) -> Result<SetFamily> {
        let bit = self.check_elem(i)?;
        SetFamily::from_masks(self.n(), self.iter().filter(|m| m & bit == 0))
    }

    /// Members containing element `i`.
    pub fn count_containing(&self, i: usize) -> Result<usize> {
        let bit = self.check_elem(i)?;
        Ok(self.iter().filter(|m| m & bit != 0).count())
    }

    /// Members that are subsets of `within`.
    pub fn count_within(&self, within: u32) -> usize {
        self.iter().filter(|m| m & !within == 0).count()
    }

    /// Relabels coordinates: element `i` (0-based) is sent to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<SetFamily> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::InvalidParameter(format!("permutation length {} != n = {n}", perm.len())));
        }
        let mut seen = 0u32;
        for &p in perm {
            if p >= n || seen >> p & 1 == 1 {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
            seen |= 1 << p;
        }
        SetFamily::from_masks(n, self.iter().map(|m| permute_mask(m, perm)))
    }

    /// Lowercase hex of the bitmap, mask 0 in the least significant bit,
    /// zero padded to `ceil(2^n / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.universe_size().div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let nibble = (self.words[bit >> 6] >> (bit & 63)) & 0xf;
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<SetFamily> {
        let mut f = SetFamily::new(n)?;
        let hex = hex.trim();
        let digits = f.universe_size().div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Encoding(format!(
                "expected {digits} hex digits for n = {n}, got {}",
                hex.len()
            )));
        }
        for (i, c) in hex.chars().enumerate() {
            let v = c
                .to_digit(16)
                .filter(|_| !c.is_ascii_uppercase())
                .ok_or_else(|| Error::Encoding(format!("invalid hex digit {c:?}")))?;
            let bit = (digits - 1 - i) * 4;
            f.words[bit >> 6] |= (v as u64) << (bit & 63);
        }
        if f.words[0] & !valid_bits(n) != 0 {
            return Err(Error::Encoding("bits set beyond 2^n".into()));
        }
        f.size = f.words.iter().map(|w| w.count_ones() as usize).sum();
        Ok(f)
    }
}

#[inline]
pub(crate) fn permute_mask(m: u32, perm: &[usize]) -> u32 {
    let mut out = 0;
    let mut b = m;
    while b != 0 {
        let i = b.trailing_zeros() as usize;
        out |= 1 << perm[i];
        b &= b - 1;
    }
    out
}

pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily(n={}, {{", self.n)?;
        for (i, m) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if i == 16 {
                write!(f, "... {} more", self.size - 16)?;
                break;
            }
            write!(f, "{}", Mask::new(m, self.n()).map_err(|_| fmt::Error)?)?;
        }
        write!(f, "}})")
    }
}
