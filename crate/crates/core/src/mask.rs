use std::fmt;

use crate::error::{Error, Result};

/// Largest ground set a [`Mask`] can describe.
pub const MAX_MASK_WIDTH: usize = 30;

/// A subset of `[n]` stored as a machine word: bit `i` is set iff element
/// `i + 1` belongs to the subset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mask {
    bits: u32,
    width: u8,
}

#[inline]
pub(crate) fn full_bits(n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        u32::MAX >> (32 - n)
    }
}

impl Mask {
    pub fn new(bits: u32, width: usize) -> Result<Self> {
        if width == 0 || width > MAX_MASK_WIDTH {
            return Err(Error::GroundSizeTooLarge { n: width, max: MAX_MASK_WIDTH });
        }
        if bits & !full_bits(width) != 0 {
            return Err(Error::MaskOutOfRange { bits, n: width });
        }
        Ok(Self { bits, width: width as u8 })
    }

    pub fn empty(width: usize) -> Result<Self> {
        Self::new(0, width)
    }

    pub fn full(width: usize) -> Result<Self> {
        Self::new(full_bits(width.min(MAX_MASK_WIDTH)), width)
    }

    /// Builds a mask from 1-based element labels.
    pub fn from_elements(width: usize, elements: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > width {
                return Err(Error::ElementOutOfRange { elem: e, n: width });
            }
            bits |= 1 << (e - 1);
        }
        Self::new(bits, width)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn width(self) -> usize {
        self.width as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn complement(self) -> Self {
        Self { bits: !self.bits & full_bits(self.width()), width: self.width }
    }

    #[inline]
    pub fn contains(self, elem: usize) -> bool {
        elem >= 1 && elem <= self.width() && self.bits >> (elem - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: Mask) -> bool {
        self.bits & !other.bits == 0
    }

    /// 1-based element labels in ascending order.
    pub fn elements(self) -> Vec<usize> {
        elements_of(self.bits)
    }
}

pub(crate) fn elements_of(bits: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(bits.count_ones() as usize);
    let mut b = bits;
    while b != 0 {
        out.push(b.trailing_zeros() as usize + 1);
        b &= b - 1;
    }
    out
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Iterates all submasks of `mask`, from `mask` itself down to 0.
pub(crate) struct Submasks {
    mask: u32,
    cur: u32,
    done: bool,
}

pub(crate) fn submasks(mask: u32) -> Submasks {
    Submasks { mask, cur: mask, done: false }
}

impl Iterator for Submasks {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.done {
            return None;
        }
        let out = self.cur;
        if self.cur == 0 {
            self.done = true;
        } else {
            self.cur = (self.cur - 1) & self.mask;
        }
        Some(out)
    }
}
