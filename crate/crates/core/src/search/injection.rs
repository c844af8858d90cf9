//! Counting machinery comparing a complement family `G` against the pair of
//! cubes `F0 = 2^S ∪ 2^{S^c}` at odd `n = 2ℓ + 1`.

use crate::constructions::pair_of_cubes;
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::kwise::{is_maximal_k_wise, KwiseMode};
use crate::mask::{submasks, Mask};
use crate::ratio::Rational;

fn same_width(a: Mask, b: Mask) -> Result<()> {
    if a.width() != b.width() {
        return Err(Error::GroundSizeMismatch { left: a.width(), right: b.width() });
    }
    Ok(())
}

fn h_bits(b: u32, c: u32, s: u32, sc: u32) -> usize {
    let straight = (b & !s).count_ones() + (c & !sc).count_ones();
    let crossed = (b & !sc).count_ones() + (c & !s).count_ones();
    straight.min(crossed) as usize
}

/// `min{|B∖S| + |C∖S^c|, |B∖S^c| + |C∖S|}`; zero exactly when the pair
/// splits along `S`.
pub fn h_value(b: Mask, c: Mask, s: Mask) -> Result<usize> {
    same_width(b, c)?;
    same_width(b, s)?;
    Ok(h_bits(b.bits(), c.bits(), s.bits(), s.complement().bits()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// The smaller mask of the pair.
    pub b: Mask,
    pub c: Mask,
    pub h: usize,
}

/// A pair `B < C` of members with `B ⊔ C = A` minimising `h`; ties go to
/// the smallest `(B, C)`.
pub fn decompose_min_h(f: &SetFamily, a: Mask, s: Mask) -> Result<Option<Decomposition>> {
    let n = f.n();
    if a.width() != n {
        return Err(Error::GroundSizeMismatch { left: n, right: a.width() });
    }
    same_width(a, s)?;
    let (sb, scb) = (s.bits(), s.complement().bits());
    let mut best: Option<(usize, u32, u32)> = None;
    for b in submasks(a.bits()) {
        let c = a.bits() & !b;
        if b >= c || !f.contains(b) || !f.contains(c) {
            continue;
        }
        let cand = (h_bits(b, c, sb, scb), b, c);
        if best.is_none_or(|cur| cand < cur) {
            best = Some(cand);
        }
    }
    Ok(best.map(|(h, b, c)| Decomposition { b: Mask::new(b, n).unwrap(), c: Mask::new(c, n).unwrap(), h }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubePartition {
    /// Members strictly between `∅` and `S`.
    pub g1: SetFamily,
    /// Members strictly between `∅` and `S^c`.
    pub g2: SetFamily,
    /// Members outside `2^S ∪ 2^{S^c}`.
    pub g3: SetFamily,
    pub has_empty: bool,
    /// Whether `G1, G2, G3, {∅}` partition `G`; only checked when `∅ ∈ G`
    /// and neither `S` nor `S^c` is a member.
    pub exact_cover: Option<bool>,
}

pub fn partition_relative_to_cubes(g: &SetFamily, s: Mask) -> Result<CubePartition> {
    let n = g.n();
    let f0 = pair_of_cubes(n, s)?;
    let (sb, scb) = (s.bits(), s.complement().bits());
    let strictly_inside = |m: u32, side: u32| m != 0 && m != side && m & !side == 0;
    let g1 = SetFamily::from_masks(n, g.iter().filter(|&m| strictly_inside(m, sb)))?;
    let g2 = SetFamily::from_masks(n, g.iter().filter(|&m| strictly_inside(m, scb)))?;
    let g3 = g.difference(&f0)?;
    let has_empty = g.contains(0);
    let exact_cover = (has_empty && !g.contains(sb) && !g.contains(scb)).then(|| {
        let disjoint = g1.intersection(&g2).unwrap().is_empty()
            && g1.intersection(&g3).unwrap().is_empty()
            && g2.intersection(&g3).unwrap().is_empty();
        disjoint && g1.len() + g2.len() + g3.len() + 1 == g.len()
    });
    Ok(CubePartition { g1, g2, g3, has_empty, exact_cover })
}

/// The bound `g1·g2 + g3·ε2^ℓ ≤ (2^ℓ−2)(2^{ℓ+1}−2)` evaluated on counts.
#[derive(Clone, Debug, PartialEq)]
pub struct ClaimBound {
    pub g1: usize,
    pub g2: usize,
    pub g3: usize,
    pub lhs: Rational,
    pub bound: i128,
    /// `g1 + g2 + g3 = 3·2^ℓ − 4` and `min(g1, g2) ≥ (1−ε)2^ℓ`, `0 < ε < 1/4`.
    pub premises_met: bool,
    pub holds: bool,
    pub equality: bool,
}

fn odd_ell(n: usize) -> Result<usize> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n must be odd, got {n}")));
    }
    Ok(n / 2)
}

pub fn claim_bound_values(g: &SetFamily, s: Mask, eps: Rational) -> Result<ClaimBound> {
    let ell = odd_ell(g.n())?;
    let part = partition_relative_to_cubes(g, s)?;
    let (g1, g2, g3) = (part.g1.len(), part.g2.len(), part.g3.len());
    let half = 1i128 << ell;
    let lhs = Rational::from_integer((g1 * g2) as i128) + eps * Rational::from_integer(g3 as i128 * half);
    let bound = (half - 2) * (2 * half - 2);
    let zero = Rational::from_integer(0);
    let premises_met = eps > zero
        && eps < Rational::new(1, 4)
        && (g1 + g2 + g3) as i128 == 3 * half - 4
        && Rational::from_integer(g1.min(g2) as i128) >= (Rational::from_integer(1) - eps) * half;
    let b = Rational::from_integer(bound);
    Ok(ClaimBound { g1, g2, g3, lhs, bound, premises_met, holds: lhs <= b, equality: lhs == b })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClaimAudit {
    pub n: usize,
    pub ell: usize,
    pub family_size: usize,
    /// `|G Δ F0|` with `G` the complement family.
    pub sym_diff: usize,
    pub partition: CubePartition,
    /// `|2^[n] ∖ (F ∪ F0)|`.
    pub uncovered: usize,
    /// `|G1||G2| + |G3|·ε2^ℓ`.
    pub injection_bound: Rational,
    /// `(2^ℓ−2)(2^{ℓ+1}−2)`.
    pub cube_bound: i128,
    /// `2^{2ℓ+1} − (3·2^ℓ−1) − |F|`.
    pub chain_lhs: i128,
    /// `2^{2ℓ+1} − 6·2^ℓ + 4`.
    pub chain_closed_form: i128,
    /// Sets outside `F ∪ F0` with no split into two members of `G`.
    pub undecomposed: usize,
    /// Images of the min-h split meeting `G1` and `G2` once each.
    pub images_g1_g2: usize,
    /// Images with at least one part in `G3`.
    pub images_g3: usize,
    pub unmet: Vec<String>,
    /// `uncovered ≤ injection_bound`, when the hypotheses hold.
    pub injection_holds: Option<bool>,
    /// `injection_bound ≤ cube_bound`, when the hypotheses hold.
    pub cube_holds: Option<bool>,
    pub cube_equality: Option<bool>,
    /// `chain_lhs ≤ uncovered ≤ cube_bound`, when the hypotheses hold.
    pub chain_holds: Option<bool>,
}

impl ClaimAudit {
    pub fn hypotheses_met(&self) -> bool {
        self.unmet.is_empty()
    }
}

/// Evaluates both counting claims on `F` with `G = F̄`. Verdicts are `None`
/// when the hypotheses fail; the raw counts are always filled in.
pub fn audit_claim_counts(f: &SetFamily, s: Mask, eps: Rational) -> Result<ClaimAudit> {
    let n = f.n();
    let ell = odd_ell(n)?;
    if s.width() != n {
        return Err(Error::GroundSizeMismatch { left: n, right: s.width() });
    }
    let zero = Rational::from_integer(0);
    if eps < zero {
        return Err(Error::InvalidParameter("eps must be non-negative".into()));
    }
    let g = f.complement_family();
    let f0 = pair_of_cubes(n, s)?;
    let sym_diff = g.symmetric_difference_count(&f0)?;
    let partition = partition_relative_to_cubes(&g, s)?;
    let half = 1i128 << ell;

    let mut unmet = Vec::new();
    if !is_maximal_k_wise(f, 3, KwiseMode::Distinct)? {
        unmet.push("F is not maximal 3-wise intersecting".to_string());
    }
    if s.len() != ell {
        unmet.push(format!("|S| = {} differs from {ell}", s.len()));
    }
    if g.contains(s.bits()) || g.contains(s.complement().bits()) {
        unmet.push("S or its complement lies in G".to_string());
    }
    if Rational::from_integer(sym_diff as i128) > eps * half {
        unmet.push(format!("|G Δ F0| = {sym_diff} exceeds eps·2^ell"));
    }

    let covered = f.union(&f0)?;
    let uncovered = f.universe_size() - covered.len();
    let (mut undecomposed, mut images_g1_g2, mut images_g3) = (0, 0, 0);
    for a in 0..f.universe_size() as u32 {
        if covered.contains(a) {
            continue;
        }
        match decompose_min_h(&g, Mask::new(a, n)?, s)? {
            None => undecomposed += 1,
            Some(d) => {
                let parts = [d.b.bits(), d.c.bits()];
                if parts.iter().any(|&m| partition.g3.contains(m)) {
                    images_g3 += 1;
                } else if parts.iter().any(|&m| partition.g1.contains(m))
                    && parts.iter().any(|&m| partition.g2.contains(m))
                {
                    images_g1_g2 += 1;
                }
            }
        }
    }
    let injection_bound = Rational::from_integer((partition.g1.len() * partition.g2.len()) as i128)
        + eps * Rational::from_integer(partition.g3.len() as i128 * half);
    let cube_bound = (half - 2) * (2 * half - 2);
    let chain_lhs = 2 * half * half - (3 * half - 1) - f.len() as i128;
    let chain_closed_form = 2 * half * half - 6 * half + 4;
    let met = unmet.is_empty();
    let cube = Rational::from_integer(cube_bound);
    let unc = uncovered as i128;
    Ok(ClaimAudit {
        n,
        ell,
        family_size: f.len(),
        sym_diff,
        partition,
        uncovered,
        injection_bound,
        cube_bound,
        chain_lhs,
        chain_closed_form,
        undecomposed,
        images_g1_g2,
        images_g3,
        unmet,
        injection_holds: met.then(|| Rational::from_integer(unc) <= injection_bound),
        cube_holds: met.then(|| injection_bound <= cube),
        cube_equality: met.then(|| injection_bound == cube),
        chain_holds: met.then_some(chain_lhs <= unc && unc <= cube_bound),
    })
}
