//! Exact minimum size `f(n,k)` of a maximal k-wise intersecting family at
//! small `n`.
//!
//! Once a maximal family has at least `k` members it is closed upwards, so
//! the search runs over up-sets, represented by their minimal elements.
//! Masks are decided in ascending order. When a mask is reached every proper
//! subset has already been decided, so it is either forced in (some subset
//! is in) or is a free choice between becoming a new minimal element and
//! staying out. Families with fewer than `k` members need not be up-sets;
//! they are scanned directly beforehand.
//!
//! Pruning: a k-wise violation is permanent, sizes never shrink, and with
//! symmetry on a node survives only if no coordinate permutation provably
//! yields a lexicographically larger decision string. The last rule keeps
//! exactly one representative per isomorphism class.

pub mod canonical;
pub mod injection;
pub mod oracle;

use std::time::{Duration, Instant};

use crate::constructions::linked_cubes;
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::kwise::{addable_witness, is_k_wise_intersecting, is_maximal_k_wise, KwiseMode};
use crate::mask::{full_bits, submasks, Mask};

pub use canonical::{are_isomorphic, canonical_form, permutations};
pub use injection::{
    audit_claim_counts, claim_bound_values, decompose_min_h, h_value, partition_relative_to_cubes, ClaimAudit,
    ClaimBound, CubePartition, Decomposition,
};
pub use oracle::oracle_min;

/// Largest ground set the exhaustive search accepts.
pub const SEARCH_MAX_N: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub n: usize,
    pub k: usize,
    pub mode: KwiseMode,
    pub budget: Duration,
    pub symmetry: bool,
    /// Collect every minimum witness up to isomorphism instead of the first.
    pub enumerate_all: bool,
}

impl SearchConfig {
    pub fn new(n: usize, k: usize, mode: KwiseMode) -> Self {
        Self { n, k, mode, budget: Duration::from_secs(3600), symmetry: true, enumerate_all: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > SEARCH_MAX_N {
            return Err(Error::GroundSizeTooLarge { n: self.n, max: SEARCH_MAX_N });
        }
        if self.k < 2 {
            return Err(Error::InvalidParameter(format!("k must be at least 2, got {}", self.k)));
        }
        if self.budget.is_zero() {
            return Err(Error::InvalidParameter("budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchReport {
    pub n: usize,
    pub k: usize,
    pub mode: KwiseMode,
    /// Smallest maximal family found; equals `f(n,k)` when `optimal`.
    pub f_value: usize,
    /// Proven lower bound on `f(n,k)`; equals `f_value` when `optimal`.
    pub lower_bound: usize,
    pub optimal: bool,
    /// Canonical forms of the witnesses, pairwise non-isomorphic.
    pub witnesses: Vec<SetFamily>,
    /// Per witness: isomorphic to a balanced pair of linked cubes.
    pub matched_linked_cubes: Vec<bool>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// Smallest `s >= k` with `2^n - s <= C(s,1) + ... + C(s,k-1)`. Every
/// non-member of a maximal up-set is a disjoint union of at most `k-1`
/// complements of members, which forces this many members.
pub fn counting_lower_bound(n: usize, k: usize) -> usize {
    let total = 1u128 << n;
    (k..).find(|&s| {
        let mut sum = 0u128;
        let mut binom = 1u128;
        for j in 1..k {
            binom = binom * (s as u128 + 1 - j as u128) / j as u128;
            sum += binom;
        }
        total <= sum + s as u128
    })
    .expect("bound exists")
}

struct Engine {
    k: usize,
    mode: KwiseMode,
    universe: usize,
    full: u32,
    sup: Vec<u128>,
    sub: Vec<u128>,
    relabel: Vec<[u8; 128]>,
    enumerate_all: bool,
    best: Option<usize>,
    found: Vec<u128>,
    stop_at: Option<usize>,
    nodes: u64,
    deadline: Instant,
    timed_out: bool,
}

#[inline]
fn bit(m: usize) -> u128 {
    1u128 << m
}

#[inline]
fn has(set: u128, m: usize) -> bool {
    set >> m & 1 == 1
}

struct BitsU128(u128);

impl Iterator for BitsU128 {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

impl Engine {
    fn new(cfg: &SearchConfig, deadline: Instant) -> Self {
        let n = cfg.n;
        let universe = 1usize << n;
        let full = full_bits(n);
        let sup = (0..universe)
            .map(|m| (0..universe).filter(|&x| x & m == m).fold(0u128, |acc, x| acc | bit(x)))
            .collect();
        let sub = (0..universe)
            .map(|m| submasks(m as u32).fold(0u128, |acc, x| acc | bit(x as usize)))
            .collect();
        let relabel = if cfg.symmetry {
            permutations(n)
                .into_iter()
                .skip(1)
                .map(|perm| {
                    let mut t = [0u8; 128];
                    for (m, slot) in t.iter_mut().enumerate().take(universe) {
                        *slot = crate::family::permute_mask(m as u32, &perm) as u8;
                    }
                    t
                })
                .collect()
        } else {
            Vec::new()
        };
        Self {
            k: cfg.k,
            mode: cfg.mode,
            universe,
            full,
            sup,
            sub,
            relabel,
            enumerate_all: cfg.enumerate_all,
            best: None,
            found: Vec::new(),
            stop_at: None,
            nodes: 0,
            deadline,
            timed_out: false,
        }
    }

    fn offer(&mut self, fam: u128, size: usize) {
        match self.best {
            Some(b) if size > b || (size == b && !self.enumerate_all) => {}
            Some(b) if size == b => self.found.push(fam),
            _ => {
                self.best = Some(size);
                self.found = vec![fam];
            }
        }
    }

    fn done(&self) -> bool {
        self.timed_out || (!self.enumerate_all && self.best.is_some() && self.best == self.stop_at)
    }

    fn bounded_out(&self, size: usize) -> bool {
        match self.best {
            Some(b) => size > b || (size == b && !self.enumerate_all),
            None => false,
        }
    }

    /// Intersections of `set`'s masks with `a`.
    #[inline]
    fn meet_image(set: u128, a: usize) -> u128 {
        BitsU128(set).fold(0u128, |acc, i| acc | bit(i & a))
    }

    /// True when the k-wise property fails for the up-set.
    #[inline]
    fn violates(&self, reach_top: u128, size: usize) -> bool {
        has(reach_top, 0) && (self.mode == KwiseMode::WithRepetition || size >= self.k)
    }

    fn is_maximal(&self, fam: u128, size: usize, reach: &[u128]) -> bool {
        if self.mode == KwiseMode::Distinct {
            if size + 1 < self.k {
                return false;
            }
            if has(reach[self.k - 1], 0) {
                return true;
            }
        }
        let mut blocked = bit(0);
        for i in BitsU128(reach[self.k - 2]) {
            blocked |= self.sub[(self.full & !(i as u32)) as usize];
        }
        let outside = !fam & if self.universe == 128 { u128::MAX } else { bit(self.universe) - 1 };
        outside & !blocked == 0
    }

    /// False if some relabelling provably gives a lexicographically larger
    /// decision string (a member counts as 1, read from mask 0 upward).
    fn is_leader(&self, fam: u128, decided: usize) -> bool {
        let known = |p: usize| p < decided || has(fam, p);
        for t in &self.relabel {
            for p in 0..self.universe {
                let q = t[p] as usize;
                if !known(p) || !known(q) {
                    break;
                }
                let (fp, gp) = (has(fam, p), has(fam, q));
                if fp != gp {
                    if gp {
                        return false;
                    }
                    break;
                }
            }
        }
        true
    }

    fn dfs(&mut self, next: usize, fam: u128, size: usize, reach: &[u128]) {
        self.nodes += 1;
        if self.nodes & 0xfff == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        if self.done() || self.bounded_out(size) {
            return;
        }
        if !self.is_leader(fam, next) {
            return;
        }
        let mut t = next;
        while t < self.universe && has(fam, t) {
            t += 1;
        }
        if t == self.universe {
            if self.is_maximal(fam, size, reach) {
                self.offer(fam, size);
            }
            return;
        }

        // t becomes a minimal element
        let new_fam = fam | self.sup[t];
        let new_size = new_fam.count_ones() as usize;
        let mut new_reach = reach.to_vec();
        new_reach[0] |= bit(t);
        for j in 1..self.k {
            new_reach[j] |= Self::meet_image(new_reach[j - 1], t);
        }
        if !self.violates(new_reach[self.k - 1], new_size) {
            self.dfs(t + 1, new_fam, new_size, &new_reach);
        }
        // t stays out
        self.dfs(t + 1, fam, size, reach);
    }
}

fn family_from_u128(n: usize, fam: u128) -> SetFamily {
    SetFamily::from_masks(n, BitsU128(fam).map(|m| m as u32)).expect("mask in range")
}

/// All families with fewer than `k` members that are maximal.
fn small_maximal_families(n: usize, k: usize, mode: KwiseMode) -> Result<Vec<SetFamily>> {
    let universe = 1u32 << n;
    let mut out = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    fn rec(
        n: usize,
        k: usize,
        mode: KwiseMode,
        universe: u32,
        start: u32,
        stack: &mut Vec<u32>,
        out: &mut Vec<SetFamily>,
    ) -> Result<()> {
        if !stack.is_empty() {
            let f = SetFamily::from_masks(n, stack.iter().copied())?;
            if is_k_wise_intersecting(&f, k, mode)? && addable_witness(&f, k, mode)?.is_none() {
                out.push(f);
            }
        }
        if stack.len() + 1 >= k {
            return Ok(());
        }
        for m in start..universe {
            stack.push(m);
            rec(n, k, mode, universe, m + 1, stack, out)?;
            stack.pop();
        }
        Ok(())
    }
    rec(n, k, mode, universe, 0, &mut stack, &mut out)?;
    Ok(out)
}

/// Whether `f` is a balanced pair of linked cubes up to relabelling.
pub fn is_balanced_linked_cubes(f: &SetFamily) -> Result<bool> {
    let n = f.n();
    if n < 2 {
        return Ok(false);
    }
    let lc = linked_cubes(n, Mask::new(full_bits(n / 2), n)?)?;
    are_isomorphic(f, &lc)
}

/// Exact `f(n,k)` by branch and bound, with witnesses.
pub fn search_min(cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    let start = Instant::now();
    let (n, k) = (cfg.n, cfg.k);
    let mut engine = Engine::new(cfg, start + cfg.budget);

    let small = small_maximal_families(n, k, cfg.mode)?;
    let small_best = small.iter().map(SetFamily::len).min();
    let mut candidates: Vec<SetFamily> = small.into_iter().filter(|f| Some(f.len()) == small_best).collect();
    if !cfg.enumerate_all {
        candidates.truncate(1);
    }
    engine.best = small_best;
    let bound = counting_lower_bound(n, k);
    let floor = small_best.map_or(bound, |s| s.min(bound));
    engine.stop_at = Some(floor);

    let reach = vec![0u128; k];
    engine.dfs(0, 0, 0, &reach);

    let best = engine.best.ok_or_else(|| Error::InvalidParameter("no maximal family found within budget".into()))?;
    if small_best.is_some_and(|s| s > best) {
        candidates.clear();
    }
    for &fam in &engine.found {
        candidates.push(family_from_u128(n, fam));
    }

    let mut witnesses: Vec<SetFamily> = Vec::new();
    for f in candidates {
        debug_assert_eq!(f.len(), best);
        if f.len() != best || !is_maximal_k_wise(&f, k, cfg.mode)? {
            return Err(Error::NotMaximal { k });
        }
        let c = canonical_form(&f)?;
        if !witnesses.contains(&c) {
            witnesses.push(c);
        }
    }
    witnesses.sort_by_key(SetFamily::to_hex);
    if !cfg.enumerate_all {
        witnesses.truncate(1);
    }
    let matched_linked_cubes = witnesses.iter().map(is_balanced_linked_cubes).collect::<Result<Vec<_>>>()?;
    let optimal = !engine.timed_out;
    Ok(SearchReport {
        n,
        k,
        mode: cfg.mode,
        f_value: best,
        lower_bound: if optimal { best } else { floor.min(best) },
        optimal,
        witnesses,
        matched_linked_cubes,
        nodes_explored: engine.nodes,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n: usize, k: usize, mode: KwiseMode, all: bool, symmetry: bool) -> SearchReport {
        let mut cfg = SearchConfig::new(n, k, mode);
        cfg.enumerate_all = all;
        cfg.symmetry = symmetry;
        search_min(&cfg).unwrap()
    }

    #[test]
    fn tiny_distinct_case() {
        let r = run(2, 3, KwiseMode::Distinct, true, true);
        assert_eq!(r.f_value, 2);
        assert!(r.optimal);
        let want = canonical_form(&SetFamily::from_sets(2, &[&[], &[1, 2]]).unwrap()).unwrap();
        assert!(r.witnesses.contains(&want));
    }

    #[test]
    fn counting_bound_values() {
        assert_eq!(counting_lower_bound(7, 3), 15);
        assert_eq!(counting_lower_bound(2, 3), 3);
        assert!(counting_lower_bound(5, 2) >= 16);
    }

    #[test]
    fn symmetry_does_not_change_the_value() {
        for n in 1..=4 {
            for k in 2..=4 {
                for mode in [KwiseMode::Distinct, KwiseMode::WithRepetition] {
                    let a = run(n, k, mode, true, true);
                    let b = run(n, k, mode, true, false);
                    assert_eq!(a.f_value, b.f_value, "n={n} k={k} {mode:?}");
                    assert_eq!(a.witnesses, b.witnesses, "n={n} k={k} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn witnesses_verify() {
        let r = run(4, 3, KwiseMode::WithRepetition, true, true);
        for w in &r.witnesses {
            assert_eq!(w.len(), r.f_value);
            assert!(is_maximal_k_wise(w, 3, KwiseMode::WithRepetition).unwrap());
            assert!(w.is_up_closed());
        }
        for (i, a) in r.witnesses.iter().enumerate() {
            for b in &r.witnesses[i + 1..] {
                assert_ne!(canonical_form(a).unwrap(), canonical_form(b).unwrap());
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(search_min(&SearchConfig::new(8, 3, KwiseMode::Distinct)).is_err());
        assert!(search_min(&SearchConfig::new(3, 1, KwiseMode::Distinct)).is_err());
        let mut cfg = SearchConfig::new(3, 3, KwiseMode::Distinct);
        cfg.budget = Duration::ZERO;
        assert!(search_min(&cfg).is_err());
    }
}
