//! Disjointness graphs, bipartization by edge deletion, and the numeric
//! statistics of a bipartite split `(X, Y)` of a family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructions::Partition;
use crate::error::{Error, Result};
use crate::family::{BitIter, SetFamily};
use crate::mask::{full_bits, Mask};
use crate::ratio::{ratio, Rational};

/// Largest vertex count accepted by exact bipartization.
pub const EXACT_BIPARTIZATION_CAP: usize = 24;

/// Edges join disjoint members. Unipartite graphs have no loops; in the
/// bipartite form a vertex may appear on both sides, and `∅` on both sides
/// is joined to itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointnessGraph {
    n: usize,
    left: Vec<u32>,
    right: Option<Vec<u32>>,
    rows: Vec<Vec<u64>>,
    edges: usize,
}

fn row_words(len: usize) -> usize {
    len.div_ceil(64)
}

impl DisjointnessGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn left(&self) -> &[u32] {
        &self.left
    }

    /// Right class; equals the left one for a unipartite graph.
    pub fn right(&self) -> &[u32] {
        self.right.as_deref().unwrap_or(&self.left)
    }

    pub fn is_bipartite_build(&self) -> bool {
        self.right.is_some()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u][v >> 6] >> (v & 63) & 1 == 1
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[u]
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| BitIter(w).map(move |b| (wi << 6) + b as usize))
    }

    pub fn degree(&self, u: usize) -> usize {
        self.rows[u].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edges as index pairs into `left()` and `right()`; each unipartite
    /// edge is listed once with `u < v`.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let uni = !self.is_bipartite_build();
        (0..self.left.len())
            .flat_map(|u| self.neighbors(u).filter(move |&v| !uni || u < v).map(move |v| (u, v)))
            .collect()
    }

    /// One `u v` pair per line.
    pub fn edge_list_text(&self) -> String {
        let mut s = String::new();
        for (u, v) in self.edge_list() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

/// The disjointness graph `G_H` on the members of `h`.
pub fn build_graph(h: &SetFamily) -> DisjointnessGraph {
    let left = h.members();
    let len = left.len();
    let mut rows = vec![vec![0u64; row_words(len)]; len];
    let mut twice = 0;
    for (u, &a) in left.iter().enumerate() {
        for (v, &b) in left.iter().enumerate() {
            if u != v && a & b == 0 {
                rows[u][v >> 6] |= 1 << (v & 63);
                twice += 1;
            }
        }
    }
    DisjointnessGraph { n: h.n(), left, right: None, rows, edges: twice / 2 }
}

/// The bipartite disjointness graph with classes `(h1, h2)`.
pub fn build_bipartite(h1: &SetFamily, h2: &SetFamily) -> Result<DisjointnessGraph> {
    if h1.n() != h2.n() {
        return Err(Error::GroundSizeMismatch { left: h1.n(), right: h2.n() });
    }
    let left = h1.members();
    let right = h2.members();
    let mut rows = vec![vec![0u64; row_words(right.len())]; left.len()];
    let mut edges = 0;
    for (u, &a) in left.iter().enumerate() {
        for (v, &b) in right.iter().enumerate() {
            if a & b == 0 {
                rows[u][v >> 6] |= 1 << (v & 63);
                edges += 1;
            }
        }
    }
    Ok(DisjointnessGraph { n: h1.n(), left, right: Some(right), rows, edges })
}

fn check_elem(n: usize, elem: usize) -> Result<u32> {
    if elem == 0 || elem > n {
        return Err(Error::ElementOutOfRange { elem, n });
    }
    Ok(1 << (elem - 1))
}

/// Edges `XY` of a bipartite disjointness graph with `elem ∈ X ∪ Y`.
pub fn count_e_n(g: &DisjointnessGraph, elem: usize) -> Result<usize> {
    let bit = check_elem(g.n, elem)?;
    if !g.is_bipartite_build() {
        return Err(Error::InvalidParameter("count_e_n needs a bipartite graph".into()));
    }
    let right = g.right();
    Ok((0..g.left.len())
        .map(|u| g.neighbors(u).filter(|&v| (g.left[u] | right[v]) & bit != 0).count())
        .sum())
}

/// `f(x, y) = x + y - 2xy`.
pub fn f_xy(x: Rational, y: Rational) -> Rational {
    x + y - Rational::from_integer(2) * x * y
}

/// Counts, for every mask `m`, the members of `f` contained in `m`.
fn subset_counts(f: &SetFamily) -> Vec<u64> {
    let n = f.n();
    let mut c = vec![0u64; 1 << n];
    for m in f.iter() {
        c[m as usize] = 1;
    }
    for i in 0..n {
        let bit = 1 << i;
        for m in 0..c.len() {
            if m & bit != 0 {
                c[m] += c[m ^ bit];
            }
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityStats {
    pub alpha: Rational,
    pub beta: Rational,
    /// `|X_i^+| / |X|` for `i = 1..=n`.
    pub x_ratios: Vec<Rational>,
    pub y_ratios: Vec<Rational>,
    /// The ratios at the chosen element.
    pub x: Rational,
    pub y: Rational,
    pub e_total: usize,
    pub e_n: usize,
    /// `|X ∩ 2^A| / |X|` and `|Y ∩ 2^B| / |Y|`.
    pub theta: Rational,
    pub phi: Rational,
    pub threshold_x: Mask,
    pub threshold_y: Mask,
    pub a: Mask,
    pub b: Mask,
}

/// Statistics of the pair `(X, Y)` relative to `2^ℓ` and element `elem`.
/// `A`, `B` come from the two-block `partition` when given, else from the
/// threshold sets `X(t)`, `Y(t)`.
pub fn stability_stats(
    x: &SetFamily,
    y: &SetFamily,
    ell: usize,
    elem: usize,
    partition: Option<&Partition>,
    threshold: Rational,
) -> Result<StabilityStats> {
    let n = x.n();
    if y.n() != n {
        return Err(Error::GroundSizeMismatch { left: n, right: y.n() });
    }
    let bit = check_elem(n, elem)?;
    if ell >= 63 {
        return Err(Error::InvalidParameter(format!("ell = {ell} too large")));
    }
    let (xs, ys) = (x.len(), y.len());
    let per_coord = |f: &SetFamily| -> Vec<usize> {
        (1..=n).map(|i| f.count_containing(i).expect("in range")).collect()
    };
    let (xc, yc) = (per_coord(x), per_coord(y));
    let threshold_set = |counts: &[usize], size: usize| -> u32 {
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| Rational::from_integer(c as i128) >= threshold * Rational::from_integer(size as i128))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    };
    let tx = threshold_set(&xc, xs);
    let ty = threshold_set(&yc, ys);
    let (a, b) = match partition {
        Some(p) => {
            if p.n() != n || p.blocks().len() != 2 {
                return Err(Error::InvalidPartition("need a two-block partition of the same ground set".into()));
            }
            (p.blocks()[0], p.blocks()[1])
        }
        None => (tx, ty),
    };

    let full = full_bits(n);
    let under_y = subset_counts(y);
    let mut e_total = 0u64;
    let mut avoid_elem = 0u64;
    for m in x.iter() {
        let free = full & !m;
        e_total += under_y[free as usize];
        if m & bit == 0 {
            avoid_elem += under_y[(free & !bit) as usize];
        }
    }
    let two_ell = 1usize << ell;
    Ok(StabilityStats {
        alpha: ratio(xs, two_ell),
        beta: ratio(ys, two_ell),
        x_ratios: xc.iter().map(|&c| ratio(c, xs)).collect(),
        y_ratios: yc.iter().map(|&c| ratio(c, ys)).collect(),
        x: ratio(xc[elem - 1], xs),
        y: ratio(yc[elem - 1], ys),
        e_total: e_total as usize,
        e_n: (e_total - avoid_elem) as usize,
        theta: ratio(x.count_within(a), xs),
        phi: ratio(y.count_within(b), ys),
        threshold_x: Mask::new(tx, n)?,
        threshold_y: Mask::new(ty, n)?,
        a: Mask::new(a, n)?,
        b: Mask::new(b, n)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BipartizationMethod {
    /// Exhaustive maximum cut, at most [`EXACT_BIPARTIZATION_CAP`] vertices.
    Exact,
    /// Seeded local search with single-vertex moves, stopping at a local
    /// optimum or after `max_moves` moves.
    Heuristic { max_moves: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartization {
    pub deleted_edges: usize,
    pub cut_edges: usize,
    /// `true` puts the vertex in the `Y` class.
    pub side: Vec<bool>,
}

impl Bipartization {
    /// Member masks of the `X` and `Y` classes.
    pub fn classes(&self, g: &DisjointnessGraph) -> (Vec<u32>, Vec<u32>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, &s) in self.side.iter().enumerate() {
            if s {
                y.push(g.left[i]);
            } else {
                x.push(g.left[i]);
            }
        }
        (x, y)
    }
}

/// Fewest edge deletions that make the graph bipartite (exact) or an upper
/// bound on it (heuristic), with the witnessing bipartition.
pub fn min_bipartization(g: &DisjointnessGraph, method: BipartizationMethod) -> Result<Bipartization> {
    if g.is_bipartite_build() {
        return Err(Error::InvalidParameter("bipartization needs a unipartite graph".into()));
    }
    let v = g.left.len();
    let side = match method {
        BipartizationMethod::Exact => {
            if v > EXACT_BIPARTIZATION_CAP {
                return Err(Error::InvalidParameter(format!(
                    "exact bipartization is capped at {EXACT_BIPARTIZATION_CAP} vertices, got {v}"
                )));
            }
            let adj: Vec<u32> = g.rows.iter().map(|r| r.first().copied().unwrap_or(0) as u32).collect();
            let best = exact_max_cut(&adj);
            (0..v).map(|i| best >> i & 1 == 1).collect()
        }
        BipartizationMethod::Heuristic { max_moves, seed } => local_search_cut(g, max_moves, seed),
    };
    let cut = cut_size(g, &side);
    Ok(Bipartization { deleted_edges: g.edges - cut, cut_edges: cut, side })
}

fn cut_size(g: &DisjointnessGraph, side: &[bool]) -> usize {
    g.edge_list().into_iter().filter(|&(u, v)| side[u] != side[v]).count()
}

/// Gray-code walk over all cuts with vertex 0 fixed on side 0.
fn exact_max_cut(adj: &[u32]) -> u32 {
    let v = adj.len();
    if v <= 1 {
        return 0;
    }
    let mut side = 0u32;
    let mut cut: i64 = 0;
    let mut best = (0i64, 0u32);
    for step in 1u64..(1u64 << (v - 1)) {
        let flip = step.trailing_zeros() as usize + 1;
        let bit = 1u32 << flip;
        let same_side = if side & bit != 0 { side } else { !side };
        let same = (adj[flip] & same_side).count_ones() as i64;
        let other = adj[flip].count_ones() as i64 - same;
        cut += same - other;
        side ^= bit;
        if cut > best.0 {
            best = (cut, side);
        }
    }
    best.1
}

fn local_search_cut(g: &DisjointnessGraph, max_moves: usize, seed: u64) -> Vec<bool> {
    let v = g.left.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut side: Vec<bool> = (0..v).map(|_| rng.gen()).collect();
    let mut moves = 0;
    loop {
        let mut improved = false;
        for u in 0..v {
            if moves >= max_moves {
                return side;
            }
            let same = g.neighbors(u).filter(|&w| side[w] == side[u]).count();
            let other = g.degree(u) - same;
            if same > other {
                side[u] = !side[u];
                moves += 1;
                improved = true;
            }
        }
        if !improved {
            return side;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub name: &'static str,
    pub ratio: Rational,
    pub target: Rational,
    /// `|ratio - target| / max(ratio, target)`, always in `[0, 1]`.
    pub deviation: Rational,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PremiseReport {
    pub premises: Vec<Premise>,
    pub all_within: bool,
}

/// Compares the size profile of `(X, Y)` at `elem` with the targets
/// `|X|,|Y| ≈ (3/2)2^ℓ`, `|X_e^+|,|Y_e^+| ≈ (1/2)2^ℓ` and
/// `|X_e^-|,|Y_e^-| ≈ 2^ℓ`, each up to a relative `slack`.
pub fn audit_lemma_size_premises(
    x: &SetFamily,
    y: &SetFamily,
    ell: usize,
    elem: usize,
    slack: Rational,
) -> Result<PremiseReport> {
    if x.n() != y.n() {
        return Err(Error::GroundSizeMismatch { left: x.n(), right: y.n() });
    }
    check_elem(x.n(), elem)?;
    let two_ell = 1usize << ell;
    let plus = |f: &SetFamily| f.count_containing(elem).expect("checked");
    let rows = [
        ("|X|/2^l", x.len(), Rational::new(3, 2)),
        ("|Y|/2^l", y.len(), Rational::new(3, 2)),
        ("|X_e^+|/2^l", plus(x), Rational::new(1, 2)),
        ("|Y_e^+|/2^l", plus(y), Rational::new(1, 2)),
        ("|X_e^-|/2^l", x.len() - plus(x), Rational::from_integer(1)),
        ("|Y_e^-|/2^l", y.len() - plus(y), Rational::from_integer(1)),
    ];
    let premises: Vec<Premise> = rows
        .into_iter()
        .map(|(name, count, target)| {
            let r = ratio(count, two_ell);
            let diff = if r > target { r - target } else { target - r };
            let deviation = diff / r.max(target);
            Premise { name, ratio: r, target, deviation, within: deviation <= slack }
        })
        .collect();
    let all_within = premises.iter().all(|p| p.within);
    Ok(PremiseReport { premises, all_within })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::Partition;

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_sets(n, sets).unwrap()
    }

    fn lcg_family(n: usize, seed: u64, density: u64) -> SetFamily {
        let mut x = seed ^ 0x2545_f491_4f6c_dd1d;
        let mut f = SetFamily::new(n).unwrap();
        for m in 0..(1u32 << n) {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            if (x >> 33).is_multiple_of(density) {
                f.insert(m);
            }
        }
        f
    }

    #[test]
    fn graph_examples() {
        let g = build_graph(&fam(2, &[&[1], &[2], &[1, 2]]));
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_list(), vec![(0, 1)]);
        let g = build_graph(&SetFamily::power_set(2).unwrap());
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.edge_list_text().lines().count(), 4);
    }

    #[test]
    fn bipartite_doubles_plus_empty_loop() {
        for seed in 0..40 {
            let h = lcg_family(4, seed, 2);
            let uni = build_graph(&h);
            let bi = build_bipartite(&h, &h).unwrap();
            assert_eq!(bi.edge_count(), 2 * uni.edge_count() + usize::from(h.contains(0)));
            for u in 0..uni.left().len() {
                for v in 0..uni.left().len() {
                    assert_eq!(uni.has_edge(u, v), uni.has_edge(v, u));
                    assert_eq!(uni.has_edge(u, v), u != v && uni.left()[u] & uni.left()[v] == 0);
                }
            }
        }
    }

    #[test]
    fn e_n_examples() {
        let x = fam(3, &[&[3]]);
        let y = fam(3, &[&[1], &[1, 2]]);
        let g = build_bipartite(&x, &y).unwrap();
        assert_eq!(count_e_n(&g, 3).unwrap(), 2);
        let g = build_bipartite(&fam(3, &[&[1]]), &fam(3, &[&[2]])).unwrap();
        assert_eq!(count_e_n(&g, 3).unwrap(), 0);
        assert!(count_e_n(&g, 4).is_err());
        assert!(count_e_n(&build_graph(&x), 1).is_err());
    }

    #[test]
    fn e_n_matches_double_loop() {
        for seed in 0..30 {
            let x = lcg_family(4, seed, 3);
            let y = lcg_family(4, seed + 100, 2);
            let g = build_bipartite(&x, &y).unwrap();
            for elem in 1..=4 {
                let bit = 1 << (elem - 1);
                let naive = x
                    .iter()
                    .flat_map(|a| y.iter().map(move |b| (a, b)))
                    .filter(|(a, b)| a & b == 0 && (a | b) & bit != 0)
                    .count();
                assert_eq!(count_e_n(&g, elem).unwrap(), naive);
            }
        }
    }

    #[test]
    fn stats_examples() {
        let third = Rational::new(1, 3);
        let s = Mask::from_elements(5, &[1, 2]).unwrap();
        let cube = crate::constructions::pair_of_cubes(5, Mask::new(0, 5).unwrap()).unwrap();
        let cube_s = SetFamily::from_masks(5, cube.iter().filter(|m| m & !s.bits() == 0)).unwrap();
        let st = stability_stats(&cube_s, &cube_s, 2, 4, None, third).unwrap();
        assert_eq!(st.x, Rational::from_integer(0));
        assert_eq!(st.y, Rational::from_integer(0));
        assert_eq!(st.threshold_x, s);

        // X = 2^A, Y = 2^B for a balanced split of n = 2l + 1
        let (l, n) = (3, 7);
        let p = Partition::balanced(n, 2).unwrap();
        let (b, a) = (p.blocks()[0], p.blocks()[1]);
        let xa = SetFamily::from_masks(n, crate::mask::submasks(a)).unwrap();
        let yb = SetFamily::from_masks(n, crate::mask::submasks(b)).unwrap();
        let swapped = Partition::new(n, vec![a, b]).unwrap();
        let st = stability_stats(&xa, &yb, l, n, Some(&swapped), third).unwrap();
        assert_eq!(st.theta, Rational::from_integer(1));
        assert_eq!(st.phi, Rational::from_integer(1));
        assert_eq!(st.e_total, 1 << n);
        assert!(stability_stats(&xa, &yb, l, n, Some(&Partition::balanced(n, 3).unwrap()), third).is_err());
    }

    #[test]
    fn stats_match_naive_recomputation() {
        let third = Rational::new(1, 3);
        for seed in 0..25 {
            let n = 5;
            let x = lcg_family(n, seed, 3);
            let y = lcg_family(n, seed + 7, 4);
            let elem = 1 + (seed as usize % n);
            let st = stability_stats(&x, &y, 2, elem, None, third).unwrap();
            let g = build_bipartite(&x, &y).unwrap();
            assert_eq!(st.e_total, g.edge_count());
            assert_eq!(st.e_n, count_e_n(&g, elem).unwrap());
            assert_eq!(st.alpha, ratio(x.len(), 4));
            assert_eq!(st.beta, ratio(y.len(), 4));
            for i in 1..=n {
                let xi = ratio(x.restrict_plus(i).unwrap().len(), x.len());
                assert_eq!(st.x_ratios[i - 1], xi);
                assert_eq!(st.threshold_x.contains(i), xi >= third);
                let yi = ratio(y.restrict_plus(i).unwrap().len(), y.len());
                assert_eq!(st.threshold_y.contains(i), yi >= third);
            }
            let a = st.threshold_x.bits();
            assert_eq!(st.theta, ratio(x.iter().filter(|m| m & !a == 0).count(), x.len()));
            for r in st.x_ratios.iter().chain(&st.y_ratios).chain([&st.theta, &st.phi]) {
                assert!(*r >= Rational::from_integer(0) && *r <= Rational::from_integer(1));
            }
        }
    }

    #[test]
    fn f_xy_values() {
        let third = Rational::new(1, 3);
        assert_eq!(f_xy(third, third), Rational::new(4, 9));
        assert_eq!(f_xy(Rational::from_integer(0), Rational::from_integer(0)), Rational::from_integer(0));
        let a = Rational::new(1, 7);
        assert_eq!(f_xy(a, third), f_xy(third, a));
    }

    fn brute_max_cut(g: &DisjointnessGraph) -> usize {
        let v = g.left().len();
        let edges = g.edge_list();
        (0u32..(1 << v))
            .map(|s| edges.iter().filter(|&&(a, b)| (s >> a & 1) != (s >> b & 1)).count())
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn bipartization_small() {
        // a triangle: {1},{2},{3} are pairwise disjoint
        let tri = build_graph(&fam(3, &[&[1], &[2], &[3]]));
        let b = min_bipartization(&tri, BipartizationMethod::Exact).unwrap();
        assert_eq!(b.deleted_edges, 1);
        let (x, y) = b.classes(&tri);
        assert_eq!(x.len() + y.len(), 3);
        // a path is already bipartite
        let path = build_graph(&fam(3, &[&[1], &[2, 3], &[1, 3]]));
        assert_eq!(min_bipartization(&path, BipartizationMethod::Exact).unwrap().deleted_edges, 0);
        let big = build_graph(&SetFamily::power_set(5).unwrap());
        assert!(min_bipartization(&big, BipartizationMethod::Exact).is_err());
        let h = min_bipartization(&big, BipartizationMethod::Heuristic { max_moves: 1000, seed: 1 }).unwrap();
        assert_eq!(h.deleted_edges + h.cut_edges, big.edge_count());
    }

    #[test]
    fn exact_matches_brute_force_and_heuristic_never_wins() {
        for seed in 0..20 {
            let h = lcg_family(4, seed, 2);
            let g = build_graph(&h);
            if g.left().len() > 14 {
                continue;
            }
            let exact = min_bipartization(&g, BipartizationMethod::Exact).unwrap();
            assert_eq!(exact.deleted_edges, g.edge_count() - brute_max_cut(&g));
            let heur = min_bipartization(&g, BipartizationMethod::Heuristic { max_moves: 100, seed }).unwrap();
            assert!(heur.deleted_edges >= exact.deleted_edges);
        }
    }

    #[test]
    fn premise_audit() {
        let l = 3;
        let n = 2 * l + 1;
        let s = SetFamily::from_masks(n, crate::mask::submasks(full_bits(l))).unwrap();
        let r = audit_lemma_size_premises(&s, &s, l, n, Rational::new(1, 10)).unwrap();
        assert!(!r.premises[0].within);
        assert!(!r.all_within);
        assert!(audit_lemma_size_premises(&s, &s, l, n, Rational::from_integer(1)).unwrap().all_within);

        // 2^{A'} plus a half cube through n: exactly the target profile
        let a_prime = full_bits(l);
        let a_half = full_bits(l - 1);
        let top = 1 << (n - 1);
        let x = SetFamily::from_masks(
            n,
            crate::mask::submasks(a_prime).chain(crate::mask::submasks(a_half).map(|m| m | top)),
        )
        .unwrap();
        let r = audit_lemma_size_premises(&x, &x, l, n, Rational::new(1, 10)).unwrap();
        assert!(r.all_within, "{r:?}");
        assert!(r.premises.iter().all(|p| p.deviation == Rational::from_integer(0)));
    }
}
