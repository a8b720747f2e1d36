//! Perfect matchings, height changes and the perfect matching polygon.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::dimer::DimerModel;
use crate::error::{Error, Result};
use crate::lattice::{lattice_length, primitive, LatticePolygon, LatticeVector};

/// A perfect matching as its sorted edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PerfectMatching {
    pub edges: Vec<usize>,
}

impl PerfectMatching {
    pub fn new(mut edges: Vec<usize>) -> PerfectMatching {
        edges.sort_unstable();
        PerfectMatching { edges }
    }

    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// True iff every node is covered exactly once.
    pub fn is_perfect_matching_of(&self, m: &DimerModel) -> bool {
        let mut cover = vec![0u32; m.num_nodes()];
        for &e in &self.edges {
            let ed = &m.edges()[e];
            cover[ed.black] += 1;
            cover[ed.white] += 1;
        }
        cover.iter().all(|&c| c == 1)
    }

    /// Sum of offsets of the member edges.
    pub fn offset_sum(&self, m: &DimerModel) -> LatticeVector {
        self.edges.iter().fold(LatticeVector::ZERO, |acc, &e| acc + m.edges()[e].offset)
    }
}

/// Execution strategy for enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    /// Splits the search tree across threads; falls back to sequential
    /// when the `parallel` feature is off. Output order is unchanged.
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

/// Search state for the backtracking enumerator.
struct Search<'a> {
    m: &'a DimerModel,
    blacks: Vec<usize>,
    /// Per white node, number of edges to still unmatched black nodes.
    avail: Vec<u32>,
    used: Vec<bool>,
    chosen: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(m: &'a DimerModel) -> Search<'a> {
        let mut avail = vec![0u32; m.num_nodes()];
        for e in m.edges() {
            avail[e.white] += 1;
        }
        Search { m, blacks: m.black_nodes().collect(), avail, used: vec![false; m.num_nodes()], chosen: Vec::new() }
    }

    /// Try to match black node number `depth` along `e`; returns false on a dead end
    /// (state then restored by `undo`).
    fn apply(&mut self, depth: usize, e: usize) -> bool {
        let b = self.blacks[depth];
        let w = self.m.edges()[e].white;
        self.used[w] = true;
        self.chosen.push(e);
        let mut ok = true;
        for &f in self.m.rotation(b) {
            let x = self.m.edges()[f].white;
            self.avail[x] -= 1;
            if self.avail[x] == 0 && !self.used[x] {
                ok = false;
            }
        }
        ok
    }

    fn undo(&mut self, depth: usize, e: usize) {
        let b = self.blacks[depth];
        for &f in self.m.rotation(b) {
            self.avail[self.m.edges()[f].white] += 1;
        }
        self.used[self.m.edges()[e].white] = false;
        self.chosen.pop();
    }

    fn options(&self, depth: usize) -> Vec<usize> {
        let b = self.blacks[depth];
        self.m.rotation(b).iter().copied().filter(|&e| !self.used[self.m.edges()[e].white]).collect()
    }

    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize])) {
        if depth == self.blacks.len() {
            visit(&self.chosen);
            return;
        }
        for e in self.options(depth) {
            if self.apply(depth, e) {
                self.run(depth + 1, visit);
            }
            self.undo(depth, e);
        }
    }

    /// Search-tree prefixes of the given depth, in enumeration order.
    fn prefixes(&mut self, depth: usize, limit: usize, out: &mut Vec<Vec<usize>>) {
        if depth == limit || depth == self.blacks.len() {
            out.push(self.chosen.clone());
            return;
        }
        for e in self.options(depth) {
            if self.apply(depth, e) {
                self.prefixes(depth + 1, limit, out);
            }
            self.undo(depth, e);
        }
    }

    fn replay(&mut self, prefix: &[usize]) -> bool {
        for (d, &e) in prefix.iter().enumerate() {
            if !self.apply(d, e) {
                return false;
            }
        }
        true
    }
}

fn balanced(m: &DimerModel) -> bool {
    m.black_nodes().count() == m.white_nodes().count() && (0..m.num_nodes()).all(|v| m.degree(v) > 0)
}

/// Calls `visit` on every perfect matching, in the deterministic order.
pub fn for_each_pm(m: &DimerModel, visit: &mut dyn FnMut(&[usize])) {
    if !balanced(m) {
        return;
    }
    Search::new(m).run(0, visit);
}

/// Runs `work` over the subtrees below a fixed prefix depth and returns the
/// per-subtree results in enumeration order.
fn split_work<T: Send>(m: &DimerModel, strategy: Strategy, work: &(dyn Fn(&mut Search, usize) -> T + Sync)) -> Vec<T> {
    let mut root = Search::new(m);
    let nb = root.blacks.len();
    let mut depth = 0;
    let mut prefixes = vec![Vec::new()];
    if strategy == Strategy::Parallel && cfg!(feature = "parallel") {
        while prefixes.len() < 64 && depth < nb.min(8) {
            depth += 1;
            prefixes.clear();
            root.prefixes(0, depth, &mut prefixes);
        }
    }
    let run_one = |prefix: &Vec<usize>| -> T {
        let mut s = Search::new(m);
        let ok = s.replay(prefix);
        assert!(ok, "prefix replay is consistent");
        work(&mut s, prefix.len())
    };
    #[cfg(feature = "parallel")]
    {
        if strategy == Strategy::Parallel {
            use rayon::prelude::*;
            return prefixes.par_iter().map(run_one).collect();
        }
    }
    prefixes.iter().map(run_one).collect()
}

/// All perfect matchings: black nodes in index order, edges in rotation order.
pub fn enumerate_pms(m: &DimerModel) -> Vec<PerfectMatching> {
    enumerate_pms_with(m, Strategy::default())
}

pub fn enumerate_pms_with(m: &DimerModel, strategy: Strategy) -> Vec<PerfectMatching> {
    if !balanced(m) {
        return Vec::new();
    }
    split_work(m, strategy, &|s: &mut Search, d: usize| {
        let mut out = Vec::new();
        s.run(d, &mut |c| out.push(PerfectMatching::new(c.to_vec())));
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Number of matchings per offset sum, without storing the matchings.
pub fn offset_census_with(m: &DimerModel, strategy: Strategy) -> BTreeMap<LatticeVector, u64> {
    if !balanced(m) {
        return BTreeMap::new();
    }
    let parts = split_work(m, strategy, &|s: &mut Search, d: usize| {
        let mut out: BTreeMap<LatticeVector, u64> = BTreeMap::new();
        let mm = s.m;
        s.run(d, &mut |c| {
            let sum = c.iter().fold(LatticeVector::ZERO, |acc, &e| acc + mm.edges()[e].offset);
            *out.entry(sum).or_insert(0) += 1;
        });
        out
    });
    let mut total = BTreeMap::new();
    for p in parts {
        for (k, v) in p {
            *total.entry(k).or_insert(0) += v;
        }
    }
    total
}

/// Black nodes in an order that keeps few whites half-processed: each step
/// takes the black with the most neighbours already touched.
fn frontier_order(m: &DimerModel) -> Vec<usize> {
    let blacks: Vec<usize> = m.black_nodes().collect();
    let mut done = vec![false; m.num_nodes()];
    let mut touched = vec![false; m.num_nodes()];
    let mut order = Vec::with_capacity(blacks.len());
    for _ in 0..blacks.len() {
        let score = |b: usize| m.rotation(b).iter().filter(|&&e| touched[m.edges()[e].white]).count();
        let next = blacks.iter().copied().filter(|&b| !done[b]).max_by_key(|&b| (score(b), std::cmp::Reverse(b))).unwrap();
        done[next] = true;
        for &e in m.rotation(next) {
            touched[m.edges()[e].white] = true;
        }
        order.push(next);
    }
    order
}

/// Number of matchings per offset sum by dynamic programming over black nodes.
/// The state is the set of matched whites that still have unprocessed
/// neighbours, so the cost depends on the frontier width rather than on the
/// number of matchings.
pub fn offset_census(m: &DimerModel) -> BTreeMap<LatticeVector, u64> {
    if !balanced(m) {
        return BTreeMap::new();
    }
    let order = frontier_order(m);
    let mut last_use = vec![usize::MAX; m.num_nodes()];
    for (t, &b) in order.iter().enumerate() {
        for &e in m.rotation(b) {
            last_use[m.edges()[e].white] = t;
        }
    }
    if m.white_nodes().any(|w| last_use[w] == usize::MAX) {
        return BTreeMap::new();
    }
    type Layer = HashMap<Vec<usize>, BTreeMap<LatticeVector, u128>>;
    let mut layer: Layer = HashMap::new();
    layer.insert(Vec::new(), BTreeMap::from([(LatticeVector::ZERO, 1u128)]));
    for (t, &b) in order.iter().enumerate() {
        let closing: Vec<usize> = m.white_nodes().filter(|&w| last_use[w] == t).collect();
        let mut next: Layer = HashMap::new();
        for (used, sums) in &layer {
            for &e in m.rotation(b) {
                let w = m.edges()[e].white;
                if used.binary_search(&w).is_ok() {
                    continue;
                }
                let mut key = used.clone();
                key.insert(key.binary_search(&w).unwrap_err(), w);
                if !closing.iter().all(|c| key.binary_search(c).is_ok()) {
                    continue;
                }
                key.retain(|v| last_use[*v] != t);
                let slot = next.entry(key).or_default();
                let off = m.edges()[e].offset;
                for (&s, &c) in sums {
                    *slot.entry(s + off).or_insert(0) += c;
                }
            }
        }
        layer = next;
    }
    layer
        .remove(&Vec::new())
        .unwrap_or_default()
        .into_iter()
        .map(|(s, c)| (s, u64::try_from(c).expect("matching count fits in u64")))
        .collect()
}

/// Number of matchings at each height change relative to a matching with offset sum `base`.
pub fn height_census(m: &DimerModel, base: LatticeVector) -> BTreeMap<LatticeVector, u64> {
    offset_census(m).into_iter().map(|(s, c)| ((s - base).rot(), c)).collect()
}

pub fn count_pms(m: &DimerModel) -> u64 {
    offset_census(m).values().sum()
}

/// h(P, P0) = rot(sum over P of offsets - sum over P0 of offsets).
pub fn height_change(m: &DimerModel, p: &PerfectMatching, p0: &PerfectMatching) -> LatticeVector {
    (p.offset_sum(m) - p0.offset_sum(m)).rot()
}

/// Kuhn augmenting-path matching restricted to allowed nodes; returns the matching size.
fn max_matching(m: &DimerModel, allowed: &[bool]) -> usize {
    let mut match_w: Vec<Option<usize>> = vec![None; m.num_nodes()];
    let mut size = 0;
    for b in m.black_nodes() {
        if !allowed[b] {
            continue;
        }
        let mut seen = vec![false; m.num_nodes()];
        if augment(m, b, allowed, &mut seen, &mut match_w) {
            size += 1;
        }
    }
    size
}

fn augment(m: &DimerModel, b: usize, allowed: &[bool], seen: &mut [bool], match_w: &mut [Option<usize>]) -> bool {
    for &e in m.rotation(b) {
        let w = m.edges()[e].white;
        if !allowed[w] || seen[w] {
            continue;
        }
        seen[w] = true;
        if match_w[w].is_none() || augment(m, match_w[w].unwrap(), allowed, seen, match_w) {
            match_w[w] = Some(b);
            return true;
        }
    }
    false
}

/// Some perfect matching, found by augmenting paths.
pub fn find_pm(m: &DimerModel) -> Option<PerfectMatching> {
    find_pm_with(m, &[], &BTreeSet::new())
}

/// A perfect matching containing every edge of `forced` and none of
/// `forbidden`, if there is one.
pub fn find_pm_with(m: &DimerModel, forced: &[usize], forbidden: &BTreeSet<usize>) -> Option<PerfectMatching> {
    struct Search<'a> {
        m: &'a DimerModel,
        forbidden: &'a BTreeSet<usize>,
        fixed: Vec<bool>,
        by_white: Vec<Option<(usize, usize)>>,
    }
    impl Search<'_> {
        fn go(&mut self, b: usize, seen: &mut [bool]) -> bool {
            for &e in self.m.rotation(b) {
                let w = self.m.edges()[e].white;
                if seen[w] || self.fixed[w] || self.forbidden.contains(&e) {
                    continue;
                }
                seen[w] = true;
                if self.by_white[w].is_none_or(|(b2, _)| self.go(b2, seen)) {
                    self.by_white[w] = Some((b, e));
                    return true;
                }
            }
            false
        }
    }
    if !balanced(m) {
        return None;
    }
    let mut s = Search { m, forbidden, fixed: vec![false; m.num_nodes()], by_white: vec![None; m.num_nodes()] };
    for &e in forced {
        let ed = &m.edges()[e];
        if s.fixed[ed.black] || s.fixed[ed.white] || forbidden.contains(&e) {
            return None;
        }
        s.fixed[ed.black] = true;
        s.fixed[ed.white] = true;
        s.by_white[ed.white] = Some((ed.black, e));
    }
    for b in m.black_nodes() {
        if !s.fixed[b] && !s.go(b, &mut vec![false; m.num_nodes()]) {
            return None;
        }
    }
    Some(PerfectMatching::new(s.by_white.into_iter().flatten().map(|(_, e)| e).collect()))
}

/// True iff some perfect matching exists.
pub fn has_perfect_matching(m: &DimerModel) -> bool {
    let nb = m.black_nodes().count();
    nb == m.white_nodes().count() && max_matching(m, &vec![true; m.num_nodes()]) == nb
}

/// True iff every edge lies in some perfect matching. Decided per edge by a
/// matching search on the graph with both endpoints removed.
pub fn is_nondegenerate(m: &DimerModel) -> bool {
    edges_in_no_matching(m).is_empty() && has_perfect_matching(m)
}

/// Edges contained in no perfect matching.
pub fn edges_in_no_matching(m: &DimerModel) -> Vec<usize> {
    let nb = m.black_nodes().count();
    if nb != m.white_nodes().count() {
        return (0..m.num_edges()).collect();
    }
    let mut out = Vec::new();
    for (e, ed) in m.edges().iter().enumerate() {
        let mut allowed = vec![true; m.num_nodes()];
        allowed[ed.black] = false;
        allowed[ed.white] = false;
        if max_matching(m, &allowed) != nb - 1 {
            out.push(e);
        }
    }
    out
}

/// Position of a matching relative to the polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Corner,
    Boundary,
    Internal,
}

/// The polygon with the placement and classification of every matching.
#[derive(Clone, Debug, Serialize)]
pub struct PmPolygonResult {
    pub polygon: LatticePolygon,
    pub reference: PerfectMatching,
    /// Matchings in enumeration order with their height changes.
    pub placement: Vec<(PerfectMatching, LatticeVector)>,
    pub classification: Vec<PointClass>,
}

impl PmPolygonResult {
    /// Matchings placed at `p`.
    pub fn at(&self, p: LatticeVector) -> Vec<&PerfectMatching> {
        self.placement.iter().filter(|(_, h)| *h == p).map(|(pm, _)| pm).collect()
    }

    /// Count of matchings per lattice point.
    pub fn census(&self) -> BTreeMap<LatticeVector, u64> {
        let mut c = BTreeMap::new();
        for (_, h) in &self.placement {
            *c.entry(*h).or_insert(0) += 1;
        }
        c
    }
}

/// Classifies a point relative to a polygon.
pub fn classify_point(poly: &LatticePolygon, p: LatticeVector) -> PointClass {
    if poly.vertices().contains(&p) {
        PointClass::Corner
    } else if poly.strictly_contains(p) {
        PointClass::Internal
    } else {
        PointClass::Boundary
    }
}

/// Builds the polygon from all matchings; `p0` defaults to the first one.
pub fn pm_polygon(m: &DimerModel, p0: Option<&PerfectMatching>) -> Result<PmPolygonResult> {
    let pms = enumerate_pms(m);
    if pms.is_empty() {
        return Err(Error::NoMatchings);
    }
    let reference = p0.cloned().unwrap_or_else(|| pms[0].clone());
    let placement: Vec<(PerfectMatching, LatticeVector)> =
        pms.into_iter().map(|p| {
            let h = height_change(m, &p, &reference);
            (p, h)
        }).collect();
    let pts: Vec<LatticeVector> = placement.iter().map(|x| x.1).collect();
    let polygon = LatticePolygon::hull(&pts);
    let classification = pts.iter().map(|&p| classify_point(&polygon, p)).collect();
    Ok(PmPolygonResult { polygon, reference, placement, classification })
}

/// The polygon from a census, without storing matchings.
pub fn polygon_of_census(census: &BTreeMap<LatticeVector, u64>) -> Result<LatticePolygon> {
    if census.is_empty() {
        return Err(Error::NoMatchings);
    }
    let pts: Vec<LatticeVector> = census.keys().copied().collect();
    Ok(LatticePolygon::hull(&pts))
}

/// The polygon of a model up to translation, from the frontier census.
pub fn pm_polygon_fast(m: &DimerModel) -> Result<LatticePolygon> {
    let census = height_census(m, LatticeVector::ZERO);
    polygon_of_census(&census)
}

/// For every polygon edge (in counterclockwise order), the matching count at each
/// lattice point along it, starting from the edge's first vertex.
pub fn boundary_counts(poly: &LatticePolygon, census: &BTreeMap<LatticeVector, u64>) -> Vec<Vec<(LatticeVector, u64)>> {
    poly.edges()
        .iter()
        .map(|&(a, b)| {
            let len = lattice_length(a, b);
            let step = primitive(b - a).expect("nondegenerate edge");
            (0..=len)
                .map(|k| {
                    let p = a + k * step;
                    (p, census.get(&p).copied().unwrap_or(0))
                })
                .collect()
        })
        .collect()
}

/// Binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_dimer_str;

    const HONEYCOMB: &str = include_str!("../fixtures/honeycomb.dimer");
    const GAMMA: &str = include_str!("../fixtures/gamma_4b.dimer");

    #[test]
    fn honeycomb_has_three_matchings_at_distinct_heights() {
        let m = parse_dimer_str(HONEYCOMB).unwrap();
        let pms = enumerate_pms(&m);
        assert_eq!(pms.len(), 3);
        assert_eq!(count_pms(&m), 3);
        let census = offset_census(&m);
        assert_eq!(census.len(), 3);
        assert!(census.values().all(|&c| c == 1));
        assert!(height_change(&m, &pms[1], &pms[1]).is_zero());
    }

    #[test]
    fn strategies_agree() {
        let m = parse_dimer_str(GAMMA).unwrap();
        assert_eq!(enumerate_pms_with(&m, Strategy::Sequential), enumerate_pms_with(&m, Strategy::Parallel));
        assert_eq!(offset_census_with(&m, Strategy::Sequential), offset_census_with(&m, Strategy::Parallel));
        assert_eq!(offset_census(&m).values().sum::<u64>(), 8);
    }

    #[test]
    fn constrained_search() {
        let m = parse_dimer_str(GAMMA).unwrap();
        let e = |n: &str| m.edge_index(n).unwrap();
        let p = find_pm_with(&m, &[e("e1")], &BTreeSet::new()).unwrap();
        assert!(p.contains(e("e1")) && p.is_perfect_matching_of(&m));
        // e3 and e8 share B3
        assert!(find_pm_with(&m, &[e("e3"), e("e8")], &BTreeSet::new()).is_none());
        let banned: BTreeSet<usize> = [e("e7")].into();
        assert!(find_pm_with(&m, &[], &banned).is_some_and(|p| !p.contains(e("e7"))));
    }

    #[test]
    fn binomials() {
        assert_eq!((0..=4).map(|k| binomial(4, k)).collect::<Vec<_>>(), [1, 4, 6, 4, 1]);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn gamma_is_nondegenerate() {
        let m = parse_dimer_str(GAMMA).unwrap();
        assert!(is_nondegenerate(&m));
        assert!(edges_in_no_matching(&m).is_empty());
    }
}
