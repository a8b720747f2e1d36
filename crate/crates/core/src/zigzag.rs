//! Zigzag paths, their lifts to the universal cover, and the consistency
//! predicates.
//!
//! Lifts are handled by coset arithmetic. Visit `i` of a path records the
//! lattice cell `B(i)` of the black endpoint of its edge along a fixed lift.
//! Two lifts of `z` and `w` share the edge at visits `(i, j)` exactly when
//! their relative translation is congruent to `B_z(i) - B_w(j)` modulo
//! `Z[z] + Z[w]`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::dimer::{Color, Dart, DimerModel, Dir};
use crate::error::{Error, Result};
use crate::lattice::{cmp_angle, LatticeVector};
use crate::matchings::{find_pm_with, PerfectMatching, Strategy};

/// A closed zigzag path starting with a zig (a black-to-white dart).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZigzagPath {
    pub darts: Vec<Dart>,
    pub slope: LatticeVector,
}

impl ZigzagPath {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// Edge at each position.
    pub fn edges(&self) -> Vec<usize> {
        self.darts.iter().map(|d| d.edge).collect()
    }

    /// Edges traversed black to white.
    pub fn zigs(&self) -> Vec<usize> {
        self.darts.iter().step_by(2).map(|d| d.edge).collect()
    }

    /// Edges traversed white to black.
    pub fn zags(&self) -> Vec<usize> {
        self.darts.iter().skip(1).step_by(2).map(|d| d.edge).collect()
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.darts.iter().any(|d| d.edge == e)
    }

    /// Number of edges of `p` on the path, counted with multiplicity.
    pub fn meet_count(&self, p: &PerfectMatching) -> usize {
        self.darts.iter().filter(|d| p.contains(d.edge)).count()
    }

    /// Black-endpoint cell at each visit.
    pub fn black_cells(&self, m: &DimerModel) -> Vec<LatticeVector> {
        let mut c = LatticeVector::ZERO;
        let mut out = Vec::with_capacity(self.darts.len());
        for &d in &self.darts {
            let next = c + m.displacement(d);
            out.push(if d.dir == Dir::BlackToWhite { c } else { next });
            c = next;
        }
        out
    }

    /// True iff some edge is visited twice.
    pub fn repeats_edge(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.darts.iter().any(|d| !seen.insert(d.edge))
    }
}

/// All zigzag paths, ordered by slope angle from (1,0), then by least zig edge;
/// homologically trivial paths come last.
pub fn zigzag_paths(m: &DimerModel) -> Vec<ZigzagPath> {
    let nd = 2 * m.num_edges();
    let mut seen = vec![false; nd];
    let mut out = Vec::new();
    for e in 0..m.num_edges() {
        let start = Dart::bw(e);
        if seen[start.index()] {
            continue;
        }
        let mut darts = Vec::new();
        let mut d = start;
        while !seen[d.index()] {
            seen[d.index()] = true;
            darts.push(d);
            d = m.zigzag_next(d);
        }
        let slope = m.cycle_sum(&darts);
        out.push(ZigzagPath { darts, slope });
    }
    out.sort_by(path_order);
    out
}

fn path_order(a: &ZigzagPath, b: &ZigzagPath) -> Ordering {
    match (a.slope.is_zero(), b.slope.is_zero()) {
        (true, false) => return Ordering::Greater,
        (false, true) => return Ordering::Less,
        _ => {}
    }
    cmp_angle(a.slope, b.slope)
        .then_with(|| (a.slope.x.abs() + a.slope.y.abs()).cmp(&(b.slope.x.abs() + b.slope.y.abs())))
        .then_with(|| a.darts[0].edge.cmp(&b.darts[0].edge))
}

/// One shared edge visit of a path pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Occurrence {
    pub edge: usize,
    pub z_pos: usize,
    pub w_pos: usize,
    pub z_cell: LatticeVector,
    pub w_cell: LatticeVector,
    /// +1 iff the edge is a zig of `z`.
    pub sign: i8,
}

/// Shared-edge bookkeeping for a pair of paths.
#[derive(Clone, Debug, Serialize)]
pub struct LiftIntersectionTable {
    pub z_slope: LatticeVector,
    pub w_slope: LatticeVector,
    pub z_len: usize,
    pub w_len: usize,
    pub same_path: bool,
    pub occurrences: Vec<Occurrence>,
}

/// Membership in the sublattice generated by two vectors.
pub fn in_span(a: LatticeVector, b: LatticeVector, d: LatticeVector) -> bool {
    let det = a.cross(b);
    if det != 0 {
        return d.cross(b) % det == 0 && a.cross(d) % det == 0;
    }
    // rank one or zero: generated by gcd-combination of a and b
    let g = primitive_generator(a, b);
    match g {
        None => d.is_zero(),
        Some(g) => g.cross(d) == 0 && {
            let (t, n) = if g.x != 0 { (d.x, g.x) } else { (d.y, g.y) };
            t % n == 0
        },
    }
}

/// Generator of the rank-one group spanned by parallel `a`, `b`.
fn primitive_generator(a: LatticeVector, b: LatticeVector) -> Option<LatticeVector> {
    use num_integer::Integer;
    let base = if !a.is_zero() { a } else if !b.is_zero() { b } else { return None };
    let p = crate::lattice::primitive(base).ok()?;
    let ka = if p.x != 0 { a.x / p.x } else { a.y / p.y };
    let kb = if p.x != 0 { b.x / p.x } else { b.y / p.y };
    let g = ka.gcd(&kb);
    Some(g * p)
}

/// Integer (k, l) with k*a - l*b = d, for independent a, b.
fn solve_kl(a: LatticeVector, b: LatticeVector, d: LatticeVector) -> Option<(i64, i64)> {
    // k a + l' b = d with l' = -l
    let det = a.cross(b);
    if det == 0 {
        return None;
    }
    let kn = d.cross(b);
    let ln = a.cross(d);
    if kn % det != 0 || ln % det != 0 {
        return None;
    }
    Some((kn / det, -(ln / det)))
}

impl LiftIntersectionTable {
    pub fn independent(&self) -> bool {
        self.z_slope.cross(self.w_slope) != 0
    }

    /// Occurrences grouped by lift-pair class. For independent slopes each group
    /// is the set of edges one lift pair shares.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, o) in self.occurrences.iter().enumerate() {
            let d = o.z_cell - o.w_cell;
            let hit = groups.iter_mut().find(|g| {
                let r = &self.occurrences[g[0]];
                in_span(self.z_slope, self.w_slope, d - (r.z_cell - r.w_cell))
            });
            match hit {
                Some(g) => g.push(k),
                None => groups.push(vec![k]),
            }
        }
        groups
    }

    /// Maximum number of edges a single lift pair shares; `None` when infinite.
    pub fn max_shared(&self) -> Option<usize> {
        if self.occurrences.is_empty() {
            return Some(0);
        }
        if !self.independent() {
            return None;
        }
        self.classes().iter().map(|g| g.len()).max()
    }

    /// Positions along both lifts of every occurrence in a class, relative to the
    /// class's first occurrence.
    pub fn lift_positions(&self, class: &[usize]) -> Vec<(i64, i64)> {
        let r = &self.occurrences[class[0]];
        let b = r.z_cell - r.w_cell;
        class
            .iter()
            .map(|&k| {
                let o = &self.occurrences[k];
                let (kz, lw) = solve_kl(self.z_slope, self.w_slope, b - (o.z_cell - o.w_cell)).expect("same class");
                (o.z_pos as i64 + kz * self.z_len as i64, o.w_pos as i64 + lw * self.w_len as i64)
            })
            .collect()
    }

    /// Pairs of occurrences, consecutive along the lift of `z`, that both lifts
    /// traverse in the same order.
    pub fn same_direction_pairs(&self) -> Vec<(usize, usize)> {
        if self.same_path || self.occurrences.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        if !self.independent() {
            // parallel lifts that share an edge share all its translates; the
            // order along both lifts agrees iff the slopes point the same way
            if self.z_slope.dot(self.w_slope) <= 0 {
                return out;
            }
            for mut class in self.classes() {
                class.sort_by_key(|&k| self.occurrences[k].z_pos);
                for i in 0..class.len() {
                    out.push((class[i], class[(i + 1) % class.len()]));
                }
            }
            return out;
        }
        // independent lifts meet finitely often
        for class in self.classes() {
            if class.len() < 2 {
                continue;
            }
            let mut pos: Vec<(i64, i64, usize)> =
                self.lift_positions(&class).into_iter().zip(class.iter()).map(|((a, b), &k)| (a, b, k)).collect();
            pos.sort();
            for pair in pos.windows(2) {
                if pair[1].1 > pair[0].1 {
                    out.push((pair[0].2, pair[1].2));
                }
            }
        }
        out
    }

    /// True iff some lift pair meets twice in the same direction.
    pub fn has_same_direction(&self) -> bool {
        !self.same_direction_pairs().is_empty()
    }

    /// For a path paired with itself: repeated visits on one lift.
    pub fn self_intersections(&self) -> Vec<&Occurrence> {
        if !self.same_path {
            return Vec::new();
        }
        self.occurrences
            .iter()
            .filter(|o| o.z_pos != o.w_pos && in_span(self.z_slope, self.z_slope, o.z_cell - o.w_cell))
            .collect()
    }
}

/// Shared-edge table for `z` against `w`.
pub fn lift_table(m: &DimerModel, z: &ZigzagPath, w: &ZigzagPath) -> LiftIntersectionTable {
    let bz = z.black_cells(m);
    let bw = w.black_cells(m);
    let same = z == w;
    let mut occ = Vec::new();
    for (i, dz) in z.darts.iter().enumerate() {
        for (j, dw) in w.darts.iter().enumerate() {
            if dz.edge != dw.edge || (same && i == j) {
                continue;
            }
            if !same && dz.dir == dw.dir {
                // the same dart on two paths cannot happen; guard anyway
                continue;
            }
            occ.push(Occurrence {
                edge: dz.edge,
                z_pos: i,
                w_pos: j,
                z_cell: bz[i],
                w_cell: bw[j],
                sign: if dz.dir == Dir::BlackToWhite { 1 } else { -1 },
            });
        }
    }
    LiftIntersectionTable {
        z_slope: z.slope,
        w_slope: w.slope,
        z_len: z.len(),
        w_len: w.len(),
        same_path: same,
        occurrences: occ,
    }
}

/// Tables for every ordered pair `(i, j)` with `i < j`, in lexicographic order.
pub fn pair_tables(m: &DimerModel, paths: &[ZigzagPath], strategy: Strategy) -> Vec<((usize, usize), LiftIntersectionTable)> {
    let pairs: Vec<(usize, usize)> =
        (0..paths.len()).flat_map(|i| (i + 1..paths.len()).map(move |j| (i, j))).collect();
    let work = |&(i, j): &(usize, usize)| ((i, j), lift_table(m, &paths[i], &paths[j]));
    #[cfg(feature = "parallel")]
    {
        if strategy == Strategy::Parallel {
            use rayon::prelude::*;
            return pairs.par_iter().map(work).collect();
        }
    }
    let _ = strategy;
    pairs.iter().map(work).collect()
}

/// Number of shared torus edges, with multiplicity.
pub fn crossing_count(z: &ZigzagPath, w: &ZigzagPath) -> usize {
    z.darts.iter().filter(|d| w.darts.iter().any(|x| x.edge == d.edge && x.dir != d.dir)).count()
}

/// Detailed outcome of the consistency conditions.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ConsistencyReport {
    pub trivial_paths: Vec<usize>,
    pub self_intersecting: Vec<usize>,
    /// Path pairs whose lifts meet twice in the same direction.
    pub same_direction: Vec<(usize, usize)>,
}

impl ConsistencyReport {
    pub fn ok(&self) -> bool {
        self.trivial_paths.is_empty() && self.self_intersecting.is_empty() && self.same_direction.is_empty()
    }
}

pub fn consistency_report(m: &DimerModel) -> ConsistencyReport {
    let paths = zigzag_paths(m);
    let mut r = ConsistencyReport::default();
    for (k, z) in paths.iter().enumerate() {
        if z.slope.is_zero() {
            r.trivial_paths.push(k);
        }
        if !lift_table(m, z, z).self_intersections().is_empty() {
            r.self_intersecting.push(k);
        }
    }
    for ((i, j), t) in pair_tables(m, &paths, Strategy::default()) {
        if t.has_same_direction() {
            r.same_direction.push((i, j));
        }
    }
    r
}

/// No trivial path, no self-intersecting lift, no lift pair meeting twice in the same direction.
pub fn is_consistent(m: &DimerModel) -> bool {
    consistency_report(m).ok()
}

/// Zigzag path through each corner `(e, succ(e))` of node `v`, in rotation order.
pub fn corner_paths(m: &DimerModel, paths: &[ZigzagPath], v: usize) -> Vec<usize> {
    let mut path_of = vec![usize::MAX; 2 * m.num_edges()];
    for (k, z) in paths.iter().enumerate() {
        for d in &z.darts {
            path_of[d.index()] = k;
        }
    }
    m.rotation(v)
        .iter()
        .map(|&e| {
            // the path entering v along e turns to succ(e) at white nodes; at black
            // nodes the path entering along succ(e) turns to e
            let into = |edge: usize| m.dart_from(v, edge).reversed();
            match m.color(v) {
                Color::White => path_of[into(e).index()],
                Color::Black => path_of[into(m.succ(v, e)).index()],
            }
        })
        .collect()
}

/// True iff the slopes, read cyclically, wind once in the given angular sense
/// with no two equal.
fn winds_once(slopes: &[LatticeVector], ccw: bool) -> bool {
    let n = slopes.len();
    if n < 2 {
        return true;
    }
    // count descents of the angle sequence; exactly one cyclic descent means one turn
    let mut descents = 0;
    for i in 0..n {
        let (a, b) = (slopes[i], slopes[(i + 1) % n]);
        let o = if ccw { cmp_angle(a, b) } else { cmp_angle(b, a) };
        match o {
            Ordering::Equal => return false,
            Ordering::Greater => descents += 1,
            Ordering::Less => {}
        }
    }
    descents == 1
}

/// Around a node of a properly ordered model the corner slopes turn
/// counterclockwise together with the rotation.
const CORNER_SLOPES_CCW: bool = true;

/// Detailed outcome of the properly-ordered conditions.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ProperOrderReport {
    pub trivial_paths: Vec<usize>,
    pub self_intersecting: Vec<usize>,
    /// Nodes on two paths of equal slope.
    pub shared_slope_nodes: Vec<usize>,
    /// Nodes whose corner order disagrees with the slope order.
    pub misordered_nodes: Vec<usize>,
}

impl ProperOrderReport {
    pub fn ok(&self) -> bool {
        self.trivial_paths.is_empty()
            && self.self_intersecting.is_empty()
            && self.shared_slope_nodes.is_empty()
            && self.misordered_nodes.is_empty()
    }
}

pub fn proper_order_report(m: &DimerModel) -> ProperOrderReport {
    let paths = zigzag_paths(m);
    let mut r = ProperOrderReport::default();
    for (k, z) in paths.iter().enumerate() {
        if z.slope.is_zero() {
            r.trivial_paths.push(k);
        }
        if !lift_table(m, z, z).self_intersections().is_empty() {
            r.self_intersecting.push(k);
        }
    }
    for v in 0..m.num_nodes() {
        let cp = corner_paths(m, &paths, v);
        let slopes: Vec<LatticeVector> = cp.iter().map(|&k| paths[k].slope).collect();
        let mut tie = false;
        for a in 0..slopes.len() {
            for b in a + 1..slopes.len() {
                if cmp_angle(slopes[a], slopes[b]) == Ordering::Equal {
                    tie = true;
                }
            }
        }
        if tie {
            r.shared_slope_nodes.push(v);
        } else if !winds_once(&slopes, CORNER_SLOPES_CCW) {
            r.misordered_nodes.push(v);
        }
    }
    r
}

pub fn is_properly_ordered(m: &DimerModel) -> bool {
    proper_order_report(m).ok()
}

/// Every path is simple on the torus and every lift pair shares at most one edge.
pub fn is_isoradial(m: &DimerModel) -> bool {
    let paths = zigzag_paths(m);
    if paths.iter().any(|z| z.repeats_edge() || z.slope.is_zero()) {
        return false;
    }
    pair_tables(m, &paths, Strategy::default()).iter().all(|(_, t)| t.max_shared().is_some_and(|s| s <= 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ZigzagType {
    TypeI,
    TypeII,
}

/// Type I iff the lift of `z` meets every other lift, and its own translates, at most once.
pub fn classify_type(m: &DimerModel, paths: &[ZigzagPath], k: usize) -> ZigzagType {
    let z = &paths[k];
    if z.repeats_edge() {
        return ZigzagType::TypeII;
    }
    for (j, w) in paths.iter().enumerate() {
        if j == k {
            continue;
        }
        let t = lift_table(m, z, w);
        if !t.max_shared().is_some_and(|s| s <= 1) {
            return ZigzagType::TypeII;
        }
    }
    ZigzagType::TypeI
}

/// Summary line per path.
#[derive(Clone, Debug, Serialize)]
pub struct ZigzagSummary {
    pub index: usize,
    pub slope: LatticeVector,
    pub length: usize,
    pub kind: ZigzagType,
    pub edges: Vec<String>,
}

pub fn summaries(m: &DimerModel) -> Vec<ZigzagSummary> {
    let paths = zigzag_paths(m);
    (0..paths.len())
        .map(|k| ZigzagSummary {
            index: k + 1,
            slope: paths[k].slope,
            length: paths[k].len(),
            kind: classify_type(m, &paths, k),
            edges: paths[k].edges().iter().map(|&e| m.edge_name(e).to_string()).collect(),
        })
        .collect()
}

/// A matching containing every zig of `z` and the matching obtained by
/// swapping those zigs for the zags.
pub fn boundary_matchings_for(m: &DimerModel, z: &ZigzagPath) -> Result<(PerfectMatching, PerfectMatching)> {
    let zigs: BTreeSet<usize> = z.zigs().into_iter().collect();
    let zags: BTreeSet<usize> = z.zags().into_iter().collect();
    if zigs.len() != z.len() / 2 || !zigs.is_disjoint(&zags) {
        return Err(Error::Contract("zigzag path repeats an edge".into()));
    }
    let forced: Vec<usize> = zigs.iter().copied().collect();
    let p = find_pm_with(m, &forced, &zags)
        .ok_or_else(|| Error::Contract("slope is not realized by a polygon edge".into()))?;
    let swapped: Vec<usize> = p.edges.iter().copied().filter(|e| !zigs.contains(e)).chain(zags.iter().copied()).collect();
    Ok((p, PerfectMatching::new(swapped)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimer::periodic_cover;
    use crate::io::parse_dimer_str;

    fn honeycomb() -> DimerModel {
        parse_dimer_str(include_str!("../fixtures/honeycomb.dimer")).unwrap()
    }

    #[test]
    fn honeycomb_paths() {
        let m = honeycomb();
        let z = zigzag_paths(&m);
        assert_eq!(z.len(), 3);
        let sum = z.iter().fold(LatticeVector::ZERO, |a, w| a + w.slope);
        assert!(sum.is_zero());
        for w in &z {
            assert_eq!((w.zigs().len(), w.zags().len()), (1, 1));
        }
        assert!(is_consistent(&m) && is_properly_ordered(&m) && is_isoradial(&m));
    }

    #[test]
    fn independent_slopes_meet_once() {
        let m = honeycomb();
        let z = zigzag_paths(&m);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(crossing_count(&z[i], &z[j]), 1);
                    assert!(lift_table(&m, &z[i], &z[j]).independent());
                }
            }
        }
    }

    #[test]
    fn covers_multiply_parallel_paths() {
        let m = periodic_cover(&honeycomb(), 2, 2);
        let z = zigzag_paths(&m);
        assert_eq!(z.len(), 6);
        assert!(z.iter().all(|w| w.len() == 4));
        assert!((0..z.len()).all(|k| classify_type(&m, &z, k) == ZigzagType::TypeI));
    }

    #[test]
    fn span_test() {
        let (a, b) = (LatticeVector { x: 1, y: 0 }, LatticeVector { x: 0, y: 2 });
        assert!(in_span(a, b, LatticeVector { x: 3, y: -4 }));
        assert!(!in_span(a, b, LatticeVector { x: 0, y: 1 }));
    }

    #[test]
    fn pair_tables_are_strategy_independent() {
        let m = periodic_cover(&honeycomb(), 2, 2);
        let z = zigzag_paths(&m);
        let seq: Vec<_> = pair_tables(&m, &z, Strategy::Sequential).into_iter().map(|(k, t)| (k, t.classes())).collect();
        let par: Vec<_> = pair_tables(&m, &z, Strategy::Parallel).into_iter().map(|(k, t)| (k, t.classes())).collect();
        assert_eq!(seq, par);
    }
}
