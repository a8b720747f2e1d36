//! Fixtures, perturbations and the property checks shared by the test targets.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::sample::Index;

use dimerlab::deformation::{Assignment, DeformationRequest, RemovalSchedule, Side};
use dimerlab::dimer::{reduce, split_move, DimerModel};
use dimerlab::drawing::{compile_drawing, Drawing};
use dimerlab::io::parse_dimer;
use dimerlab::lattice::{LatticePolygon, LatticeVector, Mat2};
use dimerlab::matchings::{height_change, PerfectMatching};
use dimerlab::polygon_mutation::{admits_mutation, context_for_normal, MutationContext};
use dimerlab::zigzag::{boundary_matchings_for, classify_type, crossing_count, zigzag_paths, ZigzagType};

pub fn lv(x: i64, y: i64) -> LatticeVector {
    LatticeVector { x, y }
}

pub fn poly(pts: &[(i64, i64)]) -> LatticePolygon {
    LatticePolygon::hull(&pts.iter().map(|&(x, y)| lv(x, y)).collect::<Vec<_>>())
}

/// Translate so that the least vertex sits at the origin.
pub fn normalized(p: &LatticePolygon) -> LatticePolygon {
    let min = *p.vertices().iter().min().expect("nonempty polygon");
    p.translate(-min)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn model(name: &str) -> DimerModel {
    parse_dimer(&fixture_path(&format!("{name}.dimer"))).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn drawing(name: &str) -> Drawing {
    let text = std::fs::read_to_string(fixture_path(&format!("{name}.draw"))).expect("fixture exists");
    compile_drawing(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn matching(m: &DimerModel, names: &[&str]) -> PerfectMatching {
    let pm = PerfectMatching::new(names.iter().map(|n| m.edge_index(n).expect("edge name")).collect());
    assert!(pm.is_perfect_matching_of(m), "{names:?} is not a perfect matching");
    pm
}

/// Reference and corner matchings of the four-node-pair example, P0..P4.
pub const GAMMA_PMS: [[&str; 3]; 5] = [
    ["e3", "e6", "e7"],
    ["e7", "e8", "e10"],
    ["e1", "e4", "e10"],
    ["e3", "e6", "e9"],
    ["e2", "e5", "e8"],
];

/// Deformation of the large example along its three paths of slope (0,1).
pub fn hexagon4_request() -> DeformationRequest {
    let mut req = DeformationRequest::new(4, 3, Side::Zig);
    req.family = Some(vec![4, 5, 6]);
    req.assignment = Assignment::Sets(vec![
        vec!["W4B5".into()],
        vec!["W7B9".into()],
        vec!["W9B12".into(), "W10B13".into()],
    ]);
    req
}

pub fn schedule(name: &str) -> RemovalSchedule {
    let text = std::fs::read_to_string(fixture_path(name)).expect("schedule exists");
    let v: serde_json::Value = serde_json::from_str(&text).expect("schedule json");
    let pairs = v["pairs"]
        .as_array()
        .expect("pairs")
        .iter()
        .map(|p| (p[0].as_str().unwrap().to_string(), p[1].as_str().unwrap().to_string()))
        .collect();
    RemovalSchedule::Explicit(pairs)
}

/// Every consistent fixture shipped with the crate.
pub const CONSISTENT: [&str; 8] =
    ["gamma_4b", "honeycomb", "pentagon_iso", "pentagon_type2", "pentagon_type2_mu", "hexagon4", "hexagon4_a", "hexagon4_b"];

pub fn fixtures() -> &'static [(&'static str, DimerModel)] {
    static F: OnceLock<Vec<(&'static str, DimerModel)>> = OnceLock::new();
    F.get_or_init(|| CONSISTENT.iter().map(|&n| (n, model(n))).collect())
}

/// One step of a perturbation. Indices are resolved against the model at hand.
#[derive(Clone, Debug)]
pub enum Step {
    Gauge(Index, i64, i64),
    /// Sort keys for nodes and edges; missing keys count as zero.
    Permute(Vec<u64>, Vec<u64>),
    /// Split a node off along an arc of its rotation.
    Split(Index, Index, Index),
    /// Split then join every 2-valent node again.
    SplitJoin(Index, Index, Index),
}

fn order_by_keys(n: usize, keys: &[u64]) -> Vec<usize> {
    let mut ix: Vec<usize> = (0..n).collect();
    ix.sort_by_key(|&i| (keys.get(i).copied().unwrap_or(0), i));
    ix
}

fn split(m: &DimerModel, node: &Index, start: &Index, len: &Index) -> Option<DimerModel> {
    let v = node.index(m.num_nodes());
    let rot = m.rotation(v);
    if rot.len() < 2 {
        return None;
    }
    let s = start.index(rot.len());
    let k = 1 + len.index(rot.len() - 1);
    let arc: Vec<usize> = (0..k).map(|i| rot[(s + i) % rot.len()]).collect();
    split_move(m, v, &arc).ok().map(|r| r.0)
}

pub fn apply(m: &DimerModel, steps: &[Step]) -> DimerModel {
    let mut cur = m.clone();
    for s in steps {
        cur = match s {
            Step::Gauge(v, dx, dy) => cur.retranslate(v.index(cur.num_nodes()), lv(*dx, *dy)),
            Step::Permute(nk, ek) => {
                cur.permuted(&order_by_keys(cur.num_nodes(), nk), &order_by_keys(cur.num_edges(), ek))
            }
            Step::Split(a, b, c) => split(&cur, a, b, c).unwrap_or(cur),
            Step::SplitJoin(a, b, c) => split(&cur, a, b, c).map(|x| reduce(&x).expect("reduces")).unwrap_or(cur),
        };
    }
    cur
}

fn keys() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(any::<u64>(), 0..96)
}

/// Steps that keep a reduced model reduced.
pub fn reduced_step() -> impl Strategy<Value = Step> {
    prop_oneof![
        (any::<Index>(), -2i64..=2, -2i64..=2).prop_map(|(v, x, y)| Step::Gauge(v, x, y)),
        (keys(), keys()).prop_map(|(a, b)| Step::Permute(a, b)),
        (any::<Index>(), any::<Index>(), any::<Index>()).prop_map(|(a, b, c)| Step::SplitJoin(a, b, c)),
    ]
}

pub fn any_step() -> impl Strategy<Value = Step> {
    prop_oneof![
        3 => reduced_step(),
        1 => (any::<Index>(), any::<Index>(), any::<Index>()).prop_map(|(a, b, c)| Step::Split(a, b, c)),
    ]
}

/// A fixture together with up to three perturbation steps.
pub fn perturbed_fixture(reduced: bool) -> impl Strategy<Value = (usize, Vec<Step>)> {
    let step = if reduced { reduced_step().boxed() } else { any_step().boxed() };
    (0..CONSISTENT.len(), prop::collection::vec(step, 0..=3))
}

/// Independent matching oracle: maximum bipartite matching restricted to
/// free nodes and allowed edges, by Kuhn's algorithm over an edge list.
fn extendable(m: &DimerModel, taken: &[bool], banned: &BTreeSet<usize>) -> bool {
    let n = m.num_nodes();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, ed) in m.edges().iter().enumerate() {
        if !banned.contains(&e) && !taken[ed.black] && !taken[ed.white] {
            adj[ed.black].push(ed.white);
        }
    }
    fn aug(b: usize, adj: &[Vec<usize>], seen: &mut [bool], mate: &mut [Option<usize>]) -> bool {
        for &w in &adj[b] {
            if !seen[w] {
                seen[w] = true;
                if mate[w].is_none_or(|b2| aug(b2, adj, seen, mate)) {
                    mate[w] = Some(b);
                    return true;
                }
            }
        }
        false
    }
    let mut mate = vec![None; n];
    let blacks: Vec<usize> = m.black_nodes().filter(|&b| !taken[b]).collect();
    let whites = m.white_nodes().filter(|&w| !taken[w]).count();
    blacks.len() == whites && blacks.iter().all(|&b| aug(b, &adj, &mut vec![false; n], &mut mate))
}

/// A perfect matching built greedily: edges are tried in key order and kept
/// whenever the partial matching still extends.
pub fn sample_pm(m: &DimerModel, keys: &[u64]) -> PerfectMatching {
    let mut taken = vec![false; m.num_nodes()];
    let mut chosen = Vec::new();
    let none = BTreeSet::new();
    for e in order_by_keys(m.num_edges(), keys) {
        let ed = &m.edges()[e];
        if taken[ed.black] || taken[ed.white] {
            continue;
        }
        taken[ed.black] = true;
        taken[ed.white] = true;
        if extendable(m, &taken, &none) {
            chosen.push(e);
        } else {
            taken[ed.black] = false;
            taken[ed.white] = false;
        }
    }
    let pm = PerfectMatching::new(chosen);
    assert!(pm.is_perfect_matching_of(m), "greedy sampling ends in a perfect matching");
    pm
}

pub type Check = Result<(), String>;

/// h(P,P'') = h(P,P') + h(P',P''), h(P,P') = h(P,P0) - h(P',P0), h(P,P) = 0.
pub fn check_cocycle(m: &DimerModel, p: &PerfectMatching, q: &PerfectMatching, r: &PerfectMatching) -> Check {
    let h = |a, b| height_change(m, a, b);
    if h(p, r) != h(p, q) + h(q, r) {
        return Err(format!("h(P,P'') = {} but h(P,P') + h(P',P'') = {}", h(p, r), h(p, q) + h(q, r)));
    }
    if h(p, q) != h(p, r) - h(q, r) {
        return Err("h(P,P') differs from h(P,P0) - h(P',P0)".into());
    }
    if !h(p, p).is_zero() {
        return Err("h(P,P) is not zero".into());
    }
    Ok(())
}

/// |P ∩ z| = l(z)/2 - <h(P,P_z), -[z]> for every zigzag path, where P_z
/// contains all zigs of z.
pub fn check_meet_formula(m: &DimerModel, p: &PerfectMatching) -> Check {
    for (k, z) in zigzag_paths(m).iter().enumerate() {
        let (pz, pz2) = boundary_matchings_for(m, z).map_err(|e| format!("path {k}: {e}"))?;
        for base in [&pz, &pz2] {
            let rhs = z.len() as i64 / 2 - height_change(m, p, base).dot(-z.slope);
            if z.meet_count(p) as i64 != rhs {
                return Err(format!("path {k}: |P∩z| = {} but the formula gives {rhs}", z.meet_count(p)));
            }
        }
    }
    Ok(())
}

/// l(z)/2 - |P ∩ z| depends only on the slope of z.
pub fn check_length_defect(m: &DimerModel, p: &PerfectMatching) -> Check {
    let mut defect: BTreeMap<LatticeVector, i64> = BTreeMap::new();
    for z in zigzag_paths(m) {
        let d = z.len() as i64 / 2 - z.meet_count(p) as i64;
        if let Some(&old) = defect.get(&z.slope) {
            if old != d {
                return Err(format!("slope {}: defects {old} and {d}", z.slope));
            }
        }
        defect.insert(z.slope, d);
    }
    Ok(())
}

/// Inside a same-slope family of type I paths every other path meets all
/// members equally often and always on the same side of itself.
pub fn check_uniform_crossings(m: &DimerModel) -> Check {
    let paths = zigzag_paths(m);
    let mut families: BTreeMap<LatticeVector, Vec<usize>> = BTreeMap::new();
    for k in 0..paths.len() {
        if classify_type(m, &paths, k) == ZigzagType::TypeI {
            families.entry(paths[k].slope).or_default().push(k);
        }
    }
    for (slope, fam) in families.iter().filter(|(_, f)| f.len() > 1) {
        for (j, w) in paths.iter().enumerate() {
            if fam.contains(&j) {
                continue;
            }
            let counts: BTreeSet<usize> = fam.iter().map(|&i| crossing_count(w, &paths[i])).collect();
            if counts.len() > 1 {
                return Err(format!("path {j} meets the slope {slope} family with counts {counts:?}"));
            }
            let zigs: BTreeSet<usize> = w.zigs().into_iter().collect();
            let sides: BTreeSet<bool> = fam
                .iter()
                .flat_map(|&i| paths[i].edges())
                .filter(|e| w.contains_edge(*e))
                .map(|e| zigs.contains(&e))
                .collect();
            if sides.len() > 1 {
                return Err(format!("path {j} meets the slope {slope} family on both sides"));
            }
        }
    }
    Ok(())
}

const GENERATORS: [Mat2; 4] = [Mat2::new(0, -1, 1, 0), Mat2::new(1, 1, 0, 1), Mat2::new(1, -1, 0, 1), Mat2::new(1, 0, 0, -1)];

/// Unimodular matrices as short words in generators of GL(2,Z).
pub fn unimodular() -> impl Strategy<Value = Mat2> {
    prop::collection::vec(0..GENERATORS.len(), 0..8)
        .prop_map(|word| word.into_iter().fold(Mat2::IDENTITY, |m, g| m * GENERATORS[g]))
}

/// An admissible mutation context with the origin in the polygon and
/// `h_max >= 1`. Built in the frame `w = (0,1)`, `u_E = (±1,0)`: every slice
/// below the origin gets a segment long enough for the factor, then the whole
/// picture is moved by a random unimodular map.
pub fn admissible_context() -> impl Strategy<Value = MutationContext> {
    (
        1i64..=3,
        prop::collection::vec((-2i64..=2, 0i64..=2), 3),
        prop::collection::vec((-4i64..=4, 1i64..=3), 1..4),
        -2i64..=2,
        unimodular(),
        prop::bool::ANY,
    )
        .prop_map(|(depth, slices, tops, c, mat, flip)| {
            let mut pts = vec![lv(c, 0), lv(0, 0)];
            for (k, &(a, extra)) in slices.iter().take(depth as usize).enumerate() {
                let h = k as i64 + 1;
                pts.push(lv(a, -h));
                pts.push(lv(a + h + extra, -h));
            }
            pts.extend(tops.iter().map(|&(x, y)| lv(x, y)));
            let p = LatticePolygon::hull(&pts).transform(mat);
            let inv = mat.inverse_unimodular().expect("unimodular");
            // normals transform by the inverse transpose
            let w = Mat2::new(inv.a, inv.c, inv.b, inv.d).apply(lv(0, 1));
            let u = mat.apply(lv(if flip { -1 } else { 1 }, 0));
            let ctx = context_for_normal(&p, w, u).expect("bottom slice is an edge");
            assert!(admits_mutation(&ctx), "constructed context is admissible");
            ctx
        })
}
