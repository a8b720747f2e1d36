//! Deformations of consistent models at the zigs or zags of a family of
//! parallel zigzag paths.
//!
//! The zig side inserts a chain of `p_i` white/black pairs into every zig of
//! `z_i`, deletes the zags, joins consecutive chains by connection edges and
//! adds bypasses for the zags outside `X_i`. Consistency is then restored by
//! edge removals and the model is reduced. The zag side is the zig side
//! conjugated by [`DimerModel::mirror_swap`].

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::dimer::{reduce, Color, Dart, DimerModel, Edge, Node};
use crate::error::{Error, Result};
use crate::lattice::{edge_normals, LatticePolygon, LatticeVector, Rat, SlopeMultiset};
use crate::matchings::height_change;
use crate::zigzag::{
    boundary_matchings_for, classify_type, crossing_count, is_consistent, lift_table, pair_tables, zigzag_paths,
    ZigzagPath, ZigzagType,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Zig,
    Zag,
}

/// A piece of a crossing path between two consecutive meetings with the anchor
/// family member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubZigzag {
    /// Index of the crossing path in the model's path list.
    pub path: usize,
    /// Position of the piece along its path, from 0.
    pub index: usize,
    /// First and last dart positions (cyclic, inclusive).
    pub start: usize,
    pub len: usize,
    /// Crossing edge with each family member, in family order.
    pub crossings: Vec<usize>,
}

/// How sub-zigzags are distributed over the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assignment {
    /// Round robin over sub-zigzags in order, starting at `z_1`.
    Auto,
    /// Family member for each sub-zigzag of the active side, in order.
    BySubzigzag(Vec<usize>),
    /// The parameter sets themselves, as edge names per family member.
    Sets(Vec<Vec<String>>),
}

/// User choices for [`build_deformation_data`].
#[derive(Clone, Debug)]
pub struct DeformationRequest {
    /// Index of the chosen path in [`zigzag_paths`] order.
    pub z: usize,
    pub r: usize,
    /// Family members; the first is `z_1`, the rest are reordered cyclically.
    /// Defaults to `z` followed by the next same-slope type I paths.
    pub family: Option<Vec<usize>>,
    pub side: Side,
    pub assignment: Assignment,
    /// Starting edge of the decomposition for selected crossing paths.
    pub anchors: BTreeMap<usize, usize>,
}

impl DeformationRequest {
    pub fn new(z: usize, r: usize, side: Side) -> DeformationRequest {
        DeformationRequest { z, r, family: None, side, assignment: Assignment::Auto, anchors: BTreeMap::new() }
    }
}

/// Everything the deformation needs, with the derived counts.
#[derive(Clone, Debug, Serialize)]
pub struct DeformationData {
    pub z: usize,
    pub v: LatticeVector,
    pub n: usize,
    pub r: usize,
    pub h: usize,
    /// Path indices of `z_1 .. z_r`.
    pub family: Vec<usize>,
    /// Paths meeting `z` at zags, with their crossing counts.
    pub x_paths: Vec<(usize, usize)>,
    /// Paths meeting `z` at zigs, with their crossing counts.
    pub y_paths: Vec<(usize, usize)>,
    pub x_subpaths: Vec<SubZigzag>,
    pub y_subpaths: Vec<SubZigzag>,
    pub side: Side,
    /// `X_i` (zig side) or `Y_i` (zag side) as edge ids.
    pub params: Vec<BTreeSet<usize>>,
    pub weights: Vec<usize>,
    #[serde(skip)]
    pub paths: Vec<ZigzagPath>,
}

fn derr(msg: impl Into<String>) -> Error {
    Error::Deformation(msg.into())
}

/// Family members met along `x` in traversal order, starting after position `from`.
fn family_sequence(x: &ZigzagPath, member_of: &BTreeMap<usize, usize>, from: usize) -> Vec<(usize, usize)> {
    let l = x.len();
    (1..=l)
        .map(|k| (from + k) % l)
        .filter_map(|pos| member_of.get(&x.darts[pos].edge).map(|&i| (pos, i)))
        .collect()
}

/// Positions where `x` crosses members of the family, with the member index.
fn crossings_on(x: &ZigzagPath, member_of: &BTreeMap<usize, usize>) -> Vec<(usize, usize)> {
    x.darts
        .iter()
        .enumerate()
        .filter_map(|(pos, d)| member_of.get(&d.edge).map(|&i| (pos, i)))
        .collect()
}

fn split_subpaths(
    paths: &[ZigzagPath],
    crossing: &[(usize, usize)],
    member_of: &BTreeMap<usize, usize>,
    anchor_member: usize,
    r: usize,
    anchors: &BTreeMap<usize, usize>,
) -> Result<Vec<SubZigzag>> {
    let mut out = Vec::new();
    for &(j, _) in crossing {
        let x = &paths[j];
        let l = x.len();
        let marks: Vec<usize> =
            crossings_on(x, member_of).into_iter().filter(|&(_, i)| i == anchor_member).map(|(p, _)| p).collect();
        if marks.is_empty() {
            return Err(derr(format!("crossing path {} misses a family member", j + 1)));
        }
        let start = match anchors.get(&j) {
            Some(&e) => *marks
                .iter()
                .find(|&&p| x.darts[p].edge == e)
                .ok_or_else(|| derr(format!("anchor edge is not a crossing of path {}", j + 1)))?,
            None => *marks.iter().min_by_key(|&&p| x.darts[p].edge).unwrap(),
        };
        let k0 = marks.iter().position(|&p| p == start).unwrap();
        for a in 0..marks.len() {
            let s = marks[(k0 + a) % marks.len()];
            let e = marks[(k0 + a + 1) % marks.len()];
            let len = if marks.len() == 1 { l } else { (e + l - s) % l };
            let mut cross = vec![usize::MAX; r];
            for k in 0..len {
                let pos = (s + k) % l;
                if let Some(&i) = member_of.get(&x.darts[pos].edge) {
                    if cross[i] != usize::MAX {
                        return Err(derr(format!("sub-zigzag of path {} meets a family member twice", j + 1)));
                    }
                    cross[i] = x.darts[pos].edge;
                }
            }
            if cross.contains(&usize::MAX) {
                return Err(derr(format!("sub-zigzag of path {} misses a family member", j + 1)));
            }
            out.push(SubZigzag { path: j, index: a, start: s, len, crossings: cross });
        }
    }
    Ok(out)
}

/// Assembles and validates deformation data.
pub fn build_deformation_data(m: &DimerModel, req: &DeformationRequest) -> Result<DeformationData> {
    if !m.is_reduced() {
        return Err(derr("model must be reduced"));
    }
    if !is_consistent(m) {
        return Err(derr("model must be consistent"));
    }
    let paths = zigzag_paths(m);
    let z = req.z;
    if z >= paths.len() {
        return Err(derr(format!("no zigzag path {}", z + 1)));
    }
    if classify_type(m, &paths, z) != ZigzagType::TypeI {
        return Err(derr(format!("zigzag path {} is not type I", z + 1)));
    }
    let v = paths[z].slope;
    let n = paths[z].len() / 2;
    let same: Vec<usize> = (0..paths.len())
        .filter(|&k| paths[k].slope == v && classify_type(m, &paths, k) == ZigzagType::TypeI)
        .collect();
    let r = req.r;
    if r == 0 || r > same.len() {
        return Err(derr(format!("r = {r} must lie in 1..={}", same.len())));
    }
    if r >= n {
        return Err(derr(format!("r = {r} leaves no positive h (n = {n})")));
    }
    let chosen: Vec<usize> = match &req.family {
        Some(f) => f.clone(),
        None => {
            let mut f = vec![z];
            f.extend(same.iter().copied().filter(|&k| k != z).take(r - 1));
            f
        }
    };
    if chosen.len() != r || chosen.iter().collect::<BTreeSet<_>>().len() != r {
        return Err(derr("family must list r distinct paths"));
    }
    for &k in &chosen {
        if !same.contains(&k) {
            return Err(derr(format!("path {} is not a type I path of slope {v}", k + 1)));
        }
        if paths[k].len() != 2 * n {
            return Err(derr("family paths differ in length"));
        }
    }
    let mut node_owner: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in &chosen {
        for d in &paths[k].darts {
            for node in [m.tail(*d), m.head(*d)] {
                if let Some(&o) = node_owner.get(&node) {
                    if o != k {
                        return Err(derr("family paths share a node"));
                    }
                }
                node_owner.insert(node, k);
            }
        }
    }
    // paths crossing z at zags (x) and zigs (y)
    let zz = &paths[z];
    let zag_set: BTreeSet<usize> = zz.zags().into_iter().collect();
    let zig_set: BTreeSet<usize> = zz.zigs().into_iter().collect();
    let mut x_paths = Vec::new();
    let mut y_paths = Vec::new();
    for (k, w) in paths.iter().enumerate() {
        if k == z {
            continue;
        }
        let at_zag = w.zigs().iter().filter(|e| zag_set.contains(e)).count();
        let at_zig = w.zags().iter().filter(|e| zig_set.contains(e)).count();
        if at_zag > 0 && at_zig > 0 {
            return Err(derr(format!("path {} meets z at both zigs and zags", k + 1)));
        }
        if at_zag > 0 {
            x_paths.push((k, at_zag));
        } else if at_zig > 0 {
            y_paths.push((k, at_zig));
        }
    }
    // cyclic order of the family along the first crossing path
    let mut member_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &k) in chosen.iter().enumerate() {
        for e in paths[k].edges() {
            member_of.insert(e, i);
        }
    }
    let family: Vec<usize> = if r == 1 {
        chosen.clone()
    } else {
        let (probe, descending) = match (x_paths.first(), y_paths.first()) {
            (Some(&(j, _)), _) => (j, true),
            (None, Some(&(j, _))) => (j, false),
            _ => return Err(derr("no path crosses z")),
        };
        let x = &paths[probe];
        let first = crossings_on(x, &member_of).into_iter().find(|&(_, i)| i == 0).map(|(p, _)| p);
        let first = first.ok_or_else(|| derr("crossing path misses z_1"))?;
        let seq = family_sequence(x, &member_of, first);
        let mut order: Vec<usize> = Vec::new();
        for &(_, i) in &seq {
            if i == 0 {
                break;
            }
            order.push(i);
        }
        if order.len() != r - 1 || order.iter().collect::<BTreeSet<_>>().len() != r - 1 {
            return Err(derr("family is not met cyclically by the crossing paths"));
        }
        if descending {
            order.reverse();
        }
        std::iter::once(chosen[0]).chain(order.into_iter().map(|i| chosen[i])).collect()
    };
    member_of.clear();
    for (i, &k) in family.iter().enumerate() {
        for e in paths[k].edges() {
            member_of.insert(e, i);
        }
    }
    // each crossing path meets the family in the required cyclic order
    for (list, descending) in [(&x_paths, true), (&y_paths, false)] {
        for &(j, mj) in list.iter() {
            let cr = crossings_on(&paths[j], &member_of);
            if cr.len() != mj * r {
                return Err(derr(format!("path {} meets family members unequally", j + 1)));
            }
            for w in 0..cr.len() {
                let (a, b) = (cr[w].1, cr[(w + 1) % cr.len()].1);
                let want = if descending { (a + r - 1) % r } else { (a + 1) % r };
                if r > 1 && b != want {
                    return Err(derr(format!("path {} meets the family out of cyclic order", j + 1)));
                }
            }
        }
    }
    let x_subpaths = split_subpaths(&paths, &x_paths, &member_of, r - 1, r, &req.anchors)?;
    let y_subpaths = split_subpaths(&paths, &y_paths, &member_of, 0, r, &req.anchors)?;
    let subs = match req.side {
        Side::Zig => &x_subpaths,
        Side::Zag => &y_subpaths,
    };
    if subs.len() != n {
        return Err(derr(format!("expected {n} sub-zigzags, found {}", subs.len())));
    }
    let params: Vec<BTreeSet<usize>> = match &req.assignment {
        Assignment::Auto => {
            let mut p = vec![BTreeSet::new(); r];
            for (k, s) in subs.iter().enumerate() {
                p[k % r].insert(s.crossings[k % r]);
            }
            p
        }
        Assignment::BySubzigzag(a) => {
            if a.len() != subs.len() || a.iter().any(|&i| i >= r) {
                return Err(derr("assignment must name a family member for every sub-zigzag"));
            }
            let mut p = vec![BTreeSet::new(); r];
            for (s, &i) in subs.iter().zip(a) {
                p[i].insert(s.crossings[i]);
            }
            p
        }
        Assignment::Sets(sets) => {
            if sets.len() != r {
                return Err(derr("one parameter set per family member is required"));
            }
            let names = m.edge_name_map();
            let mut p = vec![BTreeSet::new(); r];
            for (i, set) in sets.iter().enumerate() {
                for name in set {
                    let e = *names.get(name).ok_or_else(|| derr(format!("unknown edge {name}")))?;
                    p[i].insert(e);
                }
            }
            for (i, set) in p.iter().enumerate() {
                let own: BTreeSet<usize> = subs.iter().map(|s| s.crossings[i]).collect();
                if let Some(e) = set.iter().find(|e| !own.contains(e)) {
                    return Err(derr(format!("edge {} is not a crossing of z_{}", m.edge_name(*e), i + 1)));
                }
            }
            for s in subs {
                let hits = (0..r).filter(|&i| p[i].contains(&s.crossings[i])).count();
                if hits != 1 {
                    return Err(derr(format!(
                        "sub-zigzag {} of path {} is assigned {hits} times",
                        s.index + 1,
                        s.path + 1
                    )));
                }
            }
            p
        }
    };
    if let Some(i) = params.iter().position(|s| s.is_empty()) {
        return Err(derr(format!("parameter set of z_{} is empty", i + 1)));
    }
    let weights: Vec<usize> = params.iter().map(|s| s.len() - 1).collect();
    debug_assert_eq!(weights.iter().sum::<usize>(), n - r);
    Ok(DeformationData {
        z,
        v,
        n,
        r,
        h: n - r,
        family,
        x_paths,
        y_paths,
        x_subpaths,
        y_subpaths,
        side: req.side,
        params,
        weights,
        paths,
    })
}

/// Edge removals used to restore consistency.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum RemovalSchedule {
    /// Always take the least candidate pair.
    #[default]
    Auto,
    /// Pairs of edge names, consumed in order.
    Explicit(Vec<(String, String)>),
}

/// Pipeline switches.
#[derive(Clone, Debug, Default)]
pub struct DeformOptions {
    pub schedule: RemovalSchedule,
    /// Skip bypasses and restoration when `r = 1` or the model is hexagonal or square.
    pub shortcut: bool,
}

/// One restoration step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RestorationStep {
    /// Edges on self-intersecting lifts, with removed contractible components' edges.
    SelfIntersection { edges: Vec<String>, component_edges: Vec<String> },
    /// A consecutive pair of same-direction intersections.
    Pair { edges: (String, String) },
}

/// Output of a deformation run.
#[derive(Clone, Debug)]
pub struct DeformationOutcome {
    /// After the surgery, before any reduction.
    pub surgery: DimerModel,
    /// The surgery output reduced; restoration starts here.
    pub pre_restoration: DimerModel,
    pub steps: Vec<RestorationStep>,
    /// Consistent, reduced result.
    pub result: DimerModel,
    /// Edge names of the new paths, per family member and chain level.
    pub new_paths: Vec<Vec<Vec<String>>>,
    pub shortcut_used: bool,
}

struct Names {
    used: BTreeSet<String>,
}

impl Names {
    fn new(m: &DimerModel) -> Names {
        let mut used = BTreeSet::new();
        used.extend(m.nodes().iter().map(|n| n.name.clone()));
        used.extend(m.edges().iter().map(|e| e.name.clone()));
        Names { used }
    }

    /// `want`, primed until unused.
    fn take(&mut self, want: String) -> String {
        let mut cand = want;
        while self.used.contains(&cand) {
            cand.push('\'');
        }
        self.used.insert(cand.clone());
        cand
    }
}

fn interpolate(a: Option<(Rat, Rat)>, b: Option<(Rat, Rat)>, off: LatticeVector, t: Rat) -> Option<(Rat, Rat)> {
    let (a, b) = (a?, b?);
    let bx = b.0 + Rat::from_integer(off.x);
    let by = b.1 + Rat::from_integer(off.y);
    Some((a.0 + (bx - a.0) * t, a.1 + (by - a.1) * t))
}

/// Steps one to four of the zig side on `m` for the given family paths and
/// parameter sets. Returns the model and the new paths as edge-name lists.
fn zig_surgery(
    m: &DimerModel,
    family: &[ZigzagPath],
    params: &[BTreeSet<usize>],
    bypasses: bool,
) -> Result<(DimerModel, Vec<Vec<Vec<String>>>)> {
    let mut names = Names::new(m);
    let (mut nodes, mut edges, mut rotation) = m.clone().into_parts();
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    // (white node, edge id) lists of new path edges per family member and level
    let mut new_path_edges: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut shifts: Vec<(usize, LatticeVector)> = Vec::new();
    for (z, x) in family.iter().zip(params) {
        let n = z.len() / 2;
        let p = x.len() - 1;
        let zig: Vec<usize> = (0..n).map(|k| z.darts[2 * k].edge).collect();
        let zag: Vec<usize> = (0..n).map(|k| z.darts[2 * k + 1].edge).collect();
        let bnode: Vec<usize> = zig.iter().map(|&e| edges[e].black).collect();
        let wnode: Vec<usize> = zig.iter().map(|&e| edges[e].white).collect();
        for k in 0..n {
            if edges[zag[k]].white != wnode[k] || edges[zag[k]].black != bnode[(k + 1) % n] {
                return Err(derr("family path is not a zigzag path of the model"));
            }
        }
        let zig_name: Vec<String> = zig.iter().map(|&e| edges[e].name.clone()).collect();
        let zag_name: Vec<String> = zag.iter().map(|&e| edges[e].name.clone()).collect();
        let om_zig: Vec<LatticeVector> = zig.iter().map(|&e| edges[e].offset).collect();
        let om_zag: Vec<LatticeVector> = zag.iter().map(|&e| edges[e].offset).collect();
        // inserted nodes, 1-based levels
        let mut wn = vec![vec![usize::MAX; p + 2]; n];
        let mut bn = vec![vec![usize::MAX; p + 1]; n];
        for k in 0..n {
            bn[k][0] = bnode[k];
            wn[k][p + 1] = wnode[k];
            let denom = (2 * p + 1) as i64;
            for j in 1..=p {
                let name = names.take(format!("{}w{j}", zig_name[k]));
                let pos = interpolate(nodes[bnode[k]].pos, nodes[wnode[k]].pos, om_zig[k], Rat::new(2 * j as i64 - 1, denom));
                wn[k][j] = nodes.len();
                nodes.push(Node { name, color: Color::White, pos });
                rotation.push(Vec::new());
                let name = names.take(format!("{}b{j}", zig_name[k]));
                let pos = interpolate(nodes[bnode[k]].pos, nodes[wnode[k]].pos, om_zig[k], Rat::new(2 * j as i64, denom));
                bn[k][j] = nodes.len();
                nodes.push(Node { name, color: Color::Black, pos });
                rotation.push(Vec::new());
            }
        }
        let add_edge = |edges: &mut Vec<Edge>, names: &mut Names, tag: String, black: usize, white: usize, off: LatticeVector| {
            edges.push(Edge { name: names.take(tag), black, white, offset: off });
            edges.len() - 1
        };
        // up[k][j]: B_{j-1} -> W_j for j in 1..=p+1; the last reuses the zig
        let mut up = vec![vec![usize::MAX; p + 2]; n];
        let mut mid = vec![vec![usize::MAX; p + 1]; n];
        let mut conn = vec![vec![usize::MAX; p + 1]; n];
        let mut bypass = vec![vec![usize::MAX; p + 2]; n];
        for k in 0..n {
            for j in 1..=p {
                up[k][j] = add_edge(&mut edges, &mut names, format!("u{j}:{}", zig_name[k]), bn[k][j - 1], wn[k][j], LatticeVector::ZERO);
                mid[k][j] = add_edge(&mut edges, &mut names, format!("m{j}:{}", zig_name[k]), bn[k][j], wn[k][j], LatticeVector::ZERO);
            }
            up[k][p + 1] = zig[k];
            edges[zig[k]].black = bn[k][p];
        }
        for k in 0..n {
            let k1 = (k + 1) % n;
            // lift of b_{k+1} seen from b_k
            let step = om_zig[k] - om_zag[k];
            for j in 1..=p {
                conn[k][j] = add_edge(&mut edges, &mut names, format!("c{j}:{}", zag_name[k]), bn[k1][j], wn[k][j], -step);
            }
            if bypasses && !x.contains(&zag[k]) {
                for j in 1..=p {
                    bypass[k][j] = add_edge(&mut edges, &mut names, format!("y{j}:{}", zag_name[k]), bn[k1][j - 1], wn[k][j], -step);
                }
                bypass[k][p + 1] = zag[k];
                edges[zag[k]].black = bn[k1][p];
            } else {
                removed.insert(zag[k]);
            }
        }
        let has = |e: usize| e != usize::MAX;
        for k in 0..n {
            let km = (k + n - 1) % n;
            for j in 1..=p {
                let mut r = Vec::new();
                if has(bypass[k][j]) {
                    r.push(bypass[k][j]);
                }
                r.extend([conn[k][j], mid[k][j], up[k][j]]);
                rotation[wn[k][j]] = r;
                let mut r = vec![up[k][j + 1]];
                if has(bypass[km][j + 1]) {
                    r.push(bypass[km][j + 1]);
                }
                r.extend([conn[km][j], mid[k][j]]);
                rotation[bn[k][j]] = r;
            }
            // endpoints: the chain takes the zig slot, the bypass the zag slot
            let b = bnode[k];
            let mut r = Vec::new();
            for &e in &rotation[b] {
                if e == zig[k] {
                    r.push(up[k][1]);
                } else if e == zag[km] {
                    if has(bypass[km][1]) {
                        r.push(bypass[km][1]);
                    }
                } else {
                    r.push(e);
                }
            }
            rotation[b] = r;
            let w = wnode[k];
            if !has(bypass[k][p + 1]) {
                rotation[w].retain(|&e| e != zag[k]);
            }
        }
        // canonical lifts of the inserted nodes inside the unit square
        for k in 0..n {
            for j in 1..=p {
                for v in [wn[k][j], bn[k][j]] {
                    if let Some((px, py)) = nodes[v].pos {
                        let s = LatticeVector { x: px.floor().to_integer(), y: py.floor().to_integer() };
                        if !s.is_zero() {
                            nodes[v].pos = Some((px - Rat::from_integer(s.x), py - Rat::from_integer(s.y)));
                            shifts.push((v, s));
                        }
                    }
                }
            }
        }
        new_path_edges.push(
            (1..=p)
                .map(|j| {
                    (0..n)
                        .flat_map(|t| {
                            let k = (n - t) % n;
                            [mid[k][j], conn[(k + n - 1) % n][j]]
                        })
                        .collect()
                })
                .collect(),
        );
    }
    for (v, s) in shifts {
        for e in edges.iter_mut() {
            if e.white == v {
                e.offset += s;
            }
            if e.black == v {
                e.offset -= s;
            }
        }
    }
    let keep_node = vec![true; nodes.len()];
    let edge_names: Vec<String> = edges.iter().map(|e| e.name.clone()).collect();
    let out = crate::dimer::assemble(nodes, edges, rotation, &keep_node, &|e| !removed.contains(&e))?;
    let new_paths: Vec<Vec<Vec<String>>> = new_path_edges
        .iter()
        .map(|lv| lv.iter().map(|es| es.iter().map(|&e| edge_names[e].clone()).collect()).collect())
        .collect();
    check_new_paths(&out, &new_paths)?;
    Ok((out, new_paths))
}

/// The new cycles must be zigzag paths of the surgery output.
fn check_new_paths(m: &DimerModel, new_paths: &[Vec<Vec<String>>]) -> Result<()> {
    let names = m.edge_name_map();
    for levels in new_paths {
        for es in levels {
            let ids: Vec<usize> = es.iter().map(|s| names[s]).collect();
            let mut d = m.dart_from(m.edges()[ids[0]].white, ids[0]);
            for &id in &ids {
                if d.edge != id {
                    return Err(derr("inserted chain does not form a zigzag path"));
                }
                d = m.zigzag_next(d);
            }
            if d.edge != ids[0] {
                return Err(derr("inserted chain does not close up"));
            }
        }
    }
    Ok(())
}

/// Triangle or parallelogram polygon, read off the zigzag slopes.
pub fn is_hexagonal_or_square(m: &DimerModel) -> bool {
    let paths = zigzag_paths(m);
    let Ok(s) = SlopeMultiset::from_entries(paths.iter().map(|z| z.slope)) else {
        return false;
    };
    let Ok(p) = crate::lattice::polygon_from_slopes(&s, LatticeVector::ZERO) else {
        return false;
    };
    let v = p.vertices();
    v.len() == 3 || (v.len() == 4 && v[0] + v[2] == v[1] + v[3])
}

fn edges_named(m: &DimerModel, es: &BTreeSet<usize>) -> Vec<String> {
    es.iter().map(|&e| m.edge_name(e).to_string()).collect()
}

/// Components whose cycles are all homologically trivial.
fn contractible_component_edges(m: &DimerModel) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for comp in m.components() {
        let mut keep = vec![false; m.num_nodes()];
        for &v in &comp {
            keep[v] = true;
        }
        let sub = m.restrict(&keep, &|_| true);
        if sub.homology_rank() == 0 {
            for &v in &comp {
                out.extend(m.rotation(v).iter().copied());
            }
        }
    }
    out
}

/// Nodes of contractible components that carry no edges at all.
fn drop_isolated(m: &DimerModel) -> DimerModel {
    m.remove_edges(&BTreeSet::new())
}

/// Same-direction intersection pairs, as unordered edge-index pairs.
pub fn removable_pairs(m: &DimerModel) -> BTreeSet<(usize, usize)> {
    let paths = zigzag_paths(m);
    let mut out = BTreeSet::new();
    for (_, t) in pair_tables(m, &paths, Default::default()) {
        for (a, b) in t.same_direction_pairs() {
            let (ea, eb) = (t.occurrences[a].edge, t.occurrences[b].edge);
            out.insert((ea.min(eb), ea.max(eb)));
        }
    }
    out
}

/// Edges visited twice by one path.
pub fn self_intersection_edges(m: &DimerModel) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for z in zigzag_paths(m) {
        for o in lift_table(m, &z, &z).occurrences {
            out.insert(o.edge);
        }
    }
    out
}

/// Removes edges until the model is consistent.
pub fn restore_consistency(m: &DimerModel, schedule: &RemovalSchedule) -> Result<(DimerModel, Vec<RestorationStep>)> {
    let mut cur = drop_isolated(m);
    let mut steps = Vec::new();
    let mut queue: std::collections::VecDeque<(String, String)> = match schedule {
        RemovalSchedule::Auto => Default::default(),
        RemovalSchedule::Explicit(v) => v.iter().cloned().collect(),
    };
    let cap = 4 * m.num_edges().max(1);
    for _ in 0..cap {
        let selfs = self_intersection_edges(&cur);
        if !selfs.is_empty() {
            // a scheduled pair lying on the self-intersection is consumed by this step
            if let Some((sa, sb)) = queue.front() {
                let names = cur.edge_name_map();
                if [sa, sb].iter().all(|n| names.get(*n).is_some_and(|e| selfs.contains(e))) {
                    queue.pop_front();
                }
            }
            let mut next = cur.remove_edges(&selfs);
            let comp = contractible_component_edges(&next);
            let comp_names = edges_named(&next, &comp);
            next = next.remove_edges(&comp);
            steps.push(RestorationStep::SelfIntersection { edges: edges_named(&cur, &selfs), component_edges: comp_names });
            cur = next;
            continue;
        }
        let comp = contractible_component_edges(&cur);
        if !comp.is_empty() && comp.len() < cur.num_edges() {
            steps.push(RestorationStep::SelfIntersection { edges: Vec::new(), component_edges: edges_named(&cur, &comp) });
            cur = cur.remove_edges(&comp);
            continue;
        }
        let pairs = removable_pairs(&cur);
        if pairs.is_empty() {
            if !is_consistent(&cur) {
                return Err(Error::Restoration("no removable intersection left but the model is not consistent".into()));
            }
            if !queue.is_empty() {
                return Err(Error::Restoration(format!("{} scheduled removals left over", queue.len())));
            }
            return Ok((cur, steps));
        }
        let (a, b) = match schedule {
            RemovalSchedule::Auto => *pairs.iter().next().unwrap(),
            RemovalSchedule::Explicit(_) => {
                let (sa, sb) = queue.pop_front().ok_or_else(|| Error::Restoration("schedule exhausted".into()))?;
                let names = cur.edge_name_map();
                let (Some(&a), Some(&b)) = (names.get(&sa), names.get(&sb)) else {
                    return Err(Error::Restoration(format!("scheduled pair ({sa}, {sb}) names a missing edge")));
                };
                let key = (a.min(b), a.max(b));
                if !pairs.contains(&key) {
                    return Err(Error::Restoration(format!("({sa}, {sb}) is not a removable intersection pair")));
                }
                key
            }
        };
        steps.push(RestorationStep::Pair { edges: (cur.edge_name(a).to_string(), cur.edge_name(b).to_string()) });
        cur = cur.remove_edges(&BTreeSet::from([a, b]));
    }
    Err(Error::Restoration("iteration cap exceeded".into()))
}

/// Zigzag paths of `target` whose edge sequences match the given paths of `source`.
fn transfer_paths(source: &DimerModel, paths: &[ZigzagPath], target: &DimerModel) -> Result<Vec<ZigzagPath>> {
    let tp = zigzag_paths(target);
    paths
        .iter()
        .map(|z| {
            let want: BTreeSet<usize> = z.edges().into_iter().collect();
            tp.iter()
                .find(|w| w.len() == z.len() && w.edges().into_iter().collect::<BTreeSet<_>>() == want)
                .cloned()
                .ok_or_else(|| derr(format!("path through {} lost under mirroring", source.edge_name(z.darts[0].edge))))
        })
        .collect()
}

/// Runs the full pipeline for the side recorded in `data`.
pub fn deform(m: &DimerModel, data: &DeformationData, opts: &DeformOptions) -> Result<DeformationOutcome> {
    let shortcut = opts.shortcut && (data.r == 1 || is_hexagonal_or_square(m));
    let family: Vec<ZigzagPath> = data.family.iter().map(|&k| data.paths[k].clone()).collect();
    let (surgery, new_paths) = match data.side {
        Side::Zig => zig_surgery(m, &family, &data.params, !shortcut)?,
        Side::Zag => {
            let t = m.mirror_swap();
            let tf = transfer_paths(m, &family, &t)?;
            let (s, np) = zig_surgery(&t, &tf, &data.params, !shortcut)?;
            (s.mirror_swap(), np)
        }
    };
    let pre = reduce(&surgery)?;
    let (restored, steps) = if shortcut {
        (pre.clone(), Vec::new())
    } else {
        restore_consistency(&pre, &opts.schedule)?
    };
    let result = reduce(&restored)?;
    Ok(DeformationOutcome { surgery, pre_restoration: pre, steps, result, new_paths, shortcut_used: shortcut })
}

/// Zig deformation of `m` with the given data (whose side must be `Zig`).
pub fn deform_zig(m: &DimerModel, data: &DeformationData, opts: &DeformOptions) -> Result<DeformationOutcome> {
    if data.side != Side::Zig {
        return Err(derr("data were built for the zag side"));
    }
    deform(m, data, opts)
}

pub fn deform_zag(m: &DimerModel, data: &DeformationData, opts: &DeformOptions) -> Result<DeformationOutcome> {
    if data.side != Side::Zag {
        return Err(derr("data were built for the zig side"));
    }
    deform(m, data, opts)
}

/// Predicted against observed slope of one path.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeLine {
    pub path: usize,
    pub role: String,
    pub before: LatticeVector,
    pub crossings: usize,
    pub pairing: i64,
    pub predicted: LatticeVector,
}

/// Comparison of the slope transformation laws with a deformation result.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeReport {
    /// h(P'_z, P_z) for the boundary matchings of `z`.
    pub h: LatticeVector,
    pub lines: Vec<SlopeLine>,
    pub predicted: Vec<(LatticeVector, usize)>,
    pub observed: Vec<(LatticeVector, usize)>,
    /// The predicted slopes are the edge normals of the observed polygon.
    pub ok: bool,
}

/// Checks the slope laws: new paths have slope `-v`, crossing paths on the
/// active side move by their crossing count times `v`, the rest are unchanged.
pub fn slope_transform_report(m: &DimerModel, data: &DeformationData, deformed: &DimerModel) -> Result<SlopeReport> {
    let z = &data.paths[data.z];
    let (pz, pz2) = boundary_matchings_for(m, z)?;
    let h = height_change(m, &pz2, &pz);
    let active: BTreeMap<usize, usize> = match data.side {
        Side::Zig => data.x_paths.iter().copied().collect(),
        Side::Zag => data.y_paths.iter().copied().collect(),
    };
    let mut lines = Vec::new();
    let mut pred = SlopeMultiset::new();
    for (k, w) in data.paths.iter().enumerate() {
        if data.family.contains(&k) {
            continue;
        }
        let (role, c) = match active.get(&k) {
            Some(&c) => ("crossing", c),
            None => ("unchanged", 0),
        };
        let predicted = w.slope + (c as i64) * data.v;
        lines.push(SlopeLine {
            path: k,
            role: role.to_string(),
            before: w.slope,
            crossings: crossing_count(z, w),
            pairing: w.slope.dot(h),
            predicted,
        });
        pred.add(predicted, 1)?;
    }
    pred.add(-data.v, data.h)?;
    let mut obs = SlopeMultiset::new();
    for w in zigzag_paths(deformed) {
        obs.add(w.slope, 1)?;
    }
    let ok = pred == obs;
    Ok(SlopeReport { h, lines, predicted: pred.entries(), observed: obs.entries(), ok })
}

/// Polygon predicted by the slope laws, anchored like `polygon_from_slopes`.
pub fn predicted_polygon(report: &SlopeReport) -> Result<LatticePolygon> {
    let mut s = SlopeMultiset::new();
    for &(v, c) in &report.predicted {
        s.add(v, c)?;
    }
    crate::lattice::polygon_from_slopes(&s, LatticeVector::ZERO)
}

/// Edge normals of a polygon, for comparison with observed slopes.
pub fn polygon_slopes(p: &LatticePolygon) -> Result<SlopeMultiset> {
    edge_normals(p)
}

/// Dart of `m` leaving `v` along the edge named `name`.
pub fn dart_named(m: &DimerModel, v: usize, name: &str) -> Option<Dart> {
    m.edge_index(name).map(|e| m.dart_from(v, e))
}
