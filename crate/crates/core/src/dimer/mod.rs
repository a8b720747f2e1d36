//! Dimer models on the torus as rotation systems with homology offsets.
//!
//! A model is a bipartite graph whose embedding is encoded by the
//! counterclockwise edge order at every node together with an offset per
//! edge: the translation of the white endpoint's lift relative to the black
//! endpoint's lift, in units of the fundamental domain.
//!
//! Faces are traced with the face on the left of every boundary dart, so a
//! face boundary runs counterclockwise around the face.

mod cover;
mod iso;
mod moves;

pub use cover::periodic_cover;
pub use iso::{find_isomorphism, isomorphic, Isomorphism};
pub use moves::{join_move, reduce, split_move};

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{lv, LatticeVector, Mat2, Rat};

/// Node colour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Black => "black",
            Color::White => "white",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub color: Color,
    /// Rendering position in the unit square; never used by combinatorial code.
    pub pos: Option<(Rat, Rat)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub black: usize,
    pub white: usize,
    /// White lift minus black lift.
    pub offset: LatticeVector,
}

/// Traversal direction of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Dir {
    BlackToWhite,
    WhiteToBlack,
}

/// A directed edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Dart {
    pub edge: usize,
    pub dir: Dir,
}

impl Dart {
    pub fn bw(edge: usize) -> Dart {
        Dart { edge, dir: Dir::BlackToWhite }
    }

    pub fn wb(edge: usize) -> Dart {
        Dart { edge, dir: Dir::WhiteToBlack }
    }

    pub fn reversed(self) -> Dart {
        Dart {
            edge: self.edge,
            dir: match self.dir {
                Dir::BlackToWhite => Dir::WhiteToBlack,
                Dir::WhiteToBlack => Dir::BlackToWhite,
            },
        }
    }

    /// Dense index in 0..2|E|.
    pub fn index(self) -> usize {
        2 * self.edge + usize::from(self.dir == Dir::WhiteToBlack)
    }

    pub fn from_index(i: usize) -> Dart {
        if i.is_multiple_of(2) {
            Dart::bw(i / 2)
        } else {
            Dart::wb(i / 2)
        }
    }
}

/// A face as the cyclic list of its boundary darts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub boundary: Vec<Dart>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }
}

/// A bipartite graph on the torus given as a rotation system with offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimerModel {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    rotation: Vec<Vec<usize>>,
    /// For each edge, its index in the black and in the white rotation list.
    slot: Vec<[usize; 2]>,
}

impl DimerModel {
    /// Builds a model, checking the structural invariants: unique names, edges
    /// joining a black to a white node, and rotation lists that list every
    /// incident edge exactly once. Rotation lists are stored starting at their
    /// least edge index.
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>, rotation: Vec<Vec<usize>>) -> Result<DimerModel> {
        if rotation.len() != nodes.len() {
            return Err(Error::InvalidModel("one rotation list per node required".into()));
        }
        let mut names = BTreeSet::new();
        for n in &nodes {
            if !names.insert(n.name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate node id {}", n.name)));
            }
        }
        let mut enames = BTreeSet::new();
        for e in &edges {
            if !enames.insert(e.name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate edge id {}", e.name)));
            }
            if e.black >= nodes.len() || e.white >= nodes.len() {
                return Err(Error::InvalidModel(format!("edge {} has a dangling endpoint", e.name)));
            }
            if nodes[e.black].color != Color::Black || nodes[e.white].color != Color::White {
                return Err(Error::InvalidModel(format!("edge {} does not join a black node to a white node", e.name)));
            }
        }
        let mut slot = vec![[usize::MAX; 2]; edges.len()];
        let mut rotation = rotation;
        for (v, rot) in rotation.iter_mut().enumerate() {
            if let Some(min_pos) = rot.iter().enumerate().min_by_key(|(_, &e)| e).map(|(i, _)| i) {
                rot.rotate_left(min_pos);
            }
            let side = usize::from(nodes[v].color == Color::White);
            for (i, &e) in rot.iter().enumerate() {
                if e >= edges.len() {
                    return Err(Error::InvalidModel(format!("rotation of {} names an unknown edge", nodes[v].name)));
                }
                let end = if side == 0 { edges[e].black } else { edges[e].white };
                if end != v {
                    return Err(Error::InvalidModel(format!(
                        "rotation of {} lists edge {} which is not incident",
                        nodes[v].name, edges[e].name
                    )));
                }
                if slot[e][side] != usize::MAX {
                    return Err(Error::InvalidModel(format!(
                        "rotation of {} lists edge {} twice",
                        nodes[v].name, edges[e].name
                    )));
                }
                slot[e][side] = i;
            }
        }
        for (e, s) in slot.iter().enumerate() {
            if s[0] == usize::MAX || s[1] == usize::MAX {
                return Err(Error::InvalidModel(format!("edge {} missing from a rotation list", edges[e].name)));
            }
        }
        Ok(DimerModel { nodes, edges, rotation, slot })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    pub fn color(&self, v: usize) -> Color {
        self.nodes[v].color
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn node_name(&self, v: usize) -> &str {
        &self.nodes[v].name
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edges[e].name
    }

    pub fn black_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].color == Color::Black)
    }

    pub fn white_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].color == Color::White)
    }

    /// The endpoint of `e` at the opposite side from `v`.
    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let ed = &self.edges[e];
        if ed.black == v {
            ed.white
        } else {
            ed.black
        }
    }

    pub fn tail(&self, d: Dart) -> usize {
        match d.dir {
            Dir::BlackToWhite => self.edges[d.edge].black,
            Dir::WhiteToBlack => self.edges[d.edge].white,
        }
    }

    pub fn head(&self, d: Dart) -> usize {
        match d.dir {
            Dir::BlackToWhite => self.edges[d.edge].white,
            Dir::WhiteToBlack => self.edges[d.edge].black,
        }
    }

    /// Lift displacement from tail to head.
    pub fn displacement(&self, d: Dart) -> LatticeVector {
        match d.dir {
            Dir::BlackToWhite => self.edges[d.edge].offset,
            Dir::WhiteToBlack => -self.edges[d.edge].offset,
        }
    }

    /// Dart leaving `v` along `e`.
    pub fn dart_from(&self, v: usize, e: usize) -> Dart {
        if self.edges[e].black == v {
            Dart::bw(e)
        } else {
            Dart::wb(e)
        }
    }

    fn slot_of(&self, v: usize, e: usize) -> usize {
        self.slot[e][usize::from(self.nodes[v].color == Color::White)]
    }

    /// Next edge counterclockwise after `e` around `v`.
    pub fn succ(&self, v: usize, e: usize) -> usize {
        let r = &self.rotation[v];
        r[(self.slot_of(v, e) + 1) % r.len()]
    }

    /// Previous edge counterclockwise before `e` around `v`.
    pub fn pred(&self, v: usize, e: usize) -> usize {
        let r = &self.rotation[v];
        r[(self.slot_of(v, e) + r.len() - 1) % r.len()]
    }

    /// Zigzag successor: sharpest right at white nodes, sharpest left at black nodes.
    pub fn zigzag_next(&self, d: Dart) -> Dart {
        let h = self.head(d);
        let e = match self.nodes[h].color {
            Color::White => self.succ(h, d.edge),
            Color::Black => self.pred(h, d.edge),
        };
        self.dart_from(h, e)
    }

    /// Face successor, keeping the face on the left.
    pub fn face_next(&self, d: Dart) -> Dart {
        let h = self.head(d);
        self.dart_from(h, self.pred(h, d.edge))
    }

    /// All faces, in order of their least dart index.
    pub fn faces(&self) -> Vec<Face> {
        let nd = 2 * self.edges.len();
        let mut seen = vec![false; nd];
        let mut out = Vec::new();
        for start in 0..nd {
            if seen[start] {
                continue;
            }
            let mut boundary = Vec::new();
            let mut d = Dart::from_index(start);
            while !seen[d.index()] {
                seen[d.index()] = true;
                boundary.push(d);
                d = self.face_next(d);
            }
            out.push(Face { boundary });
        }
        out
    }

    /// Index of the face containing each dart.
    pub fn face_of_darts(&self, faces: &[Face]) -> Vec<usize> {
        let mut out = vec![usize::MAX; 2 * self.edges.len()];
        for (i, f) in faces.iter().enumerate() {
            for d in &f.boundary {
                out[d.index()] = i;
            }
        }
        out
    }

    /// Signed offset sum around a closed dart sequence.
    pub fn cycle_sum(&self, darts: &[Dart]) -> LatticeVector {
        darts.iter().fold(LatticeVector::ZERO, |acc, &d| acc + self.displacement(d))
    }

    /// Connected components as sorted node lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.nodes.len()];
        let mut out = Vec::new();
        for s in 0..self.nodes.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &e in &self.rotation[v] {
                    let u = self.other_end(e, v);
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        members.push(u);
                        q.push_back(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Lifts of the nodes of the component of `root` along a BFS spanning tree,
    /// together with the tree edges. Nodes outside the component get None.
    pub fn tree_lifts(&self, root: usize) -> (Vec<Option<LatticeVector>>, BTreeSet<usize>) {
        let mut lift = vec![None; self.nodes.len()];
        let mut tree = BTreeSet::new();
        lift[root] = Some(LatticeVector::ZERO);
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for &e in &self.rotation[v] {
                let d = self.dart_from(v, e);
                let u = self.head(d);
                if lift[u].is_none() {
                    lift[u] = Some(lift[v].unwrap() + self.displacement(d));
                    tree.insert(e);
                    q.push_back(u);
                }
            }
        }
        (lift, tree)
    }

    /// Homology classes of the fundamental cycles of a spanning forest, one per non-tree edge.
    pub fn cycle_classes(&self) -> Vec<(usize, LatticeVector)> {
        let mut lift: Vec<Option<LatticeVector>> = vec![None; self.nodes.len()];
        let mut tree = BTreeSet::new();
        for root in 0..self.nodes.len() {
            if lift[root].is_some() {
                continue;
            }
            let (l, t) = self.tree_lifts(root);
            for (v, x) in l.into_iter().enumerate() {
                if x.is_some() {
                    lift[v] = x;
                }
            }
            tree.extend(t);
        }
        (0..self.edges.len())
            .filter(|e| !tree.contains(e))
            .map(|e| {
                let ed = &self.edges[e];
                (e, ed.offset - (lift[ed.white].unwrap() - lift[ed.black].unwrap()))
            })
            .collect()
    }

    /// Rank of the image of the cycle space in H1 of the torus.
    pub fn homology_rank(&self) -> usize {
        let classes: Vec<LatticeVector> = self.cycle_classes().into_iter().map(|(_, c)| c).filter(|c| !c.is_zero()).collect();
        match classes.first() {
            None => 0,
            Some(&a) => {
                if classes.iter().any(|&b| a.cross(b) != 0) {
                    2
                } else {
                    1
                }
            }
        }
    }

    /// Structural and topological checks.
    pub fn validate(&self) -> ValidationReport {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        for (v, n) in self.nodes.iter().enumerate() {
            match self.degree(v) {
                0 => errors.push(format!("node {} is isolated", n.name)),
                1 => warnings.push(format!("node {} has degree 1", n.name)),
                _ => {}
            }
        }
        let faces = self.faces();
        let euler = self.nodes.len() as i64 - self.edges.len() as i64 + faces.len() as i64;
        if euler != 0 {
            errors.push(format!("Euler characteristic is {euler}, expected 0"));
        }
        for (i, f) in faces.iter().enumerate() {
            let s = self.cycle_sum(&f.boundary);
            if !s.is_zero() {
                errors.push(format!("face {i} is not contractible (offset sum {s})"));
            }
        }
        if self.components().len() != 1 {
            errors.push("graph is not connected".into());
        }
        if self.homology_rank() != 2 {
            errors.push("cycles do not span the homology of the torus".into());
        }
        if self.black_nodes().count() != self.white_nodes().count() {
            warnings.push("black and white node counts differ".into());
        }
        ValidationReport { ok: errors.is_empty(), errors, warnings, num_faces: faces.len(), euler }
    }

    /// Validate and turn a failed report into an error.
    pub fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(r.errors.join("; ")))
        }
    }

    /// Shift the lift of `v` by `delta`. Observable quantities are unchanged.
    pub fn retranslate(&self, v: usize, delta: LatticeVector) -> DimerModel {
        let mut m = self.clone();
        for e in m.edges.iter_mut() {
            if e.white == v {
                e.offset += delta;
            }
            if e.black == v {
                e.offset -= delta;
            }
        }
        m
    }

    /// Apply a unimodular change of basis to all offsets; orientation-reversing
    /// maps also reverse every rotation list.
    pub fn transform_offsets(&self, mat: Mat2) -> DimerModel {
        assert!(mat.is_unimodular(), "offset transform must be unimodular");
        let edges = self.edges.iter().map(|e| Edge { offset: mat.apply(e.offset), ..e.clone() }).collect();
        let rotation = if mat.det() < 0 {
            self.rotation.iter().map(|r| r.iter().rev().copied().collect()).collect()
        } else {
            self.rotation.clone()
        };
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node { pos: None, ..n.clone() })
            .collect();
        DimerModel::new(nodes, edges, rotation).expect("transform keeps structure")
    }

    /// Mirror in the x-axis combined with a colour swap. Zigzag paths keep their
    /// edge sequence and direction; zigs and zags trade places and slopes are
    /// reflected by (x,y) -> (x,-y). The map is an involution and keeps ids.
    pub fn mirror_swap(&self) -> DimerModel {
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                name: n.name.clone(),
                color: n.color.opposite(),
                pos: n.pos.map(|(x, y)| (x, mirror_coord(y))),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                name: e.name.clone(),
                black: e.white,
                white: e.black,
                offset: lv(-e.offset.x, e.offset.y),
            })
            .collect();
        let rotation = self.rotation.iter().map(|r| r.iter().rev().copied().collect()).collect();
        DimerModel::new(nodes, edges, rotation).expect("mirror keeps structure")
    }

    /// The same model with nodes and edges stored in a different order:
    /// `node_order[i]` and `edge_order[j]` are the old ids of the new node `i`
    /// and new edge `j`. Names, offsets and rotations travel with their items.
    pub fn permuted(&self, node_order: &[usize], edge_order: &[usize]) -> DimerModel {
        let mut new_node = vec![0; self.nodes.len()];
        for (i, &old) in node_order.iter().enumerate() {
            new_node[old] = i;
        }
        let mut new_edge = vec![0; self.edges.len()];
        for (j, &old) in edge_order.iter().enumerate() {
            new_edge[old] = j;
        }
        let nodes = node_order.iter().map(|&v| self.nodes[v].clone()).collect();
        let edges = edge_order
            .iter()
            .map(|&e| {
                let ed = &self.edges[e];
                Edge { black: new_node[ed.black], white: new_node[ed.white], ..ed.clone() }
            })
            .collect();
        let rotation = node_order.iter().map(|&v| self.rotation[v].iter().map(|&e| new_edge[e]).collect()).collect();
        DimerModel::new(nodes, edges, rotation).expect("permutation keeps structure")
    }

    /// Node-colour multiset signature used to prune isomorphism searches.
    pub fn degree_signature(&self) -> BTreeMap<(Color, usize), usize> {
        let mut s = BTreeMap::new();
        for v in 0..self.nodes.len() {
            *s.entry((self.nodes[v].color, self.degree(v))).or_insert(0) += 1;
        }
        s
    }

    /// Fresh node name with the conventional prefix.
    pub fn fresh_node_name(&self, color: Color) -> String {
        let prefix = match color {
            Color::Black => "B",
            Color::White => "W",
        };
        fresh_name(prefix, self.nodes.iter().map(|n| n.name.as_str()))
    }

    pub fn fresh_edge_name(&self) -> String {
        fresh_name("e", self.edges.iter().map(|e| e.name.as_str()))
    }

    /// Decompose into raw parts.
    pub fn into_parts(self) -> (Vec<Node>, Vec<Edge>, Vec<Vec<usize>>) {
        (self.nodes, self.edges, self.rotation)
    }

    /// Deletes the given edges, then every node left without edges.
    pub fn remove_edges(&self, remove: &BTreeSet<usize>) -> DimerModel {
        let mut keep_node = vec![false; self.nodes.len()];
        for (e, ed) in self.edges.iter().enumerate() {
            if !remove.contains(&e) {
                keep_node[ed.black] = true;
                keep_node[ed.white] = true;
            }
        }
        self.restrict(&keep_node, &|e| !remove.contains(&e))
    }

    /// Keeps only the listed nodes (and edges between kept nodes passing `keep_edge`).
    pub fn restrict(&self, keep_node: &[bool], keep_edge: &dyn Fn(usize) -> bool) -> DimerModel {
        assemble(self.nodes.clone(), self.edges.clone(), self.rotation.clone(), keep_node, keep_edge)
            .expect("restriction keeps structure")
    }

    /// Map from names to indices for quick lookups.
    pub fn edge_name_map(&self) -> HashMap<String, usize> {
        self.edges.iter().enumerate().map(|(i, e)| (e.name.clone(), i)).collect()
    }

    /// True when every node has degree at least three.
    pub fn is_reduced(&self) -> bool {
        (0..self.nodes.len()).all(|v| self.degree(v) != 2)
    }

    /// Drops rendering positions.
    pub fn without_positions(&self) -> DimerModel {
        let mut m = self.clone();
        for n in m.nodes.iter_mut() {
            n.pos = None;
        }
        m
    }
}

/// Filters raw parts by node and edge masks and reindexes them.
pub(crate) fn assemble(
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    rotation: Vec<Vec<usize>>,
    keep_node: &[bool],
    keep_edge: &dyn Fn(usize) -> bool,
) -> Result<DimerModel> {
    let mut node_map = vec![usize::MAX; nodes.len()];
    let mut new_nodes = Vec::new();
    for (v, n) in nodes.into_iter().enumerate() {
        if keep_node[v] {
            node_map[v] = new_nodes.len();
            new_nodes.push(n);
        }
    }
    let mut edge_map = vec![usize::MAX; edges.len()];
    let mut new_edges = Vec::new();
    for (e, ed) in edges.into_iter().enumerate() {
        if keep_edge(e) && node_map[ed.black] != usize::MAX && node_map[ed.white] != usize::MAX {
            edge_map[e] = new_edges.len();
            new_edges.push(Edge { black: node_map[ed.black], white: node_map[ed.white], ..ed });
        }
    }
    let new_rotation = rotation
        .into_iter()
        .enumerate()
        .filter(|(v, _)| keep_node[*v])
        .map(|(_, r)| r.into_iter().filter(|&e| edge_map[e] != usize::MAX).map(|e| edge_map[e]).collect())
        .collect();
    DimerModel::new(new_nodes, new_edges, new_rotation)
}

fn mirror_coord(y: Rat) -> Rat {
    let one = Rat::from_integer(1);
    let r = one - y;
    if r >= one {
        r - one
    } else {
        r
    }
}

pub(crate) fn fresh_name<'a>(prefix: &str, existing: impl Iterator<Item = &'a str>) -> String {
    let mut max = 0u64;
    let mut used = BTreeSet::new();
    for n in existing {
        used.insert(n.to_string());
        if let Some(rest) = n.strip_prefix(prefix) {
            if let Ok(k) = rest.parse::<u64>() {
                max = max.max(k);
            }
        }
    }
    let mut k = max + 1;
    loop {
        let cand = format!("{prefix}{k}");
        if !used.contains(&cand) {
            return cand;
        }
        k += 1;
    }
}

/// Outcome of [`DimerModel::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    pub num_faces: usize,
    pub euler: i64,
}

/// Incremental builder keyed by names, used by parsers and constructions.
#[derive(Clone, Debug, Default)]
pub struct ModelBuilder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    rotation: Vec<Vec<usize>>,
}

impl ModelBuilder {
    pub fn new() -> ModelBuilder {
        ModelBuilder::default()
    }

    pub fn node(&mut self, name: &str, color: Color, pos: Option<(Rat, Rat)>) -> usize {
        self.nodes.push(Node { name: name.to_string(), color, pos });
        self.rotation.push(Vec::new());
        self.nodes.len() - 1
    }

    pub fn edge(&mut self, name: &str, black: usize, white: usize, offset: LatticeVector) -> usize {
        self.edges.push(Edge { name: name.to_string(), black, white, offset });
        self.edges.len() - 1
    }

    pub fn set_rotation(&mut self, v: usize, rot: Vec<usize>) {
        self.rotation[v] = rot;
    }

    pub fn build(self) -> Result<DimerModel> {
        DimerModel::new(self.nodes, self.edges, self.rotation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_dimer_str;

    fn gamma() -> DimerModel {
        parse_dimer_str(include_str!("../../fixtures/gamma_4b.dimer")).unwrap()
    }

    #[test]
    fn euler_characteristic_of_gamma() {
        let m = gamma();
        let r = m.validate();
        assert!(r.ok, "{:?}", r.errors);
        assert_eq!(m.num_nodes() + r.num_faces, m.num_edges());
        assert_eq!(m.homology_rank(), 2);
    }

    #[test]
    fn faces_cover_every_dart_once() {
        let m = gamma();
        let faces = m.faces();
        let owner = m.face_of_darts(&faces);
        assert_eq!(owner.len(), 2 * m.num_edges());
        assert_eq!(faces.iter().map(Face::len).sum::<usize>(), 2 * m.num_edges());
        assert!(faces.iter().all(|f| m.cycle_sum(&f.boundary).is_zero()));
    }

    #[test]
    fn mirror_swap_is_an_involution() {
        let m = gamma();
        assert_eq!(m.mirror_swap().mirror_swap(), m);
        assert_eq!(m.mirror_swap().black_nodes().count(), m.white_nodes().count());
    }

    #[test]
    fn gauge_keeps_faces_contractible() {
        let m = gamma().retranslate(2, lv(3, -1));
        assert!(m.validate().ok);
        assert!(m.faces().iter().all(|f| m.cycle_sum(&f.boundary).is_zero()));
    }

    #[test]
    fn split_then_reduce_restores_the_model() {
        let m = gamma();
        let v = m.black_nodes().next().unwrap();
        let arc = &m.rotation(v)[..2];
        let (s, _) = moves::split_move(&m, v, arc).unwrap();
        assert_eq!(s.num_nodes(), m.num_nodes() + 2);
        assert!(!s.is_reduced());
        assert!(iso::isomorphic(&moves::reduce(&s).unwrap(), &m));
    }

    #[test]
    fn fresh_names_do_not_clash() {
        let m = gamma();
        assert!(m.node_index(&m.fresh_node_name(Color::Black)).is_none());
        assert!(m.edge_index(&m.fresh_edge_name()).is_none());
    }
}
