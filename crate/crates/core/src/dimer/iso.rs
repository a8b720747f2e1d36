//! Isomorphism of embedded models up to orientation, change of torus basis
//! and node-lift retranslation.

use std::collections::VecDeque;

use super::{Dart, DimerModel};
use crate::lattice::{LatticeVector, Mat2};

/// A witness for [`isomorphic`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    /// Node of `b` assigned to each node of `a`.
    pub node_map: Vec<usize>,
    /// Edge of `b` assigned to each edge of `a`.
    pub edge_map: Vec<usize>,
    /// Change of basis carrying cycle classes of `a` to those of `b`.
    pub matrix: Mat2,
    /// True when rotations are matched with reversed orientation.
    pub reversed: bool,
}

/// True iff the two models are isomorphic as embedded graphs on the torus.
pub fn isomorphic(a: &DimerModel, b: &DimerModel) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Searches for a colour-preserving map of darts that respects rotations
/// (possibly all reversed) and carries offsets to offsets up to a common
/// unimodular matrix and a coboundary. Models must be connected.
pub fn find_isomorphism(a: &DimerModel, b: &DimerModel) -> Option<Isomorphism> {
    if a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges() || a.num_edges() == 0 {
        return None;
    }
    if a.degree_signature() != b.degree_signature() {
        return None;
    }
    if a.components().len() != 1 || b.components().len() != 1 {
        return None;
    }
    // seed at a dart leaving a node of the rarest (colour, degree) class
    let sig = a.degree_signature();
    let a0 = (0..a.num_nodes())
        .min_by_key(|&v| (sig[&(a.color(v), a.degree(v))], v))
        .unwrap();
    let d0 = a.dart_from(a0, a.rotation(a0)[0]);
    for reversed in [false, true] {
        for v in 0..b.num_nodes() {
            if b.color(v) != a.color(a0) || b.degree(v) != a.degree(a0) {
                continue;
            }
            for &e in b.rotation(v) {
                let target = b.dart_from(v, e);
                if let Some(dmap) = extend(a, b, d0, target, reversed) {
                    if let Some(iso) = finish(a, b, &dmap, reversed) {
                        return Some(iso);
                    }
                }
            }
        }
    }
    None
}

fn around(m: &DimerModel, d: Dart, forward: bool) -> Dart {
    let v = m.tail(d);
    let e = if forward { m.succ(v, d.edge) } else { m.pred(v, d.edge) };
    m.dart_from(v, e)
}

fn extend(a: &DimerModel, b: &DimerModel, d0: Dart, t0: Dart, reversed: bool) -> Option<Vec<Option<Dart>>> {
    let n = 2 * a.num_edges();
    let mut map: Vec<Option<Dart>> = vec![None; n];
    let mut used = vec![false; n];
    let mut q = VecDeque::new();
    let assign = |map: &mut Vec<Option<Dart>>, used: &mut Vec<bool>, q: &mut VecDeque<Dart>, x: Dart, y: Dart| -> bool {
        if x.dir != y.dir {
            return false;
        }
        match map[x.index()] {
            Some(z) => z == y,
            None => {
                if used[y.index()] {
                    return false;
                }
                map[x.index()] = Some(y);
                used[y.index()] = true;
                q.push_back(x);
                true
            }
        }
    };
    if !assign(&mut map, &mut used, &mut q, d0, t0) {
        return None;
    }
    while let Some(x) = q.pop_front() {
        let y = map[x.index()].unwrap();
        if a.degree(a.tail(x)) != b.degree(b.tail(y)) {
            return None;
        }
        let nx = around(a, x, true);
        let ny = around(b, y, !reversed);
        if !assign(&mut map, &mut used, &mut q, nx, ny) {
            return None;
        }
        if !assign(&mut map, &mut used, &mut q, x.reversed(), y.reversed()) {
            return None;
        }
    }
    if map.iter().any(|m| m.is_none()) {
        return None;
    }
    Some(map)
}

fn finish(a: &DimerModel, b: &DimerModel, dmap: &[Option<Dart>], reversed: bool) -> Option<Isomorphism> {
    let edge_map: Vec<usize> = (0..a.num_edges()).map(|e| dmap[Dart::bw(e).index()].unwrap().edge).collect();
    let mut node_map = vec![usize::MAX; a.num_nodes()];
    for e in 0..a.num_edges() {
        let d = Dart::bw(e);
        let t = dmap[d.index()].unwrap();
        for (x, y) in [(a.tail(d), b.tail(t)), (a.head(d), b.head(t))] {
            if node_map[x] == usize::MAX {
                node_map[x] = y;
            } else if node_map[x] != y {
                return None;
            }
        }
    }
    // lifts of a along a spanning tree, and of b along the image tree
    let (la, tree) = a.tree_lifts(0);
    let mut lb: Vec<Option<LatticeVector>> = vec![None; b.num_nodes()];
    lb[node_map[0]] = Some(LatticeVector::ZERO);
    let mut q = VecDeque::from([0usize]);
    let mut seen = vec![false; a.num_nodes()];
    seen[0] = true;
    while let Some(v) = q.pop_front() {
        for &e in a.rotation(v) {
            if !tree.contains(&e) {
                continue;
            }
            let u = a.other_end(e, v);
            if seen[u] {
                continue;
            }
            seen[u] = true;
            let be = edge_map[e];
            let bd = b.dart_from(node_map[v], be);
            lb[node_map[u]] = Some(lb[node_map[v]].unwrap() + b.displacement(bd));
            q.push_back(u);
        }
    }
    let mut pairs = Vec::new();
    for (e, ed) in a.edges().iter().enumerate() {
        if tree.contains(&e) {
            continue;
        }
        let ca = ed.offset - (la[ed.white].unwrap() - la[ed.black].unwrap());
        let be = &b.edges()[edge_map[e]];
        let cb = be.offset - (lb[be.white].unwrap() - lb[be.black].unwrap());
        pairs.push((ca, cb));
    }
    let mat = solve_basis_change(&pairs)?;
    if (mat.det() < 0) != reversed {
        return None;
    }
    Some(Isomorphism { node_map, edge_map, matrix: mat, reversed })
}

/// Finds a unimodular M with M*ca = cb for every pair.
fn solve_basis_change(pairs: &[(LatticeVector, LatticeVector)]) -> Option<Mat2> {
    let mut basis = None;
    'outer: for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            if pairs[i].0.cross(pairs[j].0) != 0 {
                basis = Some((i, j));
                break 'outer;
            }
        }
    }
    let (i, j) = basis?;
    let (p, q) = (pairs[i], pairs[j]);
    // M [p.0 q.0] = [p.1 q.1]  =>  M = [p.1 q.1] adj([p.0 q.0]) / det
    let det = p.0.cross(q.0);
    let adj = Mat2::new(q.0.y, -q.0.x, -p.0.y, p.0.x);
    let rhs = Mat2::new(p.1.x, q.1.x, p.1.y, q.1.y);
    let num = rhs * adj;
    if num.a % det != 0 || num.b % det != 0 || num.c % det != 0 || num.d % det != 0 {
        return None;
    }
    let mat = Mat2::new(num.a / det, num.b / det, num.c / det, num.d / det);
    if !mat.is_unimodular() {
        return None;
    }
    if pairs.iter().all(|&(ca, cb)| mat.apply(ca) == cb) {
        Some(mat)
    } else {
        None
    }
}
