//! Finite abelian covers of a model.

use super::{DimerModel, Edge, Node};
use crate::lattice::{lv, Rat};

/// The cover of `m` by the `nx` x `ny` torus: the new fundamental domain is
/// the union of nx*ny translated copies of the old one, rescaled to the unit
/// square. Copy (i,j) of node `v` is named `v_i_j`.
pub fn periodic_cover(m: &DimerModel, nx: i64, ny: i64) -> DimerModel {
    assert!(nx >= 1 && ny >= 1, "cover sizes must be positive");
    let nv = m.num_nodes();
    let ne = m.num_edges();
    let cells: Vec<(i64, i64)> = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).collect();
    let cell_index = |i: i64, j: i64| (j * nx + i) as usize;
    let mut nodes = Vec::with_capacity(nv * cells.len());
    for &(i, j) in &cells {
        for n in m.nodes() {
            let pos = n.pos.map(|(x, y)| ((x + Rat::from_integer(i)) / Rat::from_integer(nx), (y + Rat::from_integer(j)) / Rat::from_integer(ny)));
            nodes.push(Node { name: format!("{}_{}_{}", n.name, i, j), color: n.color, pos });
        }
    }
    let mut edges = Vec::with_capacity(ne * cells.len());
    for &(i, j) in &cells {
        for e in m.edges() {
            let tx = i + e.offset.x;
            let ty = j + e.offset.y;
            let (wi, wj) = (tx.rem_euclid(nx), ty.rem_euclid(ny));
            let off = lv(tx.div_euclid(nx), ty.div_euclid(ny));
            edges.push(Edge {
                name: format!("{}_{}_{}", e.name, i, j),
                black: cell_index(i, j) * nv + e.black,
                white: cell_index(wi, wj) * nv + e.white,
                offset: off,
            });
        }
    }
    // white copy (i,j) of w is reached by edge copies whose black cell is (i,j) - offset
    let mut rotation = vec![Vec::new(); nv * cells.len()];
    for &(i, j) in &cells {
        let c = cell_index(i, j);
        for v in 0..nv {
            let rot = m
                .rotation(v)
                .iter()
                .map(|&e| {
                    let ed = &m.edges()[e];
                    if ed.black == v {
                        c * ne + e
                    } else {
                        let bi = (i - ed.offset.x).rem_euclid(nx);
                        let bj = (j - ed.offset.y).rem_euclid(ny);
                        cell_index(bi, bj) * ne + e
                    }
                })
                .collect();
            rotation[c * nv + v] = rot;
        }
    }
    DimerModel::new(nodes, edges, rotation).expect("cover keeps structure")
}
