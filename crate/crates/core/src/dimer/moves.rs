//! Split and join moves.

use super::{Color, DimerModel, Edge, Node};
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

/// Splits `node`: a new node of the same colour takes over the contiguous arc
/// `arc` of its rotation, and a new 2-valent node of the opposite colour joins
/// the two. Returns the model and the index of the 2-valent node.
pub fn split_move(m: &DimerModel, node: usize, arc: &[usize]) -> Result<(DimerModel, usize)> {
    let rot = m.rotation(node);
    if arc.is_empty() || arc.len() >= rot.len() {
        return Err(Error::Move("split arc must be a nonempty proper part of the rotation".into()));
    }
    let start = rot
        .iter()
        .position(|&e| e == arc[0])
        .ok_or_else(|| Error::Move("split arc names an edge not at the node".into()))?;
    let k = rot.len();
    for (i, &e) in arc.iter().enumerate() {
        if rot[(start + i) % k] != e {
            return Err(Error::Move("non-contiguous partition".into()));
        }
    }
    let color = m.color(node);
    let (nodes, edges, rotation) = m.clone().into_parts();
    let mut nodes = nodes;
    let mut edges = edges;
    let mut rotation = rotation;
    let v2 = nodes.len();
    let vname = m.fresh_node_name(color);
    nodes.push(Node { name: vname, color, pos: m.nodes()[node].pos });
    let u = nodes.len();
    let uname = {
        let tmp: Vec<&str> = nodes.iter().map(|n| n.name.as_str()).collect();
        super::fresh_name(
            match color.opposite() {
                Color::Black => "B",
                Color::White => "W",
            },
            tmp.into_iter(),
        )
    };
    nodes.push(Node { name: uname, color: color.opposite(), pos: m.nodes()[node].pos });
    let f_name = m.fresh_edge_name();
    let f = edges.len();
    edges.push(new_edge(&f_name, node, u, color));
    let g_name = {
        let tmp: Vec<&str> = edges.iter().map(|e| e.name.as_str()).collect();
        super::fresh_name("e", tmp.into_iter())
    };
    let g = edges.len();
    edges.push(new_edge(&g_name, v2, u, color));
    for &e in arc {
        if edges[e].black == node {
            edges[e].black = v2;
        } else {
            edges[e].white = v2;
        }
    }
    // v keeps the complement with f at the position of the arc
    let mut kept = Vec::with_capacity(k - arc.len() + 1);
    for i in 0..k {
        let idx = (start + arc.len() + i) % k;
        if i < k - arc.len() {
            kept.push(rot[idx]);
        }
    }
    kept.push(f);
    rotation[node] = kept;
    let mut carried: Vec<usize> = arc.to_vec();
    carried.push(g);
    rotation.push(carried);
    rotation.push(vec![f, g]);
    Ok((DimerModel::new(nodes, edges, rotation)?, u))
}

fn new_edge(name: &str, v: usize, u: usize, color_of_v: Color) -> Edge {
    let (black, white) = if color_of_v == Color::Black { (v, u) } else { (u, v) };
    Edge { name: name.to_string(), black, white, offset: LatticeVector::ZERO }
}

/// Contracts the 2-valent node `u`: its two neighbours merge into one node.
/// The surviving neighbour is the one with the smaller index.
pub fn join_move(m: &DimerModel, u: usize) -> Result<DimerModel> {
    if m.degree(u) != 2 {
        return Err(Error::Move(format!("join on node {} of degree {}", m.node_name(u), m.degree(u))));
    }
    let (ea, eb) = (m.rotation(u)[0], m.rotation(u)[1]);
    let (na, nb) = (m.other_end(ea, u), m.other_end(eb, u));
    if na == nb {
        return Err(Error::Move(format!("node {} has both edges to the same neighbour", m.node_name(u))));
    }
    let (keep, gone, e_keep, e_gone) = if na < nb { (na, nb, ea, eb) } else { (nb, na, eb, ea) };
    // move the lift of `gone` onto the lift of `keep`
    let d = m.displacement(m.dart_from(keep, e_keep)) + m.displacement(m.dart_from(u, e_gone));
    let shifted = m.retranslate(gone, -d);
    let (nodes, mut edges, mut rotation) = shifted.into_parts();
    for (e, ed) in edges.iter_mut().enumerate() {
        if e == e_gone || e == e_keep {
            continue;
        }
        if ed.black == gone {
            ed.black = keep;
        }
        if ed.white == gone {
            ed.white = keep;
        }
    }
    let gone_rot = &m.rotation(gone);
    let pos = gone_rot.iter().position(|&e| e == e_gone).unwrap();
    let insert: Vec<usize> = (1..gone_rot.len()).map(|i| gone_rot[(pos + i) % gone_rot.len()]).collect();
    let krot = &rotation[keep];
    let kpos = krot.iter().position(|&e| e == e_keep).unwrap();
    let mut merged = Vec::with_capacity(krot.len() + insert.len());
    merged.extend_from_slice(&krot[..kpos]);
    merged.extend_from_slice(&insert);
    merged.extend_from_slice(&krot[kpos + 1..]);
    rotation[keep] = merged;
    rotation[gone] = Vec::new();
    rotation[u] = Vec::new();
    let keep_node: Vec<bool> = (0..m.num_nodes()).map(|v| v != gone && v != u).collect();
    super::assemble(nodes, edges, rotation, &keep_node, &|e| e != e_gone && e != e_keep)
}

/// Joins 2-valent nodes until none can be joined.
pub fn reduce(m: &DimerModel) -> Result<DimerModel> {
    let mut cur = m.clone();
    loop {
        let cand = (0..cur.num_nodes()).find(|&v| {
            cur.degree(v) == 2 && {
                let r = cur.rotation(v);
                cur.other_end(r[0], v) != cur.other_end(r[1], v)
            }
        });
        match cand {
            None => break,
            Some(v) => {
                cur = join_move(&cur, v)?;
                if cur.num_nodes() < 2 {
                    return Err(Error::DegenerateAfterReduction);
                }
            }
        }
    }
    Ok(cur)
}
