//! Compiles straight-line torus drawings into models.
//!
//! A `.draw` file describes a picture of one fundamental domain:
//!
//! ```text
//! domain 4 4
//! node B1 black 1/2 3/2
//! alias B1x B1 9/2 3/2          # B1 drawn again, one domain to the right
//! edge B1 W1                    # straight segment
//! edge B3 W2 via 3 4 | 3 0      # polyline; `|` jumps across the boundary
//! edge B2 W5 name e7            # explicit edge id
//! label 1 1 1                   # names the face containing (1,1)
//! ```
//!
//! Rotation orders come from an exact angle sort of the edge directions at
//! every node. Offsets follow from which copy of a node an edge reaches,
//! corrected by the boundary jumps along the polyline.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};

use crate::dimer::{Color, Dart, DimerModel, Edge, Node};
use crate::error::{Error, Result};
use crate::io::parse_rat;
use crate::lattice::{lv, LatticeVector, Rat, RatVector};

/// A compiled drawing.
#[derive(Clone, Debug)]
pub struct Drawing {
    pub model: DimerModel,
    /// Face labels, each identified by a dart on the face boundary.
    pub labels: BTreeMap<String, Dart>,
}

struct DrawnEdge {
    name: String,
    a: usize,
    a_point: RatVector,
    b: usize,
    b_point: RatVector,
    /// Waypoints in cover coordinates relative to the drawn point of `a`.
    via: Vec<RatVector>,
    /// Total boundary jump along the polyline.
    jump: RatVector,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn rat_tok(line: usize, t: &str) -> Result<Rat> {
    parse_rat(t).ok_or_else(|| perr(line, format!("bad number {t}")))
}

fn half(v: RatVector) -> bool {
    v.y > Rat::zero() || (v.y.is_zero() && v.x > Rat::zero())
}

/// Exact polar-angle comparison of rational directions.
pub fn cmp_rat_angle(a: RatVector, b: RatVector) -> Ordering {
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return if ha { Ordering::Less } else { Ordering::Greater };
    }
    Rat::zero().cmp(&a.cross(b))
}

/// Compiles `.draw` text.
pub fn compile_drawing(text: &str) -> Result<Drawing> {
    let mut dom: Option<(Rat, Rat)> = None;
    let mut nodes: Vec<(String, Color, RatVector)> = Vec::new();
    let mut points: HashMap<String, (usize, RatVector)> = HashMap::new();
    let mut edges: Vec<DrawnEdge> = Vec::new();
    let mut labels: Vec<(usize, String, RatVector)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "domain" => {
                if toks.len() != 3 {
                    return Err(perr(ln, "domain W H"));
                }
                dom = Some((rat_tok(ln, toks[1])?, rat_tok(ln, toks[2])?));
            }
            "node" => {
                if toks.len() != 5 {
                    return Err(perr(ln, "node NAME COLOR X Y"));
                }
                let color = match toks[2] {
                    "black" => Color::Black,
                    "white" => Color::White,
                    c => return Err(perr(ln, format!("unknown colour {c}"))),
                };
                let p = RatVector::new(rat_tok(ln, toks[3])?, rat_tok(ln, toks[4])?);
                if points.insert(toks[1].to_string(), (nodes.len(), p)).is_some() {
                    return Err(perr(ln, format!("duplicate name {}", toks[1])));
                }
                nodes.push((toks[1].to_string(), color, p));
            }
            "alias" => {
                if toks.len() != 5 {
                    return Err(perr(ln, "alias NAME BASE X Y"));
                }
                let (v, _) = *points.get(toks[2]).ok_or_else(|| perr(ln, format!("unknown node {}", toks[2])))?;
                let p = RatVector::new(rat_tok(ln, toks[3])?, rat_tok(ln, toks[4])?);
                if points.insert(toks[1].to_string(), (v, p)).is_some() {
                    return Err(perr(ln, format!("duplicate name {}", toks[1])));
                }
            }
            "edge" => {
                if toks.len() < 3 {
                    return Err(perr(ln, "edge A B [name N] [via ...]"));
                }
                let (a, a_point) = *points.get(toks[1]).ok_or_else(|| perr(ln, format!("unknown node {}", toks[1])))?;
                let (b, b_point) = *points.get(toks[2]).ok_or_else(|| perr(ln, format!("unknown node {}", toks[2])))?;
                let mut name = None;
                let mut k = 3;
                let mut raw_via: Vec<Option<RatVector>> = Vec::new();
                while k < toks.len() {
                    match toks[k] {
                        "name" => {
                            name = Some(toks.get(k + 1).ok_or_else(|| perr(ln, "name needs a value"))?.to_string());
                            k += 2;
                        }
                        "via" => {
                            k += 1;
                            while k < toks.len() && toks[k] != "name" {
                                if toks[k] == "|" {
                                    raw_via.push(None);
                                    k += 1;
                                } else {
                                    let x = rat_tok(ln, toks[k])?;
                                    let y = rat_tok(ln, toks.get(k + 1).ok_or_else(|| perr(ln, "odd via list"))?)?;
                                    raw_via.push(Some(RatVector::new(x, y)));
                                    k += 2;
                                }
                            }
                        }
                        t => return Err(perr(ln, format!("unexpected token {t}"))),
                    }
                }
                // fold jumps into cover coordinates
                let mut via = Vec::new();
                let mut jump = RatVector::from_ints(0, 0);
                let mut last: Option<RatVector> = None;
                let mut pending_jump = false;
                for item in raw_via {
                    match item {
                        None => {
                            if last.is_none() {
                                return Err(perr(ln, "jump must follow a waypoint"));
                            }
                            pending_jump = true;
                        }
                        Some(p) => {
                            if pending_jump {
                                jump = jump + (p - last.unwrap());
                                pending_jump = false;
                            }
                            via.push(p - jump - a_point);
                            last = Some(p);
                        }
                    }
                }
                if pending_jump {
                    return Err(perr(ln, "jump must precede a waypoint"));
                }
                let name = name.unwrap_or_else(|| format!("e{}", edges.len() + 1));
                edges.push(DrawnEdge { name, a, a_point, b, b_point, via, jump });
            }
            "label" => {
                if toks.len() != 4 {
                    return Err(perr(ln, "label NAME X Y"));
                }
                labels.push((ln, toks[1].to_string(), RatVector::new(rat_tok(ln, toks[2])?, rat_tok(ln, toks[3])?)));
            }
            t => return Err(perr(ln, format!("unknown directive {t}"))),
        }
    }
    let (w, h) = dom.ok_or_else(|| perr(0, "missing domain"))?;
    let to_unit = |p: RatVector| RatVector::new(p.x / w, p.y / h);
    let frac = |r: Rat| r - r.floor();
    let base_shift = |p: RatVector| lv((p.x / w).floor().to_integer(), (p.y / h).floor().to_integer());

    let mut model_nodes = Vec::new();
    for (name, color, p) in &nodes {
        let u = to_unit(*p);
        model_nodes.push(Node { name: name.clone(), color: *color, pos: Some((frac(u.x), frac(u.y))) });
    }
    let translation = |v: usize, drawn: RatVector| -> Result<LatticeVector> {
        let base = nodes[v].2;
        let d = to_unit(drawn) - to_unit(base);
        let t = d.to_lattice().ok_or_else(|| perr(0, format!("alias of {} is not a lattice translate", nodes[v].0)))?;
        Ok(t + base_shift(base))
    };
    let mut model_edges = Vec::new();
    // (node, direction, edge) triples for the angle sort
    let mut incid: Vec<Vec<(RatVector, usize)>> = vec![Vec::new(); nodes.len()];
    for (k, e) in edges.iter().enumerate() {
        let (ca, cb) = (nodes[e.a].1, nodes[e.b].1);
        if ca == cb {
            return Err(Error::InvalidModel(format!("edge {} joins two nodes of one colour", e.name)));
        }
        let jump_units = to_unit(e.jump).to_lattice().ok_or_else(|| perr(0, format!("edge {}: jump is not a domain translate", e.name)))?;
        let ta = translation(e.a, e.a_point)?;
        let tb = translation(e.b, e.b_point)? - jump_units;
        let b_cover = e.b_point - e.jump - e.a_point;
        let dir_a = e.via.first().copied().unwrap_or(b_cover);
        let dir_b = e.via.last().copied().unwrap_or(RatVector::from_ints(0, 0)) - b_cover;
        if dir_a.is_zero() || dir_b.is_zero() {
            return Err(Error::InvalidModel(format!("edge {} has a zero-length end", e.name)));
        }
        incid[e.a].push((dir_a, k));
        incid[e.b].push((dir_b, k));
        let (black, white, off) = if ca == Color::Black { (e.a, e.b, tb - ta) } else { (e.b, e.a, ta - tb) };
        model_edges.push(Edge { name: e.name.clone(), black, white, offset: off });
    }
    let mut rotation = Vec::new();
    for (v, inc) in incid.iter_mut().enumerate() {
        inc.sort_by(|x, y| cmp_rat_angle(x.0, y.0));
        for pair in inc.windows(2) {
            if cmp_rat_angle(pair[0].0, pair[1].0) == Ordering::Equal {
                return Err(Error::InvalidModel(format!("two edges leave {} in the same direction", nodes[v].0)));
            }
        }
        rotation.push(inc.iter().map(|x| x.1).collect::<Vec<_>>());
    }
    let model = DimerModel::new(model_nodes, model_edges, rotation)?;

    let mut out_labels = BTreeMap::new();
    if !labels.is_empty() {
        let faces = model.faces();
        // cover polygon of each face, starting at the drawn point of its first tail node
        for (ln, name, p) in labels {
            let mut found = None;
            for (fi, f) in faces.iter().enumerate() {
                let poly = face_polygon(&model, &edges, &nodes, f);
                // test the label against the translates of the face polygon
                for tx in -2..=2 {
                    for ty in -2..=2 {
                        let shift = RatVector::new(w * Rat::from_integer(tx), h * Rat::from_integer(ty));
                        if winding(&poly, p - shift) != 0 {
                            found = Some(fi);
                        }
                    }
                }
                if found.is_some() {
                    break;
                }
            }
            let fi = found.ok_or_else(|| perr(ln, format!("label {name} lies in no face")))?;
            out_labels.insert(name, faces[fi].boundary[0]);
        }
    }
    Ok(Drawing { model, labels: out_labels })
}

/// Cover polygon of a face in drawing coordinates.
fn face_polygon(
    m: &DimerModel,
    edges: &[DrawnEdge],
    nodes: &[(String, Color, RatVector)],
    f: &crate::dimer::Face,
) -> Vec<RatVector> {
    let mut pts = Vec::new();
    let mut cur = nodes[m.tail(f.boundary[0])].2;
    for &d in &f.boundary {
        let e = &edges[d.edge];
        let tail = m.tail(d);
        // polyline from a to b in cover coordinates relative to a's drawn point
        let b_cover = e.b_point - e.jump - e.a_point;
        let mut line: Vec<RatVector> = vec![RatVector::from_ints(0, 0)];
        line.extend(e.via.iter().copied());
        line.push(b_cover);
        if tail != e.a {
            line.reverse();
            let end = line[0];
            for q in line.iter_mut() {
                *q = *q - end;
            }
        }
        for q in &line[..line.len() - 1] {
            pts.push(cur + *q);
        }
        cur = cur + line[line.len() - 1];
    }
    pts
}

fn winding(poly: &[RatVector], p: RatVector) -> i32 {
    let mut wn = 0;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let is_left = (b - a).cross(p - a);
        if a.y <= p.y {
            if b.y > p.y && is_left.is_positive() {
                wn += 1;
            }
        } else if b.y <= p.y && is_left.is_negative() {
            wn -= 1;
        }
    }
    wn
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64, y: i64) -> RatVector {
        RatVector::new(Rat::from_integer(x), Rat::from_integer(y))
    }

    #[test]
    fn angles_start_on_the_positive_axis() {
        let dirs = [r(1, 0), r(1, 1), r(0, 1), r(-1, 0), r(-1, -1), r(0, -1), r(1, -1)];
        for w in dirs.windows(2) {
            assert_eq!(cmp_rat_angle(w[0], w[1]), Ordering::Less, "{:?} {:?}", w[0], w[1]);
        }
        assert_eq!(cmp_rat_angle(r(2, 2), r(1, 1)), Ordering::Equal);
    }

    #[test]
    fn honeycomb_drawing() {
        let d = compile_drawing(include_str!("../fixtures/honeycomb.draw")).unwrap();
        assert_eq!((d.model.num_nodes(), d.model.num_edges()), (2, 3));
        assert!(d.model.validate().ok);
    }

    #[test]
    fn unknown_nodes_are_reported_with_their_line() {
        let err = compile_drawing("domain 1 1\nnode B black 0 0\nedge B W\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }
}
