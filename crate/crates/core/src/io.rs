//! The `.dimer` text format.
//!
//! ```text
//! # comment
//! [nodes]
//! W1 white 5/6 1/6
//! B1 black
//! [edges]
//! e1 B1 W1 0 0
//! [rotation]
//! B1: e1 ...
//! ```
//!
//! Node positions are optional rationals in the unit square. Each edge line is
//! `id black white dx dy`. Rotation lines list incident edges counterclockwise.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::dimer::{Color, DimerModel, Edge, Node};
use crate::error::{Error, Result};
use crate::lattice::{lv, Rat};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses a rational written as an integer, `a/b`, or a finite decimal.
pub fn parse_rat(s: &str) -> Option<Rat> {
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().ok()?;
        let b: i64 = b.trim().parse().ok()?;
        if b == 0 {
            return None;
        }
        return Some(Rat::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 12 {
            return None;
        }
        let neg = int.starts_with('-');
        let ip: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
        let den = 10i64.pow(frac.len() as u32);
        let fp: i64 = frac.parse().ok()?;
        let mag = ip.abs() * den + fp;
        return Some(Rat::new(if neg { -mag } else { mag }, den));
    }
    s.parse::<i64>().ok().map(Rat::from_integer)
}

/// Formats a rational as `a` or `a/b`.
pub fn format_rat(r: Rat) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(PartialEq)]
enum Section {
    None,
    Nodes,
    Edges,
    Rotation,
}

/// Parses without topological validation (structure is still checked).
pub fn parse_dimer_unchecked(text: &str) -> Result<DimerModel> {
    let mut section = Section::None;
    let mut nodes: Vec<Node> = Vec::new();
    let mut node_ix: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_ix: HashMap<String, usize> = HashMap::new();
    let mut rotation: Vec<Option<Vec<usize>>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[nodes]" => {
                section = Section::Nodes;
                continue;
            }
            "[edges]" => {
                section = Section::Edges;
                continue;
            }
            "[rotation]" => {
                section = Section::Rotation;
                continue;
            }
            _ => {}
        }
        if line.starts_with('[') {
            return Err(perr(ln, format!("unknown section {line}")));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::None => return Err(perr(ln, "content before any section")),
            Section::Nodes => {
                if toks.len() != 2 && toks.len() != 4 {
                    return Err(perr(ln, "node line must be `id color [x y]`"));
                }
                let color = match toks[1] {
                    "black" | "b" | "B" => Color::Black,
                    "white" | "w" | "W" => Color::White,
                    c => return Err(perr(ln, format!("unknown colour {c}"))),
                };
                let pos = if toks.len() == 4 {
                    let x = parse_rat(toks[2]).ok_or_else(|| perr(ln, "bad x coordinate"))?;
                    let y = parse_rat(toks[3]).ok_or_else(|| perr(ln, "bad y coordinate"))?;
                    Some((x, y))
                } else {
                    None
                };
                if node_ix.insert(toks[0].to_string(), nodes.len()).is_some() {
                    return Err(perr(ln, format!("duplicate node id {}", toks[0])));
                }
                nodes.push(Node { name: toks[0].to_string(), color, pos });
                rotation.push(None);
            }
            Section::Edges => {
                if toks.len() != 5 {
                    return Err(perr(ln, "edge line must be `id black white dx dy`"));
                }
                let b = *node_ix.get(toks[1]).ok_or_else(|| perr(ln, format!("unknown node {}", toks[1])))?;
                let w = *node_ix.get(toks[2]).ok_or_else(|| perr(ln, format!("unknown node {}", toks[2])))?;
                if nodes[b].color != Color::Black || nodes[w].color != Color::White {
                    return Err(perr(ln, "edge must list a black node then a white node"));
                }
                let dx: i64 = toks[3].parse().map_err(|_| perr(ln, "bad dx"))?;
                let dy: i64 = toks[4].parse().map_err(|_| perr(ln, "bad dy"))?;
                if edge_ix.insert(toks[0].to_string(), edges.len()).is_some() {
                    return Err(perr(ln, format!("duplicate edge id {}", toks[0])));
                }
                edges.push(Edge { name: toks[0].to_string(), black: b, white: w, offset: lv(dx, dy) });
            }
            Section::Rotation => {
                let (head, rest) = line.split_once(':').ok_or_else(|| perr(ln, "rotation line must be `node: edges`"))?;
                let v = *node_ix.get(head.trim()).ok_or_else(|| perr(ln, format!("unknown node {}", head.trim())))?;
                let mut rot = Vec::new();
                for t in rest.split_whitespace() {
                    rot.push(*edge_ix.get(t).ok_or_else(|| perr(ln, format!("unknown edge {t}")))?);
                }
                if rotation[v].is_some() {
                    return Err(perr(ln, format!("second rotation for node {}", head.trim())));
                }
                rotation[v] = Some(rot);
            }
        }
    }
    let mut rots = Vec::with_capacity(rotation.len());
    for (v, r) in rotation.into_iter().enumerate() {
        match r {
            Some(r) => rots.push(r),
            None => return Err(Error::InvalidModel(format!("node {} has no rotation", nodes[v].name))),
        }
    }
    DimerModel::new(nodes, edges, rots)
}

/// Parses and validates.
pub fn parse_dimer_str(text: &str) -> Result<DimerModel> {
    let m = parse_dimer_unchecked(text)?;
    m.ensure_valid()?;
    Ok(m)
}

pub fn parse_dimer(path: &Path) -> Result<DimerModel> {
    let text = std::fs::read_to_string(path).map_err(|e| perr(0, format!("{}: {e}", path.display())))?;
    parse_dimer_str(&text)
}

/// Canonical serialization.
pub fn write_dimer_string(m: &DimerModel) -> String {
    let mut s = String::new();
    s.push_str("[nodes]\n");
    for n in m.nodes() {
        match n.pos {
            Some((x, y)) => writeln!(s, "{} {} {} {}", n.name, n.color, format_rat(x), format_rat(y)).unwrap(),
            None => writeln!(s, "{} {}", n.name, n.color).unwrap(),
        }
    }
    s.push_str("[edges]\n");
    for e in m.edges() {
        writeln!(s, "{} {} {} {} {}", e.name, m.node_name(e.black), m.node_name(e.white), e.offset.x, e.offset.y).unwrap();
    }
    s.push_str("[rotation]\n");
    for v in 0..m.num_nodes() {
        let names: Vec<&str> = m.rotation(v).iter().map(|&e| m.edge_name(e)).collect();
        writeln!(s, "{}: {}", m.node_name(v), names.join(" ")).unwrap();
    }
    s
}

pub fn write_dimer(m: &DimerModel, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, write_dimer_string(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "[nodes]\nB black\nW white\n[edges]\na B W 0 0\nb B W 1 0\n[rotation]\nB: a b\nW: a b\n";

    #[test]
    fn rationals() {
        assert_eq!(parse_rat("5/6"), Some(Rat::new(5, 6)));
        assert_eq!(parse_rat("0.25"), Some(Rat::new(1, 4)));
        assert_eq!(parse_rat("-1.5"), Some(Rat::new(-3, 2)));
        assert_eq!(parse_rat("3"), Some(Rat::from_integer(3)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(format_rat(Rat::new(3, 6)), "1/2");
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let m = parse_dimer_unchecked(TWO).unwrap();
        let t = write_dimer_string(&m);
        assert_eq!(t, TWO);
        assert_eq!(parse_dimer_unchecked(&t).unwrap(), m);
    }

    #[test]
    fn two_parallel_edges_fail_euler() {
        let m = parse_dimer_unchecked(TWO).unwrap();
        let r = m.validate();
        assert!(!r.ok);
        assert!(parse_dimer_str(TWO).is_err());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let bad = "[nodes]\nB black\nW white\n[edges]\na B W 0\n";
        match parse_dimer_unchecked(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_rotation_edge_is_rejected() {
        let bad = "[nodes]\nB black\nW white\n[edges]\na B W 0 0\nb B W 1 0\n[rotation]\nB: a\nW: a b\n";
        assert!(matches!(parse_dimer_unchecked(bad), Err(Error::InvalidModel(_))));
    }
}
