//! SVG and TikZ drawings of models and polygons. Output is display only and
//! byte-for-byte deterministic.

use std::collections::BTreeSet;
use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::dimer::{Color, Dart, DimerModel};
use crate::lattice::{LatticePolygon, LatticeVector};

const SCALE: f64 = 400.0;
const MARGIN: f64 = 20.0;

/// One drawn edge: start point of the black end in the unit square and the
/// vector to the white end's lift.
#[derive(Clone, Copy, Debug)]
struct Segment {
    start: (f64, f64),
    vec: (f64, f64),
}

fn wrap(x: f64) -> f64 {
    x - x.floor()
}

/// Node positions in the plane (not wrapped). Stored positions are used when
/// every node has one; otherwise each node moves to the barycentre of its
/// neighbours' lifts until the layout settles.
pub fn layout(m: &DimerModel) -> Vec<(f64, f64)> {
    let stored: Option<Vec<(f64, f64)>> = m
        .nodes()
        .iter()
        .map(|n| n.pos.map(|(x, y)| (x.to_f64().unwrap_or(0.0), y.to_f64().unwrap_or(0.0))))
        .collect();
    if let Some(p) = stored {
        return p;
    }
    let n = m.num_nodes();
    let mut p: Vec<(f64, f64)> = (0..n).map(|v| (v as f64 / n as f64, ((v * 7) % n.max(1)) as f64 / n as f64)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for v in 1..n {
            let (mut sx, mut sy) = (0.0, 0.0);
            for &e in m.rotation(v) {
                let d = m.dart_from(v, e);
                let t = m.displacement(d);
                let h = p[m.head(d)];
                sx += h.0 + t.x as f64;
                sy += h.1 + t.y as f64;
            }
            let k = m.degree(v) as f64;
            let q = (sx / k, sy / k);
            moved = moved.max((q.0 - p[v].0).abs() + (q.1 - p[v].1).abs());
            p[v] = q;
        }
        if moved < 1e-12 {
            break;
        }
    }
    p
}

fn segments(m: &DimerModel) -> Vec<Segment> {
    let p = layout(m);
    m.edges()
        .iter()
        .map(|e| {
            let b = p[e.black];
            let w = p[e.white];
            Segment {
                start: (wrap(b.0), wrap(b.1)),
                vec: (w.0 + e.offset.x as f64 - b.0, w.1 + e.offset.y as f64 - b.1),
            }
        })
        .collect()
}

/// Integer translates of a segment that meet the unit square.
fn translates(s: &Segment) -> Vec<((f64, f64), (f64, f64))> {
    let a = s.start;
    let b = (a.0 + s.vec.0, a.1 + s.vec.1);
    let (lo_x, hi_x) = (a.0.min(b.0), a.0.max(b.0));
    let (lo_y, hi_y) = (a.1.min(b.1), a.1.max(b.1));
    let mut out = Vec::new();
    for i in (-hi_x.ceil() as i64)..=(1 - lo_x.floor() as i64) {
        for j in (-hi_y.ceil() as i64)..=(1 - lo_y.floor() as i64) {
            let (dx, dy) = (i as f64, j as f64);
            if lo_x + dx <= 1.0 && hi_x + dx >= 0.0 && lo_y + dy <= 1.0 && hi_y + dy >= 0.0 {
                out.push(((a.0 + dx, a.1 + dy), (b.0 + dx, b.1 + dy)));
            }
        }
    }
    out
}

fn sx(x: f64) -> f64 {
    MARGIN + x * SCALE
}

fn sy(y: f64) -> f64 {
    MARGIN + (1.0 - y) * SCALE
}

/// Edge ids of a set of darts, for highlighting a zigzag path.
pub fn dart_edges(darts: &[Dart]) -> BTreeSet<usize> {
    darts.iter().map(|d| d.edge).collect()
}

/// SVG of the fundamental domain with `highlight` edges marked. Every edge is
/// one `<path>` element whose class contains `highlight` when selected.
pub fn model_svg(m: &DimerModel, highlight: &BTreeSet<usize>) -> String {
    let size = SCALE + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.0} {size:.0}">"#);
    let _ = writeln!(s, r#"<defs><clipPath id="domain"><rect x="{MARGIN:.0}" y="{MARGIN:.0}" width="{SCALE:.0}" height="{SCALE:.0}"/></clipPath></defs>"#);
    let _ = writeln!(s, r#"<rect class="domain" x="{MARGIN:.0}" y="{MARGIN:.0}" width="{SCALE:.0}" height="{SCALE:.0}" fill="none" stroke="black" stroke-width="2"/>"#);
    let _ = writeln!(s, r#"<g clip-path="url(#domain)">"#);
    let segs = segments(m);
    for (e, seg) in segs.iter().enumerate() {
        let mut d = String::new();
        for (a, b) in translates(seg) {
            let _ = write!(d, "M{:.3} {:.3}L{:.3} {:.3}", sx(a.0), sy(a.1), sx(b.0), sy(b.1));
        }
        let (class, stroke, width) =
            if highlight.contains(&e) { ("edge highlight", "red", 8) } else { ("edge", "black", 2) };
        let _ = writeln!(
            s,
            r#"<path class="{class}" data-edge="{}" d="{d}" stroke="{stroke}" stroke-width="{width}" fill="none"/>"#,
            m.edge_name(e)
        );
    }
    let _ = writeln!(s, "</g>");
    let p = layout(m);
    for (v, node) in m.nodes().iter().enumerate() {
        let fill = match node.color {
            Color::Black => "black",
            Color::White => "white",
        };
        let _ = writeln!(
            s,
            r#"<circle class="node" data-node="{}" cx="{:.3}" cy="{:.3}" r="8" fill="{fill}" stroke="black" stroke-width="2"/>"#,
            node.name,
            sx(wrap(p[v].0)),
            sy(wrap(p[v].1))
        );
    }
    s.push_str("</svg>\n");
    s
}

/// TikZ picture in the style of a hand-drawn fundamental domain of side 6.
pub fn model_tikz(m: &DimerModel, highlight: &BTreeSet<usize>) -> String {
    let k = 6.0;
    let p = layout(m);
    let mut s = String::new();
    s.push_str("\\begin{tikzpicture}\n");
    s.push_str("\\newcommand{\\edgewidth}{0.05cm}\n\\newcommand{\\nodewidth}{0.05cm}\n\\newcommand{\\noderad}{0.16}\n");
    let _ = writeln!(s, "\\draw[line width=\\edgewidth] (0,0) rectangle ({k:.0},{k:.0});");
    let _ = writeln!(s, "\\begin{{scope}}\n\\clip (0,0) rectangle ({k:.0},{k:.0});");
    for (e, seg) in segments(m).iter().enumerate() {
        let style = if highlight.contains(&e) { "line width=0.3cm, color=red" } else { "line width=\\edgewidth" };
        for (a, b) in translates(seg) {
            let _ = writeln!(s, "\\draw[{style}] ({:.3},{:.3})--({:.3},{:.3});", a.0 * k, a.1 * k, b.0 * k, b.1 * k);
        }
    }
    s.push_str("\\end{scope}\n");
    for (v, node) in m.nodes().iter().enumerate() {
        let fill = match node.color {
            Color::Black => "\\filldraw [line width=\\nodewidth, fill=black]",
            Color::White => "\\draw [line width=\\nodewidth, fill=white]",
        };
        let _ = writeln!(s, "{fill} ({:.3},{:.3}) circle [radius=\\noderad]; % {}", wrap(p[v].0) * k, wrap(p[v].1) * k, node.name);
    }
    s.push_str("\\end{tikzpicture}\n");
    s
}

fn polygon_frame(p: &LatticePolygon) -> (LatticeVector, LatticeVector) {
    let xs = p.vertices().iter().map(|v| v.x);
    let ys = p.vertices().iter().map(|v| v.y);
    (
        LatticeVector { x: xs.clone().min().unwrap() - 1, y: ys.clone().min().unwrap() - 1 },
        LatticeVector { x: xs.max().unwrap() + 1, y: ys.max().unwrap() + 1 },
    )
}

/// SVG of a lattice polygon: one `vertex` marker per vertex and one
/// `lattice-point` dot per lattice point of the polygon.
pub fn polygon_svg(p: &LatticePolygon) -> String {
    let unit = 40.0;
    let (lo, hi) = polygon_frame(p);
    let px = |x: i64| (x - lo.x) as f64 * unit;
    let py = |y: i64| (hi.y - y) as f64 * unit;
    let (w, h) = (px(hi.x), py(lo.y));
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#);
    let pts: Vec<String> = p.vertices().iter().map(|v| format!("{:.0},{:.0}", px(v.x), py(v.y))).collect();
    let _ = writeln!(s, r#"<polygon class="polygon" points="{}" fill="none" stroke="black" stroke-width="2"/>"#, pts.join(" "));
    for v in p.vertices() {
        let _ = writeln!(
            s,
            r#"<rect class="vertex" data-point="{},{}" x="{:.0}" y="{:.0}" width="10" height="10" fill="none" stroke="black"/>"#,
            v.x,
            v.y,
            px(v.x) - 5.0,
            py(v.y) - 5.0
        );
    }
    for u in p.lattice_points() {
        let _ = writeln!(
            s,
            r#"<circle class="lattice-point" data-point="{},{}" cx="{:.0}" cy="{:.0}" r="3" fill="black"/>"#,
            u.x,
            u.y,
            px(u.x),
            py(u.y)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn polygon_tikz(p: &LatticePolygon) -> String {
    let (lo, hi) = polygon_frame(p);
    let mut s = String::new();
    s.push_str("\\begin{tikzpicture}\n");
    let _ = writeln!(s, "\\draw[step=1, gray!40] ({},{}) grid ({},{});", lo.x, lo.y, hi.x, hi.y);
    let pts: Vec<String> = p.vertices().iter().map(|v| format!("({},{})", v.x, v.y)).collect();
    let _ = writeln!(s, "\\draw[line width=0.05cm] {}--cycle;", pts.join("--"));
    for u in p.lattice_points() {
        let _ = writeln!(s, "\\filldraw ({},{}) circle [radius=0.08];", u.x, u.y);
    }
    s.push_str("\\end{tikzpicture}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_dimer_str;

    #[test]
    fn stored_positions_are_used() {
        let m = parse_dimer_str(include_str!("../fixtures/honeycomb.dimer")).unwrap();
        let p = layout(&m);
        assert!((p[0].0 - 1.0 / 3.0).abs() < 1e-12 && (p[1].1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(model_svg(&m, &BTreeSet::new()).matches("<path").count(), 3);
    }

    #[test]
    fn computed_layout_settles_inside_a_domain() {
        let m = parse_dimer_str(include_str!("../fixtures/honeycomb.dimer")).unwrap().without_positions();
        let p = layout(&m);
        assert!(p.iter().all(|q| q.0.is_finite() && q.1.is_finite()));
        let tikz = model_tikz(&m, &[0].into());
        assert!(tikz.contains("color=red"));
    }

    #[test]
    fn segments_are_cut_to_the_square() {
        let s = Segment { start: (0.9, 0.5), vec: (0.3, 0.0) };
        assert_eq!(translates(&s).len(), 2);
    }

    #[test]
    fn polygon_tikz_closes_the_outline() {
        let p = LatticePolygon::hull(&[LatticeVector { x: 0, y: 0 }, LatticeVector { x: 1, y: 0 }, LatticeVector { x: 0, y: 1 }]);
        let t = polygon_tikz(&p);
        assert!(t.contains("--cycle"));
        assert_eq!(t.matches("circle").count(), 3);
    }
}
