//! Mutation of dimer models at quadrangle faces.
//!
//! The black variant makes the black nodes of the face 3-valent by split
//! moves, applies the spider move, then joins every 2-valent node. The white
//! variant is the black one conjugated by [`DimerModel::mirror_swap`], which
//! keeps edge ids and maps each face to the face carrying the same darts.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dimer::{reduce, split_move, Color, Dart, DimerModel, Dir};
use crate::error::{Error, Result};

/// Colour of the two nodes created inside the face by the spider move.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Variant {
    #[default]
    Black,
    White,
}

/// A face of a model together with the variant to apply there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceMutationSpec {
    /// Any dart on the face boundary.
    pub face: Dart,
    pub variant: Variant,
}

fn ferr(msg: impl Into<String>) -> Error {
    Error::FaceMutation(msg.into())
}

/// Boundary of the face containing `d`, starting at `d`.
pub fn face_boundary(m: &DimerModel, d: Dart) -> Vec<Dart> {
    let mut out = vec![d];
    let mut cur = m.face_next(d);
    while cur != d {
        out.push(cur);
        cur = m.face_next(cur);
    }
    out
}

/// Indices (into [`DimerModel::faces`]) of the faces with four boundary edges.
pub fn quadrangle_faces(m: &DimerModel) -> Vec<usize> {
    m.faces().iter().enumerate().filter(|(_, f)| f.len() == 4).map(|(i, _)| i).collect()
}

/// First black-to-white dart of the face of `d`.
fn bw_start(m: &DimerModel, d: Dart) -> Dart {
    face_boundary(m, d).into_iter().find(|x| x.dir == Dir::BlackToWhite).expect("faces alternate colours")
}

/// Splits the black tail of `d` until it has degree three, keeping the two
/// face edges at that node on the original node.
fn make_trivalent(m: &DimerModel, d: Dart) -> Result<DimerModel> {
    let b = m.tail(d);
    let deg = m.degree(b);
    if deg < 3 {
        return Err(ferr(format!("black node {} on the face has degree {deg}", m.node_name(b))));
    }
    if deg == 3 {
        return Ok(m.clone());
    }
    // face edges at b are `d.edge` and its predecessor; the rest form one arc
    let out_edge = d.edge;
    let in_edge = m.succ(b, out_edge);
    let rot = m.rotation(b);
    let start = rot.iter().position(|&e| e == in_edge).unwrap();
    let arc: Vec<usize> = (1..deg - 1).map(|i| rot[(start + i) % deg]).collect();
    Ok(split_move(m, b, &arc)?.0)
}

/// The spider move at a quadrangle whose black nodes are 3-valent. The two
/// blacks trade their face neighbours for each other's outer neighbours.
pub fn spider_move(m: &DimerModel, face: Dart) -> Result<DimerModel> {
    let f = face_boundary(m, bw_start(m, face));
    if f.len() != 4 {
        return Err(Error::NotQuadrangle);
    }
    let (b1, wa, b2, wb) = (m.tail(f[0]), m.head(f[0]), m.head(f[1]), m.head(f[2]));
    if b1 == b2 {
        return Err(ferr("the face meets one black node twice"));
    }
    if m.degree(b1) != 3 || m.degree(b2) != 3 {
        return Err(ferr("spider move needs 3-valent black nodes"));
    }
    let (e_a1, e_a2, e_b2, e_b1) = (f[0].edge, f[1].edge, f[2].edge, f[3].edge);
    let ext1 = m.succ(b1, e_b1);
    let ext2 = m.succ(b2, e_a2);
    let (x1, x2) = (m.edges()[ext1].white, m.edges()[ext2].white);
    // lifts relative to b1
    let ed = m.edges();
    let lb2 = ed[e_a1].offset - ed[e_a2].offset;
    let lx1 = ed[ext1].offset;
    let lx2 = lb2 + ed[ext2].offset;
    let (nodes, mut edges, mut rotation) = m.clone().into_parts();
    edges[e_a1].white = x2;
    edges[e_a1].offset = lx2;
    edges[e_b2].white = x1;
    edges[e_b2].offset = lx1 - lb2;
    rotation[wa].retain(|&e| e != e_a1);
    rotation[wb].retain(|&e| e != e_b2);
    let insert_before = |r: &mut Vec<usize>, at: usize, e: usize| {
        let p = r.iter().position(|&x| x == at).unwrap();
        r.insert(p, e);
    };
    insert_before(&mut rotation[x1], ext1, e_b2);
    insert_before(&mut rotation[x2], ext2, e_a1);
    if rotation[wa].is_empty() || rotation[wb].is_empty() {
        return Err(ferr("spider move would isolate a node"));
    }
    DimerModel::new(nodes, edges, rotation)
}

/// Result of a move before the joins: the model, a dart of the new face and
/// the edges whose darts changed faces.
struct RawMove {
    model: DimerModel,
    new_face: Dart,
    touched: Vec<usize>,
}

fn mutate_black(m: &DimerModel, face: Dart) -> Result<RawMove> {
    let start = bw_start(m, face);
    let f = face_boundary(m, start);
    if f.len() != 4 {
        return Err(Error::NotQuadrangle);
    }
    if m.tail(f[0]) == m.tail(f[2]) {
        return Err(ferr("the face meets one black node twice"));
    }
    // splits append nodes and edges, so darts of the face keep their ids
    let m1 = make_trivalent(m, f[0])?;
    let m2 = make_trivalent(&m1, f[2])?;
    let b1 = m2.tail(f[0]);
    let ext1 = m2.succ(b1, f[3].edge);
    let ext2 = m2.succ(m2.tail(f[2]), f[1].edge);
    let model = spider_move(&m2, f[0])?;
    // the edge that left w_a now bounds the new face, traversed white to black
    Ok(RawMove { model, new_face: Dart::wb(f[0].edge), touched: vec![f[0].edge, f[2].edge, ext1, ext2] })
}

/// The mutation at the face containing `spec.face`, before the final joins.
fn mutate_unreduced(m: &DimerModel, spec: FaceMutationSpec) -> Result<RawMove> {
    match spec.variant {
        Variant::Black => mutate_black(m, spec.face),
        Variant::White => {
            let raw = mutate_black(&m.mirror_swap(), spec.face)?;
            Ok(RawMove { model: raw.model.mirror_swap(), ..raw })
        }
    }
}

/// The mutation `mu_f` at a quadrangle face.
pub fn mutate_face(m: &DimerModel, spec: FaceMutationSpec) -> Result<DimerModel> {
    if face_boundary(m, spec.face).len() != 4 {
        return Err(Error::NotQuadrangle);
    }
    reduce(&mutate_unreduced(m, spec)?.model)
}

/// A model with named faces that follow it through mutations.
#[derive(Clone, Debug)]
pub struct LabeledModel {
    pub model: DimerModel,
    pub labels: BTreeMap<String, Dart>,
}

fn dart_key(m: &DimerModel, d: Dart) -> (String, Dir) {
    (m.edge_name(d.edge).to_string(), d.dir)
}

fn find_dart(m: &DimerModel, key: &(String, Dir)) -> Option<Dart> {
    m.edge_index(&key.0).map(|e| Dart { edge: e, dir: key.1 })
}

impl LabeledModel {
    pub fn new(model: DimerModel, labels: BTreeMap<String, Dart>) -> LabeledModel {
        LabeledModel { model, labels }
    }

    pub fn face(&self, label: &str) -> Result<Vec<Dart>> {
        let d = self.labels.get(label).ok_or_else(|| ferr(format!("no face labelled {label}")))?;
        Ok(face_boundary(&self.model, *d))
    }

    /// Mutates at a labelled face and relocates every label. A face keeps its
    /// label through any surviving boundary dart untouched by the move.
    pub fn mutate(&self, label: &str, variant: Variant) -> Result<LabeledModel> {
        let m = &self.model;
        let target = *self.labels.get(label).ok_or_else(|| ferr(format!("no face labelled {label}")))?;
        let f = face_boundary(m, target);
        if f.len() != 4 {
            return Err(Error::NotQuadrangle);
        }
        let RawMove { model: raw, new_face, touched } = mutate_unreduced(m, FaceMutationSpec { face: target, variant })?;
        // darts on the re-attached edges and on the outer edges pulled onto the
        // new face do not identify their old faces
        let signatures: Vec<(String, Vec<(String, Dir)>)> = self
            .labels
            .iter()
            .filter(|(k, _)| k.as_str() != label)
            .map(|(k, &d)| {
                let keys =
                    face_boundary(m, d).into_iter().filter(|x| !touched.contains(&x.edge)).map(|x| dart_key(m, x)).collect();
                (k.clone(), keys)
            })
            .collect();
        let new_key = dart_key(&raw, new_face);
        let out = reduce(&raw)?;
        let mut labels = BTreeMap::new();
        let locate = |keys: &[(String, Dir)]| keys.iter().find_map(|k| find_dart(&out, k));
        let own = find_dart(&out, &new_key)
            .or_else(|| {
                // the marker edge was merged away; fall back to the raw face's darts
                let keys: Vec<_> = face_boundary(&raw, new_face).into_iter().map(|x| dart_key(&raw, x)).collect();
                locate(&keys)
            })
            .ok_or_else(|| ferr(format!("face {label} lost during the move")))?;
        labels.insert(label.to_string(), own);
        for (k, keys) in signatures {
            let d = locate(&keys).ok_or_else(|| ferr(format!("face {k} lost during the move")))?;
            labels.insert(k, d);
        }
        Ok(LabeledModel { model: out, labels })
    }
}

/// Colour of the nodes on a face boundary, for choosing a variant.
pub fn face_colors(m: &DimerModel, d: Dart) -> Vec<Color> {
    face_boundary(m, d).into_iter().map(|x| m.color(m.tail(x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_dimer_str;

    #[test]
    fn honeycomb_has_only_a_hexagon() {
        let m = parse_dimer_str(include_str!("../fixtures/honeycomb.dimer")).unwrap();
        assert!(quadrangle_faces(&m).is_empty());
        let d = Dart { edge: 0, dir: Dir::BlackToWhite };
        assert_eq!(face_boundary(&m, d).len(), 6);
        let spec = FaceMutationSpec { face: d, variant: Variant::Black };
        assert!(matches!(mutate_face(&m, spec), Err(Error::NotQuadrangle)));
    }

    #[test]
    fn quadrangles_alternate_colours() {
        let m = parse_dimer_str(include_str!("../fixtures/gamma_4b.dimer")).unwrap();
        let faces = m.faces();
        let quads = quadrangle_faces(&m);
        assert!(!quads.is_empty());
        for f in quads {
            let c = face_colors(&m, faces[f].boundary[0]);
            assert!(c.windows(2).all(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn unknown_labels_are_errors() {
        let m = parse_dimer_str(include_str!("../fixtures/gamma_4b.dimer")).unwrap();
        let lm = LabeledModel::new(m, BTreeMap::new());
        assert!(lm.face("x").is_err());
        assert!(lm.mutate("x", Variant::Black).is_err());
    }
}
