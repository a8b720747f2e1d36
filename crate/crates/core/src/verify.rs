//! End-to-end comparison of a polygon mutation with the PM polygon of the
//! corresponding deformation.
//!
//! The mutation data are read off the deformation data: `w = -[z]`,
//! `h_min = -r`, `h_max = h`, and `u_E = h(P'_z, P_z)` (negated on the zag
//! side). The deformed polygon is placed so that its edges with the slopes of
//! the paths left alone by the deformation sit on the matching edges of the
//! original polygon.

use serde::Serialize;

use crate::deformation::{
    build_deformation_data, deform, DeformOptions, DeformationData, DeformationRequest, Side,
};
use crate::dimer::DimerModel;
use crate::error::{Error, Result};
use crate::lattice::{gl2z_canonical_form, primitive, LatticePolygon, LatticeVector};
use crate::matchings::{find_pm, height_change, height_census, polygon_of_census, PerfectMatching};
use crate::polygon_mutation::{context_for_normal, make_context, mutate, MutationContext};
use crate::zigzag::{boundary_matchings_for, is_consistent, is_isoradial};

/// Mutation data given independently of the deformation, as an edge index of
/// the original polygon and a sign for `u_E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MutationChoice {
    pub edge: usize,
    pub sign: i64,
}

#[derive(Clone, Debug)]
pub struct VerifyRequest {
    pub deformation: DeformationRequest,
    pub options: DeformOptions,
    /// Reference matching placing the original polygon; any matching by default.
    pub p0: Option<PerfectMatching>,
    /// Checked against the deformation data when given.
    pub mutation: Option<MutationChoice>,
}

/// Mutation data in the report.
#[derive(Clone, Debug, Serialize)]
pub struct ContextEcho {
    pub edge: usize,
    pub w: LatticeVector,
    pub u_e: LatticeVector,
    pub h_min: i64,
    pub h_max: i64,
    pub width: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelStats {
    pub nodes: usize,
    pub edges: usize,
    pub faces: usize,
    pub consistent: bool,
    pub isoradial: bool,
}

impl ModelStats {
    pub fn of(m: &DimerModel) -> ModelStats {
        ModelStats {
            nodes: m.num_nodes(),
            edges: m.num_edges(),
            faces: m.faces().len(),
            consistent: is_consistent(m),
            isoradial: is_isoradial(m),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub original: LatticePolygon,
    pub context: ContextEcho,
    pub side: Side,
    pub r: usize,
    pub h: usize,
    pub family: Vec<usize>,
    pub mutated: LatticePolygon,
    pub deformed: ModelStats,
    /// The deformed polygon after placement.
    pub deformed_polygon: LatticePolygon,
    /// Outer normals of the edges used for placement.
    pub anchors: Vec<LatticeVector>,
    pub translation: LatticeVector,
    pub exact_equal: bool,
    pub gl2z_equal: bool,
    pub verdict: String,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

fn inconsistent(detail: String) -> Error {
    Error::TableMismatch(detail)
}

/// Start of the edge of `p` whose outer normal points along `n`.
fn edge_start_with_normal(p: &LatticePolygon, n: LatticeVector) -> Option<LatticeVector> {
    let n = primitive(n).ok()?;
    p.edges().into_iter().find(|&(a, b)| primitive(b - a).map(|d| LatticeVector { x: d.y, y: -d.x }) == Ok(n)).map(|e| e.0)
}

/// The original polygon placed by `p0`, so that it contains the origin.
pub fn placed_polygon(m: &DimerModel, p0: &PerfectMatching) -> Result<LatticePolygon> {
    polygon_of_census(&height_census(m, p0.offset_sum(m)))
}

/// Origin for a placement with `h_min = -r`: the lattice point at that height
/// with the least `u_E` coordinate. Shifts along `u_E` commute with both
/// mutation and placement, so the choice only fixes the printed coordinates.
pub fn canonical_origin(ctx: &MutationContext, r: usize) -> Result<LatticeVector> {
    let target = ctx.h_min + r as i64;
    ctx.polygon
        .lattice_points()
        .into_iter()
        .filter(|&u| ctx.w.dot(u) == target)
        .min_by_key(|&u| ctx.u_e.dot(u))
        .ok_or_else(|| inconsistent(format!("r = {r} exceeds the width {}", ctx.h_max - ctx.h_min)))
}

/// Mutation context matching the deformation data.
pub fn context_from_data(m: &DimerModel, data: &DeformationData, original: &LatticePolygon) -> Result<MutationContext> {
    let z = &data.paths[data.z];
    let (pz, pz2) = boundary_matchings_for(m, z)?;
    let u = height_change(m, &pz2, &pz);
    let u_e = match data.side {
        Side::Zig => u,
        Side::Zag => -u,
    };
    context_for_normal(original, -data.v, u_e)
}

/// Runs the deformation and the mutation and compares their polygons.
pub fn verify_theorem(m: &DimerModel, req: &VerifyRequest) -> Result<VerifyReport> {
    if !is_consistent(m) {
        return Err(Error::Verify("the model is not consistent".into()));
    }
    let data = build_deformation_data(m, &req.deformation)?;
    let original = match &req.p0 {
        Some(p) => placed_polygon(m, p)?,
        None => {
            let any = placed_polygon(m, &find_pm(m).ok_or(Error::NoMatchings)?)?;
            any.translate(-canonical_origin(&context_from_data(m, &data, &any)?, data.r)?)
        }
    };
    let ctx = context_from_data(m, &data, &original)?;
    if ctx.h_min != -(data.r as i64) {
        return Err(inconsistent(format!("r = {} but h_min = {}", data.r, ctx.h_min)));
    }
    if ctx.h_max != data.h as i64 {
        return Err(inconsistent(format!("h = {} but h_max = {}", data.h, ctx.h_max)));
    }
    if ctx.h_max - ctx.h_min != data.n as i64 {
        return Err(inconsistent(format!("n = {} but the width is {}", data.n, ctx.h_max - ctx.h_min)));
    }
    if let Some(choice) = req.mutation {
        let given = make_context(&original, choice.edge, choice.sign)?;
        if given.w != ctx.w {
            return Err(inconsistent(format!("edge {} has inner normal {} but -[z] = {}", choice.edge, given.w, ctx.w)));
        }
        if given.u_e != ctx.u_e {
            return Err(inconsistent(format!("u_E = {} but h(P'_z, P_z) gives {}", given.u_e, ctx.u_e)));
        }
    }
    let mutated = mutate(&ctx)?;
    let outcome = deform(m, &data, &req.options)?;
    let deformed = crate::matchings::pm_polygon_fast(&outcome.result)?;

    // paths on the passive side keep their slopes and place the polygon
    let passive = match data.side {
        Side::Zig => &data.y_paths,
        Side::Zag => &data.x_paths,
    };
    let mut anchors: Vec<LatticeVector> = passive.iter().map(|&(k, _)| data.paths[k].slope).collect();
    anchors.sort();
    anchors.dedup();
    let mut shifts = Vec::new();
    for &n in &anchors {
        let a = edge_start_with_normal(&original, n);
        let b = edge_start_with_normal(&deformed, n);
        if let (Some(a), Some(b)) = (a, b) {
            shifts.push(a - b);
        }
    }
    shifts.sort();
    shifts.dedup();
    let (translation, placed_ok) = match shifts.as_slice() {
        [t] => (*t, true),
        [] => return Err(Error::Verify("no edge available to place the deformed polygon".into())),
        _ => (shifts[0], false),
    };
    let deformed_polygon = deformed.translate(translation);
    let exact_equal = placed_ok && deformed_polygon == mutated;
    let gl2z_equal = gl2z_canonical_form(&deformed_polygon) == gl2z_canonical_form(&mutated);
    Ok(VerifyReport {
        original,
        context: ContextEcho {
            edge: ctx.edge_index,
            w: ctx.w,
            u_e: ctx.u_e,
            h_min: ctx.h_min,
            h_max: ctx.h_max,
            width: ctx.h_max - ctx.h_min,
        },
        side: data.side,
        r: data.r,
        h: data.h,
        family: data.family.clone(),
        mutated,
        deformed: ModelStats::of(&outcome.result),
        deformed_polygon,
        anchors,
        translation,
        exact_equal,
        gl2z_equal,
        verdict: if exact_equal { "pass" } else { "fail" }.to_string(),
    })
}
