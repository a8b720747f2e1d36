//! Combinatorial mutation of lattice polygons and the dual construction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{heights, lattice_length, primitive, LatticePolygon, LatticeVector, Rat, RatVector, RationalPolygon};
use crate::polyhedron::{h_to_v, ray_to_lattice, HalfPlane, VPolyhedron};

/// Mutation data for one edge of a polygon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutationContext {
    pub polygon: LatticePolygon,
    pub edge_index: usize,
    /// Primitive inner normal of the edge.
    pub w: LatticeVector,
    /// Primitive direction of the factor segment conv{0, u_E}.
    pub u_e: LatticeVector,
    pub h_min: i64,
    pub h_max: i64,
}

/// Context for edge `edge_index` (counterclockwise from the first vertex).
/// `sign = +1` takes `u_E` along the counterclockwise edge direction.
pub fn make_context(p: &LatticePolygon, edge_index: usize, sign: i64) -> Result<MutationContext> {
    if p.is_degenerate() {
        return Err(Error::DegeneratePolygon);
    }
    let edges = p.edges();
    let &(a, b) = edges
        .get(edge_index)
        .ok_or_else(|| Error::Contract(format!("edge index {edge_index} out of range (polygon has {})", edges.len())))?;
    if sign != 1 && sign != -1 {
        return Err(Error::Contract("sign must be +1 or -1".into()));
    }
    let d = primitive(b - a)?;
    // inner normal of a counterclockwise edge
    let w = LatticeVector { x: -d.y, y: d.x };
    let (h_min, h_max) = heights(p, w);
    Ok(MutationContext { polygon: p.clone(), edge_index, w, u_e: sign * d, h_min, h_max })
}

/// Context from an explicit inner normal and factor direction.
pub fn context_for_normal(p: &LatticePolygon, w: LatticeVector, u_e: LatticeVector) -> Result<MutationContext> {
    let k = p
        .edge_with_inner_normal(w)
        .ok_or_else(|| Error::Contract(format!("{w} is not the inner normal of an edge")))?;
    if w.dot(u_e) != 0 || !u_e.is_primitive() {
        return Err(Error::Contract("u_E must be primitive and orthogonal to w".into()));
    }
    let (h_min, h_max) = heights(p, w);
    Ok(MutationContext { polygon: p.clone(), edge_index: k, w, u_e, h_min, h_max })
}

impl MutationContext {
    pub fn edge(&self) -> (LatticeVector, LatticeVector) {
        self.polygon.edges()[self.edge_index]
    }

    /// Lattice points of the polygon at height `h`, as a segment (ordered along `u_E`).
    pub fn slice(&self, h: i64) -> Option<(LatticeVector, LatticeVector)> {
        let pts: Vec<LatticeVector> =
            self.polygon.lattice_points().into_iter().filter(|&u| self.w.dot(u) == h).collect();
        let lo = pts.iter().copied().min_by_key(|&u| self.u_e.dot(u))?;
        let hi = pts.iter().copied().max_by_key(|&u| self.u_e.dot(u))?;
        Some((lo, hi))
    }

    /// G_h: the slice shortened by `-h` steps at its `u_E` end.
    pub fn g_segment(&self, h: i64) -> Result<Option<(LatticeVector, LatticeVector)>> {
        let Some((lo, hi)) = self.slice(h) else {
            return Ok(None);
        };
        let len = lattice_length(lo, hi);
        if len < -h {
            let has_vertex = self.polygon.vertices().iter().any(|&v| self.w.dot(v) == h);
            if has_vertex {
                return Err(Error::Contract(format!("slice at height {h} too short for its vertices")));
            }
            return Ok(None);
        }
        Ok(Some((lo, hi + h * self.u_e)))
    }
}

/// Lattice length of the edge is at least `-h_min`.
pub fn admits_mutation(ctx: &MutationContext) -> bool {
    let (a, b) = ctx.edge();
    lattice_length(a, b) >= -ctx.h_min
}

/// The mutation conv(union G_h and union (w_h(P) + hF)).
pub fn mutate(ctx: &MutationContext) -> Result<LatticePolygon> {
    if !admits_mutation(ctx) {
        return Err(Error::NotAdmissible);
    }
    let mut pts = Vec::new();
    for h in ctx.h_min..0 {
        if let Some((a, b)) = ctx.g_segment(h)? {
            pts.push(a);
            pts.push(b);
        }
    }
    for h in 0..=ctx.h_max {
        if let Some((a, b)) = ctx.slice(h) {
            pts.extend([a, b, a + h * ctx.u_e, b + h * ctx.u_e]);
        }
    }
    Ok(LatticePolygon::hull(&pts))
}

/// Dual polyhedron split as a bounded part plus a cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPolyhedron {
    pub bounded_part: RationalPolygon,
    pub cone_rays: Vec<LatticeVector>,
}

impl DualPolyhedron {
    fn as_v(&self) -> VPolyhedron {
        VPolyhedron {
            vertices: self.bounded_part.vertices.clone(),
            rays: self.cone_rays.iter().map(|r| r.to_rat()).collect(),
        }
    }

    /// The dual of this polyhedron, which is bounded for duals of polygons.
    pub fn dual(&self) -> Result<RationalPolygon> {
        let v = h_to_v(&self.as_v().dual_constraints());
        if !v.is_bounded() || v.is_empty() {
            return Err(Error::Contract("double dual is not a polygon".into()));
        }
        Ok(RationalPolygon { vertices: v.vertices })
    }
}

fn from_v(v: VPolyhedron) -> DualPolyhedron {
    DualPolyhedron {
        bounded_part: RationalPolygon { vertices: v.vertices },
        cone_rays: v.rays.into_iter().map(ray_to_lattice).collect(),
    }
}

fn dual_v(p: &LatticePolygon) -> Result<VPolyhedron> {
    if !p.contains(LatticeVector::ZERO) {
        return Err(Error::OriginNotInPolygon);
    }
    let hs: Vec<HalfPlane> = p.vertices().iter().map(|&u| HalfPlane::new(u.to_rat(), Rat::from_integer(-1))).collect();
    Ok(h_to_v(&hs))
}

/// {v : <v,u> >= -1 for all u in P}.
pub fn dual(p: &LatticePolygon) -> Result<DualPolyhedron> {
    Ok(from_v(dual_v(p)?))
}

/// The piecewise-linear map fixing the half-plane <v,u_E> >= 0.
pub fn phi(v: RatVector, ctx: &MutationContext) -> RatVector {
    let t = v.dot(ctx.u_e.to_rat());
    if t >= Rat::from_integer(0) {
        v
    } else {
        v - ctx.w.to_rat().scale(t)
    }
}

/// The mutation computed as the dual of phi applied to the dual.
pub fn mutate_via_dual(ctx: &MutationContext) -> Result<LatticePolygon> {
    if !admits_mutation(ctx) {
        return Err(Error::NotAdmissible);
    }
    let dv = dual_v(&ctx.polygon)?;
    let mut base = dv.vertices.clone();
    base.sort();
    let hs: Vec<HalfPlane> =
        ctx.polygon.vertices().iter().map(|&u| HalfPlane::new(u.to_rat(), Rat::from_integer(-1))).collect();
    let u = ctx.u_e.to_rat();
    let zero = Rat::from_integer(0);
    let mut upper = hs.clone();
    upper.push(HalfPlane::new(u, zero));
    let mut lower = hs;
    lower.push(HalfPlane::new(-u, zero));
    let lin = |v: RatVector| v - ctx.w.to_rat().scale(v.dot(u));
    let pieces = [h_to_v(&upper), h_to_v(&lower).map(&lin)];
    let constraints: Vec<HalfPlane> = pieces.iter().flat_map(|p| p.dual_constraints()).collect();
    let out = h_to_v(&constraints);
    if out.is_empty() || !out.is_bounded() {
        return Err(Error::Contract("dual of the image is not a polygon".into()));
    }
    RationalPolygon { vertices: out.vertices }
        .to_lattice()
        .ok_or_else(|| Error::Contract("dual route produced a non-lattice vertex".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::lv;

    fn quad() -> LatticePolygon {
        LatticePolygon::hull(&[lv(1, 0), lv(1, 1), lv(-1, 0), lv(0, -1)])
    }

    fn hexagon() -> LatticePolygon {
        LatticePolygon::hull(&[lv(2, -1), lv(2, 3), lv(-2, 3), lv(-3, 2), lv(-3, 1), lv(-2, -1)])
    }

    #[test]
    fn quad_context() {
        let p = quad();
        let k = p.edge_with_inner_normal(lv(1, 1)).unwrap();
        let c = make_context(&p, k, 1).unwrap();
        assert_eq!((c.w, c.u_e, c.h_min, c.h_max), (lv(1, 1), lv(1, -1), -1, 2));
        assert!(admits_mutation(&c));
        assert_eq!(make_context(&p, k, -1).unwrap().u_e, lv(-1, 1));
    }

    #[test]
    fn quad_mutations() {
        let p = quad();
        let k = p.edge_with_inner_normal(lv(1, 1)).unwrap();
        let plus = mutate(&make_context(&p, k, 1).unwrap()).unwrap();
        assert_eq!(plus, LatticePolygon::hull(&[lv(-1, 0), lv(1, 1), lv(3, -1), lv(2, -1)]));
        let minus = mutate(&make_context(&p, k, -1).unwrap()).unwrap();
        assert_eq!(minus, LatticePolygon::hull(&[lv(0, -1), lv(1, 0), lv(1, 1), lv(-1, 3)]));
        for s in [1, -1] {
            let c = make_context(&p, k, s).unwrap();
            assert_eq!(mutate_via_dual(&c).unwrap(), mutate(&c).unwrap());
        }
    }

    #[test]
    fn hexagon_mutation() {
        let p = hexagon();
        let k = p.edge_with_inner_normal(lv(0, -1)).unwrap();
        let c = make_context(&p, k, 1).unwrap();
        assert_eq!((c.w, c.u_e, c.h_min, c.h_max), (lv(0, -1), lv(-1, 0), -3, 1));
        let out = mutate(&c).unwrap();
        assert_eq!(out, LatticePolygon::hull(&[lv(2, -1), lv(2, 3), lv(1, 3), lv(-1, 2), lv(-2, 1), lv(-3, -1)]));
        assert_eq!(mutate_via_dual(&c).unwrap(), out);
    }

    #[test]
    fn triangle_not_admissible() {
        let p = LatticePolygon::hull(&[lv(0, 0), lv(2, 0), lv(0, 1)]);
        let k = p.edge_with_inner_normal(lv(-1, -2)).unwrap();
        let c = make_context(&p, k, 1).unwrap();
        assert_eq!(c.h_min, -2);
        assert!(!admits_mutation(&c));
        assert!(matches!(mutate(&c), Err(Error::NotAdmissible)));
    }

    #[test]
    fn phi_values() {
        let p = quad();
        let c = make_context(&p, p.edge_with_inner_normal(lv(1, 1)).unwrap(), 1).unwrap();
        let r = |x: i64, y: i64| RatVector::from_ints(x, y);
        assert_eq!(phi(r(-1, 2), &c), r(2, 5));
        assert_eq!(phi(r(1, -1), &c), r(1, -1));
        assert_eq!(phi(r(1, 1), &c), r(1, 1));
    }

    #[test]
    fn duals() {
        let t = LatticePolygon::hull(&[lv(1, 0), lv(0, 1), lv(-1, -1)]);
        let d = dual(&t).unwrap();
        assert!(d.cone_rays.is_empty());
        let want = RationalPolygon::hull(&[RatVector::from_ints(2, -1), RatVector::from_ints(-1, 2), RatVector::from_ints(-1, -1)]);
        assert_eq!(d.bounded_part, want);
        assert_eq!(d.dual().unwrap().to_lattice().unwrap(), t);
        let sq = LatticePolygon::hull(&[lv(1, 1), lv(-1, 1), lv(-1, -1), lv(1, -1)]);
        let ds = dual(&sq).unwrap();
        let diamond = RationalPolygon::hull(&[RatVector::from_ints(1, 0), RatVector::from_ints(0, 1), RatVector::from_ints(-1, 0), RatVector::from_ints(0, -1)]);
        assert_eq!(ds.bounded_part, diamond);
        assert!(matches!(dual(&LatticePolygon::hull(&[lv(1, 1), lv(2, 1), lv(1, 2)])), Err(Error::OriginNotInPolygon)));
    }

    #[test]
    fn boundary_origin_dual_has_rays() {
        let p = LatticePolygon::hull(&[lv(0, 0), lv(2, 0), lv(0, 2)]);
        let d = dual(&p).unwrap();
        assert_eq!(d.cone_rays.len(), 2);
        assert_eq!(d.dual().unwrap().to_lattice().unwrap(), p);
    }
}
