//! Planar rational polyhedra in both representations.

use num_traits::{Signed, Zero};

use crate::lattice::{rat_hull, LatticeVector, Rat, RatVector};

/// The closed half-plane `<normal, x> >= bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfPlane {
    pub normal: RatVector,
    pub bound: Rat,
}

impl HalfPlane {
    pub fn new(normal: RatVector, bound: Rat) -> HalfPlane {
        HalfPlane { normal, bound }
    }

    pub fn contains(&self, p: RatVector) -> bool {
        self.normal.dot(p) >= self.bound
    }

    /// Recession test for a direction.
    pub fn recedes(&self, r: RatVector) -> bool {
        !self.normal.dot(r).is_negative()
    }
}

/// `conv(vertices) + cone(rays)`; empty when `vertices` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VPolyhedron {
    pub vertices: Vec<RatVector>,
    pub rays: Vec<RatVector>,
}

impl VPolyhedron {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// Image under a linear map.
    pub fn map(&self, f: &dyn Fn(RatVector) -> RatVector) -> VPolyhedron {
        let vertices = rat_hull(&self.vertices.iter().map(|&v| f(v)).collect::<Vec<_>>());
        let rays = extreme_rays(&self.rays.iter().map(|&r| f(r)).filter(|r| !r.is_zero()).collect::<Vec<_>>());
        VPolyhedron { vertices, rays }
    }

    /// The polar-type dual `{u : <v,u> >= -1 for v in P}` as half-planes.
    pub fn dual_constraints(&self) -> Vec<HalfPlane> {
        let mut out: Vec<HalfPlane> =
            self.vertices.iter().map(|&v| HalfPlane::new(v, Rat::from_integer(-1))).collect();
        out.extend(self.rays.iter().map(|&r| HalfPlane::new(r, Rat::zero())));
        out
    }
}

/// Reduces a set of directions spanning a pointed cone to its extreme rays.
pub fn extreme_rays(dirs: &[RatVector]) -> Vec<RatVector> {
    if dirs.is_empty() {
        return Vec::new();
    }
    // the first ray has every other direction weakly counterclockwise of it
    let first = dirs.iter().copied().find(|&a| dirs.iter().all(|&b| !a.cross(b).is_negative()));
    let last = dirs.iter().copied().find(|&a| dirs.iter().all(|&b| !b.cross(a).is_negative()));
    let mut out = Vec::new();
    for r in [first, last].into_iter().flatten() {
        if !out.iter().any(|&x: &RatVector| x.cross(r).is_zero() && x.dot(r).is_positive()) {
            out.push(r);
        }
    }
    out
}

/// Intersection point of the boundary lines of two half-planes.
fn meet(a: &HalfPlane, b: &HalfPlane) -> Option<RatVector> {
    let det = a.normal.cross(b.normal);
    if det.is_zero() {
        return None;
    }
    // solve n_a . x = c_a, n_b . x = c_b
    let x = (a.bound * b.normal.y - b.bound * a.normal.y) / det;
    let y = (a.normal.x * b.bound - b.normal.x * a.bound) / det;
    Some(RatVector::new(x, y))
}

/// Vertex and ray description of an intersection of half-planes. The region
/// must be pointed (contain no line) when nonempty.
pub fn h_to_v(hs: &[HalfPlane]) -> VPolyhedron {
    let mut pts = Vec::new();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            if let Some(p) = meet(&hs[i], &hs[j]) {
                if hs.iter().all(|h| h.contains(p)) {
                    pts.push(p);
                }
            }
        }
    }
    if pts.is_empty() {
        return VPolyhedron::default();
    }
    let mut dirs = Vec::new();
    for h in hs {
        let d = RatVector::new(-h.normal.y, h.normal.x);
        for r in [d, -d] {
            if !r.is_zero() && hs.iter().all(|g| g.recedes(r)) {
                dirs.push(r);
            }
        }
    }
    VPolyhedron { vertices: rat_hull(&pts), rays: extreme_rays(&dirs) }
}

/// Lattice vector along a rational ray.
pub fn ray_to_lattice(r: RatVector) -> LatticeVector {
    use num_integer::Integer;
    let l = r.x.denom().lcm(r.y.denom());
    let x = (r.x * Rat::from_integer(l)).to_integer();
    let y = (r.y * Rat::from_integer(l)).to_integer();
    let g = x.gcd(&y);
    LatticeVector { x: x / g, y: y / g }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64, y: i64) -> RatVector {
        RatVector::new(Rat::from_integer(x), Rat::from_integer(y))
    }

    #[test]
    fn square_from_four_half_planes() {
        let one = Rat::from_integer(1);
        let hs = [
            HalfPlane::new(r(1, 0), -one),
            HalfPlane::new(r(-1, 0), -one),
            HalfPlane::new(r(0, 1), -one),
            HalfPlane::new(r(0, -1), -one),
        ];
        let p = h_to_v(&hs);
        assert!(p.is_bounded());
        assert_eq!(p.vertices.len(), 4);
        assert!(p.vertices.contains(&r(1, 1)) && p.vertices.contains(&r(-1, -1)));
    }

    #[test]
    fn quadrant_has_two_rays() {
        let zero = Rat::from_integer(0);
        let p = h_to_v(&[HalfPlane::new(r(1, 0), zero), HalfPlane::new(r(0, 1), zero)]);
        assert_eq!(p.vertices, vec![r(0, 0)]);
        let mut rays: Vec<LatticeVector> = p.rays.iter().map(|&x| ray_to_lattice(x)).collect();
        rays.sort();
        assert_eq!(rays, [LatticeVector { x: 0, y: 1 }, LatticeVector { x: 1, y: 0 }]);
    }

    #[test]
    fn infeasible_is_empty() {
        let hs = [HalfPlane::new(r(1, 0), Rat::from_integer(1)), HalfPlane::new(r(-1, 0), Rat::from_integer(1))];
        assert!(h_to_v(&hs).is_empty());
    }

    #[test]
    fn rays_are_primitive() {
        let half = RatVector::new(Rat::new(3, 2), Rat::new(-9, 4));
        assert_eq!(ray_to_lattice(half), LatticeVector { x: 2, y: -3 });
    }
}
