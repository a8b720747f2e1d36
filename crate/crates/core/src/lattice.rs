//! Integer and rational plane primitives: lattice vectors, convex lattice
//! polygons, slope multisets and GL(2,Z) normal forms.
//!
//! All predicates are exact. Angles are compared through half-plane tests and
//! cross products, never through floating point.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rat = Ratio<i64>;

/// A point of the integer lattice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVector {
    pub x: i64,
    pub y: i64,
}

/// Shorthand constructor.
pub const fn lv(x: i64, y: i64) -> LatticeVector {
    LatticeVector { x, y }
}

impl LatticeVector {
    pub const ZERO: LatticeVector = lv(0, 0);

    pub fn dot(self, o: LatticeVector) -> i64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: LatticeVector) -> i64 {
        self.x * o.y - self.y * o.x
    }

    /// The quarter turn (a,b) -> (b,-a) used to turn offset sums into height changes.
    pub fn rot(self) -> LatticeVector {
        lv(self.y, -self.x)
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// gcd of the coordinates; zero for the zero vector.
    pub fn content(self) -> i64 {
        self.x.gcd(&self.y)
    }

    pub fn is_primitive(self) -> bool {
        self.content() == 1
    }

    pub fn to_rat(self) -> RatVector {
        RatVector::new(Rat::from_integer(self.x), Rat::from_integer(self.y))
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: LatticeVector) -> LatticeVector {
        lv(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for LatticeVector {
    fn add_assign(&mut self, o: LatticeVector) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: LatticeVector) -> LatticeVector {
        lv(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for LatticeVector {
    fn sub_assign(&mut self, o: LatticeVector) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        lv(-self.x, -self.y)
    }
}

impl Mul<LatticeVector> for i64 {
    type Output = LatticeVector;
    fn mul(self, v: LatticeVector) -> LatticeVector {
        lv(self * v.x, self * v.y)
    }
}

/// Primitive vector in the direction of `v`.
pub fn primitive(v: LatticeVector) -> Result<LatticeVector> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = v.content();
    Ok(lv(v.x / g, v.y / g))
}

fn upper_half(x: i64, y: i64) -> bool {
    y > 0 || (y == 0 && x > 0)
}

/// Compare by polar angle in [0, 2pi), measured from the positive x-axis.
/// Parallel vectors of different length compare equal.
pub fn cmp_angle(a: LatticeVector, b: LatticeVector) -> Ordering {
    let (ha, hb) = (upper_half(a.x, a.y), upper_half(b.x, b.y));
    if ha != hb {
        return if ha { Ordering::Less } else { Ordering::Greater };
    }
    0.cmp(&a.cross(b))
}

/// A 2x2 integer matrix acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn det(self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(self, v: LatticeVector) -> LatticeVector {
        lv(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn is_unimodular(self) -> bool {
        self.det().abs() == 1
    }


    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(self) -> Option<Mat2> {
        let det = self.det();
        if det.abs() != 1 {
            return None;
        }
        Some(Mat2::new(self.d * det, -self.b * det, -self.c * det, self.a * det))
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// An exact rational point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVector {
    pub x: Rat,
    pub y: Rat,
}

impl RatVector {
    pub fn new(x: Rat, y: Rat) -> RatVector {
        RatVector { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> RatVector {
        RatVector::new(Rat::from_integer(x), Rat::from_integer(y))
    }

    pub fn dot(self, o: RatVector) -> Rat {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: RatVector) -> Rat {
        self.x * o.y - self.y * o.x
    }

    pub fn scale(self, k: Rat) -> RatVector {
        RatVector::new(self.x * k, self.y * k)
    }

    pub fn is_zero(self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Some(lattice point) when both coordinates are integers.
    pub fn to_lattice(self) -> Option<LatticeVector> {
        if self.x.is_integer() && self.y.is_integer() {
            Some(lv(self.x.to_integer(), self.y.to_integer()))
        } else {
            None
        }
    }
}

impl Add for RatVector {
    type Output = RatVector;
    fn add(self, o: RatVector) -> RatVector {
        RatVector::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for RatVector {
    type Output = RatVector;
    fn sub(self, o: RatVector) -> RatVector {
        RatVector::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for RatVector {
    type Output = RatVector;
    fn neg(self) -> RatVector {
        RatVector::new(-self.x, -self.y)
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Convex hull of rational points, counterclockwise, without collinear
/// vertices, starting at the lexicographically least point.
pub fn rat_hull(points: &[RatVector]) -> Vec<RatVector> {
    let mut pts: Vec<RatVector> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let turn = |o: RatVector, a: RatVector, b: RatVector| (a - o).cross(b - o);
    let mut lower: Vec<RatVector> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= Rat::zero() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<RatVector> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= Rat::zero() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn lattice_hull(points: &[LatticeVector]) -> Vec<LatticeVector> {
    let mut pts: Vec<LatticeVector> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let turn = |o: LatticeVector, a: LatticeVector, b: LatticeVector| (a - o).cross(b - o);
    let mut lower: Vec<LatticeVector> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<LatticeVector> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// A convex lattice polygon, stored counterclockwise from its lexicographically
/// least vertex. One or two vertices encode the degenerate point and segment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePolygon {
    vertices: Vec<LatticeVector>,
}

impl LatticePolygon {
    /// Convex hull of arbitrary lattice points. Panics on an empty input.
    pub fn hull(points: &[LatticeVector]) -> LatticePolygon {
        assert!(!points.is_empty(), "hull of no points");
        LatticePolygon { vertices: lattice_hull(points) }
    }

    /// Accepts a vertex list only if it is already strictly convex (either orientation
    /// is rejected except counterclockwise).
    pub fn from_vertices(vertices: Vec<LatticeVector>) -> Result<LatticePolygon> {
        if vertices.is_empty() {
            return Err(Error::DegeneratePolygon);
        }
        let p = LatticePolygon::hull(&vertices);
        let mut sorted_in = vertices.clone();
        sorted_in.sort();
        sorted_in.dedup();
        let mut sorted_out = p.vertices.clone();
        sorted_out.sort();
        if sorted_in != sorted_out || sorted_in.len() != vertices.len() {
            return Err(Error::Contract("vertex list is not strictly convex".into()));
        }
        if vertices.len() >= 3 {
            let n = vertices.len();
            for i in 0..n {
                let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
                if (b - a).cross(c - b) <= 0 {
                    return Err(Error::Contract("vertex list is not counterclockwise".into()));
                }
            }
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    /// Point or segment.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn translate(&self, t: LatticeVector) -> LatticePolygon {
        LatticePolygon::hull(&self.vertices.iter().map(|&v| v + t).collect::<Vec<_>>())
    }

    pub fn transform(&self, m: Mat2) -> LatticePolygon {
        LatticePolygon::hull(&self.vertices.iter().map(|&v| m.apply(v)).collect::<Vec<_>>())
    }

    /// Directed boundary edges (start, end), counterclockwise.
    pub fn edges(&self) -> Vec<(LatticeVector, LatticeVector)> {
        let n = self.vertices.len();
        if n < 3 {
            return Vec::new();
        }
        (0..n).map(|i| (self.vertices[i], self.vertices[(i + 1) % n])).collect()
    }

    /// Inclusive membership.
    pub fn contains(&self, p: LatticeVector) -> bool {
        match self.vertices.len() {
            1 => p == self.vertices[0],
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                (b - a).cross(p - a) == 0 && (p - a).dot(p - b) <= 0
            }
            _ => self.edges().iter().all(|&(a, b)| (b - a).cross(p - a) >= 0),
        }
    }

    /// Membership in the interior (empty for degenerate polygons).
    pub fn strictly_contains(&self, p: LatticeVector) -> bool {
        !self.is_degenerate() && self.edges().iter().all(|&(a, b)| (b - a).cross(p - a) > 0)
    }

    /// True when `p` lies on the boundary.
    pub fn on_boundary(&self, p: LatticeVector) -> bool {
        self.contains(p) && !self.strictly_contains(p)
    }

    fn bounding_box(&self) -> (LatticeVector, LatticeVector) {
        let xs = self.vertices.iter().map(|v| v.x);
        let ys = self.vertices.iter().map(|v| v.y);
        (
            lv(xs.clone().min().unwrap(), ys.clone().min().unwrap()),
            lv(xs.max().unwrap(), ys.max().unwrap()),
        )
    }

    /// All lattice points (boundary and interior), sorted.
    pub fn lattice_points(&self) -> Vec<LatticeVector> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::new();
        for x in lo.x..=hi.x {
            for y in lo.y..=hi.y {
                if self.contains(lv(x, y)) {
                    out.push(lv(x, y));
                }
            }
        }
        out
    }

    /// Twice the area.
    pub fn double_area(&self) -> i64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0;
        }
        (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum()
    }

    /// Index of the edge whose primitive inner normal is `w`, if any.
    pub fn edge_with_inner_normal(&self, w: LatticeVector) -> Option<usize> {
        self.edges().iter().position(|&(a, b)| primitive(b - a).map(|d| lv(-d.y, d.x)) == Ok(w))
    }
}

impl fmt::Display for LatticePolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conv{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Serialized form {"vertices": [[x,y],...]}.
#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<[i64; 2]>,
}

impl Serialize for LatticePolygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolygonJson { vertices: self.vertices.iter().map(|v| [v.x, v.y]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticePolygon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolygonJson::deserialize(d)?;
        if raw.vertices.is_empty() {
            return Err(serde::de::Error::custom("polygon without vertices"));
        }
        let pts: Vec<LatticeVector> = raw.vertices.iter().map(|v| lv(v[0], v[1])).collect();
        Ok(LatticePolygon::hull(&pts))
    }
}

/// Counterclockwise, strictly convex polygon with rational vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolygon {
    pub vertices: Vec<RatVector>,
}

impl RationalPolygon {
    pub fn hull(points: &[RatVector]) -> RationalPolygon {
        RationalPolygon { vertices: rat_hull(points) }
    }

    /// Converts to a lattice polygon; fails when some vertex is not integral.
    pub fn to_lattice(&self) -> Option<LatticePolygon> {
        let pts: Option<Vec<LatticeVector>> = self.vertices.iter().map(|v| v.to_lattice()).collect();
        pts.map(|p| LatticePolygon::hull(&p))
    }
}

/// Multiset of primitive slopes, kept sorted by angle.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SlopeMultiset {
    counts: BTreeMap<AngleKey, usize>,
}

/// Orders primitive vectors by polar angle (distinct primitive vectors have distinct angles).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct AngleKey(LatticeVector);

impl PartialOrd for AngleKey {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for AngleKey {
    fn cmp(&self, o: &Self) -> Ordering {
        cmp_angle(self.0, o.0).then_with(|| self.0.cmp(&o.0))
    }
}

impl SlopeMultiset {
    pub fn new() -> SlopeMultiset {
        SlopeMultiset::default()
    }

    /// Adds `mult` copies of the primitive part of `v`; a non-primitive vector
    /// kv contributes k copies of v/k.
    pub fn add(&mut self, v: LatticeVector, mult: usize) -> Result<()> {
        let p = primitive(v)?;
        let k = v.content() as usize;
        *self.counts.entry(AngleKey(p)).or_insert(0) += mult * k;
        Ok(())
    }

    pub fn from_entries<I: IntoIterator<Item = LatticeVector>>(it: I) -> Result<SlopeMultiset> {
        let mut s = SlopeMultiset::new();
        for v in it {
            s.add(v, 1)?;
        }
        Ok(s)
    }

    /// (slope, multiplicity) pairs in angle order.
    pub fn entries(&self) -> Vec<(LatticeVector, usize)> {
        self.counts.iter().map(|(k, &m)| (k.0, m)).collect()
    }

    pub fn multiplicity(&self, v: LatticeVector) -> usize {
        self.counts.get(&AngleKey(v)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn sum(&self) -> LatticeVector {
        self.counts.iter().fold(LatticeVector::ZERO, |acc, (k, &m)| acc + (m as i64) * k.0)
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }
}

#[derive(Serialize, Deserialize)]
struct SlopesJson {
    slopes: Vec<[i64; 3]>,
}

impl Serialize for SlopeMultiset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SlopesJson { slopes: self.entries().iter().map(|(v, m)| [v.x, v.y, *m as i64]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SlopeMultiset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SlopesJson::deserialize(d)?;
        let mut s = SlopeMultiset::new();
        for [x, y, m] in raw.slopes {
            if m < 0 {
                return Err(serde::de::Error::custom("negative multiplicity"));
            }
            s.add(lv(x, y), m as usize).map_err(serde::de::Error::custom)?;
        }
        Ok(s)
    }
}

/// Primitive outer normals, one per primitive side segment.
pub fn edge_normals(p: &LatticePolygon) -> Result<SlopeMultiset> {
    if p.is_degenerate() {
        return Err(Error::DegeneratePolygon);
    }
    let mut s = SlopeMultiset::new();
    for (a, b) in p.edges() {
        let d = b - a;
        // outer normal of a counterclockwise edge direction (dx,dy) is (dy,-dx)
        s.add(lv(d.y, -d.x), 1)?;
    }
    Ok(s)
}

/// Rebuilds a polygon from its outer normals. The walk starts at `anchor` with the
/// edge whose normal has the least angle.
pub fn polygon_from_slopes(s: &SlopeMultiset, anchor: LatticeVector) -> Result<LatticePolygon> {
    if !s.sum().is_zero() {
        return Err(Error::SlopesNotClosed);
    }
    let mut pts = vec![anchor];
    let mut cur = anchor;
    for (n, m) in s.entries() {
        cur += (m as i64) * lv(-n.y, n.x);
        pts.push(cur);
    }
    Ok(LatticePolygon::hull(&pts))
}

/// Vertex that starts the least-angle edge in `polygon_from_slopes` order.
pub fn angle_minimal_vertex(p: &LatticePolygon) -> LatticeVector {
    let edges = p.edges();
    if edges.is_empty() {
        return p.vertices()[0];
    }
    edges
        .iter()
        .min_by(|x, y| {
            let nx = lv((x.1 - x.0).y, -(x.1 - x.0).x);
            let ny = lv((y.1 - y.0).y, -(y.1 - y.0).x);
            cmp_angle(nx, ny)
        })
        .map(|e| e.0)
        .unwrap()
}

/// Lattice length |E cap N| - 1 of a segment.
pub fn lattice_length(a: LatticeVector, b: LatticeVector) -> i64 {
    (b - a).content()
}

/// Normal form of the orbit under affine unimodular maps.
pub fn gl2z_canonical_form(p: &LatticePolygon) -> LatticePolygon {
    let vs = p.vertices();
    match vs.len() {
        1 => return LatticePolygon::hull(&[LatticeVector::ZERO]),
        2 => return LatticePolygon::hull(&[LatticeVector::ZERO, lv(lattice_length(vs[0], vs[1]), 0)]),
        _ => {}
    }
    let n = vs.len();
    let mut best: Option<Vec<LatticeVector>> = None;
    for i in 0..n {
        for dir in [1usize, n - 1] {
            let v = vs[i];
            let nb = vs[(i + dir) % n];
            let other = vs[(i + n - dir) % n];
            let d = primitive(nb - v).expect("distinct vertices");
            // complete d to a basis: find (s,t) with d.x*t - d.y*s = 1
            let (g, s0, t0) = ext_gcd(d.x, d.y);
            debug_assert_eq!(g.abs(), 1);
            // s0*d.x + t0*d.y = g; basis matrix B has columns d and e with det(B)=1
            let e = lv(-t0 * g, s0 * g);
            let b = Mat2::new(d.x, e.x, d.y, e.y);
            let inv = b.inverse_unimodular().expect("unimodular basis");
            let mut m = inv;
            let o = m.apply(other - v);
            if o.y < 0 {
                m = Mat2::new(1, 0, 0, -1) * m;
            }
            let o = m.apply(other - v);
            // shear x -> x + k y so that 0 <= o.x < o.y
            let k = Integer::div_floor(&(-o.x), &o.y);
            m = Mat2::new(1, k, 0, 1) * m;
            let img: Vec<LatticeVector> = vs.iter().map(|&u| m.apply(u - v)).collect();
            let cand = LatticePolygon::hull(&img).vertices;
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    LatticePolygon { vertices: best.unwrap() }
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        let q = (a - a.rem_euclid(b)) / b;
        (g, t, s - q * t)
    }
}

/// Min and max of <w,u> over the vertices.
pub fn heights(p: &LatticePolygon, w: LatticeVector) -> (i64, i64) {
    let vals = p.vertices().iter().map(|&u| w.dot(u));
    (vals.clone().min().unwrap(), vals.max().unwrap())
}

/// |x| for rationals without importing Signed at call sites.
pub fn rat_abs(r: Rat) -> Rat {
    r.abs()
}
