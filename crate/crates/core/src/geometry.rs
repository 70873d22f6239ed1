//! Exact projective primitives on the double cover S² of ℝP².
//!
//! Every point is a [`ProjRay`]: a primitive integer triple up to positive
//! scaling. Edges are minor great-circle arcs, which in any affine chart
//! `x2 = 1` are ordinary straight segments. All predicates are evaluated with
//! arbitrary-precision integers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface::{MapBuilder, Provenance, SurfaceMap, VertexMark};

/// Raw integer 3-vector. Not necessarily primitive.
pub type Vec3 = [BigInt; 3];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("zero vector is not a ray")]
    ZeroRay,
    #[error("arc endpoints are equal or antipodal: {} / {}", .0[0], .0[1])]
    DegenerateArc(Box<[ProjRay; 2]>),
    #[error("input is not in general position: {0}")]
    NonGeneric(String),
    #[error("curve {curve} is not embedded: {detail}")]
    EmbeddingViolation { curve: CurveLabel, detail: String },
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

pub fn dot(a: &Vec3, b: &Vec3) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

pub fn det(a: &Vec3, b: &Vec3, c: &Vec3) -> BigInt {
    dot(a, &cross(b, c))
}

pub(crate) fn sign(x: &BigInt) -> i8 {
    match x.cmp(&BigInt::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

pub(crate) fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

pub(crate) fn scale(a: &Vec3, k: &BigInt) -> Vec3 {
    [&a[0] * k, &a[1] * k, &a[2] * k]
}

pub(crate) fn neg(a: &Vec3) -> Vec3 {
    [-&a[0], -&a[1], -&a[2]]
}

/// A ray from the origin of ℝ³, i.e. a point of S².
///
/// Coordinates are kept primitive (gcd 1) so that equality of rays is
/// equality of triples. The sign matters: `(x)` and `(-x)` are antipodal
/// points of S² over the same point of ℝP².
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjRay([BigInt; 3]);

impl ProjRay {
    pub fn new(x0: impl Into<BigInt>, x1: impl Into<BigInt>, x2: impl Into<BigInt>) -> Result<Self, GeometryError> {
        Self::from_vec([x0.into(), x1.into(), x2.into()])
    }

    /// Normalizes an arbitrary nonzero vector to its primitive ray.
    pub fn from_vec(v: Vec3) -> Result<Self, GeometryError> {
        let g = v[0].gcd(&v[1]).gcd(&v[2]);
        if g.is_zero() {
            return Err(GeometryError::ZeroRay);
        }
        if g == BigInt::from(1) {
            return Ok(ProjRay(v));
        }
        let [a, b, c] = v;
        Ok(ProjRay([a / &g, b / &g, c / &g]))
    }

    pub(crate) fn from_vec_unchecked(v: Vec3) -> Self {
        Self::from_vec(v).expect("nonzero vector")
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    pub fn antipode(&self) -> ProjRay {
        ProjRay(neg(&self.0))
    }

    pub fn is_antipode_of(&self, other: &ProjRay) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a == &-b)
    }
}

impl fmt::Display for ProjRay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Sign of the determinant of the three coordinate rows.
pub fn orient(p: &ProjRay, q: &ProjRay, r: &ProjRay) -> i8 {
    sign(&det(&p.0, &q.0, &r.0))
}

/// A minor great-circle arc, directed from `from` to `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: ProjRay,
    pub to: ProjRay,
}

impl Arc {
    pub fn new(from: ProjRay, to: ProjRay) -> Result<Self, GeometryError> {
        if from == to || from.is_antipode_of(&to) {
            return Err(GeometryError::DegenerateArc(Box::new([from, to])));
        }
        Ok(Arc { from, to })
    }

    pub fn normal(&self) -> Vec3 {
        cross(&self.from.0, &self.to.0)
    }
}

/// Position of a vector lying in the plane of an arc, relative to the arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ArcPos {
    Interior,
    Endpoint,
    Outside,
}

/// Classifies `x` (assumed coplanar with the arc) against the closed arc.
fn arc_position(arc: &Arc, normal: &Vec3, x: &Vec3) -> ArcPos {
    // x = alpha*from + beta*to; sign(beta) = sign((from x x).n), sign(alpha) = sign((x x to).n).
    let beta = sign(&dot(&cross(&arc.from.0, x), normal));
    let alpha = sign(&dot(&cross(x, &arc.to.0), normal));
    match (alpha, beta) {
        (1, 1) => ArcPos::Interior,
        (a, b) if a >= 0 && b >= 0 => ArcPos::Endpoint,
        _ => ArcPos::Outside,
    }
}

/// Transverse crossing of two minor arcs.
///
/// Returns `Ok(Some(ray))` for a single crossing interior to both arcs,
/// `Ok(None)` when the closed arcs are disjoint, and `NonGeneric` for any
/// other contact (shared or touching endpoints, overlapping collinear arcs).
pub fn intersect_arcs(a: &Arc, b: &Arc) -> Result<Option<ProjRay>, GeometryError> {
    let na = a.normal();
    let nb = b.normal();
    let line = cross(&na, &nb);
    if line.iter().all(Zero::is_zero) {
        // Same great circle: arcs either overlap, touch, or are disjoint.
        let touching = [&b.from, &b.to].iter().any(|p| arc_position(a, &na, &p.0) != ArcPos::Outside)
            || [&a.from, &a.to].iter().any(|p| arc_position(b, &nb, &p.0) != ArcPos::Outside);
        if touching {
            return Err(GeometryError::NonGeneric(format!("arcs {}->{} and {}->{} are collinear and overlap", a.from, a.to, b.from, b.to)));
        }
        return Ok(None);
    }
    for cand in [line.clone(), neg(&line)] {
        let pa = arc_position(a, &na, &cand);
        if pa == ArcPos::Outside {
            continue;
        }
        let pb = arc_position(b, &nb, &cand);
        if pb == ArcPos::Outside {
            continue;
        }
        if pa == ArcPos::Interior && pb == ArcPos::Interior {
            return Ok(Some(ProjRay::from_vec_unchecked(cand)));
        }
        return Err(GeometryError::NonGeneric(format!("arcs {}->{} and {}->{} touch at an endpoint", a.from, a.to, b.from, b.to)));
    }
    Ok(None)
}

/// True if `p` lies on the closed arc.
pub fn on_arc(arc: &Arc, p: &ProjRay) -> bool {
    let n = arc.normal();
    dot(&n, &p.0).is_zero() && arc_position(arc, &n, &p.0) != ArcPos::Outside
}

/// Orders two points of the same arc by their position along it.
pub(crate) fn cmp_along(normal: &Vec3, x: &ProjRay, y: &ProjRay) -> Ordering {
    match sign(&det(&x.0, &y.0, normal)) {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveLabel {
    A,
    B,
}

impl fmt::Display for CurveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveLabel::A => f.write_str("A"),
            CurveLabel::B => f.write_str("B"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    Oval,
    OneSided,
}

/// A closed PL curve on ℝP² given by one lift of its vertices.
///
/// For an oval the last vertex connects back to the first. For a one-sided
/// loop it connects to the antipode of the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLLoop {
    pub vertices: Vec<ProjRay>,
    pub kind: LoopKind,
}

impl PLLoop {
    pub fn new(vertices: Vec<ProjRay>, kind: LoopKind) -> Result<Self, GeometryError> {
        let l = PLLoop { vertices, kind };
        l.check()?;
        Ok(l)
    }

    pub fn oval(vertices: Vec<ProjRay>) -> Result<Self, GeometryError> {
        Self::new(vertices, LoopKind::Oval)
    }

    pub fn one_sided(vertices: Vec<ProjRay>) -> Result<Self, GeometryError> {
        Self::new(vertices, LoopKind::OneSided)
    }

    fn check(&self) -> Result<(), GeometryError> {
        if self.vertices.len() < 3 {
            return Err(GeometryError::InvalidLoop(format!("a loop needs at least 3 vertices, got {}", self.vertices.len())));
        }
        let n = self.vertices.len();
        for i in 0..n {
            let p = &self.vertices[i];
            let q = if i + 1 < n { self.vertices[i + 1].clone() } else { self.closing_target() };
            if *p == q || p.is_antipode_of(&q) {
                return Err(GeometryError::InvalidLoop(format!("consecutive vertices {p} and {q} are equal or antipodal")));
            }
        }
        Ok(())
    }

    fn closing_target(&self) -> ProjRay {
        match self.kind {
            LoopKind::Oval => self.vertices[0].clone(),
            LoopKind::OneSided => self.vertices[0].antipode(),
        }
    }

    pub fn reversed(&self) -> PLLoop {
        let mut vertices = self.vertices.clone();
        match self.kind {
            LoopKind::Oval => vertices.reverse(),
            LoopKind::OneSided => {
                // v0..vk then -v0 reversed: -v0, vk, ..., v1 is the same point set.
                vertices.reverse();
                let first = self.vertices[0].antipode();
                vertices.pop();
                vertices.insert(0, first);
            }
        }
        PLLoop { vertices, kind: self.kind }
    }
}

/// Lifts a loop to its preimage circles on S².
///
/// An oval lifts to two disjoint antipodal circles; a one-sided loop to a
/// single centrally symmetric circle. Each circle is a closed vertex cycle.
pub fn lift_curve(l: &PLLoop) -> Vec<Vec<ProjRay>> {
    match l.kind {
        LoopKind::Oval => vec![l.vertices.clone(), l.vertices.iter().map(ProjRay::antipode).collect()],
        LoopKind::OneSided => {
            let mut c = l.vertices.clone();
            c.extend(l.vertices.iter().map(ProjRay::antipode));
            vec![c]
        }
    }
}

/// Maximum number of components of a non-singular real curve of degree `m`.
pub fn harnack_bound(degree: u32) -> u64 {
    let m = degree as i64;
    if m == 0 {
        return 0;
    }
    ((m - 1) * (m - 2) / 2 + 1) as u64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveInput {
    pub label: CurveLabel,
    pub degree: u32,
    pub loops: Vec<PLLoop>,
    pub type_one: bool,
}

impl CurveInput {
    pub fn one_sided_count(&self) -> usize {
        self.loops.iter().filter(|l| l.kind == LoopKind::OneSided).count()
    }

    /// Checks the combinatorial invariants (parity, Harnack) and embeddedness.
    pub fn validate(&self) -> Result<(), CurveProblem> {
        let j = self.one_sided_count();
        if j > 1 {
            return Err(CurveProblem::TooManyOneSided(j));
        }
        if (j as u32) % 2 != self.degree % 2 {
            return Err(CurveProblem::Parity { degree: self.degree, one_sided: j });
        }
        let bound = harnack_bound(self.degree);
        if self.loops.len() as u64 > bound {
            return Err(CurveProblem::Harnack { degree: self.degree, components: self.loops.len(), bound });
        }
        check_embedded(self).map_err(CurveProblem::Geometry)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CurveProblem {
    #[error("at most one one-sided component is possible, found {0}")]
    TooManyOneSided(usize),
    #[error("degree {degree} curve with {one_sided} one-sided components violates parity")]
    Parity { degree: u32, one_sided: usize },
    #[error("degree {degree} allows at most {bound} components, found {components}")]
    Harnack { degree: u32, components: usize, bound: u64 },
    #[error(transparent)]
    Geometry(GeometryError),
}

/// One edge of a lifted loop on S².
#[derive(Clone, Debug)]
struct LiftedEdge {
    arc: Arc,
    prov: Provenance,
    /// Circle index within the curve's lift and position along it.
    circle: usize,
    pos: usize,
    circle_len: usize,
}

fn lifted_edges(curve: &CurveInput, circle_offset: &mut usize) -> Result<Vec<LiftedEdge>, GeometryError> {
    let mut out = Vec::new();
    for (loop_id, l) in curve.loops.iter().enumerate() {
        l.check()?;
        for circle in lift_curve(l) {
            let k = circle.len();
            for i in 0..k {
                out.push(LiftedEdge {
                    arc: Arc::new(circle[i].clone(), circle[(i + 1) % k].clone())?,
                    prov: Provenance { curve: curve.label, loop_id, forward: true },
                    circle: *circle_offset,
                    pos: i,
                    circle_len: k,
                });
            }
            *circle_offset += 1;
        }
    }
    Ok(out)
}

fn adjacent(a: &LiftedEdge, b: &LiftedEdge) -> bool {
    a.circle == b.circle && ((a.pos + 1) % a.circle_len == b.pos || (b.pos + 1) % b.circle_len == a.pos)
}

/// The arcs `v -> prev` and `v -> next` overlap iff they leave `v` in the same direction.
fn folds_back(prev: &ProjRay, v: &ProjRay, next: &ProjRay) -> bool {
    if orient(prev, v, next) != 0 {
        return false;
    }
    let vv = dot(&v.0, &v.0);
    let tangent = |w: &ProjRay| -> Vec3 {
        let s = dot(&w.0, &v.0);
        [&w.0[0] * &vv - &v.0[0] * &s, &w.0[1] * &vv - &v.0[1] * &s, &w.0[2] * &vv - &v.0[2] * &s]
    };
    dot(&tangent(prev), &tangent(next)).is_positive()
}

fn check_embedded_edges(label: CurveLabel, edges: &[LiftedEdge]) -> Result<(), GeometryError> {
    let violation = |detail: String| GeometryError::EmbeddingViolation { curve: label, detail };
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            let (a, b) = (&edges[i], &edges[j]);
            if adjacent(a, b) {
                let (first, second) = if (a.pos + 1) % a.circle_len == b.pos { (a, b) } else { (b, a) };
                if folds_back(&first.arc.from, &first.arc.to, &second.arc.to) {
                    return Err(violation(format!("edges fold back at {}", first.arc.to)));
                }
                continue;
            }
            match intersect_arcs(&a.arc, &b.arc) {
                Ok(None) => {}
                Ok(Some(p)) => return Err(violation(format!("edges cross at {p}"))),
                Err(_) => return Err(violation(format!("edges {}->{} and {}->{} touch", a.arc.from, a.arc.to, b.arc.from, b.arc.to))),
            }
        }
    }
    Ok(())
}

/// Verifies that the loops of one curve are embedded and pairwise disjoint.
pub fn check_embedded(curve: &CurveInput) -> Result<(), GeometryError> {
    let mut off = 0;
    let edges = lifted_edges(curve, &mut off)?;
    check_embedded_edges(curve.label, &edges)
}

/// Builds the common subdivision of the given curves on S².
///
/// Vertices are the bend vertices of the lifted loops and all transverse
/// crossings between different curves. Each crossing between A and B is
/// marked [`VertexMark::Crossing`] and appears together with its antipode.
pub fn build_arrangement(curves: &[CurveInput]) -> Result<SurfaceMap, GeometryError> {
    let mut off = 0;
    let mut per_curve = Vec::new();
    for c in curves {
        let edges = lifted_edges(c, &mut off)?;
        check_embedded_edges(c.label, &edges)?;
        per_curve.push(edges);
    }
    // Split points per edge, indexed by (curve, edge).
    let mut splits: Vec<Vec<Vec<ProjRay>>> = per_curve.iter().map(|e| vec![Vec::new(); e.len()]).collect();
    for ci in 0..per_curve.len() {
        for cj in (ci + 1)..per_curve.len() {
            for (i, ea) in per_curve[ci].iter().enumerate() {
                for (j, eb) in per_curve[cj].iter().enumerate() {
                    if let Some(p) = intersect_arcs(&ea.arc, &eb.arc)? {
                        splits[ci][i].push(p.clone());
                        splits[cj][j].push(p);
                    }
                }
            }
        }
    }
    let mut builder = MapBuilder::new();
    for (ci, c) in curves.iter().enumerate() {
        for (loop_id, l) in c.loops.iter().enumerate() {
            builder.declare_loop(c.label, loop_id, l.kind);
        }
        for e in &per_curve[ci] {
            builder.vertex(&e.arc.from, VertexMark::Bend);
        }
    }
    for (ci, edges) in per_curve.iter().enumerate() {
        for (i, e) in edges.iter().enumerate() {
            let mut pts = std::mem::take(&mut splits[ci][i]);
            let n = e.arc.normal();
            pts.sort_by(|x, y| cmp_along(&n, x, y));
            let mut chain = vec![builder.vertex(&e.arc.from, VertexMark::Bend)];
            for p in &pts {
                chain.push(builder.vertex(p, VertexMark::Crossing));
            }
            chain.push(builder.vertex(&e.arc.to, VertexMark::Bend));
            for w in chain.windows(2) {
                builder.edge(w[0], w[1], Some(e.prov));
            }
        }
    }
    builder.finish().map_err(|e| GeometryError::NonGeneric(e.to_string()))
}
