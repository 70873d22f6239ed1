use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{det, dot, sign, CurveLabel, LoopKind, ProjRay, Vec3};

pub type VertexId = usize;
pub type HalfEdgeId = usize;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("antipodal image of half-edge {0} is missing")]
    MissingAntipode(HalfEdgeId),
    #[error("duplicate edge between vertices {0} and {1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexMark {
    Bend,
    Crossing,
    SmoothingJoint,
    /// A joint whose strand carries a cusp; the horn face lies left of `horn`.
    Cusp {
        horn: HalfEdgeId,
    },
    /// Vertex of an auxiliary refinement (never part of a curve).
    Auxiliary,
}

/// Which loop an edge belongs to, and whether the half-edge runs along the
/// loop's vertex order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Provenance {
    pub curve: CurveLabel,
    pub loop_id: usize,
    pub forward: bool,
}

impl Provenance {
    pub fn reversed(self) -> Self {
        Provenance { forward: !self.forward, ..self }
    }
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub ray: ProjRay,
    pub mark: VertexMark,
}

#[derive(Clone, Debug)]
pub struct HalfEdge {
    pub origin: VertexId,
    /// Counter-clockwise successor around `origin` (S² oriented by the outward normal).
    pub next_around: HalfEdgeId,
    pub prev_around: HalfEdgeId,
    pub provenance: Option<Provenance>,
    pub antipode: HalfEdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopInfo {
    pub curve: CurveLabel,
    pub loop_id: usize,
    pub kind: LoopKind,
}

/// Half-edge combinatorial map on S² with the antipodal involution.
///
/// Twins are stored next to each other: half-edges `2k` and `2k + 1` form
/// edge `k`. The face to the left of a half-edge is traversed by [`next`].
///
/// [`next`]: SurfaceMap::next
#[derive(Clone, Debug, Default)]
pub struct SurfaceMap {
    pub(crate) vertices: Vec<Vertex>,
    pub(crate) half_edges: Vec<HalfEdge>,
    pub(crate) loops: Vec<LoopInfo>,
}

impl SurfaceMap {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn half_edge_count(&self) -> usize {
        self.half_edges.len()
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn half_edge(&self, h: HalfEdgeId) -> &HalfEdge {
        &self.half_edges[h]
    }

    pub fn loops(&self) -> &[LoopInfo] {
        &self.loops
    }

    pub fn loop_kind(&self, curve: CurveLabel, loop_id: usize) -> Option<LoopKind> {
        self.loops.iter().find(|l| l.curve == curve && l.loop_id == loop_id).map(|l| l.kind)
    }

    #[inline]
    pub fn twin(&self, h: HalfEdgeId) -> HalfEdgeId {
        h ^ 1
    }

    pub fn origin(&self, h: HalfEdgeId) -> VertexId {
        self.half_edges[h].origin
    }

    pub fn dest(&self, h: HalfEdgeId) -> VertexId {
        self.half_edges[h ^ 1].origin
    }

    pub fn antipode(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.half_edges[h].antipode
    }

    /// Next half-edge along the boundary of the face on the left of `h`.
    pub fn next(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.half_edges[h ^ 1].prev_around
    }

    pub fn origin_ray(&self, h: HalfEdgeId) -> &ProjRay {
        &self.vertices[self.origin(h)].ray
    }

    pub fn dest_ray(&self, h: HalfEdgeId) -> &ProjRay {
        &self.vertices[self.dest(h)].ray
    }

    /// Outgoing half-edges of `v` in counter-clockwise order.
    pub fn outgoing(&self, v: VertexId) -> Vec<HalfEdgeId> {
        let Some(start) = self.half_edges.iter().position(|h| h.origin == v) else {
            return Vec::new();
        };
        let mut out = vec![start];
        let mut h = self.half_edges[start].next_around;
        while h != start {
            out.push(h);
            h = self.half_edges[h].next_around;
        }
        out
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.half_edges.iter().filter(|h| h.origin == v).count()
    }

    pub fn crossing_vertices(&self) -> Vec<VertexId> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].mark == VertexMark::Crossing).collect()
    }

    /// Crossing vertices grouped into antipodal pairs, smaller id first.
    /// The number of pairs is the number of crossings on ℝP².
    pub fn quotient_crossings(&self) -> Vec<(VertexId, VertexId)> {
        let index: HashMap<&ProjRay, VertexId> = self.vertices.iter().enumerate().map(|(i, v)| (&v.ray, i)).collect();
        let mut out = Vec::new();
        for v in self.crossing_vertices() {
            let a = index[&self.vertices[v].ray.antipode()];
            if v < a {
                out.push((v, a));
            }
        }
        out
    }

    /// Orbits of [`next`](Self::next); each is the boundary walk of one side of the graph.
    pub fn boundary_circuits(&self) -> Vec<Vec<HalfEdgeId>> {
        let mut seen = vec![false; self.half_edges.len()];
        let mut out = Vec::new();
        for start in 0..self.half_edges.len() {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                c.push(h);
                h = self.next(h);
            }
            out.push(c);
        }
        out
    }

    /// Geometric edges as (from, to) rays, indexed by edge id.
    pub fn edge_rays(&self) -> Vec<(ProjRay, ProjRay)> {
        (0..self.edge_count()).map(|e| (self.origin_ray(2 * e).clone(), self.dest_ray(2 * e).clone())).collect()
    }

    /// Structural self-check. Never fails; problems are reported as diagnostics.
    pub fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::default();
        let n = self.half_edges.len();

        let mut twin_ok = n.is_multiple_of(2);
        for h in 0..n {
            if self.origin(h) == self.dest(h) {
                twin_ok = false;
            }
        }
        d.push("twin pairing", twin_ok, "");

        let mut rot_ok = true;
        for h in 0..n {
            let he = &self.half_edges[h];
            if self.half_edges[he.next_around].prev_around != h || self.half_edges[he.next_around].origin != he.origin {
                rot_ok = false;
            }
        }
        d.push("rotation system", rot_ok, "");

        let mut inv_ok = true;
        let mut inv_detail = String::new();
        for h in 0..n {
            let a = self.antipode(h);
            let bad = a >= n
                || a == h
                || self.antipode(a) != h
                || self.antipode(self.twin(h)) != self.twin(a)
                || self.half_edges[a].provenance != self.half_edges[h].provenance
                || !self.origin_ray(h).is_antipode_of(self.origin_ray(a))
                || self.origin(a) == self.origin(h)
                // orientation reversing: ccw successor maps to cw predecessor
                || self.antipode(self.half_edges[h].next_around) != self.half_edges[a].prev_around;
            if bad {
                inv_ok = false;
                inv_detail = format!("half-edge {h}");
                break;
            }
        }
        d.push("antipodal involution", inv_ok, &inv_detail);

        // Euler relation per connected component: V - E + circuits = 2.
        let comps = self.graph_components();
        let circuits = self.boundary_circuits();
        let mut circ_per = vec![0i64; comps.count];
        for c in &circuits {
            circ_per[comps.of_vertex[self.origin(c[0])]] += 1;
        }
        let mut v_per = vec![0i64; comps.count];
        for v in 0..self.vertices.len() {
            v_per[comps.of_vertex[v]] += 1;
        }
        let mut e_per = vec![0i64; comps.count];
        for e in 0..self.edge_count() {
            e_per[comps.of_vertex[self.origin(2 * e)]] += 1;
        }
        let mut euler_ok = true;
        let mut euler_detail = String::new();
        for i in 0..comps.count {
            let chi = v_per[i] - e_per[i] + circ_per[i];
            if chi != 2 {
                euler_ok = false;
                euler_detail = format!("component {i}: V-E+F = {chi}");
            }
        }
        d.push("euler per component", euler_ok, &euler_detail);

        let mut prov_ok = true;
        for v in 0..self.vertices.len() {
            let out = self.outgoing(v);
            let provs: Vec<_> = out.iter().map(|&h| self.half_edges[h].provenance).collect();
            if provs.iter().any(Option::is_none) {
                continue;
            }
            let provs: Vec<_> = provs.into_iter().flatten().collect();
            let ok = match self.vertices[v].mark {
                VertexMark::Bend => provs.len() == 2 && same_loop(provs[0], provs[1]) && provs[0].forward != provs[1].forward,
                VertexMark::Crossing => {
                    provs.len() == 4
                        && same_loop(provs[0], provs[2])
                        && same_loop(provs[1], provs[3])
                        && provs[0].forward != provs[2].forward
                        && provs[1].forward != provs[3].forward
                        && provs[0].curve != provs[1].curve
                }
                _ => provs.len() == 2,
            };
            if !ok {
                prov_ok = false;
            }
        }
        d.push("provenance continuity", prov_ok, "");

        let even = (0..self.vertices.len()).all(|v| self.degree(v).is_multiple_of(2));
        d.push("even vertex degrees", even, "");
        d
    }

    pub(crate) fn graph_components(&self) -> GraphComponents {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in 0..self.edge_count() {
            let a = find(&mut parent, self.origin(2 * e));
            let b = find(&mut parent, self.origin(2 * e + 1));
            parent[a] = b;
        }
        let mut label = HashMap::new();
        let mut of_vertex = vec![0; self.vertices.len()];
        for (v, slot) in of_vertex.iter_mut().enumerate() {
            let r = find(&mut parent, v);
            let n = label.len();
            *slot = *label.entry(r).or_insert(n);
        }
        GraphComponents { count: label.len(), of_vertex }
    }
}

fn same_loop(a: Provenance, b: Provenance) -> bool {
    a.curve == b.curve && a.loop_id == b.loop_id
}

pub(crate) struct GraphComponents {
    pub count: usize,
    pub of_vertex: Vec<usize>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Diagnostics {
    pub fn push(&mut self, name: &str, passed: bool, detail: &str) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.to_string() });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Tangent direction at `v` towards `w` (projection of `w` onto the tangent plane, scaled).
fn tangent(v: &Vec3, w: &Vec3) -> Vec3 {
    let vv = dot(v, v);
    let vw = dot(v, w);
    [&w[0] * &vv - &v[0] * &vw, &w[1] * &vv - &v[1] * &vw, &w[2] * &vv - &v[2] * &vw]
}

/// Sorts outgoing directions counter-clockwise around `v`, starting from the first.
///
/// Directions are split into the half-turn classes {0}, (0, π), {π}, (π, 2π)
/// relative to the first one and ordered within a class by the sign of the
/// turn between them. Two distinct edges never share a direction in a valid map.
fn sort_ccw(v: &Vec3, dirs: &mut [(HalfEdgeId, Vec3)]) {
    if dirs.len() < 3 {
        return;
    }
    let t0 = dirs[0].1.clone();
    let class = |t: &Vec3| -> u8 {
        match sign(&det(v, &t0, t)) {
            1 => 1,
            -1 => 3,
            _ => {
                if sign(&dot(&t0, t)) > 0 {
                    0
                } else {
                    2
                }
            }
        }
    };
    dirs.sort_by(|a, b| {
        let (ca, cb) = (class(&a.1), class(&b.1));
        ca.cmp(&cb).then_with(|| match sign(&det(v, &a.1, &b.1)) {
            1 => std::cmp::Ordering::Less,
            -1 => std::cmp::Ordering::Greater,
            _ => a.0.cmp(&b.0),
        })
    });
}

/// Incremental construction of a [`SurfaceMap`] from geometric edges.
#[derive(Default)]
pub struct MapBuilder {
    vertices: Vec<Vertex>,
    index: HashMap<ProjRay, VertexId>,
    edges: Vec<(VertexId, VertexId, Option<Provenance>)>,
    loops: Vec<LoopInfo>,
}

impl MapBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_loop(&mut self, curve: CurveLabel, loop_id: usize, kind: LoopKind) {
        self.loops.push(LoopInfo { curve, loop_id, kind });
    }

    /// Returns the vertex at `ray`, creating it with `mark` if new.
    pub fn vertex(&mut self, ray: &ProjRay, mark: VertexMark) -> VertexId {
        if let Some(&v) = self.index.get(ray) {
            return v;
        }
        let id = self.vertices.len();
        self.vertices.push(Vertex { ray: ray.clone(), mark });
        self.index.insert(ray.clone(), id);
        id
    }

    /// Adds the edge `from -> to`; `prov` describes the half-edge in this direction.
    pub fn edge(&mut self, from: VertexId, to: VertexId, prov: Option<Provenance>) {
        self.edges.push((from, to, prov));
    }

    pub fn finish(self) -> Result<SurfaceMap, StructureError> {
        let mut half_edges = Vec::with_capacity(self.edges.len() * 2);
        let mut by_ends: HashMap<(VertexId, VertexId), HalfEdgeId> = HashMap::new();
        for &(a, b, prov) in &self.edges {
            let h = half_edges.len();
            if by_ends.insert((a, b), h).is_some() || by_ends.insert((b, a), h + 1).is_some() {
                return Err(StructureError::DuplicateEdge(a, b));
            }
            half_edges.push(HalfEdge { origin: a, next_around: h, prev_around: h, provenance: prov, antipode: h });
            half_edges.push(HalfEdge {
                origin: b,
                next_around: h + 1,
                prev_around: h + 1,
                provenance: prov.map(Provenance::reversed),
                antipode: h + 1,
            });
        }
        let mut around: Vec<Vec<(HalfEdgeId, Vec3)>> = vec![Vec::new(); self.vertices.len()];
        for (h, he) in half_edges.iter().enumerate() {
            let v = &self.vertices[he.origin].ray;
            let w = &self.vertices[half_edges[h ^ 1].origin].ray;
            around[he.origin].push((h, tangent(v.coords(), w.coords())));
        }
        for (v, dirs) in around.iter_mut().enumerate() {
            sort_ccw(self.vertices[v].ray.coords(), dirs);
            let k = dirs.len();
            for i in 0..k {
                let h = dirs[i].0;
                half_edges[h].next_around = dirs[(i + 1) % k].0;
                half_edges[h].prev_around = dirs[(i + k - 1) % k].0;
            }
        }
        for h in 0..half_edges.len() {
            let a = self.index.get(&self.vertices[half_edges[h].origin].ray.antipode());
            let b = self.index.get(&self.vertices[half_edges[h ^ 1].origin].ray.antipode());
            let anti = match (a, b) {
                (Some(&a), Some(&b)) => by_ends.get(&(a, b)).copied(),
                _ => None,
            };
            half_edges[h].antipode = anti.ok_or(StructureError::MissingAntipode(h))?;
        }
        Ok(SurfaceMap { vertices: self.vertices, half_edges, loops: self.loops })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_arrangement, CurveInput, PLLoop};

    fn r(x: i64, y: i64, z: i64) -> ProjRay {
        ProjRay::new(x, y, z).unwrap()
    }

    pub(crate) fn square(label: CurveLabel, cx: i64, cy: i64, h: i64) -> CurveInput {
        let l = PLLoop::oval(vec![r(cx + h, cy + h, 1), r(cx - h, cy + h, 1), r(cx - h, cy - h, 1), r(cx + h, cy - h, 1)]).unwrap();
        CurveInput { label, degree: 2, loops: vec![l], type_one: true }
    }

    #[test]
    fn circuits_of_single_oval() {
        let m = build_arrangement(&[square(CurveLabel::A, 0, 0, 1)]).unwrap();
        let c = m.boundary_circuits();
        assert_eq!(c.len(), 4);
        assert_eq!(c.iter().map(Vec::len).sum::<usize>(), m.half_edge_count());
    }

    #[test]
    fn empty_map_has_no_circuits() {
        let m = SurfaceMap::default();
        assert!(m.boundary_circuits().is_empty());
        assert!(m.validate().all_passed());
    }

    #[test]
    fn validate_arrangements() {
        let m = build_arrangement(&[square(CurveLabel::A, 0, 0, 1)]).unwrap();
        let d = m.validate();
        assert!(d.all_passed(), "{:?}", d);
        // two circles, four boundary circuits, three faces: V - E + F = 1 + C
        assert_eq!(m.graph_components().count, 2);
        assert_eq!(m.boundary_circuits().len(), 4);
        assert_eq!((m.vertex_count(), m.edge_count()), (8, 8));

        let m = build_arrangement(&[square(CurveLabel::A, 0, 0, 2), square(CurveLabel::B, 3, 1, 2)]).unwrap();
        assert!(m.validate().all_passed());
    }

    #[test]
    fn corrupted_involution_detected() {
        let mut m = build_arrangement(&[square(CurveLabel::A, 0, 0, 1)]).unwrap();
        let a0 = m.half_edges[0].antipode;
        let a2 = m.half_edges[2].antipode;
        m.half_edges[0].antipode = a2;
        m.half_edges[2].antipode = a0;
        let d = m.validate();
        assert!(!d.get("antipodal involution").unwrap().passed);
    }

    #[test]
    fn crossing_rotation_alternates_curves() {
        let m = build_arrangement(&[square(CurveLabel::A, 0, 0, 2), square(CurveLabel::B, 3, 1, 2)]).unwrap();
        for v in m.crossing_vertices() {
            let out = m.outgoing(v);
            assert_eq!(out.len(), 4);
            for i in 0..4 {
                let a = m.half_edge(out[i]).provenance.unwrap().curve;
                let b = m.half_edge(out[(i + 1) % 4]).provenance.unwrap().curve;
                assert_ne!(a, b);
            }
        }
    }
}
