//! Resolution of the A×B crossings of an arrangement into an embedded curve C.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{CurveLabel, LoopKind};
use crate::surface::{HalfEdgeId, SurfaceMap, Vertex, VertexId, VertexMark};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SmoothingError {
    #[error("the union of the curves is not null-homologous (degrees of different parity)")]
    NotNullHomologous,
    #[error("a one-sided component survived smoothing")]
    OneSidedSurvives,
    #[error("no orientation sign given for curve {0:?} loop {1}")]
    MissingSign(CurveLabel, usize),
    #[error("crossing {0} does not exist")]
    NoSuchCrossing(usize),
    #[error("pattern list has length {got}, arrangement has {expected} crossings")]
    PatternCount { got: usize, expected: usize },
    #[error("malformed crossing at vertex {0}")]
    MalformedCrossing(VertexId),
}

/// Orientation sign (+1 along the vertex order, −1 against it) per loop of each curve.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrientationAssignment {
    pub a: Vec<i8>,
    pub b: Vec<i8>,
}

impl OrientationAssignment {
    pub fn all_positive(loops_a: usize, loops_b: usize) -> Self {
        OrientationAssignment { a: vec![1; loops_a], b: vec![1; loops_b] }
    }

    pub fn sign(&self, curve: CurveLabel, loop_id: usize) -> Option<i8> {
        match curve {
            CurveLabel::A => self.a.get(loop_id).copied(),
            CurveLabel::B => self.b.get(loop_id).copied(),
        }
    }

    pub fn reversed(&self, curve: CurveLabel) -> Self {
        let mut out = self.clone();
        let v = match curve {
            CurveLabel::A => &mut out.a,
            CurveLabel::B => &mut out.b,
        };
        v.iter_mut().for_each(|s| *s = -*s);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingPattern {
    Compatible,
    CuspedInward,
    CuspedOutward,
}

/// A cusp of C: the horn face lies left of `horn`, the outer face left of `outer`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CuspMark {
    pub vertex: VertexId,
    pub horn: HalfEdgeId,
    pub outer: HalfEdgeId,
    /// Index of the crossing on ℝP² this cusp came from.
    pub crossing: usize,
    /// True for the cusps at the representative (smaller-id) lift of the crossing.
    pub primary: bool,
}

/// The smoothed curve C on S²: every vertex has degree 2.
#[derive(Clone, Debug)]
pub struct SmoothedCurve {
    pub map: SurfaceMap,
    /// `positive[e]`: C runs along half-edge `2e` (rather than `2e + 1`).
    pub positive: Vec<bool>,
    pub cusps: Vec<CuspMark>,
    pub patterns: Vec<CrossingPattern>,
    /// Which adjacent pairing was used at each crossing lift; equal keys give
    /// identical maps up to vertex marks.
    pub pairing: Vec<u8>,
}

impl SmoothedCurve {
    /// Whether C runs along half-edge `h`.
    pub fn runs_along(&self, h: HalfEdgeId) -> bool {
        self.positive[h / 2] ^ (h % 2 == 1)
    }

    /// Number of former crossings on ℝP².
    pub fn crossings(&self) -> usize {
        self.patterns.len()
    }
}

/// An oriented component of C on ℝP²: its lifted circles as half-edge cycles
/// running along C.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientedOval {
    pub lifts: Vec<Vec<HalfEdgeId>>,
    pub cusps: usize,
}

fn direction_of(map: &SurfaceMap, orient: &OrientationAssignment, h: HalfEdgeId) -> Result<bool, SmoothingError> {
    let p = map.half_edge(h).provenance.expect("curve edges carry provenance");
    let s = orient.sign(p.curve, p.loop_id).ok_or(SmoothingError::MissingSign(p.curve, p.loop_id))?;
    Ok(p.forward ^ (s < 0))
}

/// Smooths every crossing with the given per-crossing patterns (indexed like
/// [`SurfaceMap::quotient_crossings`]).
pub fn smooth(map: &SurfaceMap, orient: &OrientationAssignment, patterns: &[CrossingPattern]) -> Result<SmoothedCurve, SmoothingError> {
    let one_sided = map.loops().iter().filter(|l| l.kind == LoopKind::OneSided).count();
    if one_sided % 2 == 1 {
        return Err(SmoothingError::NotNullHomologous);
    }
    let crossings = map.quotient_crossings();
    if patterns.len() != crossings.len() {
        return Err(SmoothingError::PatternCount { got: patterns.len(), expected: crossings.len() });
    }

    let mut out = map.clone();
    let mut dir = Vec::with_capacity(map.edge_count());
    for e in 0..map.edge_count() {
        dir.push(direction_of(map, orient, 2 * e)?);
    }
    let outward = |h: HalfEdgeId| dir[h / 2] ^ (h % 2 == 1);

    let mut cusps = Vec::new();
    let mut pairing = Vec::with_capacity(2 * crossings.len());
    for (ci, &(x0, x1)) in crossings.iter().enumerate() {
        for (primary, x) in [(true, x0), (false, x1)] {
            let e = map.outgoing(x);
            if e.len() != 4 {
                return Err(SmoothingError::MalformedCrossing(x));
            }
            // Adjacent pairs (e0,e1),(e2,e3) join an incoming to an outgoing end iff
            // e0 and e1 point different ways; that pairing respects both orientations.
            let first_compatible = outward(e[0]) != outward(e[1]);
            let pattern = patterns[ci];
            let compatible_start = if first_compatible { 0 } else { 1 };
            let start = if pattern == CrossingPattern::Compatible { compatible_start } else { 1 - compatible_start };
            pairing.push(start as u8);
            let pairs = [(e[start], e[(start + 1) % 4]), (e[start + 2], e[(start + 3) % 4])];
            let mark_for = |i: HalfEdgeId, j: HalfEdgeId| match pattern {
                CrossingPattern::Compatible => VertexMark::SmoothingJoint,
                CrossingPattern::CuspedInward => VertexMark::Cusp { horn: i },
                CrossingPattern::CuspedOutward => VertexMark::Cusp { horn: j },
            };
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let v = if k == 0 {
                    x
                } else {
                    out.vertices.push(Vertex { ray: map.vertex(x).ray.clone(), mark: VertexMark::Bend });
                    out.vertices.len() - 1
                };
                let mark = mark_for(i, j);
                out.vertices[v].mark = mark;
                for h in [i, j] {
                    out.half_edges[h].origin = v;
                }
                out.half_edges[i].next_around = j;
                out.half_edges[i].prev_around = j;
                out.half_edges[j].next_around = i;
                out.half_edges[j].prev_around = i;
                if let VertexMark::Cusp { horn } = mark {
                    let outer = if horn == i { j } else { i };
                    cusps.push(CuspMark { vertex: v, horn, outer, crossing: ci, primary });
                }
            }
        }
    }

    let positive = orient_circles(&out, &dir)?;
    Ok(SmoothedCurve { map: out, positive, cusps, patterns: patterns.to_vec(), pairing })
}

/// Chooses a traversal direction for every circle of the smoothed map.
///
/// Each circle follows the original direction of its lowest edge; the
/// antipodal circle is oriented as the antipodal image. Without cusps this
/// reproduces the original directions everywhere.
fn orient_circles(map: &SurfaceMap, dir: &[bool]) -> Result<Vec<bool>, SmoothingError> {
    let n = map.edge_count();
    let mut assigned: Vec<Option<bool>> = vec![None; n];
    let mut cycle_of_edge = vec![0; n];
    for e0 in 0..n {
        if assigned[e0].is_some() {
            continue;
        }
        let start = if dir[e0] { 2 * e0 } else { 2 * e0 + 1 };
        let mut cycle = Vec::new();
        let mut h = start;
        loop {
            cycle.push(h);
            cycle_of_edge[h / 2] = e0 + 1;
            h = map.next(h);
            if h == start {
                break;
            }
        }
        let anti: Vec<HalfEdgeId> = cycle.iter().map(|&h| map.antipode(h)).collect();
        if anti.iter().any(|&a| cycle_of_edge[a / 2] == e0 + 1) {
            return Err(SmoothingError::OneSidedSurvives);
        }
        for &h in cycle.iter().chain(anti.iter()) {
            assigned[h / 2] = Some(h % 2 == 0);
        }
    }
    Ok(assigned.into_iter().map(|a| a.expect("every edge lies on a circle")).collect())
}

pub fn smooth_compatible(map: &SurfaceMap, orient: &OrientationAssignment) -> Result<SmoothedCurve, SmoothingError> {
    let patterns = vec![CrossingPattern::Compatible; map.quotient_crossings().len()];
    smooth(map, orient, &patterns)
}

/// Compatible smoothing everywhere except at `crossing`, which is resolved the other way.
pub fn smooth_cusped(
    map: &SurfaceMap,
    orient: &OrientationAssignment,
    crossing: usize,
    variant: CrossingPattern,
) -> Result<SmoothedCurve, SmoothingError> {
    let mut patterns = vec![CrossingPattern::Compatible; map.quotient_crossings().len()];
    *patterns.get_mut(crossing).ok_or(SmoothingError::NoSuchCrossing(crossing))? = variant;
    smooth(map, orient, &patterns)
}

/// Oriented components of C on ℝP², ordered by their smallest half-edge.
pub fn components_of(c: &SmoothedCurve) -> Vec<OrientedOval> {
    let map = &c.map;
    let mut seen = vec![false; map.edge_count()];
    let mut out = Vec::new();
    for e in 0..map.edge_count() {
        if seen[e] {
            continue;
        }
        let start = if c.positive[e] { 2 * e } else { 2 * e + 1 };
        let lifts: Vec<Vec<HalfEdgeId>> = [start, map.antipode(start)]
            .into_iter()
            .map(|start| {
                let mut cycle = Vec::new();
                let mut h = start;
                loop {
                    seen[h / 2] = true;
                    cycle.push(h);
                    h = map.next(h);
                    if h == start {
                        break cycle;
                    }
                }
            })
            .collect();
        let cusps = lifts[0].iter().filter(|&&h| matches!(map.vertex(map.origin(h)).mark, VertexMark::Cusp { .. })).count();
        out.push(OrientedOval { lifts, cusps });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_arrangement, CurveInput, PLLoop, ProjRay};
    use crate::index::lift_index;
    use crate::surface::regions;

    fn r(x: i64, y: i64, z: i64) -> ProjRay {
        ProjRay::new(x, y, z).unwrap()
    }

    fn sq(cx: i64, cy: i64, h: i64) -> PLLoop {
        PLLoop::oval(vec![r(cx + h, cy + h, 1), r(cx - h, cy + h, 1), r(cx - h, cy - h, 1), r(cx + h, cy - h, 1)]).unwrap()
    }

    fn curve(label: CurveLabel, loops: Vec<PLLoop>) -> CurveInput {
        CurveInput { label, degree: 2, loops, type_one: true }
    }

    fn lens() -> SurfaceMap {
        build_arrangement(&[curve(CurveLabel::A, vec![sq(0, 0, 2)]), curve(CurveLabel::B, vec![sq(2, 1, 2)])]).unwrap()
    }

    fn pseudolines() -> SurfaceMap {
        let a = CurveInput {
            label: CurveLabel::A,
            degree: 1,
            loops: vec![PLLoop::one_sided(vec![r(1, 0, 0), r(5, 0, 1), r(-5, 0, 1)]).unwrap()],
            type_one: true,
        };
        let b = CurveInput {
            label: CurveLabel::B,
            degree: 1,
            loops: vec![PLLoop::one_sided(vec![r(0, 1, 0), r(0, 5, 1), r(0, -5, 1)]).unwrap()],
            type_one: true,
        };
        build_arrangement(&[a, b]).unwrap()
    }

    #[test]
    fn no_crossings_is_identity() {
        let m = build_arrangement(&[curve(CurveLabel::A, vec![sq(0, 0, 1), sq(5, 5, 1).reversed()])]).unwrap();
        let o = OrientationAssignment { a: vec![1, -1], b: vec![] };
        let c = smooth_compatible(&m, &o).unwrap();
        assert!(c.cusps.is_empty() && c.pairing.is_empty());
        assert_eq!(c.map.edge_count(), m.edge_count());
        for e in 0..m.edge_count() {
            assert_eq!(c.positive[e], direction_of(&m, &o, 2 * e).unwrap());
        }
        assert_eq!(components_of(&c).len(), 2);
    }

    #[test]
    fn coherent_ovals_nest() {
        let m = lens();
        assert_eq!(m.quotient_crossings().len(), 2);
        let c = smooth_compatible(&m, &OrientationAssignment::all_positive(1, 1)).unwrap();
        let comps = components_of(&c);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|o| o.lifts.len() == 2 && o.cusps == 0));
        let rs = regions(&c.map).unwrap();
        let idx = lift_index(&c, &rs).unwrap();
        let mut v: Vec<u64> = idx.quotient.clone();
        v.sort();
        assert_eq!(v, vec![0, 1, 2]);
    }

    #[test]
    fn opposite_ovals_give_lunes() {
        let c = smooth_compatible(&lens(), &OrientationAssignment { a: vec![1], b: vec![-1] }).unwrap();
        let rs = regions(&c.map).unwrap();
        let idx = lift_index(&c, &rs).unwrap();
        let mut v: Vec<u64> = idx.quotient.clone();
        v.sort();
        // the lens opens into the outside; the two lunes carry ±1
        assert_eq!(v, vec![0, 1, 1]);
        assert_eq!(components_of(&c).len(), 2);
    }

    #[test]
    fn pseudolines_merge_into_one_oval() {
        let m = pseudolines();
        let c = smooth_compatible(&m, &OrientationAssignment::all_positive(1, 1)).unwrap();
        assert_eq!(components_of(&c).len(), 1);
        let rs = regions(&c.map).unwrap();
        assert_eq!(rs.regions.len(), 2);
        let idx = lift_index(&c, &rs).unwrap();
        let disk = rs.regions.iter().position(|g| g.orientable).unwrap();
        assert_eq!(idx.quotient[disk], 1);
    }

    #[test]
    fn cusps_come_in_antipodal_pairs() {
        let m = lens();
        for variant in [CrossingPattern::CuspedInward, CrossingPattern::CuspedOutward] {
            let c = smooth_cusped(&m, &OrientationAssignment::all_positive(1, 1), 0, variant).unwrap();
            assert_eq!(c.cusps.len(), 4);
            assert_eq!(c.cusps.iter().filter(|k| k.primary).count(), 2);
            for k in &c.cusps {
                assert_eq!(c.map.half_edge(k.horn).origin, k.vertex);
                assert_eq!(c.map.half_edge(k.outer).origin, k.vertex);
                assert!(c.cusps.iter().any(|q| q.crossing == k.crossing
                    && q.primary != k.primary
                    && c.map.vertex(q.vertex).ray.is_antipode_of(&c.map.vertex(k.vertex).ray)));
            }
            // the two crossings are resolved differently, so the ovals merge
            assert_eq!(components_of(&c).len(), 1);
            assert_ne!(c.pairing[0], smooth_compatible(&m, &OrientationAssignment::all_positive(1, 1)).unwrap().pairing[0]);
        }
    }

    #[test]
    fn rejections() {
        let m = lens();
        let o = OrientationAssignment::all_positive(1, 1);
        assert!(matches!(smooth(&m, &o, &[]), Err(SmoothingError::PatternCount { got: 0, expected: 2 })));
        assert!(matches!(smooth_cusped(&m, &o, 5, CrossingPattern::CuspedInward), Err(SmoothingError::NoSuchCrossing(5))));
        assert!(matches!(smooth_compatible(&m, &OrientationAssignment::all_positive(1, 0)), Err(SmoothingError::MissingSign(..))));
        let j = CurveInput {
            label: CurveLabel::A,
            degree: 1,
            loops: vec![PLLoop::one_sided(vec![r(1, 0, 0), r(5, 0, 1), r(-5, 0, 1)]).unwrap()],
            type_one: true,
        };
        let m = build_arrangement(&[j]).unwrap();
        assert!(matches!(smooth_compatible(&m, &OrientationAssignment::all_positive(1, 0)), Err(SmoothingError::NotNullHomologous)));
    }
}
