use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use super::map::{HalfEdgeId, SurfaceMap};
use super::raycast::{hits_to, left_sample, reference_point};
use crate::geometry::{Arc, ProjRay};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RegionError {
    #[error("vertex {0} has degree {1}; region extraction needs an embedded curve")]
    NotEmbedded(usize, usize),
    #[error("expected exactly one antipodally invariant component, found {0}")]
    InvariantCount(usize),
    #[error("inconsistent antipodal action on complement components")]
    Antipode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    /// A one-sided component has the same region on both sides.
    Both,
}

/// A circle of the curve on S², seen as its two boundary circuits.
#[derive(Clone, Debug, Serialize)]
pub struct Circle {
    /// `circuits[0]` contains the smallest half-edge of the circle and is the
    /// canonical direction; `circuits[1]` runs the other way.
    pub circuits: [usize; 2],
    pub antipode: usize,
    pub curve_component: usize,
}

/// A component of the curve on ℝP²: an oval (two lifted circles) or a
/// one-sided component (one centrally symmetric circle).
#[derive(Clone, Debug, Serialize)]
pub struct CurveComponent {
    pub circles: Vec<usize>,
    pub one_sided: bool,
}

/// A connected component of S² minus the curve.
#[derive(Clone, Debug, Serialize)]
pub struct S2Component {
    pub circuits: Vec<usize>,
    pub chi: i64,
    pub antipode: usize,
    pub region: usize,
    #[serde(skip)]
    pub sample: ProjRay,
}

#[derive(Clone, Debug, Serialize)]
pub struct Region {
    pub id: usize,
    pub components: Vec<usize>,
    pub chi: i64,
    pub orientable: bool,
    /// Adjacent curve components, with the side on which this region lies
    /// relative to the canonical direction of the component's first circle.
    pub adjacent: Vec<(usize, Side)>,
}

/// Complement regions of an embedded curve system on ℝP² and their lifts.
#[derive(Clone, Debug, Serialize)]
pub struct RegionSet {
    pub circuits: Vec<Vec<HalfEdgeId>>,
    pub circles: Vec<Circle>,
    pub curve_components: Vec<CurveComponent>,
    pub components: Vec<S2Component>,
    pub regions: Vec<Region>,
    #[serde(skip)]
    circuit_of_half_edge: Vec<usize>,
    #[serde(skip)]
    component_of_circuit: Vec<usize>,
}

impl RegionSet {
    pub fn circuit_of(&self, h: HalfEdgeId) -> usize {
        self.circuit_of_half_edge[h]
    }

    /// S² component on the left of half-edge `h`.
    pub fn component_left_of(&self, h: HalfEdgeId) -> usize {
        self.component_of_circuit[self.circuit_of_half_edge[h]]
    }

    pub fn component_of_circuit(&self, c: usize) -> usize {
        self.component_of_circuit[c]
    }

    pub fn region_left_of(&self, h: HalfEdgeId) -> usize {
        self.components[self.component_left_of(h)].region
    }

    pub fn non_orientable(&self) -> Option<usize> {
        self.regions.iter().position(|r| !r.orientable)
    }

    pub fn invariant_component(&self) -> Option<usize> {
        (0..self.components.len()).find(|&c| self.components[c].antipode == c)
    }

    pub fn chi_sum_rp2(&self) -> i64 {
        self.regions.iter().map(|r| r.chi).sum()
    }

    pub fn chi_sum_s2(&self) -> i64 {
        self.components.iter().map(|c| c.chi).sum()
    }

    /// The two S² components separated by a circle: (left, right) of its canonical direction.
    pub fn circle_sides(&self, circle: usize) -> (usize, usize) {
        let [a, b] = self.circles[circle].circuits;
        (self.component_of_circuit[a], self.component_of_circuit[b])
    }
}

/// Builds the geometric arcs of every edge (edge `k` runs along half-edge `2k`).
pub(crate) fn edge_arcs(map: &SurfaceMap) -> Vec<Arc> {
    map.edge_rays().into_iter().map(|(a, b)| Arc::new(a, b).expect("edges are minor arcs")).collect()
}

/// Complement components of an embedded curve system (all vertices of degree 2).
///
/// Circuits are grouped into S² components by exact ray casting: two circuits
/// bound the same component iff their sample points lie on the same side of
/// every circle, where sides are decided by the crossing parity of a generic
/// path to a fixed reference point.
pub fn regions(map: &SurfaceMap) -> Result<RegionSet, RegionError> {
    for v in 0..map.vertex_count() {
        let d = map.degree(v);
        if d != 2 {
            return Err(RegionError::NotEmbedded(v, d));
        }
    }
    let circuits = map.boundary_circuits();
    let mut circuit_of_half_edge = vec![0; map.half_edge_count()];
    for (i, c) in circuits.iter().enumerate() {
        for &h in c {
            circuit_of_half_edge[h] = i;
        }
    }

    // Circles, in order of their smallest half-edge.
    let mut circle_of_circuit = vec![usize::MAX; circuits.len()];
    let mut circles: Vec<Circle> = Vec::new();
    for h in 0..map.half_edge_count() {
        let c = circuit_of_half_edge[h];
        if circle_of_circuit[c] != usize::MAX {
            continue;
        }
        let other = circuit_of_half_edge[map.twin(h)];
        let id = circles.len();
        circle_of_circuit[c] = id;
        circle_of_circuit[other] = id;
        circles.push(Circle { circuits: [c, other], antipode: usize::MAX, curve_component: usize::MAX });
    }
    for i in 0..circles.len() {
        let h = circuits[circles[i].circuits[0]][0];
        circles[i].antipode = circle_of_circuit[circuit_of_half_edge[map.antipode(h)]];
    }
    let mut curve_components: Vec<CurveComponent> = Vec::new();
    for i in 0..circles.len() {
        if circles[i].curve_component != usize::MAX {
            continue;
        }
        let a = circles[i].antipode;
        let id = curve_components.len();
        circles[i].curve_component = id;
        circles[a].curve_component = id;
        curve_components.push(if a == i {
            CurveComponent { circles: vec![i], one_sided: true }
        } else {
            CurveComponent { circles: vec![i, a], one_sided: false }
        });
    }

    let edges = edge_arcs(map);
    let circle_of_edge: Vec<usize> = (0..map.edge_count()).map(|e| circle_of_circuit[circuit_of_half_edge[2 * e]]).collect();

    // Side vectors.
    let reference = reference_point(&edges);
    let words = circles.len().div_ceil(64).max(1);
    let mut groups: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    let mut samples = Vec::with_capacity(circuits.len());
    for (ci, c) in circuits.iter().enumerate() {
        let h = c[0];
        let sample = left_sample(&edges, h / 2, h % 2 == 0);
        let mut bits = vec![0u64; words];
        for hit in hits_to(&sample, &reference, &edges) {
            let k = circle_of_edge[hit.edge];
            bits[k / 64] ^= 1 << (k % 64);
        }
        groups.entry(bits).or_default().push(ci);
        samples.push(sample);
    }

    let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
    for g in &mut groups {
        g.sort_by_key(|&c| circuits[c].iter().min().copied());
    }
    groups.sort_by_key(|g| circuits[g[0]].iter().min().copied());

    let mut component_of_circuit = vec![0; circuits.len()];
    let mut components: Vec<S2Component> = Vec::new();
    if circuits.is_empty() {
        components.push(S2Component {
            circuits: Vec::new(),
            chi: 2,
            antipode: 0,
            region: usize::MAX,
            sample: ProjRay::new(0, 0, 1).expect("nonzero"),
        });
    }
    for (gi, g) in groups.iter().enumerate() {
        for &c in g {
            component_of_circuit[c] = gi;
        }
        components.push(S2Component {
            circuits: g.clone(),
            chi: 2 - g.len() as i64,
            antipode: usize::MAX,
            region: usize::MAX,
            sample: samples[g[0]].clone(),
        });
    }
    for (gi, g) in groups.iter().enumerate() {
        let mut image = None;
        for &c in g {
            let h = circuits[c][0];
            let ac = circuit_of_half_edge[map.twin(map.antipode(h))];
            let target = component_of_circuit[ac];
            if image.is_some_and(|t| t != target) {
                return Err(RegionError::Antipode);
            }
            image = Some(target);
        }
        components[gi].antipode = image.expect("nonempty group");
    }
    for c in 0..components.len() {
        if components[components[c].antipode].antipode != c {
            return Err(RegionError::Antipode);
        }
    }

    let invariant = (0..components.len()).filter(|&c| components[c].antipode == c).count();
    let has_one_sided = curve_components.iter().any(|c| c.one_sided);
    let expected = usize::from(!has_one_sided);
    if invariant != expected {
        return Err(RegionError::InvariantCount(invariant));
    }

    let mut regions: Vec<Region> = Vec::new();
    for c in 0..components.len() {
        if components[c].region != usize::MAX {
            continue;
        }
        let a = components[c].antipode;
        let id = regions.len();
        components[c].region = id;
        components[a].region = id;
        let b = components[c].circuits.len() as i64;
        let (comps, chi, orientable) = if a == c { (vec![c], (2 - b) / 2, false) } else { (vec![c, a], 2 - b, true) };
        regions.push(Region { id, components: comps, chi, orientable, adjacent: Vec::new() });
    }

    for (k, cc) in curve_components.iter().enumerate() {
        let first = cc.circles[0];
        let [left, right] = circles[first].circuits;
        let rl = components[component_of_circuit[left]].region;
        let rr = components[component_of_circuit[right]].region;
        if cc.one_sided {
            regions[rl].adjacent.push((k, Side::Both));
        } else {
            regions[rl].adjacent.push((k, Side::Left));
            regions[rr].adjacent.push((k, Side::Right));
        }
    }

    Ok(RegionSet { circuits, circles, curve_components, components, regions, circuit_of_half_edge, component_of_circuit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_arrangement, CurveInput, CurveLabel, PLLoop};

    fn r(x: i64, y: i64, z: i64) -> ProjRay {
        ProjRay::new(x, y, z).unwrap()
    }

    fn sq(cx: i64, cy: i64, h: i64) -> PLLoop {
        PLLoop::oval(vec![r(cx + h, cy + h, 1), r(cx - h, cy + h, 1), r(cx - h, cy - h, 1), r(cx + h, cy - h, 1)]).unwrap()
    }

    fn curve(loops: Vec<PLLoop>) -> CurveInput {
        CurveInput { label: CurveLabel::A, degree: 4, loops, type_one: true }
    }

    fn chis(rs: &RegionSet) -> Vec<i64> {
        let mut v: Vec<i64> = rs.regions.iter().map(|r| r.chi).collect();
        v.sort();
        v
    }

    #[test]
    fn single_oval() {
        let m = build_arrangement(&[curve(vec![sq(0, 0, 1)])]).unwrap();
        let rs = regions(&m).unwrap();
        assert_eq!(rs.components.len(), 3);
        assert_eq!(rs.regions.len(), 2);
        let disk = rs.regions.iter().find(|r| r.orientable).unwrap();
        let mob = rs.regions.iter().find(|r| !r.orientable).unwrap();
        assert_eq!((disk.chi, mob.chi), (1, 0));
        assert_eq!(rs.chi_sum_rp2(), 1);
        assert_eq!(rs.chi_sum_s2(), 2);
    }

    #[test]
    fn nested_ovals() {
        let m = build_arrangement(&[curve(vec![sq(0, 0, 5), sq(0, 0, 2)])]).unwrap();
        let rs = regions(&m).unwrap();
        assert_eq!(chis(&rs), vec![0, 0, 1]);
        assert_eq!(rs.regions.iter().filter(|r| !r.orientable).count(), 1);
    }

    #[test]
    fn disjoint_ovals() {
        let m = build_arrangement(&[curve(vec![sq(0, 0, 2), sq(10, 0, 2), sq(0, 10, 3)])]).unwrap();
        let rs = regions(&m).unwrap();
        assert_eq!(chis(&rs), vec![-2, 1, 1, 1]);
        assert_eq!(rs.chi_sum_rp2(), 1);
    }

    #[test]
    fn pseudoline_alone() {
        let j = PLLoop::one_sided(vec![r(1, 0, 0), r(3, -4, 1), r(-3, -4, 1)]).unwrap();
        let c = CurveInput { label: CurveLabel::A, degree: 1, loops: vec![j], type_one: true };
        let rs = regions(&build_arrangement(&[c]).unwrap()).unwrap();
        assert_eq!(rs.regions.len(), 1);
        assert_eq!(rs.regions[0].chi, 1);
        assert!(rs.regions[0].orientable);
        assert_eq!(rs.regions[0].adjacent, vec![(0, Side::Both)]);
    }

    #[test]
    fn empty_curve() {
        let rs = regions(&SurfaceMap::default()).unwrap();
        assert_eq!(rs.regions.len(), 1);
        assert_eq!(rs.regions[0].chi, 1);
        assert!(!rs.regions[0].orientable);
    }

    #[test]
    fn each_oval_has_two_sides() {
        let m = build_arrangement(&[curve(vec![sq(0, 0, 6), sq(-2, 0, 1), sq(2, 0, 1), sq(20, 0, 1)])]).unwrap();
        let rs = regions(&m).unwrap();
        for k in 0..rs.curve_components.len() {
            let sides: Vec<_> = rs.regions.iter().flat_map(|r| r.adjacent.iter().filter(|a| a.0 == k).map(move |a| (r.id, a.1))).collect();
            assert_eq!(sides.len(), 2);
            assert_ne!(sides[0].0, sides[1].0);
        }
    }

    #[test]
    fn regions_are_canonically_ordered() {
        let m = build_arrangement(&[curve(vec![sq(0, 0, 6), sq(-2, 0, 1), sq(2, 0, 1)])]).unwrap();
        let a = regions(&m).unwrap();
        let b = regions(&m).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
