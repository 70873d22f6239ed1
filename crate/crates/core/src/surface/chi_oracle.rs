//! Euler characteristic of a complement region by cell counting.
//!
//! This is deliberately independent of the boundary-count formula used by
//! [`regions`](super::regions): the curve is re-realized geometrically with
//! every corner cut off (so that smoothing joints sharing a point come apart),
//! overlaid with great circles through a generic pole and one vertex of each
//! circle (so that every face is a disk), and the open cells lying inside the
//! region are counted.

use num_bigint::BigInt;

use super::map::{HalfEdgeId, MapBuilder, SurfaceMap, VertexMark};
use super::raycast::candidate_rays;
use super::regions::RegionSet;
use crate::geometry::{add, cmp_along, intersect_arcs, on_arc, orient, scale, Arc, ProjRay};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tag {
    /// Shortened copy of an edge of the input, directed like half-edge `h`.
    Curve(HalfEdgeId),
    CornerCut,
    Meridian,
}

struct Segment {
    arc: Arc,
    tag: Tag,
}

fn point_near(v: &ProjRay, toward: &ProjRay, k: &BigInt) -> ProjRay {
    ProjRay::from_vec(add(&scale(v.coords(), k), toward.coords())).expect("nonzero")
}

/// Vertices whose two edges continue along one great circle need no cut.
fn is_straight(map: &SurfaceMap, v: usize) -> bool {
    let out = map.outgoing(v);
    orient(map.dest_ray(out[0]), &map.vertex(v).ray, map.dest_ray(out[1])) == 0
}

fn corner_cut(map: &SurfaceMap, k: &BigInt) -> Vec<Segment> {
    let end = |v: usize, toward: &ProjRay| {
        if is_straight(map, v) {
            map.vertex(v).ray.clone()
        } else {
            point_near(&map.vertex(v).ray, toward, k)
        }
    };
    let mut segs = Vec::new();
    for e in 0..map.edge_count() {
        let (u, w) = (map.origin(2 * e), map.dest(2 * e));
        let arc = Arc::new(end(u, map.dest_ray(2 * e)), end(w, map.origin_ray(2 * e))).expect("short sub-arc");
        segs.push(Segment { arc, tag: Tag::Curve(2 * e) });
    }
    for v in 0..map.vertex_count() {
        if is_straight(map, v) {
            continue;
        }
        let out = map.outgoing(v);
        let x = &map.vertex(v).ray;
        let a = point_near(x, map.dest_ray(out[0]), k);
        let b = point_near(x, map.dest_ray(out[1]), k);
        segs.push(Segment { arc: Arc::new(a, b).expect("short cut"), tag: Tag::CornerCut });
    }
    segs
}

fn shares_endpoint(a: &Arc, b: &Arc) -> bool {
    a.from == b.from || a.from == b.to || a.to == b.from || a.to == b.to
}

/// Two arcs with a common endpoint overlap iff they leave it in the same direction.
fn overlaps_at_shared_end(a: &Arc, b: &Arc) -> bool {
    let a_end = if a.from == b.from || a.from == b.to { &a.to } else { &a.from };
    let b_end = if b.from == a.from || b.from == a.to { &b.to } else { &b.from };
    a_end == b_end || on_arc(a, b_end) || on_arc(b, a_end)
}

/// Pairwise split points, or `None` if two segments meet non-transversally.
fn split_points(segs: &[Segment]) -> Option<Vec<Vec<ProjRay>>> {
    let mut pts = vec![Vec::new(); segs.len()];
    for i in 0..segs.len() {
        for j in (i + 1)..segs.len() {
            let (a, b) = (&segs[i].arc, &segs[j].arc);
            if shares_endpoint(a, b) {
                if overlaps_at_shared_end(a, b) {
                    return None;
                }
                continue;
            }
            match intersect_arcs(a, b) {
                Ok(None) => {}
                Ok(Some(p)) => {
                    pts[i].push(p.clone());
                    pts[j].push(p);
                }
                Err(_) => return None,
            }
        }
    }
    Some(pts)
}

fn embedded(segs: &[Segment]) -> bool {
    split_points(segs).is_some_and(|p| p.iter().all(Vec::is_empty))
}

/// Meridians through `pole` and one vertex of each curve circle, as full great circles.
fn meridians(pole: &ProjRay, through: &[ProjRay]) -> Vec<Segment> {
    let mut segs = Vec::new();
    let anti = pole.antipode();
    for v in through {
        let ring = [pole.clone(), v.clone(), anti.clone(), v.antipode()];
        for i in 0..4 {
            let arc = Arc::new(ring[i].clone(), ring[(i + 1) % 4].clone()).expect("generic pole");
            segs.push(Segment { arc, tag: Tag::Meridian });
        }
    }
    segs
}

struct Overlay {
    map: SurfaceMap,
    tags: Vec<Tag>,
}

fn overlay(segs: &[Segment]) -> Option<Overlay> {
    let mut splits = split_points(segs)?;
    let mut b = MapBuilder::new();
    let mut tags = Vec::new();
    for (i, s) in segs.iter().enumerate() {
        let n = s.arc.normal();
        let mut pts = std::mem::take(&mut splits[i]);
        pts.sort_by(|x, y| cmp_along(&n, x, y));
        let mut chain = vec![b.vertex(&s.arc.from, VertexMark::Auxiliary)];
        chain.extend(pts.iter().map(|p| b.vertex(p, VertexMark::Auxiliary)));
        chain.push(b.vertex(&s.arc.to, VertexMark::Auxiliary));
        for w in chain.windows(2) {
            b.edge(w[0], w[1], None);
            tags.push(s.tag);
        }
    }
    let map = b.finish().ok()?;
    Some(Overlay { map, tags })
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let n = p[y];
        p[y] = r;
        y = n;
    }
    r
}

/// Euler characteristic on ℝP² of `region`, by counting open cells of a refinement.
pub fn chi_oracle(map: &SurfaceMap, rs: &RegionSet, region: usize) -> i64 {
    let reg = &rs.regions[region];
    if map.half_edge_count() == 0 {
        return 1;
    }

    let mut k = BigInt::from(64);
    let curve = loop {
        let segs = corner_cut(map, &k);
        if embedded(&segs) {
            break segs;
        }
        k *= 4;
    };

    // One vertex per curve component; its meridian also meets the antipodal circle.
    let through: Vec<ProjRay> =
        rs.curve_components.iter().map(|cc| curve[rs.circuits[rs.circles[cc.circles[0]].circuits[0]][0] / 2].arc.from.clone()).collect();

    let ov = candidate_rays()
        .filter(|p| {
            curve.iter().all(|s| orient(&s.arc.from, &s.arc.to, p) != 0) && through.iter().all(|v| !(v == p || v.is_antipode_of(p)))
        })
        .find_map(|pole| {
            let mut segs: Vec<Segment> = curve.iter().map(|s| Segment { arc: s.arc.clone(), tag: s.tag }).collect();
            segs.extend(meridians(&pole, &through));
            overlay(&segs)
        })
        .expect("some pole is generic");

    // Group faces across meridian edges into open S² components.
    let om = &ov.map;
    let circuits = om.boundary_circuits();
    let mut face_of = vec![0; om.half_edge_count()];
    for (i, c) in circuits.iter().enumerate() {
        for &h in c {
            face_of[h] = i;
        }
    }
    let mut parent: Vec<usize> = (0..circuits.len()).collect();
    for e in 0..om.edge_count() {
        if ov.tags[e] == Tag::Meridian {
            let (a, b) = (find(&mut parent, face_of[2 * e]), find(&mut parent, face_of[2 * e + 1]));
            parent[a] = b;
        }
    }

    // The component left of the original half-edge bounding this region.
    let comp = reg.components[0];
    let h0 = rs.circuits[rs.components[comp].circuits[0]][0];
    let (e0, fwd) = (h0 / 2, h0.is_multiple_of(2));
    let sub = (0..om.edge_count()).find(|&e| ov.tags[e] == Tag::Curve(2 * e0)).expect("provenance kept");
    let target = find(&mut parent, face_of[if fwd { 2 * sub } else { 2 * sub + 1 }]);

    let faces = (0..circuits.len()).filter(|&f| find(&mut parent, f) == target).count() as i64;
    let edges = (0..om.edge_count()).filter(|&e| ov.tags[e] == Tag::Meridian && find(&mut parent, face_of[2 * e]) == target).count() as i64;
    // Interior vertices: those all of whose incident edges are meridians.
    let verts = (0..om.vertex_count())
        .filter(|&v| {
            let out = om.outgoing(v);
            out.iter().all(|&h| ov.tags[h / 2] == Tag::Meridian) && find(&mut parent, face_of[out[0]]) == target
        })
        .count() as i64;
    let chi_s2 = faces - edges + verts;
    if reg.orientable {
        chi_s2
    } else {
        chi_s2 / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_arrangement, CurveInput, CurveLabel, PLLoop};
    use crate::surface::regions;

    fn r(x: i64, y: i64, z: i64) -> ProjRay {
        ProjRay::new(x, y, z).unwrap()
    }

    fn sq(cx: i64, cy: i64, h: i64) -> PLLoop {
        PLLoop::oval(vec![r(cx + h, cy + h, 1), r(cx - h, cy + h, 1), r(cx - h, cy - h, 1), r(cx + h, cy - h, 1)]).unwrap()
    }

    fn check(loops: Vec<PLLoop>) -> Vec<(i64, i64)> {
        let c = CurveInput { label: CurveLabel::A, degree: 2 * loops.len() as u32, loops, type_one: true };
        let m = build_arrangement(&[c]).unwrap();
        let rs = regions(&m).unwrap();
        let mut out: Vec<_> = (0..rs.regions.len()).map(|i| (rs.regions[i].chi, chi_oracle(&m, &rs, i))).collect();
        out.sort();
        out
    }

    #[test]
    fn disk_and_mobius() {
        assert_eq!(check(vec![sq(0, 0, 1)]), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn annulus() {
        assert_eq!(check(vec![sq(0, 0, 5), sq(0, 0, 1)]), vec![(0, 0), (0, 0), (1, 1)]);
    }

    #[test]
    fn pair_of_pants_and_far_ovals() {
        let v = check(vec![sq(0, 0, 6), sq(-3, 0, 1), sq(3, 0, 1), sq(30, 0, 2)]);
        assert!(v.iter().all(|(a, b)| a == b), "{v:?}");
    }

    #[test]
    fn pseudoline() {
        let j = PLLoop::one_sided(vec![r(1, 0, 0), r(3, -4, 1), r(-3, -4, 1)]).unwrap();
        let c = CurveInput { label: CurveLabel::A, degree: 1, loops: vec![j], type_one: true };
        let m = build_arrangement(&[c]).unwrap();
        let rs = regions(&m).unwrap();
        assert_eq!(chi_oracle(&m, &rs, 0), 1);
    }
}
