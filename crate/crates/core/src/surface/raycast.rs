//! Exact great-arc ray casting against a set of edges.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::geometry::{add, cross, intersect_arcs, orient, scale, Arc, ProjRay};

/// Deterministic stream of small "generic-looking" rays used as reference
/// points, waypoints and poles. Callers re-draw until a candidate is generic.
pub(crate) fn candidate_rays() -> impl Iterator<Item = ProjRay> {
    (0u64..).filter_map(|i| {
        let a = ((i * 7919 + 13) % 61) as i64 - 30;
        let b = ((i * 104_729 + 7) % 67) as i64 - 33;
        let c = ((i * 1_299_709 + 3) % 71) as i64 - 35;
        ProjRay::new(a, b, c).ok()
    })
}

/// True if `p` lies on none of the great circles supporting `edges`.
pub(crate) fn off_all_circles(p: &ProjRay, edges: &[Arc]) -> bool {
    edges.iter().all(|e| orient(&e.from, &e.to, p) != 0)
}

/// A point just to the left of the interior of edge `e` (directed `from -> to`,
/// or reversed when `forward` is false), such that the short arc from it back
/// to the edge meets no other edge.
pub(crate) fn left_sample(edges: &[Arc], e: usize, forward: bool) -> ProjRay {
    let (u, w) = if forward { (&edges[e].from, &edges[e].to) } else { (&edges[e].to, &edges[e].from) };
    let m = add(u.coords(), w.coords());
    let n = cross(u.coords(), w.coords());
    let mid = ProjRay::from_vec_unchecked(m.clone());
    let nmax = n.iter().map(|x| x.abs()).max().unwrap_or_default();
    let mut k: BigInt = (nmax + 1u32) * 16u32;
    loop {
        let p = ProjRay::from_vec_unchecked(add(&scale(&m, &k), &n));
        let probe = Arc::new(p.clone(), mid.clone()).expect("sample is near the edge");
        let clear = edges.iter().enumerate().all(|(i, other)| i == e || matches!(intersect_arcs(&probe, other), Ok(None)));
        if clear {
            return p;
        }
        k *= 2u32;
    }
}

/// One transverse crossing of a path with an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct PathHit {
    pub edge: usize,
    /// Travelling along the path, the edge (directed `from -> to`) is crossed
    /// from its left side to its right side.
    pub left_to_right: bool,
}

/// Crossings of the polygonal path `points[0] -> points[1] -> ...` with the
/// edges, or `None` if some leg is degenerate or touches an edge non-transversally.
pub(crate) fn path_hits(points: &[ProjRay], edges: &[Arc]) -> Option<Vec<PathHit>> {
    let mut hits = Vec::new();
    for leg in points.windows(2) {
        let arc = Arc::new(leg[0].clone(), leg[1].clone()).ok()?;
        for (i, e) in edges.iter().enumerate() {
            match intersect_arcs(&arc, e) {
                Ok(None) => {}
                Ok(Some(_)) => hits.push(PathHit { edge: i, left_to_right: orient(&e.from, &e.to, &leg[0]) > 0 }),
                Err(_) => return None,
            }
        }
    }
    Some(hits)
}

/// Crossings of some generic path from `start` to `target`: the direct arc
/// when possible, otherwise a detour through a candidate waypoint.
pub(crate) fn hits_to(start: &ProjRay, target: &ProjRay, edges: &[Arc]) -> Vec<PathHit> {
    if let Some(h) = path_hits(&[start.clone(), target.clone()], edges) {
        return h;
    }
    for w in candidate_rays() {
        if let Some(h) = path_hits(&[start.clone(), w, target.clone()], edges) {
            return h;
        }
    }
    unreachable!("candidate stream is infinite")
}

/// Signed crossing count: (left-to-right) minus (right-to-left) crossings.
pub(crate) fn signed_count(hits: &[PathHit], positive: impl Fn(usize) -> bool) -> i64 {
    hits.iter()
        .map(|h| {
            // `positive(edge)` says whether the curve runs along the edge's stored direction.
            let l2r = h.left_to_right == positive(h.edge);
            if l2r {
                1
            } else {
                -1
            }
        })
        .sum()
}

/// Reference point off every supporting great circle.
pub(crate) fn reference_point(edges: &[Arc]) -> ProjRay {
    candidate_rays().find(|p| off_all_circles(p, edges)).expect("infinite stream")
}
