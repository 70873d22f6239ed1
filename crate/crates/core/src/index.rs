//! The index function of an oriented null-homologous curve.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{add, cross, dot, scale, sign, ProjRay, Vec3};
use crate::smoothing::SmoothedCurve;
use crate::surface::raycast::{candidate_rays, path_hits, signed_count};
use crate::surface::{edge_arcs, RegionSet};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("index propagation is inconsistent at component {0}")]
    Inconsistent(usize),
    #[error("the complement has no antipodally invariant component")]
    NoInvariantComponent,
    #[error("no great circle disjoint from the curve among the candidates")]
    OracleInapplicable,
    #[error("odd signed crossing count {0} between antipodal points")]
    OddCount(i64),
    #[error("sample point lies on the curve")]
    OnCurve,
}

/// ι on the S² components and |ind| on the ℝP² regions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexFunction {
    pub lift: Vec<i64>,
    pub quotient: Vec<u64>,
}

impl IndexFunction {
    pub fn max(&self) -> u64 {
        self.quotient.iter().copied().max().unwrap_or(0)
    }
}

/// Propagates ι over the complement on S²: zero on the invariant component,
/// one more on the left of each oriented circle than on its right.
pub fn lift_index(c: &SmoothedCurve, rs: &RegionSet) -> Result<IndexFunction, IndexError> {
    let nc = rs.components.len();
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nc];
    for circle in &rs.circles {
        let h = rs.circuits[circle.circuits[0]][0];
        let (l, r) = (rs.component_left_of(h), rs.component_left_of(h ^ 1));
        // step from r to l
        let up = if c.runs_along(h) { 1 } else { -1 };
        adj[r].push((l, up));
        adj[l].push((r, -up));
    }
    let root = rs.invariant_component().ok_or(IndexError::NoInvariantComponent)?;
    let mut lift: Vec<Option<i64>> = vec![None; nc];
    lift[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let iv = lift[v].expect("queued components are labelled");
        for &(w, step) in &adj[v] {
            match lift[w] {
                None => {
                    lift[w] = Some(iv + step);
                    queue.push_back(w);
                }
                Some(x) if x != iv + step => return Err(IndexError::Inconsistent(w)),
                Some(_) => {}
            }
        }
    }
    let lift: Vec<i64> = lift.into_iter().enumerate().map(|(i, x)| x.ok_or(IndexError::Inconsistent(i))).collect::<Result<_, _>>()?;
    let quotient = rs.regions.iter().map(|r| lift[r.components[0]].unsigned_abs()).collect();
    Ok(IndexFunction { lift, quotient })
}

/// ι at a point off the curve, by ray casting alone: ι(−x) = −ι(x), so the
/// signed crossing count along any path from x to its antipode is 2ι(x).
pub fn ray_cast_iota(c: &SmoothedCurve, sample: &ProjRay) -> Result<i64, IndexError> {
    let edges = edge_arcs(&c.map);
    if edges.iter().any(|e| crate::geometry::on_arc(e, sample)) {
        return Err(IndexError::OnCurve);
    }
    let far = sample.antipode();
    for w in candidate_rays() {
        if w == *sample || w == far {
            continue;
        }
        if let Some(hits) = path_hits(&[sample.clone(), w, far.clone()], &edges) {
            let twice = signed_count(&hits, |e| c.positive[e]);
            if twice % 2 != 0 {
                return Err(IndexError::OddCount(twice));
            }
            return Ok(twice / 2);
        }
    }
    unreachable!("candidate stream is infinite")
}

fn side(n: &Vec3, p: &ProjRay) -> i8 {
    sign(&dot(n, p.coords()))
}

/// A great circle (by its normal) missing the curve entirely, if one is found.
/// The line at infinity is tried first.
pub fn curve_free_circle(c: &SmoothedCurve) -> Option<Vec3> {
    let rays = c.map.edge_rays();
    let free = |n: &Vec3| {
        rays.iter().all(|(u, w)| {
            let (a, b) = (side(n, u), side(n, w));
            a != 0 && a == b
        })
    };
    let infinity = ProjRay::new(0, 0, 1).expect("nonzero");
    std::iter::once(infinity).chain(candidate_rays().take(2000)).map(|r| r.coords().clone()).find(|n| free(n))
}

/// |ι(sample)| by counting signed crossings of C along a great arc from the
/// sample to a curve-free great circle, where ι vanishes.
pub fn ray_cast_index(c: &SmoothedCurve, sample: &ProjRay) -> Result<u64, IndexError> {
    let n = curve_free_circle(c).ok_or(IndexError::OracleInapplicable)?;
    ray_cast_index_with(c, sample, &n)
}

pub fn ray_cast_index_with(c: &SmoothedCurve, sample: &ProjRay, n: &Vec3) -> Result<u64, IndexError> {
    let edges = edge_arcs(&c.map);
    if edges.iter().any(|e| crate::geometry::on_arc(e, sample)) {
        return Err(IndexError::OnCurve);
    }
    let p = sample.coords();
    let pn = dot(p, n);
    if pn.is_zero() {
        return Ok(0);
    }
    // Foot of the perpendicular from p onto the circle, then nudged along it.
    let q = add(&scale(p, &dot(n, n)), &scale(n, &-pn));
    if q.iter().all(Zero::is_zero) {
        // p is a pole of the circle; any point of the circle is equally near.
        let t = candidate_rays().map(|r| cross(n, r.coords())).find(|t| !t.iter().all(Zero::is_zero)).expect("nonzero");
        return ray_cast_to(c, &edges, sample, &t, n);
    }
    ray_cast_to(c, &edges, sample, &q, n)
}

fn ray_cast_to(c: &SmoothedCurve, edges: &[crate::geometry::Arc], sample: &ProjRay, q: &Vec3, n: &Vec3) -> Result<u64, IndexError> {
    let along = cross(n, q);
    let mut k = BigInt::from(1) << 20;
    for j in 0i64.. {
        let target = add(&scale(q, &k), &scale(&along, &BigInt::from(j)));
        let target = ProjRay::from_vec(target).expect("nonzero");
        if let Some(hits) = path_hits(&[sample.clone(), target], edges) {
            return Ok(signed_count(&hits, |e| c.positive[e]).unsigned_abs());
        }
        if j % 16 == 15 {
            k *= 2;
        }
    }
    unreachable!()
}

/// Σ F(G)·χ(G) over the regions.
pub fn euler_integral(f: &[i64], rs: &RegionSet) -> i64 {
    rs.regions.iter().zip(f).map(|(r, v)| r.chi * v).sum()
}

/// ∫|ind| dχ.
pub fn index_integral(idx: &IndexFunction, rs: &RegionSet) -> i64 {
    let f: Vec<i64> = idx.quotient.iter().map(|&v| v as i64).collect();
    euler_integral(&f, rs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_arrangement, CurveInput, CurveLabel, PLLoop};
    use crate::smoothing::{smooth_compatible, OrientationAssignment};
    use crate::surface::regions;

    fn r(x: i64, y: i64, z: i64) -> ProjRay {
        ProjRay::new(x, y, z).unwrap()
    }

    fn sq(cx: i64, cy: i64, h: i64) -> PLLoop {
        PLLoop::oval(vec![r(cx + h, cy + h, 1), r(cx - h, cy + h, 1), r(cx - h, cy - h, 1), r(cx + h, cy - h, 1)]).unwrap()
    }

    fn index_of(loops: Vec<PLLoop>, signs: Vec<i8>) -> (SmoothedCurve, RegionSet, IndexFunction) {
        let curve = CurveInput { label: CurveLabel::A, degree: 2 * loops.len() as u32, loops, type_one: true };
        let m = build_arrangement(&[curve]).unwrap();
        let c = smooth_compatible(&m, &OrientationAssignment { a: signs, b: vec![] }).unwrap();
        let rs = regions(&c.map).unwrap();
        let idx = lift_index(&c, &rs).unwrap();
        (c, rs, idx)
    }

    fn agrees_with_ray_cast(c: &SmoothedCurve, rs: &RegionSet, idx: &IndexFunction) {
        for (k, comp) in rs.components.iter().enumerate() {
            assert_eq!(ray_cast_iota(c, &comp.sample).unwrap(), idx.lift[k], "component {k}");
            assert_eq!(ray_cast_index(c, &comp.sample).unwrap(), idx.lift[k].unsigned_abs(), "component {k}");
        }
    }

    #[test]
    fn single_oval() {
        let (c, rs, idx) = index_of(vec![sq(0, 0, 1)], vec![1]);
        let disk = rs.regions.iter().position(|g| g.orientable).unwrap();
        assert_eq!(idx.quotient[disk], 1);
        assert_eq!(idx.quotient[1 - disk], 0);
        assert_eq!(index_integral(&idx, &rs), 1);
        // antipodal disks carry opposite ι
        assert_eq!(idx.lift.iter().sum::<i64>(), 0);
        agrees_with_ray_cast(&c, &rs, &idx);
    }

    #[test]
    fn nested_ovals() {
        let (c, rs, idx) = index_of(vec![sq(0, 0, 5), sq(0, 0, 1)], vec![1, 1]);
        assert_eq!(idx.max(), 2);
        assert_eq!(index_integral(&idx, &rs), 2);
        agrees_with_ray_cast(&c, &rs, &idx);
        let (c, rs, idx) = index_of(vec![sq(0, 0, 5), sq(0, 0, 1)], vec![1, -1]);
        assert_eq!(idx.max(), 1);
        let mut v = idx.quotient.clone();
        v.sort();
        assert_eq!(v, vec![0, 0, 1]);
        agrees_with_ray_cast(&c, &rs, &idx);
    }

    #[test]
    fn ray_cast_needs_a_point_off_the_curve() {
        let (c, _, _) = index_of(vec![sq(0, 0, 1)], vec![1]);
        assert!(matches!(ray_cast_index(&c, &r(1, 0, 1)), Err(IndexError::OnCurve)));
        assert_eq!(ray_cast_index(&c, &r(0, 0, 1)).unwrap(), 1);
        assert_eq!(ray_cast_index(&c, &r(7, 3, 1)).unwrap(), 0);
    }

    #[test]
    fn integral_weights_by_chi() {
        let (_, rs, _) = index_of(vec![sq(0, 0, 5), sq(-2, 0, 1), sq(2, 0, 1)], vec![1, 1, 1]);
        let f: Vec<i64> = rs.regions.iter().map(|g| if g.chi < 0 { 3 } else { 0 }).collect();
        assert_eq!(euler_integral(&f, &rs), -3);
    }
}
