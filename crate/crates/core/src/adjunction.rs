//! Superlevel sets of |ind|, the negative variation Ξ and the adjunction bound.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::geometry::build_arrangement;
use crate::index::{index_integral, lift_index, IndexFunction};
use crate::scenario::{degree_guard, Scenario};
use crate::smoothing::{smooth, CrossingPattern, OrientationAssignment, SmoothedCurve};
use crate::surface::{regions, RegionSet, SurfaceMap};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BoundError {
    #[error("degree guard: the bound is only asserted for m > n (got m = {m}, n = {n}); pass --allow-equal-degrees to override")]
    DegreeGuard { m: u32, n: u32 },
    #[error("degrees m = {m} and n = {n} have different parity")]
    Parity { m: u32, n: u32 },
}

pub(crate) fn ratio_str<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// One connected component of a strict superlevel set {|ind| > level}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuperlevelComponent {
    pub level: u64,
    pub regions: Vec<usize>,
    pub chi: i64,
    pub c_in: u64,
    pub c_out: u64,
    #[serde(serialize_with = "ratio_str")]
    pub chi_prime: Rational64,
    #[serde(serialize_with = "ratio_str")]
    pub chi_prime_minus: Rational64,
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Components of `{region : keep(region)}` glued along ovals both of whose
/// sides are kept, each as a sorted list of region ids.
fn glued_components(rs: &RegionSet, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let n = rs.regions.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for k in 0..rs.curve_components.len() {
        let c = rs.curve_components[k].circles[0];
        let (l, r) = rs.circle_sides(c);
        let (a, b) = (rs.components[l].region, rs.components[r].region);
        if keep(a) && keep(b) {
            let (x, y) = (find(&mut parent, a), find(&mut parent, b));
            parent[x] = y;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for g in 0..n {
        if keep(g) {
            let r = find(&mut parent, g);
            groups.entry(r).or_default().push(g);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// Strict superlevel components for every level s ≥ 1 with {|ind| > s} nonempty.
pub fn superlevels(idx: &IndexFunction, rs: &RegionSet, c: &SmoothedCurve) -> Vec<SuperlevelComponent> {
    let mut out = Vec::new();
    for s in 1..idx.max() {
        for members in glued_components(rs, |g| idx.quotient[g] > s) {
            let chi: i64 = members.iter().map(|&g| rs.regions[g].chi).sum();
            let (mut c_in, mut c_out) = (0, 0);
            for cusp in c.cusps.iter().filter(|k| k.primary) {
                let horn = members.contains(&rs.region_left_of(cusp.horn));
                let outer = members.contains(&rs.region_left_of(cusp.outer));
                match (horn, outer) {
                    (true, false) => c_in += 1,
                    (false, true) => c_out += 1,
                    _ => {}
                }
            }
            let chi_prime = Rational64::from(chi) - Rational64::new(c_out as i64 - c_in as i64, 2);
            let chi_prime_minus = if chi_prime.is_negative() { -chi_prime } else { Rational64::zero() };
            out.push(SuperlevelComponent { level: s, regions: members, chi, c_in, c_out, chi_prime, chi_prime_minus });
        }
    }
    out
}

/// Ξ = Σ_s s · Σ χ′₋ over the components at level s.
pub fn xi(components: &[SuperlevelComponent]) -> Rational64 {
    components.iter().map(|c| Rational64::from(c.level as i64) * c.chi_prime_minus).sum()
}

/// Right-hand side (m+n)²/4 − 3n + d + coefficient·Ξ.
pub fn theorem_bound(
    m: u32,
    n: u32,
    d: u64,
    xi: Rational64,
    xi_coefficient: Rational64,
    allow_equal_degrees: bool,
) -> Result<Rational64, BoundError> {
    if (m + n) % 2 == 1 {
        return Err(BoundError::Parity { m, n });
    }
    if m <= n && !allow_equal_degrees {
        return Err(BoundError::DegreeGuard { m, n });
    }
    let (m, n) = (i64::from(m), i64::from(n));
    let base = (m + n) * (m + n) / 4 - 3 * n + d as i64;
    Ok(Rational64::from(base) + xi_coefficient * xi)
}

/// Σ_{s≥1} χ({|ind| ≥ s}) compared against ∫|ind| dχ.
pub fn check_fubini(idx: &IndexFunction, rs: &RegionSet) -> bool {
    let layered: i64 = (1..=idx.max())
        .flat_map(|s| glued_components(rs, |g| idx.quotient[g] >= s))
        .map(|members| members.iter().map(|&g| rs.regions[g].chi).sum::<i64>())
        .sum();
    layered == index_integral(idx, rs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundOptions {
    #[serde(serialize_with = "ratio_str")]
    pub xi_coefficient: Rational64,
    pub allow_equal_degrees: bool,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { xi_coefficient: Rational64::from(2), allow_equal_degrees: false }
    }
}

/// All quantities of the adjunction inequality for one orientation and smoothing choice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub m: u32,
    pub n: u32,
    pub d: u64,
    #[serde(serialize_with = "ratio_str")]
    pub xi: Rational64,
    pub lhs: i64,
    #[serde(serialize_with = "ratio_str")]
    pub rhs: Rational64,
    #[serde(serialize_with = "ratio_str")]
    pub xi_coefficient: Rational64,
    pub allow_equal_degrees: bool,
    pub violated: bool,
    pub orientation: OrientationAssignment,
    pub patterns: Vec<CrossingPattern>,
    pub superlevels: Vec<SuperlevelComponent>,
    pub index: Vec<u64>,
    pub region_chi: Vec<i64>,
    pub fubini: bool,
}

/// Report for an already smoothed curve, its regions and index.
pub fn report(
    m: u32,
    n: u32,
    c: &SmoothedCurve,
    rs: &RegionSet,
    idx: &IndexFunction,
    orientation: &OrientationAssignment,
    opts: BoundOptions,
) -> Result<TheoremReport, BoundError> {
    let levels = superlevels(idx, rs, c);
    let xi = xi(&levels);
    let d = c.crossings() as u64;
    let rhs = theorem_bound(m, n, d, xi, opts.xi_coefficient, opts.allow_equal_degrees)?;
    let lhs = index_integral(idx, rs);
    Ok(TheoremReport {
        m,
        n,
        d,
        xi,
        lhs,
        rhs,
        xi_coefficient: opts.xi_coefficient,
        allow_equal_degrees: opts.allow_equal_degrees,
        violated: Rational64::from(lhs) > rhs,
        orientation: orientation.clone(),
        patterns: c.patterns.clone(),
        superlevels: levels,
        index: idx.quotient.clone(),
        region_chi: rs.regions.iter().map(|r| r.chi).collect(),
        fubini: check_fubini(idx, rs),
    })
}

/// The full pipeline for one scenario, caching complement regions by the
/// smoothing pairing (orientations only change the index, not the regions).
pub struct Evaluator {
    pub map: SurfaceMap,
    pub m: u32,
    pub n: u32,
    pub options: BoundOptions,
    cache: Mutex<HashMap<Vec<u8>, Arc<RegionSet>>>,
}

impl Evaluator {
    pub fn new(s: &Scenario) -> Result<Evaluator, crate::Error> {
        degree_guard(s)?;
        let map = build_arrangement(&s.curves())?;
        Ok(Evaluator {
            map,
            m: s.curve_a.degree,
            n: s.curve_b.degree,
            options: s.options.bound_options()?,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn crossings(&self) -> usize {
        self.map.quotient_crossings().len()
    }

    /// Smoothed curve, its regions and index for one choice.
    pub fn stages(
        &self,
        orientation: &OrientationAssignment,
        patterns: &[CrossingPattern],
    ) -> Result<(SmoothedCurve, Arc<RegionSet>, IndexFunction), crate::Error> {
        let c = smooth(&self.map, orientation, patterns)?;
        let cached = self.cache.lock().expect("cache lock").get(&c.pairing).cloned();
        let rs = match cached {
            Some(rs) => rs,
            None => {
                let rs = Arc::new(regions(&c.map)?);
                self.cache.lock().expect("cache lock").insert(c.pairing.clone(), rs.clone());
                rs
            }
        };
        let idx = lift_index(&c, &rs)?;
        Ok((c, rs, idx))
    }

    pub fn evaluate(&self, orientation: &OrientationAssignment, patterns: &[CrossingPattern]) -> Result<TheoremReport, crate::Error> {
        let (c, rs, idx) = self.stages(orientation, patterns)?;
        Ok(report(self.m, self.n, &c, &rs, &idx, orientation, self.options)?)
    }
}

/// Evaluates one orientation assignment and smoothing choice of a scenario.
pub fn evaluate(s: &Scenario, orientation: &OrientationAssignment, patterns: &[CrossingPattern]) -> Result<TheoremReport, crate::Error> {
    Evaluator::new(s)?.evaluate(orientation, patterns)
}
