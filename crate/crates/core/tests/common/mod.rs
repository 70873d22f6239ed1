#![allow(dead_code)]

use ovalcert::adjunction::check_fubini;
use ovalcert::geometry::{build_arrangement, harnack_bound, CurveInput, CurveLabel, PLLoop, ProjRay};
use ovalcert::index::{curve_free_circle, lift_index, ray_cast_index_with, ray_cast_iota};
use ovalcert::scenario::{OrientationSpec, Scenario, ScenarioOptions};
use ovalcert::scheme::{realize_scheme, Node, Scheme};
use ovalcert::smoothing::{smooth, CrossingPattern, OrientationAssignment};
use ovalcert::surface::{chi_oracle, regions};
use rand::Rng;

pub fn random_tree<R: Rng>(rng: &mut R, ovals: usize) -> Vec<Node> {
    let mut roots = Vec::new();
    let mut left = ovals;
    while left > 0 {
        let size = rng.gen_range(1..=left);
        roots.push(Node { children: random_tree(rng, size - 1) });
        left -= size;
    }
    roots
}

pub fn random_scheme<R: Rng>(rng: &mut R, ovals: usize, has_j: bool) -> Scheme {
    Scheme { roots: random_tree(rng, ovals), has_j }
}

/// Smallest degree whose Harnack bound and parity admit the scheme.
pub fn degree_for(s: &Scheme) -> u32 {
    (1..).find(|&m| (m % 2 == 1) == s.has_j && harnack_bound(m) >= s.components() as u64).unwrap()
}

fn half(x: i64, y: i64) -> ProjRay {
    ProjRay::new(2 * x + 1, 2 * y + 1, 2).unwrap()
}

/// A diamond centred on a half-integer point, so that none of its vertices
/// lies on the integer grid used by realized schemes.
fn diamond<R: Rng>(rng: &mut R) -> PLLoop {
    let (cx, cy) = (rng.gen_range(-6..40), rng.gen_range(-16..16));
    let (rx, ry) = (rng.gen_range(1..14), rng.gen_range(1..14));
    PLLoop::oval(vec![half(cx + rx, cy), half(cx, cy + ry), half(cx - rx, cy), half(cx, cy - ry)]).unwrap()
}

fn pseudoline<R: Rng>(rng: &mut R) -> PLLoop {
    let (dx, dy) = (rng.gen_range(-3..=3i64), rng.gen_range(1..=3i64));
    let (px, py) = (2 * rng.gen_range(-4..30i64) + 1, 2 * rng.gen_range(-10..10i64) + 1);
    let s = 20;
    PLLoop::one_sided(vec![
        ProjRay::new(dx, dy, 0).unwrap(),
        ProjRay::new(px + 2 * s * dx, py + 2 * s * dy, 2).unwrap(),
        ProjRay::new(px - 2 * s * dx, py - 2 * s * dy, 2).unwrap(),
    ])
    .unwrap()
}

pub struct Sample {
    pub scenario: Scenario,
    pub orientation: OrientationAssignment,
    pub patterns: Vec<CrossingPattern>,
}

/// A random valid two-curve scenario with degrees ≤ 10 and at most
/// `max_crossings` crossings, plus a random orientation and smoothing choice.
pub fn random_sample<R: Rng>(rng: &mut R, max_crossings: usize) -> Sample {
    loop {
        let m = rng.gen_range(3..=10u32);
        let has_j = m % 2 == 1;
        let room = (harnack_bound(m) as usize - usize::from(has_j)).min(8);
        let ovals = rng.gen_range(0..=room);
        let scheme = random_scheme(rng, ovals, has_j);
        let a = realize_scheme(&scheme, m).unwrap();
        let n = if has_j { [1, 3][rng.gen_range(0..2)] } else { [2, 4][rng.gen_range(0..2)] };
        if n >= m {
            continue;
        }
        let mut loops = Vec::new();
        if has_j {
            loops.push(pseudoline(rng));
        }
        let ovals = if n <= 2 { 1 - usize::from(has_j) } else { 2 - usize::from(has_j) };
        for _ in 0..ovals {
            loops.push(diamond(rng));
        }
        let b = CurveInput { label: CurveLabel::B, degree: n, loops, type_one: true };
        if b.validate().is_err() {
            continue;
        }
        let Ok(map) = build_arrangement(&[a.clone(), b.clone()]) else { continue };
        let d = map.quotient_crossings().len();
        if d > max_crossings {
            continue;
        }
        let orientation = OrientationAssignment {
            a: (0..a.loops.len()).map(|_| if rng.gen() { 1 } else { -1 }).collect(),
            b: (0..b.loops.len()).map(|_| if rng.gen() { 1 } else { -1 }).collect(),
        };
        let all = [CrossingPattern::Compatible, CrossingPattern::CuspedInward, CrossingPattern::CuspedOutward];
        let patterns = (0..d).map(|_| if rng.gen_bool(0.6) { all[0] } else { all[rng.gen_range(1..3)] }).collect();
        let scenario = Scenario {
            curve_a: a,
            curve_b: b,
            orientation_spec: OrientationSpec::Fixed { assignment: orientation.clone() },
            options: ScenarioOptions::default(),
        };
        return Sample { scenario, orientation, patterns };
    }
}

pub struct Checked {
    pub crossings: usize,
    pub free_circle: bool,
}

/// Checks the structural invariants of one sample; `Ok(None)` when the
/// smoothing choice leaves a one-sided component (not null-homologous).
pub fn check_sample(s: &Sample) -> Result<Option<Checked>, String> {
    let map = build_arrangement(&s.scenario.curves()).map_err(|e| e.to_string())?;
    let c = match smooth(&map, &s.orientation, &s.patterns) {
        Ok(c) => c,
        Err(ovalcert::smoothing::SmoothingError::OneSidedSurvives) => return Ok(None),
        Err(e) => return Err(e.to_string()),
    };
    let rs = regions(&c.map).map_err(|e| e.to_string())?;
    if rs.chi_sum_rp2() != 1 {
        return Err(format!("sum of chi over RP2 regions = {}", rs.chi_sum_rp2()));
    }
    if rs.chi_sum_s2() != 2 {
        return Err(format!("sum of chi over S2 components = {}", rs.chi_sum_s2()));
    }
    if rs.regions.iter().filter(|g| !g.orientable).count() != 1 {
        return Err("number of non-orientable regions != 1".into());
    }
    for g in &rs.regions {
        let oracle = chi_oracle(&c.map, &rs, g.id);
        if oracle != g.chi {
            return Err(format!("region {}: chi {} but oracle {}", g.id, g.chi, oracle));
        }
    }
    let idx = lift_index(&c, &rs).map_err(|e| e.to_string())?;
    let free = curve_free_circle(&c);
    for (k, comp) in rs.components.iter().enumerate() {
        if let Some(n) = &free {
            let cast = ray_cast_index_with(&c, &comp.sample, n).map_err(|e| e.to_string())?;
            if cast != idx.lift[k].unsigned_abs() {
                return Err(format!("component {k}: ray cast to a free circle {cast}, lift {}", idx.lift[k]));
            }
        }
        if idx.lift[comp.antipode] != -idx.lift[k] {
            return Err(format!("iota not antisymmetric on component {k}"));
        }
        let cast = ray_cast_iota(&c, &comp.sample).map_err(|e| e.to_string())?;
        if cast != idx.lift[k] {
            return Err(format!("component {k}: antipodal ray cast {cast}, lift {}", idx.lift[k]));
        }
    }
    for circle in &rs.circles {
        let h = rs.circuits[circle.circuits[0]][0];
        let jump = idx.lift[rs.component_left_of(h)] - idx.lift[rs.component_left_of(h ^ 1)];
        if jump.abs() != 1 {
            return Err(format!("index jumps by {jump} across a circle"));
        }
    }
    if !check_fubini(&idx, &rs) {
        return Err("Fubini identity fails".into());
    }
    Ok(Some(Checked { crossings: s.patterns.len(), free_circle: free.is_some() }))
}
