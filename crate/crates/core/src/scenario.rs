//! Two-curve test cases: the file format, validation and the generators for
//! the degree-7 arc family and the degree-2k ellipse family.

use num_bigint::BigInt;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adjunction::{theorem_bound, BoundError, BoundOptions};
use crate::geometry::{build_arrangement, check_embedded, harnack_bound, CurveInput, CurveLabel, LoopKind, PLLoop, ProjRay};
use crate::scheme::rect;
use crate::smoothing::OrientationAssignment;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("{0}")]
    Range(String),
    #[error("malformed scenario: {0}")]
    Format(String),
}

/// How the engine treats the unknown complex orientations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum OrientationSpec {
    Fixed {
        assignment: OrientationAssignment,
    },
    /// Enumerate sign patterns. Loops listed in one class are interchangeable;
    /// loops in no class form singleton classes.
    Enumerate {
        #[serde(default)]
        classes_a: Vec<Vec<usize>>,
        #[serde(default)]
        classes_b: Vec<Vec<usize>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioOptions {
    /// Ξ coefficient as a decimal rational, "2" by default.
    #[serde(default = "default_coeff")]
    pub xi_coefficient: String,
    #[serde(default)]
    pub allow_equal_degrees: bool,
    #[serde(default)]
    pub cusped_smoothings: bool,
}

fn default_coeff() -> String {
    "2".into()
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions { xi_coefficient: default_coeff(), allow_equal_degrees: false, cusped_smoothings: false }
    }
}

impl ScenarioOptions {
    pub fn bound_options(&self) -> Result<BoundOptions, ScenarioError> {
        let xi_coefficient: Rational64 =
            self.xi_coefficient.parse().map_err(|_| ScenarioError::Format(format!("bad xi coefficient {:?}", self.xi_coefficient)))?;
        Ok(BoundOptions { xi_coefficient, allow_equal_degrees: self.allow_equal_degrees })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub curve_a: CurveInput,
    pub curve_b: CurveInput,
    pub orientation_spec: OrientationSpec,
    pub options: ScenarioOptions,
}

// ---- file format ----

#[derive(Serialize, Deserialize)]
struct LoopFile {
    kind: LoopKind,
    vertices: Vec<[String; 3]>,
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    label: CurveLabel,
    degree: u32,
    type_one: bool,
    loops: Vec<LoopFile>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    curves: Vec<CurveFile>,
    orientation_spec: OrientationSpec,
    #[serde(default)]
    options: ScenarioOptions,
}

fn curve_to_file(c: &CurveInput) -> CurveFile {
    CurveFile {
        label: c.label,
        degree: c.degree,
        type_one: c.type_one,
        loops: c
            .loops
            .iter()
            .map(|l| LoopFile { kind: l.kind, vertices: l.vertices.iter().map(|v| v.coords().clone().map(|x| x.to_string())).collect() })
            .collect(),
    }
}

fn curve_from_file(f: CurveFile) -> Result<CurveInput, ScenarioError> {
    let mut loops = Vec::new();
    for l in f.loops {
        let mut vs = Vec::new();
        for v in l.vertices {
            let parse = |s: &String| s.parse::<BigInt>().map_err(|_| ScenarioError::Format(format!("bad integer {s:?}")));
            let ray = ProjRay::from_vec([parse(&v[0])?, parse(&v[1])?, parse(&v[2])?]).map_err(|e| ScenarioError::Format(e.to_string()))?;
            vs.push(ray);
        }
        loops.push(PLLoop::new(vs, l.kind).map_err(|e| ScenarioError::Format(e.to_string()))?);
    }
    Ok(CurveInput { label: f.label, degree: f.degree, loops, type_one: f.type_one })
}

/// A single curve in the scenario file's curve format.
pub fn curve_to_json(c: &CurveInput) -> String {
    serde_json::to_string_pretty(&curve_to_file(c)).expect("serializable") + "\n"
}

pub fn curve_from_json(text: &str) -> Result<CurveInput, ScenarioError> {
    let f: CurveFile = serde_json::from_str(text).map_err(|e| ScenarioError::Format(e.to_string()))?;
    curve_from_file(f)
}

impl Scenario {
    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            curves: vec![curve_to_file(&self.curve_a), curve_to_file(&self.curve_b)],
            orientation_spec: self.orientation_spec.clone(),
            options: self.options.clone(),
        };
        serde_json::to_string_pretty(&file).expect("serializable") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Format(e.to_string()))?;
        let mut curves = file.curves.into_iter();
        let (Some(a), Some(b), None) = (curves.next(), curves.next(), curves.next()) else {
            return Err(ScenarioError::Format("exactly two curves are required".into()));
        };
        let (a, b) = (curve_from_file(a)?, curve_from_file(b)?);
        if a.label != CurveLabel::A || b.label != CurveLabel::B {
            return Err(ScenarioError::Format("curves must be labelled A then B".into()));
        }
        Ok(Scenario { curve_a: a, curve_b: b, orientation_spec: file.orientation_spec, options: file.options })
    }

    pub fn curves(&self) -> [CurveInput; 2] {
        [self.curve_a.clone(), self.curve_b.clone()]
    }
}

// ---- validation ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioCheck {
    pub name: String,
    pub passed: bool,
    /// Warnings never block evaluation.
    pub warning: bool,
    pub detail: String,
}

pub fn validate_scenario(s: &Scenario) -> Vec<ScenarioCheck> {
    let mut out = Vec::new();
    let mut push =
        |name: &str, passed: bool, warning: bool, detail: String| out.push(ScenarioCheck { name: name.into(), passed, warning, detail });
    for c in [&s.curve_a, &s.curve_b] {
        let label = format!("{:?}", c.label);
        let bound = harnack_bound(c.degree);
        let comps = c.loops.len();
        push(&format!("harnack {label}"), comps as u64 <= bound, false, format!("{comps} components, bound {bound}"));
        let j = c.one_sided_count();
        push(&format!("parity {label}"), j <= 1 && j as u32 % 2 == c.degree % 2, false, format!("degree {}, {j} one-sided", c.degree));
        let emb = check_embedded(c);
        push(&format!("embedded {label}"), emb.is_ok(), false, emb.err().map(|e| e.to_string()).unwrap_or_default());
    }
    let (m, n) = (s.curve_a.degree, s.curve_b.degree);
    let guard = degree_guard(s);
    push("degrees", guard.is_ok(), false, guard.err().map(|e| e.to_string()).unwrap_or_default());
    push("type I asserted", s.curve_a.type_one && s.curve_b.type_one, false, String::new());
    match build_arrangement(&s.curves()) {
        Ok(map) => {
            let d = map.quotient_crossings().len() as u64;
            push("general position", true, false, format!("d = {d}"));
            push("bezout", d <= u64::from(m) * u64::from(n), true, format!("d = {d}, mn = {}", m * n));
        }
        Err(e) => push("general position", false, false, e.to_string()),
    }
    out
}

pub fn degree_guard(s: &Scenario) -> Result<(), BoundError> {
    theorem_bound(s.curve_a.degree, s.curve_b.degree, 0, Rational64::from(0), Rational64::from(1), s.options.allow_equal_degrees)
        .map(|_| ())
}

// ---- generators ----

fn ray(x: i64, y: i64, z: i64) -> ProjRay {
    ProjRay::new(x, y, z).expect("nonzero")
}

fn square(cx: i64, cy: i64, h: i64) -> PLLoop {
    rect(cx - h, cy - h, cx + h, cy + h)
}

/// A curve of degree 2k+1 made of an arc and k(2k−1) empty ovals, `split` of
/// them on one side of the arc, together with a line crossing the arc once.
///
/// The line plays the role of the line at infinity: the arc runs along the
/// x-axis, the line along the y-axis, and the two sides of the arc in the
/// affine plane are the quadrant pairs {xy > 0} and {xy < 0}.
pub fn build_prop1_scenario(k: u32, split: u32) -> Result<Scenario, ScenarioError> {
    if k < 1 {
        return Err(ScenarioError::Range("k must be at least 1".into()));
    }
    let total = k * (2 * k - 1);
    if split > total {
        return Err(ScenarioError::Range(format!("split must lie in 0..={total}")));
    }
    let (a, b) = (split as i64, (total - split) as i64);
    let far = 4 * a.max(b) + 10;
    let mut loops = vec![PLLoop::one_sided(vec![ray(1, 0, 0), ray(far, 0, 1), ray(-far, 0, 1)]).expect("valid arc")];
    for i in 0..a {
        loops.push(square(3 + 4 * i, 3, 1));
    }
    for i in 0..b {
        loops.push(square(-3 - 4 * i, 3, 1));
    }
    let line = PLLoop::one_sided(vec![ray(0, 1, 0), ray(0, far, 1), ray(0, -far, 1)]).expect("valid line");
    let a_idx = |r: std::ops::Range<i64>| r.map(|i| i as usize).collect::<Vec<_>>();
    let classes_a: Vec<Vec<usize>> = [vec![0], a_idx(1..1 + a), a_idx(1 + a..1 + a + b)].into_iter().filter(|c| !c.is_empty()).collect();
    Ok(Scenario {
        curve_a: CurveInput { label: CurveLabel::A, degree: 2 * k + 1, loops, type_one: true },
        curve_b: CurveInput { label: CurveLabel::B, degree: 1, loops: vec![line], type_one: true },
        orientation_spec: OrientationSpec::Enumerate { classes_a, classes_b: vec![vec![0]] },
        options: ScenarioOptions::default(),
    })
}

/// A curve of degree 2k with one non-empty oval around (k²−3k+2)/2 empty
/// ovals and (3k²−3k)/2 empty ovals outside, and an ellipse inside the
/// non-empty oval enclosing `enclosed` of the interior ovals.
///
/// The non-empty oval is counter-clockwise and the ellipse clockwise in the
/// chart z = 1 (for the all-positive assignment).
pub fn build_prop2_scenario(k: u32, enclosed: u32) -> Result<Scenario, ScenarioError> {
    if k < 2 {
        return Err(ScenarioError::Range("k must be at least 2".into()));
    }
    let interior = (k - 1) * (k - 2) / 2;
    let outside = (3 * k * k - 3 * k) / 2;
    if enclosed > interior {
        return Err(ScenarioError::Range(format!("enclosed must lie in 0..={interior}")));
    }
    let (ni, l) = (interior as i64, enclosed as i64);
    let right = 4 * ni.max(1) + 2;
    let mut loops = vec![rect(-6, -6, right, 10)];
    for i in 0..ni {
        loops.push(square(4 * i, 0, 1));
    }
    for j in 0..outside as i64 {
        loops.push(square(right + 5 + 4 * j, 0, 1));
    }
    let ellipse = if l > 0 { rect(-2, -2, 4 * (l - 1) + 2, 2) } else { square(0, 6, 1) };
    let ellipse = ellipse.reversed();
    let idx = |r: std::ops::Range<i64>| r.map(|i| i as usize).collect::<Vec<_>>();
    let classes_a: Vec<Vec<usize>> =
        [vec![0], idx(1..1 + l), idx(1 + l..1 + ni), idx(1 + ni..1 + ni + outside as i64)].into_iter().filter(|c| !c.is_empty()).collect();
    Ok(Scenario {
        curve_a: CurveInput { label: CurveLabel::A, degree: 2 * k, loops, type_one: true },
        curve_b: CurveInput { label: CurveLabel::B, degree: 2, loops: vec![ellipse], type_one: true },
        orientation_spec: OrientationSpec::Enumerate { classes_a, classes_b: vec![vec![0]] },
        options: ScenarioOptions::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{format_scheme, recognize};

    #[test]
    fn prop1_shapes() {
        let s = build_prop1_scenario(3, 0).unwrap();
        assert_eq!(s.curve_a.loops.len(), 16);
        assert_eq!(s.curve_a.degree, 7);
        let map = build_arrangement(&s.curves()).unwrap();
        assert_eq!(map.quotient_crossings().len(), 1);
        assert!(validate_scenario(&s).iter().all(|c| c.passed), "{:?}", validate_scenario(&s));
        assert_eq!(format_scheme(&recognize(&s.curve_a).unwrap()), "<J u 15>");
        let s = build_prop1_scenario(2, 4).unwrap();
        assert_eq!(s.curve_a.loops.len(), 7);
        assert!(build_prop1_scenario(3, 16).is_err());
    }

    #[test]
    fn prop2_shapes() {
        let s = build_prop2_scenario(4, 3).unwrap();
        assert_eq!(s.curve_a.loops.len(), 22);
        assert_eq!(format_scheme(&recognize(&s.curve_a).unwrap()), "<18 u 1<3>>");
        let map = build_arrangement(&s.curves()).unwrap();
        assert_eq!(map.quotient_crossings().len(), 0);
        assert!(validate_scenario(&s).iter().all(|c| c.passed));
        for l in 0..=3 {
            build_arrangement(&build_prop2_scenario(4, l).unwrap().curves()).unwrap();
        }
        assert!(build_prop2_scenario(3, 0).is_ok());
        assert!(build_prop2_scenario(4, 4).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = build_prop1_scenario(2, 3).unwrap();
        let text = s.to_json();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn equal_degrees_flagged() {
        let mut s = build_prop2_scenario(2, 0).unwrap();
        s.curve_a.degree = 2;
        s.curve_a.loops.truncate(1);
        let checks = validate_scenario(&s);
        assert!(!checks.iter().find(|c| c.name == "degrees").unwrap().passed);
    }
}
