//! ∀-orientation / ∃-choice search for violations of the adjunction bound.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::adjunction::{Evaluator, TheoremReport};
use crate::scenario::{OrientationSpec, Scenario};
use crate::smoothing::{CrossingPattern, OrientationAssignment};
use crate::Error;

pub const DEFAULT_CAP: usize = 1 << 20;

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Maximum number of orientation classes evaluated.
    pub cap: usize,
    /// Worker threads; 0 means the rayon default.
    pub jobs: usize,
    /// Search cusped smoothing patterns as well (also enabled by the scenario options).
    pub cusped: bool,
    /// Use the declared interchangeability classes; when false every loop is its own class.
    pub symmetry_reduction: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { cap: DEFAULT_CAP, jobs: 0, cusped: false, symmetry_reduction: true }
    }
}

/// Orientation class: how many loops of each interchangeability class follow
/// their vertex order, modulo reversing a whole curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationClass {
    pub counts_a: Vec<usize>,
    pub counts_b: Vec<usize>,
    /// Representative: the first `count` loops of each class positive.
    pub assignment: OrientationAssignment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Choice {
    pub reverse_b: bool,
    pub patterns: Vec<CrossingPattern>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ClassResult {
    Witness { choice: Choice, report: Box<TheoremReport> },
    Survives { best_lhs: i64, rhs: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassOutcome {
    pub class: OrientationClass,
    #[serde(flatten)]
    pub result: ClassResult,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Prohibited,
    NotProhibited,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Prohibited => "PROHIBITED",
            Status::NotProhibited => "NOT_PROHIBITED",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Statistics {
    pub classes_examined: usize,
    pub cap_hit: bool,
    pub choices_per_class: usize,
    #[serde(skip)]
    pub wall_clock_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub m: u32,
    pub n: u32,
    pub d: usize,
    #[serde(serialize_with = "crate::adjunction::ratio_str")]
    pub xi_coefficient: num_rational::Rational64,
    pub allow_equal_degrees: bool,
    pub classes: Vec<ClassOutcome>,
    pub statistics: Statistics,
}

impl Verdict {
    pub fn survivors(&self) -> impl Iterator<Item = &ClassOutcome> {
        self.classes.iter().filter(|c| matches!(c.result, ClassResult::Survives { .. }))
    }

    pub fn witnesses(&self) -> impl Iterator<Item = (&OrientationClass, &TheoremReport)> {
        self.classes.iter().filter_map(|c| match &c.result {
            ClassResult::Witness { report, .. } => Some((&c.class, report.as_ref())),
            ClassResult::Survives { .. } => None,
        })
    }
}

/// Interchangeability classes covering all `loops`, declared ones first,
/// undeclared loops as singletons.
fn complete_classes(declared: &[Vec<usize>], loops: usize, reduce: bool) -> Vec<Vec<usize>> {
    if !reduce {
        return (0..loops).map(|i| vec![i]).collect();
    }
    let mut seen = vec![false; loops];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for c in declared {
        let c: Vec<usize> = c.iter().copied().filter(|&i| i < loops && !std::mem::replace(&mut seen[i], true)).collect();
        if !c.is_empty() {
            out.push(c);
        }
    }
    out.extend((0..loops).filter(|&i| !seen[i]).map(|i| vec![i]));
    out
}

/// All count vectors (c_i ∈ 0..=size_i) that are lexicographically no larger
/// than their reversal (size_i − c_i), in lexicographic order.
fn canonical_counts(sizes: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let mut cur: Option<Vec<usize>> = Some(vec![0; sizes.len()]);
    std::iter::from_fn(move || loop {
        let v = cur.take()?;
        // advance odometer (last digit fastest)
        let mut next = v.clone();
        let mut i = sizes.len();
        let mut done = true;
        while i > 0 {
            i -= 1;
            if next[i] < sizes[i] {
                next[i] += 1;
                done = false;
                break;
            }
            next[i] = 0;
        }
        if !done {
            cur = Some(next);
        }
        let rev: Vec<usize> = v.iter().zip(sizes).map(|(c, s)| s - c).collect();
        if v <= rev {
            return Some(v);
        }
    })
}

fn signs(classes: &[Vec<usize>], counts: &[usize], loops: usize) -> Vec<i8> {
    let mut s = vec![-1; loops];
    for (c, &k) in classes.iter().zip(counts) {
        for &i in &c[..k] {
            s[i] = 1;
        }
    }
    s
}

/// Orientation classes of the scenario in canonical order.
pub fn enumerate_classes(s: &Scenario, symmetry_reduction: bool) -> Box<dyn Iterator<Item = OrientationClass> + Send> {
    let (la, lb) = (s.curve_a.loops.len(), s.curve_b.loops.len());
    let (ca, cb) = match &s.orientation_spec {
        OrientationSpec::Fixed { assignment } => {
            let a = assignment.clone();
            return Box::new(std::iter::once(OrientationClass { counts_a: Vec::new(), counts_b: Vec::new(), assignment: a }));
        }
        OrientationSpec::Enumerate { classes_a, classes_b } => {
            (complete_classes(classes_a, la, symmetry_reduction), complete_classes(classes_b, lb, symmetry_reduction))
        }
    };
    let sa: Vec<usize> = ca.iter().map(Vec::len).collect();
    let sb: Vec<usize> = cb.iter().map(Vec::len).collect();
    let b_counts: Vec<Vec<usize>> = canonical_counts(&sb).collect();
    let it = canonical_counts(&sa).collect::<Vec<_>>().into_iter().flat_map(move |va| {
        let (ca, cb) = (ca.clone(), cb.clone());
        b_counts.clone().into_iter().map(move |vb| OrientationClass {
            assignment: OrientationAssignment { a: signs(&ca, &va, la), b: signs(&cb, &vb, lb) },
            counts_a: va.clone(),
            counts_b: vb,
        })
    });
    Box::new(it)
}

/// Choices tried for every class, cheapest first.
fn choices(d: usize, cusped: bool) -> Vec<Choice> {
    let compatible = vec![CrossingPattern::Compatible; d];
    let mut out = vec![Choice { reverse_b: false, patterns: compatible.clone() }, Choice { reverse_b: true, patterns: compatible }];
    if cusped {
        let all = [CrossingPattern::Compatible, CrossingPattern::CuspedInward, CrossingPattern::CuspedOutward];
        let total = 3usize.pow(d as u32);
        for code in 1..total {
            let mut c = code;
            let patterns: Vec<CrossingPattern> = (0..d)
                .map(|_| {
                    let p = all[c % 3];
                    c /= 3;
                    p
                })
                .collect();
            for reverse_b in [false, true] {
                out.push(Choice { reverse_b, patterns: patterns.clone() });
            }
        }
    }
    out
}

fn search(ev: &Evaluator, class: &OrientationClass, choices: &[Choice]) -> Result<ClassResult, Error> {
    let mut best: Option<TheoremReport> = None;
    for ch in choices {
        let orient = if ch.reverse_b { class.assignment.reversed(crate::geometry::CurveLabel::B) } else { class.assignment.clone() };
        let r = ev.evaluate(&orient, &ch.patterns)?;
        if r.violated {
            return Ok(ClassResult::Witness { choice: ch.clone(), report: Box::new(r) });
        }
        if best.as_ref().is_none_or(|b| r.lhs > b.lhs) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one choice");
    Ok(ClassResult::Survives { best_lhs: best.lhs, rhs: best.rhs.to_string() })
}

/// Decides whether the adjunction bound prohibits the scenario for every
/// orientation class.
pub fn prohibit(s: &Scenario, cfg: &EngineConfig) -> Result<Verdict, Error> {
    let start = Instant::now();
    let ev = Evaluator::new(s)?;
    let d = ev.crossings();
    let choices = choices(d, cfg.cusped || s.options.cusped_smoothings);
    let mut classes: Vec<OrientationClass> = enumerate_classes(s, cfg.symmetry_reduction).take(cfg.cap.saturating_add(1)).collect();
    let cap_hit = classes.len() > cfg.cap;
    classes.truncate(cfg.cap);

    let run = || -> Result<Vec<ClassResult>, Error> { classes.par_iter().map(|c| search(&ev, c, &choices)).collect() };
    let results = if cfg.jobs == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| std::io::Error::other(e.to_string()))?.install(run)?
    };
    let outcomes: Vec<ClassOutcome> = classes.into_iter().zip(results).map(|(class, result)| ClassOutcome { class, result }).collect();
    let any_survivor = outcomes.iter().any(|o| matches!(o.result, ClassResult::Survives { .. }));
    let status = if any_survivor {
        Status::NotProhibited
    } else if cap_hit {
        Status::Inconclusive
    } else {
        Status::Prohibited
    };
    Ok(Verdict {
        status,
        m: ev.m,
        n: ev.n,
        d,
        xi_coefficient: ev.options.xi_coefficient,
        allow_equal_degrees: ev.options.allow_equal_degrees,
        statistics: Statistics {
            classes_examined: outcomes.len(),
            cap_hit,
            choices_per_class: choices.len(),
            wall_clock_ms: start.elapsed().as_millis(),
        },
        classes: outcomes,
    })
}

/// The surviving classes of a scenario: necessary conditions on the complex
/// orientation of any realization.
pub fn constrain(s: &Scenario, cfg: &EngineConfig) -> Result<Vec<OrientationClass>, Error> {
    Ok(prohibit(s, cfg)?.survivors().map(|o| o.class.clone()).collect())
}
