use ovalcert::adjunction::evaluate;
use ovalcert::engine::{constrain, prohibit, ClassResult, EngineConfig, Status};
use ovalcert::geometry::{CurveInput, CurveLabel, PLLoop, ProjRay};
use ovalcert::scenario::{build_prop1_scenario, build_prop2_scenario, OrientationSpec, Scenario, ScenarioOptions};
use ovalcert::smoothing::CrossingPattern;

fn diamond(cx: i64, r: i64) -> PLLoop {
    let p = |x, y| ProjRay::new(x, y, 1).unwrap();
    PLLoop::oval(vec![p(cx + r, 0), p(cx, r), p(cx - r, 0), p(cx, -r)]).unwrap()
}

#[test]
fn prop2_survivors_constrain_interior_ovals() {
    // classes: [non-empty oval], [enclosed], [interior, not enclosed], [outside]
    let survivors = constrain(&build_prop2_scenario(4, 2).unwrap(), &EngineConfig::default()).unwrap();
    assert_eq!(survivors.len(), 38);
    for c in &survivors {
        let [outer, enclosed, free, _] = c.counts_a[..] else { panic!("{:?}", c.counts_a) };
        // the representative reverses the non-empty oval; "positive" is opposite to it
        assert_eq!(outer, 0);
        assert_eq!(free, 1, "the non-enclosed interior oval points inward");
        assert!(enclosed >= 1, "at most one enclosed oval points outward");
    }
}

#[test]
fn far_ovals_never_violate() {
    let a = CurveInput { label: CurveLabel::A, degree: 4, loops: vec![diamond(0, 3)], type_one: true };
    let b = CurveInput { label: CurveLabel::B, degree: 2, loops: vec![diamond(20, 3)], type_one: true };
    let s = Scenario {
        curve_a: a,
        curve_b: b,
        orientation_spec: OrientationSpec::Enumerate { classes_a: vec![], classes_b: vec![] },
        options: ScenarioOptions::default(),
    };
    let v = prohibit(&s, &EngineConfig::default()).unwrap();
    assert_eq!(v.status, Status::NotProhibited);
    assert_eq!(v.classes.len(), 1);
    let ClassResult::Survives { best_lhs, rhs } = &v.classes[0].result else { panic!() };
    assert_eq!((*best_lhs, rhs.as_str()), (2, "3"));
}

#[test]
fn cusped_choices_keep_prohibitions() {
    for s in [build_prop1_scenario(3, 0).unwrap(), build_prop2_scenario(4, 3).unwrap()] {
        let plain = prohibit(&s, &EngineConfig::default()).unwrap();
        let cusped = prohibit(&s, &EngineConfig { cusped: true, ..EngineConfig::default() }).unwrap();
        assert_eq!(plain.status, Status::Prohibited);
        assert_eq!(cusped.status, Status::Prohibited);
        assert!(cusped.statistics.choices_per_class >= plain.statistics.choices_per_class);
    }
    let s = build_prop1_scenario(3, 1).unwrap();
    let cusped = prohibit(&s, &EngineConfig { cusped: true, ..EngineConfig::default() }).unwrap();
    assert_eq!(cusped.statistics.choices_per_class, 6);
}

#[test]
fn reversing_both_curves_keeps_lhs() {
    let s = build_prop1_scenario(2, 2).unwrap();
    let ev = ovalcert::adjunction::Evaluator::new(&s).unwrap();
    let patterns = vec![CrossingPattern::Compatible; ev.crossings()];
    for class in ovalcert::engine::enumerate_classes(&s, false) {
        let o = class.assignment;
        let both = o.reversed(CurveLabel::A).reversed(CurveLabel::B);
        let (x, y) = (evaluate(&s, &o, &patterns).unwrap(), evaluate(&s, &both, &patterns).unwrap());
        assert_eq!((x.lhs, x.xi), (y.lhs, y.xi));
    }
}

#[test]
fn cap_makes_unwitnessed_runs_inconclusive() {
    let s = build_prop1_scenario(3, 0).unwrap();
    let v = prohibit(&s, &EngineConfig { cap: 3, ..EngineConfig::default() }).unwrap();
    assert_eq!(v.status, Status::Inconclusive);
    assert!(v.statistics.cap_hit);
    assert_eq!(v.statistics.classes_examined, 3);
    // a survivor settles the verdict even when the cap is hit
    let s = build_prop2_scenario(4, 1).unwrap();
    let v = prohibit(&s, &EngineConfig { cap: 60, ..EngineConfig::default() }).unwrap();
    assert!(v.statistics.cap_hit);
    assert_eq!(v.status, Status::NotProhibited);
}

#[test]
fn witnesses_are_first_in_canonical_order() {
    let s = build_prop1_scenario(3, 0).unwrap();
    let v = prohibit(&s, &EngineConfig::default()).unwrap();
    for o in &v.classes {
        let ClassResult::Witness { choice, .. } = &o.result else { panic!() };
        if choice.reverse_b {
            // the unreversed choice must have failed first
            let r = evaluate(&s, &o.class.assignment, &[CrossingPattern::Compatible]).unwrap();
            assert!(!r.violated);
        }
    }
}
