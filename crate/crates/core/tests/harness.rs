use ggslab::harness::{run_suite, SUITES};
use ggslab::{Error, GgsGroup};

fn gs3() -> GgsGroup {
    GgsGroup::gupta_sidki(3).unwrap()
}

#[test]
fn torsion_sweep_for_three() {
    let r = run_suite("torsion-criterion", &gs3(), 100, 0).unwrap();
    assert_eq!(r.samples, 8);
    assert_eq!(r.stats["torsion"], 2);
    assert_eq!(r.stats["non_torsion"], 6);
    assert!(r.is_success());
}

#[test]
fn length_inequalities_seed_42() {
    let r = run_suite("length-inequalities", &gs3(), 1000, 42).unwrap();
    assert_eq!(r.failed, 0);
    assert!(r.stats["alpha_zero"] > 300 && r.stats["alpha_nonzero"] > 300);
}

#[test]
fn dichotomy_seed_7() {
    let r = run_suite("dichotomy", &gs3(), 500, 7).unwrap();
    assert_eq!(r.failed, 0);
    assert_eq!(r.stats["all_full"] + r.stats["all_stabilize"], 500);
}

#[test]
fn reports_are_canonical_and_reproducible() {
    let g = GgsGroup::new(5, &[1, 4, 0, 0]).unwrap();
    for name in SUITES {
        let a = run_suite(name, &g, 10, 3).unwrap();
        let b = run_suite(name, &g, 10, 3).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "{name}");
        assert!(!a.to_json().contains("duration"));
        let value: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(value["suite"], name);
        assert_eq!(value["group"], "p=5; e=1,4,0,0");
    }
}

#[test]
fn seeds_change_the_samples() {
    let g = gs3();
    let a = run_suite("pipeline-bounds", &g, 30, 1).unwrap();
    let b = run_suite("pipeline-bounds", &g, 30, 2).unwrap();
    assert_ne!(a.stats, b.stats);
}

#[test]
fn torsion_suites_refuse_non_torsion_groups() {
    let g = GgsGroup::new(3, &[1, 1]).unwrap();
    assert!(matches!(
        run_suite("certify", &g, 5, 0),
        Err(Error::NotTorsion { .. })
    ));
    assert!(matches!(
        run_suite("missing", &g, 5, 0),
        Err(Error::UnknownSuite(_))
    ));
}
