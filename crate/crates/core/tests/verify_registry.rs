use arealength::verify::{builtin_map, InequalityReport, MapSpec, Verdict, Verifier, VerifyError, BUILTIN_MAPS, OMITTING_MAPS};

#[test]
fn every_builtin_name_resolves() {
    for name in BUILTIN_MAPS {
        assert_eq!(builtin_map(name).unwrap().label(), *name);
    }
    assert!(matches!(builtin_map("nope"), Err(VerifyError::UnknownMap(_))));
}

#[test]
fn reports_round_trip_through_json() {
    let v = Verifier::new(1e-8).unwrap().with_seed(3);
    for name in OMITTING_MAPS.iter().take(2) {
        let r = v.check_main(&builtin_map(name).unwrap()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"A\":") && text.contains("\"L\":"));
        let back: InequalityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.verdict(), Verdict::Holds);
    }
}

#[test]
fn spec_file_forms() {
    let p = MapSpec::from_json(r#"{"kind":"polynomial","coeffs":[3, {"re":0.5,"im":0.0}, [0.0, 0.1]]}"#).unwrap();
    let r = Verifier::new(1e-8).unwrap().check_main(&p.build().unwrap()).unwrap();
    assert!(r.holds);
    let b = MapSpec::from_json(r#"{"kind":"builtin","name":"shift3"}"#).unwrap();
    assert_eq!(b.build().unwrap().label(), "shift3");
    assert!(MapSpec::from_json(r#"{"kind":"other"}"#).is_err());
}

#[test]
fn omission_failures_are_reported() {
    let v = Verifier::new(1e-8).unwrap();
    for name in ["identity", "half", "square"] {
        let err = v.check_main(&builtin_map(name).unwrap()).unwrap_err();
        assert!(matches!(err, VerifyError::OmittedValueViolation { .. }), "{name}: {err}");
    }
}
