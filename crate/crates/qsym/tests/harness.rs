use qsym::harness::{list_identities, run_suite, Regime, SuiteConfig};

fn config(selection: &str, seed: u64) -> SuiteConfig {
    SuiteConfig {
        selection: vec![selection.into()],
        seed,
        trials: Some(3),
        ..SuiteConfig::default()
    }
}

#[test]
fn reports_depend_only_on_configuration() {
    let a = run_suite(&config("Q*", 5)).unwrap();
    let b = run_suite(&config("Q*", 5)).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let c = run_suite(&config("Q*", 6)).unwrap();
    assert_ne!(a.results[0].worst_params, c.results[0].worst_params);
}

#[test]
fn results_are_sorted_and_consistent() {
    let report = run_suite(&config("all", 3)).unwrap();
    assert_eq!(report.results.len(), list_identities().len());
    assert!(report.results.windows(2).all(|w| w[0].id < w[1].id));
    for r in &report.results {
        assert_eq!(r.pass, r.error.is_none() && r.max_rel_residual < 1e-32, "{}", r.id);
        assert!(r.worst_params.contains_key("q"), "{}", r.id);
        assert_eq!(r.precision_digits, 64);
    }
    assert!(report.all_pass());
}

#[test]
fn complex_regime_draws_complex_weights() {
    let cfg = SuiteConfig { regime: Regime::Complex, ..config("SYM", 9) };
    let report = run_suite(&cfg).unwrap();
    let r = &report.results[0];
    assert!(r.pass);
    assert!(r.worst_params["lambda1"].contains(','));
    assert_eq!(report.regime, "complex");
}

#[test]
fn small_q_only_for_pochhammer_identities() {
    let cfg = SuiteConfig { regime: Regime::SmallQ, ..config("HID1,SYM", 1) };
    let report = run_suite(&cfg).unwrap();
    let q = |id: &str| -> f64 { report.get(id).unwrap().worst_params["q"].parse().unwrap() };
    assert!(q("HID1") < 1.0);
    assert!(q("SYM") > 1.0);
    assert!(report.all_pass());
}

#[test]
fn worst_params_replay_at_full_precision() {
    let report = run_suite(&config("RMAT2", 2)).unwrap();
    let lam = &report.results[0].worst_params["lambda1"];
    assert!(lam.trim_start_matches('-').len() > 60, "{lam}");
}
