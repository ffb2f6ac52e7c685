use herglotz::harness::{
    exit_code, report_emit, run_suites, sample_density, to_json, validate_report_json, Provenance, RatioReport, RunConfig, SuiteId, Verdict,
};
use herglotz::norms::sobolev_norm_sq;

fn small(suites: &[SuiteId]) -> RunConfig {
    RunConfig { max_degree: 6, samples: 4, suites: suites.to_vec(), ..RunConfig::default() }
}

#[test]
fn identical_config_gives_identical_reports() {
    let c = small(&[SuiteId::TheoremL, SuiteId::TheoremS, SuiteId::PropGrowth]);
    let a = run_suites(&c).unwrap();
    let b = run_suites(&c).unwrap();
    assert_eq!(to_json(&a), to_json(&b));
}

#[test]
fn ratios_positive_and_finite_for_generic_samples() {
    let c = small(&[SuiteId::TheoremL, SuiteId::TheoremS, SuiteId::TheoremSGeneral, SuiteId::TheoremK, SuiteId::PropGrowth]);
    for r in run_suites(&c).unwrap() {
        if ["theorem_l", "theorem_s", "theorem_s_general", "theorem_k", "prop_growth_finite"].contains(&r.suite.as_str()) {
            assert!(r.ratios.iter().all(|x| x.is_finite() && *x > 0.0), "{} {:?}", r.suite, r.parameters);
            assert!(r.max >= r.median && r.median >= r.min && r.min > 0.0);
        }
    }
}

#[test]
fn constant_density_is_excluded_not_failed() {
    // 2^-1100 underflows, so every non-constant coefficient is zero.
    let c = RunConfig { gamma: 1100.0, ..small(&[SuiteId::TheoremS]) };
    assert!(sample_density(3, 6, 1100.0, 7).iter().skip(1).all(|(_, _, z)| z.norm() == 0.0));
    let reports = run_suites(&c).unwrap();
    let cell = reports.iter().find(|r| r.suite == "theorem_s").unwrap();
    assert_eq!(cell.excluded, 4);
    assert!(cell.ratios.is_empty());
    assert!(cell.notes.iter().any(|n| n.contains("excluded")));
}

#[test]
fn report_json_round_trips() {
    let c = small(&[SuiteId::Appendix, SuiteId::PropRecovery]);
    let reports = run_suites(&c).unwrap();
    let back = validate_report_json(&to_json(&reports)).unwrap();
    assert_eq!(back, reports);
}

#[test]
fn non_finite_values_survive_json() {
    let r = RatioReport::new("x", &[("a", 1.0)], vec![f64::NAN, 1.0, f64::INFINITY], Provenance::default()).judge_max(2.0);
    assert_eq!(r.verdict, Verdict::Fail);
    let back = validate_report_json(&to_json(&[r])).unwrap();
    assert!(back[0].ratios[0].is_nan());
    assert_eq!(back[0].ratios[2], f64::INFINITY);
}

#[test]
fn validator_rejects_tampered_summary() {
    let r = RatioReport::new("x", &[], vec![1.0, 2.0, 3.0], Provenance::default()).judge_spread(10.0);
    let tampered = to_json(&[r]).replace("\"median\": 2.0", "\"median\": 2.5");
    assert!(validate_report_json(&tampered).is_err());
    assert!(validate_report_json("{\"not\": \"a list\"}").is_err());
}

#[test]
fn empty_report_set_emits_valid_files() {
    let dir = std::env::temp_dir().join(format!("herglotz-empty-{}", std::process::id()));
    report_emit(&[], &dir).unwrap();
    let json = std::fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(validate_report_json(&json).unwrap().is_empty());
    assert!(std::fs::read_to_string(dir.join("report.md")).unwrap().starts_with("| suite"));
    assert_eq!(exit_code(&[]), 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn failing_bound_gives_exit_one() {
    let mut c = small(&[SuiteId::TheoremL]);
    c.tolerances.theorem_l_spread = 1.0;
    let reports = run_suites(&c).unwrap();
    assert!(reports.iter().any(|r| r.verdict == Verdict::Fail));
    assert_eq!(exit_code(&reports), 1);
}

#[test]
fn alpha_override_is_filtered_per_suite() {
    let c = RunConfig { alphas: Some(vec![-1.0, 0.5, 2.5]), ..RunConfig::default() };
    assert_eq!(c.alpha_grid(SuiteId::TheoremL), vec![-1.0, 0.5, 2.5]);
    assert_eq!(c.alpha_grid(SuiteId::TheoremS), vec![0.5]);
    assert_eq!(c.alpha_grid(SuiteId::TheoremSGeneral), vec![2.5]);
    assert_eq!(c.alpha_grid(SuiteId::TheoremK), vec![0.5, 2.5]);
}

#[test]
fn config_json_round_trips_and_validates() {
    let c = RunConfig::default();
    assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    let partial = RunConfig::from_json(r#"{"seed": 3, "suites": ["appendix"]}"#).unwrap();
    assert_eq!(partial.seed, 3);
    assert_eq!(partial.suites, vec![SuiteId::Appendix]);
    assert_eq!(partial.max_degree, 16);
    assert!(RunConfig::from_json(r#"{"samples": 0}"#).is_err());
    assert!(RunConfig::from_json(r#"{"max_degree": 0}"#).is_err());
    assert!(RunConfig::from_json(r#"{"dims": [1]}"#).is_err());
    assert!(RunConfig::from_json(r#"{"suites": ["nope"]}"#).is_err());
    assert!(SuiteId::parse("theorem_k").is_ok());
    assert!(SuiteId::parse("k").is_err());
}

#[test]
fn white_samples_concentrate_near_dimension_count() {
    // gamma = 0: E||f||^2 = sum_l nu(l), variance equal to that sum.
    let n = 16;
    let total: f64 = (0..=n).map(|l| herglotz::sphere::nu_dim(3, l) as f64).sum();
    let sigma = total.sqrt();
    for seed in 0..50 {
        let e = sobolev_norm_sq(&sample_density(3, n, 0.0, seed), 0.0);
        assert!((e - total).abs() <= 3.0 * sigma + 1e-9, "seed {seed}: {e} vs {total}");
    }
}
