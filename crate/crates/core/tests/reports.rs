use std::fs;

use wavelab_core::lab::{run_scenario, Scenario};
use wavelab_core::model::parse_scenario;

const TINY_CONSERVATION: &str = r#"
[scenario]
name = "conservation"
mode = "radial"
T = 10.0
refinements = 2

[grid]
h = 0.03125
cfl = 0.45

[data]
epsilon = 0.2

[[data.bump]]
component = 1
kind = "f"
center = [0.0, 0.0]
radius = 1.0
amplitude = 1.0

[[data.bump]]
component = 2
kind = "f"
center = [0.0, 0.0]
radius = 1.0
amplitude = 1.0
"#;

#[test]
fn tiny_symmetric_conservation_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_scenario(TINY_CONSERVATION).unwrap();
    let (summary, _) = run_scenario(&config, dir.path()).unwrap();
    assert!(summary.pass, "{:?}", summary.failing().collect::<Vec<_>>());
    assert!(summary.assertion("difference_residual").unwrap().value <= 5e-3);
    assert!(dir.path().join("energy.csv").exists());
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn summaries_are_identical_across_reruns_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = Scenario::SymmetricDecay.config(&[("scenario.T".into(), "12.0".into())]).unwrap();
    let mut texts = Vec::new();
    for (k, threads) in [1, 1, 3].into_iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_scenario(&config, &out)).unwrap();
        texts.push(fs::read(out.join("summary.json")).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
}

#[test]
fn profile_oracle_summary_lists_every_assertion() {
    let dir = tempfile::tempdir().unwrap();
    let (summary, _) = run_scenario(&Scenario::ProfileOracle.config(&[]).unwrap(), dir.path()).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["scenario"], "profile-oracle");
    assert_eq!(json["pass"], summary.pass);
    let names: Vec<&str> = json["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["name"].as_str().unwrap())
        .collect();
    for want in ["closed_form_rel_err", "invariant_drift", "trichotomy_limit_err", "trichotomy_survivor"] {
        assert!(names.contains(&want), "missing {want}");
    }
}

#[test]
fn threshold_override_turns_a_pass_into_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let config = Scenario::RadiationDecay
        .config(&[("thresholds.slope_hi".into(), "-1.6".into())])
        .unwrap();
    let (summary, _) = run_scenario(&config, dir.path()).unwrap();
    assert!(!summary.pass);
    assert!(summary.failing().all(|a| a.name.starts_with("decay_slope")));
}

#[test]
fn unknown_scenario_name_is_rejected() {
    let text = TINY_CONSERVATION.replace("\"conservation\"", "\"no-such\"");
    let dir = tempfile::tempdir().unwrap();
    match parse_scenario(&text) {
        Err(_) => {}
        Ok(config) => assert!(run_scenario(&config, dir.path()).is_err()),
    }
}
