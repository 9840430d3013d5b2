//! Runs every built-in scenario and reports one line per acceptance criterion.

use std::collections::HashMap;
use std::io::Write;

use wavelab_core::lab::{run_scenario, Scenario, Summary, Timing};

struct Criterion {
    id: usize,
    title: &'static str,
    scenario: Scenario,
    /// Assertion names, or prefixes ending in `*`; empty means every assertion.
    assertions: &'static [&'static str],
    budget_seconds: f64,
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        title: "energy difference conserved",
        scenario: Scenario::Conservation,
        assertions: &["difference_residual", "difference_order"],
        budget_seconds: 60.0,
    },
    Criterion {
        id: 2,
        title: "energy balance with dissipation",
        scenario: Scenario::Conservation,
        assertions: &["balance_residual", "total_energy_increase"],
        budget_seconds: 60.0,
    },
    Criterion {
        id: 3,
        title: "free solver against the Poisson oracle",
        scenario: Scenario::FreeValidation,
        assertions: &["error_over_h2", "error_order"],
        budget_seconds: 300.0,
    },
    Criterion {
        id: 4,
        title: "radiation field decay and support",
        scenario: Scenario::RadiationDecay,
        assertions: &["decay_slope_*", "support_max_abs"],
        budget_seconds: 60.0,
    },
    Criterion {
        id: 5,
        title: "free field approaches its radiation field",
        scenario: Scenario::FreeValidation,
        assertions: &["radiation_gap_slope"],
        budget_seconds: 300.0,
    },
    Criterion {
        id: 6,
        title: "profile ODE closed form and invariant",
        scenario: Scenario::ProfileOracle,
        assertions: &["closed_form_rel_err", "invariant_drift"],
        budget_seconds: 10.0,
    },
    Criterion {
        id: 7,
        title: "profile trichotomy limits",
        scenario: Scenario::ProfileOracle,
        assertions: &["trichotomy_limit_err", "trichotomy_survivor"],
        budget_seconds: 10.0,
    },
    Criterion {
        id: 8,
        title: "small-amplitude scaling of m",
        scenario: Scenario::EpsilonScaling,
        assertions: &[],
        budget_seconds: 900.0,
    },
    Criterion {
        id: 9,
        title: "both components keep their energy",
        scenario: Scenario::NondecayDemo,
        assertions: &[],
        budget_seconds: 120.0,
    },
    Criterion {
        id: 10,
        title: "symmetric data decays together",
        scenario: Scenario::SymmetricDecay,
        assertions: &[],
        budget_seconds: 120.0,
    },
];

fn selected<'a>(summary: &'a Summary, patterns: &[&str]) -> Vec<&'a wavelab_core::lab::Assertion> {
    summary
        .assertions
        .iter()
        .filter(|a| {
            patterns.is_empty()
                || patterns.iter().any(|p| match p.strip_suffix('*') {
                    Some(prefix) => a.name.starts_with(prefix),
                    None => a.name == *p,
                })
        })
        .collect()
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs: HashMap<Scenario, (Summary, Timing)> = HashMap::new();
    let mut failures = Vec::new();

    for c in &CRITERIA {
        let (summary, timing) = runs.entry(c.scenario).or_insert_with(|| {
            let config = c.scenario.config(&[]).unwrap();
            run_scenario(&config, &dir.path().join(c.scenario.name())).unwrap()
        });
        let checks = selected(summary, c.assertions);
        for p in c.assertions {
            let matched = checks.iter().any(|a| match p.strip_suffix('*') {
                Some(prefix) => a.name.starts_with(prefix),
                None => a.name == *p,
            });
            assert!(matched, "criterion {} expects an assertion {p}", c.id);
        }
        let within_budget = timing.total_seconds <= c.budget_seconds;
        let pass = !checks.is_empty() && checks.iter().all(|a| a.pass) && within_budget;
        let detail: Vec<String> = checks
            .iter()
            .map(|a| format!("{}={:.4e}{}", a.name, a.value, if a.pass { "" } else { "(FAIL)" }))
            .collect();
        writeln!(
            std::io::stdout(),
            "criterion {:>2} {}: {} [{}; {:.1}s of {:.0}s]",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.title,
            detail.join(", "),
            timing.total_seconds,
            c.budget_seconds,
        )
        .unwrap();
        if !pass {
            failures.push(c.id);
        }
    }
    assert!(failures.is_empty(), "failing criteria: {failures:?}");
}
