use wavelab_wasm::{energy_trace_json, profile_ode_json, radiation_profile_json};

const DATA: &str = r#"
[scenario]
name = "conservation"
mode = "radial"
T = 6.0

[grid]
h = 0.0625

[data]
epsilon = 0.5

[[data.bump]]
component = 1
kind = "f"
center = [0.0, 0.0]
radius = 2.0
amplitude = 1.0

[[data.bump]]
component = 2
kind = "g"
center = [0.0, 0.0]
radius = 2.0
amplitude = 1.0
"#;

fn parse(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

fn floats(v: &serde_json::Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn radiation_profile_vanishes_beyond_support() {
    let r = parse(&radiation_profile_json(DATA, -10.0, 4.0, 57).unwrap());
    let sigma = floats(&r["sigma"]);
    assert_eq!(sigma.len(), 57);
    let r0 = r["support_radius"].as_f64().unwrap();
    for j in 0..2 {
        let df = floats(&r["df"][j]);
        assert!(sigma.iter().zip(&df).filter(|(s, _)| **s >= r0).all(|(_, d)| *d == 0.0));
        assert!(df.iter().any(|d| d.abs() > 1e-3));
    }
}

#[test]
fn radiation_profile_rejects_bad_ranges() {
    assert!(radiation_profile_json(DATA, 1.0, -1.0, 10).is_err());
    assert!(radiation_profile_json(DATA, -1.0, 1.0, 1).is_err());
    assert!(radiation_profile_json("not toml [", -1.0, 1.0, 10).is_err());
}

#[test]
fn energy_trace_keeps_the_difference() {
    let r = parse(&energy_trace_json(DATA).unwrap());
    assert!(r["difference_residual"].as_f64().unwrap() < 5e-3);
    assert!(r["balance_residual"].as_f64().unwrap() < 5e-3);
    let t = floats(&r["t"]);
    assert_eq!(t.len(), floats(&r["e1sq"]).len());
    assert!((t[t.len() - 1] - 6.0).abs() < 1e-9);
}

#[test]
fn energy_trace_refuses_huge_grids() {
    let big = DATA.replace("h = 0.0625", "h = 0.0001");
    assert!(energy_trace_json(&big).unwrap_err().contains("limit"));
}

#[test]
fn profile_ode_tracks_the_closed_form() {
    let r = parse(&profile_ode_json(0.8, 0.5, 2.0, 2e4).unwrap());
    assert!((r["m"].as_f64().unwrap() - 0.39).abs() < 1e-12);
    let (v1, e1) = (floats(&r["v1"]), floats(&r["v1_exact"]));
    let (v2, e2) = (floats(&r["v2"]), floats(&r["v2_exact"]));
    for i in 0..v1.len() {
        assert!((v1[i] - e1[i]).abs() <= 1e-8 * e1[i].abs());
        assert!((v2[i] - e2[i]).abs() <= 1e-8 * e2[i].abs());
    }
}
