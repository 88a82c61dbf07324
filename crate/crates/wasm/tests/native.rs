use serde_json::Value;
use typeground_wasm::{apply_typedefs, builtin_listings, SynthDemo};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn listings_are_exposed_and_apply() {
    let listings = parse(&builtin_listings());
    let names: Vec<&str> = listings
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"muc"));
    let muc = listings
        .as_array()
        .unwrap()
        .iter()
        .find(|l| l["name"] == "muc")
        .unwrap();
    let out = parse(&apply_typedefs(
        muc["source"].as_str().unwrap(),
        "/people/person, /music/artist",
    ));
    assert_eq!(out["targets"], serde_json::json!(["/PER"]));
}

#[test]
fn typedef_errors_are_reported_as_json() {
    let out = parse(&apply_typedefs("/A := (/b", "/b"));
    assert!(out["error"].as_str().unwrap().contains("line 1"));
}

#[test]
fn synthetic_run_reports_metrics_and_traces() {
    let demo = SynthDemo::new(42, 0.0);
    assert_eq!(demo.query_count(), 50);
    let out = parse(&demo.run(r#"{"lambda":0.5,"eta_s":0.8,"eta_c":0.3,"ell_esa":300,"ell_elmo":20}"#));
    assert_eq!(out["report"]["n_mentions"], 50);
    assert!(out["report"]["strict_acc"].as_f64().unwrap() >= 0.9);
    let q = &out["queries"][0];
    assert!(q["trace"]
        .as_array()
        .unwrap()
        .iter()
        .any(|l| l.as_str().unwrap().starts_with("branch: ")));

    let bad = parse(&demo.run(r#"{"lambda":2.0,"eta_s":0.8,"eta_c":0.3,"ell_esa":300,"ell_elmo":20}"#));
    assert!(bad["error"].is_string());
}

#[test]
fn coverage_curve_is_monotone() {
    let demo = SynthDemo::new(7, 0.2);
    let curve = parse(&demo.coverage(20));
    let values: Vec<f64> = curve
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p[1].as_f64().unwrap())
        .collect();
    assert_eq!(values.len(), 20);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
    assert!(parse(&demo.coverage(0))["error"].is_string());
}
