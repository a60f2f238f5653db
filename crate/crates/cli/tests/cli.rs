use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cfgauge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfgauge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn schema(kind: &str) -> Value {
    json(&cfgauge(&["schema", kind]))
}

fn assert_valid(kind: &str, value: &Value) {
    let validator = jsonschema::validator_for(&schema(kind)).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{kind}: {errors:?}");
}

fn simulate(dir: &Path, seed: &str) -> std::path::PathBuf {
    let path = dir.join("run.csv");
    let out = cfgauge(&["simulate", "--preset", "short", "--seed", seed, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn zero_force_bend_is_all_zero() {
    let v = json(&cfgauge(&["bend", "--force", "0"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        for key in ["moment_nm", "deflection_mm", "max_strain", "average_strain", "gauge_strain", "max_fiber_stress_mpa", "loading_stress_mpa"] {
            assert_eq!(row[key].as_f64(), Some(0.0), "{key}");
        }
    }
    assert_valid("bend", &v);
}

#[test]
fn bend_signs_follow_the_faces() {
    let v = json(&cfgauge(&["bend", "--preset", "short", "--force", "62"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows[0]["face"], "top");
    assert!(rows[0]["loading_stress_mpa"].as_f64().unwrap() < 0.0);
    assert!(rows[1]["loading_stress_mpa"].as_f64().unwrap() > 0.0);
    let flipped = json(&cfgauge(&["bend", "--preset", "short", "--force", "62", "--orientation", "flipped"]));
    assert_eq!(flipped[0]["face"], "bottom");
}

#[test]
fn calculators_validate_against_their_schemas() {
    for (cmd, kind) in [("section", "section"), ("thermal", "thermal")] {
        let v = json(&cfgauge(&[cmd]));
        assert_eq!(v.as_array().unwrap().len(), 3);
        assert_valid(kind, &v);
    }
    let v = json(&cfgauge(&["reproduce", "table3", "--format", "json"]));
    assert_valid("table3", &v);
}

#[test]
fn section_csv_has_one_row_per_sample() {
    let out = cfgauge(&["section", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("sample,beam_height_mm,"));
}

#[test]
fn presets_validate_against_the_config_schema() {
    for name in ["short", "medium", "tall"] {
        let doc: Value = serde_json::from_str(cfgauge_core::config::preset_source(name).unwrap()).unwrap();
        assert_valid("config", &doc);
    }
}

#[test]
fn reproduce_table3_passes_with_presets() {
    let out = cfgauge(&["reproduce", "table3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("PASS").count(), 15);
    assert!(!text.contains("FAIL"));
}

#[test]
fn reproduce_fails_with_exit_one_when_out_of_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let layer = dir.path().join("span.json");
    std::fs::write(&layer, r#"{"geometry": {"span": {"value": 150, "unit": "mm"}}}"#).unwrap();
    let out = cfgauge(&["reproduce", "table3", "--preset", "short", "--config", layer.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn simulate_then_analyze_finds_every_small_set() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(dir.path(), "4");
    let meta: Value = serde_json::from_slice(&std::fs::read(dir.path().join("run.csv.meta.json")).unwrap()).unwrap();
    assert_valid("metadata", &meta);
    let report = json(&cfgauge(&["analyze", "--in", path.to_str().unwrap()]));
    assert_valid("report", &report);
    let small = meta["segments"].as_array().unwrap().iter().filter(|s| s["kind"] == "small").count();
    assert_eq!(small, 14);
    assert_eq!(report["windows"].as_array().unwrap().len(), small);
    assert_eq!(report["plan_digest"], meta["plan_digest"]);
}

#[test]
fn analyze_writes_svg_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(dir.path(), "2");
    let render = |name: &str| {
        let svg = dir.path().join(name);
        let out = cfgauge(&["analyze", "--in", path.to_str().unwrap(), "--format", "svg", "--out", svg.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        std::fs::read(svg).unwrap()
    };
    let (a, b) = (render("a.svg"), render("b.svg"));
    assert_eq!(a, b);
    assert!(a.starts_with(b"<svg"));
}

#[test]
fn sweep_writes_one_record_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("s.csv");
    let out = cfgauge(&["simulate", "--preset", "tall", "--seed", "7", "--sweep", "3", "--threads", "2", "--out", base.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for seed in 7..10 {
        assert!(dir.path().join(format!("s-{seed}.csv")).exists());
        assert!(dir.path().join(format!("s-{seed}.csv.meta.json")).exists());
    }
    let single = dir.path().join("one.csv");
    assert_eq!(code(&cfgauge(&["simulate", "--preset", "tall", "--seed", "8", "--out", single.to_str().unwrap()])), 0);
    assert_eq!(std::fs::read(single).unwrap(), std::fs::read(dir.path().join("s-8.csv")).unwrap());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    assert_eq!(code(&cfgauge(&[])), 2);
    assert_eq!(code(&cfgauge(&["bend"])), 2);
    assert_eq!(code(&cfgauge(&["section", "--preset", "huge"])), 2);
    assert_eq!(code(&cfgauge(&["section", "--config", "/does/not/exist.json"])), 2);
    assert_eq!(code(&cfgauge(&["simulate", "--preset", "short", "--out", out])), 2, "missing seed");
    assert_eq!(code(&cfgauge(&["simulate", "--seed", "1", "--out", out])), 2, "missing config");
    assert_eq!(code(&cfgauge(&["section", "--format", "svg"])), 2);
    assert_eq!(code(&cfgauge(&["analyze", "--in", "/does/not/exist.csv"])), 2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"geometry": {"spam": {"value": 1, "unit": "mm"}}}"#).unwrap();
    assert_eq!(code(&cfgauge(&["section", "--preset", "short", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn physics_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let layer = dir.path().join("hollow.json");
    std::fs::write(&layer, r#"{"geometry": {"hollow_height": {"value": 7, "unit": "mm"}}}"#).unwrap();
    let out = cfgauge(&["section", "--preset", "short", "--config", layer.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("physics error"));
}

#[test]
fn layered_configs_override_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    std::fs::write(&a, r#"{"name": "first", "geometry": {"span": {"value": 100, "unit": "mm"}}}"#).unwrap();
    std::fs::write(&b, r#"{"name": "second"}"#).unwrap();
    let v = json(&cfgauge(&[
        "bend", "--preset", "short", "--config", a.to_str().unwrap(), "--config", b.to_str().unwrap(), "--force", "10",
    ]));
    assert_eq!(v[0]["sample"], "second");
    let base = json(&cfgauge(&["bend", "--preset", "short", "--force", "10"]));
    let (m, m0) = (v[0]["moment_nm"].as_f64().unwrap(), base[0]["moment_nm"].as_f64().unwrap());
    assert!((m / m0 - 100.0 / 114.0).abs() < 1e-12);
}
