//! End-to-end tests of the binary: file formats, exit codes, witness output
//! and determinism.

use serde_json::Value;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn ghp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn validate_good_and_bad_files() {
    let out = ghp(&["validate", &fixture("pair_a.json")]);
    let doc = stdout_json(&out);
    assert_eq!(doc["valid"], Value::Bool(true));
    assert_eq!(doc["points"], 2);
    assert_eq!(doc["backend"], "float");

    let out = ghp(&["validate", &fixture("bad_asym.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("asymmetric"),
        "stderr should name the violation: {err}"
    );
    assert!(
        err.contains("(0, 1)"),
        "stderr should carry the witness indices: {err}"
    );
}

#[test]
fn usage_errors_exit_one() {
    let out = ghp(&["dist", "nosuchmetric", "a", "b"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ghp(&["validate", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = ghp(&[
        "dist",
        "cghp",
        &fixture("line_limit.json"),
        &fixture("line_limit.json"),
        "--budget",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compact_distance_fixture_reports_witness() {
    let out = ghp(&[
        "dist",
        "cghp",
        &fixture("pair_a.json"),
        &fixture("pair_b.json"),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], 1.5);
    assert_eq!(doc["exact"], Value::Bool(true));
    let pairs = doc["witness"]["correspondence"].as_array().unwrap();
    assert!(pairs.iter().any(|p| p[0] == "p3" && p[1] == "o"));
}

#[test]
fn bounds_mode_reports_a_bracket() {
    let out = ghp(&[
        "dist",
        "cghp",
        &fixture("pair_a.json"),
        &fixture("pair_b.json"),
        "--mode",
        "bounds",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["exact"], Value::Bool(false));
    // Radius gap and greedy matching coincide here, so the bracket is tight.
    assert_eq!(doc["bracket"][0], 1.5);
    assert_eq!(doc["bracket"][1], 1.5);
}

#[test]
fn localized_distance_brackets_the_collapse() {
    let out = ghp(&[
        "dist",
        "ghp",
        &fixture("five_unit.json"),
        &fixture("dot_mass1.json"),
        "--tol",
        "1e-6",
    ]);
    let doc = stdout_json(&out);
    let value = doc["value"].as_f64().unwrap();
    assert!(
        (value - 0.2).abs() < 1e-5,
        "expected a bracket around 1/5, got {value}"
    );
    let lo = doc["bracket"][0].as_f64().unwrap();
    let hi = doc["bracket"][1].as_f64().unwrap();
    assert!(lo <= 0.2 + 1e-9 && 0.2 <= hi + 1e-9);
    assert!(hi - lo <= 1e-6 + 1e-12);
    assert!(doc["witness_xy"]["subspace_support"].is_array());
}

#[test]
fn radii_and_remaining_metrics() {
    let out = ghp(&["radii", &fixture("five_unit.json")]);
    let doc = stdout_json(&out);
    assert_eq!(doc["radii"], serde_json::json!([5.0]));

    // Zero-measure specialization: pointed Gromov-Hausdorff of {0,5} vs {0}
    // is half the forced distortion.
    let out = ghp(&[
        "dist",
        "cgh",
        &fixture("five_unit.json"),
        &fixture("dot_mass1.json"),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], 2.5);

    // Exponentially weighted integral: integrand is 0 before radius 3 and
    // capped at 1 afterwards.
    let out = ghp(&[
        "dist",
        "integral-ghp",
        &fixture("pair_a.json"),
        &fixture("pair_b.json"),
    ]);
    let doc = stdout_json(&out);
    let v = doc["value"].as_f64().unwrap();
    assert!((v - (-3.0f64).exp()).abs() < 1e-9);
}

#[test]
fn rational_backend_is_selected_by_literals() {
    let out = ghp(&[
        "coupling",
        &fixture("ground_mu.json"),
        &fixture("ground_nu.json"),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["backend"], "rational");
    assert_eq!(doc["prokhorov"], "2/5");
    assert_eq!(doc["far_mass"], "0");
    let plan = doc["plan"].as_array().unwrap();
    assert_eq!(plan.len(), 1);
    assert_eq!(plan[0]["from"], "o");
    assert_eq!(plan[0]["to"], "b");
    assert_eq!(plan[0]["mass"], "1");
}

#[test]
fn graph_distance_fixture() {
    let out = ghp(&[
        "dist",
        "bs",
        &fixture("graph_edge.json"),
        &fixture("graph_vertex.json"),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], 0.5);
    assert_eq!(doc["first_differing_radius"], 1);
}

#[test]
fn euclidean_coords_need_the_float_backend() {
    let out = ghp(&["validate", &fixture("coords_triangle.json")]);
    let doc = stdout_json(&out);
    assert_eq!(doc["backend"], "float");
    let out = ghp(&[
        "dist",
        "cghp",
        &fixture("coords_triangle.json"),
        &fixture("coords_triangle.json"),
        "--backend",
        "rational",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn projection_runs_and_verifies() {
    let out = ghp(&[
        "project",
        &fixture("pair_a.json"),
        &fixture("pair_a.json"),
        &fixture("subspec_root.json"),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["witness_value"], 0.0);
    assert_eq!(doc["verified_value"], 0.0);
    assert_eq!(doc["projected_support"].as_array().unwrap().len(), 1);
}

#[test]
fn convergence_report_shows_decreasing_sequences() {
    let out = ghp(&[
        "converge",
        &fixture("line_limit.json"),
        &fixture("line_n5.json"),
        &fixture("line_n10.json"),
        "--criteria",
        "ghp,integral",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["sequence_length"], 2);
    let ghp_vals = doc["ghp"]["values"].as_array().unwrap();
    assert_eq!(ghp_vals.len(), 2);
    assert!(ghp_vals[1].as_f64().unwrap() <= ghp_vals[0].as_f64().unwrap());
    assert_eq!(doc["ghp"]["nonincreasing"], Value::Bool(true));
    assert_eq!(doc["integral"]["nonincreasing"], Value::Bool(true));

    // Ball criteria drop grid radii that are discontinuity radii of the
    // limit: both non-root points of the limit sit at root distance 1, so
    // 1 is the only discontinuity radius in the default grid.
    let out = ghp(&[
        "converge",
        &fixture("line_limit.json"),
        &fixture("line_n5.json"),
        "--criteria",
        "balls",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["skipped_radii"], serde_json::json!([1.0]));
    let balls = doc["balls"].as_array().unwrap();
    assert_eq!(balls.len(), 3);
    assert_eq!(balls[0]["radius"], 0.5);
    assert_eq!(balls[1]["radius"], 2.0);
    assert_eq!(balls[2]["radius"], 4.0);
}

#[test]
fn weak_dist_over_directories() {
    let out = ghp(&[
        "weak-dist",
        &format!("{}/fixtures/collection_a", env!("CARGO_MANIFEST_DIR")),
        &format!("{}/fixtures/collection_b", env!("CARGO_MANIFEST_DIR")),
    ]);
    let doc = stdout_json(&out);
    let v = doc["value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&v));
    assert_eq!(doc["collection_sizes"][0], 2);
    assert_eq!(doc["collection_sizes"][1], 1);
}

#[test]
fn output_is_deterministic() {
    let run = || {
        ghp(&[
            "dist",
            "cghp",
            &fixture("pair_a.json"),
            &fixture("pair_b.json"),
        ])
        .stdout
    };
    assert_eq!(run(), run());
    let run = || {
        ghp(&[
            "dist",
            "ghp",
            &fixture("five_unit.json"),
            &fixture("dot_mass1.json"),
        ])
        .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn fixtures_roundtrip_through_ball() {
    // Every shipped space fixture parses, validates, and re-serializes (via
    // a ball that covers the whole space) to a document that validates to
    // the same quantities.
    for name in [
        "pair_a.json",
        "pair_b.json",
        "five_unit.json",
        "dot_mass1.json",
        "ground_mu.json",
        "ground_nu.json",
        "coords_triangle.json",
        "line_limit.json",
        "line_n5.json",
        "line_n10.json",
    ] {
        let before = stdout_json(&ghp(&["validate", &fixture(name)]));
        let out = ghp(&["ball", &fixture(name), "1000000"]);
        let doc = stdout_json(&out);
        let tmp = std::env::temp_dir().join(format!("ghp-roundtrip-{name}"));
        std::fs::write(&tmp, serde_json::to_string(&doc["space"]).unwrap()).unwrap();
        let after = stdout_json(&ghp(&["validate", tmp.to_str().unwrap()]));
        assert_eq!(before["points"], after["points"], "{name}");
        assert_eq!(before["total_mass"], after["total_mass"], "{name}");
        assert_eq!(before["radius"], after["radius"], "{name}");
        std::fs::remove_file(&tmp).ok();
    }
}

#[test]
fn flat_metrics_share_a_ground() {
    let out = ghp(&[
        "dist",
        "tv",
        &fixture("ground_mu.json"),
        &fixture("ground_nu.json"),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], "1");

    let out = ghp(&[
        "dist",
        "prokhorov",
        &fixture("ground_mu.json"),
        &fixture("ground_nu.json"),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], "2/5");

    let out = ghp(&[
        "dist",
        "hausdorff",
        &fixture("ground_mu.json"),
        &fixture("ground_nu.json"),
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], "2/5");

    // Mismatched grounds are a validation error.
    let out = ghp(&[
        "dist",
        "tv",
        &fixture("ground_mu.json"),
        &fixture("pair_a.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
