//! End-to-end tests of the `cycloto` binary: exit-code contract,
//! pipeline round-trips, and byte-identical deterministic output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cycloto"))
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write(name: &str, body: &str) -> PathBuf {
    let p = tmp(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_of(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const AB_SPEC: &str = r#"{"n":8,"star_exponents":[3],"window":{"preset":"ammann_beenker"}}"#;
const SQ_SPEC: &str = r#"{"n":4,"star_exponents":[],"window":{"preset":"square"}}"#;

fn square_patch() -> String {
    let pt = |a: i64, b: i64| format!(r#"{{"n":4,"coeffs":["{a}","{b}"]}}"#);
    format!(
        r#"{{"points":[{},{},{},{}],"radius":"2"}}"#,
        pt(0, 0),
        pt(1, 0),
        pt(0, 1),
        pt(1, 1)
    )
}

#[test]
fn generate_counts_points_in_octagonal_patch() {
    let spec = write("gen_ab_spec.json", AB_SPEC);
    let out = run(&["--spec", spec.to_str().unwrap(), "generate", "--radius", "6"]);
    let v = json_of(&out);
    let n = v["points"].as_array().unwrap().len();
    assert!(n > 100, "expected a large patch, got {n} points");
}

#[test]
fn generate_rejects_unknown_preset_and_bad_radius() {
    let spec = write(
        "gen_bad_spec.json",
        r#"{"n":8,"star_exponents":[3],"window":{"preset":"penrose5x"}}"#,
    );
    let out = run(&["--spec", spec.to_str().unwrap(), "generate", "--radius", "6"]);
    assert_eq!(out.status.code(), Some(2));

    let spec = write("gen_ab_spec2.json", AB_SPEC);
    let out = run(&["--spec", spec.to_str().unwrap(), "generate", "--radius", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["generate", "--radius", "2"]); // missing --spec
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn xray_of_unit_square_and_zero_direction() {
    let spec = write("xr_spec.json", SQ_SPEC);
    let patch = write("xr_patch.json", &square_patch());
    let out = run(&[
        "--spec", spec.to_str().unwrap(),
        "xray",
        "--points", patch.to_str().unwrap(),
        "--direction", "1,0",
        "--direction", "0,1",
    ]);
    let v = json_of(&out);
    for ray in v["data"].as_array().unwrap() {
        let counts: Vec<i64> = ray["lines"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| l["count"].as_i64().unwrap())
            .collect();
        assert_eq!(counts, vec![2, 2]);
    }

    let out = run(&[
        "--spec", spec.to_str().unwrap(),
        "xray",
        "--points", patch.to_str().unwrap(),
        "--direction", "0,0",
        "--direction", "0,1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_exit_codes_follow_consistency() {
    let spec = write("ck_spec.json", SQ_SPEC);
    let patch = write("ck_patch.json", &square_patch());
    let inst = tmp("ck_inst.json");
    let out = run(&[
        "--spec", spec.to_str().unwrap(),
        "xray",
        "--points", patch.to_str().unwrap(),
        "--direction", "1,0",
        "--direction", "0,1",
        "--out", inst.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = run(&["check", "--instance", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // corrupt one line count so the per-direction totals disagree
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    let c = v["data"][0]["lines"][0]["count"].as_i64().unwrap();
    v["data"][0]["lines"][0]["count"] = (c + 1).into();
    let bad = write("ck_bad_inst.json", &v.to_string());
    let out = run(&["check", "--instance", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let missing = tmp("ck_missing.json");
    let out = run(&["check", "--instance", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pipeline_round_trip_reconstructs_consistently() {
    let spec = write("rt_spec.json", AB_SPEC);
    let patch = tmp("rt_patch.json");
    let inst = tmp("rt_inst.json");
    assert!(run(&[
        "--spec", spec.to_str().unwrap(),
        "generate", "--radius", "2",
        "--out", patch.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(run(&[
        "--spec", spec.to_str().unwrap(),
        "xray",
        "--points", patch.to_str().unwrap(),
        "--direction", "1,0,0,0",
        "--direction", "0,1,0,0",
        "--out", inst.to_str().unwrap(),
    ])
    .status
    .success());
    assert_eq!(
        run(&["check", "--instance", inst.to_str().unwrap()]).status.code(),
        Some(0)
    );
    let out = run(&["reconstruct", "--instance", inst.to_str().unwrap()]);
    let v = json_of(&out);
    assert_eq!(v["status"], "CONSISTENT");
    let patch_pts: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&patch).unwrap()).unwrap();
    assert_eq!(
        v["solution"].as_array().unwrap().len(),
        patch_pts["points"].as_array().unwrap().len()
    );
}

#[test]
fn decompose_splits_lattice_into_three_classes() {
    let spec = write("dc_spec.json", SQ_SPEC);
    // 3x3 integer lattice block, directions 1+i and 1-2i
    let pts: Vec<String> = (0..3)
        .flat_map(|a| (0..3).map(move |b| format!(r#"{{"n":4,"coeffs":["{a}","{b}"]}}"#)))
        .collect();
    let patch = write(
        "dc_patch.json",
        &format!(r#"{{"points":[{}],"radius":"3"}}"#, pts.join(",")),
    );
    let inst = tmp("dc_inst.json");
    assert!(run(&[
        "--spec", spec.to_str().unwrap(),
        "xray",
        "--points", patch.to_str().unwrap(),
        "--direction", "1,1",
        "--direction", "1,-2",
        "--out", inst.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&["decompose", "--instance", inst.to_str().unwrap()]);
    let v = json_of(&out);
    assert_eq!(v["classes"].as_array().unwrap().len(), 3);
    assert_eq!(v["iterations"], 3);
    // the grid holds every pairwise line intersection, so it covers at
    // least the 9 original points and at most 7*7 crossings
    let total: usize = v["classes"].as_array().unwrap().iter().map(|c| c.as_array().unwrap().len()).sum();
    assert!((9..=49).contains(&total), "grid size {total}");

    let out = run(&["separate", "--instance", inst.to_str().unwrap()]);
    let v = json_of(&out);
    assert_eq!(v["families"].as_array().unwrap().len(), 3);
}

#[test]
fn unique_detects_forced_square() {
    let spec = write("uq_spec.json", SQ_SPEC);
    let patch = write("uq_patch.json", &square_patch());
    let out = run(&[
        "--spec", spec.to_str().unwrap(),
        "unique",
        "--points", patch.to_str().unwrap(),
        "--direction", "1,0",
        "--direction", "0,1",
    ]);
    let v = json_of(&out);
    assert_eq!(v["status"], "UNIQUE");
}

#[test]
fn render_produces_svg_even_for_empty_patch() {
    let empty = write("rd_empty.json", r#"{"points":[],"radius":"1"}"#);
    let out = run(&["render", "--input", empty.to_str().unwrap(), "--kind", "patch"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg "));
    assert!(svg.trim_end().ends_with("</svg>"));

    let out = run(&["render", "--input", empty.to_str().unwrap(), "--kind", "blob"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "--precision", "16",
        "render", "--input", empty.to_str().unwrap(), "--kind", "patch",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let spec = write("dt_spec.json", AB_SPEC);
    let mut runs = Vec::new();
    for i in 0..2 {
        let patch = tmp(&format!("dt_patch_{i}.json"));
        let svg = tmp(&format!("dt_render_{i}.svg"));
        assert!(run(&[
            "--spec", spec.to_str().unwrap(),
            "generate", "--radius", "3",
            "--out", patch.to_str().unwrap(),
        ])
        .status
        .success());
        assert!(run(&[
            "render",
            "--input", patch.to_str().unwrap(),
            "--kind", "patch",
            "--out", svg.to_str().unwrap(),
        ])
        .status
        .success());
        runs.push((std::fs::read(&patch).unwrap(), std::fs::read(&svg).unwrap()));
    }
    assert_eq!(runs[0].0, runs[1].0, "patch JSON differs between runs");
    assert_eq!(runs[0].1, runs[1].1, "rendered SVG differs between runs");
}

#[test]
fn render_window_draws_spec_polygon() {
    let spec = write("rw_spec.json", AB_SPEC);
    let out = run(&["render", "--input", spec.to_str().unwrap(), "--kind", "window"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.contains("<polygon"));
}
