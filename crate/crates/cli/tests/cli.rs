use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dimerlab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_reports_consistency() {
    let v = json(&["check", &fixture("gamma_4b.dimer")]);
    assert_eq!(v["consistent"], true);
    assert_eq!(v["isoradial"], true);
}

#[test]
fn pms_lists_eight_matchings_in_both_modes() {
    let par = json(&["pms", &fixture("gamma_4b.dimer")]);
    let seq = json(&["pms", &fixture("gamma_4b.dimer"), "--sequential"]);
    assert_eq!(par["count"], 8);
    assert_eq!(par, seq);
}

#[test]
fn pm_polygon_with_reference() {
    let v = json(&["pm-polygon", &fixture("gamma_4b.dimer"), "--p0", "e3,e6,e7"]);
    let mut verts: Vec<(i64, i64)> = v["polygon"]["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_i64().unwrap(), p[1].as_i64().unwrap()))
        .collect();
    verts.sort();
    assert_eq!(verts, [(-1, 0), (0, -1), (1, 0), (1, 1)]);
}

#[test]
fn zigzags_are_numbered_paths() {
    let v = json(&["zigzags", &fixture("gamma_4b.dimer")]);
    assert_eq!(v["paths"].as_array().unwrap().len(), 4);
    assert_eq!(v["crossings"][2][3], 2);
}

#[test]
fn verify_passes_on_both_sides() {
    for side in ["zig", "zag"] {
        let out = run(&["verify", &fixture("gamma_4b.dimer"), "--side", side, "--zigzag", "3", "--r", "1"]);
        assert_eq!(out.status.code(), Some(0), "{side}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn deform_writes_a_model() {
    let dir = std::env::temp_dir().join(format!("dimerlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("pentagon_iso_zig.dimer");
    let v = json(&[
        "deform",
        &fixture("pentagon_iso.dimer"),
        "--side",
        "zig",
        "--zigzag",
        "3",
        "--r",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(v["result"]["consistent"], true);
    assert_eq!(v["result"]["isoradial"], false);
    let check = json(&["check", out.to_str().unwrap()]);
    assert_eq!(check["consistent"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn mutate_polygon_matches_the_dual_route() {
    let direct = json(&["mutate-polygon", "--polygon", &fixture("hexagon4_polygon.json"), "--edge", "3"]);
    let dual = json(&["mutate-polygon", "--polygon", &fixture("hexagon4_polygon.json"), "--edge", "3", "--via-dual"]);
    assert_eq!(direct["mutated"], dual["mutated"]);
}

#[test]
fn mutate_dimer_by_labels() {
    let faces: Vec<String> = (1..=10).map(|i| i.to_string()).collect();
    let mut args = vec!["mutate-dimer".to_string(), fixture("hexagon4_b.draw")];
    for f in &faces {
        args.push("--face".into());
        args.push(f.clone());
    }
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(json(&args)["consistent"], true);
}

#[test]
fn render_is_deterministic() {
    let a = run(&["render", &fixture("gamma_4b.dimer"), "--pm", "2"]);
    let b = run(&["render", &fixture("gamma_4b.dimer"), "--pm", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).matches("edge highlight").count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["pms"]).status.code(), Some(2));
    assert_eq!(run(&["pms", "/nonexistent.dimer"]).status.code(), Some(1));
    let bad = run(&["zigzags", &fixture("gamma_4b.dimer"), "--bogus"]);
    assert_eq!(bad.status.code(), Some(2));
    // a model that fails validation is a failed check
    let two = std::env::temp_dir().join(format!("dimerlab-two-{}.dimer", std::process::id()));
    std::fs::write(&two, "[nodes]\nB black\nW white\n[edges]\na B W 0 0\nb B W 1 0\n[rotation]\nB: a b\nW: a b\n").unwrap();
    let out = run(&["check", two.to_str().unwrap()]);
    std::fs::remove_file(&two).unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["validation"]["ok"], false);
}

#[test]
fn assignment_and_schedule_files() {
    let dir = std::env::temp_dir().join(format!("dimerlab-assign-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sets = dir.join("sets.json");
    std::fs::write(&sets, r#"{"sets": [["W4B5"], ["W7B9"], ["W9B12", "W10B13"]]}"#).unwrap();
    let model = fixture("hexagon4.dimer");
    let schedule = fixture("hexagon4_schedule_a.json");
    let base = ["verify", &model, "--side", "zig", "--zigzag", "5", "--r", "3", "--family", "5,6,7"];
    let from_file = run(&[&base[..], &["--assignment", sets.to_str().unwrap(), "--schedule", &schedule]].concat());
    let inline = run(&[&base[..], &["--assignment", "sets:W4B5/W7B9/W9B12,W10B13", "--schedule", &schedule]].concat());
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(from_file.status.code(), Some(0), "{}", String::from_utf8_lossy(&from_file.stderr));
    assert_eq!(from_file.stdout, inline.stdout);
    let auto = run(&["verify", &fixture("gamma_4b.dimer"), "--side", "zig", "--zigzag", "3", "--r", "1", "--schedule", "auto"]);
    assert_eq!(auto.status.code(), Some(0));
}
