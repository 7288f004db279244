use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use deception_games::cli::SHIPPED_SPECS;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deception-games"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn shipped(name: &str) -> &'static str {
    SHIPPED_SPECS.iter().find(|(n, _)| *n == name).unwrap().1
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["solve", "--help"])), 0);
}

#[test]
fn bad_arguments_are_input_errors() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["solve"])), 1);
}

#[test]
fn missing_spec_is_an_input_error() {
    let out = run(&["solve", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn malformed_spec_reports_the_position() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(
        tmp.path(),
        "bad.json",
        "{\n  \"family\": \"binary-evidence\",\n  \"binary\": {\"prior\": 0.5,,}\n}",
    );
    let out = run(&["solve", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("bad.json:3:"), "{}", stderr(&out));
}

#[test]
fn invalid_parameters_are_input_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(
        tmp.path(),
        "p.json",
        r#"{"family": "binary-evidence", "binary": {"prior": 1.5, "alpha": 0.1, "beta": 0.6}}"#,
    );
    assert_eq!(code(&run(&["solve", "--spec", spec.to_str().unwrap()])), 1);
}

#[test]
fn pooling_in_the_middle_regime_has_no_equilibrium() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(
        tmp.path(),
        "m.json",
        r#"{"family": "binary-evidence",
            "binary": {"prior": 0.5, "alpha": 0.1, "beta": 0.6, "equilibrium": "pooling_m0"}}"#,
    );
    assert_eq!(code(&run(&["solve", "--spec", spec.to_str().unwrap()])), 2);
}

#[test]
fn infeasible_pool_count_has_no_equilibrium() {
    let tmp = tempfile::tempdir().unwrap();
    let text = shipped("continuous-slaph").replace("\"pools\": 3", "\"pools\": 2");
    assert_ne!(text, shipped("continuous-slaph"));
    let spec = write(tmp.path(), "c.json", &text);
    let out = run(&["solve", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn corrupted_solution_fails_verification() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(tmp.path(), "s.json", shipped("binary-conservative"));
    let dir = tmp.path().join("out");
    let spec = spec.to_str().unwrap();
    assert_eq!(
        code(&run(&[
            "solve",
            "--spec",
            spec,
            "--out",
            dir.to_str().unwrap()
        ])),
        0
    );
    let solution = dir.join("solution.json");
    let text = std::fs::read_to_string(&solution).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["profile"]["sender"]["prob_m1_given_theta"][0] = serde_json::json!(6.0 / 7.0);
    let corrupted = serde_json::to_string_pretty(&value).unwrap();
    let bad = write(tmp.path(), "bad.json", &corrupted);
    let out = run(&[
        "verify",
        "--spec",
        spec,
        "--solution",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let out = run(&[
        "verify",
        "--spec",
        spec,
        "--solution",
        solution.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    value = serde_json::from_str(&text).unwrap();
    value["thresholds"][1] = serde_json::json!(0.3);
    let bad = write(
        tmp.path(),
        "bad.json",
        &serde_json::to_string(&value).unwrap(),
    );
    let out = run(&[
        "verify",
        "--spec",
        spec,
        "--solution",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn tighter_tolerance_can_fail_a_grid_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(tmp.path(), "c.json", shipped("continuous-slaph"));
    let dir = tmp.path().join("out");
    let spec = spec.to_str().unwrap();
    assert_eq!(
        code(&run(&[
            "solve",
            "--spec",
            spec,
            "--out",
            dir.to_str().unwrap()
        ])),
        0
    );
    let solution = dir.join("solution.json");
    let solution = solution.to_str().unwrap();
    assert_eq!(
        code(&run(&["verify", "--spec", spec, "--solution", solution])),
        0
    );
    let out = run(&[
        "verify",
        "--spec",
        spec,
        "--solution",
        solution,
        "--tolerance",
        "0",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn solution_of_another_family_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let binary = write(tmp.path(), "b.json", shipped("binary-conservative"));
    let apt = write(tmp.path(), "a.json", shipped("apt-toy"));
    let dir = tmp.path().join("out");
    assert_eq!(
        code(&run(&[
            "solve",
            "--spec",
            binary.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap()
        ])),
        0
    );
    let out = run(&[
        "verify",
        "--spec",
        apt.to_str().unwrap(),
        "--solution",
        dir.join("solution.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn sweep_rejects_bad_ranges() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(tmp.path(), "s.json", shipped("binary-conservative"));
    let spec = spec.to_str().unwrap();
    assert_eq!(code(&run(&["sweep", "--spec", spec, "--steps", "0"])), 1);
    assert_eq!(
        code(&run(&["sweep", "--spec", spec, "--param", "gamma"])),
        1
    );
}

#[test]
fn sweep_writes_csv_and_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(tmp.path(), "s.json", shipped("apt-toy"));
    let svg = tmp.path().join("plot.svg");
    let out = run(&[
        "sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--steps",
        "3",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("row,mean_threat,"));
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn demo_writes_every_example() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["demo", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for (name, _) in SHIPPED_SPECS {
        let dir = tmp.path().join(name);
        for file in ["solution.json", "solution.txt", "report.json"] {
            assert!(dir.join(file).exists(), "{name}/{file}");
        }
    }
    assert!(tmp.path().join("apt-toy/trajectory.csv").exists());
}

#[test]
fn seeds_change_only_the_sampled_parts() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = write(tmp.path(), "a.json", shipped("apt-toy"));
    let spec = spec.to_str().unwrap();
    let solve = |seed: &str, dir: &str| {
        let dir = tmp.path().join(dir);
        assert_eq!(
            code(&run(&[
                "solve",
                "--spec",
                spec,
                "--out",
                dir.to_str().unwrap(),
                "--seed",
                seed
            ])),
            0
        );
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("solution.json")).unwrap())
                .unwrap();
        json
    };
    let (a, b, c) = (solve("1", "a"), solve("1", "b"), solve("2", "c"));
    assert_eq!(a, b);
    assert_eq!(a["nodes"], c["nodes"]);
    assert_ne!(a["monte_carlo"], c["monte_carlo"]);
}
