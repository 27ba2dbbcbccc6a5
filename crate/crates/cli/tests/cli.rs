use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sepspec::linalg::unitarity_deviation;
use sepspec::state::bell_state;
use sepspec::{BipartiteDensityMatrix, Spectrum};
use sepspec_cli::format::{read_json, write_json, DecompositionFile, StateFile};
use tempfile::TempDir;

fn sepspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json_stdout(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_state(dir: &TempDir, name: &str, rho: &BipartiteDensityMatrix) -> PathBuf {
    let path = dir.path().join(name);
    write_json(&path, &StateFile::from_state(rho)).unwrap();
    path
}

fn reference_state() -> BipartiteDensityMatrix {
    let m = sepspec::linalg::real_matrix(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, 0.0, 3.0, 2.0, 0.0, 0.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0, 4.0,
        ],
    )
    .unscale(11.0);
    BipartiteDensityMatrix::new(m, 2, 2).unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn check_reference_state_is_separable_with_zero_margin() {
    let dir = TempDir::new().unwrap();
    let state = write_state(&dir, "reference.json", &reference_state());
    let out = sepspec(&["check", p(&state)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: separable from spectrum"));
    let report = json_stdout(&sepspec(&["check", p(&state), "--json"]));
    assert!(report["condition"]["margin"].as_f64().unwrap().abs() <= 1e-12);
    assert_eq!(report["verdict"], "separable from spectrum");
    assert_eq!(report["ppt_at_identity"], true);
}

#[test]
fn check_from_lambdas() {
    let pure = sepspec(&["check", "--lambdas", "1", "0", "0", "0", "--dims", "2", "2"]);
    assert_eq!(code(&pure), 1);
    assert!(stdout(&pure).contains("verdict: not separable from spectrum"));
    let uniform = sepspec(&["check", "--lambdas", "uniform", "--dims", "2", "4"]);
    assert_eq!(code(&uniform), 0);
}

#[test]
fn invalid_inputs_exit_2_and_name_the_invariant() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"m":2,"n":1,"matrix":{"re":[[0.5,0.1],[0.3,0.5]],"im":[[0,0],[0,0]]}}"#,
    )
    .unwrap();
    let out = sepspec(&["check", p(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hermitian"));

    std::fs::write(&bad, r#"{"m":2,"n":2,"matrix":{"re":[[1]],"im":[[0]]}}"#).unwrap();
    let out = sepspec(&["check", p(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("shape invariant"));

    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&sepspec(&["check", p(&bad)])), 2);
    assert_eq!(
        code(&sepspec(&[
            "check",
            "--lambdas",
            "0.5",
            "0.6",
            "0",
            "-0.1",
            "--dims",
            "2",
            "2"
        ])),
        2
    );
    assert_eq!(
        code(&sepspec(&[
            "check",
            "--lambdas",
            "uniform",
            "--dims",
            "3",
            "2"
        ])),
        2
    );
    assert_eq!(code(&sepspec(&["check"])), 2);
}

#[test]
fn decompose_then_verify_reference_state() {
    let dir = TempDir::new().unwrap();
    let state = write_state(&dir, "reference.json", &reference_state());
    let out_path = dir.path().join("d.json");
    let out = sepspec(&["decompose", p(&state), "--out", p(&out_path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let file: DecompositionFile = read_json(&out_path).unwrap();
    assert!(file.terms.len() <= 8);
    assert!(file.meta.reconstruction_error <= 1e-8);
    assert!((file.meta.t_star - 0.5).abs() < 1e-6);

    let verified = sepspec(&["verify", p(&state), p(&out_path)]);
    assert_eq!(code(&verified), 0);
    assert!(stdout(&verified).contains("verdict: verified"));

    let mut corrupted = file.clone();
    corrupted.terms[0].weight += 0.05;
    let bad_path = dir.path().join("corrupted.json");
    write_json(&bad_path, &corrupted).unwrap();
    assert_eq!(code(&sepspec(&["verify", p(&state), p(&bad_path)])), 1);
}

#[test]
fn decompose_outcomes_follow_the_exit_contract() {
    let dir = TempDir::new().unwrap();
    let mixed = write_state(
        &dir,
        "mixed.json",
        &BipartiteDensityMatrix::maximally_mixed(2, 4),
    );
    let out_path = dir.path().join("d.json");
    assert_eq!(
        code(&sepspec(&["decompose", p(&mixed), "--out", p(&out_path)])),
        0
    );
    assert_eq!(code(&sepspec(&["verify", p(&mixed), p(&out_path)])), 0);

    let bell = write_state(&dir, "bell.json", &bell_state());
    let refused = sepspec(&["decompose", p(&bell), "--out", p(&out_path)]);
    assert_eq!(code(&refused), 1);
    assert!(!String::from_utf8_lossy(&refused.stderr).is_empty());
}

#[test]
fn verify_round_trip_and_dimension_mismatch() {
    let dir = TempDir::new().unwrap();
    // |0⟩⟨0| ⊗ I/2 written out by hand
    let state = write_state(
        &dir,
        "product.json",
        &BipartiteDensityMatrix::new(
            sepspec::linalg::real_matrix(
                4,
                4,
                &[
                    0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                ],
            ),
            2,
            2,
        )
        .unwrap(),
    );
    let decomposition = dir.path().join("exact.json");
    std::fs::write(
        &decomposition,
        r#"{"terms":[
            {"weight":0.5,"qubit":{"re":[1,0],"im":[0,0]},"qudit":{"re":[1,0],"im":[0,0]}},
            {"weight":0.5,"qubit":{"re":[1,0],"im":[0,0]},"qudit":{"re":[0,1],"im":[0,0]}}],
           "meta":{"t_star":0,"inequality_margin":0,"reconstruction_error":0}}"#,
    )
    .unwrap();
    let out = sepspec(&["verify", p(&state), p(&decomposition), "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_stdout(&out)["distance"].as_f64(), Some(0.0));

    let bigger = write_state(
        &dir,
        "bigger.json",
        &BipartiteDensityMatrix::maximally_mixed(2, 3),
    );
    assert_eq!(
        code(&sepspec(&["verify", p(&bigger), p(&decomposition)])),
        2
    );
}

#[test]
fn sample_is_deterministic_and_respects_filters() {
    let dir = TempDir::new().unwrap();
    let uniform = dir.path().join("uniform");
    let out = sepspec(&[
        "sample",
        "--dims",
        "2",
        "3",
        "--spectrum",
        "uniform",
        "--count",
        "3",
        "--out",
        p(&uniform),
    ]);
    assert_eq!(code(&out), 0);
    let first = std::fs::read(uniform.join("state-0000.json")).unwrap();
    for i in 1..3 {
        assert_eq!(
            std::fs::read(uniform.join(format!("state-{i:04}.json"))).unwrap(),
            first
        );
    }
    let mixed: StateFile = read_json(&uniform.join("state-0000.json")).unwrap();
    assert_eq!(
        mixed.to_state().unwrap(),
        BipartiteDensityMatrix::maximally_mixed(2, 3)
    );

    let run = |name: &str| {
        let dir_out = dir.path().join(name);
        let args = [
            "sample",
            "--dims",
            "2",
            "2",
            "--random-spectrum",
            "--count",
            "2",
            "--seed",
            "99",
            "--out",
            p(&dir_out),
        ];
        assert_eq!(code(&sepspec(&args)), 0);
        std::fs::read(dir_out.join("state-0001.json")).unwrap()
    };
    assert_eq!(run("a"), run("b"));

    let passing = dir.path().join("pass");
    let out = sepspec(&[
        "sample",
        "--dims",
        "2",
        "3",
        "--random-spectrum",
        "--condition-3",
        "pass",
        "--count",
        "100",
        "--out",
        p(&passing),
    ]);
    assert_eq!(code(&out), 0);
    for i in 0..100 {
        let path = passing.join(format!("state-{i:04}.json"));
        assert_eq!(code(&sepspec(&["check", p(&path)])), 0, "sample {i}");
    }
}

#[test]
fn scan_curves() {
    let dir = TempDir::new().unwrap();
    let state = write_state(&dir, "reference.json", &reference_state());
    let csv = dir.path().join("scan.csv");
    assert_eq!(
        code(&sepspec(&[
            "scan",
            p(&state),
            "--grid",
            "1001",
            "--out",
            p(&csv)
        ])),
        0
    );
    let rows = read_csv(&csv);
    assert_eq!(rows[0].join(","), "t,h,f_selected,f_lo,f_hi,degenerate");
    assert_eq!(rows.len(), 1002);
    let half = rows.iter().find(|r| r[0] == "0.5").expect("row at t = 0.5");
    assert!(half[1].parse::<f64>().unwrap() <= 1e-10);
    let h0: f64 = rows[1][1].parse().unwrap();
    let h1: f64 = rows[1001][1].parse().unwrap();
    assert!((h0 - h1).abs() <= 1e-12);

    let mixed = write_state(
        &dir,
        "mixed.json",
        &BipartiteDensityMatrix::maximally_mixed(2, 2),
    );
    assert_eq!(
        code(&sepspec(&[
            "scan",
            p(&mixed),
            "--grid",
            "101",
            "--out",
            p(&csv)
        ])),
        0
    );
    assert!(read_csv(&csv)[1..]
        .iter()
        .all(|r| r[1].parse::<f64>().unwrap() < 0.0));
}

#[test]
fn witness_outcomes() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("witness.json");
    let out = sepspec(&[
        "witness",
        "--lambdas",
        "0.5",
        "0.3",
        "0.2",
        "0.0",
        "--dims",
        "2",
        "2",
        "--out",
        p(&out_path),
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    assert!(json_stdout(&out)["recheck"].as_f64().unwrap() <= -1e-8);

    // recheck from the written file alone
    let file: StateFile = read_json(&out_path).unwrap();
    let u = file.matrix.to_matrix(4).unwrap();
    assert!(unitarity_deviation(&u) <= 1e-10);
    let spectrum = Spectrum::new(vec![0.5, 0.3, 0.2, 0.0]).unwrap();
    let diag = BipartiteDensityMatrix::new(spectrum.diagonal_matrix(), 2, 2).unwrap();
    assert!(diag.conjugate_global(&u).unwrap().min_pt_eigenvalue() <= -1e-8);

    let state = write_state(&dir, "reference.json", &reference_state());
    let none = sepspec(&["witness", p(&state), "--budget", "400"]);
    assert_eq!(code(&none), 1);
    assert!(stdout(&none).contains("found: no"));
    assert_eq!(
        code(&sepspec(&[
            "witness",
            "--lambdas",
            "uniform",
            "--dims",
            "2",
            "3",
            "--budget",
            "400"
        ])),
        1
    );
}

#[test]
fn witness_is_reproducible_for_a_seed() {
    let args = [
        "witness",
        "--lambdas",
        "0.4",
        "0.3",
        "0.2",
        "0.1",
        "0",
        "0",
        "--dims",
        "2",
        "3",
        "--seed",
        "5",
        "--json",
    ];
    assert_eq!(stdout(&sepspec(&args)), stdout(&sepspec(&args)));
}
