use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tropimeas_cli::formats::{MeasureFile, VectorFile};
use tropimeas_cli::{DistOutput, OracleOutput, ValidateOutput};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tropimeas"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tropimeas-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SPACE_AB: &str = r#"{"points":["a","b"],"dist":[[0,1],[1,0]]}"#;

#[test]
fn dist_between_diracs_is_one() {
    let dir = scratch("dist");
    write(&dir, "ab.json", SPACE_AB);
    let a = write(&dir, "a.json", r#"{"space":"ab.json","atoms":[{"point":"a","weight":0}]}"#);
    let b = write(&dir, "b.json", r#"{"space":"ab.json","atoms":[{"point":"b","weight":0}]}"#);
    let out = run(&["dist", "--n", "1", arg(&a), arg(&b)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: DistOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.n, 1);
    assert_eq!(report.value, 1.0);

    let csv = dir.join("levels.csv");
    let out = run(&["dist", "--n", "3", "--emit-csv", arg(&csv), arg(&a), arg(&b)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&csv).unwrap(), "n,hat_d,tilde_d\n1,1,1\n2,2,1\n3,3,1\n");

    let out = run(&["dist", "--aggregate", "--tol", "1e-9", arg(&a), arg(&b)]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["aggregate"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
}

#[test]
fn validate_names_the_violating_triple() {
    let dir = scratch("validate");
    let bad = write(&dir, "bad.json", r#"{"points":["a","b","c"],"dist":[[0,1,5],[1,0,1],[5,1,0]]}"#);
    let out = run(&["validate", arg(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.json"), "{msg}");
    assert!(msg.contains("(a,b,c)"), "{msg}");

    let good = write(&dir, "good.json", SPACE_AB);
    let out = run(&["validate", arg(&good)]);
    assert_eq!(out.status.code(), Some(0));
    let v: ValidateOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.valid);
}

#[test]
fn bad_input_exits_two_with_context() {
    let dir = scratch("bad");
    write(&dir, "ab.json", SPACE_AB);
    let m = write(&dir, "m.json", r#"{"space":"ab.json","atoms":[{"point":"z","weight":0}]}"#);
    let out = run(&["dist", "--n", "1", arg(&m), arg(&m)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("atoms[0].point"));

    let unnorm = write(&dir, "u.json", r#"{"space":"ab.json","atoms":[{"point":"a","weight":-1}]}"#);
    assert_eq!(run(&["dist", "--n", "1", "--strict", arg(&unnorm), arg(&unnorm)]).status.code(), Some(2));
    assert_eq!(run(&["dist", "--n", "1", arg(&unnorm), arg(&unnorm)]).status.code(), Some(0));

    assert_eq!(run(&["dist", "--n", "1", "missing.json", "missing.json"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn suite_is_deterministic() {
    let dir = scratch("suite");
    let config = write(
        &dir,
        "config.json",
        r#"{"counts":{"oracle_spaces":2,"oracle_pairs":2,"axiom_triples":20,"isometry_spaces":3,"monad":20,
            "pushforward":20,"flatten":10,"ball":20,"homotopy":20,"separation":10,"bridge_points":300,
            "dap_samples":20,"aggregate_pairs":10,"invariant":20}}"#,
    );
    let first = run(&["suite", "--seed", "7", "--config", arg(&config)]);
    let second = run(&["suite", "--seed", "7", "--config", arg(&config)]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stdout));
    assert_eq!(first.stdout, second.stdout);
    let report: tropimeas_cli::suite::SuiteReport = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report.seed, 7);
    let ids: Vec<_> = report.criteria.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["AC1", "AC2", "AC3", "AC4", "AC5", "AC6", "AC7", "AC8", "AC9", "AC10", "AC11"]);

    let env = bin().args(["suite", "--config", arg(&config)]).env("TROPIMEAS_SEED", "11").output().unwrap();
    assert_eq!(env.status.code(), Some(0));
    let from_env: tropimeas_cli::suite::SuiteReport = serde_json::from_slice(&env.stdout).unwrap();
    assert_eq!(from_env.seed, 11);
}

#[test]
fn emitted_json_round_trips() {
    let dir = scratch("roundtrip");
    write(&dir, "xyz.json", r#"{"points":["x","y","z"],"dist":[[0,1,2],[1,0,1],[2,1,0]]}"#);
    let m = write(&dir, "m.json", r#"{"space":"xyz.json","atoms":[{"point":"x","weight":0},{"point":"z","weight":-0.5}]}"#);
    let m0 = write(&dir, "m0.json", r#"{"space":"xyz.json","atoms":[{"point":"y","weight":0}]}"#);
    let map = write(&dir, "map.json", r#"{"assignment":{"x":"y","y":"y","z":"z"}}"#);
    let f = write(&dir, "f.json", r#"{"values":{"x":1,"y":0,"z":2},"n":2}"#);
    let combine = write(
        &dir,
        "c.json",
        r#"{"space":"xyz.json","terms":[{"alpha":0,"measure":{"atoms":[{"point":"x","weight":0}]}},
                                      {"alpha":-1,"measure":{"atoms":[{"point":"y","weight":0}]}}]}"#,
    );
    let meta = write(
        &dir,
        "meta.json",
        r#"{"space":"xyz.json","atoms":[{"measure":{"atoms":[{"point":"x","weight":0}]},"weight":0},
                                      {"measure":{"atoms":[{"point":"y","weight":0}]},"weight":-2}]}"#,
    );

    let outputs = [
        run(&["pushforward", arg(&m), arg(&map)]),
        run(&["combine", arg(&combine)]),
        run(&["flatten", arg(&meta)]),
        run(&["homotopy", "--lambda", "-1", arg(&m), arg(&m0)]),
        run(&["homotopy", "--lambda", "-inf", arg(&m), arg(&m0)]),
    ];
    for out in &outputs {
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let parsed: MeasureFile = serde_json::from_slice(&out.stdout).unwrap();
        let path = write(&dir, "emitted.json", std::str::from_utf8(&out.stdout).unwrap());
        let reread = run(&["pushforward", arg(&path), arg(&write(&dir, "id.json", r#"{"assignment":{"x":"x","y":"y","z":"z"}}"#))]);
        let again: MeasureFile = serde_json::from_slice(&reread.stdout).unwrap();
        assert_eq!(parsed, again);
    }
    let flat: MeasureFile = serde_json::from_slice(&outputs[2].stdout).unwrap();
    assert_eq!(flat.atoms.len(), 2);

    let out = run(&["integrate", arg(&m), arg(&f)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], 1.5);

    let z = write(&dir, "z.json", r#"{"z":[1,0.5,0]}"#);
    let out = run(&["bridge", "--to-simplex", arg(&z)]);
    let p: VectorFile = serde_json::from_slice(&out.stdout).unwrap();
    let p_path = write(&dir, "p.json", std::str::from_utf8(&out.stdout).unwrap());
    let back = run(&["bridge", "--to-tropical", arg(&p_path)]);
    match (p, serde_json::from_slice::<VectorFile>(&back.stdout).unwrap()) {
        (VectorFile::Simplex { p }, VectorFile::Tropical { z }) => {
            assert_eq!(p[2], 0.0);
            assert!(z.iter().zip([1.0, 0.5, 0.0]).all(|(a, b)| (a - b).abs() <= 1e-12));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(run(&["bridge", "--to-tropical", arg(&z)]).status.code(), Some(2));

    let out = run(&["oracle-check", "--n", "1", "--step", "0.05", arg(&m), arg(&m0)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let o: OracleOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert!(o.sandwiched);

    let six = write(
        &dir,
        "six.json",
        r#"{"points":["p0","p1","p2","p3","p4","p5"],
            "dist":[[0,1,2,3,4,5],[1,0,1,2,3,4],[2,1,0,1,2,3],[3,2,1,0,1,2],[4,3,2,1,0,1],[5,4,3,2,1,0]]}"#,
    );
    let out = run(&["dap-demo", "--net", "p0,p2,p4", "--lambda", "-1", "--samples", "50", arg(&six)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: tropimeas::DapReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.disjoint && report.within_bounds);
}
