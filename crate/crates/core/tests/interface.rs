use std::process::Command;

use freesdp::catalog::tv_lift;
use freesdp::io::report::to_json_string;
use freesdp::io::schema::{DropJson, Payload};
use freesdp::io::{corpus, emit_corpus, parse_problem, run, Manifest, Overrides, Verdict};
use freesdp::Error;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_freesdp"))
}

#[test]
fn corpus_round_trips_exactly() {
    for e in corpus() {
        let text = to_json_string(&e.problem);
        let back = parse_problem(text.as_bytes()).unwrap();
        assert_eq!(back, e.problem, "{}", e.name);
    }
}

#[test]
fn tvscreen_file_holds_the_tv_lift() {
    let dir = tempfile::tempdir().unwrap();
    emit_corpus(dir.path()).unwrap();
    let p = parse_problem(&std::fs::read(dir.path().join("tvscreen-drop.json")).unwrap()).unwrap();
    let Payload::Drop { drop, .. } = p.payload else { panic!("wrong kind") };
    let k = drop.to_drop("drop").unwrap();
    assert_eq!(k.lift(), &tv_lift());
    assert_eq!(drop, DropJson::from_drop(&k));
}

#[test]
fn manifest_lists_expected_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let files = emit_corpus(dir.path()).unwrap();
    assert!(files.iter().all(|f| f.exists()));
    let m: Manifest = serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    let find = |f: &str| m.problems.iter().find(|e| e.file == f).unwrap().expected;
    assert_eq!(find("nocon-cthull.json"), Verdict::Infeasible);
    assert_eq!(find("tvscreen-drop.json"), Verdict::Feasible);
    let grid = std::fs::read_to_string(dir.path().join(&m.dual_grid.file)).unwrap();
    assert_eq!(grid.lines().count(), 1 + 41 * 41);
    assert!(grid.starts_with("c1,c2,q,q_sign"));
}

#[test]
fn distinct_input_errors() {
    let empty = br#"{"version":"1","kind":"polar","payload":{"omega":[],"point":[{"rows":1,"cols":1,"re":[1]}]}}"#;
    let e = parse_problem(empty).unwrap_err();
    assert!(e.to_string().contains("empty tuple"), "{e}");
    let imag = br#"{"version":"1","kind":"membership","payload":{"pencil":{"constant":{"rows":1,"cols":1,"re":[1]},
        "x":[{"rows":1,"cols":1,"re":[1],"im":[0.1]}]},"point":[{"rows":1,"cols":1,"re":[1]}]}}"#;
    let e = parse_problem(imag).unwrap_err();
    assert!(matches!(e.root(), Error::NotHermitian { .. }));
    assert!(e.to_string().contains("not Hermitian"));
    assert!(e.to_string().contains("payload.pencil.x[0]"));
    let dims = br#"{"version":"1","kind":"polar","payload":{"omega":[{"rows":1,"cols":1,"re":[1,2]}],"point":[{"rows":1,"cols":1,"re":[1]}]}}"#;
    assert!(matches!(parse_problem(dims).unwrap_err().root(), Error::DimensionMismatch(_)));
    let schema = br#"{"version":"1","kind":"polar","payload":{"omega":[{"rows":1,"cols":1,"re":[1]}]}}"#;
    let e = parse_problem(schema).unwrap_err();
    assert!(matches!(e, Error::Parse { .. }));
    assert!(e.to_string().contains("line 1"), "{e}");
}

#[test]
fn reports_match_corpus_and_are_deterministic() {
    for e in corpus() {
        let a = run(&e.problem, &Overrides::default()).unwrap();
        assert_eq!(a.status, e.expected, "{}: {}", e.name, a.message);
        assert_eq!(a.exit_code(), 0);
        let b = run(&e.problem, &Overrides::default()).unwrap();
        assert_eq!(a.witnesses, b.witnesses, "{}", e.name);
        assert_eq!(a.margin.map(f64::to_bits), b.margin.map(f64::to_bits));
        assert!(a.to_text().contains(&format!("status: {}", a.status.as_str())));
        let j: serde_json::Value = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(j["status"], a.status.as_str());
    }
}

#[test]
fn dominate_report_has_contraction_witness() {
    let e = corpus().into_iter().find(|e| e.name == "ex-fails-dominate").unwrap();
    let r = run(&e.problem, &Overrides::default()).unwrap();
    let v = r.witnesses["v"]["re"][0].as_f64().unwrap();
    assert!((v - 0.5f64.sqrt()).abs() < 1e-6);
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin().arg("corpus").arg(dir.path()).output().unwrap();
    assert!(st.status.success());
    let out = bin()
        .args(["run", "--format", "text"])
        .arg(dir.path().join("no-tracial-extension-operation.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("status: INFEASIBLE"));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(bin().arg("run").arg(&bad).output().unwrap().status.code(), Some(4));
    let mode = bin()
        .args(["run", "--mode", "sideways"])
        .arg(dir.path().join("ex-fails-dominate.json"))
        .output()
        .unwrap();
    assert_eq!(mode.status.code(), Some(4));
    let json_out = dir.path().join("r.json");
    let st = bin()
        .args(["run", "--out"])
        .arg(&json_out)
        .arg(dir.path().join("ex-fails-bounded.json"))
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_slice(&std::fs::read(&json_out).unwrap()).unwrap();
    assert_eq!(j["status"], "UNBOUNDED");
}

#[test]
fn exit_code_table() {
    use Verdict::*;
    for v in [Feasible, Infeasible, Bounded, Unbounded, Valid, Invalid, Done] {
        assert_eq!(v.exit_code(), 0);
    }
    assert_eq!(Marginal.exit_code(), 2);
    assert_eq!(Error.exit_code(), 3);
    assert_eq!(freesdp::io::EXIT_INPUT_ERROR, 4);
}
