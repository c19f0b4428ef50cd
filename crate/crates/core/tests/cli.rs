use std::path::PathBuf;
use std::process::Command;

use fmu::cli::{run, EXIT_ERROR, EXIT_OK, EXIT_REFUTED};
use fmu::syntax::{parse_term, parse_type};
use fmu::typecheck::typecheck;
use serde_json::Value;

fn program(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "programs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn fmu(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fmu").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn fmu_json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, out, _) = fmu(&a);
    (code, serde_json::from_str(&out).expect("one JSON document"))
}

#[test]
fn exact_probability_of_von_neumann_run() {
    let (code, out, _) = fmu(&["prob", "--exact", &program("vn13.fmu")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1/1\n");
}

#[test]
fn mixed_identities_are_refuted_with_exit_one() {
    let (code, out, _) = fmu(&[
        "ciu",
        "--type",
        "all a. a -> a",
        &program("id_mix.fmu"),
        &program("id_single.fmu"),
    ]);
    assert_eq!(code, EXIT_REFUTED);
    assert!(out.contains("distinguished by"), "{out}");
    assert!(out.contains("13/72") && out.contains("25/144"), "{out}");
    assert!(out.contains("0.180555555"), "{out}");
}

#[test]
fn ill_typed_program_exits_two() {
    let (code, out, err) = fmu(&["check", &program("bad.fmu")]);
    assert_eq!(code, EXIT_ERROR);
    assert!(out.is_empty());
    assert!(err.contains("type mismatch"), "{err}");
}

#[test]
fn check_prints_the_type() {
    let (code, out, _) = fmu(&["check", &program("coin.fmu")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "unit -> unit + unit\n");
    let (code, _, _) = fmu(&["check", "--type", "unit -> nat", &program("coin.fmu")]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn prob_json_schema() {
    let (code, v) = fmu_json(&["prob", &program("choice_omega.fmu")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["command"], "prob");
    assert_eq!(v["result"]["lower"], "1/2");
    assert_eq!(v["result"]["upper"], "1/2");
    assert_eq!(v["result"]["exact"], true);
}

#[test]
fn dist_json_lists_sorted_entries_that_reparse() {
    let (code, v) = fmu_json(&["dist", &program("rand2.fmu")]);
    assert_eq!(code, EXIT_OK);
    let d = v["result"]["distribution"].as_array().unwrap();
    assert_eq!(d.len(), 2);
    let values: Vec<&str> = d.iter().map(|e| e["value"].as_str().unwrap()).collect();
    assert_eq!(values, ["1", "2"]);
    assert!(d.iter().all(|e| e["prob"] == "1/2"));
    for s in values {
        parse_term(s).unwrap();
    }
}

#[test]
fn json_output_is_deterministic() {
    let args = ["ciu", "--type", "all a. a -> a", "--both", &program("id_mix.fmu"), &program("id_single.fmu"), "--json"];
    let a = fmu(&args);
    let b = fmu(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    let witness = v["result"]["verdicts"][0]["context"].as_str().unwrap();
    fmu::syntax::parse_context(witness).unwrap();
}

#[test]
fn iterates_and_stratified() {
    let (_, out, _) = fmu(&["prob", "--iters", "2", &program("choice_omega.fmu")]);
    assert!(out.starts_with("0/1"), "{out}");
    let (_, out, _) = fmu(&["prob", "--iters", "3", &program("choice_omega.fmu")]);
    assert!(out.starts_with("1/2"), "{out}");
    let (code, out, _) = fmu(&["strat", "-k", "2", &program("choice_omega.fmu")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("1/2"), "{out}");
}

#[test]
fn conflicting_flags_are_usage_errors() {
    let (code, _, err) = fmu(&["prob", "--exact", "--iters", "3", &program("rand2.fmu")]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("cannot be used with"), "{err}");
    let (code, _, _) = fmu(&["prob", "--budget", "0", &program("rand2.fmu")]);
    assert_eq!(code, EXIT_ERROR);
    let (code, _, _) = fmu(&["frobnicate"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn small_budget_gives_bounds() {
    let (code, v) = fmu_json(&["prob", "--budget", "50", &program("vn13.fmu")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["result"]["exact"], false);
    assert_eq!(v["result"]["upper"], "1/1");
    let (code, _, err) = fmu(&["prob", "--exact", "--budget", "50", &program("vn13.fmu")]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("not closed"), "{err}");
}

#[test]
fn red_and_step() {
    let (_, v) = fmu_json(&["red", &program("rand2.fmu")]);
    let paths = v["result"]["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 2);
    assert!(paths.iter().all(|p| p["weight"] == "1/2" && p["kind"] == "choice"));
    let (_, v) = fmu_json(&["step", "-n", "1", &program("rand2.fmu")]);
    assert_eq!(v["result"]["successors"].as_array().unwrap().len(), 2);
}

#[test]
fn graph_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let (code, out, _) = fmu(&["graph", &program("choice_omega.fmu"), "--dot", dot.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn emitted_corpus_programs_reparse_and_typecheck() {
    let dir = tempfile::tempdir().unwrap();
    let (_, v) = fmu_json(&["corpus", "list"]);
    let progs = v["result"]["programs"].as_array().unwrap();
    assert!(progs.len() > 20);
    for p in progs {
        let name = p["name"].as_str().unwrap();
        let file = dir.path().join(format!("{name}.fmu"));
        let mut args = vec!["corpus", "emit", name];
        let params: Vec<String> = match name {
            "er" | "tr" => vec!["1".into(), "2".into()],
            "vn" => vec!["1".into(), "3".into()],
            "er-seq" => vec!["1/4".into(), "1/2".into()],
            _ => vec![],
        };
        args.extend(params.iter().map(String::as_str));
        args.extend(["-o", file.to_str().unwrap()]);
        let (code, _, err) = fmu(&args);
        assert_eq!(code, EXIT_OK, "{name}: {err}");
        let term = parse_term(&std::fs::read_to_string(&file).unwrap()).unwrap();
        let ty = parse_type(p["type"].as_str().unwrap()).unwrap();
        typecheck(&term, Some(&ty)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    let (code, _, _) = fmu(&["corpus", "emit", "vn", "3", "3"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn binary_exit_codes_and_effort_variable() {
    let bin = env!("CARGO_BIN_EXE_fmu");
    let out = Command::new(bin).args(["prob", &program("vn13.fmu")]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1/1\n");
    let out = Command::new(bin)
        .args(["prob", &program("vn13.fmu")])
        .env("FMU_EFFORT", "nodes=50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with('['));
    let out = Command::new(bin)
        .args(["prob", "--budget", "20000", &program("vn13.fmu")])
        .env("FMU_EFFORT", "nodes=50")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1/1\n", "flags override the variable");
    let out = Command::new(bin)
        .args(["prob", &program("vn13.fmu")])
        .env("FMU_EFFORT", "speed=9")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
