use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use qsat::hamiltonian::kernel_dimension;
use qsat::projectors::{ProjectorForm, ProjectorSet};
use qsat::{is_clause_coverable, sample_graph, EnsembleMode, EnsembleParams, InteractionGraph};

fn qsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsat")).args(args).env_remove("QSAT_JOBS").output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = qsat(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn instances(dir: &Path) {
    let v = json_ok(&["paper-instances", "--dir", dir.to_str().unwrap()]);
    assert_eq!(v["written"].as_array().unwrap().len(), 3);
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn reference_instances_are_written_verbatim() {
    let dir = tempfile::tempdir().unwrap();
    instances(dir.path());
    let a = std::fs::read_to_string(dir.path().join("instance_a.json")).unwrap();
    assert_eq!(
        a,
        r#"{"n_qubits":10,"k":3,"clauses":[[3,5,8],[5,6,7],[0,6,8],[1,3,5],[0,2,5],[1,3,9],[1,4,9],[0,1,5],[2,3,7],[0,1,2]]}"#
    );
    for l in ["a", "b", "c"] {
        let g = InteractionGraph::from_json(&std::fs::read_to_string(dir.path().join(format!("instance_{l}.json"))).unwrap()).unwrap();
        assert_eq!((g.n_qubits(), g.num_clauses()), (10, 10));
        assert!(dir.path().join(format!("instance_{l}.json.manifest.json")).exists());
    }
}

#[test]
fn analysis_subcommands_on_reference_instances() {
    let dir = tempfile::tempdir().unwrap();
    instances(dir.path());
    let (a, c) = (path(dir.path(), "instance_a.json"), path(dir.path(), "instance_c.json"));

    let k = json_ok(&["kernel", "--graph", &c, "--seed", "7"]);
    assert_eq!(k["dimension"], 0);
    assert_eq!(k["marginal"], false);
    assert!(k["spectrum_evidence"].as_array().is_some_and(|v| !v.is_empty()));

    let s = json_ok(&["sat", "--graph", &c, "--seed", "7"]);
    assert_eq!(s["verdict"], "UNSAT");
    let s = json_ok(&["sat", "--graph", &a, "--seed", "7", "--method", "iterative"]);
    assert_eq!(s["verdict"], "SAT");

    let cover = json_ok(&["cover", "--graph", &c]);
    assert_eq!(cover["coverable"], false);
    assert!(cover["witness"].is_null());
    let cover = json_ok(&["cover", "--graph", &a]);
    assert_eq!(cover["coverable"], true);
    assert_eq!(cover["witness"].as_array().unwrap().len(), 10);

    let m = json_ok(&["match", "--graph", &c]);
    assert_eq!(m["result"], 9);

    let p = json_ok(&["prodsat", "--graph", &a, "--seed", "3"]);
    assert!(p["energy"].as_f64().unwrap() < 1e-9);
    let witness = p["witness"].as_array().unwrap();
    assert_eq!(witness.len(), 10);
    assert_eq!(witness[0].as_array().unwrap().len(), 2);

    let r = json_ok(&["rdm", "--graph", &c, "--seed", "7", "--subset-size", "5"]);
    let total: u64 = r["histogram"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 252);
    assert!(r["diagnostic_state_seed"].is_u64());
}

#[test]
fn matching_family_emits_result_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.json");
    std::fs::write(&g, r#"{"n_qubits":5,"k":3,"clauses":[[0,1,2],[2,3,4]]}"#).unwrap();
    let c = json_ok(&["count-coverings", "--graph", &g]);
    assert_eq!(c["result"], 8);
    assert_eq!(c["witness"].as_array().unwrap().len(), 8);
    let x = json_ok(&["gf2", "--graph", &g]);
    assert_eq!(x["result"], true);
    assert_eq!(x["witness"]["rank"], 2);
    let core = json_ok(&["core", "--graph", &g]);
    assert_eq!(core["result"], false);
    assert_eq!(core["witness"]["clauses"].as_array().unwrap().len(), 0);
}

#[test]
fn gen_round_trip_matches_in_memory_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "g.json");
    json_ok(&["gen", "--n", "9", "--k", "3", "--alpha", "0.9", "--mode", "fixed-count", "--seed", "42", "--out", &file]);
    let params = EnsembleParams { n_qubits: 9, k: 3, clause_density: 0.9, mode: EnsembleMode::FixedCount, seed: 42 };
    let g = sample_graph(&params).unwrap();
    assert_eq!(std::fs::read_to_string(&file).unwrap(), g.to_json().unwrap());

    let k = json_ok(&["kernel", "--graph", &file, "--seed", "5"]);
    let p = ProjectorSet::sample(&g, 5, ProjectorForm::Generic);
    assert_eq!(k["dimension"], kernel_dimension(&g, &p, None, 12).unwrap().dimension);
    let cover = json_ok(&["cover", "--graph", &file]);
    assert_eq!(cover["coverable"], is_clause_coverable(&g));

    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(format!("{file}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "gen");
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["params"]["gen"]["alpha"], 0.9);
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (path(dir.path(), "x.json"), path(dir.path(), "y.json"));
    let args = |out: &str| {
        vec!["scan", "--n", "6,8", "--alpha", "0.5,1.5", "--trials", "4", "--seed", "9", "--out", out]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let run = |out: &str| {
        let a = args(out);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        json_ok(&refs)
    };
    run(&x);
    run(&y);
    assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&y).unwrap());
    // Same with a different worker count.
    let out = Command::new(env!("CARGO_BIN_EXE_qsat"))
        .args(args(&y))
        .env("QSAT_JOBS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&y).unwrap());
}

#[test]
fn scan_writes_csv_and_reports_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "scan.csv");
    let v = json_ok(&[
        "scan", "--property", "coverable", "--n", "2000", "--alpha-min", "0.8", "--alpha-max", "1.0", "--alpha-step", "0.1",
        "--trials", "6", "--seed", "1", "--csv", &csv,
    ]);
    assert_eq!(v["scan"]["mode"], "binomial");
    assert_eq!(v["scan"]["alpha_grid"], serde_json::json!([0.8, 0.9, 1.0]));
    let table = std::fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("k,N,alpha,trials,sat,unsat,undecided,fraction,stderr"));
    assert_eq!(lines.count(), 3);
    assert!(v["crossings"][0]["alpha"].as_f64().is_some_and(|a| (0.8..=1.0).contains(&a)));

    let out = qsat(&["scan", "--n", "6", "--alpha", "0.3", "--trials", "3", "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("k,N,alpha"));
}

#[test]
fn bound_subcommand() {
    let v = json_ok(&["bound", "--k", "4"]);
    assert!((v["alpha_upper"].as_f64().unwrap() - 7.98).abs() < 0.01);
    assert!(v["note"].is_null());
    let v = json_ok(&["bound", "--k", "3"]);
    assert_eq!(v["note"], "sunflower, superseded by nosegay in Table I");
    let v = json_ok(&["bound", "--k", "4", "--alpha", "5"]);
    assert!((v["entropy"].as_f64().unwrap() - v["poisson_form"].as_f64().unwrap()).abs() < 1e-8);
}

#[test]
fn exit_codes() {
    assert_eq!(qsat(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(qsat(&["kernel"]).status.code(), Some(2));
    assert_eq!(qsat(&["kernel", "--graph", "x.json", "--form", "diagonal"]).status.code(), Some(2));
    assert_eq!(qsat(&["--help"]).status.code(), Some(0));

    let out = qsat(&["kernel", "--graph", "/definitely/missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid_input");

    let dir = tempfile::tempdir().unwrap();
    let big = path(dir.path(), "big.json");
    json_ok(&["gen", "--n", "40", "--alpha", "0.5", "--out", &big]);
    let out = qsat(&["kernel", "--graph", &big]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "limit_exceeded");

    let out = qsat(&["bound", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
}
