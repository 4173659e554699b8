use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn dblinst(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dblinst")).current_dir(dir).args(args).output().expect("spawn dblinst")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn emit(dir: &Path, name: &str) {
    let o = dblinst(dir, &["fixtures", "emit", name]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn emitted_theory_validates() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "walking_square");
    let o = dblinst(d.path(), &["validate-theory", "walking_square.json"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn every_fixture_emits() {
    let d = TempDir::new().unwrap();
    let list = stdout(&dblinst(d.path(), &["fixtures", "list"]));
    assert!(list.lines().count() >= 20);
    for name in list.lines() {
        emit(d.path(), name);
        assert!(d.path().join(format!("{name}.json")).exists(), "{name}");
    }
}

#[test]
fn elements_then_check_dopf_writes_a_witness() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "profunctor_instance");
    let o = dblinst(d.path(), &["elements", "profunctor_instance.json", "--model", "profunctor_instance_model.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = dblinst(d.path(), &["check-dopf", "pi.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(d.path().join("witness.json").exists());

    // ∇ of the witness, then validate against the base model.
    let o = dblinst(d.path(), &["nabla", "witness.json", "-o", "back.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = dblinst(d.path(), &["validate-instance", "back.json", "--model", "profunctor_instance_model.json"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let a = std::fs::read_to_string(d.path().join("back.json")).unwrap();
    let b = std::fs::read_to_string(d.path().join("profunctor_instance.json")).unwrap();
    let carriers = |s: &str| serde_json::from_str::<serde_json::Value>(s).unwrap()["carriers"].clone();
    assert_eq!(carriers(&a), carriers(&b));
}

#[test]
fn negative_feedback_loops_are_counted() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "negloop1");
    emit(d.path(), "signed_model");
    let o = dblinst(d.path(), &["count-morphisms", "negloop1.json", "signed_model.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // Negative closed walks aba and bab, plus a longer one at each of a, b, c.
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn non_dopf_is_rejected_with_a_counterexample() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "z4_spherical");
    let o = dblinst(d.path(), &["check-dopf", "z4_to_z2.json"]);
    assert_eq!(code(&o), 1);
    let c = std::fs::read_to_string(d.path().join("counterexample.json")).unwrap();
    assert!(c.contains("\"kind\": \"dopf_counterexample\""), "{c}");
}

#[test]
fn structural_errors_exit_two() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("bad.json"), "{\n  \"kind\": \"model\",\n  \"objects\": [1,\n}").unwrap();
    let o = dblinst(d.path(), &["validate-model", "bad.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.json:4:1"), "{}", stderr(&o));

    let o = dblinst(d.path(), &["validate-model", "missing.json"]);
    assert_eq!(code(&o), 2);
    let o = dblinst(d.path(), &["fixtures", "emit", "no_such_fixture"]);
    assert_eq!(code(&o), 2);
    let o = dblinst(d.path(), &["frobnicate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn violated_axioms_exit_one_with_a_report() {
    let d = TempDir::new().unwrap();
    // The unitor at E picks an element whose right leg lands at V.
    let model = r#"{
  "kind": "model",
  "theory": "builtin:walking_loose",
  "objects": {"⊢": ["E", "V"], "⊣": []},
  "loose": {
    "id:⊢": {"apex": ["s", "id_V"], "left": {"s": "E", "id_V": "V"}, "right": {"s": "V", "id_V": "V"}},
    "ℓ": {"apex": [], "left": {}, "right": {}}
  },
  "laxators": {"id:⊢,id:⊢": {"(id_V,id_V)": "id_V", "(s,id_V)": "s"}, "id:⊢,ℓ": {}},
  "unitors": {"⊢": {"E": "s", "V": "id_V"}}
}
"#;
    std::fs::write(d.path().join("m.json"), model).unwrap();
    let o = dblinst(d.path(), &["validate-model", "m.json"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stdout(&o).contains("unitor.span"), "{}", stdout(&o));
    let o = dblinst(d.path(), &["--json-report", "validate-model", "m.json"]);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["kind"], "report");
}

#[test]
fn reports_are_deterministic() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "weighted_graph");
    let run = || stdout(&dblinst(d.path(), &["--json-report", "validate-instance", "weighted_graph_instance.json"]));
    let first = run();
    assert!(first.contains("\"kind\": \"report\""), "{first}");
    assert_eq!(first, run());
}

#[test]
fn migration_pipeline() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "weighted_graph");
    let ok = |args: &[&str]| {
        let o = dblinst(d.path(), args);
        assert_eq!(code(&o), 0, "{args:?}: {}{}", stdout(&o), stderr(&o));
    };
    ok(&["elements", "weighted_graph_instance.json", "--model", "weighted_graph.json"]);
    // Pull the instance back to its elements, then push it forward again.
    ok(&["migrate", "--mode", "delta", "pi.json", "weighted_graph_instance.json", "-o", "up.json"]);
    ok(&["migrate", "--mode", "sigma", "pi.json", "up.json", "-o", "sigma.json"]);
    ok(&["migrate", "--mode", "pi", "pi.json", "up.json", "-o", "pi_ext.json"]);
    ok(&["validate-instance", "sigma.json", "--model", "weighted_graph.json"]);
    ok(&["validate-instance", "pi_ext.json", "--model", "weighted_graph.json"]);

    let f = TempDir::new().unwrap();
    let out = f.path().to_str().unwrap();
    ok(&["factorize", "pi.json", "--out-dir", out]);
    for file in ["e.json", "m.json", "witness.json", "instance.json"] {
        assert!(f.path().join(file).exists(), "{file}");
    }
    ok(&["check-initial", &format!("{out}/e.json"), "--corpus", "."]);
}

#[test]
fn copresheaf_round_trip_through_files() {
    let d = TempDir::new().unwrap();
    emit(d.path(), "functor_instance");
    let o = dblinst(d.path(), &["to-copresheaf", "functor_instance.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = dblinst(d.path(), &["from-copresheaf", "copresheaf.json", "--model", "functor_instance_model.json", "-o", "back.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let a: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("back.json")).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("functor_instance.json")).unwrap()).unwrap();
    assert_eq!(a["carriers"], b["carriers"]);
    assert_eq!(a["actions"], b["actions"]);
}
