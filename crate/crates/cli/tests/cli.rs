use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use clap::CommandFactory;
use cm3_cli::{Cli, COMMAND_TABLE};
use serde_json::{json, Value};
use tempfile::TempDir;

/// Every library operation a command is expected to reach.
const MODULE_OPERATIONS: &[&str] = &[
    "trace_word",
    "commutator",
    "rank",
    "det",
    "traceless_pair",
    "invariant_tuple",
    "vw",
    "aux_traces",
    "eval_id1z",
    "eval_id2z",
    "eval_r",
    "eval_new_relation",
    "eval_old_relation",
    "classify_stratum",
    "on_cuspidal_curve",
    "check_cprime_criterion",
    "cm_point",
    "commuting_pair",
    "rank_k_pair",
    "run_identity_suite",
    "act_matrices",
    "act_tuple",
    "consistency_check",
    "normalize_d3",
    "classify_d30",
];

fn cm3(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_cm3"))
        .args(args)
        .output()
        .expect("binary runs");
    let text = String::from_utf8(out.stdout).expect("utf-8 output");
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().expect("exit code"), v)
}

fn write(dir: &TempDir, name: &str, v: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path_str(&path)
}

fn path_str(p: &Path) -> String {
    p.to_str().expect("utf-8 path").to_string()
}

/// The x = (0, 1, 2), y_diag = 0 point, produced through `sample`.
fn cm_pair(dir: &TempDir) -> String {
    let spec = write(
        dir,
        "point.json",
        &json!({"x": [0, 1, 2], "y_diag": [0, 0, 0]}),
    );
    let (code, v) = cm3(&["sample", "--kind", "cm", "--input", &spec]);
    assert_eq!(code, 0);
    write(dir, "pair.json", &v["witnesses"][0])
}

fn strip_timing(mut v: Value) -> Value {
    for r in v.as_array_mut().unwrap() {
        r.as_object_mut().unwrap().remove("elapsed_ms");
    }
    v
}

#[test]
fn every_operation_is_reached_by_exactly_one_command() {
    let mut owner: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (cmd, ops) in COMMAND_TABLE {
        for op in *ops {
            owner.entry(op).or_default().push(cmd);
        }
    }
    for op in MODULE_OPERATIONS {
        let cmds = owner.get(op).cloned().unwrap_or_default();
        assert_eq!(cmds.len(), 1, "{op} is reached by {cmds:?}");
    }
    let known: Vec<&str> = owner.keys().copied().collect();
    for op in known {
        assert!(MODULE_OPERATIONS.contains(&op), "unknown operation {op}");
    }
    let mut table: Vec<&str> = COMMAND_TABLE.iter().map(|(c, _)| *c).collect();
    let mut parser: Vec<String> = Cli::command()
        .get_subcommands()
        .map(|c| c.get_name().to_string())
        .collect();
    table.sort();
    parser.sort();
    assert_eq!(table, parser);
}

#[test]
fn invariants_of_the_calogero_point() {
    let dir = TempDir::new().unwrap();
    let pair = cm_pair(&dir);
    let (code, v) = cm3(&["invariants", "--input", &pair]);
    assert_eq!(code, 0);
    assert_eq!(
        v["a"],
        json!(["3", "0", "2", "0", "-9/2", "0", "0", "0", "0"])
    );
    assert_eq!(v["v"], "-3");
    assert_eq!(v["w"], "2");

    let (code, v) = cm3(&["classify-stratum", "--input", &pair]);
    assert_eq!(code, 0);
    assert_eq!(v["stratum"], "CM");
    assert_eq!(v["rank"], 1);

    let (code, v) = cm3(&["check-relations", "--input", &pair]);
    assert_eq!(code, 0);
    assert_eq!(v["satisfied"]["id1z"], true);
    assert_eq!(v["satisfied"]["defining_relation"], true);
}

#[test]
fn defining_relations_agree_on_a_thousand_trials() {
    let (code, v) = cm3(&[
        "verify-identities",
        "--ids",
        "rel.equiv",
        "--trials",
        "1000",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v[0]["id"], "rel.equiv");
    assert_eq!(v[0]["failures"], 0);
}

#[test]
fn empty_word_echoes_pair_and_tuple() {
    let dir = TempDir::new().unwrap();
    let pair = cm_pair(&dir);
    let word = write(&dir, "word.json", &json!([]));
    let (code, v) = cm3(&["act", "--input", &pair, "--word", &word]);
    assert_eq!(code, 0);
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&pair).unwrap()).unwrap();
    assert_eq!(v, original);

    let tuple = write(
        &dir,
        "tuple.json",
        &json!({"a": ["2", "0", "-9/2", "0", "0", "0", "0"], "v": "-3"}),
    );
    let (code, v) = cm3(&["act", "--input", &tuple, "--word", &word]);
    assert_eq!(code, 0);
    assert_eq!(v["a"], json!(["2", "0", "-9/2", "0", "0", "0", "0"]));
}

#[test]
fn orbit_commands_report_words_and_labels() {
    let dir = TempDir::new().unwrap();
    let t = write(&dir, "cm.json", &json!(["2", 0, "-9/2", 0, 0, 0, 0]));
    let (code, v) = cm3(&["normalize", "--input", &t]);
    assert_eq!(code, 0);
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
    assert!(v["word_length"].as_u64().unwrap() <= 16);

    let full = write(
        &dir,
        "full.json",
        &json!({"a": [3, 0, "2", 0, "-9/2", 0, 0, 0, 0]}),
    );
    let (code, v) = cm3(&["normalize", "--input", &full]);
    assert_eq!(code, 0);
    assert_eq!(v["branch_log"][0], "shift traces to zero");

    let special = write(
        &dir,
        "special.json",
        &json!([0, 0, 6f64.cbrt(), 0, 0, 0, 1]),
    );
    let (code, v) = cm3(&["classify-commuting", "--input", &special]);
    assert_eq!(code, 0);
    assert_eq!(v["label"], "SPECIAL");
}

#[test]
fn malformed_input_exits_one_with_an_error_object() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let (code, v) = cm3(&["invariants", "--input", &path_str(&bad)]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "json");

    let (code, v) = cm3(&["sample", "--kind", "rank7"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "usage");

    let (code, v) = cm3(&["verify-identities", "--ids", "eq9.9", "--trials", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "unknown_identity");

    let off = write(
        &dir,
        "off.json",
        &json!({"tuples": [["2", 0, "-9/2", 0, 0, 0, 0], [0, 0, 0, 1, 0, 0, 1]]}),
    );
    let (code, v) = cm3(&["normalize", "--input", &off]);
    assert_eq!(code, 1);
    assert!(v[0]["error"].is_null());
    assert_eq!(v[1]["error"]["kind"], "off_variety");
}

#[test]
fn repeated_invocations_are_identical() {
    let args = [
        "verify-identities",
        "--ids",
        "eq2.6,cprime",
        "--trials",
        "5",
        "--seed",
        "3",
    ];
    let (_, first) = cm3(&args);
    let (_, second) = cm3(&args);
    assert_eq!(strip_timing(first), strip_timing(second));

    let sample = ["sample", "--kind", "commuting", "--n", "4", "--seed", "9"];
    assert_eq!(cm3(&sample), cm3(&sample));
}
