use std::process::Command;

use nearring_core::cli::{run, Outcome, EXIT_INCONCLUSIVE, EXIT_SUCCESS, EXIT_USAGE, EXIT_VERIFICATION};
use nearring_core::constructions::example1_maps;
use nearring_core::nearring::{verify_axioms, MulTable, NearringInstance, VerifyMode};
use nearring_core::pcgroup::{build_presentation, GroupId};
use serde_json::Value;

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("nearring").chain(args.iter().copied()))
}

fn without_timings(mut v: Value) -> Value {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(m) => {
                m.remove("timings");
                m.remove("elapsed");
                m.values_mut().for_each(strip);
            }
            Value::Array(a) => a.iter_mut().for_each(strip),
            _ => {}
        }
    }
    strip(&mut v);
    v
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&["oracle-check", "--group", "h1", "--p", "4"]).code, EXIT_USAGE);
    assert_eq!(cli(&["oracle-check", "--group", "h1", "--p", "3"]).code, EXIT_USAGE);
    assert_eq!(cli(&["oracle-check", "--group", "nope"]).code, EXIT_USAGE);
    assert_eq!(cli(&["search", "--group", "g81-7"]).code, EXIT_USAGE);
    assert_eq!(cli(&["search", "--group", "d16", "--expect-none", "--expect-some"]).code, EXIT_USAGE);
    assert_eq!(cli(&["verify-example"]).code, EXIT_USAGE);
    assert_eq!(cli(&["construct", "--p", "5", "--maps", "missing/file.csv"]).code, EXIT_USAGE);
    assert_eq!(cli(&["--help"]).code, EXIT_SUCCESS);
}

#[test]
fn oracle_check_small_groups() {
    for g in ["c16", "d16", "qd16", "q16"] {
        let out = cli(&["oracle-check", "--group", g]);
        assert_eq!(out.code, EXIT_SUCCESS, "{g}");
        let r = out.report.unwrap();
        assert_eq!(r["order"], 16);
        assert_eq!(r["associativity"]["pass"], true);
        assert!(r["timings"].is_object());
    }
    let r = cli(&["oracle-check", "--group", "d16"]).report.unwrap();
    assert_eq!(r["exponent"], 8);
}

#[test]
fn search_exit_codes() {
    let none = cli(&["search", "--group", "q16", "--expect-none"]);
    assert_eq!(none.code, EXIT_SUCCESS);
    assert_eq!(none.report.unwrap()["search"]["status"], "EXHAUSTIVE");
    assert_eq!(cli(&["search", "--group", "q16", "--expect-some"]).code, EXIT_VERIFICATION);
    assert_eq!(cli(&["search", "--group", "c16", "--expect-some"]).code, EXIT_SUCCESS);
    let stopped = cli(&["search", "--group", "g81-7", "--order81", "--no-local", "--budget", "0s"]);
    assert_eq!(stopped.code, EXIT_INCONCLUSIVE);
    assert_eq!(stopped.report.unwrap()["search"]["status"], "INCONCLUSIVE");
}

#[test]
fn search_tables_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = cli(&["search", "--group", "c16", "--tables-dir", d]);
    assert_eq!(out.code, EXIT_SUCCESS);
    let r = out.report.unwrap();
    let results = r["search"]["results"].as_array().unwrap();
    assert_eq!(results.len(), 8);
    let g = build_presentation(GroupId::C16).unwrap();
    for res in results {
        let table = MulTable::load(res["table_ref"].as_str().unwrap().as_ref()).unwrap();
        assert_eq!(table.identity as u64, res["identity"].as_u64().unwrap());
        let nr = NearringInstance::from_table(std::sync::Arc::new(g.clone()), table).unwrap();
        assert!(verify_axioms(&nr, VerifyMode::Exhaustive).is_nearring());
    }
}

#[test]
fn construct_from_file_and_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("maps.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    example1_maps(5).unwrap().write_csv(&mut f).unwrap();
    drop(f);
    let out = cli(&["construct", "--p", "5", "--maps", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_SUCCESS);
    let r = out.report.unwrap();
    assert_eq!(r["verdict"], "LOCAL");
    assert_eq!(r["units"]["count"], 500);

    let wrong = cli(&["construct", "--p", "5", "--maps", "example1", "--expect", "not-a-nearring"]);
    assert_eq!(wrong.code, EXIT_VERIFICATION);
    assert_eq!(wrong.report.unwrap()["verdict"], "LOCAL");
}

#[test]
fn export_table_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = cli(&["export-table", "--p", "5", "--table-out", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_SUCCESS);
    let t = MulTable::load(&path).unwrap();
    assert_eq!((t.p, t.n, t.identity), (5, 625, 125));
    assert_eq!(t.data.len(), 625 * 625);
}

#[test]
fn reports_are_independent_of_thread_count() {
    let args = ["oracle-check", "--group", "h1", "--p", "7", "--pairs", "20000", "--samples", "20000", "--seed", "9"];
    let base = without_timings(cli(&[&["--parallel", "1"], &args[..]].concat()).report.unwrap());
    let wide = without_timings(cli(&[&["--parallel", "3"], &args[..]].concat()).report.unwrap());
    assert_eq!(serde_json::to_string(&base).unwrap(), serde_json::to_string(&wide).unwrap());
    assert_eq!(base["seed"], 9);

    let s1 = without_timings(cli(&["--parallel", "1", "search", "--group", "d16", "--no-local"]).report.unwrap());
    let s3 = without_timings(cli(&["--parallel", "3", "search", "--group", "d16", "--no-local"]).report.unwrap());
    assert_eq!(s1, s3);
}

#[test]
fn binary_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let status = Command::new(env!("CARGO_BIN_EXE_nearring"))
        .args(["oracle-check", "--group", "c16", "--out", path.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "oracle-check");

    let bad = Command::new(env!("CARGO_BIN_EXE_nearring")).args(["oracle-check", "--group", "h1", "--p", "4"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("prime"));
}
