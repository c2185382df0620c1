use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gemcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gemcheck")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON report")
}

const TWO_ATOMS: &str = "n=3\npart: (0,0) (0,2) (1,1) (1,2) (2,2)\n";

#[test]
fn check_two_atom_model_passes() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "k2.txt", TWO_ATOMS);
    let out = gemcheck(&["check", file.to_str().unwrap(), "--theory", "gem_p"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("5 of 5 obligations hold"));
}

#[test]
fn check_empty_fusion_fails_existence() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e.txt", "n=1\nfusion:\n");
    let out = gemcheck(&["check", file.to_str().unwrap(), "--theory", "gem_f", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    let failures = report["failures"].as_array().unwrap();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0]["obligation"], "exists_F");
    assert_eq!(failures[0]["witness"]["ZZ"], serde_json::json!([0]));
}

#[test]
fn check_malformed_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.txt", "n=2\npart: (0,\n");
    assert_eq!(code(&gemcheck(&["check", file.to_str().unwrap()])), 2);
    assert_eq!(code(&gemcheck(&["check", "/nonexistent/structure.txt"])), 2);
}

#[test]
fn check_oversized_structure_is_a_capacity_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "big.txt", "n=17\npart:\n");
    assert_eq!(code(&gemcheck(&["check", file.to_str().unwrap()])), 3);
}

#[test]
fn check_against_theory_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "k2.txt", TWO_ATOMS);
    let thy = write(dir.path(), "atoms.thy", "# two things\nsome_atom : exists x . forall y . (P(y, x) -> y = x)\n");
    let out = gemcheck(&["check", file.to_str().unwrap(), "--theory", thy.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let bad = write(dir.path(), "bad.thy", "oops : P(x,\n");
    assert_eq!(code(&gemcheck(&["check", file.to_str().unwrap(), "--theory", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&gemcheck(&["check", file.to_str().unwrap(), "--theory", "no_such_theory"])), 2);
}

#[test]
fn equiv_small_bounds() {
    let out = gemcheck(&["equiv", "--max-part", "3", "--max-fusion", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let counts: Vec<_> =
        report["part"].as_array().unwrap().iter().map(|t| t["gem_p_models"].as_u64().unwrap()).collect();
    assert_eq!(counts, [1, 0, 3]);
    assert!(report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn equiv_vacuous_and_capacity() {
    assert_eq!(code(&gemcheck(&["equiv", "--max-part", "0", "--max-fusion", "0"])), 0);
    assert_eq!(code(&gemcheck(&["equiv", "--max-part", "3", "--max-fusion", "0", "--capacity", "100"])), 3);
}

#[test]
fn equiv_json_is_deterministic_across_workers() {
    let args = |w: &'static str| {
        ["equiv", "--max-part", "3", "--max-fusion", "2", "--format", "json", "--no-timing", "--workers", w]
    };
    let one = gemcheck(&args("1"));
    let four = gemcheck(&args("4"));
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    assert!(!stdout(&one).contains("elapsed_ms"));
}

#[test]
fn zero_workers_is_a_usage_error() {
    assert_eq!(code(&gemcheck(&["equiv", "--workers", "0"])), 2);
}

#[test]
fn single_lemma() {
    let out = gemcheck(&["lemmas", "--name", "FUIx", "--max-part", "3", "--max-fusion", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["name"], "FUIx");
    assert_eq!(rows[0]["passed"], true);
}

#[test]
fn unknown_lemma() {
    assert_eq!(code(&gemcheck(&["lemmas", "--name", "nope"])), 2);
}

#[test]
fn models_of_gem_p_at_three() {
    let out = gemcheck(&["models", "--kind", "part", "--n", "3", "--theory", "gem_p", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["models"], 3);
    assert_eq!(report["candidates"], 512);
    assert_eq!(report["structures"].as_array().unwrap().len(), 3);
    assert!(stdout(&gemcheck(&["models", "--kind", "part", "--n", "3", "--theory", "gem_p"])).contains("3 models"));
}

#[test]
fn countermodel_goldens() {
    for (drop, file) in [("wsp_F", "countermodel_wsp_F.json"), ("id_F", "countermodel_id_F.json")] {
        let out = gemcheck(&[
            "countermodel",
            "--theory",
            "gem_f",
            "--drop",
            drop,
            "--target",
            drop,
            "--max-n",
            "2",
            "--format",
            "json",
            "--no-timing",
        ]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out), golden(file), "{drop}");
    }
    let out = gemcheck(&[
        "countermodel",
        "--theory",
        "gem_p",
        "--drop",
        "antis_P",
        "--target",
        "antis_P",
        "--max-n",
        "2",
        "--format",
        "json",
        "--no-timing",
    ]);
    assert_eq!(stdout(&out), golden("countermodel_antis_P.json"));
}

#[test]
fn countermodel_for_an_axiom_kept_in_the_base() {
    let out = gemcheck(&["countermodel", "--theory", "gem_p", "--target", "ref_P", "--max-n", "3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["outcome"], "exhausted");
}

#[test]
fn countermodel_random_strategy_records_seed() {
    let out = gemcheck(&[
        "countermodel",
        "--theory",
        "gem_f",
        "--drop",
        "wsp_F",
        "--target",
        "wsp_F",
        "--max-n",
        "2",
        "--strategy",
        "random",
        "--samples",
        "5000",
        "--seed",
        "11",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["seed"], 11);
    assert_eq!(report["strategy"], "random");
}

#[test]
fn export_all_and_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = gemcheck(&["export", "--all", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let mut names: Vec<_> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    let mut expected: Vec<_> = gemcheck_core::theory::lemma_suite().iter().map(|l| format!("{}.p", l.name())).collect();
    expected.sort();
    assert_eq!(names, expected);

    let one = tempfile::tempdir().unwrap();
    assert_eq!(code(&gemcheck(&["export", "--name", "FIx", "--out", one.path().to_str().unwrap()])), 0);
    assert!(one.path().join("FIx.p").exists());
    assert_eq!(code(&gemcheck(&["export", "--name", "nope", "--out", one.path().to_str().unwrap()])), 2);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&gemcheck(&[])), 2);
    assert_eq!(code(&gemcheck(&["models", "--kind", "neither", "--n", "1", "--theory", "gem_p"])), 2);
    assert_eq!(code(&gemcheck(&["export"])), 2);
}
