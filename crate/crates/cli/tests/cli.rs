use std::path::PathBuf;
use std::process::{Command, Output};

use prbatl::checker::oracle::oracle_check;
use prbatl::formula::TeamOp;
use prbatl::model::{AgentId, Amount, MoneyVector};
use prbatl::{Formula, PricedGameStructure};
use prbatl_cli::report::RunReport;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn prbatl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prbatl")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const PSI: &str = "<<a1,a2:[5,5]>> X <<a1:[3,0]>> G p";

#[test]
fn check_verdicts_follow_m0() {
    assert_eq!(code(&prbatl(&["check", &data("escape.json"), PSI])), 0);
    assert_eq!(code(&prbatl(&["check", &data("escape_m0_2.json"), PSI])), 1);
    let from_file = format!("@{}", data("psi.txt"));
    assert_eq!(code(&prbatl(&["check", &data("escape.json"), &from_file])), 0);
}

#[test]
fn malformed_formula_reports_position() {
    let o = prbatl(&["check", &data("escape.json"), &format!("@{}", data("bad_formula.txt"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("position 19"), "{}", stderr(&o));
}

#[test]
fn missing_files_and_bad_usage_exit_2() {
    assert_eq!(code(&prbatl(&["check", &data("nope.json"), "p"])), 2);
    assert_eq!(code(&prbatl(&["check"])), 2);
    assert_eq!(code(&prbatl(&["reach", &data("escape.json"), "--team", "a9", "--prop", "p"])), 2);
}

#[test]
fn json_report_round_trips() {
    for (file, want) in [("escape.json", true), ("escape_m0_2.json", false)] {
        let o = prbatl(&["check", &data(file), PSI, "--json", "--witness"]);
        let text = stdout(&o);
        let rep = RunReport::from_json(&text).unwrap();
        assert_eq!(rep.verdict, want);
        assert_eq!(rep.witness.is_some(), want);
        assert_eq!(format!("{}\n", rep.to_json()), text);
        assert!(rep.states > 0 && !rep.operators.is_empty());
    }
}

#[test]
fn repeated_runs_agree() {
    let first: Vec<i32> = (0..3).map(|_| code(&prbatl(&["check", &data("escape_m0_2.json"), PSI]))).collect();
    assert_eq!(first, vec![1, 1, 1]);
}

#[test]
fn reach_sugar() {
    let o = prbatl(&["reach", &data("escape.json"), "--team", "a1,a2", "--money", "0,0", "--prop", "p"]);
    assert_eq!(code(&o), 0);

    let path = data("escape_target.json");
    let game = PricedGameStructure::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let phi = Formula::eventually(TeamOp::new([AgentId(0)], MoneyVector(vec![Amount::INF; 2])), Formula::atom("t"));
    let want = if oracle_check(&game, &phi).unwrap() { 0 } else { 1 };
    assert_eq!(code(&prbatl(&["reach", &path, "--team", "a1", "--prop", "t"])), want);

    assert_eq!(code(&prbatl(&["reach", &data("two_locations.json"), "--prop", "t"])), 1);
    assert_eq!(code(&prbatl(&["reach", &data("two_locations.json"), "--team", "a1", "--prop", "t"])), 0);
}

#[test]
fn compile_stats() {
    let o = prbatl(&["compile", &data("halt_universal.atm"), "[1]", "--stats"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("Max        324"), "{out}");
    assert!(out.contains("resources  15"), "{out}");

    let o = prbatl(&["compile", &data("halt_universal.atm"), "[1]", "--stats", "--mode", "unary"]);
    assert!(stdout(&o).contains("tape vars  7 (muL1 muL2 muL3 mu muR1 muR2 muR3)"), "{}", stdout(&o));

    let o = prbatl(&["compile", &data("halt_existential.atm"), "[1]"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("normal form"), "{}", stderr(&o));
    let o = prbatl(&["compile", &data("halt_existential.atm"), "[1]", "--labelling", "universal", "--stats"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn compiled_structure_checks_like_the_machine() {
    let dir = std::env::temp_dir().join(format!("prbatl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("g.json").display().to_string();
    for (tape, want) in [("[12]", 0), ("[11]", 1)] {
        let o = prbatl(&["compile", &data("has_two.atm"), tape, "--labelling", "universal", "--mode", "unary", "--out", &out]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let formula = stdout(&o).lines().find_map(|l| l.strip_prefix("formula").map(|f| f.trim().to_string())).unwrap();
        assert_eq!(code(&prbatl(&["check", &out, &formula])), want);
        assert_eq!(code(&prbatl(&["simulate", &data("has_two.atm"), tape])), want);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_prints_the_proof_tree() {
    let o = prbatl(&["simulate", &data("has_two.atm"), "[12]", "--trace"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("accept\n"));
    assert!(out.contains("(halt)"));
    assert_eq!(code(&prbatl(&["simulate", &data("halt_universal.atm"), "[]"])), 0);
    assert_eq!(code(&prbatl(&["simulate", &data("halt_existential.atm"), "[]"])), 1);
}

#[test]
fn flatten_files() {
    let o = prbatl(&["flatten", &data("counter.hg")]);
    assert_eq!(code(&o), 0);
    let g = PricedGameStructure::from_json(&stdout(&o)).unwrap();
    assert_eq!(g.locations().len(), 5);
    assert_eq!(g.resources(), ["x", "y", "~x", "~y"]);
    let o = prbatl(&["flatten", &data("cyclic.hg")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cyclic"));
}

#[test]
fn fuzz_agrees_with_the_oracle() {
    let o = prbatl(&["fuzz", "--seed", "40", "--count", "30"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("0 disagreements"));
}
