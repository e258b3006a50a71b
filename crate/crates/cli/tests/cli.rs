use std::path::PathBuf;
use std::process::{Command, Output};

use endocable::CycleSet;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endocable")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn result<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    let prefix = format!("RESULT {name} ");
    text.lines().find_map(|l| l.strip_prefix(prefix.as_str()))
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("endocable-cli-{}-{name}", std::process::id()))
}

#[test]
fn analyze_fixture() {
    let o = run(&["analyze", &fixture("x4_19.cs")]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(result(&text, "summary"), Some("T: 4-cycle; irretractable; mpl=INFINITE; |G|=8; 2-type"));
    assert!(text.starts_with("# command: endocable analyze"));
    assert!(text.lines().nth(1).unwrap().starts_with("# input-digest: sha256:"));
    assert!(!text.contains("wall time"));
}

#[test]
fn analyze_trivial_and_malformed() {
    let o = run(&["analyze", &fixture("trivial3.cs")]);
    assert!(o.status.success());
    assert!(result(&stdout(&o), "summary").unwrap().contains("mpl=1; decomposable"));

    let bad = temp("bad.cs");
    std::fs::write(&bad, "2\n0 0\n1 1\n").unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a bijection"));
    assert!(o.stdout.is_empty());
}

#[test]
fn reports_are_reproducible() {
    let a = run(&["analyze", &fixture("x4_19.cs")]);
    let b = run(&["analyze", &fixture("x4_19.cs")]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scalar_cabling() {
    let out = temp("k1.cs");
    let o = run(&["cable", &fixture("x4_19.cs"), "--scalar", "1", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let written = CycleSet::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, CycleSet::x4_19());

    let o = run(&["cable", &fixture("x4_19.cs"), "--scalar", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("CHECK diagonal-closed-form PASS"));
    assert_eq!(result(&text, "diagonal"), Some("2 3 0 1"));
}

#[test]
fn central_cabling_with_trivial_center() {
    let o = run(&["cable", &fixture("trivial3.cs"), "--central", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let set = text.split("---\n").nth(1).unwrap();
    assert_eq!(CycleSet::parse(set).unwrap(), CycleSet::trivial(3));
    let o = run(&["cable", &fixture("trivial3.cs"), "--central", "5"]);
    assert!(!o.status.success());
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "--suite", "identities", &fixture("x4_19.cs")]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = run(&["verify", "--suite", "theorem", "FULLCYCLE_TWO", "8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("CHECK fullcycle-two-retractable PASS"));
    assert_eq!(result(&text, "irretractable"), Some("0"));

    let o = run(&["verify", "--suite", "theorem", "FULLCYCLE_TWO", "16"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--extended"));
}

#[test]
fn search_appendix_three() {
    let o = run(&["search", &fixture("appendix_v3.model"), "--mode", "decide"]);
    assert!(o.status.success());
    assert_eq!(result(&stdout(&o), "status"), Some("UNSAT"));
}

#[test]
fn search_streams_solutions() {
    let model = temp("four.model");
    std::fs::write(&model, "n=4\ndiagonal=fullcycle\nirretractable=true\n").unwrap();
    let o = run(&["search", model.to_str().unwrap(), "--mode", "all"]);
    let text = stdout(&o);
    assert_eq!(result(&text, "status"), Some("SAT"));
    let sets: Vec<CycleSet> = text.split("---\n").skip(1).map(|s| CycleSet::parse(s).unwrap()).collect();
    assert!(!sets.is_empty());
    for x in sets {
        assert!(x.are_isomorphic(&CycleSet::x4_19()).unwrap().is_some());
    }
}

#[test]
fn oracles() {
    let o = run(&["oracle", "hol", "--p", "3", "--v", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(result(&text, "found-count"), Some("2"));
    assert!(text.contains("CHECK hol-fixed-point-free PASS"));

    let o = run(&["oracle", "t2", "--v", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("CHECK t2-centralizer PASS"));
}

#[test]
fn enumerate_and_retract() {
    let o = run(&["enumerate", "3", "--dedup"]);
    assert_eq!(result(&stdout(&o), "count"), Some("5"));
    let o = run(&["retract", &fixture("trivial3.cs")]);
    assert!(o.status.success());
    assert_eq!(result(&stdout(&o), "retraction-tower"), Some("3 1"));
}
