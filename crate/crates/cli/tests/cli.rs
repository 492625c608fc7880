use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use netrel::gf2::{nontrivial_relation_basis, Relation};
use netrel::netcore::{mols_to_net, MolsList};
use netrel::templates::template_of_net;

fn netrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netrel")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/examples")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn typecounts_prints_both_columns() {
    let o = netrel(&["typecounts", "-n", "10", "--type", "2,2,4,4,4,4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("5286\t5286"));
}

#[test]
fn infeasible_types_exit_with_code_2() {
    let o = netrel(&["typecounts", "-n", "10", "--type", "2,2,2,2,4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("type\tcount") && stdout(&o).contains("infeasible"));
    let o = netrel(&["typecounts", "-n", "12", "--type", "4,4,6,3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_reports_the_odd_template() {
    let o = netrel(&[
        "verify",
        &example("pair_odd_t4_d4.mols"),
        "--template",
        &example("template_odd_44222_order10.template"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for line in ["transversals\t4", "max_disjoint\t4", "matches_template\tyes", "triple_extendable\tno"] {
        assert!(out.lines().any(|l| l == line), "missing `{line}` in\n{out}");
    }
}

#[test]
fn extend_fails_on_a_maximal_pair() {
    let o = netrel(&["extend", &example("pair_4x4_t7_d5.mols")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn decoded_template_parses() {
    let o = netrel(&["gen-templates", "--decode-q4", "112233 112233 223311 223311 331122 331122"]);
    assert_eq!(o.status.code(), Some(0));
    let t: netrel::templates::Template = stdout(&o).parse().unwrap();
    assert_eq!(t.lambdas(), &[4, 4, 2, 2, 2]);
}

#[test]
fn odd_templates_are_written_with_an_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("odd");
    let o = netrel(&["gen-templates", "--type", "4,4,2,2,2", "--odd", "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let index = fs::read_to_string(out.join("index.tsv")).unwrap();
    assert_eq!(index.lines().count(), 31);
    for line in index.lines().skip(1) {
        let file = line.split('\t').next().unwrap();
        let _: netrel::templates::Template = fs::read_to_string(out.join(file)).unwrap().parse().unwrap();
    }
}

#[test]
fn classify_and_tabulate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat");
    let inputs = ["pair_4x4_t7_d5.mols", "pair_4x4_t19_d5.mols", "pair_odd_t4_d4.mols"].map(example);
    let o = netrel(&["classify", &inputs[0], &inputs[1], "-o", s(&cat)]);
    assert_eq!(o.status.code(), Some(0));
    // a repeat and one new pair: merged into the same catalogue
    let o = netrel(&["classify", &inputs[0], &inputs[2], "-o", s(&cat)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1 new, catalogue size 3"));
    let o = netrel(&["tabulate", s(&cat), "--by", "transversals"]);
    let out = stdout(&o);
    for row in ["5\t7\t1", "5\t19\t1", "4\t4\t1"] {
        assert!(out.lines().any(|l| l == row), "missing `{row}` in\n{out}");
    }
}

#[test]
fn example_4x4_template_refines_to_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let o = netrel(&["refine", "--template", &example("template_4x4_order10.template"), "-o", s(&run)]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let done = fs::read_to_string(run.join("done.txt")).unwrap();
    assert!(done.trim().chars().all(|c| c == '1'));
    assert_eq!(fs::read_to_string(run.join("catalogue/keys.txt")).unwrap(), "");
}

#[test]
fn corrupt_checkpoint_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let template = example("template_4x4_order10.template");
    netrel(&["refine", "--template", &template, "-o", s(&run), "--orbits", "0..0"]);
    fs::write(run.join("done.txt"), "01x\n").unwrap();
    let o = netrel(&["refine", "--resume", s(&run)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("corrupt checkpoint") && err.contains("01x"), "{err}");
}

/// A template of order 4 refined by the net of three MOLS over the field of four elements.
fn order_4_template(dir: &Path) -> PathBuf {
    let mul = |a: usize, b: usize| {
        let mut r = 0;
        let (mut a, mut b) = (a, b);
        while b > 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            a <<= 1;
            if a & 4 != 0 {
                a ^= 0b111;
            }
            b >>= 1;
        }
        r
    };
    let squares = (1..=3).map(|m| (0..16).map(|p| ((p / 4) ^ mul(m, p % 4)) as u8).collect()).collect();
    let net = mols_to_net(&MolsList::new(4, squares).unwrap()).unwrap();
    let lines = nontrivial_relation_basis(&net).remove(0);
    let t = template_of_net(&net, &Relation { lines }).unwrap();
    let path = dir.join("gf4.template");
    fs::write(&path, t.to_text()).unwrap();
    path
}

#[test]
fn refine_output_is_independent_of_the_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let template = order_4_template(dir.path());
    let mut keys = Vec::new();
    for jobs in ["1", "3"] {
        let run = dir.path().join(format!("run{jobs}"));
        let o = netrel(&["refine", "--template", s(&template), "-o", s(&run), "--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        keys.push(fs::read_to_string(run.join("catalogue/keys.txt")).unwrap());
    }
    assert!(!keys[0].is_empty());
    assert_eq!(keys[0], keys[1]);
}

#[test]
fn interrupted_runs_resume() {
    let dir = tempfile::tempdir().unwrap();
    let template = order_4_template(dir.path());
    let whole = dir.path().join("whole");
    netrel(&["refine", "--template", s(&template), "-o", s(&whole)]);
    let split = dir.path().join("split");
    let o = netrel(&["refine", "--template", s(&template), "-o", s(&split), "--orbits", "0..0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("so far"));
    let o = netrel(&["refine", "--resume", s(&split)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(split.join("catalogue/keys.txt")).unwrap(),
        fs::read_to_string(whole.join("catalogue/keys.txt")).unwrap()
    );
}
