use std::fs;
use std::process::Command;

use aaul::kripke::load_model;

const MODEL: &str = "states: s0 s1\nagent a: s0->s1 s1->s1\nagent b: s0->s1\nval p: s1\npoint: s0\n";
const ALTERNATING: &str = "tile t0 N=a E=c S=b W=c\ntile t1 N=b E=c S=a W=c\n";

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run_with(args: &[&str], stdin: &str) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("aaul").chain(args.iter().copied());
    let code = aaul_cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_with(args, "")
}

fn file(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_prints_truth_and_sets_status() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(&dir, "m.km", MODEL);
    let r = run(&["check", &m, "[*]true", "--state", "s0"]);
    assert_eq!((r.code, r.out.as_str()), (0, "true\n"));
    let r = run(&["check", &m, "[a]~p"]);
    assert_eq!((r.code, r.out.as_str()), (1, "false\n"));
    let r = run(&["check", &m, "<*>[a]false", "--state", "s1"]);
    assert_eq!(r.code, 0);
}

#[test]
fn check_reads_stdin() {
    let r = run_with(&["check", "-", "<a>p"], MODEL);
    assert_eq!((r.code, r.out.as_str()), (0, "true\n"));
}

#[test]
fn errors_exit_with_two_and_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(&dir, "m.km", MODEL);
    for args in [
        vec!["check", m.as_str(), "[a"],
        vec!["check", m.as_str(), "p", "--state", "nowhere"],
        vec!["check", m.as_str(), "<z>p"],
        vec!["check", m.as_str(), "<*>p", "--max-blocks", "0"],
        vec!["check", "/definitely/missing.km", "p"],
        vec!["frobnicate"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 2, "{args:?}");
        assert!(r.out.is_empty());
        assert!(!r.err.is_empty());
        if args[0] == "check" {
            assert_eq!(r.err.lines().count(), 1, "{}", r.err);
        }
    }
}

#[test]
fn apply_without_clause_for_an_agent_empties_it() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(&dir, "m.km", MODEL);
    let out = dir.path().join("out.km");
    let r = run(&["apply", &m, "--update", "{(true,b,true)}", "-o", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let updated = load_model(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(updated.arrows_of("a").unwrap().is_empty());
    assert_eq!(updated.arrows_of("b").unwrap().len(), 1);

    let r = run(&["apply", &m, "--update", "{(p,a,true)}"]);
    assert_eq!(load_model(&r.out).unwrap().arrows_of("a").unwrap().len(), 1);
}

#[test]
fn bisim_prints_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(&dir, "m.km", "states: x y z\nagent a: x->y y->y z->z\n");
    let r = run(&["bisim", &m]);
    assert_eq!((r.code, r.out.as_str()), (0, "x y z\n"));
    let m = file(&dir, "n.km", MODEL);
    assert_eq!(run(&["bisim", &m]).out, "s0\ns1\n");
}

#[test]
fn tiling_commands() {
    let dir = tempfile::tempdir().unwrap();
    let t = file(&dir, "two.tiles", ALTERNATING);
    let r = run(&["tile-search", &t, "--max-period", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.out, "period 2\nt1 t1\nt0 t0\n");

    let bad = file(&dir, "bad.tiles", "tile t0 N=red E=c S=blue W=c\n");
    let r = run(&["tile-search", &bad, "--max-period", "3"]);
    assert_eq!((r.code, r.out.as_str()), (1, "no periodic tiling with period <= 3\n"));

    let r = run(&["encode-tiling", &t, "--conjunct", "one_tile"]);
    assert_eq!(r.out, "[b]((p_t0 | p_t1) & ~(p_t0 & p_t1))\n");
    let full = run(&["encode-tiling", &t]);
    assert_eq!(full.out, run(&["encode-tiling", &t]).out);
    assert_eq!(run(&["encode-tiling", &t, "--conjunct", "psi9"]).code, 2);

    let r = run(&["witness-model", &t, "--period", "2"]);
    assert_eq!(r.code, 0);
    let m = load_model(&r.out).unwrap();
    assert_eq!(m.num_states(), 5);
    assert_eq!(m.arrows_of("b").unwrap().len(), 8);
    assert_eq!(run(&["witness-model", &t, "--period", "1"]).code, 1);

    let missing = file(&dir, "missing.tiles", "tile t0 N=c E=c S=c\n");
    assert_eq!(run(&["tile-search", &missing, "--max-period", "1"]).code, 2);
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(&dir, "m.km", MODEL);
    let r = run(&["dot", &m]);
    assert_eq!(r.code, 0);
    assert!(r.out.starts_with("digraph"));
    assert_eq!(r.out.matches(" -> ").count(), 3);
}

#[test]
fn sat_search() {
    let r = run(&["sat-search", "<a>p & ~p & [*]<a>true", "--max-states", "2", "--agents", "a", "--props", "p"]);
    assert_eq!(r.code, 1, "{}", r.out);
    assert!(r.out.starts_with("none up to 2 states"));

    let r = run(&["sat-search", "<a>p & ~p & <*>[a]false", "--max-states", "3", "--agents", "a,b", "--props", "p"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    let model_text = r.out.split_once('\n').unwrap().1;
    let m = load_model(model_text).unwrap();
    assert_eq!(m.num_states(), 2);

    let r = run(&["sat-search", "<c>true", "--max-states", "1", "--agents", "a"]);
    assert_eq!(r.code, 2);
}

#[test]
fn binary_matches_library_entry_point() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(&dir, "m.km", MODEL);
    let out = Command::new(env!("CARGO_BIN_EXE_aaul"))
        .args(["check", &m, "<b>p"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "true\n");
    let out = Command::new(env!("CARGO_BIN_EXE_aaul")).args(["check", &m, "(("]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
