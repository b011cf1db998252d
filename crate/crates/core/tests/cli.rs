use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;
use umtk::cli::run;

const X3: &str = r#"{"points": ["p","q","r"], "dist": [["0","2","2"],["2","0","1"],["2","1","0"]]}"#;
const Y3: &str = r#"{"points": ["p1","q1","r1"], "dist": [["0","20","20"],["20","0","10"],["20","10","0"]]}"#;
const S3: &str = r#"{"points": ["a","b","c"], "dist": [["0","1","3"],["1","0","1"],["3","1","0"]]}"#;
const X4: &str = r#"{"points": ["a","b","c","d"], "dist": [["0","1","3","3"],["1","0","3","3"],["3","3","0","2"],["3","3","2","0"]]}"#;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn umtk(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("umtk").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

struct Docs(TempDir);

impl Docs {
    fn new() -> Self {
        Docs(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let path = self.0.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn weaksim_prints_the_witness() {
    let d = Docs::new();
    let (a, b) = (d.put("x.json", X3), d.put("y.json", Y3));
    let r = umtk(&["weaksim", s(&a), s(&b)]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "{\"scaling\":[[\"0\",\"0\"],[\"1\",\"10\"],[\"2\",\"20\"]],\"phi\":{\"p\":\"p1\",\"q\":\"q1\",\"r\":\"r1\"}}\n"
    );

    let w = d.put("w.json", &r.stdout);
    let again = umtk(&["weaksim", s(&a), s(&b), "--witness", s(&w)]);
    assert_eq!((again.code, again.stdout), (0, r.stdout.clone()));

    let tampered = d.put(
        "bad.json",
        &r.stdout
            .replace("\"p\":\"p1\",\"q\":\"q1\"", "\"p\":\"q1\",\"q\":\"p1\""),
    );
    let bad = umtk(&["weaksim", s(&a), s(&b), "--witness", s(&tampered)]);
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.is_empty());
}

#[test]
fn negative_verdicts_exit_one_with_empty_stdout() {
    let d = Docs::new();
    let (a, b) = (d.put("x.json", X3), d.put("y.json", Y3));
    let r = umtk(&["isometric", s(&a), s(&b)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("not isometric"));
}

#[test]
fn invalid_input_exits_two() {
    let d = Docs::new();
    let bad = d.put("bad.json", r#"{"points":["p","q"],"dist":[["0","2"],["3","0"]]}"#);
    let r = umtk(&["validate", s(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not symmetric"), "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let numbers = d.put("num.json", r#"{"points":["p"],"dist":[[0]]}"#);
    assert_eq!(umtk(&["validate", s(&numbers)]).code, 2);
    assert_eq!(umtk(&["validate", s(&d.path("missing.json"))]).code, 2);
    assert_eq!(umtk(&["frobnicate"]).code, 2);
    assert_eq!(umtk(&["isometric", s(&bad)]).code, 2);
}

#[test]
fn exact_report_outputs() {
    let d = Docs::new();
    let x = d.put("x.json", X3);
    let cases: [(&[&str], &str); 4] = [
        (&["diametric"], "{\"parts\": [[\"p\"],[\"q\",\"r\"]]}\n"),
        (
            &["classify"],
            "{\"in_R\":true,\"in_R_tilde\":true,\"in_D\":true,\"in_T\":true,\"levels\":[1,1,0],\"label_multiset\":[\"2\",\"1\"]}\n",
        ),
        (
            &["spectrum"],
            "{\"spectrum\":[\"0\",\"1\",\"2\"],\"diameter\":\"2\",\"ultrametric\":true,\"violation\":null}\n",
        ),
        (
            &["hasse"],
            "{\"balls\":[[\"p\"],[\"q\"],[\"r\"],[\"q\",\"r\"],[\"p\",\"q\",\"r\"]],\"arcs\":[[0,4],[1,3],[2,3],[3,4]]}\n",
        ),
    ];
    for (cmd, expected) in cases {
        let mut args = cmd.to_vec();
        args.push(s(&x));
        let r = umtk(&args);
        assert_eq!((r.code, r.stdout.as_str()), (0, expected), "{cmd:?}");
    }
}

#[test]
fn hasse_dot_of_the_non_ultrametric_triangle() {
    let d = Docs::new();
    let r = umtk(&["hasse", "--dot", s(&d.put("s.json", S3))]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("digraph hasse {"));
    assert_eq!(r.stdout.matches(" [label=").count(), 6);
    assert_eq!(r.stdout.matches(" -> ").count(), 6);
    assert!(r.stdout.contains("[label=\"{b}\"]"));

    let r = umtk(&["diametric", s(&d.path("s.json"))]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not complete multipartite"));
}

#[test]
fn tree_output_reads_back_as_a_space() {
    let d = Docs::new();
    let r = umtk(&["tree", s(&d.put("x.json", X4))]);
    assert_eq!(r.code, 0);
    let t = d.put("t.json", &r.stdout);
    let v = umtk(&["validate", s(&t)]);
    assert_eq!((v.code, v.stdout.as_str()), (0, format!("{X4}\n").as_str()));
    let iso = umtk(&["tree-iso", s(&t), s(&d.path("x.json")), "--labeled"]);
    assert_eq!(iso.code, 0);
    assert!(iso.stdout.contains("\"leaf_map\""));
}

#[test]
fn gen_is_deterministic_and_valid() {
    let d = Docs::new();
    let args = ["gen", "--seed", "7", "--n", "9", "--class", "D,T"];
    let first = umtk(&args);
    assert_eq!(first.code, 0);
    assert_eq!(umtk(&args).stdout, first.stdout);
    let g = d.put("g.json", &first.stdout);
    assert_eq!(umtk(&["validate", s(&g)]).stdout, first.stdout);
    let c = umtk(&["classify", s(&g)]);
    assert!(c.stdout.contains("\"in_D\":true") && c.stdout.contains("\"in_T\":true"));

    let infeasible = umtk(&["gen", "--seed", "1", "--n", "6", "--class", "R", "--pool", "1,2"]);
    assert_eq!(infeasible.code, 2);
    assert_eq!(
        umtk(&["gen", "--seed", "1", "--n", "4", "--semimetric", "--class", "R"]).code,
        2
    );
}

#[test]
fn out_flag_writes_the_file() {
    let d = Docs::new();
    let out = d.path("out.json");
    let r = umtk(&["--out", s(&out), "validate", s(&d.put("x.json", X3))]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap(), format!("{X3}\n"));
}

#[test]
fn ball_preserving_witnesses() {
    let d = Docs::new();
    let (x, y) = (d.put("x.json", X3), d.put("y.json", Y3));
    let r = umtk(&["ballpreserving", s(&x), s(&y)]);
    assert_eq!(
        (r.code, r.stdout.as_str()),
        (0, "{\"p\":\"p1\",\"q\":\"q1\",\"r\":\"r1\"}\n")
    );

    let swap = d.put("swap.json", r#"{"p":"q1","q":"p1","r":"r1"}"#);
    let r = umtk(&["ballpreserving", s(&x), s(&y), "--witness", s(&swap)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("not ball-preserving"), "{}", r.stderr);

    let s3 = d.put("s.json", S3);
    assert_eq!(umtk(&["ballpreserving", s(&x), s(&s3)]).code, 1);
    assert_eq!(umtk(&["hasse-iso", s(&x), s(&y)]).code, 0);
    assert_eq!(umtk(&["hasse-iso", s(&x), s(&s3)]).code, 1);
}

#[test]
fn short_check_run_passes() {
    let r = umtk(&["check", "--trials", "5", "--seed", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("\"passed\": true"));
    assert_eq!(r.stderr.lines().count(), 10);
    let seq = umtk(&["check", "--trials", "5", "--seed", "3", "--sequential"]);
    assert_eq!(seq.stdout, r.stdout);
    assert_eq!(umtk(&["check", "--suite", "11"]).code, 2);
}

#[test]
fn binary_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_umtk"))
        .args(["spectrum", "-"])
        .env("UMTK_COLOR", "never")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(S3.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"spectrum\":[\"0\",\"1\",\"3\"],\"diameter\":\"3\",\"ultrametric\":false,\"violation\":[\"a\",\"c\",\"b\"]}\n"
    );

    let help = Command::new(env!("CARGO_BIN_EXE_umtk")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
