use std::path::Path;
use std::process::{Command, Output, Stdio};

use std::io::Write;

fn ggslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggslab"))
        .args(args)
        .env_remove("GGSLAB_CONFIG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn group_info_reports_torsion_and_branch() {
    let o = ggslab(&["group", "info", "--spec", "p=3; e=1,1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("torsion: no; branch: no"));
    let o = ggslab(&["group", "info", "--spec", "p=5; e=1,4,0,0", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["torsion"], true);
    assert_eq!(v["branch"], true);
}

#[test]
fn element_commands() {
    let spec = ["--spec", "p=3; e=1,2"];
    let run = |rest: &[&str]| {
        let mut args = rest.to_vec();
        args.extend(spec);
        ggslab(&args)
    };
    assert_eq!(stdout(&run(&["elem", "order", "a"])).trim(), "3");
    assert_eq!(stdout(&run(&["elem", "order", "a b"])).trim(), "9");
    assert_eq!(
        stdout(&run(&["elem", "reduce", "a b^4 a^-1"])).trim(),
        "a b a^2"
    );
    assert_eq!(
        stdout(&run(&["elem", "act", "--vertex", "1", "a"])).trim(),
        "2"
    );
    assert_eq!(
        stdout(&run(&["elem", "section", "--vertex", "1", "b"])).trim(),
        "a"
    );
    assert_eq!(
        stdout(&run(&["elem", "trivial", "b^3", "a b"])),
        "true\nfalse\n"
    );
}

#[test]
fn words_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ggslab"))
        .args(["elem", "order"])
        .env_remove("GGSLAB_CONFIG")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"a\n\nb a b\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "3\n9\n");
}

#[test]
fn subgroup_commands() {
    let dir = tempfile::tempdir().unwrap();
    let gens = write(dir.path(), "h.txt", "# generators\na b\nb^2 a b a^2\n");
    let o = ggslab(&["sub", "classify", "--gens", &gens]);
    assert_eq!(stdout(&o).trim(), "type III (j = 1)");
    let o = ggslab(&["sub", "stab1", "--gens", &gens]);
    assert!(stdout(&o).starts_with("a b a b a b\n"));
    let o = ggslab(&["sub", "dichotomy", "--gens", &gens]);
    assert_eq!(stdout(&o).trim(), "all sections full");
    let o = ggslab(&["quotient", "index", "--level", "3", "--gens", &gens]);
    assert_eq!(stdout(&o).trim(), "3");
    let o = ggslab(&["quotient", "order", "--level", "1"]);
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn reduce_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let gens = write(dir.path(), "h.txt", "b a b^2 a^2 b\n");
    let trace = dir.path().join("trace.json");
    let o = ggslab(&[
        "reduce",
        "run",
        "--gens",
        &gens,
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(!v["steps"].as_array().unwrap().is_empty());
    assert!(stdout(&o).contains("level: "));
}

#[test]
fn certificates_round_trip_and_mutations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let gens = write(dir.path(), "h.txt", "a b\nb^2 a b a^2\n");
    let cert = dir.path().join("cert.json");
    let cert = cert.to_str().unwrap();
    assert!(ggslab(&["sip", "certify", "--gens", &gens, "-o", cert])
        .status
        .success());
    let o = ggslab(&["sip", "check", cert]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "accept");

    let text = std::fs::read_to_string(cert).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["subject"] = serde_json::json!(["a b"]);
    let bad = write(dir.path(), "bad.json", &v.to_string());
    let o = ggslab(&["sip", "check", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reject at"));
}

#[test]
fn exit_codes() {
    assert_eq!(ggslab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(ggslab(&["elem", "act", "a"]).status.code(), Some(64));
    assert_eq!(ggslab(&["--help"]).status.code(), Some(0));
    assert_eq!(ggslab(&["--version"]).status.code(), Some(0));
    assert_eq!(
        ggslab(&["elem", "order", "--spec", "p=4; e=1", "a"])
            .status
            .code(),
        Some(65)
    );
    assert_eq!(ggslab(&["elem", "order", "a c"]).status.code(), Some(65));
    assert_eq!(
        ggslab(&["elem", "order", "--spec", "p=3; e=1,1", "a b"])
            .status
            .code(),
        Some(65)
    );
    assert_eq!(ggslab(&["sub", "classify"]).status.code(), Some(64));
    assert_eq!(
        ggslab(&["sip", "check", "/nonexistent/cert.json"])
            .status
            .code(),
        Some(74)
    );
    assert_eq!(
        ggslab(&["verify", "suite", "nonsense"]).status.code(),
        Some(64)
    );
}

#[test]
fn config_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("reports");
    let config = write(
        dir.path(),
        "ggslab.toml",
        &format!(
            "group = \"p=5; e=1,4,0,0\"\nseed = 11\noutput_dir = {:?}\ngens = [\"a b\"]\n",
            reports.to_str().unwrap()
        ),
    );
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_ggslab"))
            .args(args)
            .env("GGSLAB_CONFIG", &config)
            .output()
            .unwrap()
    };
    let o = run(&["group", "info"]);
    assert!(stdout(&o).starts_with("p: 5\n"));
    let o = run(&["sub", "classify"]);
    assert_eq!(stdout(&o).trim(), "type III (j = 1)");
    let o = run(&["verify", "suite", "order", "--samples", "10"]);
    assert!(o.status.success());
    assert!(reports.join("order-11.json").exists());

    let bad = write(dir.path(), "bad.toml", "colour = 1\n");
    let o = Command::new(env!("CARGO_BIN_EXE_ggslab"))
        .args(["group", "info"])
        .env("GGSLAB_CONFIG", &bad)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn suite_reports_are_reproducible() {
    let run = || {
        ggslab(&[
            "verify",
            "suite",
            "dichotomy",
            "--seed",
            "5",
            "--samples",
            "30",
            "--json",
        ])
    };
    let (a, b) = (run(), run());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], 30);
}
