use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

/// Runs the CLI in-process with the given standard input.
fn run_with(args: &[&str], stdin: &str) -> Output {
    let mut argv = vec!["altdiam"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = altdiam::cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn run(args: &[&str]) -> Output {
    run_with(args, "")
}

/// Compares `actual` with the golden file, rewriting it when
/// `UPDATE_GOLDEN` is set.
fn golden(name: &str, actual: &str) {
    let path = fixtures().join("golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

#[test]
fn decompose_identity_gives_identity_stages() {
    let out = run(&["--json", "decompose", "--order", "rlr", &fixture("identity_2x2.txt")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let d: altdiam::perm::Decomposition = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(d.order(), "RLR");
    assert!(d.stages.iter().all(|s| s.is_identity()));
    golden("decompose_identity_2x2.json", &out.stdout);
}

#[test]
fn verify_identity_stages_against_flip() {
    let stages = run(&["--json", "decompose", &fixture("identity_2x2.txt")]).stdout;
    let out = run_with(&["verify", "-", &fixture("flip_2x2.txt")], &stages);
    assert_eq!(out.code, 1);
    assert_eq!(out.stdout, "FAIL: mismatch at (0, 1): expected (1, 0), got (0, 1)\n");
    let out = run_with(&["--json", "verify", "-", &fixture("flip_2x2.txt")], &stages);
    assert_eq!(out.code, 1);
    golden("verify_identity_vs_flip.json", &out.stdout);
}

#[test]
fn human_readable_outputs() {
    let cases: [(&str, &[&str]); 8] = [
        ("decompose_flip_2x2.txt", &["decompose", "flip_2x2.txt"]),
        ("decompose_lrl_2x3.txt", &["decompose", "--order", "lrl", "grid_2x3.txt"]),
        ("decompose_multi_cycle.txt", &["decompose-multi", "cycle_2x2x2.txt"]),
        ("decompose_sparse_far_swap.txt", &["decompose-sparse", "far_swap.txt"]),
        ("decompose_linear_swap_f2.txt", &["decompose-linear", "--split", "1,1", "swap_f2.txt"]),
        ("classify_flip.txt", &["classify", "flip_2x2.txt", "--word", "RLR"]),
        ("poset_diamond.txt", &["poset", "diamond.poset"]),
        ("census_2_3.txt", &["census", "2", "3"]),
    ];
    for (name, args) in cases {
        let args: Vec<String> = args.iter().map(|a| if a.contains('.') { fixture(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&args);
        assert_eq!(out.code, 0, "{name}: {}", out.stderr);
        golden(name, &out.stdout);
    }
}

#[test]
fn census_json_and_csv() {
    let out = run(&["census", "2", "2", "--json"]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["sizes"]["LR"], 16);
    assert_eq!(v["sizes"]["LRL"], 24);
    golden("census_2_2.json", &out.stdout);
    let out = run(&["census", "2", "2", "--csv"]);
    assert_eq!(out.stdout.lines().next(), Some("word,size"));
    assert!(out.stdout.contains("\nLRL,24\n"));
    assert_eq!(run(&["census", "2", "2", "--csv", "--json"]).code, 2);
}

#[test]
fn census_threads_do_not_change_output() {
    let one = run(&["--json", "census", "2", "4", "--threads", "1"]);
    let four = run(&["--json", "census", "2", "4", "--threads", "4"]);
    assert_eq!(one.code, 0);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn json_output_is_byte_stable() {
    for args in [
        vec!["--json", "decompose", "grid_2x3.txt"],
        vec!["--json", "decompose-multi", "cycle_2x2x2.txt"],
        vec!["--json", "poset", "--diamond"],
        vec!["--json", "lower-bound", "--dims", "2,2,2", "--schedule", "3,2,1,2"],
    ] {
        let args: Vec<String> =
            args.iter().map(|a| if a.ends_with(".txt") { fixture(a) } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run(&args);
        assert_eq!(first.code, 0, "{args:?}: {}", first.stderr);
        assert_eq!(run(&args).stdout, first.stdout);
    }
}

#[test]
fn verify_accepts_every_decomposition_kind() {
    let cases = [
        (vec!["decompose", "--order", "lrl"], "grid_2x3.txt"),
        (vec!["decompose-multi"], "cycle_2x2x2.txt"),
        (vec!["decompose-sparse"], "far_swap.txt"),
        (vec!["decompose-linear", "--split", "1,1"], "swap_f2.txt"),
        (vec!["decompose-linear", "--split", "1,1", "--order", "rlr"], "swap_f2.txt"),
    ];
    for (cmd, target) in cases {
        let mut args = vec!["--json"];
        args.extend(cmd.iter().copied());
        let target = fixture(target);
        args.push(&target);
        let d = run(&args);
        assert_eq!(d.code, 0, "{args:?}: {}", d.stderr);
        let v = run_with(&["verify", "-", &target], &d.stdout);
        assert_eq!((v.code, v.stdout.as_str()), (0, "OK\n"), "{args:?}: {}", v.stderr);
    }
}

#[test]
fn lower_bound_reports() {
    let out = run(&["--json", "lower-bound", "--dims", "2,2,2", "--schedule", "3,2,1,2"]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["covered"], false);
    assert!(v["witness"]["map"].is_array());
    let out = run(&["--json", "lower-bound", "--dims", "2,2,2", "--schedule", "3,2,1,2,3"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["covered"], true);
    assert!(v["witness"].is_null());
    assert_eq!(run(&["lower-bound", "--dims", "2,2", "--schedule", "3"]).code, 1);
    assert_eq!(run(&["lower-bound", "--dims", "3,3,2", "--schedule", "1"]).code, 1);
}

#[test]
fn poset_commands() {
    let out = run(&["--json", "poset", "--chain", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["flip"], serde_json::json!({"flip_in_closure": false, "closure_size": 1, "aut_size": 2}));
    let out = run_with(&["--json", "poset", "-"], "2\n");
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["flip"]["flip_in_closure"], true);
    let out = run(&["poset", "--sweep", "3"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.ends_with("8 posets, 0 exceptions\n"));
    // Size 4 is reported rather than asserted; it must finish and list
    // all sixteen size-4 classes.
    let out = run(&["poset", "--sweep", "4"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.lines().last().unwrap().starts_with("24 posets, "));
    assert_eq!(run(&["poset", "--antichain", "4"]).code, 0);
    assert_eq!(run(&["poset", "--chain", "5"]).code, 1);
    assert_eq!(run(&["poset", "--chain", "2", "--diamond"]).code, 2);
    assert_eq!(run_with(&["poset"], "2\n0 < 1\n1 < 0\n").code, 1);
}

#[test]
fn exit_codes() {
    let bad = run(&["decompose", &fixture("invalid_2x2.txt")]);
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.is_empty());
    assert!(bad.stderr.starts_with("error: "), "{}", bad.stderr);

    let singular = run(&["decompose-linear", "--split", "1,1", &fixture("singular_f5.txt")]);
    assert_eq!(singular.code, 1);
    assert!(singular.stderr.contains("not invertible"));

    assert_eq!(run(&["decompose", "--order", "xyz", &fixture("flip_2x2.txt")]).code, 2);
    assert_eq!(run(&["decompose-linear", "--split", "0,2", &fixture("swap_f2.txt")]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["census", "4", "3"]).code, 1);
    assert_eq!(run(&["verify", "-", "-"]).code, 2);
    assert_eq!(run(&["classify", &fixture("flip_2x2.txt"), "--word", "LQ"]).code, 2);
    assert_eq!(run(&["decompose", "/nonexistent/input.txt"]).code, 1);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("decompose-linear"));
}

#[test]
fn binary_pipes_decompose_into_verify() {
    let exe = env!("CARGO_BIN_EXE_altdiam");
    let decompose = Command::new(exe).args(["--json", "decompose", &fixture("grid_2x3.txt")]).output().unwrap();
    assert!(decompose.status.success());
    let mut verify = Command::new(exe)
        .args(["verify", "-", &fixture("grid_2x3.txt")])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    verify.stdin.take().unwrap().write_all(&decompose.stdout).unwrap();
    let out = verify.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "OK\n");

    let bad = Command::new(exe).args(["decompose", &fixture("invalid_2x2.txt")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let usage = Command::new(exe).arg("--no-such-flag").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn threads_fall_back_to_environment() {
    let exe = env!("CARGO_BIN_EXE_altdiam");
    let out = Command::new(exe).args(["--json", "census", "2", "3"]).env("ALTDIAM_THREADS", "3").output().unwrap();
    assert!(out.status.success());
    let bad = Command::new(exe).args(["census", "2", "3"]).env("ALTDIAM_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
