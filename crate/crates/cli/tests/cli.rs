use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/list.fm")
}

fn fmre(args: &[&str]) -> Output {
    fmre_with_input(args, None)
}

fn fmre_with_input(args: &[&str], input: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fmre"))
        .args(args)
        .env("FMRE_COLOR", "never")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut stdin = child.stdin.take().unwrap();
        if let Some(text) = input {
            stdin.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_corpus_is_silent() {
    let o = fmre(&["validate", arg(&corpus())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty() && o.stderr.is_empty());
}

#[test]
fn validate_reports_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "cycle.fm",
        "feature model C;\n  feature A;\n    relations\n      decomposition and(B);\n  end feature;\n  feature B;\n    relations\n      decomposition and(A);\n  end feature;\nend fm C;\n",
    );
    let o = fmre(&["validate", arg(&path)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    let lines: Vec<&str> = err.lines().filter(|l| l.contains("CYCLE")).collect();
    assert_eq!(lines.len(), 1, "{err}");
    assert!(lines[0].starts_with(&format!("{}:", path.display())));
    assert!(lines[0].contains(": error: "));
}

#[test]
fn validate_reports_parse_errors_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.fm",
        "feature model M;\n  feature 9x;\nend fm M;\n",
    );
    let o = fmre(&["validate", arg(&path)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).starts_with(&format!("{}:2:11: error: ", path.display())),
        "{}",
        stderr(&o)
    );
}

#[test]
fn validate_missing_file_is_usage_error() {
    assert_eq!(
        fmre(&["validate", "/no/such/file.fm"]).status.code(),
        Some(2)
    );
}

#[test]
fn recognize_configuration_text() {
    let o = fmre(&["recognize", arg(&corpus()), "--feature", "St-Queue"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("T = Configuration feature\n"), "{out}");
    assert!(out.contains("  Constraint: Reject st-beh\n"));
    assert!(out.contains("  Included in: ---\n"));
}

#[test]
fn recognize_elementary_and_json() {
    let o = fmre(&["recognize", arg(&corpus()), "--feature", "static_queue"]);
    assert!(stdout(&o).contains("  Included in: St-Queue\n"));
    let o = fmre(&[
        "recognize",
        arg(&corpus()),
        "--feature",
        "static_queue",
        "--format",
        "json",
    ]);
    let out = stdout(&o);
    assert!(out.contains("\"kind\": \"ELEMENTARY\""), "{out}");
}

#[test]
fn recognize_unknown_feature() {
    let o = fmre(&["recognize", arg(&corpus()), "--feature", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope"));
    assert!(o.stdout.is_empty());
}

#[test]
fn slice_forward_and_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = fmre(&[
        "slice",
        arg(&corpus()),
        "--feature",
        "Static-list",
        "--direction",
        "forward",
        "--relation",
        "and",
        "-o",
        arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "3 slice(s)\n");
    for i in 1..=3 {
        let text = fs::read_to_string(out.join(format!("slice-{i}.fm"))).unwrap();
        assert!(text.starts_with(&format!("feature model List-slice-{i};\n")));
        assert_eq!(
            fmre(&["validate", arg(&out.join(format!("slice-{i}.fm")))])
                .status
                .code(),
            Some(0)
        );
    }
    assert!(!out.join("slice-4.fm").exists());
}

#[test]
fn slice_forward_or_single_result_in_each_format() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["fm", "dot", "json"] {
        let out = dir.path().join(format);
        let o = fmre(&[
            "slice",
            arg(&corpus()),
            "--feature",
            "Static-list",
            "--direction",
            "forward",
            "--relation",
            "or",
            "--alt",
            "static-queue",
            "-o",
            arg(&out),
            "--format",
            format,
        ]);
        assert_eq!(stdout(&o), "1 slice(s)\n", "{}", stderr(&o));
        let text = fs::read_to_string(out.join(format!("slice-1.{format}"))).unwrap();
        assert!(text.contains("static_queue") && text.contains("static-list"));
    }
}

#[test]
fn slice_alt_with_and_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fmre(&[
        "slice",
        arg(&corpus()),
        "--feature",
        "Static-list",
        "--direction",
        "forward",
        "--relation",
        "and",
        "--alt",
        "x",
        "-o",
        arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn slice_unknown_alternative() {
    let dir = tempfile::tempdir().unwrap();
    let o = fmre(&[
        "slice",
        arg(&corpus()),
        "--feature",
        "Static-list",
        "--direction",
        "forward",
        "--relation",
        "or",
        "--alt",
        "ghost",
        "-o",
        arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn export_json_round_trips_through_import_check() {
    let o = fmre(&["export", arg(&corpus()), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let json = stdout(&o);
    assert!(json.starts_with("{\"schema\":1,"));
    let back = fmre_with_input(&["import-check", "--emit", "fm"], Some(&json));
    assert_eq!(back.status.code(), Some(0), "{}", stderr(&back));
    let formatted = fmre(&["fmt", arg(&corpus())]);
    assert_eq!(stdout(&back), stdout(&formatted));
}

#[test]
fn import_check_rejects_bad_json() {
    let o = fmre_with_input(&["import-check"], Some("{\"schema\":1,\"features\":[]}"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("MISSING_FIELD"), "{}", stderr(&o));
}

#[test]
fn export_dot_and_invalid_input() {
    let o = fmre(&["export", arg(&corpus()), "--format", "dot"]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph List {\n") && dot.ends_with("}\n"));
    assert!(dot.contains("\"St-Queue\" [peripheries=2];"));

    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "dangling.fm",
        "feature model M;\n  feature A;\n    relations\n      decomposition and(Ghost);\n  end feature;\nend fm M;\n",
    );
    let o = fmre(&["export", arg(&path), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("UNRESOLVED"));
}

#[test]
fn fmt_is_a_fixed_point_and_write_in_place() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "list.fm",
        &fs::read_to_string(corpus()).unwrap(),
    );
    let first = stdout(&fmre(&["fmt", arg(&path)]));
    assert_eq!(fmre(&["fmt", "--write", arg(&path)]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&path).unwrap(), first);
    assert_eq!(stdout(&fmre(&["fmt", arg(&path)])), first);
}

#[test]
fn fmt_empty_model_and_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "empty.fm", "FEATURE MODEL E;   END FM E;");
    assert_eq!(
        stdout(&fmre(&["fmt", arg(&path)])),
        "feature model E;\nend fm E;\n"
    );

    let broken = "feature model M;\n  feature ;\nend fm M;\n";
    let path = write(dir.path(), "broken.fm", broken);
    let o = fmre(&["fmt", "--write", arg(&path)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(fs::read_to_string(&path).unwrap(), broken);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(fmre(&["frobnicate"]).status.code(), Some(2));
}
