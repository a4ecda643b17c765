use std::path::PathBuf;

fn system(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("systems")
        .join(format!("{name}.sys"))
        .to_string_lossy()
        .into_owned()
}

fn run_with(color: bool, args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("susyode").chain(args.iter().copied());
    let code = susyode_cli::run(argv, color, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_with(false, args)
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["expand"]).0, 2);
    assert_eq!(run(&["--system", "/nonexistent.sys", "expand"]).0, 2);
    assert_eq!(run(&["--system", &system("planar-F"), "frobnicate"]).0, 2);
    assert_eq!(
        run(&["--system", &system("planar-F"), "--format", "csv", "expand"]).0,
        2
    );
    assert_eq!(run(&["--system", &system("planar-F"), "darboux", "--f", "x"]).0, 2);
    assert_eq!(
        run(&["--system", &system("planar-F"), "check-susy", "--generator", "Q7"]).0,
        2
    );
    assert_eq!(
        run(&["--system", &system("planar-F"), "transform", "--epsilon", "eps"]).0,
        2
    );
}

#[test]
fn dsl_errors_carry_positions() {
    let dir = std::env::temp_dir().join("susyode-cli-dsl-error");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.sys");
    std::fs::write(&path, "[variables]\nx : even\n\n[equations]\ndt(x) = x*y\n").unwrap();
    let (code, _, err) = run(&["--system", path.to_str().unwrap(), "expand"]);
    assert_eq!(code, 2);
    assert!(err.contains("5:"), "{err}");
    assert!(err.contains('y'), "{err}");
}

#[test]
fn verification_failures_exit_1() {
    assert_eq!(run(&["--system", &system("broken"), "check-susy"]).0, 1);
    assert_eq!(
        run(&[
            "--system",
            &system("fermionic-2field"),
            "first-integral",
            "--expr",
            "x1/x2"
        ])
        .0,
        1
    );
}

#[test]
fn help_exits_0() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("check-susy"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["expand"],
        vec!["--format", "structured", "integrate"],
        vec!["--format", "csv", "integrate"],
        vec!["series", "--order", "5"],
    ] {
        let path = system("planar-F");
        let mut full = vec!["--system", path.as_str()];
        full.extend(args);
        assert_eq!(run(&full), run(&full));
    }
}

#[test]
fn csv_header_uses_symbol_at_word() {
    let (code, out, _) = run(&["--system", &system("planar-F"), "--format", "csv", "integrate"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "t,x@1,x@e1e2,xi@e1,xi@e2");
}

#[test]
fn structured_output_is_json() {
    let (code, out, _) = run(&[
        "--system",
        &system("n2-chi-square"),
        "--format",
        "structured",
        "check-susy",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["checks"][0]["invariant"], true);
}

#[test]
fn out_dir_gets_all_artifacts() {
    let dir = std::env::temp_dir().join("susyode-cli-artifacts");
    let _ = std::fs::remove_dir_all(&dir);
    let (code, text, _) = run_with(
        true,
        &[
            "--system",
            &system("planar-F"),
            "--out",
            dir.to_str().unwrap(),
            "integrate",
        ],
    );
    assert_eq!(code, 0);
    let saved = std::fs::read_to_string(dir.join("integrate.txt")).unwrap();
    assert!(!saved.contains('\x1b'));
    assert!(text.contains("\x1b[32mPASS"));
    assert!(dir.join("integrate.json").exists());
    assert!(std::fs::read_to_string(dir.join("integrate.csv"))
        .unwrap()
        .starts_with("t,"));
}

#[test]
fn color_is_off_without_request() {
    let (_, out, _) = run(&["--system", &system("planar-F"), "check-susy"]);
    assert!(out.starts_with("PASS"));
}

#[test]
fn binary_reads_color_env() {
    let bin = env!("CARGO_BIN_EXE_susyode");
    let out = |color: &str| {
        std::process::Command::new(bin)
            .args(["--system", &system("broken"), "check-susy"])
            .env("SUSYODE_COLOR", color)
            .output()
            .unwrap()
    };
    let on = out("1");
    assert_eq!(on.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&on.stdout).contains("\x1b[31mFAIL"));
    let off = out("0");
    assert!(String::from_utf8_lossy(&off.stdout).starts_with("FAIL"));
}
