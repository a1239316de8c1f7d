use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sseqbench"))
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn list_names_every_scenario() {
    let out = bin().arg("list").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in sseqbench::scenarios::scenario_names() {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn run_json_to_file() {
    let dir = std::env::temp_dir().join(format!("sseqbench-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("thhz.json");
    let out = bin()
        .args(["run", "thhz", "--prime", "5", "--format", "json", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["prime"], 5);
    assert_eq!(v["cap"], 70);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn run_text_small_cap() {
    let out = bin()
        .args(["run", "thhz", "--prime", "3", "--cap", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("warning: CapTooSmall"));
    assert!(text.contains("[conditional]"));
}

#[test]
fn run_all() {
    let out = bin()
        .args(["run", "--all", "--prime", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.matches("scenario ").count(),
        sseqbench::scenarios::CATALOG.len()
    );
}

#[test]
fn scenario_file() {
    let out = bin()
        .args(["run", "--scenario-file", &data("thhz.toml"), "--cap", "40"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn failing_file_exits_one() {
    let dir = std::env::temp_dir().join(format!("sseqbench-fail-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    let text = std::fs::read_to_string(data("thhz.toml"))
        .unwrap()
        .replace("\"mu2\" = \"mu1^3\"", "\"mu2\" = \"0\"");
    std::fs::write(&path, text).unwrap();
    let out = bin()
        .args(["run", "--scenario-file"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["run"],
        vec!["run", "no-such-scenario"],
        vec!["run", "thhz", "--prime", "4"],
        vec!["run", "thhz", "--format", "xml"],
        vec!["frobnicate"],
        vec!["run", "--scenario-file", "/nonexistent.toml"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}
