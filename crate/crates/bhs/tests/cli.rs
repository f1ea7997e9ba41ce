use std::process::{Command, Output};

fn bhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhs")).args(args).env_remove("BHS_JOBS").output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    bhs(args).status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_exit_codes() {
    assert_eq!(code(&["run", "--algo", "bhs33", "--dims", "4x4", "--bh", "2,3", "--agents", "0,0;0,1;1,0"]), 0);
    assert_eq!(code(&["run", "--algo", "bhs42", "--dims", "5x5", "--bh", "4,4", "--agents", "0,0;1,1;2,2;3,3"]), 0);
    assert_eq!(code(&["run", "--algo", "bhs32", "--dims", "4x5", "--bh", "0,0", "--agents", "1,1;2,2;3,3"]), 0);
    assert_eq!(code(&["run", "--algo", "bhs33", "--dims", "2x5", "--bh", "0,0", "--agents", "1,1;1,2;1,3"]), 64);
    assert_eq!(code(&["run", "--algo", "bhs33", "--dims", "4x4", "--bh", "0,0", "--agents", "1,1;1,1;1,3"]), 64);
    assert_eq!(code(&["run", "--algo", "bhs33", "--dims", "4x4", "--bh", "1,1", "--agents", "1,1;1,2;1,3"]), 64);
    assert_eq!(code(&["run", "--algo", "nope", "--dims", "4x4", "--bh", "0,0", "--agents", "1,1;1,2;1,3"]), 64);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn exploratory_runs_are_flagged() {
    let args = ["run", "--algo", "bhs33", "--dims", "3x3", "--bh", "2,2", "--agents", "0,0;0,1"];
    assert_eq!(code(&args), 64);
    let mut with = args.to_vec();
    with.push("--exploratory");
    let o = bhs(&with);
    assert!(stdout(&o).contains(bhs::harness::EXPLORATORY_LABEL));
    assert!(matches!(o.status.code(), Some(0..=2)));
}

#[test]
fn sweep_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let o = bhs(&["sweep", "--algo", "bhs33", "--dims-range", "3..3", "--k", "3", "--exhaustive", "--report", p]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["scenarios"], 504);
    assert_eq!(v["failures"], 0);

    let sampled = |jobs: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_bhs"))
            .args(["sweep", "--algo", "bhs42", "--dims-range", "5", "--k", "4", "--sample", "300", "--seed", "3", "--report", p])
            .env("BHS_JOBS", jobs)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
        v["digest"].as_str().unwrap().to_owned()
    };
    assert_eq!(sampled("1"), sampled("2"));

    assert_eq!(code(&["sweep", "--algo", "bhs33", "--dims-range", "3..3", "--k", "3"]), 64);
    assert_eq!(code(&["sweep", "--algo", "bhs33", "--dims-range", "3..2", "--k", "3", "--exhaustive"]), 64);
}

#[test]
fn audit_lists_the_scheduled_procedures() {
    let o = bhs(&["audit"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let longest: u32 = text
        .lines()
        .find(|l| l.starts_with("InitNextRing incl."))
        .and_then(|l| l.split_whitespace().rev().nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!(longest >= 16);
    assert_eq!(code(&["audit", "--magic-number", "8"]), 2);
    assert_eq!(code(&["audit", "--magic-number", "64"]), 0);
    let json = bhs(&["audit", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["minimal_magic_number"], 35);
}

#[test]
fn trace_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let p = path.to_str().unwrap();
    assert_eq!(code(&["run", "--algo", "bhs42", "--dims", "4x4", "--bh", "3,3", "--agents", "0,0;0,1;1,0;2,2", "--trace", p]), 0);
    assert_eq!(code(&["replay", p]), 0);

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() > 3);
    lines.remove(lines.len() / 2);
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    assert_ne!(code(&["replay", p]), 0);
    assert_eq!(code(&["replay", dir.path().join("missing").to_str().unwrap()]), 64);
}
