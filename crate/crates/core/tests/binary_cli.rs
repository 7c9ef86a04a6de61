use std::process::Command;

fn sqflab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sqflab")).args(args).output().unwrap()
}

#[test]
fn count_prints_csv_with_manifest() {
    let out = sqflab(&["count", "--poly", "1,0", "--x", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# sqflab "));
    assert!(text.ends_with("poly,x,count\n\"1,0\",10,7\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(sqflab(&["count", "--poly", "1,0"]).status.code(), Some(2));
    assert_eq!(sqflab(&["rho", "--poly", "1,0,1", "--prime", "6"]).status.code(), Some(1));
    let out = sqflab(&["verify", "quick", "--inject-fault", "corrupt-mu"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mobius_table_matches_trial_division"));
    assert_eq!(sqflab(&["verify"]).status.code(), Some(0));
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_sqflab"))
        .args(["kd-sum", "--poly", "1,0,1", "--x", "1000", "--bigd", "10"])
        .env("SQFLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_sqflab"))
        .args(["kd-sum", "--poly", "1,0,1", "--x", "1000"])
        .env("SQFLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
