use std::process::{Command, Output};

fn warcomb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warcomb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = warcomb(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn counts_states_for_a_sequence() {
    assert_eq!(stdout(&["count", "--sequence", "W/LL", "--mode", "wl"]).trim(), "3");
    assert_eq!(
        stdout(&["count", "--sequence", "W/LL", "--mode", "random-necessary"]).trim(),
        "2"
    );
}

#[test]
fn count_verify_agrees_with_census() {
    let text = stdout(&["count", "--sequence", "W/LL", "--mode", "wl", "--verify"]);
    assert!(text.contains("closed form 3"));
    assert!(text.contains("census 3"));
}

#[test]
fn counts_passthrough_sequences() {
    let text = stdout(&["sequences", "--m", "1", "--passthroughs", "3", "--count-only"]);
    assert_eq!(text.trim(), "5");
}

#[test]
fn seeded_simulation_is_reproducible() {
    let args = [
        "simulate",
        "--state",
        "4 1 7|3 6 2 5 8",
        "--putback",
        "random",
        "--seed",
        "7",
        "--max-rounds",
        "10",
    ];
    assert_eq!(stdout(&args), stdout(&args));
    assert!(stdout(&args).contains("weight 1/1024"));
}

#[test]
fn simulation_json_parses() {
    let text = stdout(&["simulate", "--state", "2 1|3", "--json"]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["trace"]["initial"], "21|3");
    assert_eq!(value["sequence"], "LL");
}

#[test]
fn tree_of_a_sequence() {
    let text = stdout(&["tree", "--sequence", "W/LL"]);
    assert!(text.contains("height 2"));
    assert!(text.contains("nodes 3"));
    let dot = stdout(&["tree", "--sequence", "W/LL", "--dot"]);
    assert!(dot.starts_with("graph tree {"));
}

#[test]
fn poset_dot_output() {
    let dot = stdout(&["poset", "--sequence", "W/LL", "--mode", "wl", "--dot"]);
    assert!(dot.starts_with("digraph poset {"));
    assert!(dot.contains("style=dashed"));
}

#[test]
fn bad_state_is_a_usage_error() {
    let out = warcomb(&["simulate", "--state", "1|1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("more than once"));
}

#[test]
fn bad_sequence_is_a_usage_error() {
    let out = warcomb(&["count", "--sequence", "W/LX", "--mode", "wl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn small_verify_suite_passes() {
    let text = stdout(&["verify", "--suite", "s6", "--max-n", "6"]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["pass"], true);
}

#[test]
fn verify_output_ignores_job_count() {
    let single = stdout(&["verify", "--suite", "s6", "--max-n", "6", "--jobs", "1"]);
    let double = stdout(&["verify", "--suite", "s6", "--max-n", "6", "--jobs", "2"]);
    assert_eq!(single, double);
}
