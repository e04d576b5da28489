use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn rrbreak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrbreak"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exp1_is_byte_identical_across_runs() {
    let args = [
        "bench",
        "exp1",
        "--teams",
        "4,6",
        "--solver",
        "sa,local",
        "--reads",
        "200",
        "--seed",
        "11",
        "--no-timing",
    ];
    let a = rrbreak(&args);
    let b = rrbreak(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("teams,instances,lower_bound,optimum,sa_breaks"));
    assert!(text.contains("\n4,5,6,6.0,6.0,1.0,0,6.0,1.0,0\n"), "{text}");
}

#[test]
fn exp1_with_timing_carries_the_footer() {
    let out = rrbreak(&["bench", "exp1", "--teams", "4", "--reads", "50"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().ends_with("sa_time_s"));
    assert!(text.lines().last().unwrap().starts_with('#'));
}

#[test]
fn generate_build_solve_pipeline() {
    let dir = tempdir().unwrap();
    let tt = dir.path().join("tt.json");
    let q = dir.path().join("q.txt");
    let out = rrbreak(&[
        "generate",
        "--teams",
        "6",
        "--seed",
        "4",
        "--out",
        path(&tt),
    ]);
    assert_eq!(code(&out), 0);
    let out = rrbreak(&["build", path(&tt), "--format", "txt", "--out", path(&q)]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&q).unwrap();
    assert!(text.starts_with("# num_vars 15 "), "{text}");

    let solved = rrbreak(&[
        "solve",
        path(&q),
        "--solver",
        "exhaustive",
        "--format",
        "json",
    ]);
    assert_eq!(code(&solved), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&solved)).unwrap();
    assert_eq!(doc["records"][0]["energy"].as_f64(), Some(12.0));

    let direct = rrbreak(&[
        "solve",
        path(&tt),
        "--solver",
        "sa",
        "--reads",
        "100",
        "--seed",
        "2",
    ]);
    assert_eq!(code(&direct), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&direct)).unwrap();
    assert_eq!(doc["breaks"].as_u64(), Some(12));
    assert_eq!(doc["assignment"]["home_bits"].as_array().unwrap().len(), 6);
}

#[test]
fn csv_timetables_are_accepted() {
    let dir = tempdir().unwrap();
    let tt = dir.path().join("tt.csv");
    let out = rrbreak(&[
        "generate",
        "--teams",
        "4",
        "--kind",
        "drrt",
        "--format",
        "csv",
        "--out",
        path(&tt),
    ]);
    assert_eq!(code(&out), 0);
    let built = rrbreak(&["build", path(&tt), "--kind", "drrt"]);
    assert_eq!(
        code(&built),
        0,
        "{}",
        String::from_utf8_lossy(&built.stderr)
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&built)).unwrap();
    assert_eq!(doc["num_vars"].as_u64(), Some(6));
}

#[test]
fn embed_writes_embedding_and_stats() {
    let dir = tempdir().unwrap();
    let tt = dir.path().join("tt.json");
    let stats = dir.path().join("stats.json");
    rrbreak(&["generate", "--teams", "4", "--out", path(&tt)]);
    let out = rrbreak(&[
        "embed",
        path(&tt),
        "--target",
        "pegasus:4",
        "--stats",
        path(&stats),
    ]);
    assert_eq!(code(&out), 0);
    let chains: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(chains.as_object().unwrap().len(), 6);
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(s["nodes"].as_u64(), Some(6));
    assert_eq!(s["edges"].as_u64(), Some(12));
    assert!(s["qubits_per_node"].as_f64().unwrap() >= 1.0);
}

#[test]
fn feasibility_table_shape() {
    let out = rrbreak(&["feasibility", "--sizes", "2,3", "--reads", "100"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,per_feasible,ev_break,ev_energy");
    assert_eq!(lines.len(), 3);
}

#[test]
fn exp2_and_survey_rows() {
    let out = rrbreak(&[
        "bench",
        "exp2",
        "--teams",
        "4",
        "--reference",
        "exhaustive",
        "--solver",
        "local",
        "--reads",
        "4",
        "--budget-secs",
        "10",
        "--no-timing",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "teams,instances,reference_breaks,reached\n4,5,6.0,5\n"
    );

    let out = rrbreak(&[
        "bench",
        "survey",
        "--teams",
        "4",
        "--instances",
        "1",
        "--target",
        "pegasus:4",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\n4,6,12.0,"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&rrbreak(&[])), 1);
    assert_eq!(code(&rrbreak(&["frobnicate"])), 1);
    assert_eq!(
        code(&rrbreak(&["generate", "--teams", "4", "--kind", "rrt"])),
        1
    );
    assert_eq!(code(&rrbreak(&["generate", "--teams", "7"])), 1);
    assert_eq!(
        code(&rrbreak(&["embed", "missing.json", "--target", "torus:3"])),
        1
    );
    assert_eq!(code(&rrbreak(&["solve", "/nonexistent/q.json"])), 1);
    assert_eq!(
        code(&rrbreak(&[
            "bench",
            "exp1",
            "--teams",
            "4",
            "--budget-secs",
            "0"
        ])),
        1
    );
    assert_eq!(code(&rrbreak(&["--help"])), 0);
}

#[test]
fn infeasible_requests_exit_with_two() {
    let dir = tempdir().unwrap();
    let tt = dir.path().join("tt.json");
    rrbreak(&["generate", "--teams", "12", "--out", path(&tt)]);
    let out = rrbreak(&["solve", path(&tt), "--solver", "exhaustive"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("30 variables"));
    let out = rrbreak(&["embed", path(&tt), "--target", "chimera:1,1,4"]);
    assert_eq!(code(&out), 2);
}
