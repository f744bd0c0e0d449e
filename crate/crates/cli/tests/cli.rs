use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn barrier(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barrier")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const TWO_POINTS: &str = r#"{
  "workspace": [["0", "0"], ["10", "0"], ["10", "10"], ["0", "10"]],
  "sets": [[{"point": ["2", "3"]}], [{"point": ["7", "5"]}]],
  "obstacles": []
}"#;

#[test]
fn generate_reports_shape_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = barrier(dir.path(), &["generate", "--kind", "tsp-polygons", "--sets", "4", "--objects", "6", "--seed", "9", "-o", "t.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    let sets = doc["sets"].as_array().unwrap();
    assert_eq!(sets.iter().map(|s| s.as_array().unwrap().len()).sum::<usize>(), 24);
    assert_eq!(doc["obstacles"].as_array().unwrap().len(), 24);
    assert!(sets.iter().flat_map(|s| s.as_array().unwrap()).all(|s| s.get("polygon").is_some()));

    let o = barrier(dir.path(), &["generate", "--kind", "random-points", "--sets", "3", "--objects", "4", "-o", "p.json"]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    assert_eq!(doc["obstacles"].as_array().unwrap().len(), 12);
    assert!(doc["obstacles"].as_array().unwrap().iter().all(|s| s.get("point").is_some()));

    let o = barrier(dir.path(), &["generate", "--kind", "grid-squares", "--sets", "2", "--objects", "3", "--seed", "1", "-o", "g.json"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn solve_verify_render_round() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("i.json"), TWO_POINTS).unwrap();
    let o = barrier(dir.path(), &["solve", "i.json", "-o", "s.json", "--dump-arrangement", "a.json", "--lp", "m.lp"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sol: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(sol["objective"], 1);
    assert_eq!(sol["status"], "optimal");
    assert_eq!(sol["verified"], true);
    assert!(sol["wall_clock_seconds"].is_number());
    assert!(fs::read_to_string(dir.path().join("m.lp")).unwrap().starts_with("\\"));
    let arr: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert!(!arr["cells"].as_array().unwrap().is_empty());

    let o = barrier(dir.path(), &["verify", "i.json", "s.json"]);
    assert_eq!(code(&o), 0);
    fs::write(dir.path().join("none.json"), "[]").unwrap();
    let o = barrier(dir.path(), &["verify", "i.json", "none.json"]);
    assert_eq!(code(&o), 1);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["ok"], false);
    assert!(report["witness"].is_object());

    let o = barrier(dir.path(), &["render", "i.json", "-o", "plain.svg"]);
    assert_eq!(code(&o), 0);
    assert!(!fs::read_to_string(dir.path().join("plain.svg")).unwrap().contains("red"));

    fs::write(dir.path().join("two.json"), r#"[[["5", "0"], ["5", "10"]], [["0", "8"], ["10", "8"]]]"#).unwrap();
    let o = barrier(dir.path(), &["render", "i.json", "--solution", "two.json", "-o", "two.svg"]);
    assert_eq!(code(&o), 0);
    let svg = fs::read_to_string(dir.path().join("two.svg")).unwrap();
    assert_eq!(svg.matches("<line").count(), 2);
    assert_eq!(svg.matches(r#"stroke="red""#).count(), 2);
}

#[test]
fn single_set_needs_no_barrier() {
    let dir = tempfile::tempdir().unwrap();
    let one = TWO_POINTS.replace(r#"[[{"point": ["2", "3"]}], [{"point": ["7", "5"]}]]"#, r#"[[{"point": ["2", "3"]}, {"point": ["7", "5"]}]]"#);
    fs::write(dir.path().join("i.json"), one).unwrap();
    let o = barrier(dir.path(), &["solve", "i.json", "--omit-timing"]);
    assert_eq!(code(&o), 0);
    let sol: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(sol["objective"], 0);
    assert!(sol["barriers"].as_array().unwrap().is_empty());
    assert!(sol.get("wall_clock_seconds").is_none());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), TWO_POINTS.replace(r#""7", "5""#, r#""1.2.3", "5""#)).unwrap();
    assert_eq!(code(&barrier(dir.path(), &["solve", "bad.json"])), 2);
    assert_eq!(code(&barrier(dir.path(), &["solve", "missing.json"])), 2);
    // A point on the workspace boundary fails validation.
    fs::write(dir.path().join("edge.json"), TWO_POINTS.replace(r#""7", "5""#, r#""10", "5""#)).unwrap();
    assert_eq!(code(&barrier(dir.path(), &["solve", "edge.json"])), 2);
    fs::write(
        dir.path().join("squares.json"),
        r#"{
  "workspace": [["0", "0"], ["10", "0"], ["10", "10"], ["0", "10"]],
  "sets": [[{"polygon": [["2", "2"], ["5", "2"], ["5", "5"], ["2", "5"]]}], [{"polygon": [["5.5", "2"], ["8", "2"], ["8", "5"], ["5.5", "5"]]}]],
  "obstacles": []
}"#,
    )
    .unwrap();
    let o = barrier(dir.path(), &["solve", "squares.json", "--omit-timing"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sol: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(sol["objective"], 1);
    assert_eq!(code(&barrier(dir.path(), &["solve", "i.json", "--mode", "grid"])), 2);

    // No time at all: the greedy incumbent is written and flagged.
    let o = barrier(dir.path(), &["generate", "--kind", "random-points", "--sets", "2", "--objects", "3", "--seed", "0", "-o", "r.json"]);
    assert_eq!(code(&o), 0);
    let o = barrier(dir.path(), &["solve", "r.json", "--time-limit", "0", "-o", "r.sol.json"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    let sol: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.sol.json")).unwrap()).unwrap();
    assert_eq!(sol["status"], "time_limit");
    assert_eq!(sol["verified"], true);
}

#[test]
fn bench_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["bench", "--kind", "random-points", "--sets", "2", "--objects", "1-3", "--trials", "2", "--omit-timing"];
    let o = barrier(dir.path(), &[&args[..], &["-o", "a.csv"]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split_whitespace().collect::<Vec<_>>(), ["sets", "1", "2", "3"]);
    assert!(!lines[1].contains('-'));
    let o = barrier(dir.path(), &[&args[..], &["-o", "b.csv"]].concat());
    assert_eq!(code(&o), 0);
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 4);
}
