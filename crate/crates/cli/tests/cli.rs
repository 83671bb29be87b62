use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use stowage_core::dsl::ScoreProgram;
use stowage_core::instance::{load_dataset, load_instance, read_solution, write_solution};
use stowage_core::setpart::{Pool, SpSolution};
use stowage_evolve::output::read_best_fitness;

fn stowage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stowage")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, profile: &str, seed: u64, count: u64) {
    let o = stowage(&["synth", "--profile", profile, "--seed", &seed.to_string(), "--count", &count.to_string(), "--out", p(dir)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn solve_is_deterministic_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "small", 5, 1);
    let inst = dir.path().join("synth-small-5.json");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = stowage(&["solve", "--instance", p(&inst), "--scorer", "appendix-f", "--beta", "0", "--seed", "0", "--out", p(out)]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let sol = read_solution(&a).unwrap();
    assert!(sol.containers_used > 0);
    assert_eq!(code(&stowage(&["verify", "--instance", p(&inst), "--solution", p(&a)])), 0);
    let json = stowage(&["verify", "--instance", p(&inst), "--solution", p(&a), "--json"]);
    let report: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(report["ok"], true);
}

#[test]
fn broken_solutions_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "small", 6, 1);
    let inst = dir.path().join("synth-small-6.json");
    let sol_path = dir.path().join("s.json");
    assert_eq!(code(&stowage(&["solve", "--instance", p(&inst), "--out", p(&sol_path)])), 0);
    let mut sol = read_solution(&sol_path).unwrap();
    sol.placements.pop();
    write_solution(&sol, &sol_path).unwrap();
    assert_eq!(code(&stowage(&["verify", "--instance", p(&inst), "--solution", p(&sol_path)])), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&stowage(&["sp", "--out", "x.json"])), 2);
    assert_eq!(code(&stowage(&["frobnicate"])), 2);
    assert_eq!(code(&stowage(&["solve", "--instance", "/no/such/file.json"])), 2);
    assert_eq!(code(&stowage(&["bench"])), 2);
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "tiny", 1, 1);
    let inst = dir.path().join("synth-tiny-1.json");
    assert_eq!(code(&stowage(&["solve", "--instance", p(&inst), "--beta", "1.5"])), 2);
    assert_eq!(code(&stowage(&["pool", "--instance", p(&inst), "--schedule", "0.1", "--out", "p.json"])), 2);
    assert_eq!(code(&stowage(&["evolve", "--synthetic", "2", "--max-corrections", "6", "--out", p(dir.path())])), 2);
}

#[test]
fn pool_sp_and_lp_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "small", 7, 1);
    let inst = dir.path().join("synth-small-7.json");
    let pool_path = dir.path().join("pool.json");
    let o = stowage(&["--jobs", "2", "pool", "--instance", p(&inst), "--regime", "both", "--schedule", "0:1,0.1:10", "--out", p(&pool_path)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let pool = Pool::read(&pool_path).unwrap();
    assert_eq!(pool.runs.len(), 11);
    assert_eq!(pool.instance, load_instance(&inst).unwrap());
    let (sol_path, sel_path) = (dir.path().join("sol.json"), dir.path().join("sel.json"));
    let o = stowage(&["sp", "--pool", p(&pool_path), "--out", p(&sol_path), "--selection-out", p(&sel_path)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sel: SpSolution = serde_json::from_str(&fs::read_to_string(&sel_path).unwrap()).unwrap();
    assert_eq!(read_solution(&sol_path).unwrap(), sel.trimmed);
    assert_eq!(sel.multiplicities.values().sum::<u32>() as usize, sel.total_containers);
    assert_eq!(code(&stowage(&["verify", "--instance", p(&inst), "--regime", "both", "--solution", p(&sol_path)])), 0);
    let lp = dir.path().join("model.lp");
    assert_eq!(code(&stowage(&["export-lp", "--pool", p(&pool_path), "--mode", "exact", "--out", p(&lp)])), 0);
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Minimize") && text.trim_end().ends_with("End"));
}

#[test]
fn synth_writes_loadable_instances() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "medium", 10, 3);
    let all = load_dataset(dir.path()).unwrap();
    let names: Vec<&str> = all.iter().map(|i| i.name.as_str()).collect();
    assert_eq!(names, ["synth-medium-10", "synth-medium-11", "synth-medium-12"]);
}

#[test]
fn evolve_writes_readable_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let args = ["evolve", "--synthetic", "4", "--generations", "3", "--fault-rate", "0.3", "--seed", "2", "--out", p(&out)];
    assert_eq!(code(&stowage(&args)), 0);
    let first = fs::read(out.join("records.jsonl")).unwrap();
    let best = read_best_fitness(&out.join("trajectory.csv")).unwrap();
    assert_eq!(best.len(), 4);
    assert!(ScoreProgram::parse(fs::read_to_string(out.join("best.score")).unwrap().trim()).is_ok());
    assert!(fs::read_to_string(out.join("robustness.txt")).unwrap().contains("+ correction 5"));
    assert_eq!(code(&stowage(&args)), 0);
    assert_eq!(fs::read(out.join("records.jsonl")).unwrap(), first);
}

#[test]
fn evolved_programs_drive_solve_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    synth(&data, "small", 20, 3);
    let prog = dir.path().join("rule.score");
    fs::write(&prog, "vol_util - 0.01 * height_increase\n").unwrap();
    let csv = dir.path().join("bench.csv");
    let json = dir.path().join("bench.json");
    let o = stowage(&[
        "bench", "--dataset", p(&data), "--method", "greedy", "--scorer", p(&prog), "--seeds", "0,1", "--beta", "0.1",
        "--csv", p(&csv), "--json", p(&json),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + 3 * 2);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["result"]["seeds"], serde_json::json!([0, 1]));
    assert!(report["comparison"].is_null());

    let config = dir.path().join("run.toml");
    fs::write(&config, "regime = \"stability\"\ndataset = \"data\"\n[method]\nkind = \"first-fit\"\n").unwrap();
    assert_eq!(code(&stowage(&["bench", "--config", p(&config)])), 0);
}
