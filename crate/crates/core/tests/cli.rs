use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_harq-lab");

const SCENARIO: &str = r#"{
  "name": "tiny",
  "prior": { "p": 0.9, "k": 4 },
  "sweep": { "start_db": 0.0, "stop_db": 1.0, "step_db": 1.0, "early_stop": false },
  "budget": { "fixed_trials": 1000, "chunk_trials": 250 },
  "seed": 3
}"#;

fn write_scenario(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("tiny.json");
    std::fs::write(&path, SCENARIO).unwrap();
    path
}

fn harq_lab(args: &[&str]) -> std::process::Output {
    let out = Command::new(BIN).args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

#[test]
fn run_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path());
    let out = dir.path().join("out");
    harq_lab(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--plot"]);
    let csv = std::fs::read_to_string(out.join("tiny.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3, "{csv}");
    assert!(lines[0].starts_with("snr_db,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",1000")));
    assert!(out.join("tiny.svg").exists());
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path());
    let read = |sub: &str| {
        let out = dir.path().join(sub);
        harq_lab(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        std::fs::read(out.join("tiny.csv")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn overrides_change_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path());
    let out = dir.path().join("o");
    harq_lab(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--override",
        "name=\"renamed\"",
        "--override",
        "sweep.stop_db=2.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(out.join("renamed.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn unknown_override_key_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path());
    let out = Command::new(BIN)
        .args(["sweep", cfg.to_str().unwrap(), "--override", "sweep.nonsense=1"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
}

#[test]
fn config_errors_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"prior\": { \"p\": 0.9, \"k\": 4 },\n  \"sweep\": 3\n}").unwrap();
    let out = Command::new(BIN).args(["run", path.to_str().unwrap()]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json:3:"));
}

#[test]
fn unknown_preset_lists_the_available_ones() {
    let out = Command::new(BIN).args(["reproduce", "nope"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fading_chain"));
}

#[test]
fn plot_subcommand_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path());
    let out = dir.path().join("p");
    harq_lab(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let svg = dir.path().join("curve.svg");
    harq_lab(&["plot", out.join("tiny.csv").to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert!(std::fs::read_to_string(svg).unwrap().contains("<svg"));
}

#[test]
fn bundled_scenarios_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = harq_jscc::harness::ScenarioConfig::load(&path).unwrap();
        harq_jscc::harness::Scenario::new(cfg).unwrap();
        seen += 1;
    }
    assert!(seen >= 3);
}
