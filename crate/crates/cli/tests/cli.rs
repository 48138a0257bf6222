use std::path::{Path, PathBuf};
use std::process::Command;

use etc_core::config::ExperimentConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_etc-lab"))
}

fn config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/lure.toml")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("etc-lab-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn shipped_config_is_the_benchmark() {
    let cfg = ExperimentConfig::load(&config_path()).unwrap();
    assert_eq!(cfg, ExperimentConfig::default());
}

#[test]
fn bounds_prints_report_and_csv() {
    let out = bin().args(["bounds", "--mc-count", "3", "--config"]).arg(config_path()).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("tau_hat = 1.789835e-3"));
    assert!(text.contains("B1,B3,c,tau1"));
}

#[test]
fn run_outputs_are_reproducible() {
    let run = |dir: &Path| {
        let st = bin()
            .args(["run", "--case", "ii", "--mc-count", "2", "--duration", "2", "--seed", "5", "--dump-trajectories", "500", "--out-dir"])
            .arg(dir)
            .output()
            .unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    };
    let (a, b) = (scratch("a"), scratch("b"));
    run(&a);
    run(&b);
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "events_ii.csv"));
    assert!(names.iter().any(|n| n == "trajectory_ii_000.csv"));
    for n in &names {
        assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{n:?} differs");
    }
    let summary = std::fs::read_to_string(a.join("summary.txt")).unwrap();
    assert!(summary.contains("config_hash = "));
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);
}

#[test]
fn rejects_unknown_keys_and_cases() {
    let dir = scratch("bad");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "[trigger]\nrho1 = 0.05\n").unwrap();
    assert!(!bin().args(["bounds", "--config"]).arg(&bad).output().unwrap().status.success());
    assert!(!bin().args(["run", "--case", "vii", "--mc-count", "1"]).output().unwrap().status.success());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn presets_listed() {
    let out = bin().args(["presets", "--mc-count", "1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in etc_core::trigger::PRESET_NAMES {
        assert!(text.contains(name), "{name}");
    }
}
