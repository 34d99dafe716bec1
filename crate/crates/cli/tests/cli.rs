use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fae(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fae"))
        .args(args)
        .current_dir(dir)
        .env_remove("FAE_OUT_DIR")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CONFIG: &str = "\
synth.series=s
synth.length=120
synth.s.period=12
synth.s.noise_std=0.1
T=16
J=3
U=3
gamma=1e-3
m=8
epochs=2
data=out/series.csv
model=out/model.fae
";

fn trained(dir: &Path) {
    fs::write(dir.join("run.cfg"), CONFIG).unwrap();
    for cmd in ["synth", "train"] {
        let o = fae(&[cmd, "-c", "run.cfg"], dir);
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
    }
}

#[test]
fn info_reports_reference_architecture() {
    let dir = tempfile::tempdir().unwrap();
    let o = fae(&["info", "T=256", "J=48", "U=128", "F=2"], dir.path());
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "N=8 params=483840");
}

#[test]
fn unknown_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "lerning_rate=0.1\n").unwrap();
    let o = fae(&["train", "-c", "bad.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.trim().lines().count(), 1);
    assert!(err.starts_with("error kind=config code=2"));
    assert!(err.contains("lerning_rate"));
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fae(&["train", "data=nope.csv"], dir.path());
    assert_eq!(o.status.code(), Some(6), "{}", stderr(&o));
}

#[test]
fn pipeline_writes_declared_files() {
    let dir = tempfile::tempdir().unwrap();
    trained(dir.path());
    for cmd in ["detect", "eval", "latent", "info"] {
        let extra: &[&str] = if cmd == "latent" { &["clock.samples_per_day=12"] } else { &[] };
        let mut args = vec![cmd, "-c", "run.cfg"];
        args.extend_from_slice(extra);
        let o = fae(&args, dir.path());
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
    }
    let out = dir.path().join("out");
    for f in ["series.csv", "model.fae", "history.csv", "scores_s.csv", "metrics.csv", "projections.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    // one score row per window end: L − T + 1
    let scores = fs::read_to_string(out.join("scores_s.csv")).unwrap();
    assert_eq!(scores.lines().count() - 1, 120 - 16 + 1);
}

#[test]
fn latent_without_clock_on_index_data_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    trained(dir.path());
    let o = fae(&["latent", "-c", "run.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn truncated_model_is_corruption_and_leaves_no_scores() {
    let dir = tempfile::tempdir().unwrap();
    trained(dir.path());
    let model = dir.path().join("out/model.fae");
    let bytes = fs::read(&model).unwrap();
    fs::write(&model, &bytes[..bytes.len() - 8]).unwrap();
    let o = fae(&["detect", "-c", "run.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("kind=corruption"));
    assert!(!dir.path().join("out/scores_s.csv").exists());
    let leftovers: Vec<_> = fs::read_dir(dir.path().join("out"))
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn output_directory_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.cfg"), "synth.length=50\nsynth.synth.period=10\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fae"))
        .args(["synth", "-c", "s.cfg"])
        .current_dir(dir.path())
        .env("FAE_OUT_DIR", "elsewhere")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("elsewhere/series.csv").exists());
}
