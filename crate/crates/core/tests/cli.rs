use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cusp-spectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exponent_law_single_alpha_predicts_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = cli(&["exponent-law", "--d", "1", "--alpha", "1", "--out", out]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let json = read_json(&dir.path().join("exponent-law.json"));
    assert_eq!(json["predicted"], 2.0);
    assert_eq!(json["pass"], true);
    let measured = json["exponent"].as_f64().unwrap();
    assert!((measured - 2.0).abs() <= 0.2, "{measured}");
    assert!(dir.path().join("exponent-law.csv").exists());
    assert!(dir.path().join("exponent-law.svg").exists());
}

#[test]
fn missing_config_names_the_path() {
    let run = cli(&["gamma-decay", "--config", "/definitely/not/here.toml"]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("/definitely/not/here.toml"));
}

#[test]
fn malformed_and_mismatched_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "experiment = \"no-such-experiment\"\n").unwrap();
    let run = cli(&["gamma-decay", "--config", bad.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("no-such-experiment"));

    let other = dir.path().join("tau.toml");
    std::fs::write(&other, "experiment = \"tau-decay\"\n").unwrap();
    let run = cli(&["gamma-decay", "--config", other.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["prop-suite", "geometry", "fourier-lemma"] {
        let mut texts = Vec::new();
        for n in ["a", "b"] {
            let out = dir.path().join(cmd).join(n);
            let run = cli(&[cmd, "--seed", "7", "--out", out.to_str().unwrap()]);
            assert!(run.status.success(), "{cmd}");
            let mut files: Vec<_> = std::fs::read_dir(&out)
                .unwrap()
                .map(|e| e.unwrap().path())
                .collect();
            files.sort();
            texts.push(
                files
                    .iter()
                    .map(|f| std::fs::read(f).unwrap())
                    .collect::<Vec<_>>(),
            );
        }
        assert_eq!(texts[0], texts[1], "{cmd}");
    }
}

#[test]
fn exit_status_is_the_conjunction_of_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // an impossible tolerance turns a passing run into a failing one
    let run = cli(&[
        "fourier-lemma",
        "--tolerance",
        "0",
        "--no-plot",
        "--out",
        out,
    ]);
    assert_eq!(run.status.code(), Some(1));
    let json = read_json(&dir.path().join("fourier-lemma.json"));
    assert_eq!(json["pass"], false);
    assert!(!dir.path().join("fourier-lemma.svg").exists());

    let run = cli(&["fourier-lemma", "--out", out]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(
        read_json(&dir.path().join("fourier-lemma.json"))["pass"],
        true
    );
}

#[test]
fn config_file_with_separate_model() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("model.toml"),
        "particles = 2\nnuclear_charge = 2.0\nexponents = [1.0, 1.0]\nsymmetry = \"pair-antisymmetric\"\n",
    )
    .unwrap();
    let cfg = dir.path().join("geometry.toml");
    std::fs::write(
        &cfg,
        "experiment = \"geometry\"\nmodel_file = \"model.toml\"\n[geometry]\nparticles = 2\npairs = 500\nprobes = 50\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = cli(&[
        "geometry",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let json = read_json(&out.join("geometry.json"));
    assert_eq!(json["details"]["lipschitz"]["pairs"], 500);
}

#[test]
fn gamma_decay_preset_predicts_eight_thirds() {
    let dir = tempfile::tempdir().unwrap();
    let run = cli(&[
        "gamma-decay",
        "--no-plot",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let json = read_json(&dir.path().join("gamma-decay.json"));
    assert!((json["predicted"].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-15);
    let csv = std::fs::read_to_string(dir.path().join("gamma-decay.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("k,value"));
}
