use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn adff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adff"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&adff(&["--help"])), 0);
    assert_eq!(code(&adff(&["--version"])), 0);
    assert_eq!(code(&adff(&["cv", "--bogus"])), 1);
    assert_eq!(code(&adff(&["sweep", "--axis", "width"])), 1);
    assert_eq!(code(&adff(&["frobnicate"])), 1);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[train]\nbatchsize = 8\n").unwrap();
    let out = adff(&["cv", "--config", s(&cfg), "--root", s(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("batch_size"));

    assert_eq!(code(&adff(&["cv"])), 1, "missing dataset root");
    let missing = dir.path().join("absent.toml");
    assert_eq!(code(&adff(&["cv", "--config", s(&missing)])), 1);
}

#[test]
fn synth_extract_and_cv_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let out = dir.path().join("out");
    let synth = adff(&[
        "synth",
        "--n",
        "5",
        "--duration",
        "1",
        "--seed",
        "3",
        "--out",
        s(&corpus),
    ]);
    assert_eq!(
        code(&synth),
        0,
        "{}",
        String::from_utf8_lossy(&synth.stderr)
    );
    assert!(corpus.join("annotations.csv").exists());

    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "seed = 2\n[data]\nroot = {:?}\nseg_len = 1.0\nseg_num = 2\n\
             [model]\nse_reduction = 2\nlstm_hidden = 3\nhead_dims = [4]\ntask = \"arousal\"\n\
             [train]\nepochs = 1\nbatch_size = 4\nmilestones = []\n",
            s(&corpus)
        ),
    )
    .unwrap();
    let common = [
        "--config",
        s(&cfg),
        "--out",
        s(&out),
        "--width",
        "0.015625",
        "--no-timing",
    ];

    let extract = adff(&[&["extract"][..], &common].concat());
    assert_eq!(
        code(&extract),
        0,
        "{}",
        String::from_utf8_lossy(&extract.stderr)
    );
    let cv = adff(&[&["cv"][..], &common].concat());
    assert_eq!(code(&cv), 0, "{}", String::from_utf8_lossy(&cv.stderr));
    let csv = fs::read_to_string(out.join("cv/arousal_simple_len1_num2/results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7);
    let first = csv.clone();
    assert_eq!(code(&adff(&[&["cv"][..], &common].concat())), 0);
    let again = fs::read_to_string(out.join("cv/arousal_simple_len1_num2/results.csv")).unwrap();
    assert_eq!(first, again);

    fs::write(corpus.join("audio").join("0003.wav"), b"not audio").unwrap();
    let broken = adff(&[&["extract"][..], &common].concat());
    assert_eq!(code(&broken), 2);
    assert!(out.join("extract_errors.json").exists());
}

#[test]
fn runtime_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("nothing-here");
    fs::create_dir_all(&empty).unwrap();
    let out = adff(&[
        "cv",
        "--root",
        s(&empty),
        "--out",
        s(&dir.path().join("out")),
    ]);
    assert_eq!(code(&out), 2);
}
