use std::fs;
use std::path::Path;

use adff::dataset::{build_segments, CutMode, DatasetSpec};
use adff::experiment::{
    cmd_ablate, cmd_cv, cmd_extract, cmd_sweep, cmd_synth, load_corpus, read_result_csv, ResultRow,
    RunConfig, SweepAxis,
};
use adff::model::Task;

fn config(root: &Path, out: &Path, seg_len: f64) -> RunConfig {
    let mut c = RunConfig::default();
    c.seed = 4;
    c.data.root = Some(root.to_path_buf());
    c.data.seg_len = seg_len;
    c.data.seg_num = 2;
    c.model.width = 1.0 / 64.0;
    c.model.se_reduction = 2;
    c.model.lstm_hidden = 3;
    c.model.head_dims = vec![6];
    c.model.task = Task::Multi;
    c.train.lr0 = 1e-3;
    c.train.epochs = 1;
    c.train.batch_size = 4;
    c.train.milestones = vec![];
    c.output.out_dir = out.to_path_buf();
    c.output.timing = false;
    c
}

fn files_with_extension(dir: &Path, ext: &str) -> usize {
    fs::read_dir(dir)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == ext)
        })
        .count()
}

#[test]
fn extract_is_idempotent_and_isolates_bad_files() {
    let corpus = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    cmd_synth(corpus.path(), 3, 1, 1.0).unwrap();
    let c = config(corpus.path(), out.path(), 1.0);

    let first = cmd_extract(&c).unwrap();
    assert_eq!((first.computed, first.skipped), (3, 0));
    assert!(first.failures.is_empty());
    assert_eq!(files_with_extension(&c.cache_dir(), "f32"), 3);
    assert_eq!(files_with_extension(&c.cache_dir(), "meta"), 3);

    let second = cmd_extract(&c).unwrap();
    assert_eq!((second.computed, second.skipped), (0, 3));

    fs::write(
        corpus.path().join("audio").join("0002.wav"),
        b"RIFF....garbage",
    )
    .unwrap();
    let third = cmd_extract(&c).unwrap();
    assert_eq!(third.failures.len(), 1);
    assert_eq!(third.failures[0].song_id, "0002");
    assert_eq!(third.skipped, 2);
    let manifest = fs::read_to_string(out.path().join("extract_errors.json")).unwrap();
    assert!(manifest.contains("0002"));
}

#[test]
fn cv_writes_seven_rows_and_consistent_formats() {
    let corpus = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    cmd_synth(corpus.path(), 10, 2, 1.0).unwrap();
    let run = cmd_cv(&config(corpus.path(), out.path(), 1.0)).unwrap();
    assert_eq!(run.rows.len(), 7);
    let labels: Vec<&str> = run.rows.iter().map(|r| r.fold.as_str()).collect();
    assert_eq!(labels, ["0", "1", "2", "3", "4", "mean", "std"]);
    assert!(run.dir.ends_with("cv/multi_simple_len1_num2"));
    for i in 0..5 {
        assert!(run.dir.join(format!("fold{i}.ckpt")).exists());
    }

    let from_csv = read_result_csv(&run.dir.join("results.csv")).unwrap();
    let json: Vec<ResultRow> =
        serde_json::from_str(&fs::read_to_string(run.dir.join("results.json")).unwrap()).unwrap();
    assert_eq!(from_csv, json);
    assert!(from_csv.iter().all(|r| r.wall_seconds.is_none()));

    // Every chorus is tested exactly once, by a model that never trained on it.
    let mut tested: Vec<String> = run
        .report
        .folds
        .iter()
        .flat_map(|f| f.predictions.iter().map(|p| p.song_id.clone()))
        .collect();
    tested.sort();
    tested.dedup();
    assert_eq!(tested.len(), 10);
    for f in &run.report.folds {
        let train = run.plan.train_ids(f.fold);
        assert!(f.predictions.iter().all(|p| !train.contains(&p.song_id)));
    }
}

#[test]
fn full_mode_yields_at_least_as_many_segments() {
    let corpus = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    cmd_synth(corpus.path(), 4, 3, 3.0).unwrap();
    let c = config(corpus.path(), out.path(), 1.0);
    let loaded = load_corpus(&c).unwrap();
    let count = |mode| {
        let spec = DatasetSpec {
            mode,
            seg_len: 1.0,
            seg_num: 2,
            seed: 0,
        };
        build_segments(&loaded.records, &loaded.features, &spec)
            .unwrap()
            .len()
    };
    assert_eq!(count(CutMode::Simple), 4);
    assert_eq!(count(CutMode::Full), 12);
}

fn mean_of_folds(rows: &[ResultRow], pick: fn(&ResultRow) -> Option<f64>) -> f64 {
    let folds: Vec<f64> = rows
        .iter()
        .filter(|r| r.fold.parse::<usize>().is_ok())
        .map(|r| pick(r).unwrap())
        .collect();
    folds.iter().sum::<f64>() / folds.len() as f64
}

#[test]
fn sweeps_cover_their_grids() {
    let corpus = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    // 6 s gives 601 frames, enough for 16 channels of 32 rows.
    cmd_synth(corpus.path(), 6, 5, 6.0).unwrap();
    let mut c = config(corpus.path(), out.path(), 6.0);
    c.train.folds = 2;
    c.model.task = Task::Valence;

    let by_num = cmd_sweep(&c, SweepAxis::SegNum).unwrap();
    assert!(by_num.failures.is_empty(), "{:?}", by_num.failures);
    let values: Vec<f64> = by_num.points.iter().map(|p| p.value).collect();
    assert_eq!(values, [1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0]);
    for p in &by_num.points {
        let rows: Vec<ResultRow> = by_num
            .rows
            .iter()
            .filter(|r| r.seg_num as f64 == p.value)
            .cloned()
            .collect();
        assert_eq!(rows.len(), 2 + 2);
        let recomputed = mean_of_folds(&rows, |r| r.rmse_v);
        assert!((recomputed - p.mean.rmse_v.unwrap()).abs() <= 1e-4);
    }
    let summary = fs::read_to_string(by_num.dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 9);

    let by_len = cmd_sweep(&c, SweepAxis::SegLen).unwrap();
    assert!(by_len.failures.is_empty(), "{:?}", by_len.failures);
    assert_eq!(by_len.points.len(), 6);
    assert!(by_len.points.windows(2).all(|w| w[0].value < w[1].value));
}

#[test]
fn sweep_keeps_partial_results_on_failure() {
    let corpus = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    // 0.5 s gives 51 frames: seg_num ≥ 2 leaves fewer than 32 rows per channel.
    cmd_synth(corpus.path(), 4, 6, 0.5).unwrap();
    let mut c = config(corpus.path(), out.path(), 0.5);
    c.train.folds = 2;
    let run = cmd_sweep(&c, SweepAxis::SegNum).unwrap();
    assert_eq!(run.points.len(), 1);
    assert_eq!(run.failures.len(), 8);
    let manifest = fs::read_to_string(run.dir.join("failures.json")).unwrap();
    assert!(manifest.contains("\"value\": 16.0"));
}

#[test]
fn ablation_compares_three_variants_on_one_plan() {
    let corpus = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    cmd_synth(corpus.path(), 6, 7, 1.0).unwrap();
    let mut c = config(corpus.path(), out.path(), 1.0);
    c.train.folds = 3;
    c.output.paper_reference = true;
    let run = cmd_ablate(&c).unwrap();
    assert_eq!(run.runs.len(), 3);
    let plan = &run.runs[0].1.plan;
    assert!(run.runs.iter().all(|(_, r)| &r.plan == plan));

    let table = fs::read_to_string(run.dir.join("ablation.csv")).unwrap();
    let header = table.lines().next().unwrap();
    assert!(header.starts_with("variant,task,"));
    assert!(header.contains("paper_r2_v"));
    for label in ["ADFF", "w/o SE", "w/o TFLM"] {
        assert_eq!(
            table
                .lines()
                .filter(|l| l.starts_with(&format!("{label},")))
                .count(),
            3 + 2
        );
    }
    let summary = fs::read_to_string(run.dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
    assert!(summary.lines().nth(1).unwrap().starts_with("ADFF,"));
}
