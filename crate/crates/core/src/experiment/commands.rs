use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    build_segments, kfold_split, load_pmemo, synth_generate, ChorusFeatures, ChorusRecord,
    FoldPlan, SEG_LENS, SEG_NUMS,
};
use crate::error::{Error, Result};
use crate::frontend::{cache, extract, load_audio};
use crate::model::{checkpoint, Variant};
use crate::train::{cross_validate, format_mean_std, CvReport, Metrics};

use super::paper::reference_hours;
use super::report::{
    cell, emit_report, report_rows, round4, rows_from_report, write_table, ResultRow, RESULT_HEADER,
};
use super::RunConfig;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ExtractFailure {
    pub song_id: String,
    pub path: PathBuf,
    pub error: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ExtractSummary {
    pub computed: usize,
    pub skipped: usize,
    pub failures: Vec<ExtractFailure>,
    /// Corpus loading warnings, such as rows without audio.
    pub warnings: Vec<String>,
}

enum Extracted {
    Computed,
    Skipped,
}

fn valid_key(song_id: &str) -> bool {
    !song_id.is_empty() && !song_id.contains(['/', '\\']) && song_id != "." && song_id != ".."
}

fn extract_one(record: &ChorusRecord, cache_dir: &Path) -> Result<Extracted> {
    if !valid_key(&record.song_id) {
        return Err(Error::Dataset(format!(
            "song id `{}` cannot name a cache entry",
            record.song_id
        )));
    }
    let hash = cache::content_hash(&record.audio_path)?;
    if cache::is_current(cache_dir, &record.song_id, &hash) {
        return Ok(Extracted::Skipped);
    }
    let clip = load_audio(&record.audio_path)?;
    let mel = extract(&clip)?;
    cache::write_entry(
        cache_dir,
        &record.song_id,
        &mel,
        clip.duration_seconds(),
        &record.audio_path,
        &hash,
    )?;
    Ok(Extracted::Computed)
}

fn extract_records(records: &[ChorusRecord], cache_dir: &Path) -> Result<ExtractSummary> {
    fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    let outcomes: Vec<Result<Extracted>> = records
        .par_iter()
        .map(|r| extract_one(r, cache_dir))
        .collect();
    let mut summary = ExtractSummary::default();
    for (record, outcome) in records.iter().zip(outcomes) {
        match outcome {
            Ok(Extracted::Computed) => summary.computed += 1,
            Ok(Extracted::Skipped) => summary.skipped += 1,
            Err(e) => {
                warn!("{}: {e}", record.audio_path.display());
                summary.failures.push(ExtractFailure {
                    song_id: record.song_id.clone(),
                    path: record.audio_path.clone(),
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(summary)
}

/// Fills the feature cache with one log-Mel spectrogram per chorus. Entries
/// whose audio hash and frontend version match are skipped. Per-file failures
/// are collected in the summary and written to `extract_errors.json`.
pub fn cmd_extract(config: &RunConfig) -> Result<ExtractSummary> {
    let loaded = load_pmemo(config.root()?, &config.columns())?;
    let mut summary = extract_records(&loaded.records, &config.cache_dir())?;
    summary.warnings = loaded.warnings;
    info!(
        "extract: {} computed, {} up to date, {} failed",
        summary.computed,
        summary.skipped,
        summary.failures.len()
    );
    if !summary.failures.is_empty() {
        let out = &config.output.out_dir;
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let path = out.join("extract_errors.json");
        fs::write(&path, serde_json::to_string_pretty(&summary.failures)?)
            .map_err(|e| Error::io(&path, e))?;
    }
    Ok(summary)
}

/// Annotated choruses with their cached features.
pub struct Corpus {
    pub records: Vec<ChorusRecord>,
    pub features: Vec<ChorusFeatures>,
}

impl Corpus {
    pub fn song_ids(&self) -> Vec<String> {
        self.records.iter().map(|r| r.song_id.clone()).collect()
    }
}

/// Loads the corpus, extracting missing features first. Choruses whose audio
/// fails to decode are left out with a warning.
pub fn load_corpus(config: &RunConfig) -> Result<Corpus> {
    let loaded = load_pmemo(config.root()?, &config.columns())?;
    let cache_dir = config.cache_dir();
    let summary = extract_records(&loaded.records, &cache_dir)?;
    let failed: Vec<&str> = summary
        .failures
        .iter()
        .map(|f| f.song_id.as_str())
        .collect();
    let records: Vec<ChorusRecord> = loaded
        .records
        .into_iter()
        .filter(|r| !failed.contains(&r.song_id.as_str()))
        .collect();
    if records.is_empty() {
        return Err(Error::Dataset("no chorus could be decoded".into()));
    }
    let features = records
        .par_iter()
        .map(|r| {
            let (mel, meta) = cache::read_entry(&cache_dir, &r.song_id)?;
            Ok(ChorusFeatures {
                mel,
                duration_s: meta.duration_seconds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus { records, features })
}

/// Results of one cross-validation run.
pub struct CvRun {
    pub dir: PathBuf,
    pub rows: Vec<ResultRow>,
    pub report: CvReport,
    pub plan: FoldPlan,
}

fn run_tag(config: &RunConfig) -> String {
    format!(
        "{}_{}_len{}_num{}",
        config.model.task.name(),
        config.data.mode.name(),
        config.data.seg_len,
        config.data.seg_num
    )
}

fn cv_on(
    config: &RunConfig,
    corpus: &Corpus,
    dir: &Path,
    variant: Option<&str>,
    ablation: bool,
) -> Result<CvRun> {
    config.validate()?;
    let segments = build_segments(&corpus.records, &corpus.features, &config.dataset_spec())?;
    let train = config.train_config();
    let plan = kfold_split(&corpus.song_ids(), train.folds, config.seed)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    info!(
        "cv: {} segments from {} choruses -> {}",
        segments.len(),
        corpus.records.len(),
        dir.display()
    );
    let report = cross_validate(
        &segments,
        &plan,
        &config.model_config(),
        &train,
        |fold, outcome| checkpoint::save(&dir.join(format!("fold{fold}.ckpt")), &outcome.model),
    )?;
    let rows = rows_from_report(
        &report,
        config.data.mode.name(),
        config.data.seg_len,
        config.data.seg_num,
        config.output.timing,
    );
    let paper = config.output.paper_reference;
    emit_report(
        dir,
        "results",
        &report_rows(&rows, variant, paper, ablation),
        paper,
    )?;
    let mut detail = serde_json::to_value(&report)?;
    if !config.output.timing {
        strip_timing(&mut detail);
    }
    let path = dir.join("report.json");
    fs::write(&path, serde_json::to_string_pretty(&detail)? + "\n")
        .map_err(|e| Error::io(&path, e))?;
    Ok(CvRun {
        dir: dir.to_path_buf(),
        rows,
        report,
        plan,
    })
}

fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            for key in ["wall_seconds", "total_seconds"] {
                if let Some(x) = map.get_mut(key) {
                    *x = serde_json::Value::Null;
                }
            }
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

/// Cross-validates the configured setting; writes `results.csv/json`,
/// `report.json` and one checkpoint per fold under `<out>/cv/<tag>/`.
pub fn cmd_cv(config: &RunConfig) -> Result<CvRun> {
    let corpus = load_corpus(config)?;
    let dir = config.output.out_dir.join("cv").join(run_tag(config));
    cv_on(config, &corpus, &dir, None, false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SegNum,
    SegLen,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::SegNum => "seg_num",
            SweepAxis::SegLen => "seg_len",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "seg_num" => Ok(SweepAxis::SegNum),
            "seg_len" => Ok(SweepAxis::SegLen),
            _ => Err(Error::Config(format!(
                "unknown sweep axis `{s}` (expected seg_num or seg_len)"
            ))),
        }
    }

    pub fn grid(self) -> Vec<f64> {
        match self {
            SweepAxis::SegNum => SEG_NUMS.iter().map(|&v| v as f64).collect(),
            SweepAxis::SegLen => SEG_LENS.iter().map(|&v| v as f64).collect(),
        }
    }

    fn apply(self, config: &RunConfig, value: f64) -> RunConfig {
        let mut c = config.clone();
        match self {
            SweepAxis::SegNum => c.data.seg_num = value as usize,
            SweepAxis::SegLen => c.data.seg_len = value,
        }
        c
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepFailure {
    pub value: f64,
    pub error: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// The `mean` row of this point.
    pub mean: ResultRow,
    pub hours: Option<f64>,
}

pub struct SweepRun {
    pub dir: PathBuf,
    pub points: Vec<SweepPoint>,
    pub rows: Vec<ResultRow>,
    pub failures: Vec<SweepFailure>,
}

/// One cross-validation per grid value of `axis`. Failed points are listed in
/// `failures.json` while the others are still reported. Writes `rows.*` (all
/// fold, mean and std rows) and `summary.*` (mean rows with hours).
pub fn cmd_sweep(config: &RunConfig, axis: SweepAxis) -> Result<SweepRun> {
    let corpus = load_corpus(config)?;
    let dir = config.output.out_dir.join(format!("sweep_{}", axis.name()));
    let run_point = |value: f64| -> Result<CvRun> {
        let c = axis.apply(config, value);
        cv_on(
            &c,
            &corpus,
            &dir.join(format!("{}_{value}", axis.name())),
            None,
            false,
        )
    };
    let grid = axis.grid();
    let outcomes: Vec<Result<CvRun>> = if config.output.parallel_sweep {
        grid.par_iter().map(|&v| run_point(v)).collect()
    } else {
        grid.iter().map(|&v| run_point(v)).collect()
    };
    let mut points = Vec::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (&value, outcome) in grid.iter().zip(outcomes) {
        match outcome {
            Ok(run) => {
                let mean = run
                    .rows
                    .iter()
                    .find(|r| r.fold == "mean")
                    .cloned()
                    .expect("mean row");
                let hours = config
                    .output
                    .timing
                    .then(|| round4(run.report.total_seconds / 3600.0));
                points.push(SweepPoint { value, mean, hours });
                rows.extend(run.rows);
            }
            Err(e) => {
                warn!("sweep {} = {value} failed: {e}", axis.name());
                failures.push(SweepFailure {
                    value,
                    error: e.to_string(),
                });
            }
        }
    }
    let paper = config.output.paper_reference;
    emit_report(&dir, "rows", &report_rows(&rows, None, paper, false), paper)?;
    write_sweep_summary(&dir, axis, &points, paper)?;
    let manifest = dir.join("failures.json");
    if failures.is_empty() {
        let _ = fs::remove_file(&manifest);
    } else {
        fs::write(&manifest, serde_json::to_string_pretty(&failures)? + "\n")
            .map_err(|e| Error::io(&manifest, e))?;
    }
    Ok(SweepRun {
        dir,
        points,
        rows,
        failures,
    })
}

fn write_sweep_summary(
    dir: &Path,
    axis: SweepAxis,
    points: &[SweepPoint],
    paper: bool,
) -> Result<()> {
    let mut header: Vec<String> = vec!["axis".into(), "value".into()];
    header.extend(RESULT_HEADER.iter().map(|s| s.to_string()));
    header.push("hours".into());
    if paper {
        header.extend(Metrics::NAMES.iter().map(|n| format!("paper_{n}")));
        header.push("paper_hours".into());
    }
    let mut cells = Vec::new();
    let mut json = Vec::new();
    for p in points {
        let mut c = vec![axis.name().to_string(), format!("{}", p.value)];
        c.extend(p.mean.cells());
        c.push(cell(p.hours));
        let mut obj = serde_json::json!({
            "axis": axis.name(),
            "value": p.value,
            "row": p.mean,
            "hours": p.hours,
        });
        if paper {
            let reference = super::paper::reference(&p.mean, None, false);
            let hours = (axis == SweepAxis::SegNum && p.mean.seg_len == 20.0)
                .then(|| reference_hours(p.mean.seg_num))
                .flatten();
            c.extend(
                reference
                    .clone()
                    .unwrap_or_default()
                    .values()
                    .into_iter()
                    .map(cell),
            );
            c.push(cell(hours));
            obj["paper"] = serde_json::to_value(&reference)?;
            obj["paper_hours"] = serde_json::to_value(hours)?;
        }
        cells.push(c);
        json.push(obj);
    }
    write_table(dir, "summary", &header, &cells, &json)?;
    Ok(())
}

pub struct AblationRun {
    pub dir: PathBuf,
    pub runs: Vec<(Variant, CvRun)>,
}

/// Cross-validates the full model and both ablated variants on the same
/// segments and fold plan. Writes `ablation.*` (all rows with a variant
/// column) and `summary.*` (mean±std per variant).
pub fn cmd_ablate(config: &RunConfig) -> Result<AblationRun> {
    let corpus = load_corpus(config)?;
    let dir = config.output.out_dir.join("ablate");
    let paper = config.output.paper_reference;
    let mut runs = Vec::new();
    let mut all = Vec::new();
    for variant in [Variant::Full, Variant::NoSe, Variant::NoTflm] {
        let mut c = config.clone();
        c.model.variant = variant;
        let run = cv_on(
            &c,
            &corpus,
            &dir.join(variant.name()),
            Some(variant.label()),
            true,
        )?;
        all.extend(report_rows(&run.rows, Some(variant.label()), paper, true));
        runs.push((variant, run));
    }
    emit_report(&dir, "ablation", &all, paper)?;
    let mut header: Vec<String> = vec!["variant".into()];
    header.extend(Metrics::NAMES.iter().map(|s| s.to_string()));
    if paper {
        header.extend(Metrics::NAMES.iter().map(|n| format!("paper_{n}")));
    }
    let mut cells = Vec::new();
    let mut json = Vec::new();
    for (variant, run) in &runs {
        let (mean, std) = (run.report.mean.values(), run.report.std.values());
        let shown: Vec<String> = mean
            .iter()
            .zip(std)
            .map(|(m, s)| match (m, s) {
                (Some(m), Some(s)) => format_mean_std(*m, s),
                _ => String::new(),
            })
            .collect();
        let mut c = vec![variant.label().to_string()];
        c.extend(shown.iter().cloned());
        let mut obj = serde_json::Map::new();
        obj.insert("variant".into(), variant.label().into());
        for (name, v) in Metrics::NAMES.iter().zip(&shown) {
            obj.insert((*name).into(), v.clone().into());
        }
        if paper {
            let mean_row = run
                .rows
                .iter()
                .find(|r| r.fold == "mean")
                .expect("mean row");
            let reference =
                super::paper::reference(mean_row, Some(variant.label()), true).unwrap_or_default();
            for (name, v) in Metrics::NAMES.iter().zip(reference.values()) {
                c.push(cell(v));
                obj.insert(format!("paper_{name}"), cell(v).into());
            }
        }
        cells.push(c);
        json.push(serde_json::Value::Object(obj));
    }
    write_table(&dir, "summary", &header, &cells, &json)?;
    Ok(AblationRun { dir, runs })
}

/// Writes a synthetic corpus of `n` clips to `root`.
pub fn cmd_synth(root: &Path, n: usize, seed: u64, duration_s: f64) -> Result<Vec<ChorusRecord>> {
    let records = synth_generate(root, n, seed, duration_s)?;
    info!("synth: wrote {} clips to {}", records.len(), root.display());
    Ok(records)
}
