use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::train::{CvReport, Metrics};

use super::paper;

/// One line of a result table: a fold, or the `mean` / `std` over folds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub task: String,
    pub mode: String,
    pub seg_len: f64,
    pub seg_num: usize,
    pub fold: String,
    pub rmse_v: Option<f64>,
    pub r2_v: Option<f64>,
    pub rmse_a: Option<f64>,
    pub r2_a: Option<f64>,
    pub acc_v: Option<f64>,
    pub acc_a: Option<f64>,
    pub acc_four: Option<f64>,
    pub wall_seconds: Option<f64>,
}

pub const RESULT_HEADER: [&str; 13] = [
    "task",
    "mode",
    "seg_len",
    "seg_num",
    "fold",
    "rmse_v",
    "r2_v",
    "rmse_a",
    "r2_a",
    "acc_v",
    "acc_a",
    "acc_four",
    "wall_seconds",
];

/// Rounds to the four decimals the tables are printed with.
pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

pub(crate) fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_default()
}

impl ResultRow {
    pub fn metrics(&self) -> Metrics {
        Metrics::from_values([
            self.rmse_v,
            self.r2_v,
            self.rmse_a,
            self.r2_a,
            self.acc_v,
            self.acc_a,
            self.acc_four,
        ])
    }

    fn with_metrics(&self, fold: &str, m: &Metrics, wall_seconds: Option<f64>) -> Self {
        let v = m.values().map(|x| x.map(round4));
        Self {
            fold: fold.to_string(),
            rmse_v: v[0],
            r2_v: v[1],
            rmse_a: v[2],
            r2_a: v[3],
            acc_v: v[4],
            acc_a: v[5],
            acc_four: v[6],
            wall_seconds: wall_seconds.map(round4),
            ..self.clone()
        }
    }

    pub fn cells(&self) -> Vec<String> {
        let mut out = vec![
            self.task.clone(),
            self.mode.clone(),
            format!("{}", self.seg_len),
            self.seg_num.to_string(),
            self.fold.clone(),
        ];
        out.extend(self.metrics().values().into_iter().map(cell));
        out.push(cell(self.wall_seconds));
        out
    }
}

/// Fold rows followed by `mean` and `std`, with values rounded to four
/// decimals. With `timing` off, `wall_seconds` is left empty.
pub fn rows_from_report(
    report: &CvReport,
    mode: &str,
    seg_len: f64,
    seg_num: usize,
    timing: bool,
) -> Vec<ResultRow> {
    let base = ResultRow {
        task: report.task.name().to_string(),
        mode: mode.to_string(),
        seg_len,
        seg_num,
        fold: String::new(),
        rmse_v: None,
        r2_v: None,
        rmse_a: None,
        r2_a: None,
        acc_v: None,
        acc_a: None,
        acc_four: None,
        wall_seconds: None,
    };
    let t = |s: f64| timing.then_some(s);
    let mut rows: Vec<ResultRow> = report
        .folds
        .iter()
        .map(|f| base.with_metrics(&f.fold.to_string(), &f.metrics, t(f.wall_seconds)))
        .collect();
    rows.push(base.with_metrics("mean", &report.mean, t(report.total_seconds)));
    rows.push(base.with_metrics("std", &report.std, None));
    rows
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `header`/`rows` as `<stem>.csv` and the JSON objects as
/// `<stem>.json`.
pub(crate) fn write_table<T: Serialize>(
    dir: &Path,
    stem: &str,
    header: &[String],
    rows: &[Vec<String>],
    json_rows: &[T],
) -> Result<(PathBuf, PathBuf)> {
    create_dir(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    let json_path = dir.join(format!("{stem}.json"));
    let json = serde_json::to_string_pretty(json_rows)?;
    fs::write(&json_path, json + "\n").map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

/// A result row with the published values for the same setting, when
/// requested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variant: Option<String>,
    #[serde(flatten)]
    pub row: ResultRow,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub paper: Option<Metrics>,
}

/// Emits `<stem>.csv` and `<stem>.json` with identical content. Adds a
/// leading `variant` column when any row has one, and `paper_*` columns when
/// `paper_reference` is set.
pub fn emit_report(
    dir: &Path,
    stem: &str,
    rows: &[ReportRow],
    paper_reference: bool,
) -> Result<(PathBuf, PathBuf)> {
    let with_variant = rows.iter().any(|r| r.variant.is_some());
    let mut header: Vec<String> = Vec::new();
    if with_variant {
        header.push("variant".into());
    }
    header.extend(RESULT_HEADER.iter().map(|s| s.to_string()));
    if paper_reference {
        header.extend(Metrics::NAMES.iter().map(|n| format!("paper_{n}")));
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut c = Vec::new();
            if with_variant {
                c.push(r.variant.clone().unwrap_or_default());
            }
            c.extend(r.row.cells());
            if paper_reference {
                let p = r.paper.clone().unwrap_or_default();
                c.extend(p.values().into_iter().map(cell));
            }
            c
        })
        .collect();
    let json: Vec<ReportRow> = rows
        .iter()
        .map(|r| ReportRow {
            paper: if paper_reference {
                r.paper.clone()
            } else {
                None
            },
            ..r.clone()
        })
        .collect();
    write_table(dir, stem, &header, &cells, &json)
}

/// Wraps plain result rows, attaching reference values to `mean` rows.
pub fn report_rows(
    rows: &[ResultRow],
    variant: Option<&str>,
    paper_reference: bool,
    ablation: bool,
) -> Vec<ReportRow> {
    rows.iter()
        .map(|r| ReportRow {
            variant: variant.map(str::to_string),
            paper: (paper_reference && r.fold == "mean")
                .then(|| paper::reference(r, variant, ablation))
                .flatten(),
            row: r.clone(),
        })
        .collect()
}

/// Reads a result CSV written by [`emit_report`] back into rows.
pub fn read_result_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let idx = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Dataset(format!("{}: no column `{name}`", path.display())))
    };
    let cols: Vec<usize> = RESULT_HEADER
        .iter()
        .map(|h| idx(h))
        .collect::<Result<_>>()?;
    let bad = |what: &str| Error::Dataset(format!("{}: bad {what}", path.display()));
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(cols[i]).unwrap_or("");
        let opt = |i: usize| -> Result<Option<f64>> {
            let s = get(i);
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(RESULT_HEADER[i]))
            }
        };
        out.push(ResultRow {
            task: get(0).to_string(),
            mode: get(1).to_string(),
            seg_len: get(2).parse().map_err(|_| bad("seg_len"))?,
            seg_num: get(3).parse().map_err(|_| bad("seg_num"))?,
            fold: get(4).to_string(),
            rmse_v: opt(5)?,
            r2_v: opt(6)?,
            rmse_a: opt(7)?,
            r2_a: opt(8)?,
            acc_v: opt(9)?,
            acc_a: opt(10)?,
            acc_four: opt(11)?,
            wall_seconds: opt(12)?,
        });
    }
    Ok(out)
}
