use std::collections::HashSet;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One annotated chorus clip.
#[derive(Clone, Debug, PartialEq)]
pub struct ChorusRecord {
    pub song_id: String,
    pub audio_path: PathBuf,
    pub valence_raw: f64,
    pub arousal_raw: f64,
}

impl ChorusRecord {
    pub fn valence(&self) -> f64 {
        2.0 * self.valence_raw - 1.0
    }

    pub fn arousal(&self) -> f64 {
        2.0 * self.arousal_raw - 1.0
    }
}

/// Annotation CSV column names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvColumns {
    pub id: String,
    pub valence: String,
    pub arousal: String,
}

impl Default for CsvColumns {
    fn default() -> Self {
        Self {
            id: "musicId".into(),
            valence: "Valence(mean)".into(),
            arousal: "Arousal(mean)".into(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LoadReport {
    pub records: Vec<ChorusRecord>,
    pub warnings: Vec<String>,
}

/// Linear map of a `[0, 1]` annotation onto `[-1, 1]`.
pub fn scale_annotation(raw: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&raw) {
        return Err(Error::InvalidInput(format!(
            "raw annotation out of range: {raw}"
        )));
    }
    Ok(2.0 * raw - 1.0)
}

/// Reads `<root>/annotations.csv` and resolves `<root>/audio/<id>.wav`.
pub fn load_pmemo(root: &Path, columns: &CsvColumns) -> Result<LoadReport> {
    let csv_path = root.join("annotations.csv");
    if !csv_path.is_file() {
        return Err(Error::Dataset(format!(
            "missing annotations CSV at {}",
            csv_path.display()
        )));
    }
    let mut reader = csv::Reader::from_path(&csv_path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Dataset(format!("{}: no column `{name}`", csv_path.display())))
    };
    let (id_col, v_col, a_col) = (
        col(&columns.id)?,
        col(&columns.valence)?,
        col(&columns.arousal)?,
    );
    let mut report = LoadReport::default();
    let mut seen = HashSet::new();
    for (line, row) in reader.records().enumerate() {
        let row = row?;
        let field = |i: usize| row.get(i).map(str::trim).unwrap_or("");
        let song_id = field(id_col).to_string();
        let parse = |i: usize| field(i).parse::<f64>().ok();
        let (Some(valence_raw), Some(arousal_raw)) = (parse(v_col), parse(a_col)) else {
            report.warnings.push(format!(
                "row {}: song `{song_id}` lacks a valence/arousal value",
                line + 2
            ));
            continue;
        };
        if song_id.is_empty() {
            report
                .warnings
                .push(format!("row {}: empty song id", line + 2));
            continue;
        }
        for (field, value) in [("valence", valence_raw), ("arousal", arousal_raw)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::AnnotationRange {
                    song_id: song_id.clone(),
                    field,
                    value,
                });
            }
        }
        if !seen.insert(song_id.clone()) {
            return Err(Error::Dataset(format!("duplicate song id `{song_id}`")));
        }
        let audio_path = root.join("audio").join(format!("{song_id}.wav"));
        if !audio_path.is_file() {
            let msg = format!("song `{song_id}`: missing audio {}", audio_path.display());
            warn!("{msg}");
            report.warnings.push(msg);
            continue;
        }
        report.records.push(ChorusRecord {
            song_id,
            audio_path,
            valence_raw,
            arousal_raw,
        });
    }
    if report.records.is_empty() {
        return Err(Error::Dataset(format!(
            "{}: no usable rows",
            csv_path.display()
        )));
    }
    Ok(report)
}
