use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{CsvColumns, CutMode, DatasetSpec};
use crate::error::{Error, Result};
use crate::model::{ModelConfig, Task, Variant};
use crate::train::TrainConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub root: Option<PathBuf>,
    pub mode: CutMode,
    pub seg_len: f64,
    pub seg_num: usize,
    pub id_column: String,
    pub valence_column: String,
    pub arousal_column: String,
}

impl Default for DataSection {
    fn default() -> Self {
        let cols = CsvColumns::default();
        Self {
            root: None,
            mode: CutMode::Simple,
            seg_len: 20.0,
            seg_num: 6,
            id_column: cols.id,
            valence_column: cols.valence,
            arousal_column: cols.arousal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub width: f64,
    pub se_reduction: usize,
    pub lstm_hidden: usize,
    pub lstm_layers: usize,
    pub head_dims: Vec<usize>,
    pub task: Task,
    pub variant: Variant,
}

impl Default for ModelSection {
    fn default() -> Self {
        let m = ModelConfig::default();
        Self {
            width: m.width,
            se_reduction: m.se_reduction,
            lstm_hidden: m.lstm_hidden,
            lstm_layers: m.lstm_layers,
            head_dims: m.head_dims,
            task: m.task,
            variant: m.variant,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub lr0: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub milestones: Vec<usize>,
    pub decay_factor: f64,
    pub folds: usize,
    pub parallel_folds: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            lr0: t.lr0,
            weight_decay: t.weight_decay,
            epochs: t.epochs,
            batch_size: t.batch_size,
            milestones: t.milestones,
            decay_factor: t.decay_factor,
            folds: t.folds,
            parallel_folds: t.parallel_folds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub out_dir: PathBuf,
    /// Defaults to `<out_dir>/cache`.
    pub cache_dir: Option<PathBuf>,
    /// Record wall-clock seconds in result rows. Disable for byte-identical
    /// reruns.
    pub timing: bool,
    /// Add the published reference values as `paper_*` columns.
    pub paper_reference: bool,
    /// Run sweep points concurrently.
    pub parallel_sweep: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            out_dir: PathBuf::from("runs"),
            cache_dir: None,
            timing: true,
            paper_reference: false,
            parallel_sweep: false,
        }
    }
}

/// Everything a command needs. Absent keys take the published defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub data: DataSection,
    pub model: ModelSection,
    pub train: TrainSection,
    pub output: OutputSection,
}

const TOP_KEYS: &[&str] = &["seed", "data", "model", "train", "output"];
const DATA_KEYS: &[&str] = &[
    "root",
    "mode",
    "seg_len",
    "seg_num",
    "id_column",
    "valence_column",
    "arousal_column",
];
const MODEL_KEYS: &[&str] = &[
    "width",
    "se_reduction",
    "lstm_hidden",
    "lstm_layers",
    "head_dims",
    "task",
    "variant",
];
const TRAIN_KEYS: &[&str] = &[
    "lr0",
    "weight_decay",
    "epochs",
    "batch_size",
    "milestones",
    "decay_factor",
    "folds",
    "parallel_folds",
];
const OUTPUT_KEYS: &[&str] = &[
    "out_dir",
    "cache_dir",
    "timing",
    "paper_reference",
    "parallel_sweep",
];

fn nearest<'a>(key: &str, known: &[&'a str]) -> Option<&'a str> {
    known
        .iter()
        .map(|k| (strsim::jaro_winkler(key, k), *k))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .filter(|(score, _)| *score > 0.7)
        .map(|(_, k)| k)
}

fn check_keys(table: &toml::Table, known: &[&str], section: &str) -> Result<()> {
    for key in table.keys() {
        if !known.contains(&key.as_str()) {
            let place = if section.is_empty() {
                String::new()
            } else {
                format!(" in [{section}]")
            };
            let hint = nearest(key, known)
                .map(|k| format!("; did you mean `{k}`?"))
                .unwrap_or_default();
            return Err(Error::Config(format!("unknown key `{key}`{place}{hint}")));
        }
    }
    Ok(())
}

impl RunConfig {
    /// Parses TOML, rejecting unknown keys with the nearest known key.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        check_keys(&table, TOP_KEYS, "")?;
        for (section, keys) in [
            ("data", DATA_KEYS),
            ("model", MODEL_KEYS),
            ("train", TRAIN_KEYS),
            ("output", OUTPUT_KEYS),
        ] {
            match table.get(section) {
                Some(toml::Value::Table(t)) => check_keys(t, keys, section)?,
                Some(_) => return Err(Error::Config(format!("`{section}` must be a table"))),
                None => {}
            }
        }
        let config: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.dataset_spec().validate()?;
        self.model_config().validate()?;
        self.train_config().validate()
    }

    pub fn root(&self) -> Result<&Path> {
        self.data
            .root
            .as_deref()
            .ok_or_else(|| Error::Config("missing dataset root (`root` in [data])".into()))
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.output
            .cache_dir
            .clone()
            .unwrap_or_else(|| self.output.out_dir.join("cache"))
    }

    pub fn columns(&self) -> CsvColumns {
        CsvColumns {
            id: self.data.id_column.clone(),
            valence: self.data.valence_column.clone(),
            arousal: self.data.arousal_column.clone(),
        }
    }

    pub fn dataset_spec(&self) -> DatasetSpec {
        DatasetSpec {
            mode: self.data.mode,
            seg_len: self.data.seg_len,
            seg_num: self.data.seg_num,
            seed: self.seed,
        }
    }

    pub fn model_config(&self) -> ModelConfig {
        let m = &self.model;
        ModelConfig {
            seg_num: self.data.seg_num,
            width: m.width,
            se_reduction: m.se_reduction,
            lstm_hidden: m.lstm_hidden,
            lstm_layers: m.lstm_layers,
            head_dims: m.head_dims.clone(),
            task: m.task,
            variant: m.variant,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            lr0: t.lr0,
            weight_decay: t.weight_decay,
            epochs: t.epochs,
            batch_size: t.batch_size,
            milestones: t.milestones.clone(),
            decay_factor: t.decay_factor,
            seed: self.seed,
            folds: t.folds,
            parallel_folds: t.parallel_folds,
        }
    }
}

/// Reads and validates a TOML run configuration; the dataset root is required.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config = RunConfig::from_toml_str(&text)?;
    config.root()?;
    Ok(config)
}
