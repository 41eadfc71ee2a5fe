use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LEVELS: usize = 5;
pub const BASE_CHANNELS: [usize; LEVELS] = [64, 128, 256, 512, 512];
pub const CONVS_PER_LEVEL: [usize; LEVELS] = [2, 2, 3, 3, 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Valence,
    Arousal,
    Multi,
    TwoV,
    TwoA,
    Four,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::Valence,
        Task::Arousal,
        Task::Multi,
        Task::TwoV,
        Task::TwoA,
        Task::Four,
    ];

    pub fn arity(self) -> usize {
        match self {
            Task::Valence | Task::Arousal => 1,
            Task::Multi | Task::TwoV | Task::TwoA => 2,
            Task::Four => 4,
        }
    }

    pub fn is_classification(self) -> bool {
        matches!(self, Task::TwoV | Task::TwoA | Task::Four)
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Valence => "valence",
            Task::Arousal => "arousal",
            Task::Multi => "multi",
            Task::TwoV => "two_v",
            Task::TwoA => "two_a",
            Task::Four => "four",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown task `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Full,
    NoSe,
    NoTflm,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Full, Variant::NoSe, Variant::NoTflm];

    /// Row label used in comparison tables.
    pub fn label(self) -> &'static str {
        match self {
            Variant::Full => "ADFF",
            Variant::NoSe => "w/o SE",
            Variant::NoTflm => "w/o TFLM",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoSe => "no_se",
            Variant::NoTflm => "no_tflm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Input channels (stacked time slices).
    pub seg_num: usize,
    /// Channel multiplier applied to the VGG-16 level widths.
    pub width: f64,
    pub se_reduction: usize,
    /// LSTM units per direction.
    pub lstm_hidden: usize,
    pub lstm_layers: usize,
    pub head_dims: Vec<usize>,
    pub task: Task,
    pub variant: Variant,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            seg_num: 6,
            width: 1.0,
            se_reduction: 16,
            lstm_hidden: 128,
            lstm_layers: 2,
            head_dims: vec![256, 64],
            task: Task::Valence,
            variant: Variant::Full,
        }
    }
}

impl ModelConfig {
    /// Channel count of each level: `ceil(base · width)`, at least the SE
    /// reduction ratio.
    pub fn level_channels(&self) -> [usize; LEVELS] {
        BASE_CHANNELS
            .map(|b| ((b as f64 * self.width).ceil() as usize).max(self.se_reduction.max(1)))
    }

    pub fn estf_len(&self) -> usize {
        2 * self.lstm_hidden
    }

    pub fn fused_len(&self) -> usize {
        LEVELS * self.estf_len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.seg_num == 0 {
            return bad("seg_num must be at least 1");
        }
        if !(self.width > 0.0 && self.width <= 1.0) {
            return bad("width must lie in (0, 1]");
        }
        if self.se_reduction == 0 {
            return bad("se_reduction must be positive");
        }
        if self.lstm_hidden == 0 || self.lstm_layers == 0 {
            return bad("lstm_hidden and lstm_layers must be positive");
        }
        if self.head_dims.contains(&0) {
            return bad("head_dims entries must be positive");
        }
        Ok(())
    }
}
