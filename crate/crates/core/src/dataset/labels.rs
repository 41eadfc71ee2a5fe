use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassScheme {
    TwoV,
    TwoA,
    Four,
}

/// Sign-based class index; zero counts as positive. The four-class index is
/// `2·[arousal ≥ 0] + [valence ≥ 0]`.
pub fn to_class_labels(valence: f64, arousal: f64, scheme: ClassScheme) -> usize {
    let v = usize::from(valence >= 0.0);
    let a = usize::from(arousal >= 0.0);
    match scheme {
        ClassScheme::TwoV => v,
        ClassScheme::TwoA => a,
        ClassScheme::Four => 2 * a + v,
    }
}
