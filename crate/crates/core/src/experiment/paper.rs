//! Published reference values, reported next to runs for comparison only.

use crate::train::Metrics;

use super::report::ResultRow;

/// (seg_len, rmse_a, r2_a, rmse_v, r2_v) for simple-mode inputs, seg_num 6.
const LENGTHS_SIMPLE: [(f64, f64, f64, f64, f64); 6] = [
    (5.0, 0.2350, 0.5914, 0.2532, 0.3850),
    (10.0, 0.2259, 0.6233, 0.2556, 0.3740),
    (15.0, 0.2253, 0.6256, 0.2573, 0.3651),
    (20.0, 0.2213, 0.6394, 0.2413, 0.4405),
    (25.0, 0.2281, 0.6121, 0.2552, 0.3728),
    (30.0, 0.2296, 0.6090, 0.2507, 0.3959),
];

/// Same layout for full-mode inputs.
const LENGTHS_FULL: [(f64, f64, f64, f64, f64); 6] = [
    (5.0, 0.2262, 0.6203, 0.2337, 0.5013),
    (10.0, 0.2186, 0.6441, 0.2312, 0.5083),
    (15.0, 0.2182, 0.6472, 0.2359, 0.4864),
    (20.0, 0.2160, 0.6545, 0.2378, 0.4785),
    (25.0, 0.2192, 0.6426, 0.2460, 0.4477),
    (30.0, 0.2260, 0.6193, 0.2521, 0.4172),
];

/// Joint valence/arousal regression and the sign-class accuracies, full mode,
/// seg_num 6: (seg_len, rmse_a, r2_a, rmse_v, r2_v, acc_a, acc_v, acc_four).
const MULTI_FULL: [(f64, f64, f64, f64, f64, f64, f64, f64); 6] = [
    (5.0, 0.2255, 0.6227, 0.2351, 0.4955, 0.8240, 0.8100, 0.7148),
    (10.0, 0.2190, 0.6428, 0.2332, 0.5004, 0.8312, 0.8129, 0.7190),
    (15.0, 0.2181, 0.6477, 0.2407, 0.4647, 0.8327, 0.8027, 0.7084),
    (20.0, 0.2188, 0.6449, 0.2394, 0.4713, 0.8360, 0.8052, 0.7088),
    (25.0, 0.2214, 0.6345, 0.2501, 0.4313, 0.8330, 0.8067, 0.7070),
    (30.0, 0.2248, 0.6252, 0.2537, 0.4098, 0.8235, 0.8014, 0.7026),
];

/// Variant comparison at seg_len 20, simple mode:
/// (label, rmse_a, r2_a, rmse_v, r2_v).
const VARIANTS: [(&str, f64, f64, f64, f64); 3] = [
    ("ADFF", 0.2213, 0.6394, 0.2379, 0.4575),
    ("w/o SE", 0.2253, 0.6239, 0.2429, 0.4332),
    ("w/o TFLM", 0.2228, 0.6316, 0.2469, 0.4155),
];

/// Training hours per seg_num at seg_len 20.
const HOURS: [(usize, f64); 9] = [
    (1, 4.99),
    (2, 1.52),
    (4, 0.76),
    (6, 0.51),
    (8, 0.40),
    (10, 0.28),
    (12, 0.29),
    (14, 0.27),
    (16, 0.25),
];

fn regression(task: &str, rmse_a: f64, r2_a: f64, rmse_v: f64, r2_v: f64) -> Option<Metrics> {
    let mut m = Metrics::default();
    if matches!(task, "valence" | "multi") {
        m.rmse_v = Some(rmse_v);
        m.r2_v = Some(r2_v);
    }
    if matches!(task, "arousal" | "multi") {
        m.rmse_a = Some(rmse_a);
        m.r2_a = Some(r2_a);
    }
    (m != Metrics::default()).then_some(m)
}

/// Published metrics for the setting of `row`, if one was published.
/// Variant comparisons use the single-task variant table; other runs use the
/// per-length tables.
pub fn reference(row: &ResultRow, variant: Option<&str>, ablation: bool) -> Option<Metrics> {
    if row.seg_num != 6 {
        return None;
    }
    let task = row.task.as_str();
    if ablation {
        if row.mode != "simple" || row.seg_len != 20.0 || task == "multi" {
            return None;
        }
        let &(_, ra, r2a, rv, r2v) = VARIANTS.iter().find(|v| Some(v.0) == variant)?;
        return regression(task, ra, r2a, rv, r2v);
    }
    if variant.is_some_and(|v| v != "ADFF") {
        return None;
    }
    match (task, row.mode.as_str()) {
        ("valence" | "arousal", mode) => {
            let table = if mode == "full" {
                &LENGTHS_FULL
            } else {
                &LENGTHS_SIMPLE
            };
            let &(_, ra, r2a, rv, r2v) = table.iter().find(|r| r.0 == row.seg_len)?;
            regression(task, ra, r2a, rv, r2v)
        }
        (_, "full") => {
            let &(_, ra, r2a, rv, r2v, aa, av, a4) =
                MULTI_FULL.iter().find(|r| r.0 == row.seg_len)?;
            match task {
                "multi" => regression(task, ra, r2a, rv, r2v),
                "two_a" => Some(Metrics {
                    acc_a: Some(aa),
                    ..Metrics::default()
                }),
                "two_v" => Some(Metrics {
                    acc_v: Some(av),
                    ..Metrics::default()
                }),
                "four" => Some(Metrics {
                    acc_four: Some(a4),
                    ..Metrics::default()
                }),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Published training hours for a seg_num at seg_len 20.
pub fn reference_hours(seg_num: usize) -> Option<f64> {
    HOURS.iter().find(|h| h.0 == seg_num).map(|h| h.1)
}
