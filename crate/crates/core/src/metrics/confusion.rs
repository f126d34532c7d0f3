use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{MaskGrid, ProbMap};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(pred: &MaskGrid, truth: &MaskGrid) -> Result<ConfusionCounts> {
    truth.shape().ensure_same(pred.shape())?;
    let mut c = ConfusionCounts::default();
    for (&p, &t) in pred.labels().iter().zip(truth.labels()) {
        match (p, t) {
            (1, 1) => c.tp += 1,
            (1, _) => c.fp += 1,
            (_, 1) => c.fn_ += 1,
            _ => c.tn += 1,
        }
    }
    Ok(c)
}

/// Overlap metrics. Ratios with an empty denominator are defined as 1, the
/// value they take when the compared sets agree trivially.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport<T> {
    pub jaccard: T,
    pub dice: T,
    pub accuracy: T,
    pub specificity: T,
    pub sensitivity: T,
}

fn ratio<T: Num + Copy + FromPrimitive>(num: u64, den: u64) -> T {
    if den == 0 {
        T::one()
    } else {
        let n = T::from_u64(num).expect("count representable");
        let d = T::from_u64(den).expect("count representable");
        n / d
    }
}

/// Metrics for one confusion table. Generic so exact rational arithmetic can
/// be used where identities must hold bit for bit.
pub fn metrics<T: Num + Copy + FromPrimitive>(c: &ConfusionCounts) -> MetricReport<T> {
    MetricReport {
        jaccard: ratio(c.tp, c.tp + c.fp + c.fn_),
        dice: ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_),
        accuracy: ratio(c.tp + c.tn, c.total()),
        specificity: ratio(c.tn, c.tn + c.fp),
        sensitivity: ratio(c.tp, c.tp + c.fn_),
    }
}

/// Mean of per-image reports.
pub fn mean_report(reports: &[MetricReport<f64>]) -> MetricReport<f64> {
    let n = reports.len().max(1) as f64;
    let sum = |f: fn(&MetricReport<f64>) -> f64| reports.iter().map(f).sum::<f64>() / n;
    MetricReport {
        jaccard: sum(|r| r.jaccard),
        dice: sum(|r| r.dice),
        accuracy: sum(|r| r.accuracy),
        specificity: sum(|r| r.specificity),
        sensitivity: sum(|r| r.sensitivity),
    }
}

/// Foreground where `P >= t`.
pub fn threshold<T: Real>(pm: &ProbMap<T>, t: T) -> MaskGrid {
    MaskGrid::new(pm.shape(), pm.probs().iter().map(|&p| u8::from(p >= t)).collect()).expect("labels are binary")
}

/// Per-image Jaccard of `pred` against `truth`.
pub fn jaccard(pred: &MaskGrid, truth: &MaskGrid) -> Result<f64> {
    Ok(metrics::<f64>(&confusion(pred, truth)?).jaccard)
}
