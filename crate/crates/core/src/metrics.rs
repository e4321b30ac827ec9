//! Classification metrics over a confusion matrix — overall/average
//! accuracy, Cohen's kappa, per-class IoU/precision/recall with means —
//! plus the area under a bands-performance curve.

use crate::error::{Error, Result};

/// c x c count matrix; entry (t, p) counts samples of true class t
/// predicted as p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<u64>,
    c: usize,
}

/// A mean over populated classes, with the classes that had to be left out.
#[derive(Debug, Clone, PartialEq)]
pub struct Averaged {
    pub value: f64,
    pub excluded: Vec<usize>,
}

/// Chance-corrected agreement. `degenerate` marks the p_e = 1 case (only
/// one class ever appears on both sides), where the score is defined as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaScore {
    pub value: f64,
    pub degenerate: bool,
}

/// Per-class scores; `None` marks a zero denominator for that quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub iou: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

/// The per-class table with its aggregate views. Unweighted means skip
/// zero-denominator classes; `excluded` lists classes absent from both
/// truth and prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    pub per_class: Vec<ClassMetrics>,
    pub mean_iou: f64,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub weighted_iou: f64,
    pub overall_iou: f64,
    pub excluded: Vec<usize>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Result<Self> {
        if classes == 0 {
            return Err(Error::InvalidParameter(
                "confusion matrix needs >= 1 class".into(),
            ));
        }
        Ok(ConfusionMatrix {
            counts: vec![0; classes * classes],
            c: classes,
        })
    }

    /// Build from explicit row-major counts.
    pub fn from_counts(counts: Vec<u64>, classes: usize) -> Result<Self> {
        if counts.len() != classes * classes {
            return Err(Error::ShapeMismatch {
                expected: classes * classes,
                got: counts.len(),
            });
        }
        if classes == 0 {
            return Err(Error::InvalidParameter(
                "confusion matrix needs >= 1 class".into(),
            ));
        }
        Ok(ConfusionMatrix { counts, c: classes })
    }

    /// Tally paired (truth, prediction) labels.
    pub fn from_pairs(truth: &[usize], predicted: &[usize], classes: usize) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::ShapeMismatch {
                expected: truth.len(),
                got: predicted.len(),
            });
        }
        let mut cm = ConfusionMatrix::new(classes)?;
        for (&t, &p) in truth.iter().zip(predicted) {
            cm.record(t, p)?;
        }
        Ok(cm)
    }

    pub fn record(&mut self, truth: usize, predicted: usize) -> Result<()> {
        if truth >= self.c || predicted >= self.c {
            return Err(Error::InvalidParameter(format!(
                "class pair ({truth}, {predicted}) out of range for {} classes",
                self.c
            )));
        }
        self.counts[truth * self.c + predicted] += 1;
        Ok(())
    }

    pub fn classes(&self) -> usize {
        self.c
    }

    pub fn count(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.c + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn trace(&self) -> u64 {
        (0..self.c).map(|i| self.count(i, i)).sum()
    }

    fn row_sum(&self, t: usize) -> u64 {
        self.counts[t * self.c..(t + 1) * self.c].iter().sum()
    }

    fn col_sum(&self, p: usize) -> u64 {
        (0..self.c).map(|t| self.count(t, p)).sum()
    }

    fn require_nonempty(&self) -> Result<u64> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyInput("confusion matrix has no samples".into()));
        }
        Ok(total)
    }

    /// Correct predictions over all samples: trace / total.
    pub fn overall_accuracy(&self) -> Result<f64> {
        let total = self.require_nonempty()?;
        Ok(self.trace() as f64 / total as f64)
    }

    /// Mean per-class recall over classes that appear in the truth; absent
    /// classes are excluded and reported.
    pub fn average_accuracy(&self) -> Result<Averaged> {
        self.require_nonempty()?;
        let mut sum = 0.0;
        let mut populated = 0usize;
        let mut excluded = Vec::new();
        for t in 0..self.c {
            let row = self.row_sum(t);
            if row == 0 {
                excluded.push(t);
            } else {
                sum += self.count(t, t) as f64 / row as f64;
                populated += 1;
            }
        }
        Ok(Averaged {
            value: sum / populated as f64,
            excluded,
        })
    }

    /// Cohen's kappa (p_o - p_e) / (1 - p_e), computed from integer
    /// accumulations as (N * trace - S) / (N^2 - S) with
    /// S = sum_t row_t * col_t, so rational cases come out exact.
    pub fn kappa(&self) -> Result<KappaScore> {
        let total = self.require_nonempty()?;
        let s: u128 = (0..self.c)
            .map(|t| self.row_sum(t) as u128 * self.col_sum(t) as u128)
            .sum();
        let n = total as u128;
        let denominator = n * n - s;
        if denominator == 0 {
            return Ok(KappaScore {
                value: 0.0,
                degenerate: true,
            });
        }
        let numerator = n * self.trace() as u128;
        // numerator may be below s when agreement is worse than chance.
        let value = if numerator >= s {
            (numerator - s) as f64 / denominator as f64
        } else {
            -((s - numerator) as f64 / denominator as f64)
        };
        Ok(KappaScore {
            value,
            degenerate: false,
        })
    }

    /// Per-class IoU = TP/(TP+FP+FN), precision = TP/(TP+FP), recall =
    /// TP/(TP+FN), with unweighted means over defined entries, the
    /// true-frequency-weighted IoU, and the pooled overall IoU.
    pub fn class_scores(&self) -> Result<ClassScores> {
        let total = self.require_nonempty()?;
        let mut per_class = Vec::with_capacity(self.c);
        let mut excluded = Vec::new();
        let (mut iou_sum, mut iou_n) = (0.0, 0usize);
        let (mut prec_sum, mut prec_n) = (0.0, 0usize);
        let (mut rec_sum, mut rec_n) = (0.0, 0usize);
        let mut weighted_iou = 0.0;
        for t in 0..self.c {
            let tp = self.count(t, t);
            let fp = self.col_sum(t) - tp;
            let fn_ = self.row_sum(t) - tp;
            let metrics = ClassMetrics {
                iou: (tp + fp + fn_ > 0).then(|| tp as f64 / (tp + fp + fn_) as f64),
                precision: (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64),
                recall: (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64),
            };
            if let Some(v) = metrics.iou {
                iou_sum += v;
                iou_n += 1;
                weighted_iou += (tp + fn_) as f64 / total as f64 * v;
            } else {
                excluded.push(t);
            }
            if let Some(v) = metrics.precision {
                prec_sum += v;
                prec_n += 1;
            }
            if let Some(v) = metrics.recall {
                rec_sum += v;
                rec_n += 1;
            }
            per_class.push(metrics);
        }
        let trace = self.trace();
        Ok(ClassScores {
            per_class,
            mean_iou: iou_sum / iou_n.max(1) as f64,
            mean_precision: prec_sum / prec_n.max(1) as f64,
            mean_recall: rec_sum / rec_n.max(1) as f64,
            weighted_iou,
            overall_iou: trace as f64 / (2 * total - trace) as f64,
            excluded,
        })
    }
}

/// A (band count, score) curve with strictly increasing k.
#[derive(Debug, Clone, PartialEq)]
pub struct BandsCurve {
    points: Vec<(usize, f64)>,
}

impl BandsCurve {
    /// Points in any order; sorted by k, duplicates rejected.
    pub fn new(mut points: Vec<(usize, f64)>) -> Result<Self> {
        points.sort_by_key(|&(k, _)| k);
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameter(format!(
                    "duplicate band count {} in curve",
                    w[0].0
                )));
            }
        }
        Ok(BandsCurve { points })
    }

    pub fn points(&self) -> &[(usize, f64)] {
        &self.points
    }
}

/// Trapezoidal area under the score-vs-k curve, normalized by the spanned
/// k range so the value stays on the score scale. Needs >= 2 points.
pub fn bands_auc(curve: &BandsCurve) -> Result<f64> {
    let pts = &curve.points;
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "bands curve needs >= 2 points for AUC, got {}",
            pts.len()
        )));
    }
    let mut area = 0.0;
    for w in pts.windows(2) {
        let ((k0, s0), (k1, s1)) = (w[0], w[1]);
        area += 0.5 * (s0 + s1) * (k1 - k0) as f64;
    }
    let range = (pts.last().unwrap().0 - pts[0].0) as f64;
    Ok(area / range)
}
