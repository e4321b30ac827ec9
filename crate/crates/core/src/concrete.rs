//! Concrete selector layer: differentiable k-of-n band selection.
//!
//! A learnable logits matrix L (k rows, one per selector) is pushed through
//! a row-wise Gumbel-Softmax at temperature tau to produce a selection
//! matrix M; the compressed spectrum is M * x. tau decays by a factor alpha
//! after every training batch, so M approaches one-hot rows; inference
//! skips the noise entirely and reads the row-wise argmax of L.
//!
//! Rows are initialized with a segmented Xavier scheme that biases selector
//! i toward the i-th contiguous slice of the spectrum, which keeps the rows
//! from collapsing onto the same band (plain Xavier init is also available
//! as the control arm of that comparison).

use crate::error::{Error, Result};
use crate::math::{sample_gumbel, softmax_row};
use crate::rng::Rng;
use crate::selection::BandSelection;

/// Concrete selector state. `logits` (row-major k x n) is the only
/// trainable block; `tau` is annealed, `alpha` and `beta` are fixed.
#[derive(Debug, Clone)]
pub struct ConcreteLayer {
    logits: Vec<f64>,
    k: usize,
    n: usize,
    tau: f64,
    alpha: f64,
    beta: f64,
}

/// Sampled forward state kept for the backward pass: the selection matrix
/// M and the Gumbel noise G that produced it (both row-major k x n).
#[derive(Debug, Clone)]
pub struct ConcreteForwardRecord {
    pub m: Vec<f64>,
    pub g: Vec<f64>,
}

/// How `selected_bands` saw the rows: the raw per-row argmax picks and how
/// many distinct bands they cover. Fewer than k distinct picks means the
/// selectors collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionReport {
    pub row_picks: Vec<usize>,
    pub distinct: usize,
    pub collapsed: bool,
}

/// Logits initialization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogitsInit {
    Segmented,
    Plain,
}

impl std::str::FromStr for LogitsInit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "segmented" => Ok(LogitsInit::Segmented),
            "plain" => Ok(LogitsInit::Plain),
            other => Err(Error::InvalidParameter(format!(
                "unknown logits init '{other}' (expected segmented|plain)"
            ))),
        }
    }
}

/// The k contiguous segments of [0, n): each spans floor(n/k) bands and the
/// last one absorbs the remainder. Returned as half-open (start, end) pairs.
pub fn segment_bounds(k: usize, n: usize) -> Vec<(usize, usize)> {
    debug_assert!(k >= 1 && k <= n);
    let s = n / k;
    (0..k)
        .map(|i| {
            let start = i * s;
            let end = if i + 1 == k { n } else { (i + 1) * s };
            (start, end)
        })
        .collect()
}

fn xavier_bound(k: usize, n: usize) -> f64 {
    (6.0 / (n + k) as f64).sqrt()
}

fn check_kn(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "selector needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    Ok(())
}

/// Plain Xavier-uniform logits: every entry drawn from [-a, a] with
/// a = sqrt(6 / (n + k)).
pub fn plain_xavier_logits(k: usize, n: usize, rng: &mut Rng) -> Result<Vec<f64>> {
    check_kn(k, n)?;
    let a = xavier_bound(k, n);
    Ok((0..k * n)
        .map(|_| (rng.next_f64() * 2.0 - 1.0) * a)
        .collect())
}

/// Segmented Xavier logits: the plain draw shifted by +delta inside row i's
/// segment and by -delta * s_i / (n - s_i) outside it, with delta = a / 2
/// and s_i the segment length, so each row's offsets average to exactly
/// zero while the segment keeps a positive mean. A row whose segment is the
/// whole spectrum (k = 1) gets no offset.
pub fn segmented_xavier_logits(k: usize, n: usize, rng: &mut Rng) -> Result<Vec<f64>> {
    let mut logits = plain_xavier_logits(k, n, rng)?;
    let delta = 0.5 * xavier_bound(k, n);
    for (i, (start, end)) in segment_bounds(k, n).into_iter().enumerate() {
        let seg_len = end - start;
        if seg_len == n {
            continue;
        }
        let outside = -delta * seg_len as f64 / (n - seg_len) as f64;
        for j in 0..n {
            let offset = if j >= start && j < end { delta } else { outside };
            logits[i * n + j] += offset;
        }
    }
    Ok(logits)
}

impl ConcreteLayer {
    /// Build a layer with freshly initialized logits.
    pub fn new(
        k: usize,
        n: usize,
        tau0: f64,
        alpha: f64,
        beta: f64,
        init: LogitsInit,
        rng: &mut Rng,
    ) -> Result<Self> {
        let logits = match init {
            LogitsInit::Segmented => segmented_xavier_logits(k, n, rng)?,
            LogitsInit::Plain => plain_xavier_logits(k, n, rng)?,
        };
        Self::from_logits(logits, k, n, tau0, alpha, beta)
    }

    /// Build from explicit logits (row-major k x n).
    pub fn from_logits(
        logits: Vec<f64>,
        k: usize,
        n: usize,
        tau0: f64,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        check_kn(k, n)?;
        if logits.len() != k * n {
            return Err(Error::ShapeMismatch {
                expected: k * n,
                got: logits.len(),
            });
        }
        if !(tau0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be > 0, got {tau0}"
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        Ok(ConcreteLayer {
            logits,
            k,
            n,
            tau: tau0,
            alpha,
            beta,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn logits_mut(&mut self) -> &mut [f64] {
        &mut self.logits
    }

    /// Training forward: fresh Gumbel noise per entry, row-wise softmax at
    /// the current temperature, `output_i = sum_j M[i,j] * x[j]`.
    pub fn forward_train(
        &self,
        x: &[f64],
        rng: &mut Rng,
    ) -> Result<(Vec<f64>, ConcreteForwardRecord)> {
        let mut g = Vec::with_capacity(self.k * self.n);
        for _ in 0..self.k * self.n {
            g.push(sample_gumbel(rng, self.beta)?);
        }
        self.forward_with_noise(x, &g)
    }

    /// Forward with caller-supplied noise; gradient checks freeze G here.
    pub fn forward_with_noise(
        &self,
        x: &[f64],
        g: &[f64],
    ) -> Result<(Vec<f64>, ConcreteForwardRecord)> {
        self.check_input(x.len())?;
        if g.len() != self.k * self.n {
            return Err(Error::ShapeMismatch {
                expected: self.k * self.n,
                got: g.len(),
            });
        }
        let mut m = Vec::with_capacity(self.k * self.n);
        let mut out = Vec::with_capacity(self.k);
        let mut noisy = vec![0.0; self.n];
        for i in 0..self.k {
            let row = &self.logits[i * self.n..(i + 1) * self.n];
            let grow = &g[i * self.n..(i + 1) * self.n];
            for j in 0..self.n {
                noisy[j] = row[j] + grow[j];
            }
            let soft = softmax_row(&noisy, self.tau)?;
            out.push(soft.iter().zip(x).map(|(w, xj)| w * xj).sum());
            m.extend_from_slice(&soft);
        }
        Ok((out, ConcreteForwardRecord { m, g: g.to_vec() }))
    }

    /// Inference forward: `output_i = x[argmax_j L[i,j]]`, no noise, no
    /// temperature. Ties resolve to the lower band index.
    pub fn forward_infer(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x.len())?;
        Ok(self.row_picks().into_iter().map(|j| x[j]).collect())
    }

    /// Reparameterized gradient of the loss with respect to L, with the
    /// recorded noise held fixed: the softmax Jacobian applied row-wise,
    /// `dL[i,r] = (1/tau) * M[i,r] * (d_r - sum_j d_j M[i,j])` where
    /// `d_j = grad_out_i * x_j`.
    pub fn backward(
        &self,
        record: &ConcreteForwardRecord,
        x: &[f64],
        grad_out: &[f64],
    ) -> Result<Vec<f64>> {
        self.check_input(x.len())?;
        if record.m.len() != self.k * self.n {
            return Err(Error::ShapeMismatch {
                expected: self.k * self.n,
                got: record.m.len(),
            });
        }
        if grad_out.len() != self.k {
            return Err(Error::ShapeMismatch {
                expected: self.k,
                got: grad_out.len(),
            });
        }
        let mut grad = vec![0.0; self.k * self.n];
        for i in 0..self.k {
            let mrow = &record.m[i * self.n..(i + 1) * self.n];
            let gi = grad_out[i];
            let weighted: f64 = mrow.iter().zip(x).map(|(m, xj)| m * gi * xj).sum();
            for r in 0..self.n {
                grad[i * self.n + r] = mrow[r] * (gi * x[r] - weighted) / self.tau;
            }
        }
        Ok(grad)
    }

    /// Multiply tau by alpha. Called exactly once per training batch.
    pub fn anneal_temperature(&mut self) {
        self.tau *= self.alpha;
    }

    /// Row-wise argmax picks of L, deduplicated into a selection plus a
    /// report of the raw picks. Duplicates are reported, never repaired.
    pub fn selected_bands(&self) -> (BandSelection, SelectionReport) {
        let row_picks = self.row_picks();
        let mut distinct = row_picks.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let report = SelectionReport {
            distinct: distinct.len(),
            collapsed: distinct.len() < self.k,
            row_picks,
        };
        let selection =
            BandSelection::new(distinct, self.n).expect("deduped argmaxes are valid indices");
        (selection, report)
    }

    /// Argmax band per selector row, ties to the lower index.
    pub fn row_picks(&self) -> Vec<usize> {
        (0..self.k)
            .map(|i| {
                let row = &self.logits[i * self.n..(i + 1) * self.n];
                let mut best = 0;
                for (j, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = j;
                    }
                }
                best
            })
            .collect()
    }

    fn check_input(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::ShapeMismatch {
                expected: self.n,
                got,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer_from(rows: &[&[f64]], tau: f64) -> ConcreteLayer {
        let k = rows.len();
        let n = rows[0].len();
        let logits: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        ConcreteLayer::from_logits(logits, k, n, tau, 0.99998, 0.15).unwrap()
    }

    #[test]
    fn segments_for_25_bands_5_targets() {
        assert_eq!(
            segment_bounds(5, 25),
            vec![(0, 5), (5, 10), (10, 15), (15, 20), (20, 25)]
        );
    }

    #[test]
    fn last_segment_absorbs_remainder() {
        // n = 103, k = 8: s = 12, last segment spans 84..103.
        let bounds = segment_bounds(8, 103);
        assert_eq!(bounds[0], (0, 12));
        assert_eq!(bounds[6], (72, 84));
        assert_eq!(bounds[7], (84, 103));
    }

    #[test]
    fn segmented_rows_have_zero_mean_offsets() {
        let mut rng = Rng::new(1, 0);
        for (k, n) in [(5, 25), (8, 103), (6, 30), (1, 9), (7, 7)] {
            let mut plain_rng = rng.clone();
            let seg = segmented_xavier_logits(k, n, &mut rng).unwrap();
            let plain = plain_xavier_logits(k, n, &mut plain_rng).unwrap();
            for i in 0..k {
                let offset_sum: f64 = (0..n).map(|j| seg[i * n + j] - plain[i * n + j]).sum();
                assert!(
                    offset_sum.abs() < 1e-9,
                    "row {i} offsets sum to {offset_sum} for k={k} n={n}"
                );
            }
        }
    }

    #[test]
    fn segmented_in_segment_mean_beats_outside() {
        // Aggregated over 100 seeded draws per row, so the Xavier noise
        // averages out and the offset structure shows through.
        let (k, n) = (5, 25);
        let bounds = segment_bounds(k, n);
        let mut inside_sum = vec![0.0; k];
        let mut outside_sum = vec![0.0; k];
        for seed in 0..100 {
            let mut rng = Rng::new(seed, 0);
            let logits = segmented_xavier_logits(k, n, &mut rng).unwrap();
            for (i, &(start, end)) in bounds.iter().enumerate() {
                let row = &logits[i * n..(i + 1) * n];
                inside_sum[i] += row[start..end].iter().sum::<f64>() / (end - start) as f64;
                outside_sum[i] += (row[..start].iter().sum::<f64>()
                    + row[end..].iter().sum::<f64>())
                    / (n - (end - start)) as f64;
            }
        }
        for i in 0..k {
            assert!(
                inside_sum[i] > outside_sum[i],
                "row {i}: mean inside {} <= outside {}",
                inside_sum[i] / 100.0,
                outside_sum[i] / 100.0
            );
        }
    }

    #[test]
    fn plain_xavier_is_bounded_and_centered() {
        let (k, n) = (10, 100);
        let a = (6.0 / (n + k) as f64).sqrt();
        let mut rng = Rng::new(3, 0);
        let mut sum = 0.0;
        let mut count = 0usize;
        for _ in 0..1000 {
            let logits = plain_xavier_logits(k, n, &mut rng).unwrap();
            for &v in &logits {
                assert!(v.abs() <= a, "entry {v} outside [-{a}, {a}]");
                sum += v;
            }
            count += logits.len();
        }
        let mean = sum / count as f64;
        let std = a / 3f64.sqrt();
        assert!(
            mean.abs() < 3.0 * std / (count as f64).sqrt(),
            "global mean {mean} too far from 0"
        );
    }

    #[test]
    fn huge_temperature_averages_input() {
        let mut rng = Rng::new(4, 0);
        let layer = ConcreteLayer::new(3, 8, 1e6, 0.5, 0.15, LogitsInit::Plain, &mut rng).unwrap();
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let mean = x.iter().sum::<f64>() / 8.0;
        let (out, _) = layer.forward_train(&x, &mut rng).unwrap();
        for v in out {
            assert!((v - mean).abs() < 1e-3, "output {v} vs mean {mean}");
        }
    }

    #[test]
    fn dominant_logit_with_sharp_temperature_picks_band() {
        let mut row = vec![0.0; 12];
        row[5] = 1e3;
        let layer = layer_from(&[&row], 0.01);
        let x: Vec<f64> = (0..12).map(|i| (i as f64) * 1.5 - 3.0).collect();
        let mut rng = Rng::new(6, 0);
        let (out, _) = layer.forward_train(&x, &mut rng).unwrap();
        assert!((out[0] - x[5]).abs() < 1e-9);
    }

    #[test]
    fn sampled_rows_are_probability_vectors() {
        let mut rng = Rng::new(10, 0);
        let layer =
            ConcreteLayer::new(4, 20, 1.5, 0.99998, 0.15, LogitsInit::Segmented, &mut rng).unwrap();
        let x = vec![1.0; 20];
        for _ in 0..1000 {
            let (_, rec) = layer.forward_train(&x, &mut rng).unwrap();
            for i in 0..4 {
                let row = &rec.m[i * 20..(i + 1) * 20];
                let sum: f64 = row.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12, "row sum {sum}");
                assert!(row.iter().all(|&v| v > 0.0 && v < 1.0));
            }
        }
    }

    #[test]
    fn near_one_hot_after_annealing_regime() {
        // tau <= 0.01 with clear logit gaps: every row max should pass
        // 0.99. The noise law -log(-log(u)), u in (0, 0.15], spreads over
        // roughly two units, so gaps below ~2 can still flip a draw.
        let mut rng = Rng::new(12, 0);
        let mut rows = Vec::new();
        for i in 0..5 {
            let mut row = vec![0.0; 15];
            row[i * 3] = 2.5 + i as f64 * 0.5;
            rows.push(row);
        }
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let layer = layer_from(&refs, 0.01);
        let x = vec![1.0; 15];
        for _ in 0..200 {
            let (_, rec) = layer.forward_train(&x, &mut rng).unwrap();
            for i in 0..5 {
                let row = &rec.m[i * 15..(i + 1) * 15];
                let max = row.iter().cloned().fold(0.0, f64::max);
                assert!(max >= 0.99, "row {i} max entry {max}");
            }
        }
    }

    #[test]
    fn infer_reads_argmax_bands() {
        let layer = layer_from(&[&[0.0, 5.0, 1.0]], 1.5);
        let x = [9.0, 8.0, 7.0];
        assert_eq!(layer.forward_infer(&x).unwrap(), vec![8.0]);
        assert_eq!(
            layer.forward_infer(&x).unwrap(),
            layer.forward_infer(&x).unwrap()
        );
    }

    #[test]
    fn infer_invariant_under_row_shift() {
        let base = layer_from(&[&[0.3, 2.0, -1.0], &[1.0, 0.0, 0.5]], 1.5);
        let shifted = layer_from(&[&[100.3, 102.0, 99.0], &[1.0, 0.0, 0.5]], 1.5);
        let x = [4.0, 5.0, 6.0];
        assert_eq!(
            base.forward_infer(&x).unwrap(),
            shifted.forward_infer(&x).unwrap()
        );
    }

    #[test]
    fn infer_depends_only_on_row_argmaxes() {
        let a = layer_from(&[&[0.0, 3.0, 1.0], &[2.0, 0.0, 1.0]], 1.5);
        let b = layer_from(&[&[-5.0, 9.9, 0.0], &[7.0, 6.9, 6.8]], 1.5);
        let mut rng = Rng::new(2, 0);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.next_f64() * 10.0).collect();
            assert_eq!(a.forward_infer(&x).unwrap(), b.forward_infer(&x).unwrap());
        }
    }

    #[test]
    fn backward_zero_upstream_gives_zero_grad() {
        let layer = layer_from(&[&[0.1, 0.2, 0.3], &[0.3, 0.2, 0.1]], 1.5);
        let x = [1.0, 2.0, 3.0];
        let mut rng = Rng::new(1, 0);
        let (_, rec) = layer.forward_train(&x, &mut rng).unwrap();
        let grad = layer.backward(&rec, &x, &[0.0, 0.0]).unwrap();
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn backward_rows_sum_to_zero() {
        let mut rng = Rng::new(14, 0);
        for _ in 0..50 {
            let layer =
                ConcreteLayer::new(3, 10, 0.7, 0.99998, 0.15, LogitsInit::Plain, &mut rng).unwrap();
            let x: Vec<f64> = (0..10).map(|_| (rng.next_f64() - 0.5) * 6.0).collect();
            let (_, rec) = layer.forward_train(&x, &mut rng).unwrap();
            let grad_out: Vec<f64> = (0..3).map(|_| (rng.next_f64() - 0.5) * 2.0).collect();
            let grad = layer.backward(&rec, &x, &grad_out).unwrap();
            for i in 0..3 {
                let row_sum: f64 = grad[i * 10..(i + 1) * 10].iter().sum();
                assert!(row_sum.abs() < 1e-10, "grad row {i} sums to {row_sum}");
            }
        }
    }

    #[test]
    fn backward_matches_finite_differences_with_frozen_noise() {
        // Objective: sum_i grad_out_i * output_i(L) with G fixed.
        let mut rng = Rng::new(21, 0);
        for trial in 0..50 {
            let (k, n) = (3, 7);
            let layer =
                ConcreteLayer::new(k, n, 0.8, 0.99998, 0.15, LogitsInit::Segmented, &mut rng)
                    .unwrap();
            let x: Vec<f64> = (0..n).map(|_| (rng.next_f64() - 0.5) * 4.0).collect();
            let grad_out: Vec<f64> = (0..k).map(|_| (rng.next_f64() - 0.5) * 2.0).collect();
            let (_, rec) = layer.forward_train(&x, &mut rng).unwrap();
            let analytic = layer.backward(&rec, &x, &grad_out).unwrap();

            let objective = |logits: &[f64]| {
                let probe = ConcreteLayer::from_logits(
                    logits.to_vec(),
                    k,
                    n,
                    layer.tau(),
                    0.99998,
                    0.15,
                )
                .unwrap();
                let (out, _) = probe.forward_with_noise(&x, &rec.g).unwrap();
                out.iter().zip(&grad_out).map(|(o, g)| o * g).sum::<f64>()
            };
            let h = 1e-6;
            for p in 0..k * n {
                let mut plus = layer.logits().to_vec();
                let mut minus = layer.logits().to_vec();
                plus[p] += h;
                minus[p] -= h;
                let fd = (objective(&plus) - objective(&minus)) / (2.0 * h);
                let denom = fd.abs().max(analytic[p].abs()).max(1e-8);
                assert!(
                    ((fd - analytic[p]) / denom).abs() < 1e-5,
                    "trial {trial} L[{p}]: fd {fd} vs analytic {}",
                    analytic[p]
                );
            }
        }
    }

    #[test]
    fn annealing_follows_closed_form() {
        let mut rng = Rng::new(0, 0);
        let mut layer =
            ConcreteLayer::new(2, 6, 1.5, 0.99998, 0.15, LogitsInit::Plain, &mut rng).unwrap();
        for _ in 0..1000 {
            layer.anneal_temperature();
        }
        let expected = 1.5 * 0.99998f64.powi(1000);
        assert!(
            ((layer.tau() - expected) / expected).abs() < 1e-9,
            "tau {} vs closed form {}",
            layer.tau(),
            expected
        );
        assert!((expected - 1.470298).abs() < 1e-6);
        assert!(layer.tau() > 0.0);
    }

    #[test]
    fn alpha_one_is_rejected() {
        let mut rng = Rng::new(0, 0);
        assert!(ConcreteLayer::new(2, 6, 1.5, 1.0, 0.15, LogitsInit::Plain, &mut rng).is_err());
    }

    #[test]
    fn selected_bands_dedups_and_reports() {
        let rows: Vec<Vec<f64>> = vec![
            {
                let mut r = vec![0.0; 12];
                r[4] = 1.0;
                r
            },
            {
                let mut r = vec![0.0; 12];
                r[9] = 1.0;
                r
            },
            {
                let mut r = vec![0.0; 12];
                r[4] = 1.0;
                r
            },
        ];
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let layer = layer_from(&refs, 1.5);
        let (sel, report) = layer.selected_bands();
        assert_eq!(sel.indices(), &[4, 9]);
        assert_eq!(report.row_picks, vec![4, 9, 4]);
        assert_eq!(report.distinct, 2);
        assert!(report.collapsed);
    }

    #[test]
    fn fresh_segmented_init_usually_covers_k_distinct_bands() {
        let (k, n) = (5, 25);
        let mut hits = 0;
        for seed in 0..100 {
            let mut rng = Rng::new(seed, 0);
            let layer =
                ConcreteLayer::new(k, n, 1.5, 0.99998, 0.15, LogitsInit::Segmented, &mut rng)
                    .unwrap();
            let (_, report) = layer.selected_bands();
            if report.distinct == k {
                hits += 1;
            }
        }
        assert!(hits >= 90, "only {hits}/100 seeds gave k distinct bands");
    }

    #[test]
    fn single_selector_selects_single_band() {
        let layer = layer_from(&[&[0.0, 0.7, 0.1]], 1.5);
        let (sel, report) = layer.selected_bands();
        assert_eq!(sel.indices(), &[1]);
        assert_eq!(report.distinct, 1);
        assert!(!report.collapsed);
    }

    #[test]
    fn shape_errors() {
        let layer = layer_from(&[&[0.0, 1.0, 2.0]], 1.5);
        let mut rng = Rng::new(0, 0);
        assert!(layer.forward_train(&[1.0, 2.0], &mut rng).is_err());
        assert!(layer.forward_infer(&[1.0, 2.0, 3.0, 4.0]).is_err());
        assert!(ConcreteLayer::from_logits(vec![0.0; 5], 2, 3, 1.5, 0.9, 0.15).is_err());
        assert!(ConcreteLayer::from_logits(vec![0.0; 6], 4, 3, 1.5, 0.9, 0.15).is_err());
    }
}
