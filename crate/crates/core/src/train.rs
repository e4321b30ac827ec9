//! Joint training of a selector layer and the dense classifier by
//! minibatch gradient descent, plus baseline selectors and k-fold
//! cross-validation.
//!
//! Every source of randomness is a fixed substream of the config seed, so
//! a run is bitwise reproducible and parallel fold execution cannot change
//! any result.

use crate::concrete::{ConcreteLayer, LogitsInit};
use crate::data::{kfold_indices, variance_rank, Dataset};
use crate::error::{Error, Result};
use crate::gate::{lambda_for_k, GateLayer};
use crate::metrics::ConfusionMatrix;
use crate::net::{weighted_cross_entropy, Classifier, LossSpec};
use crate::optim::{Optimizer, OptimizerKind};
use crate::rng::{derive_seed, Rng};
use crate::selection::BandSelection;
use std::io::Write;

// Substream ids. Each consumer of randomness owns one stream of the run
// seed; adding a consumer must use a fresh id to keep old runs replayable.
const STREAM_NET_INIT: u64 = 10;
const STREAM_SELECTOR_INIT: u64 = 11;
const STREAM_SHUFFLE: u64 = 12;
const STREAM_NOISE: u64 = 13;
const STREAM_BASELINE: u64 = 14;
const STREAM_PHASE2_NET: u64 = 15;
const STREAM_KFOLD: u64 = 16;
const STREAM_PROJECTION_SHUFFLE: u64 = 17;

/// Band-selection method of a training run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Chbs,
    Ehbs,
    AllBands,
    RandomK,
    VarianceK,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Chbs => "chbs",
            Method::Ehbs => "ehbs",
            Method::AllBands => "all-bands",
            Method::RandomK => "random-k",
            Method::VarianceK => "variance-k",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chbs" => Ok(Method::Chbs),
            "ehbs" => Ok(Method::Ehbs),
            "all-bands" => Ok(Method::AllBands),
            "random-k" => Ok(Method::RandomK),
            "variance-k" => Ok(Method::VarianceK),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}' (expected chbs|ehbs|all-bands|random-k|variance-k)"
            ))),
        }
    }
}

/// Full recipe for one training run. `new` fills in the stock
/// hyperparameters (sigma = 0.5, mu0 = 0.5, tau0 = 1.5, alpha = 0.99998,
/// beta = 0.15); everything is a plain field so callers override freely.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub method: Method,
    pub k: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub hidden: Vec<usize>,
    // Concrete selector knobs.
    pub tau0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub init: LogitsInit,
    // Stochastic gate knobs.
    pub sigma: f64,
    pub mu0: f64,
    pub lambda0: f64,
    pub phase2_epochs: Option<usize>,
    // General.
    pub weighted_loss: bool,
    pub standardize: bool,
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(method: Method, k: usize) -> Self {
        TrainConfig {
            method,
            k,
            epochs: 30,
            batch_size: 256,
            learning_rate: 1e-3,
            optimizer: OptimizerKind::Adam,
            hidden: vec![64, 32],
            tau0: 1.5,
            alpha: 0.99998,
            beta: 0.15,
            init: LogitsInit::Segmented,
            sigma: 0.5,
            mu0: 0.5,
            lambda0: 0.5,
            phase2_epochs: None,
            weighted_loss: false,
            standardize: false,
            seed: 0,
        }
    }

    pub fn validate(&self, n_bands: usize, _n_classes: usize) -> Result<()> {
        if self.k == 0 || self.k > n_bands {
            return Err(Error::InvalidConfig(format!(
                "k must satisfy 1 <= k <= {n_bands}, got {}",
                self.k
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if self.hidden.contains(&0) {
            return Err(Error::InvalidConfig("hidden widths must be >= 1".into()));
        }
        match self.method {
            Method::Chbs => {
                if !(self.tau0 > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "tau must be > 0, got {}",
                        self.tau0
                    )));
                }
                if !(self.alpha > 0.0 && self.alpha < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "alpha must lie in (0, 1), got {}",
                        self.alpha
                    )));
                }
                if !(self.beta > 0.0 && self.beta < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "beta must lie in (0, 1), got {}",
                        self.beta
                    )));
                }
            }
            Method::Ehbs => {
                if !(self.sigma > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "sigma must be > 0, got {}",
                        self.sigma
                    )));
                }
                if !(self.lambda0 > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "lambda0 must be > 0, got {}",
                        self.lambda0
                    )));
                }
                if self.epochs < 2 {
                    return Err(Error::InvalidConfig(
                        "the two-phase gate schedule needs epochs >= 2".into(),
                    ));
                }
                let (p1, p2) = self.phase_split();
                if p1 == 0 || p2 == 0 {
                    return Err(Error::InvalidConfig(format!(
                        "phase split ({p1}, {p2}) leaves an empty phase"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// (soft-gate epochs, fine-tune epochs). Defaults to an 80/20 split
    /// with at least one epoch in each phase.
    pub fn phase_split(&self) -> (usize, usize) {
        let p2 = self
            .phase2_epochs
            .unwrap_or_else(|| (self.epochs / 5).max(1))
            .min(self.epochs.saturating_sub(1));
        (self.epochs - p2, p2)
    }
}

/// Distinct-band shortfall observed at the end of an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollapseEvent {
    pub epoch: usize,
    pub distinct: usize,
}

/// What a training run recorded: per-epoch objective and validation OA,
/// the per-epoch selected bands, collapse events, and the final selection.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epoch_loss: Vec<f64>,
    pub epoch_val_oa: Vec<f64>,
    pub trajectory: Vec<Vec<usize>>,
    pub collapse_events: Vec<CollapseEvent>,
    pub selection: BandSelection,
    /// First fine-tune epoch for the two-phase gate schedule.
    pub phase_boundary: Option<usize>,
}

impl TrainReport {
    /// True when the per-epoch objective never increased.
    pub fn loss_non_increasing(&self) -> bool {
        self.epoch_loss.windows(2).all(|w| w[1] <= w[0] + 1e-12)
    }
}

/// A finished run: the classifier, the band selection, and the exact input
/// projection the classifier was trained on (the selector rows' picks for
/// the concrete method, the selection itself otherwise).
#[derive(Debug, Clone)]
pub struct Trained {
    pub classifier: Classifier,
    pub selection: BandSelection,
    pub projection: Vec<usize>,
    pub normalizer: Option<(Vec<f64>, Vec<f64>)>,
    pub report: TrainReport,
}

impl Trained {
    /// Predict the class of one full spectrum via the inference path.
    pub fn predict(&self, spectrum: &[f64]) -> Result<usize> {
        let input = self.project(spectrum);
        self.classifier.predict(&input)
    }

    fn project(&self, spectrum: &[f64]) -> Vec<f64> {
        match &self.normalizer {
            Some((mean, std)) => self
                .projection
                .iter()
                .map(|&j| {
                    let s = if std[j] > 0.0 { std[j] } else { 1.0 };
                    (spectrum[j] - mean[j]) / s
                })
                .collect(),
            None => self.projection.iter().map(|&j| spectrum[j]).collect(),
        }
    }

    /// Confusion matrix of the run's classifier over a dataset.
    pub fn evaluate(&self, data: &Dataset) -> Result<ConfusionMatrix> {
        let mut cm = ConfusionMatrix::new(data.n_classes())?;
        for i in 0..data.len() {
            cm.record(data.label(i), self.predict(data.spectrum(i))?)?;
        }
        Ok(cm)
    }
}

/// Train on `data`; per-epoch validation metrics use `data` itself through
/// the inference path. Use [`train_eval`] for a held-out validation set.
pub fn train(config: &TrainConfig, data: &Dataset) -> Result<Trained> {
    train_eval(config, data, data)
}

/// Train on `train_data`, computing per-epoch validation OA on `val_data`
/// with the deterministic inference path. Fully reproducible from
/// `config.seed`.
pub fn train_eval(config: &TrainConfig, train_data: &Dataset, val_data: &Dataset) -> Result<Trained> {
    config.validate(train_data.n_bands(), train_data.n_classes())?;
    if val_data.n_bands() != train_data.n_bands() {
        return Err(Error::ShapeMismatch {
            expected: train_data.n_bands(),
            got: val_data.n_bands(),
        });
    }

    // Baseline selections rank the raw training data; standardized bands
    // all have unit variance.
    let baseline_selection = match config.method {
        Method::AllBands => Some(BandSelection::all(train_data.n_bands())),
        Method::RandomK => {
            let mut rng = Rng::new(config.seed, STREAM_BASELINE);
            let picks = rng.sample_distinct(train_data.n_bands(), config.k);
            Some(BandSelection::new(picks, train_data.n_bands())?)
        }
        Method::VarianceK => {
            let ranked = variance_rank(train_data)?;
            Some(BandSelection::new(
                ranked[..config.k].to_vec(),
                train_data.n_bands(),
            )?)
        }
        Method::Chbs | Method::Ehbs => None,
    };

    // Standardization statistics come from the training split only.
    let normalizer = if config.standardize {
        Some(train_data.band_stats())
    } else {
        None
    };
    let (train_std, val_std);
    let (train_data, val_data) = match &normalizer {
        Some((mean, std)) => {
            train_std = train_data.standardized(mean, std)?;
            val_std = val_data.standardized(mean, std)?;
            (&train_std, &val_std)
        }
        None => (train_data, val_data),
    };

    let loss_spec = if config.weighted_loss {
        LossSpec::inverse_frequency(&train_data.class_counts())
    } else {
        LossSpec::uniform(train_data.n_classes())
    };

    let mut trained = match (config.method, baseline_selection) {
        (Method::Chbs, _) => train_chbs(config, train_data, val_data, &loss_spec)?,
        (Method::Ehbs, _) => train_ehbs(config, train_data, val_data, &loss_spec)?,
        (_, Some(selection)) => {
            train_on_selection(config, train_data, val_data, &loss_spec, selection)?
        }
        (_, None) => unreachable!("baseline methods always produce a selection"),
    };
    trained.normalizer = normalizer;
    Ok(trained)
}

fn net_dims(input: usize, hidden: &[usize], classes: usize) -> Vec<usize> {
    let mut dims = Vec::with_capacity(hidden.len() + 2);
    dims.push(input);
    dims.extend_from_slice(hidden);
    dims.push(classes);
    dims
}

fn accuracy<F: FnMut(&[f64]) -> Result<usize>>(data: &Dataset, mut predict: F) -> Result<f64> {
    let mut correct = 0usize;
    for i in 0..data.len() {
        if predict(data.spectrum(i))? == data.label(i) {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}

fn train_chbs(
    config: &TrainConfig,
    train_data: &Dataset,
    val_data: &Dataset,
    loss_spec: &LossSpec,
) -> Result<Trained> {
    let n = train_data.n_bands();
    let k = config.k;
    let mut layer = ConcreteLayer::new(
        k,
        n,
        config.tau0,
        config.alpha,
        config.beta,
        config.init,
        &mut Rng::new(config.seed, STREAM_SELECTOR_INIT),
    )?;
    let mut net = Classifier::new(
        net_dims(k, &config.hidden, train_data.n_classes()),
        &mut Rng::new(config.seed, STREAM_NET_INIT),
    )?;
    let mut opt_sel = Optimizer::new(config.optimizer, config.learning_rate, k * n);
    let mut opt_net = Optimizer::new(config.optimizer, config.learning_rate, net.num_params());
    let mut shuffle_rng = Rng::new(config.seed, STREAM_SHUFFLE);
    let mut noise_rng = Rng::new(config.seed, STREAM_NOISE);

    let mut report = TrainReport {
        epoch_loss: Vec::with_capacity(config.epochs),
        epoch_val_oa: Vec::with_capacity(config.epochs),
        trajectory: Vec::with_capacity(config.epochs),
        collapse_events: Vec::new(),
        selection: BandSelection::all(0),
        phase_boundary: None,
    };

    let m = train_data.len();
    let mut order: Vec<usize> = (0..m).collect();
    let mut sel_grad = vec![0.0; k * n];
    let mut net_grad = vec![0.0; net.num_params()];
    for epoch in 0..config.epochs {
        shuffle_rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(config.batch_size) {
            sel_grad.iter_mut().for_each(|g| *g = 0.0);
            net_grad.iter_mut().for_each(|g| *g = 0.0);
            let mut batch_loss = 0.0;
            for &i in batch {
                let x = train_data.spectrum(i);
                let (compressed, rec) = layer.forward_train(x, &mut noise_rng)?;
                let (logits, cache) = net.forward_cached(&compressed)?;
                let (loss, dlogits) =
                    weighted_cross_entropy(&logits, train_data.label(i), loss_spec)?;
                let (ngrads, dinput) = net.backward(&cache, &dlogits)?;
                let lgrads = layer.backward(&rec, x, &dinput)?;
                batch_loss += loss;
                for (acc, g) in net_grad.iter_mut().zip(&ngrads) {
                    *acc += g;
                }
                for (acc, g) in sel_grad.iter_mut().zip(&lgrads) {
                    *acc += g;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            sel_grad.iter_mut().for_each(|g| *g *= scale);
            net_grad.iter_mut().for_each(|g| *g *= scale);
            opt_sel.step(layer.logits_mut(), &sel_grad);
            opt_net.step(net.params_mut(), &net_grad);
            layer.anneal_temperature();
            loss_sum += batch_loss * scale;
            batches += 1;
        }
        report.epoch_loss.push(loss_sum / batches as f64);

        let val_oa = accuracy(val_data, |x| {
            let compressed = layer.forward_infer(x)?;
            net.predict(&compressed)
        })?;
        report.epoch_val_oa.push(val_oa);

        let (sel, sel_report) = layer.selected_bands();
        report.trajectory.push(sel.indices().to_vec());
        if sel_report.collapsed {
            report.collapse_events.push(CollapseEvent {
                epoch,
                distinct: sel_report.distinct,
            });
        }
    }

    let (selection, sel_report) = layer.selected_bands();
    report.selection = selection.clone();
    Ok(Trained {
        classifier: net,
        selection,
        projection: sel_report.row_picks,
        normalizer: None,
        report,
    })
}

fn train_ehbs(
    config: &TrainConfig,
    train_data: &Dataset,
    val_data: &Dataset,
    loss_spec: &LossSpec,
) -> Result<Trained> {
    let n = train_data.n_bands();
    let lambda = lambda_for_k(config.lambda0, n, config.k)?;
    let mut gate = GateLayer::new(n, config.mu0, config.sigma, lambda)?;
    let mut net = Classifier::new(
        net_dims(n, &config.hidden, train_data.n_classes()),
        &mut Rng::new(config.seed, STREAM_NET_INIT),
    )?;
    let mut opt_mu = Optimizer::new(config.optimizer, config.learning_rate, n);
    let mut opt_net = Optimizer::new(config.optimizer, config.learning_rate, net.num_params());
    let mut shuffle_rng = Rng::new(config.seed, STREAM_SHUFFLE);
    let mut noise_rng = Rng::new(config.seed, STREAM_NOISE);

    let (phase1, phase2) = config.phase_split();
    let mut report = TrainReport {
        epoch_loss: Vec::with_capacity(config.epochs),
        epoch_val_oa: Vec::with_capacity(config.epochs),
        trajectory: Vec::with_capacity(config.epochs),
        collapse_events: Vec::new(),
        selection: BandSelection::all(0),
        phase_boundary: Some(phase1),
    };

    let m = train_data.len();
    let mut order: Vec<usize> = (0..m).collect();
    let mut mu_grad = vec![0.0; n];
    let mut net_grad = vec![0.0; net.num_params()];
    for _epoch in 0..phase1 {
        shuffle_rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(config.batch_size) {
            mu_grad.iter_mut().for_each(|g| *g = 0.0);
            net_grad.iter_mut().for_each(|g| *g = 0.0);
            let mut batch_loss = 0.0;
            for &i in batch {
                let x = train_data.spectrum(i);
                let (masked, rec) = gate.forward_train(x, &mut noise_rng)?;
                let (logits, cache) = net.forward_cached(&masked)?;
                let (loss, dlogits) =
                    weighted_cross_entropy(&logits, train_data.label(i), loss_spec)?;
                let (ngrads, dinput) = net.backward(&cache, &dlogits)?;
                // Includes the regularizer gradient once per sample; after
                // batch averaging that is exactly d(mean loss + R)/d mu.
                let ggrads = gate.backward(&rec, x, &dinput)?;
                batch_loss += loss;
                for (acc, g) in net_grad.iter_mut().zip(&ngrads) {
                    *acc += g;
                }
                for (acc, g) in mu_grad.iter_mut().zip(&ggrads) {
                    *acc += g;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            mu_grad.iter_mut().for_each(|g| *g *= scale);
            net_grad.iter_mut().for_each(|g| *g *= scale);
            loss_sum += batch_loss * scale + gate.regularizer();
            opt_mu.step(gate.mu_mut(), &mu_grad);
            opt_net.step(net.params_mut(), &net_grad);
            batches += 1;
        }
        report.epoch_loss.push(loss_sum / batches as f64);

        let val_oa = accuracy(val_data, |x| {
            let masked = gate.forward_infer(x)?;
            net.predict(&masked)
        })?;
        report.epoch_val_oa.push(val_oa);
        report
            .trajectory
            .push(gate.select_top_k(config.k)?.indices().to_vec());
    }

    // Phase 2: freeze the top-k selection, rebuild the classifier at width
    // k, fine-tune on the selected bands only.
    let selection = gate.select_top_k(config.k)?;
    let mut phase2_config = config.clone();
    phase2_config.epochs = phase2;
    let sub = train_classifier_on_projection(
        &phase2_config,
        train_data,
        val_data,
        loss_spec,
        &selection,
        STREAM_PHASE2_NET,
    )?;
    report.epoch_loss.extend(sub.epoch_loss);
    report.epoch_val_oa.extend(sub.epoch_val_oa);
    for _ in 0..phase2 {
        report.trajectory.push(selection.indices().to_vec());
    }
    report.selection = selection.clone();
    Ok(Trained {
        classifier: sub.classifier,
        projection: selection.indices().to_vec(),
        selection,
        normalizer: None,
        report,
    })
}

struct ClassifierRun {
    classifier: Classifier,
    epoch_loss: Vec<f64>,
    epoch_val_oa: Vec<f64>,
}

/// Plain classifier training on a fixed band projection.
fn train_classifier_on_projection(
    config: &TrainConfig,
    train_data: &Dataset,
    val_data: &Dataset,
    loss_spec: &LossSpec,
    selection: &BandSelection,
    net_stream: u64,
) -> Result<ClassifierRun> {
    let train_proj = train_data.select_bands(selection)?;
    let val_proj = val_data.select_bands(selection)?;
    let mut net = Classifier::new(
        net_dims(selection.len(), &config.hidden, train_data.n_classes()),
        &mut Rng::new(config.seed, net_stream),
    )?;
    let mut opt = Optimizer::new(config.optimizer, config.learning_rate, net.num_params());
    let mut shuffle_rng = Rng::new(config.seed, STREAM_PROJECTION_SHUFFLE);

    let m = train_proj.len();
    let mut order: Vec<usize> = (0..m).collect();
    let mut grad = vec![0.0; net.num_params()];
    let mut epoch_loss = Vec::with_capacity(config.epochs);
    let mut epoch_val_oa = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        shuffle_rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut batch_loss = 0.0;
            for &i in batch {
                let (logits, cache) = net.forward_cached(train_proj.spectrum(i))?;
                let (loss, dlogits) =
                    weighted_cross_entropy(&logits, train_proj.label(i), loss_spec)?;
                let (ngrads, _) = net.backward(&cache, &dlogits)?;
                batch_loss += loss;
                for (acc, g) in grad.iter_mut().zip(&ngrads) {
                    *acc += g;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            opt.step(net.params_mut(), &grad);
            loss_sum += batch_loss * scale;
            batches += 1;
        }
        epoch_loss.push(loss_sum / batches as f64);
        epoch_val_oa.push(accuracy(&val_proj, |x| net.predict(x))?);
    }
    Ok(ClassifierRun {
        classifier: net,
        epoch_loss,
        epoch_val_oa,
    })
}

fn train_on_selection(
    config: &TrainConfig,
    train_data: &Dataset,
    val_data: &Dataset,
    loss_spec: &LossSpec,
    selection: BandSelection,
) -> Result<Trained> {
    let run = train_classifier_on_projection(
        config,
        train_data,
        val_data,
        loss_spec,
        &selection,
        STREAM_NET_INIT,
    )?;
    let report = TrainReport {
        epoch_loss: run.epoch_loss,
        epoch_val_oa: run.epoch_val_oa,
        trajectory: (0..config.epochs)
            .map(|_| selection.indices().to_vec())
            .collect(),
        collapse_events: Vec::new(),
        selection: selection.clone(),
        phase_boundary: None,
    };
    Ok(Trained {
        classifier: run.classifier,
        projection: selection.indices().to_vec(),
        selection,
        normalizer: None,
        report,
    })
}

/// One fold's validation metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldMetrics {
    pub fold: usize,
    pub oa: f64,
    pub aa: f64,
    pub kappa: f64,
    pub mean_iou: f64,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub selection: BandSelection,
}

impl FoldMetrics {
    /// (metric name, value) pairs in report order.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("oa", self.oa),
            ("aa", self.aa),
            ("kappa", self.kappa),
            ("mean_iou", self.mean_iou),
            ("mean_precision", self.mean_precision),
            ("mean_recall", self.mean_recall),
        ]
    }
}

/// Mean and sample standard deviation of one metric across folds.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub metric: &'static str,
    pub mean: f64,
    pub std: f64,
}

/// Per-fold metric table plus mean +/- std rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValReport {
    pub folds: Vec<FoldMetrics>,
    pub summary: Vec<MetricSummary>,
}

/// K-fold cross-validation with the worker pool sized from the
/// BANDGATE_THREADS environment variable (available parallelism otherwise).
pub fn kfold_cross_validate(
    config: &TrainConfig,
    data: &Dataset,
    folds: usize,
) -> Result<CrossValReport> {
    kfold_cross_validate_with_threads(config, data, folds, default_threads())
}

/// K-fold cross-validation on an explicit worker count. Fold f trains with
/// seed derive_seed(config.seed, f + 1) and its own data split, so the
/// aggregated report is byte-identical for any thread count.
pub fn kfold_cross_validate_with_threads(
    config: &TrainConfig,
    data: &Dataset,
    folds: usize,
    threads: usize,
) -> Result<CrossValReport> {
    let mut split_rng = Rng::new(config.seed, STREAM_KFOLD);
    let fold_indices = kfold_indices(data.len(), folds, &mut split_rng)?;

    let results = run_jobs(folds, threads, |f| -> Result<FoldMetrics> {
        let val_idx = &fold_indices[f];
        let mut train_idx = Vec::with_capacity(data.len() - val_idx.len());
        for (g, fold) in fold_indices.iter().enumerate() {
            if g != f {
                train_idx.extend_from_slice(fold);
            }
        }
        let train_set = data.subset(&train_idx)?;
        let val_set = data.subset(val_idx)?;
        let mut fold_config = config.clone();
        fold_config.seed = derive_seed(config.seed, f as u64 + 1);
        let trained = train_eval(&fold_config, &train_set, &val_set)?;
        let cm = trained.evaluate(&val_set)?;
        let scores = cm.class_scores()?;
        Ok(FoldMetrics {
            fold: f,
            oa: cm.overall_accuracy()?,
            aa: cm.average_accuracy()?.value,
            kappa: cm.kappa()?.value,
            mean_iou: scores.mean_iou,
            mean_precision: scores.mean_precision,
            mean_recall: scores.mean_recall,
            selection: trained.selection,
        })
    });

    let mut fold_metrics = Vec::with_capacity(folds);
    for r in results {
        fold_metrics.push(r?);
    }

    let names = ["oa", "aa", "kappa", "mean_iou", "mean_precision", "mean_recall"];
    let summary = names
        .iter()
        .enumerate()
        .map(|(i, &metric)| {
            let values: Vec<f64> = fold_metrics.iter().map(|fm| fm.named()[i].1).collect();
            let (mean, std) = mean_std(&values);
            MetricSummary { metric, mean, std }
        })
        .collect();
    Ok(CrossValReport {
        folds: fold_metrics,
        summary,
    })
}

/// Mean and sample standard deviation (n - 1 denominator; 0 for n = 1).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Worker pool size: BANDGATE_THREADS if set, else available parallelism.
pub fn default_threads() -> usize {
    if let Ok(v) = std::env::var("BANDGATE_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Run `count` indexed jobs on up to `threads` workers and return results
/// in job order. Job i's output depends only on i, so scheduling cannot
/// change the merged result.
pub fn run_jobs<R, F>(count: usize, threads: usize, job: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let workers = threads.max(1).min(count.max(1));
    if workers <= 1 {
        return (0..count).map(&job).collect();
    }
    let mut slots: Vec<Option<R>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let job = &job;
                scope.spawn(move || {
                    let mut mine = Vec::new();
                    let mut i = w;
                    while i < count {
                        mine.push((i, job(i)));
                        i += workers;
                    }
                    mine
                })
            })
            .collect();
        for handle in handles {
            for (i, r) in handle.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}

/// Progression CSV: epoch, loss, val_oa, selected_bands (semicolon-joined).
pub fn write_progression_csv<W: Write>(report: &TrainReport, mut out: W) -> Result<()> {
    writeln!(out, "epoch,loss,val_oa,selected_bands")?;
    for e in 0..report.epoch_loss.len() {
        let bands = report.trajectory[e]
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(
            out,
            "{},{},{},{}",
            e + 1,
            report.epoch_loss[e],
            report.epoch_val_oa[e],
            bands
        )?;
    }
    Ok(())
}
