//! The `train` and `sweep` commands and their shared flag resolution:
//! flag value, else config-file entry, else built-in default.

use crate::config_file::{merge, FileConfig};
use bandgate::concrete::LogitsInit;
use bandgate::data::load_csv;
use bandgate::error::{Error, Result};
use bandgate::metrics::{bands_auc, BandsCurve};
use bandgate::optim::OptimizerKind;
use bandgate::train::{
    kfold_cross_validate, train, write_progression_csv, Method, TrainConfig,
};
use clap::Args;
use std::io::Write;
use std::path::PathBuf;

#[derive(Args, Debug, Default)]
pub struct HyperArgs {
    /// Optional key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Learning rate.
    #[arg(long)]
    lr: Option<f64>,
    /// sgd or adam.
    #[arg(long)]
    optimizer: Option<OptimizerKind>,
    /// Hidden layer widths, e.g. 64,32 ("none" for a linear model).
    #[arg(long)]
    hidden: Option<String>,
    /// Initial softmax temperature.
    #[arg(long)]
    tau: Option<f64>,
    /// Per-batch temperature decay factor.
    #[arg(long)]
    alpha: Option<f64>,
    /// Gumbel noise scale.
    #[arg(long)]
    beta: Option<f64>,
    /// Logits initialization: segmented or plain.
    #[arg(long)]
    init: Option<LogitsInit>,
    /// Gate noise standard deviation.
    #[arg(long)]
    sigma: Option<f64>,
    /// Initial gate mean.
    #[arg(long)]
    mu0: Option<f64>,
    /// Base regularization weight (scaled by n/k).
    #[arg(long)]
    lambda0: Option<f64>,
    /// Fine-tune epochs for the two-phase gate schedule.
    #[arg(long)]
    phase2_epochs: Option<usize>,
    /// Weight the loss by inverse class frequency.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    weighted: Option<bool>,
    /// Z-score bands with training-fold statistics.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    standardize: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_hidden(text: &str) -> Result<Vec<usize>> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "none" {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad hidden width '{t}'")))
        })
        .collect()
}

impl HyperArgs {
    /// Build the full training config for (method, k).
    pub fn resolve(&self, method: Method, k: usize) -> Result<TrainConfig> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let mut config = TrainConfig::new(method, k);
        if let Some(v) = merge(self.epochs, &file, "epochs")? {
            config.epochs = v;
        }
        if let Some(v) = merge(self.batch_size, &file, "batch-size")? {
            config.batch_size = v;
        }
        if let Some(v) = merge(self.lr, &file, "lr")? {
            config.learning_rate = v;
        }
        if let Some(v) = merge(self.optimizer, &file, "optimizer")? {
            config.optimizer = v;
        }
        let hidden = match &self.hidden {
            Some(text) => Some(text.clone()),
            None => file.raw("hidden").map(str::to_string),
        };
        if let Some(text) = hidden {
            config.hidden = parse_hidden(&text)?;
        }
        if let Some(v) = merge(self.tau, &file, "tau")? {
            config.tau0 = v;
        }
        if let Some(v) = merge(self.alpha, &file, "alpha")? {
            config.alpha = v;
        }
        if let Some(v) = merge(self.beta, &file, "beta")? {
            config.beta = v;
        }
        if let Some(v) = merge(self.init, &file, "init")? {
            config.init = v;
        }
        if let Some(v) = merge(self.sigma, &file, "sigma")? {
            config.sigma = v;
        }
        if let Some(v) = merge(self.mu0, &file, "mu0")? {
            config.mu0 = v;
        }
        if let Some(v) = merge(self.lambda0, &file, "lambda0")? {
            config.lambda0 = v;
        }
        if let Some(v) = merge(self.phase2_epochs, &file, "phase2-epochs")? {
            config.phase2_epochs = Some(v);
        }
        if let Some(v) = merge(self.weighted, &file, "weighted")? {
            config.weighted_loss = v;
        }
        if let Some(v) = merge(self.standardize, &file, "standardize")? {
            config.standardize = v;
        }
        if let Some(v) = merge(self.seed, &file, "seed")? {
            config.seed = v;
        }
        Ok(config)
    }
}

/// One-line echo of every effective setting, flag-named keys.
pub fn config_echo(config: &TrainConfig) -> String {
    let hidden = if config.hidden.is_empty() {
        "none".to_string()
    } else {
        config
            .hidden
            .iter()
            .map(|h| h.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let init = match config.init {
        LogitsInit::Segmented => "segmented",
        LogitsInit::Plain => "plain",
    };
    let optimizer = match config.optimizer {
        OptimizerKind::Sgd => "sgd",
        OptimizerKind::Adam => "adam",
    };
    let phase2 = match config.phase2_epochs {
        Some(v) => v.to_string(),
        None => "auto".to_string(),
    };
    format!(
        "config: method={} k={} epochs={} batch-size={} lr={} optimizer={optimizer} hidden={hidden} \
         tau={} alpha={} beta={} init={init} sigma={} mu0={} lambda0={} phase2-epochs={phase2} \
         weighted={} standardize={} seed={}",
        config.method,
        config.k,
        config.epochs,
        config.batch_size,
        config.learning_rate,
        config.tau0,
        config.alpha,
        config.beta,
        config.sigma,
        config.mu0,
        config.lambda0,
        config.weighted_loss,
        config.standardize,
        config.seed,
    )
}

#[derive(Args)]
pub struct TrainArgs {
    /// Dataset CSV path.
    #[arg(long)]
    data: PathBuf,
    /// Selection method: chbs, ehbs, all-bands, random-k, variance-k.
    #[arg(long)]
    method: Option<Method>,
    /// Number of bands to select.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Progression CSV output path.
    #[arg(long, default_value = "progression.csv")]
    out_report: PathBuf,
    /// Model checkpoint output path.
    #[arg(long, default_value = "model.bgnet")]
    out_checkpoint: PathBuf,
}

pub fn cmd_train(args: TrainArgs) -> Result<()> {
    let file = match &args.hyper.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let method = merge(args.method, &file, "method")?
        .ok_or_else(|| Error::InvalidConfig("missing --method (or method= in config)".into()))?;
    let k = merge(args.k, &file, "k")?
        .ok_or_else(|| Error::InvalidConfig("missing --k (or k= in config)".into()))?;
    let config = args.hyper.resolve(method, k)?;

    let data = load_csv(&args.data)?;
    config.validate(data.n_bands(), data.n_classes())?;

    println!("{}", config_echo(&config));
    let trained = train(&config, &data)?;
    if let Some(boundary) = trained.report.phase_boundary {
        println!(
            "phase boundary: {} soft-gate epochs, then {} fine-tune epochs on the top-{} bands",
            boundary,
            config.epochs - boundary,
            config.k
        );
    }
    println!("selected bands: {}", trained.selection);
    let dims = trained
        .classifier
        .dims()
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(" -> ");
    println!(
        "classifier: {dims} ({} parameters)",
        trained.classifier.num_params()
    );

    let mut report_file = std::io::BufWriter::new(std::fs::File::create(&args.out_report)?);
    write_progression_csv(&trained.report, &mut report_file)?;
    report_file.flush()?;
    trained.classifier.save_file(&args.out_checkpoint)?;
    println!("wrote progression to {}", args.out_report.display());
    println!("wrote checkpoint to {}", args.out_checkpoint.display());
    Ok(())
}

#[derive(Args)]
pub struct SweepArgs {
    /// Dataset CSV path.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated methods to sweep.
    #[arg(long)]
    methods: String,
    /// Band budgets: comma list (2,4,6) or inclusive range (2..10).
    #[arg(long)]
    ks: String,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Sweep CSV output path.
    #[arg(long)]
    out: PathBuf,
}

fn parse_methods(text: &str) -> Result<Vec<Method>> {
    let mut methods: Vec<Method> = text
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(Error::InvalidConfig("empty method list".into()));
    }
    methods.sort();
    methods.dedup();
    Ok(methods)
}

fn parse_ks(text: &str) -> Result<Vec<usize>> {
    let trimmed = text.trim();
    let bad = |t: &str| Error::InvalidConfig(format!("bad band budget '{t}'"));
    let mut ks: Vec<usize> = if let Some((lo, hi)) = trimmed.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad(lo))?;
        let hi: usize = hi.trim().parse().map_err(|_| bad(hi))?;
        if lo > hi {
            return Err(Error::InvalidConfig(format!("empty range '{trimmed}'")));
        }
        (lo..=hi).collect()
    } else {
        trimmed
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad(t)))
            .collect::<Result<_>>()?
    };
    if ks.is_empty() {
        return Err(Error::InvalidConfig("empty band budget list".into()));
    }
    ks.sort_unstable();
    ks.dedup();
    Ok(ks)
}

pub fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let methods = parse_methods(&args.methods)?;
    let ks = parse_ks(&args.ks)?;
    let data = load_csv(&args.data)?;

    // Validate every cell up front so a mid-sweep failure cannot leave a
    // partial output file behind.
    let mut cells: Vec<(Method, usize, TrainConfig)> = Vec::new();
    for &method in &methods {
        for &k in &ks {
            let config = args.hyper.resolve(method, k)?;
            config.validate(data.n_bands(), data.n_classes())?;
            cells.push((method, k, config));
        }
    }

    let mut rows: Vec<String> = Vec::new();
    let mut auc_rows: Vec<String> = Vec::new();
    let mut mean_oa: Vec<(Method, usize, f64)> = Vec::new();
    for (method, k, config) in &cells {
        let report = kfold_cross_validate(config, &data, args.folds)?;
        for fm in &report.folds {
            for (name, value) in fm.named() {
                rows.push(format!("{method},{k},{},{name},{value}", fm.fold));
            }
        }
        let oa_mean = report
            .summary
            .iter()
            .find(|s| s.metric == "oa")
            .expect("oa summary present")
            .mean;
        mean_oa.push((*method, *k, oa_mean));
        eprintln!("swept {method} k={k}: mean oa {oa_mean:.4}");
    }

    for &method in &methods {
        let points: Vec<(usize, f64)> = mean_oa
            .iter()
            .filter(|(m, _, _)| *m == method)
            .map(|&(_, k, oa)| (k, oa))
            .collect();
        if points.len() >= 2 {
            let auc = bands_auc(&BandsCurve::new(points)?)?;
            auc_rows.push(format!("{method},,,bands_auc,{auc}"));
        }
    }

    let mut out = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(out, "method,k,fold,metric,value")?;
    for row in &rows {
        writeln!(out, "{row}")?;
    }
    for row in &auc_rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    println!(
        "wrote {} metric rows and {} AUC rows to {}",
        rows.len(),
        auc_rows.len(),
        args.out.display()
    );
    Ok(())
}
