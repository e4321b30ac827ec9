//! Independent verification harness: a finite-difference gradient checker,
//! planted-band recovery scoring, the selector-collapse experiment, and a
//! TAP-style pass/fail stream with a CSV of measured quantities.
//!
//! Everything here calls only public module operations plus its own
//! arithmetic, so it stays independent of the implementation paths it
//! checks.

use crate::concrete::LogitsInit;
use crate::data::{generate, SyntheticSpec};
use crate::error::{Error, Result};
use crate::optim::OptimizerKind;
use crate::rng::derive_seed;
use crate::selection::BandSelection;
use crate::train::{run_jobs, train, Method, TrainConfig};
use std::io::Write;

/// Max discrepancy between central finite differences of `objective` and
/// the supplied analytic gradient, coordinate-wise relative with an
/// absolute fallback below 1e-8 magnitude. The objective must be
/// deterministic (freeze any noise before calling).
pub fn finite_diff_check<F: Fn(&[f64]) -> f64>(
    objective: F,
    point: &[f64],
    analytic: &[f64],
    step: f64,
) -> Result<f64> {
    if analytic.len() != point.len() {
        return Err(Error::ShapeMismatch {
            expected: point.len(),
            got: analytic.len(),
        });
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step must be > 0, got {step}"
        )));
    }
    let mut worst: f64 = 0.0;
    let mut probe = point.to_vec();
    for i in 0..point.len() {
        probe[i] = point[i] + step;
        let plus = objective(&probe);
        probe[i] = point[i] - step;
        let minus = objective(&probe);
        probe[i] = point[i];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "objective non-finite near coordinate {i}"
            )));
        }
        let fd = (plus - minus) / (2.0 * step);
        let scale = fd.abs().max(analytic[i].abs());
        let err = if scale < 1e-8 {
            (fd - analytic[i]).abs()
        } else {
            (fd - analytic[i]).abs() / scale
        };
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Fraction of the planted bands recovered by a selection.
pub fn recovery_score(selected: &BandSelection, planted: &[usize]) -> f64 {
    assert!(!planted.is_empty(), "planted band set must be nonempty");
    let hits = planted.iter().filter(|&&b| selected.contains(b)).count();
    hits as f64 / planted.len() as f64
}

/// The fixed collapse scenario: 30 bands, 6 selectors, and only 3
/// informative bands packed into one tight cluster, so the selector rows
/// have every incentive to pile onto the same few bands.
pub fn collapse_scenario(seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        n_bands: 30,
        n_classes: 4,
        samples: 1536,
        informative: vec![13, 14, 15],
        class_signature_gap: 1.0,
        noise_std: 0.15,
        correlation_width: 2,
        seed,
    }
}

/// Training recipe used by the collapse experiment. Plain SGD: its step
/// sizes follow the softmax-weighted gradient magnitudes, which is what
/// lets an initialization bias matter at all (Adam renormalizes even the
/// faintest cross-segment pull up to full-size steps, so every run
/// collapses regardless of init).
pub fn collapse_config(init: LogitsInit, seed: u64) -> TrainConfig {
    let mut config = TrainConfig::new(Method::Chbs, 6);
    config.epochs = 20;
    config.batch_size = 64;
    config.learning_rate = 0.1;
    config.optimizer = OptimizerKind::Sgd;
    config.standardize = true;
    config.init = init;
    config.seed = seed;
    config
}

/// Distinct-band count after CHBS training, one entry per seed. Runs
/// seeds in parallel on independent substreams.
pub fn collapse_experiment(seeds: &[u64], init: LogitsInit) -> Result<Vec<usize>> {
    let results = run_jobs(seeds.len(), crate::train::default_threads(), |i| {
        let seed = seeds[i];
        let data = generate(&collapse_scenario(derive_seed(seed, 0xDA7A)))?;
        let trained = train(&collapse_config(init, seed), &data)?;
        let mut picks = trained.projection.clone();
        picks.sort_unstable();
        picks.dedup();
        Ok::<usize, Error>(picks.len())
    });
    results.into_iter().collect()
}

/// Accumulates TAP-style check lines plus named measurements, then writes
/// them as a text stream and a CSV.
#[derive(Debug, Default)]
pub struct TapReport {
    checks: Vec<(bool, String)>,
    measurements: Vec<(String, f64)>,
}

impl TapReport {
    pub fn new() -> Self {
        TapReport::default()
    }

    pub fn check(&mut self, passed: bool, description: impl Into<String>) -> bool {
        self.checks.push((passed, description.into()));
        passed
    }

    pub fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measurements.push((name.into(), value));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|(ok, _)| *ok)
    }

    /// TAP stream: plan line, then one ok/not ok line per check.
    pub fn write_tap<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "1..{}", self.checks.len())?;
        for (i, (ok, desc)) in self.checks.iter().enumerate() {
            let status = if *ok { "ok" } else { "not ok" };
            writeln!(out, "{status} {} - {desc}", i + 1)?;
        }
        Ok(())
    }

    /// Measured quantities as `quantity,value` CSV rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "quantity,value")?;
        for (name, value) in &self.measurements {
            writeln!(out, "{name},{value}")?;
        }
        Ok(())
    }
}
