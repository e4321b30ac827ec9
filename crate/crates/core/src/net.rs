//! Dense classifier with explicit forward/backward and weighted
//! cross-entropy, plus a versioned binary checkpoint format.
//!
//! The network is an affine-rectifier stack: hidden layers use a rectifier,
//! the final layer emits raw logits. All weights and biases live in one
//! flat parameter vector so optimizers and checkpoints treat the model as a
//! single block.

use crate::error::{Error, Result};
use crate::math::softmax_row;
use crate::rng::Rng;
use std::io::{Read, Write};
use std::path::Path;

const CHECKPOINT_MAGIC: &[u8; 6] = b"BGNET1";

/// Layer widths `[input, hidden..., classes]` plus the flat parameter
/// vector. Per layer the block layout is weights (out x in, row-major)
/// followed by biases (out).
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    dims: Vec<usize>,
    params: Vec<f64>,
}

/// Post-activation values of every layer input, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct NetCache {
    activations: Vec<Vec<f64>>,
}

/// Per-class loss weights, strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct LossSpec {
    weights: Vec<f64>,
}

impl LossSpec {
    pub fn uniform(classes: usize) -> Self {
        LossSpec {
            weights: vec![1.0; classes],
        }
    }

    /// Inverse class-frequency weights m / (c * count), the usual choice
    /// for imbalanced data. Absent classes count as one sample.
    pub fn inverse_frequency(class_counts: &[usize]) -> Self {
        let m: usize = class_counts.iter().sum();
        let c = class_counts.len();
        LossSpec {
            weights: class_counts
                .iter()
                .map(|&n| m as f64 / (c as f64 * n.max(1) as f64))
                .collect(),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn classes(&self) -> usize {
        self.weights.len()
    }
}

fn param_count(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl Classifier {
    /// Xavier-uniform weights, zero biases. `dims` runs input -> classes.
    pub fn new(dims: Vec<usize>, rng: &mut Rng) -> Result<Self> {
        Self::check_dims(&dims)?;
        let mut params = Vec::with_capacity(param_count(&dims));
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push((rng.next_f64() * 2.0 - 1.0) * a);
            }
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Ok(Classifier { dims, params })
    }

    /// Build from explicit parameters (checkpoint load, tests).
    pub fn with_params(dims: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        Self::check_dims(&dims)?;
        if params.len() != param_count(&dims) {
            return Err(Error::ShapeMismatch {
                expected: param_count(&dims),
                got: params.len(),
            });
        }
        Ok(Classifier { dims, params })
    }

    fn check_dims(dims: &[usize]) -> Result<()> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "classifier dims must have >= 2 nonzero entries, got {dims:?}"
            )));
        }
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_width(&self) -> usize {
        self.dims[0]
    }

    pub fn classes(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Logits for one input. Inference path; no cache.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cached(input)?.0)
    }

    /// Logits plus the activation cache needed by `backward`.
    pub fn forward_cached(&self, input: &[f64]) -> Result<(Vec<f64>, NetCache)> {
        if input.len() != self.dims[0] {
            return Err(Error::ShapeMismatch {
                expected: self.dims[0],
                got: input.len(),
            });
        }
        let layers = self.dims.len() - 1;
        let mut activations = Vec::with_capacity(layers);
        let mut a = input.to_vec();
        let mut offset = 0;
        for l in 0..layers {
            let (fan_in, fan_out) = (self.dims[l], self.dims[l + 1]);
            let weights = &self.params[offset..offset + fan_in * fan_out];
            let biases = &self.params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
            offset += fan_in * fan_out + fan_out;

            let mut z = biases.to_vec();
            for j in 0..fan_out {
                let row = &weights[j * fan_in..(j + 1) * fan_in];
                z[j] += row.iter().zip(&a).map(|(w, x)| w * x).sum::<f64>();
            }
            activations.push(a);
            if l + 1 < layers {
                for v in &mut z {
                    *v = v.max(0.0);
                }
                a = z;
            } else {
                return Ok((z, NetCache { activations }));
            }
        }
        unreachable!("dims guarantee at least one layer");
    }

    /// Reverse-mode gradients for all parameters plus the gradient with
    /// respect to the input (handed to the selector's backward).
    pub fn backward(&self, cache: &NetCache, grad_logits: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let layers = self.dims.len() - 1;
        if cache.activations.len() != layers {
            return Err(Error::ShapeMismatch {
                expected: layers,
                got: cache.activations.len(),
            });
        }
        if grad_logits.len() != self.classes() {
            return Err(Error::ShapeMismatch {
                expected: self.classes(),
                got: grad_logits.len(),
            });
        }
        let mut grads = vec![0.0; self.params.len()];
        let mut layer_offsets = Vec::with_capacity(layers);
        let mut offset = 0;
        for l in 0..layers {
            layer_offsets.push(offset);
            offset += self.dims[l] * self.dims[l + 1] + self.dims[l + 1];
        }

        let mut delta = grad_logits.to_vec();
        for l in (0..layers).rev() {
            let (fan_in, fan_out) = (self.dims[l], self.dims[l + 1]);
            let base = layer_offsets[l];
            let a_prev = &cache.activations[l];
            let weights = &self.params[base..base + fan_in * fan_out];

            let mut grad_prev = vec![0.0; fan_in];
            for j in 0..fan_out {
                let d = delta[j];
                let wrow = &weights[j * fan_in..(j + 1) * fan_in];
                let grow = &mut grads[base + j * fan_in..base + (j + 1) * fan_in];
                for i in 0..fan_in {
                    grow[i] = d * a_prev[i];
                    grad_prev[i] += d * wrow[i];
                }
            }
            for j in 0..fan_out {
                grads[base + fan_in * fan_out + j] = delta[j];
            }
            if l > 0 {
                // Rectifier subgradient: dead units (post-activation 0) pass nothing.
                for i in 0..fan_in {
                    if a_prev[i] <= 0.0 {
                        grad_prev[i] = 0.0;
                    }
                }
            }
            delta = grad_prev;
        }
        Ok((grads, delta))
    }

    /// Predicted class: argmax logit, ties to the lower class index.
    pub fn predict(&self, input: &[f64]) -> Result<usize> {
        let logits = self.forward(input)?;
        let mut best = 0;
        for (j, &v) in logits.iter().enumerate() {
            if v > logits[best] {
                best = j;
            }
        }
        Ok(best)
    }

    /// Serialize: magic "BGNET1", u32 dim count, u32 dims, f64 parameters,
    /// all little-endian.
    pub fn save<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(CHECKPOINT_MAGIC)?;
        out.write_all(&(self.dims.len() as u32).to_le_bytes())?;
        for &d in &self.dims {
            out.write_all(&(d as u32).to_le_bytes())?;
        }
        for &p in &self.params {
            out.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn save_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.save(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn load<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 6];
        input
            .read_exact(&mut magic)
            .map_err(|_| Error::Checkpoint("file too short for magic".into()))?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint(format!(
                "bad magic {:?}, expected {:?}",
                magic, CHECKPOINT_MAGIC
            )));
        }
        let mut u32buf = [0u8; 4];
        input
            .read_exact(&mut u32buf)
            .map_err(|_| Error::Checkpoint("truncated dim count".into()))?;
        let ndims = u32::from_le_bytes(u32buf) as usize;
        if !(2..=64).contains(&ndims) {
            return Err(Error::Checkpoint(format!("implausible dim count {ndims}")));
        }
        let mut dims = Vec::with_capacity(ndims);
        for _ in 0..ndims {
            input
                .read_exact(&mut u32buf)
                .map_err(|_| Error::Checkpoint("truncated dims".into()))?;
            dims.push(u32::from_le_bytes(u32buf) as usize);
        }
        let expected = param_count(&dims);
        let mut params = Vec::with_capacity(expected);
        let mut f64buf = [0u8; 8];
        for _ in 0..expected {
            input
                .read_exact(&mut f64buf)
                .map_err(|_| Error::Checkpoint("truncated parameter block".into()))?;
            params.push(f64::from_le_bytes(f64buf));
        }
        if input.read(&mut [0u8; 1])? != 0 {
            return Err(Error::Checkpoint("trailing bytes after parameters".into()));
        }
        Classifier::with_params(dims, params)
    }

    pub fn load_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::load(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Weighted cross-entropy of one sample, with a numerically stable
/// log-sum-exp. Returns the loss and its gradient with respect to the
/// logits: w_label * (softmax(logits) - onehot(label)).
pub fn weighted_cross_entropy(
    logits: &[f64],
    label: usize,
    spec: &LossSpec,
) -> Result<(f64, Vec<f64>)> {
    let c = logits.len();
    if label >= c {
        return Err(Error::InvalidParameter(format!(
            "label {label} out of range for {c} classes"
        )));
    }
    if spec.classes() != c {
        return Err(Error::ShapeMismatch {
            expected: c,
            got: spec.classes(),
        });
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|&l| (l - max).exp()).sum::<f64>().ln();
    let w = spec.weights()[label];
    let loss = -w * (logits[label] - lse);
    let probs = softmax_row(logits, 1.0)?;
    let grad = probs
        .iter()
        .enumerate()
        .map(|(j, &p)| w * (p - if j == label { 1.0 } else { 0.0 }))
        .collect();
    Ok((loss, grad))
}
