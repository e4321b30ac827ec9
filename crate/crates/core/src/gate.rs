//! Stochastic-gate band selection layer.
//!
//! Each band owns a learnable mean `mu_i`; the training-time gate value is
//! `z_i = clamp01(mu_i + eps_i)` with `eps_i ~ N(0, sigma^2)`, multiplied
//! into the input band. An l0 surrogate `lambda * sum_i Phi(mu_i / sigma)`
//! added to the loss drives gates shut, and the final hard selection takes
//! the top-k bands by `mu`, returned in spectral order.

use crate::error::{Error, Result};
use crate::math::{clamp01, std_normal_cdf, std_normal_pdf};
use crate::rng::Rng;
use crate::selection::BandSelection;

/// Gate layer state. `mu` is the only trainable vector; `sigma` and
/// `lambda` are fixed for the layer's lifetime (lambda may be set once
/// from the k-dependent policy before training).
#[derive(Debug, Clone)]
pub struct GateLayer {
    mu: Vec<f64>,
    sigma: f64,
    lambda: f64,
}

/// What the backward pass needs from a training forward: the realized gate
/// values, the noise that produced them, and which gates were unsaturated.
#[derive(Debug, Clone)]
pub struct GateForwardRecord {
    pub z: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub active: Vec<bool>,
}

impl GateLayer {
    pub fn new(n: usize, mu0: f64, sigma: f64, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("gate layer needs n >= 1".into()));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gate sigma must be > 0, got {sigma}"
            )));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gate lambda must be >= 0, got {lambda}"
            )));
        }
        Ok(GateLayer {
            mu: vec![mu0; n],
            sigma,
            lambda,
        })
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn mu_mut(&mut self) -> &mut [f64] {
        &mut self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Training forward: mask each band by z = clamp01(mu + eps) with fresh
    /// Gaussian noise. Returns the masked spectrum and the backward record.
    pub fn forward_train(&self, x: &[f64], rng: &mut Rng) -> Result<(Vec<f64>, GateForwardRecord)> {
        let epsilon: Vec<f64> = (0..self.mu.len())
            .map(|_| rng.next_gaussian() * self.sigma)
            .collect();
        self.forward_with_noise(x, &epsilon)
    }

    /// Forward with caller-supplied noise. Lets gradient checks freeze eps.
    pub fn forward_with_noise(
        &self,
        x: &[f64],
        epsilon: &[f64],
    ) -> Result<(Vec<f64>, GateForwardRecord)> {
        self.check_len(x.len())?;
        self.check_len(epsilon.len())?;
        let mut z = Vec::with_capacity(x.len());
        let mut active = Vec::with_capacity(x.len());
        let mut out = Vec::with_capacity(x.len());
        for j in 0..x.len() {
            let raw = self.mu[j] + epsilon[j];
            z.push(clamp01(raw));
            // Boundary points count as saturated: the clamp subgradient is 0 there.
            active.push(raw > 0.0 && raw < 1.0);
            out.push(z[j] * x[j]);
        }
        Ok((
            out,
            GateForwardRecord {
                z,
                epsilon: epsilon.to_vec(),
                active,
            },
        ))
    }

    /// Inference forward: deterministic, z = clamp01(mu) with no noise.
    pub fn forward_infer(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        Ok(x.iter()
            .zip(&self.mu)
            .map(|(&xj, &mj)| clamp01(mj) * xj)
            .collect())
    }

    /// The l0 surrogate lambda * sum_i Phi(mu_i / sigma), in [0, lambda * n].
    pub fn regularizer(&self) -> f64 {
        self.lambda
            * self
                .mu
                .iter()
                .map(|&m| std_normal_cdf(m / self.sigma))
                .sum::<f64>()
    }

    /// Gradient of (loss + regularizer) with respect to mu:
    /// d mu_j = grad_out_j * x_j * [gate j unsaturated] + lambda * pdf(mu_j/sigma) / sigma.
    pub fn backward(
        &self,
        record: &GateForwardRecord,
        x: &[f64],
        grad_out: &[f64],
    ) -> Result<Vec<f64>> {
        self.check_len(record.z.len())?;
        self.check_len(x.len())?;
        self.check_len(grad_out.len())?;
        Ok((0..self.mu.len())
            .map(|j| {
                let data = if record.active[j] {
                    grad_out[j] * x[j]
                } else {
                    0.0
                };
                data + self.lambda * std_normal_pdf(self.mu[j] / self.sigma) / self.sigma
            })
            .collect())
    }

    /// The k bands with largest mu (ties to the lower index), in spectral order.
    pub fn select_top_k(&self, k: usize) -> Result<BandSelection> {
        let n = self.mu.len();
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!(
                "top-k selection needs 1 <= k <= {n}, got {k}"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.mu[b].total_cmp(&self.mu[a]).then(a.cmp(&b)));
        order.truncate(k);
        BandSelection::new(order, n)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.mu.len() {
            return Err(Error::ShapeMismatch {
                expected: self.mu.len(),
                got,
            });
        }
        Ok(())
    }
}

/// Regularization weight for a k-band target: lambda0 * n / k, so the
/// pressure to close gates grows as the band budget shrinks.
pub fn lambda_for_k(lambda0: f64, n: usize, k: usize) -> Result<f64> {
    if !(lambda0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda0 must be > 0, got {lambda0}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "lambda policy needs 1 <= k <= {n}, got {k}"
        )));
    }
    Ok(lambda0 * n as f64 / k as f64)
}
