//! Scalar math shared by the selector layers: standard-normal CDF/PDF,
//! seeded Gaussian and Gumbel sampling, clamping, and temperature softmax.

use crate::error::{Error, Result};
use crate::rng::Rng;

const INV_SQRT_2PI: f64 = 0.3989422804014327;

/// Standard Gaussian CDF, accurate to well below 1e-7 absolute error.
///
/// Hart-style rational approximation of the complementary tail (the same
/// polynomial pair used by double-precision NORMSDIST implementations),
/// reflected so that `cdf(x) + cdf(-x) == 1` holds by construction.
pub fn std_normal_cdf(x: f64) -> f64 {
    let xabs = x.abs();
    let tail = if xabs > 37.0 {
        0.0
    } else {
        let e = (-xabs * xabs / 2.0).exp();
        if xabs < 7.071067811865475 {
            let num = (((((3.52624965998911e-2 * xabs + 0.700383064443688) * xabs
                + 6.37396220353165)
                * xabs
                + 33.912866078383)
                * xabs
                + 112.079291497871)
                * xabs
                + 221.213596169931)
                * xabs
                + 220.206867912376;
            let den = ((((((8.83883476483184e-2 * xabs + 1.75566716318264) * xabs
                + 16.064177579207)
                * xabs
                + 86.7807322029461)
                * xabs
                + 296.564248779674)
                * xabs
                + 637.333633378831)
                * xabs
                + 793.826512519948)
                * xabs
                + 440.413735824752;
            e * num / den
        } else {
            let b = xabs + 0.65;
            let b = xabs + 4.0 / b;
            let b = xabs + 3.0 / b;
            let b = xabs + 2.0 / b;
            let b = xabs + 1.0 / b;
            e / (b * 2.506628274631)
        }
    };
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Standard Gaussian density exp(-x^2/2)/sqrt(2*pi).
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() * INV_SQRT_2PI
}

/// One draw from N(0, sigma^2). Rejects sigma <= 0.
pub fn sample_gaussian(rng: &mut Rng, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gaussian sigma must be > 0, got {sigma}"
        )));
    }
    Ok(rng.next_gaussian() * sigma)
}

/// Gumbel transform of a uniform draw: -log(-log(u)).
#[inline]
fn gumbel_from_uniform(u: f64) -> f64 {
    -(-(u.ln())).ln()
}

/// One Gumbel draw with u ~ Uniform(0, beta). Rejects beta outside (0, 1).
///
/// u is floored at 1e-300 so the inner log never sees zero; since beta < 1
/// every sample is bounded above by -log(-log(beta)).
pub fn sample_gumbel(rng: &mut Rng, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gumbel beta must lie in (0, 1), got {beta}"
        )));
    }
    let u = (rng.next_f64() * beta).max(1e-300);
    Ok(gumbel_from_uniform(u))
}

/// Exactly max(0, min(x, 1)).
#[inline]
pub fn clamp01(x: f64) -> f64 {
    x.min(1.0).max(0.0)
}

/// Temperature softmax of one logit row, computed with max-subtraction.
/// Rejects tau <= 0 and empty rows. Output entries sum to 1.
pub fn softmax_row(logits: &[f64], tau: f64) -> Result<Vec<f64>> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "softmax tau must be > 0, got {tau}"
        )));
    }
    if logits.is_empty() {
        return Err(Error::EmptyInput("softmax over empty logit row".into()));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&l| ((l - max) / tau).exp()).collect();
    let sum: f64 = out.iter().sum();
    for v in &mut out {
        *v /= sum;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson quadrature of the standard normal pdf over [a, b].
    /// Independent reference for the closed-form CDF.
    fn pdf_quadrature(a: f64, b: f64) -> f64 {
        fn simpson(a: f64, b: f64) -> f64 {
            let m = 0.5 * (a + b);
            (b - a) / 6.0 * (std_normal_pdf(a) + 4.0 * std_normal_pdf(m) + std_normal_pdf(b))
        }
        fn recurse(a: f64, b: f64, whole: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(a, m);
            let right = simpson(m, b);
            if depth == 0 || (left + right - whole).abs() < 1e-13 {
                left + right + (left + right - whole) / 15.0
            } else {
                recurse(a, m, left, depth - 1) + recurse(m, b, right, depth - 1)
            }
        }
        recurse(a, b, simpson(a, b), 30)
    }

    #[test]
    fn cdf_at_zero_is_half() {
        assert!((std_normal_cdf(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cdf_far_right_is_one() {
        assert!((std_normal_cdf(40.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_matches_quadrature_oracle() {
        // Phi(x) = 0.5 + integral of pdf over [0, x].
        for &x in &[0.1, 0.5, 1.0, 1.7, 2.5, 3.3, 5.0] {
            let reference = 0.5 + pdf_quadrature(0.0, x);
            let got = std_normal_cdf(x);
            assert!(
                (got - reference).abs() < 1e-7,
                "cdf({}) = {}, quadrature = {}",
                x,
                got,
                reference
            );
        }
    }

    #[test]
    fn cdf_symmetry() {
        let mut rng = Rng::new(1, 0);
        for _ in 0..200 {
            let x = (rng.next_f64() - 0.5) * 12.0;
            let s = std_normal_cdf(x) + std_normal_cdf(-x);
            assert!((s - 1.0).abs() < 1e-15, "cdf({x}) + cdf({}) = {s}", -x);
        }
    }

    #[test]
    fn cdf_monotone() {
        let mut prev = std_normal_cdf(-8.0);
        let mut x = -8.0;
        while x < 8.0 {
            x += 0.01;
            let cur = std_normal_cdf(x);
            assert!(cur >= prev, "cdf not monotone at {}", x);
            prev = cur;
        }
    }

    #[test]
    fn pdf_at_zero() {
        let reference = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((std_normal_pdf(0.0) - reference).abs() < 1e-16);
    }

    #[test]
    fn pdf_is_even() {
        for &x in &[0.3, 1.1, 2.7, 4.0] {
            assert_eq!(std_normal_pdf(x), std_normal_pdf(-x));
        }
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        // Central differences at x = 0.7 (the worked case) and at 100
        // seeded points across [-5, 5].
        let h = 1e-6;
        let fd = (std_normal_cdf(0.7 + h) - std_normal_cdf(0.7 - h)) / (2.0 * h);
        assert!((fd - std_normal_pdf(0.7)).abs() < 1e-6);

        let mut rng = Rng::new(77, 0);
        for _ in 0..100 {
            let x = (rng.next_f64() - 0.5) * 10.0;
            let fd = (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2.0 * h);
            assert!(
                (fd - std_normal_pdf(x)).abs() < 1e-6,
                "d/dx cdf at {} = {} vs pdf {}",
                x,
                fd,
                std_normal_pdf(x)
            );
        }
    }

    #[test]
    fn gaussian_rejects_bad_sigma() {
        let mut rng = Rng::new(0, 0);
        assert!(sample_gaussian(&mut rng, 0.0).is_err());
        assert!(sample_gaussian(&mut rng, -1.0).is_err());
    }

    #[test]
    fn gaussian_is_deterministic() {
        let draw = |seed| {
            let mut rng = Rng::new(seed, 0);
            (0..10)
                .map(|_| sample_gaussian(&mut rng, 0.5).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
    }

    #[test]
    fn gaussian_sigma_half_empirical_std() {
        let n = 1_000_000;
        let mut rng = Rng::new(2024, 0);
        let samples: Vec<f64> = (0..n)
            .map(|_| sample_gaussian(&mut rng, 0.5).unwrap())
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        assert!(mean.abs() < 3.0 * 0.5 / (n as f64).sqrt());
        assert!(
            (0.499..=0.501).contains(&std),
            "empirical std {} out of [0.499, 0.501]",
            std
        );
    }

    #[test]
    fn gaussian_unit_sigma_coverage() {
        // Phi(1) - Phi(-1) of the draws should land within 1e6 of 68.27%.
        let n = 1_000_000;
        let mut rng = Rng::new(7, 3);
        let inside = (0..n)
            .filter(|_| sample_gaussian(&mut rng, 1.0).unwrap().abs() <= 1.0)
            .count();
        let frac = inside as f64 / n as f64;
        let expected = std_normal_cdf(1.0) - std_normal_cdf(-1.0);
        assert!(
            (frac - expected).abs() < 0.002,
            "coverage {} vs {}",
            frac,
            expected
        );
    }

    #[test]
    fn gumbel_rejects_bad_beta() {
        let mut rng = Rng::new(0, 0);
        for beta in [0.0, 1.0, -0.2, 1.5] {
            assert!(sample_gumbel(&mut rng, beta).is_err(), "beta = {beta}");
        }
    }

    #[test]
    fn gumbel_at_exp_minus_one_is_zero() {
        let g = gumbel_from_uniform((-1.0f64).exp());
        assert!(g.abs() < 1e-15, "-log(-log(e^-1)) = {}", g);
    }

    #[test]
    fn gumbel_bounded_above_by_beta_image() {
        let beta = 0.15;
        let bound = gumbel_from_uniform(beta);
        assert!((bound - -0.6403).abs() < 1e-4);
        let mut rng = Rng::new(31, 0);
        let mut max = f64::NEG_INFINITY;
        for _ in 0..100_000 {
            let g = sample_gumbel(&mut rng, beta).unwrap();
            assert!(g <= bound, "sample {} above bound {}", g, bound);
            max = max.max(g);
        }
        assert!(max < -0.64, "empirical max {} not below -0.64", max);
    }

    #[test]
    fn clamp01_examples() {
        assert_eq!(clamp01(0.5), 0.5);
        assert_eq!(clamp01(1.3), 1.0);
        assert_eq!(clamp01(-0.2), 0.0);
        assert_eq!(clamp01(0.0), 0.0);
        assert_eq!(clamp01(1.0), 1.0);
    }

    #[test]
    fn softmax_rejects_bad_tau_and_empty() {
        assert!(softmax_row(&[1.0, 2.0], 0.0).is_err());
        assert!(softmax_row(&[1.0, 2.0], -3.0).is_err());
        assert!(softmax_row(&[], 1.0).is_err());
    }

    #[test]
    fn softmax_uniform_for_equal_logits() {
        for tau in [0.01, 1.0, 1e6] {
            let out = softmax_row(&[0.0; 7], tau).unwrap();
            for v in out {
                assert!((v - 1.0 / 7.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn softmax_sharp_temperature_saturates() {
        let out = softmax_row(&[10.0, 0.0, 0.0], 0.01).unwrap();
        assert!(out[0] > 0.999, "dominant entry {}", out[0]);
    }

    #[test]
    fn softmax_shift_invariance_bitwise_for_exact_shift() {
        // Shifting by a power of two keeps l - max(l) bit-identical.
        let logits = [0.5, -1.25, 3.0, 0.0];
        let shifted: Vec<f64> = logits.iter().map(|l| l + 256.0).collect();
        assert_eq!(
            softmax_row(&logits, 0.7).unwrap(),
            softmax_row(&shifted, 0.7).unwrap()
        );
    }

    #[test]
    fn softmax_rows_sum_to_one_for_extreme_logits() {
        let mut rng = Rng::new(55, 0);
        for _ in 0..1000 {
            let n = 2 + rng.gen_index(40);
            let logits: Vec<f64> = (0..n).map(|_| (rng.next_f64() - 0.5) * 2e3).collect();
            let out = softmax_row(&logits, 1.0).unwrap();
            let sum: f64 = out.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "row sum {}", sum);
            assert!(out.iter().all(|&v| v >= 0.0));
        }
    }
}
