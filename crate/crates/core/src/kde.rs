//! Gaussian kernel density estimates.
//!
//! `f(x) = 1/(n h) Σ φ((x - x_i) / h)` with Silverman's rule-of-thumb
//! bandwidth. Derivatives of any order have the closed form
//! `f^(k)(x) = 1/(n h^(k+1)) Σ (-1)^k He_k(u_i) φ(u_i)`, `u_i = (x - x_i)/h`,
//! where `He_k` are the probabilists' Hermite polynomials.

use serde::{Deserialize, Serialize};

use crate::distributions::LossDistribution;
use crate::error::{LossError, Result};
use crate::numeric::{log_sum_exp, std_normal_cdf, std_normal_pdf, std_normal_sf, LN_SQRT_2PI};
use crate::ordering::{compare_smooth, CompareOptions, PreferenceVerdict, Relation, Rule};

/// Highest derivative order supported by [`KernelDensityEstimate::derivative`].
pub const MAX_DERIVATIVE_ORDER: usize = 64;

/// `He_0(u) ..= He_n(u)` by the three-term recurrence
/// `He_k = u He_{k-1} - (k-1) He_{k-2}`.
pub fn hermite_he(u: f64, n: usize) -> Vec<f64> {
    let mut he = Vec::with_capacity(n + 1);
    he.push(1.0);
    if n >= 1 {
        he.push(u);
    }
    for k in 2..=n {
        let next = u * he[k - 1] - (k - 1) as f64 * he[k - 2];
        he.push(next);
    }
    he
}

/// Quantile with linear interpolation between order statistics (type 7).
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Silverman's rule of thumb, `0.9 min(sd, IQR/1.34) n^(-1/5)`.
///
/// A zero spread estimate falls back to the standard deviation, then to
/// `|mean|`, then to 1.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n == 0 {
        return Err(LossError::EmptyData("no samples for bandwidth selection".into()));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let sd = if n > 1 {
        (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_type7(&sorted, 0.75) - quantile_type7(&sorted, 0.25);
    let mut spread = sd.min(iqr / 1.34);
    if spread <= 0.0 {
        spread = sd;
    }
    if spread <= 0.0 {
        spread = mean.abs();
    }
    if spread <= 0.0 {
        spread = 1.0;
    }
    Ok(0.9 * spread * nf.powf(-0.2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDensityEstimate {
    samples: Vec<f64>,
    bandwidth: f64,
    /// Multiple of the bandwidth added to the largest sample to form the
    /// effective right end of the support.
    #[serde(default = "default_bound_multiplier")]
    bound_multiplier: f64,
}

fn default_bound_multiplier() -> f64 {
    1.0
}

impl KernelDensityEstimate {
    /// Fits a KDE with Silverman's bandwidth.
    pub fn fit(samples: &[f64]) -> Result<Self> {
        let h = silverman_bandwidth(samples)?;
        Self::with_bandwidth(samples, h)
    }

    pub fn with_bandwidth(samples: &[f64], bandwidth: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(LossError::EmptyData("no samples".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(LossError::InvalidDistribution("non-finite sample".into()));
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(LossError::InvalidDistribution("bandwidth must be positive".into()));
        }
        Ok(KernelDensityEstimate {
            samples: samples.to_vec(),
            bandwidth,
            bound_multiplier: 1.0,
        })
    }

    pub fn with_bound_multiplier(mut self, multiplier: f64) -> Result<Self> {
        if !(multiplier >= 0.0 && multiplier.is_finite()) {
            return Err(LossError::InvalidConfig("bound multiplier must be non-negative".into()));
        }
        self.bound_multiplier = multiplier;
        Ok(self)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn bound_multiplier(&self) -> f64 {
        self.bound_multiplier
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        self.samples
            .iter()
            .map(|xi| std_normal_pdf((x - xi) / h))
            .sum::<f64>()
            / (self.samples.len() as f64 * h)
    }

    /// Log density; stays finite far in the tails where `evaluate` underflows.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        log_sum_exp(self.samples.iter().map(|xi| {
            let u = (x - xi) / h;
            -0.5 * u * u
        })) - (self.samples.len() as f64 * h).ln()
            - LN_SQRT_2PI
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.samples
            .iter()
            .map(|xi| std_normal_cdf((x - xi) / self.bandwidth))
            .sum::<f64>()
            / self.samples.len() as f64
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.samples
            .iter()
            .map(|xi| std_normal_sf((x - xi) / self.bandwidth))
            .sum::<f64>()
            / self.samples.len() as f64
    }

    /// The `k`-th derivative of the estimate at `x`.
    pub fn derivative(&self, x: f64, k: usize) -> Result<f64> {
        if k > MAX_DERIVATIVE_ORDER {
            return Err(LossError::InvalidOrder(k as i64));
        }
        Ok(self.derivatives(x, k)[k])
    }

    /// Derivatives of orders `0..=n` at `x`.
    pub fn derivatives(&self, x: f64, n: usize) -> Vec<f64> {
        let h = self.bandwidth;
        let mut acc = vec![0.0; n + 1];
        for xi in &self.samples {
            let u = (x - xi) / h;
            let phi = std_normal_pdf(u);
            if phi == 0.0 {
                continue;
            }
            for (k, he) in hermite_he(u, n).into_iter().enumerate() {
                acc[k] += he * phi;
            }
        }
        let nf = self.samples.len() as f64;
        acc.iter()
            .enumerate()
            .map(|(k, s)| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * s / (nf * h.powi(k as i32 + 1))
            })
            .collect()
    }

    /// `max(samples) + multiplier * h`, the right end beyond which the
    /// estimate is treated as carrying no mass for comparisons.
    pub fn effective_upper_bound(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max) + self.bound_multiplier * self.bandwidth
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn spread(&self) -> f64 {
        let m = self.mean();
        let n = self.samples.len() as f64;
        let var = self.samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        (var + self.bandwidth * self.bandwidth).sqrt()
    }
}

/// Orders two KDEs: the one with the smaller effective right end is
/// preferred; when the ends coincide, both estimates are truncated there and
/// compared by their signed derivative sequences.
pub fn compare_kdes(
    first: &KernelDensityEstimate,
    second: &KernelDensityEstimate,
    options: &CompareOptions,
) -> Result<PreferenceVerdict> {
    if first == second {
        return Ok(PreferenceVerdict::new(Relation::Equivalent, Rule::Identity));
    }
    let b1 = first.effective_upper_bound();
    let b2 = second.effective_upper_bound();
    let scale = b1.abs().max(b2.abs()).max(1.0);
    if (b1 - b2).abs() > 1e-9 * scale {
        let relation = if b1 < b2 {
            Relation::FirstStrictlyPreferred
        } else {
            Relation::SecondStrictlyPreferred
        };
        return Ok(PreferenceVerdict::new(relation, Rule::SupportBound));
    }
    let a = b1.max(b2);
    let t1 = LossDistribution::Kde(first.clone()).truncate(f64::NEG_INFINITY, a)?;
    let t2 = LossDistribution::Kde(second.clone()).truncate(f64::NEG_INFINITY, a)?;
    compare_smooth(
        &LossDistribution::Truncated(t1),
        &LossDistribution::Truncated(t2),
        options,
    )
}
