use serde::{Deserialize, Serialize};

use crate::error::{LossError, Result};
use crate::kde::hermite_he;
use crate::numeric::{self, gamma_lr, gamma_ur, ln_gamma, std_normal_cdf, std_normal_pdf, std_normal_sf};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Smooth families admitted with unbounded support because all of their
/// moments are finite.
///
/// The Gumbel density is `f(x) = exp(z - e^z) / b` with `z = (x - a) / b`;
/// its mean is `a - γ b` and its long tail points to the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ParametricDistribution {
    Gumbel { location: f64, scale: f64 },
    Gamma { shape: f64, scale: f64 },
    Weibull { shape: f64, scale: f64 },
    Gaussian { mean: f64, sd: f64 },
}

use ParametricDistribution::*;

/// `m`-th derivative of `c ln x`.
fn power_term(c: f64, x: f64, m: usize) -> f64 {
    let fact: f64 = (1..m).map(|j| j as f64).product();
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    sign * c * fact / x.powi(m as i32)
}

/// Derivatives `f, f', ..., f^(n)` of `f = exp(g)` from `f` and
/// `g', ..., g^(n)`, via `f^(m+1) = sum_j C(m, j) f^(j) g^(m+1-j)`.
fn from_log_derivatives(f: f64, g: &[f64]) -> Vec<f64> {
    let mut out = vec![f];
    for m in 0..g.len() {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for j in 0..=m {
            acc += binom * out[j] * g[m - j];
            binom = binom * (m - j) as f64 / (j + 1) as f64;
        }
        out.push(acc);
    }
    out
}

impl ParametricDistribution {
    pub fn gumbel(location: f64, scale: f64) -> Result<Self> {
        Gumbel { location, scale }.validated()
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Gamma { shape, scale }.validated()
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Weibull { shape, scale }.validated()
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        Gaussian { mean, sd }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Gumbel { location, scale } => location.is_finite() && scale.is_finite() && scale > 0.0,
            Gamma { shape, scale } | Weibull { shape, scale } => {
                shape.is_finite() && scale.is_finite() && shape > 0.0 && scale > 0.0
            }
            Gaussian { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(LossError::InvalidDistribution(format!(
                "invalid parameters for {}: scale/shape must be positive and finite",
                self.family()
            )))
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Gumbel { .. } => "gumbel",
            Gamma { .. } => "gamma",
            Weibull { .. } => "weibull",
            Gaussian { .. } => "gaussian",
        }
    }

    pub fn parameters(&self) -> [f64; 2] {
        match *self {
            Gumbel { location, scale } => [location, scale],
            Gamma { shape, scale } | Weibull { shape, scale } => [shape, scale],
            Gaussian { mean, sd } => [mean, sd],
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Gumbel { .. } | Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Gamma { .. } | Weibull { .. } => (0.0, f64::INFINITY),
        }
    }

    /// Rough centre and spread, used to seed numerical searches.
    pub fn location_scale_hint(&self) -> (f64, f64) {
        match *self {
            Gumbel { location, scale } => (location - EULER_GAMMA * scale, scale * 1.282_549_830_161_864),
            Gamma { shape, scale } => (shape * scale, shape.sqrt() * scale),
            Weibull { shape, scale } => {
                let m1 = (ln_gamma(1.0 + 1.0 / shape)).exp();
                let m2 = (ln_gamma(1.0 + 2.0 / shape)).exp();
                (scale * m1, scale * (m2 - m1 * m1).max(1e-12).sqrt())
            }
            Gaussian { mean, sd } => (mean, sd),
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            Gumbel { location, scale } => {
                let z = (x - location) / scale;
                z - z.exp() - scale.ln()
            }
            Gamma { shape, scale } => {
                if x <= 0.0 {
                    return if x == 0.0 && shape == 1.0 { -scale.ln() } else { f64::NEG_INFINITY };
                }
                (shape - 1.0) * x.ln() - x / scale - shape * scale.ln() - ln_gamma(shape)
            }
            Weibull { shape, scale } => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let r = x / scale;
                shape.ln() - scale.ln() + (shape - 1.0) * r.ln() - r.powf(shape)
            }
            Gaussian { mean, sd } => {
                let u = (x - mean) / sd;
                -0.5 * u * u - numeric::LN_SQRT_2PI - sd.ln()
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Gumbel { location, scale } => -(-((x - location) / scale).exp()).exp_m1(),
            Gamma { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_lr(shape, x / scale)
                }
            }
            Weibull { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-(x / scale).powf(shape)).exp_m1()
                }
            }
            Gaussian { mean, sd } => std_normal_cdf((x - mean) / sd),
        }
    }

    /// `P(X > x)`, computed directly so the upper tail keeps its precision.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Gumbel { location, scale } => (-((x - location) / scale).exp()).exp(),
            Gamma { shape, scale } => {
                if x <= 0.0 {
                    1.0
                } else {
                    gamma_ur(shape, x / scale)
                }
            }
            Weibull { shape, scale } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-(x / scale).powf(shape)).exp()
                }
            }
            Gaussian { mean, sd } => std_normal_sf((x - mean) / sd),
        }
    }

    /// Closed-form `ln E[X^k]` where one exists.
    pub fn closed_form_log_moment(&self, k: usize) -> Option<f64> {
        let kf = k as f64;
        match *self {
            Gamma { shape, scale } => Some(kf * scale.ln() + ln_gamma(shape + kf) - ln_gamma(shape)),
            Weibull { shape, scale } => Some(kf * scale.ln() + ln_gamma(1.0 + kf / shape)),
            _ => None,
        }
    }

    /// Derivatives of orders `0..=n` of the density at `x`, where a closed
    /// form is available.
    pub fn derivatives(&self, x: f64, n: usize) -> Option<Vec<f64>> {
        match *self {
            Gaussian { mean, sd } => {
                let u = (x - mean) / sd;
                let phi = std_normal_pdf(u);
                let he = hermite_he(u, n);
                Some(
                    he.iter()
                        .enumerate()
                        .map(|(k, h)| {
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            sign * h * phi / sd.powi(k as i32 + 1)
                        })
                        .collect(),
                )
            }
            Gumbel { location, scale } => {
                let ez = ((x - location) / scale).exp();
                let g = (1..=n)
                    .map(|m| {
                        if m == 1 {
                            (1.0 - ez) / scale
                        } else {
                            -ez / scale.powi(m as i32)
                        }
                    })
                    .collect::<Vec<_>>();
                Some(from_log_derivatives(self.pdf(x), &g))
            }
            Gamma { shape, scale } if x > 0.0 => {
                let g = (1..=n)
                    .map(|m| power_term(shape - 1.0, x, m) - if m == 1 { 1.0 / scale } else { 0.0 })
                    .collect::<Vec<_>>();
                Some(from_log_derivatives(self.pdf(x), &g))
            }
            Weibull { shape, scale } if x > 0.0 => {
                let g = (1..=n)
                    .map(|m| {
                        let falling: f64 = (0..m).map(|j| shape - j as f64).product();
                        power_term(shape - 1.0, x, m) - falling * x.powf(shape - m as f64) / scale.powf(shape)
                    })
                    .collect::<Vec<_>>();
                Some(from_log_derivatives(self.pdf(x), &g))
            }
            _ => None,
        }
    }

    /// Inverse of the CDF; upper quantiles are solved on the survival function.
    pub fn quantile(&self, q: f64) -> f64 {
        match *self {
            Gumbel { location, scale } => location + scale * (-(-q).ln_1p()).ln(),
            Weibull { shape, scale } => scale * (-(-q).ln_1p()).powf(1.0 / shape),
            _ => {
                let (c, w) = self.location_scale_hint();
                let (lo_sup, _) = self.support();
                let mut lo = (c - 10.0 * w).max(lo_sup);
                let mut hi = c + 10.0 * w;
                while self.cdf(lo) > q && lo > lo_sup {
                    lo = (lo - 10.0 * w).max(lo_sup);
                    if lo == lo_sup {
                        break;
                    }
                }
                while self.cdf(hi) < q {
                    hi += 10.0 * w;
                }
                let f = |x: f64| {
                    if q > 0.5 {
                        (1.0 - q) - self.sf(x)
                    } else {
                        self.cdf(x) - q
                    }
                };
                let (a, b) = numeric::bisect(|x| -f(x), lo, hi, 200);
                0.5 * (a + b)
            }
        }
    }
}
