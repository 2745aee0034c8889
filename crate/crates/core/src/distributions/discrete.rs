//! Distributions whose mass sits on finitely or countably many points.

use serde::{Deserialize, Serialize};

use crate::error::{LossError, Result};
use crate::numeric::{gamma_ur, ln_gamma, log_sum_exp, signed_log_sum, SignedLog};

/// Tolerance on the total mass of a probability vector.
pub const PMF_SUM_TOL: f64 = 1e-12;

/// Finite list of support points (ascending) with positive probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Atoms {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl Atoms {
    /// Builds atoms from unsorted `(value, probability)` pairs, merging
    /// duplicates and dropping zero-probability entries.
    pub fn from_pairs<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Atoms {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().filter(|&(_, p)| p > 0.0).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            if values.last() == Some(&v) {
                *probs.last_mut().unwrap() += p;
            } else {
                values.push(v);
                probs.push(p);
            }
        }
        Atoms { values, probs }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn lower(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn upper(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    pub fn pmf(&self, x: f64) -> f64 {
        match self.values.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => self.probs[i],
            Err(_) => 0.0,
        }
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.values.partition_point(|&v| v <= x);
        self.probs[..n].iter().sum::<f64>().min(1.0)
    }

    /// `P(X > x)`, summed from the top for accuracy in the tail.
    pub fn sf(&self, x: f64) -> f64 {
        let n = self.values.partition_point(|&v| v <= x);
        self.probs[n..].iter().sum::<f64>().min(1.0)
    }

    /// Smallest atom with `P(X <= atom) >= q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let mut acc = 0.0;
        for (v, p) in self.values.iter().zip(&self.probs) {
            acc += p;
            if acc >= q - 1e-15 {
                return *v;
            }
        }
        self.upper()
    }

    /// Atoms restricted to `[lower, upper]` and renormalised.
    pub fn restrict(&self, lower: f64, upper: f64) -> Option<Atoms> {
        let pairs: Vec<(f64, f64)> = self
            .values
            .iter()
            .zip(&self.probs)
            .filter(|(v, _)| **v >= lower && **v <= upper)
            .map(|(v, p)| (*v, *p))
            .collect();
        let mass: f64 = pairs.iter().map(|p| p.1).sum();
        if mass <= 0.0 {
            return None;
        }
        Some(Atoms::from_pairs(pairs.into_iter().map(|(v, p)| (v, p / mass))))
    }

    /// `ln E[X^k]` computed as an exact finite sum in log space.
    pub fn log_moment(&self, k: usize) -> Result<f64> {
        let kf = k as f64;
        let sum = signed_log_sum(self.values.iter().zip(&self.probs).map(|(&v, &p)| {
            let sign = if v < 0.0 && k % 2 == 1 { -1.0 } else if v == 0.0 { 0.0 } else { 1.0 };
            SignedLog { sign, log_abs: p.ln() + kf * v.abs().ln() }
        }));
        if sum.sign <= 0.0 {
            return Err(LossError::NonPositiveMoment { k });
        }
        Ok(sum.log_abs)
    }
}

/// Ordinal categories listed in descending severity, each mapped to a
/// numeric rank, with a probability vector over them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalDistribution {
    labels: Vec<String>,
    ranks: Vec<f64>,
    pmf: Vec<f64>,
}

impl CategoricalDistribution {
    /// Categories `labels[0] > labels[1] > ...`; category `i` (0-based) gets
    /// rank `n - i`.
    pub fn new(labels: Vec<String>, pmf: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        let ranks = (0..n).map(|i| (n - i) as f64).collect();
        Self::with_ranks(labels, ranks, pmf)
    }

    pub fn with_ranks(labels: Vec<String>, ranks: Vec<f64>, pmf: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(LossError::InvalidDistribution("no categories".into()));
        }
        if labels.len() != pmf.len() || labels.len() != ranks.len() {
            return Err(LossError::InvalidDistribution(
                "labels, ranks and pmf must have equal length".into(),
            ));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LossError::InvalidDistribution(format!("duplicate category {l:?}")));
            }
        }
        if ranks.windows(2).any(|w| !(w[0] > w[1])) || ranks.iter().any(|r| !r.is_finite()) {
            return Err(LossError::InvalidDistribution(
                "category ranks must be finite and strictly descending".into(),
            ));
        }
        check_pmf(&pmf)?;
        Ok(CategoricalDistribution { labels, ranks, pmf })
    }

    /// Builds the distribution from raw counts, normalising by their total.
    pub fn from_counts(labels: Vec<String>, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(LossError::EmptyData("all category counts are zero".into()));
        }
        let pmf = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Self::new(labels, pmf)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn probability_of(&self, label: &str) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.pmf[i])
    }

    pub fn label_for_rank(&self, rank: f64) -> Option<&str> {
        self.ranks
            .iter()
            .position(|&r| r == rank)
            .map(|i| self.labels[i].as_str())
    }

    pub fn atoms(&self) -> Atoms {
        Atoms::from_pairs(self.ranks.iter().copied().zip(self.pmf.iter().copied()))
    }
}

/// Counts of observed loss magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramDistribution {
    bin_values: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
}

impl HistogramDistribution {
    pub fn new(bin_values: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        if bin_values.len() != counts.len() {
            return Err(LossError::InvalidDistribution(
                "bin values and counts must have equal length".into(),
            ));
        }
        if bin_values.iter().any(|v| !v.is_finite()) || bin_values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(LossError::InvalidDistribution(
                "bin values must be finite and strictly ascending".into(),
            ));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(LossError::EmptyData("histogram has no observations".into()));
        }
        Ok(HistogramDistribution { bin_values, counts, total })
    }

    pub fn bin_values(&self) -> &[f64] {
        &self.bin_values
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn pmf(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    pub fn atoms(&self) -> Atoms {
        Atoms::from_pairs(self.bin_values.iter().copied().zip(self.pmf()))
    }
}

/// A general finite probability mass function on real support points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    pmf: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(values: Vec<f64>, pmf: Vec<f64>) -> Result<Self> {
        if values.len() != pmf.len() || values.is_empty() {
            return Err(LossError::InvalidDistribution(
                "values and pmf must be non-empty and of equal length".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(LossError::InvalidDistribution(
                "support values must be finite and strictly ascending".into(),
            ));
        }
        check_pmf(&pmf)?;
        Ok(DiscreteDistribution { values, pmf })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn atoms(&self) -> Atoms {
        Atoms::from_pairs(self.values.iter().copied().zip(self.pmf.iter().copied()))
    }
}

impl From<Atoms> for DiscreteDistribution {
    fn from(a: Atoms) -> Self {
        let total = a.total();
        DiscreteDistribution {
            values: a.values,
            pmf: a.probs.iter().map(|p| p / total).collect(),
        }
    }
}

/// A deterministic loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    value: f64,
}

impl PointMass {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(LossError::InvalidDistribution("point mass must be finite".into()));
        }
        Ok(PointMass { value })
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// Poisson counts placed on an arithmetic lattice: `X = offset + spacing * N`
/// with `N ~ Poisson(rate)`. Two lattices with spacing 2 and offsets of
/// different parity give the even/odd pair that no truncation ladder orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonLattice {
    rate: f64,
    spacing: f64,
    offset: f64,
}

impl PoissonLattice {
    pub fn new(rate: f64, spacing: f64, offset: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(LossError::InvalidDistribution("lattice rate must be positive".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) || !offset.is_finite() {
            return Err(LossError::InvalidDistribution(
                "lattice spacing must be positive and offset finite".into(),
            ));
        }
        Ok(PoissonLattice { rate, spacing, offset })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn ln_pmf_index(&self, n: u64) -> f64 {
        let nf = n as f64;
        nf * self.rate.ln() - self.rate - ln_gamma(nf + 1.0)
    }

    /// Lattice index of `x`, if `x` is a lattice point.
    fn index_of(&self, x: f64) -> Option<u64> {
        let t = (x - self.offset) / self.spacing;
        let n = t.round();
        if n >= 0.0 && (t - n).abs() < 1e-9 {
            Some(n as u64)
        } else {
            None
        }
    }

    pub fn ln_pmf(&self, x: f64) -> f64 {
        self.index_of(x)
            .map_or(f64::NEG_INFINITY, |n| self.ln_pmf_index(n))
    }

    fn count_below(&self, x: f64) -> Option<u64> {
        let t = ((x - self.offset) / self.spacing + 1e-9).floor();
        (t >= 0.0).then_some(t as u64)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.count_below(x) {
            // P(N <= n) = Q(n + 1, rate)
            Some(n) => gamma_ur(n as f64 + 1.0, self.rate),
            None => 0.0,
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        match self.count_below(x) {
            Some(n) => statrs::function::gamma::gamma_lr(n as f64 + 1.0, self.rate),
            None => 1.0,
        }
    }

    /// Index beyond which all remaining Poisson mass is below `1e-300`.
    fn index_cap(&self) -> u64 {
        (self.rate + 40.0 * self.rate.sqrt() + 800.0) as u64
    }

    /// Lattice atoms within `[lower, upper]`, renormalised.
    pub fn atoms_within(&self, lower: f64, upper: f64) -> Option<Atoms> {
        let cap = self.index_cap();
        let hi = self.count_below(upper)?.min(cap);
        let pairs: Vec<(f64, f64)> = (0..=hi)
            .map(|n| (self.offset + self.spacing * n as f64, self.ln_pmf_index(n)))
            .filter(|(v, _)| *v >= lower)
            .map(|(v, lp)| (v, lp.exp()))
            .collect();
        let mass: f64 = pairs.iter().map(|p| p.1).sum();
        if mass <= 0.0 {
            return None;
        }
        Some(Atoms::from_pairs(pairs.into_iter().map(|(v, p)| (v, p / mass))))
    }

    pub fn log_moment(&self, k: usize) -> Result<f64> {
        if self.offset < 0.0 {
            return Err(LossError::MomentsUndefined(
                "lattice with negative offset is not a loss distribution".into(),
            ));
        }
        let kf = k as f64;
        let mut terms = Vec::new();
        let mut best = f64::NEG_INFINITY;
        for n in 0..=self.index_cap() * 4 {
            let x = self.offset + self.spacing * n as f64;
            let t = self.ln_pmf_index(n) + if x > 0.0 { kf * x.ln() } else { f64::NEG_INFINITY };
            best = best.max(t);
            terms.push(t);
            if n as f64 > self.rate && t < best - 60.0 {
                break;
            }
        }
        let v = log_sum_exp(terms);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LossError::NonPositiveMoment { k })
        }
    }

    pub fn quantile(&self, q: f64) -> f64 {
        let mut acc = 0.0;
        for n in 0..=self.index_cap() {
            acc += self.ln_pmf_index(n).exp();
            if acc >= q - 1e-15 {
                return self.offset + self.spacing * n as f64;
            }
        }
        self.offset + self.spacing * self.index_cap() as f64
    }

    pub fn upper_quantile(&self, p: f64) -> f64 {
        let mut n = 0u64;
        while n < self.index_cap() && self.sf(self.offset + self.spacing * n as f64) > p {
            n += 1;
        }
        self.offset + self.spacing * n as f64
    }
}

fn check_pmf(pmf: &[f64]) -> Result<()> {
    if pmf.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(LossError::InvalidDistribution(
            "probabilities must be finite and non-negative".into(),
        ));
    }
    let s: f64 = pmf.iter().sum();
    if (s - 1.0).abs() > PMF_SUM_TOL {
        return Err(LossError::InvalidDistribution(format!(
            "probabilities sum to {s}, not 1"
        )));
    }
    Ok(())
}
