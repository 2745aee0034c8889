use serde::{Deserialize, Serialize};

use super::{equivalence_caveat, CompareOptions, PreferenceVerdict, Relation, Rule};
use crate::distributions::LossDistribution;
use crate::error::{LossError, Result};

/// Log-moment differences at most this large count as ties.
pub const MOMENT_NOISE_TOL: f64 = 1e-9;
/// Differences below this do not start a stable dominance run.
pub const MOMENT_TIE_TOL: f64 = 1e-5;

/// `ln E[X^k]` for `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    log_moments: Vec<f64>,
}

impl MomentSequence {
    pub fn compute(d: &LossDistribution, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(LossError::InvalidConfig("k_max must be at least 1".into()));
        }
        let log_moments = (1..=k_max).map(|k| d.log_moment(k)).collect::<Result<Vec<_>>>()?;
        Ok(MomentSequence { log_moments })
    }

    pub fn from_log_moments(log_moments: Vec<f64>) -> Result<Self> {
        if log_moments.is_empty() || log_moments.iter().any(|m| !m.is_finite()) {
            return Err(LossError::InvalidConfig(
                "moment sequence must be non-empty and finite".into(),
            ));
        }
        Ok(MomentSequence { log_moments })
    }

    pub fn k_max(&self) -> usize {
        self.log_moments.len()
    }

    pub fn log_moments(&self) -> &[f64] {
        &self.log_moments
    }

    /// `ln E[X^k]`, 1-based.
    pub fn log_moment(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.log_moments.get(i).copied())
    }

    pub fn moment(&self, k: usize) -> Option<f64> {
        self.log_moment(k).map(f64::exp)
    }
}

fn sign_of(d: f64) -> i8 {
    if d.abs() <= MOMENT_NOISE_TOL {
        0
    } else if d < 0.0 {
        -1
    } else {
        1
    }
}

/// Eventual dominance of two moment sequences.
///
/// The last `window` comparisons must agree strictly; the stabilization
/// index is where the final run of clear (non-tied) agreement begins.
pub fn compare_moment_sequences(
    m1: &MomentSequence,
    m2: &MomentSequence,
    options: &CompareOptions,
) -> Result<PreferenceVerdict> {
    if m1.k_max() != m2.k_max() {
        return Err(LossError::InvalidConfig(format!(
            "moment sequences differ in length ({} vs {})",
            m1.k_max(),
            m2.k_max()
        )));
    }
    let k_max = m1.k_max();
    let trace: Vec<f64> = m1
        .log_moments
        .iter()
        .zip(&m2.log_moments)
        .map(|(a, b)| a - b)
        .collect();
    let signs: Vec<i8> = trace.iter().map(|&d| sign_of(d)).collect();
    if signs.iter().all(|&s| s == 0) {
        return Ok(equivalence_caveat(PreferenceVerdict::new(
            Relation::Equivalent,
            Rule::MomentDominance,
        )));
    }
    let window = options.window.clamp(1, k_max);
    let last = signs[k_max - 1];
    if last == 0 || signs[k_max - window..].iter().any(|&s| s != last) {
        return Err(LossError::Undecided { k_max, trace });
    }
    let run_start = |tol: f64| {
        let mut start = k_max;
        while start > 0 && signs[start - 1] == last && trace[start - 1].abs() > tol {
            start -= 1;
        }
        start
    };
    let clear = run_start(MOMENT_TIE_TOL);
    let index = if clear < k_max { clear + 1 } else { run_start(MOMENT_NOISE_TOL) + 1 };
    let relation = if last < 0 {
        Relation::FirstStrictlyPreferred
    } else {
        Relation::SecondStrictlyPreferred
    };
    Ok(PreferenceVerdict::new(relation, Rule::MomentDominance).with_stabilization(index))
}
