use serde::{Deserialize, Serialize};

use super::{PreferenceVerdict, Relation};
use crate::distributions::LossDistribution;
use crate::error::{LossError, Result};
use crate::numeric::bisect;

/// Slack allowed in the survival inequality.
pub const SURVIVAL_TOL: f64 = 1e-9;
/// Size of the verification grid for continuous distributions.
pub const THRESHOLD_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidencePoint {
    pub x: f64,
    /// `P(X1 > x)` for the first argument.
    pub survival_first: f64,
    /// `P(X2 > x)` for the second argument.
    pub survival_second: f64,
}

/// A point `x0` beyond which the preferred distribution's survival
/// function lies below the other's, with the grid that was checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailThreshold {
    pub x0: f64,
    /// Category label at `x0` when both inputs are categorical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub grid: Vec<EvidencePoint>,
}

/// Finds the smallest resolvable `x0` with
/// `P(preferred > x) <= P(other > x) + 1e-9` for all `x >= x0`.
///
/// For discrete inputs `x0` is the largest support point where the
/// inequality fails, so dominance holds at every support point above it
/// (on the real line: from the next support point on). When it never
/// fails, `x0` is the lowest support point.
pub fn tail_threshold(
    d1: &LossDistribution,
    d2: &LossDistribution,
    verdict: &PreferenceVerdict,
) -> Result<TailThreshold> {
    let first_preferred = match verdict.relation {
        Relation::FirstStrictlyPreferred | Relation::Equivalent => true,
        Relation::SecondStrictlyPreferred => false,
        Relation::Incomparable => {
            return Err(LossError::ThresholdNotFound(
                "incomparable distributions have no tail threshold".into(),
            ))
        }
    };
    let point = |x: f64| EvidencePoint {
        x,
        survival_first: d1.survival_at(x),
        survival_second: d2.survival_at(x),
    };
    let holds = |p: &EvidencePoint| {
        let (s_pref, s_other) = if first_preferred {
            (p.survival_first, p.survival_second)
        } else {
            (p.survival_second, p.survival_first)
        };
        s_pref <= s_other + SURVIVAL_TOL
    };
    let other_survival = |p: &EvidencePoint| {
        if first_preferred {
            p.survival_second
        } else {
            p.survival_first
        }
    };

    if d1.is_discrete() && d2.is_discrete() {
        let mut xs = support_points(d1);
        xs.extend(support_points(d2));
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let grid: Vec<EvidencePoint> = xs.iter().map(|&x| point(x)).collect();
        let failure = grid.iter().rposition(|p| !holds(p));
        let x0 = match failure {
            None => xs[0],
            Some(i) if i + 1 == grid.len() => {
                return Err(LossError::ThresholdNotFound(
                    "survival dominance fails at the largest support point".into(),
                ))
            }
            Some(i) => xs[i],
        };
        let evidence: Vec<EvidencePoint> = grid.into_iter().filter(|p| p.x > x0 || failure.is_none()).collect();
        let label = match (d1, d2) {
            (LossDistribution::Categorical(c), LossDistribution::Categorical(_)) => {
                c.label_for_rank(x0).map(str::to_string)
            }
            _ => None,
        };
        return Ok(TailThreshold { x0, label, grid: evidence });
    }

    let (s1, s2) = (d1.support(), d2.support());
    let lo_bound = |d: &LossDistribution, l: f64| if l.is_finite() { l } else { d.quantile(1e-12) };
    let hi_bound = |d: &LossDistribution, u: f64| if u.is_finite() { u } else { d.upper_quantile(1e-12) };
    let lo = lo_bound(d1, s1.lower).min(lo_bound(d2, s2.lower)).max(1.0);
    let hi = hi_bound(d1, s1.upper).max(hi_bound(d2, s2.upper));
    if !(lo < hi) {
        return Err(LossError::ThresholdNotFound(format!("empty search range [{lo}, {hi}]")));
    }
    let xs: Vec<f64> = (0..THRESHOLD_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (THRESHOLD_GRID - 1) as f64)
        .collect();
    let grid: Vec<EvidencePoint> = xs.iter().map(|&x| point(x)).collect();
    if !holds(grid.last().unwrap()) {
        return Err(LossError::ThresholdNotFound(
            "survival dominance fails at the top of the support".into(),
        ));
    }
    let start = grid.iter().rposition(|p| !holds(p)).map_or(0, |i| i + 1);
    if start == 0 {
        return Ok(TailThreshold { x0: lo, label: None, grid });
    }
    if grid[start..].iter().all(|p| other_survival(p) <= SURVIVAL_TOL) {
        return Err(LossError::ThresholdNotFound(
            "dominance holds only where both survival functions vanish".into(),
        ));
    }
    let gap = |x: f64| if holds(&point(x)) { 1.0 } else { -1.0 };
    let (_, x0) = bisect(gap, xs[start - 1], xs[start], 60);
    let mut evidence = vec![point(x0)];
    evidence.extend_from_slice(&grid[start..]);
    Ok(TailThreshold { x0, label: None, grid: evidence })
}

/// Support points of a discrete distribution, enumerating a lattice up to
/// where its tail mass becomes negligible.
fn support_points(d: &LossDistribution) -> Vec<f64> {
    if let Some(a) = d.finite_atoms() {
        return a.values;
    }
    if let LossDistribution::PoissonLattice(l) = d {
        let top = l.upper_quantile(1e-15);
        let n = ((top - l.offset()) / l.spacing()).round() as usize;
        return (0..=n).map(|i| l.offset() + l.spacing() * i as f64).collect();
    }
    Vec::new()
}
