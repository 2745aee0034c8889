use super::{compare, CompareOptions, PreferenceVerdict, Relation, Rule};
use crate::distributions::LossDistribution;
use crate::error::{LossError, Result};

/// Density ratio below which the ratio criterion declares the limit zero.
pub const RATIO_LIMIT: f64 = 1e-3;
/// Number of quantile levels `1 - 10^-j` in the default ladder.
pub const DEFAULT_LADDER_DEPTH: i32 = 6;
const RATIO_GRID: usize = 64;

/// Truncation points used to approximate an unbounded support.
#[derive(Debug, Clone, PartialEq)]
pub enum Ladder {
    /// Tail probabilities `p`; the truncation point for `p` is where the
    /// larger of the two survival functions falls to `p`.
    Quantiles(Vec<f64>),
    /// Explicit right ends.
    Points(Vec<f64>),
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder::Quantiles((1..=DEFAULT_LADDER_DEPTH).map(|j| 10f64.powi(-j)).collect())
    }
}

impl Ladder {
    /// Ascending truncation points for a pair of distributions.
    pub fn points(&self, d1: &LossDistribution, d2: &LossDistribution) -> Vec<f64> {
        let mut pts: Vec<f64> = match self {
            Ladder::Points(p) => p.clone(),
            Ladder::Quantiles(ps) => ps
                .iter()
                .map(|&p| d1.upper_quantile(p).max(d2.upper_quantile(p)))
                .collect(),
        };
        pts.retain(|x| x.is_finite() && *x > 1.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// `Some(relation)` when `f1/f2` (or `f2/f1`) visibly tends to zero on
/// `[lo, top]`, the last decade of the ladder.
fn ratio_criterion(d1: &LossDistribution, d2: &LossDistribution, lo: f64, top: f64) -> Option<Relation> {
    if d1.is_discrete() || d2.is_discrete() {
        return None;
    }
    let lo = lo.max(1.0);
    if !(lo < top) {
        return None;
    }
    let step = (top / lo).ln() / (RATIO_GRID - 1) as f64;
    let mut r = Vec::with_capacity(RATIO_GRID);
    for i in 0..RATIO_GRID {
        let x = lo * (step * i as f64).exp();
        let (l1, l2) = (d1.ln_pdf(x), d2.ln_pdf(x));
        if !l1.is_finite() || !l2.is_finite() {
            return None;
        }
        r.push(l1 - l2);
    }
    let limit = RATIO_LIMIT.ln();
    let decreasing = |v: &[f64], s: f64| v.windows(2).all(|w| s * w[1] <= s * w[0] + 1e-12);
    let last = *r.last().unwrap();
    if last < limit && decreasing(&r, 1.0) {
        Some(Relation::FirstStrictlyPreferred)
    } else if -last < limit && decreasing(&r, -1.0) {
        Some(Relation::SecondStrictlyPreferred)
    } else {
        None
    }
}

/// Extended order for distributions with unbounded support.
///
/// Tries the density-ratio limit first; otherwise compares the truncations
/// to `[1, a]` at every ladder point `a` and reports a preference only when
/// all of them agree.
pub fn compare_extended(
    d1: &LossDistribution,
    d2: &LossDistribution,
    options: &CompareOptions,
) -> Result<PreferenceVerdict> {
    let points = options.ladder.points(d1, d2);
    let Some(&top) = points.last() else {
        return Err(LossError::InvalidConfig("truncation ladder has no point above 1".into()));
    };
    let below = if points.len() > 1 { points[points.len() - 2] } else { top / 10.0 };
    if let Some(relation) = ratio_criterion(d1, d2, below, top) {
        return Ok(PreferenceVerdict::new(relation, Rule::RatioCriterion));
    }
    let mut rungs = Vec::with_capacity(points.len());
    for &a in &points {
        for b in rung_points(d1, d2, a)? {
            let t1: LossDistribution = d1.truncate(1.0, b)?.into();
            let t2: LossDistribution = d2.truncate(1.0, b)?.into();
            rungs.push((b, compare(&t1, &t2, options)?.relation));
        }
    }
    let first = rungs[0].1;
    if rungs.iter().all(|&(_, r)| r == first) {
        return Ok(PreferenceVerdict::new(first, Rule::TruncationLadder));
    }
    let detail: Vec<String> = rungs.iter().map(|(a, r)| format!("{a}: {r:?}")).collect();
    Ok(PreferenceVerdict::new(Relation::Incomparable, Rule::TruncationLadder)
        .with_caveat(format!("truncations disagree ({})", detail.join(", "))))
}

/// Right ends probed for the rung at `a`. For discrete inputs the truncation
/// sequence matters: cutting at the top atom of either input below `a` is as
/// valid a choice as `a` itself, and interleaved lattices answer differently.
fn rung_points(d1: &LossDistribution, d2: &LossDistribution, a: f64) -> Result<Vec<f64>> {
    let mut out = vec![a];
    if d1.is_discrete() || d2.is_discrete() {
        for d in [d1, d2] {
            if !d.is_discrete() {
                continue;
            }
            let t = match d.truncate(1.0, a) {
                Ok(t) => t,
                Err(LossError::EmptyTruncation { .. }) => continue,
                Err(e) => return Err(e),
            };
            if let Some(top) = t.atoms().map(|atoms| atoms.upper()) {
                if top > 1.0 && top < a {
                    out.push(top);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}
