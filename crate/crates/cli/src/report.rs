//! The JSON report written by `compare` and `kde`.

use lossorder::{
    tail_threshold, EvidencePoint, KernelDensityEstimate, LossDistribution, PreferenceVerdict, Relation,
    TailThreshold,
};
use serde::Serialize;

use crate::error::CliError;

const PLOT_POINTS: usize = 512;

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub name: String,
    pub kind: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ThresholdReport {
    pub x0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Number of grid points checked above `x0`.
    pub checked_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Vec<EvidencePoint>>,
}

#[derive(Debug, Serialize)]
pub struct MomentRow {
    pub k: usize,
    pub first: Option<f64>,
    pub second: Option<f64>,
    pub ln_first: Option<f64>,
    pub ln_second: Option<f64>,
}

/// Densities (or point masses when both inputs are discrete) and survival
/// functions on a shared grid.
#[derive(Debug, Serialize)]
pub struct PlotData {
    pub mass: bool,
    pub x: Vec<f64>,
    pub f1: Vec<Option<f64>>,
    pub f2: Vec<Option<f64>>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct KdeSummary {
    pub sample_sizes: [usize; 2],
    pub bandwidths: [f64; 2],
    pub effective_upper_bounds: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct ComparisonReport {
    pub inputs: [InputInfo; 2],
    pub verdict: PreferenceVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<ThresholdReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moment_table: Option<Vec<MomentRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot_data: Option<PlotData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kde: Option<KdeSummary>,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Extras {
    pub threshold: bool,
    pub evidence: bool,
    pub moments: Option<usize>,
    pub plot_data: bool,
}

impl ComparisonReport {
    pub fn build(
        names: [String; 2],
        d: [&LossDistribution; 2],
        verdict: PreferenceVerdict,
        extras: Extras,
    ) -> Result<Self, CliError> {
        let [n1, n2] = names;
        let x0 = match (extras.threshold, verdict.relation) {
            (true, r) if r != Relation::Incomparable => {
                Some(threshold_report(tail_threshold(d[0], d[1], &verdict)?, extras.evidence))
            }
            _ => None,
        };
        Ok(ComparisonReport {
            inputs: [InputInfo { name: n1, kind: d[0].kind() }, InputInfo { name: n2, kind: d[1].kind() }],
            verdict,
            x0,
            moment_table: extras.moments.map(|k| moment_table(d[0], d[1], k)),
            plot_data: extras.plot_data.then(|| plot_data(d[0], d[1])),
            kde: None,
        })
    }

    pub fn with_kdes(mut self, k1: &KernelDensityEstimate, k2: &KernelDensityEstimate) -> Self {
        self.kde = Some(KdeSummary {
            sample_sizes: [k1.samples().len(), k2.samples().len()],
            bandwidths: [k1.bandwidth(), k2.bandwidth()],
            effective_upper_bounds: [k1.effective_upper_bound(), k2.effective_upper_bound()],
        });
        self
    }

    pub fn exit_code(&self) -> i32 {
        relation_code(self.verdict.relation)
    }
}

pub fn relation_code(r: Relation) -> i32 {
    match r {
        Relation::FirstStrictlyPreferred => 0,
        Relation::SecondStrictlyPreferred => 1,
        Relation::Equivalent => 2,
        Relation::Incomparable => 3,
    }
}

fn threshold_report(t: TailThreshold, evidence: bool) -> ThresholdReport {
    ThresholdReport {
        x0: t.x0,
        label: t.label,
        checked_points: t.grid.len(),
        evidence: evidence.then_some(t.grid),
    }
}

fn moment_table(d1: &LossDistribution, d2: &LossDistribution, k_max: usize) -> Vec<MomentRow> {
    (1..=k_max)
        .map(|k| {
            let (l1, l2) = (d1.log_moment(k).ok(), d2.log_moment(k).ok());
            MomentRow {
                k,
                first: d1.moment(k).ok(),
                second: d2.moment(k).ok(),
                ln_first: l1,
                ln_second: l2,
            }
        })
        .collect()
}

fn lower_end(d: &LossDistribution) -> f64 {
    let l = d.support().lower;
    if l.is_finite() {
        l
    } else {
        d.quantile(1e-6)
    }
}

fn upper_end(d: &LossDistribution) -> f64 {
    let u = d.support().upper;
    if u.is_finite() {
        u
    } else {
        d.upper_quantile(1e-6)
    }
}

fn support_points(d: &LossDistribution, hi: f64) -> Vec<f64> {
    if let Some(a) = d.finite_atoms() {
        return a.values;
    }
    if let LossDistribution::PoissonLattice(l) = d {
        return (0..)
            .map(|n| l.offset() + l.spacing() * n as f64)
            .take_while(|&x| x <= hi)
            .collect();
    }
    Vec::new()
}

fn plot_data(d1: &LossDistribution, d2: &LossDistribution) -> PlotData {
    let lo = lower_end(d1).min(lower_end(d2));
    let hi = upper_end(d1).max(upper_end(d2));
    if d1.is_discrete() && d2.is_discrete() {
        let mut x = support_points(d1, hi);
        x.extend(support_points(d2, hi));
        x.sort_by(f64::total_cmp);
        x.dedup();
        let gap = x.windows(2).map(|w| w[1] - w[0]).fold(1.0, f64::min) / 2.0;
        let mass = |d: &LossDistribution, x: f64| Some(d.cdf_at(x) - d.cdf_at(x - gap));
        return PlotData {
            mass: true,
            f1: x.iter().map(|&x| mass(d1, x)).collect(),
            f2: x.iter().map(|&x| mass(d2, x)).collect(),
            s1: x.iter().map(|&x| d1.survival_at(x)).collect(),
            s2: x.iter().map(|&x| d2.survival_at(x)).collect(),
            x,
        };
    }
    let x: Vec<f64> = (0..PLOT_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (PLOT_POINTS - 1) as f64)
        .collect();
    PlotData {
        mass: false,
        f1: x.iter().map(|&x| d1.pdf_at(x).ok()).collect(),
        f2: x.iter().map(|&x| d2.pdf_at(x).ok()).collect(),
        s1: x.iter().map(|&x| d1.survival_at(x)).collect(),
        s2: x.iter().map(|&x| d2.survival_at(x)).collect(),
        x,
    }
}
