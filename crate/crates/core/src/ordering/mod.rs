//! The preference order on loss distributions.
//!
//! `F1 ≼ F2` when the moments of `F1` are eventually no larger than those
//! of `F2`. [`compare`] picks the cheapest rule that decides a pair; the
//! individual rules are exported for direct use.

mod extended;
mod lex;
mod moments;
mod threshold;

pub use extended::{compare_extended, Ladder, DEFAULT_LADDER_DEPTH, RATIO_LIMIT};
pub use lex::{compare_atoms, compare_categorical, compare_point_mass, compare_smooth, PMF_TOL};
pub use moments::{compare_moment_sequences, MomentSequence, MOMENT_NOISE_TOL, MOMENT_TIE_TOL};
pub use threshold::{tail_threshold, EvidencePoint, TailThreshold, SURVIVAL_TOL, THRESHOLD_GRID};

use serde::{Deserialize, Serialize};

use crate::distributions::LossDistribution;
use crate::error::{LossError, Result};
use crate::kde::compare_kdes;

/// Default length of the moment prefix.
pub const DEFAULT_K_MAX: usize = 64;
/// Consecutive strict comparisons required to declare dominance.
pub const DEFAULT_WINDOW: usize = 8;
/// Signed derivatives examined before falling back to moments.
pub const DEFAULT_K_DER: usize = 16;
/// Probability allowed below 1 before a distribution is rejected.
pub const BELOW_ONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    FirstStrictlyPreferred,
    SecondStrictlyPreferred,
    Equivalent,
    Incomparable,
}

impl Relation {
    pub fn flipped(self) -> Relation {
        match self {
            Relation::FirstStrictlyPreferred => Relation::SecondStrictlyPreferred,
            Relation::SecondStrictlyPreferred => Relation::FirstStrictlyPreferred,
            r => r,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::FirstStrictlyPreferred | Relation::SecondStrictlyPreferred)
    }
}

/// The rule that settled a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Both inputs are the same object.
    Identity,
    /// Compact supports with different right ends.
    SupportBound,
    CategoricalLex,
    DerivativeLex,
    MomentDominance,
    PointMassRule,
    TruncationLadder,
    RatioCriterion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceVerdict {
    pub relation: Relation,
    pub decided_by: Rule,
    /// First moment order of the stable dominance run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilization_index: Option<usize>,
    /// Right end of the narrower support when the support rule applied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

impl PreferenceVerdict {
    pub fn new(relation: Relation, decided_by: Rule) -> Self {
        PreferenceVerdict {
            relation,
            decided_by,
            stabilization_index: None,
            support_bound: None,
            caveat: None,
        }
    }

    pub fn with_stabilization(mut self, k: usize) -> Self {
        self.stabilization_index = Some(k);
        self
    }

    pub fn with_caveat(mut self, caveat: impl Into<String>) -> Self {
        self.caveat = Some(caveat.into());
        self
    }

    /// The same verdict with the roles of the two inputs exchanged.
    pub fn flipped(mut self) -> Self {
        self.relation = self.relation.flipped();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub k_max: usize,
    pub window: usize,
    pub k_der: usize,
    /// Declares that category ranks live on the same numeric scale as the
    /// other input, allowing categorical-vs-numeric comparisons.
    pub common_scale: bool,
    pub ladder: Ladder,
    /// Reject compactly supported inputs with mass below 1.
    pub check_admissible: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            k_max: DEFAULT_K_MAX,
            window: DEFAULT_WINDOW,
            k_der: DEFAULT_K_DER,
            common_scale: false,
            ladder: Ladder::default(),
            check_admissible: true,
        }
    }
}

impl CompareOptions {
    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self
    }
}

fn check_admissible(d: &LossDistribution) -> Result<()> {
    let s = d.support();
    if s.lower.is_finite() && s.lower < 1.0 {
        let below = d.mass_below_one();
        if below > BELOW_ONE_TOL {
            return Err(LossError::Inadmissible(format!(
                "{} puts probability {below:.3e} below 1; shift losses onto [1, ∞)",
                d.kind()
            )));
        }
    }
    Ok(())
}

fn as_numeric(d: &LossDistribution) -> LossDistribution {
    match d {
        LossDistribution::Categorical(c) => LossDistribution::Discrete(c.atoms().into()),
        other => other.clone(),
    }
}

/// Decides `d1 ≼ d2` with the first applicable rule:
/// identical inputs, categorical lexicographic order, KDE comparison, point
/// masses, the support rule, lexicographic order on finite atoms, the
/// extended order for unbounded supports, derivative-lexicographic order
/// and finally the moment sequences.
pub fn compare(d1: &LossDistribution, d2: &LossDistribution, options: &CompareOptions) -> Result<PreferenceVerdict> {
    use LossDistribution as D;
    if d1 == d2 {
        return Ok(PreferenceVerdict::new(Relation::Equivalent, Rule::Identity));
    }
    match (d1, d2) {
        (D::Categorical(p), D::Categorical(q)) => return compare_categorical(p, q),
        (D::Categorical(_), _) | (_, D::Categorical(_)) => {
            if !options.common_scale {
                return Err(LossError::MeaninglessComparison(
                    "ordinal categories and numeric losses need a declared common scale".into(),
                ));
            }
            return compare(&as_numeric(d1), &as_numeric(d2), options);
        }
        _ => {}
    }
    if options.check_admissible {
        check_admissible(d1)?;
        check_admissible(d2)?;
    }
    match (d1, d2) {
        (D::Kde(k1), D::Kde(k2)) => return compare_kdes(k1, k2, options),
        (D::Kde(k), other) => {
            let t = d1.truncate(f64::NEG_INFINITY, k.effective_upper_bound())?;
            return compare(&t.into(), other, options);
        }
        (other, D::Kde(k)) => {
            let t = d2.truncate(f64::NEG_INFINITY, k.effective_upper_bound())?;
            return compare(other, &t.into(), options);
        }
        (D::PointMass(a), other) => return Ok(compare_point_mass(a, other)),
        (other, D::PointMass(a)) => return Ok(compare_point_mass(a, other).flipped()),
        _ => {}
    }

    let s1 = d1.support();
    let s2 = d2.support();
    let scale = [s1.upper, s2.upper]
        .iter()
        .filter(|u| u.is_finite())
        .fold(1.0f64, |m, u| m.max(u.abs()));
    if (s1.upper.is_finite() || s2.upper.is_finite()) && !((s1.upper - s2.upper).abs() <= 1e-9 * scale) {
        let (relation, bound) = if s1.upper < s2.upper {
            (Relation::FirstStrictlyPreferred, s1.upper)
        } else {
            (Relation::SecondStrictlyPreferred, s2.upper)
        };
        let mut v = PreferenceVerdict::new(relation, Rule::SupportBound);
        v.support_bound = Some(bound);
        return Ok(v);
    }

    if let (Some(a1), Some(a2)) = (d1.finite_atoms(), d2.finite_atoms()) {
        return Ok(compare_atoms(&a1, &a2));
    }
    if s1.upper.is_infinite() && s2.upper.is_infinite() {
        return compare_extended(d1, d2, options);
    }
    if !d1.is_discrete() && !d2.is_discrete() {
        let a = s1.upper;
        if d1.derivatives_at(a, 0).is_some() && d2.derivatives_at(a, 0).is_some() {
            return compare_smooth(d1, d2, options);
        }
    }
    let m1 = MomentSequence::compute(d1, options.k_max)?;
    let m2 = MomentSequence::compute(d2, options.k_max)?;
    let v = compare_moment_sequences(&m1, &m2, options)?;
    Ok(equivalence_caveat(v))
}

pub(crate) fn equivalence_caveat(v: PreferenceVerdict) -> PreferenceVerdict {
    if v.relation == Relation::Equivalent && v.caveat.is_none() {
        v.with_caveat("distinct inputs whose compared values agree within tolerance")
    } else {
        v
    }
}
