use super::{equivalence_caveat, CompareOptions, MomentSequence, PreferenceVerdict, Relation, Rule};
use super::moments::compare_moment_sequences;
use crate::distributions::{Atoms, CategoricalDistribution, LossDistribution, PiecewisePolyDensity, PointMass};
use crate::error::{LossError, Result};

/// Probabilities closer than this are equal.
pub const PMF_TOL: f64 = 1e-12;

fn lex(pairs: impl Iterator<Item = (f64, f64)>, tol: impl Fn(f64, f64) -> f64) -> Relation {
    for (a, b) in pairs {
        if (a - b).abs() > tol(a, b) {
            return if a < b {
                Relation::FirstStrictlyPreferred
            } else {
                Relation::SecondStrictlyPreferred
            };
        }
    }
    Relation::Equivalent
}

/// Lexicographic order of two pmfs listed from the most severe category
/// down: less mass on the worst outcome wins.
pub fn compare_categorical(p: &CategoricalDistribution, q: &CategoricalDistribution) -> Result<PreferenceVerdict> {
    if p.labels() != q.labels() || p.ranks() != q.ranks() {
        return Err(LossError::SupportMismatch(format!(
            "category sets differ: {:?} vs {:?}",
            p.labels(),
            q.labels()
        )));
    }
    let relation = lex(p.pmf().iter().copied().zip(q.pmf().iter().copied()), |_, _| PMF_TOL);
    Ok(PreferenceVerdict::new(relation, Rule::CategoricalLex))
}

/// Lexicographic order of two finite pmfs over the union of their support
/// points, scanned from the largest loss downwards.
pub fn compare_atoms(a1: &Atoms, a2: &Atoms) -> PreferenceVerdict {
    let mut points: Vec<f64> = a1.values.iter().chain(&a2.values).copied().collect();
    points.sort_by(|x, y| y.total_cmp(x));
    points.dedup();
    let relation = lex(points.iter().map(|&x| (a1.pmf(x), a2.pmf(x))), |_, _| PMF_TOL);
    let v = PreferenceVerdict::new(relation, Rule::CategoricalLex);
    equivalence_caveat(v)
}

/// A deterministic loss `a` against a random loss `Y` with right end `b`:
/// `a < b` prefers the point mass, otherwise `Y` is preferred.
pub fn compare_point_mass(a: &PointMass, y: &LossDistribution) -> PreferenceVerdict {
    let relation = match y {
        LossDistribution::PointMass(b) if b.value() == a.value() => Relation::Equivalent,
        _ => {
            if a.value() < y.support().upper {
                Relation::FirstStrictlyPreferred
            } else {
                Relation::SecondStrictlyPreferred
            }
        }
    };
    PreferenceVerdict::new(relation, Rule::PointMassRule)
}

fn derivative_lex(df: Vec<f64>, dg: Vec<f64>) -> Relation {
    let signed = |d: Vec<f64>| -> Vec<f64> {
        d.into_iter()
            .enumerate()
            .map(|(k, v)| if k % 2 == 0 { v } else { -v })
            .collect()
    };
    lex(signed(df).into_iter().zip(signed(dg)), |x, y| 1e-9f64.max(1e-9 * x.abs().max(y.abs())))
}

/// Derivative-lexicographic order for two piecewise polynomials, applied at
/// the largest point below which the densities differ. Above that point the
/// moment difference has no contribution, so it decides the order exactly.
fn compare_piecewise(p: &PiecewisePolyDensity, q: &PiecewisePolyDensity) -> PreferenceVerdict {
    let mut cuts: Vec<f64> = p.breakpoints().iter().chain(q.breakpoints()).copied().collect();
    cuts.sort_by(|x, y| y.total_cmp(x));
    cuts.dedup();
    let n = p.degree().max(q.degree());
    for &hi in &cuts {
        let relation = derivative_lex(p.left_derivatives(hi, n), q.left_derivatives(hi, n));
        if relation != Relation::Equivalent {
            return PreferenceVerdict::new(relation, Rule::DerivativeLex);
        }
    }
    equivalence_caveat(PreferenceVerdict::new(Relation::Equivalent, Rule::DerivativeLex))
}

/// Lexicographic order of `((-1)^k f^(k)(a))_k` at the common right end
/// `a`, for `k = 0..=k_der`; exhausted ties fall back to moment sequences.
pub fn compare_smooth(f: &LossDistribution, g: &LossDistribution, options: &CompareOptions) -> Result<PreferenceVerdict> {
    if f == g {
        return Ok(PreferenceVerdict::new(Relation::Equivalent, Rule::Identity));
    }
    let (a, b) = (f.support().upper, g.support().upper);
    if !a.is_finite() || !((a - b).abs() <= 1e-9 * a.abs().max(1.0)) {
        return Err(LossError::SupportMismatch(format!(
            "derivative comparison needs a common finite right end, got {a} and {b}"
        )));
    }
    if let (LossDistribution::PiecewisePoly(p), LossDistribution::PiecewisePoly(q)) = (f, g) {
        return Ok(compare_piecewise(p, q));
    }
    if let (Some(df), Some(dg)) = (f.derivatives_at(a, options.k_der), g.derivatives_at(a, options.k_der)) {
        let relation = derivative_lex(df, dg);
        if relation != Relation::Equivalent {
            return Ok(PreferenceVerdict::new(relation, Rule::DerivativeLex));
        }
    }
    let m1 = MomentSequence::compute(f, options.k_max)?;
    let m2 = MomentSequence::compute(g, options.k_max)?;
    compare_moment_sequences(&m1, &m2, options)
}
