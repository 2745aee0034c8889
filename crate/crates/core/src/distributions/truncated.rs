use super::discrete::Atoms;
use super::LossDistribution;
use crate::error::{LossError, Result};

/// Conditional distribution `P(X <= x | lower <= X <= upper)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDistribution {
    base: Box<LossDistribution>,
    lower: f64,
    upper: f64,
    /// `ln P(lower <= X <= upper)` under the base distribution.
    ln_mass: f64,
    /// Renormalised atoms when the base is discrete with finite support.
    atoms: Option<Atoms>,
}

impl TruncatedDistribution {
    pub fn new(base: LossDistribution, lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || !(lower < upper) {
            return Err(LossError::InvalidConfig(format!(
                "truncation window [{lower}, {upper}] is empty"
            )));
        }
        let empty = || LossError::EmptyTruncation { lower, upper };
        if let Some(atoms) = base.finite_atoms() {
            let kept = atoms.restrict(lower, upper).ok_or_else(empty)?;
            let mass: f64 = atoms
                .values
                .iter()
                .zip(&atoms.probs)
                .filter(|(v, _)| **v >= lower && **v <= upper)
                .map(|(_, p)| p)
                .sum();
            return Ok(TruncatedDistribution {
                base: Box::new(base),
                lower,
                upper,
                ln_mass: mass.ln(),
                atoms: Some(kept),
            });
        }
        if let LossDistribution::PoissonLattice(l) = &base {
            let kept = l.atoms_within(lower, upper).ok_or_else(empty)?;
            let mass = (l.cdf(upper) - l.cdf(lower) + l.ln_pmf(lower).exp()).max(0.0);
            return Ok(TruncatedDistribution {
                base: Box::new(base),
                lower,
                upper,
                ln_mass: mass.ln(),
                atoms: Some(kept),
            });
        }
        let mass = base.mass_between(lower, upper);
        if !(mass > 0.0) {
            return Err(empty());
        }
        Ok(TruncatedDistribution {
            base: Box::new(base),
            lower,
            upper,
            ln_mass: mass.ln(),
            atoms: None,
        })
    }

    pub fn base(&self) -> &LossDistribution {
        &self.base
    }

    pub fn window(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// Base probability of the window.
    pub fn mass(&self) -> f64 {
        self.ln_mass.exp()
    }

    pub fn ln_mass(&self) -> f64 {
        self.ln_mass
    }

    pub fn atoms(&self) -> Option<&Atoms> {
        self.atoms.as_ref()
    }

    pub(crate) fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}
