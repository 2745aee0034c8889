//! Loss distributions and their evaluation: densities, distribution and
//! survival functions, log-domain moments and truncation.

mod discrete;
mod parametric;
mod piecewise;
mod truncated;

pub use discrete::{
    Atoms, CategoricalDistribution, DiscreteDistribution, HistogramDistribution, PointMass, PoissonLattice,
    PMF_SUM_TOL,
};
pub use parametric::ParametricDistribution;
pub use piecewise::{PiecewisePolyDensity, NONNEGATIVITY_GRID, NORMALIZATION_TOL};
pub use truncated::TruncatedDistribution;

use serde::{Deserialize, Serialize};

use crate::error::{LossError, Result};
use crate::kde::KernelDensityEstimate;
use crate::numeric::{self, log_integral, signed_log_sum, SignedLog};

/// Closed interval `[lower, upper]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    pub lower: f64,
    pub upper: f64,
}

impl SupportInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(LossError::InvalidConfig(format!("invalid interval [{lower}, {upper}]")));
        }
        Ok(SupportInterval { lower, upper })
    }

    pub fn is_compact(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// Every representation of a loss distribution the library can compare.
#[derive(Debug, Clone, PartialEq)]
pub enum LossDistribution {
    Categorical(CategoricalDistribution),
    Histogram(HistogramDistribution),
    Discrete(DiscreteDistribution),
    PiecewisePoly(PiecewisePolyDensity),
    Parametric(ParametricDistribution),
    Truncated(TruncatedDistribution),
    Kde(KernelDensityEstimate),
    PointMass(PointMass),
    PoissonLattice(PoissonLattice),
}

use LossDistribution as D;

impl LossDistribution {
    pub fn kind(&self) -> &'static str {
        match self {
            D::Categorical(_) => "categorical",
            D::Histogram(_) => "histogram",
            D::Discrete(_) => "discrete",
            D::PiecewisePoly(_) => "piecewise",
            D::Parametric(_) => "parametric",
            D::Truncated(_) => "truncated",
            D::Kde(_) => "kde",
            D::PointMass(_) => "point",
            D::PoissonLattice(_) => "lattice",
        }
    }

    /// True when the distribution puts its mass on isolated points.
    pub fn is_discrete(&self) -> bool {
        match self {
            D::Categorical(_) | D::Histogram(_) | D::Discrete(_) | D::PointMass(_) | D::PoissonLattice(_) => true,
            D::Truncated(t) => t.base().is_discrete(),
            _ => false,
        }
    }

    /// Atoms of a discrete distribution with finitely many support points.
    pub fn finite_atoms(&self) -> Option<Atoms> {
        match self {
            D::Categorical(c) => Some(c.atoms()),
            D::Histogram(h) => Some(h.atoms()),
            D::Discrete(d) => Some(d.atoms()),
            D::PointMass(p) => Some(Atoms { values: vec![p.value()], probs: vec![1.0] }),
            D::Truncated(t) => t.atoms().cloned(),
            _ => None,
        }
    }

    /// Closure of the set carrying positive probability.
    pub fn support(&self) -> SupportInterval {
        if let Some(a) = self.finite_atoms() {
            return SupportInterval { lower: a.lower(), upper: a.upper() };
        }
        let (lower, upper) = match self {
            D::PiecewisePoly(p) => (p.lower(), p.upper()),
            D::Parametric(p) => p.support(),
            D::Kde(_) => (f64::NEG_INFINITY, f64::INFINITY),
            D::PoissonLattice(l) => (l.offset(), f64::INFINITY),
            D::Truncated(t) => {
                let b = t.base().support();
                let (lo, hi) = t.window();
                (lo.max(b.lower), hi.min(b.upper))
            }
            _ => unreachable!("finite-atom distributions handled above"),
        };
        SupportInterval { lower, upper }
    }

    /// Density (or probability mass for discrete families) at `x`.
    pub fn pdf_at(&self, x: f64) -> Result<f64> {
        match self {
            D::PointMass(_) => Err(LossError::NoDensity),
            _ => Ok(self.ln_pdf(x).exp()),
        }
    }

    /// Logarithm of the density, or of the mass function for discrete
    /// families; `-inf` outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if let Some(a) = self.finite_atoms() {
            return a.pmf(x).ln();
        }
        match self {
            D::PiecewisePoly(p) => p.pdf(x).ln(),
            D::Parametric(p) => p.ln_pdf(x),
            D::Kde(k) => k.ln_pdf(x),
            D::PoissonLattice(l) => l.ln_pmf(x),
            D::Truncated(t) => {
                if t.contains(x) {
                    t.base().ln_pdf(x) - t.ln_mass()
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ => unreachable!("finite-atom distributions handled above"),
        }
    }

    /// `P(X <= x)`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if let Some(a) = self.finite_atoms() {
            return a.cdf(x);
        }
        match self {
            D::PiecewisePoly(p) => p.cdf(x),
            D::Parametric(p) => p.cdf(x),
            D::Kde(k) => k.cdf(x),
            D::PoissonLattice(l) => l.cdf(x),
            D::Truncated(t) => {
                let (lo, hi) = t.window();
                if x <= lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    (t.base().mass_between(lo, x) / t.mass()).clamp(0.0, 1.0)
                }
            }
            _ => unreachable!("finite-atom distributions handled above"),
        }
    }

    /// `P(X > x)`, evaluated directly where the family allows so that far
    /// upper tails keep their relative precision.
    pub fn survival_at(&self, x: f64) -> f64 {
        if let Some(a) = self.finite_atoms() {
            return a.sf(x);
        }
        match self {
            D::PiecewisePoly(p) => 1.0 - p.cdf(x),
            D::Parametric(p) => p.sf(x),
            D::Kde(k) => k.sf(x),
            D::PoissonLattice(l) => l.sf(x),
            D::Truncated(t) => self.truncated_sf(t, x),
            _ => unreachable!("finite-atom distributions handled above"),
        }
    }

    fn truncated_sf(&self, t: &TruncatedDistribution, x: f64) -> f64 {
        let (lo, hi) = t.window();
        if x < lo {
            return 1.0;
        }
        if x >= hi {
            return 0.0;
        }
        (t.base().mass_between(x, hi) / t.mass()).clamp(0.0, 1.0)
    }

    /// `P(a < X <= b)` for a continuous distribution, taken from whichever
    /// tail keeps more precision.
    pub(crate) fn mass_between(&self, a: f64, b: f64) -> f64 {
        let from_cdf = self.cdf_at(b) - self.cdf_at(a);
        if self.cdf_at(a) > 0.5 {
            (self.survival_at(a) - self.survival_at(b)).max(0.0)
        } else {
            from_cdf.max(0.0)
        }
    }

    /// Rough centre and spread of the distribution.
    pub fn location_scale_hint(&self) -> (f64, f64) {
        if let Some(a) = self.finite_atoms() {
            let m: f64 = a.values.iter().zip(&a.probs).map(|(v, p)| v * p).sum();
            let var: f64 = a.values.iter().zip(&a.probs).map(|(v, p)| p * (v - m).powi(2)).sum();
            return (m, var.sqrt().max(1e-3 * m.abs().max(1.0)));
        }
        match self {
            D::PiecewisePoly(p) => (0.5 * (p.lower() + p.upper()), 0.25 * (p.upper() - p.lower())),
            D::Parametric(p) => p.location_scale_hint(),
            D::Kde(k) => (k.mean(), k.spread()),
            D::PoissonLattice(l) => (
                l.offset() + l.spacing() * l.rate(),
                l.spacing() * l.rate().sqrt().max(1.0),
            ),
            D::Truncated(t) => {
                let (lo, hi) = t.window();
                let (c, w) = t.base().location_scale_hint();
                match (lo.is_finite(), hi.is_finite()) {
                    (true, true) => (0.5 * (lo + hi), 0.25 * (hi - lo)),
                    (true, false) => (c.max(lo), w),
                    (false, true) => (c.min(hi), w),
                    (false, false) => (c, w),
                }
            }
            _ => unreachable!("finite-atom distributions handled above"),
        }
    }

    /// Points where the density may be discontinuous.
    fn breaks(&self) -> Vec<f64> {
        match self {
            D::PiecewisePoly(p) => p.breakpoints().to_vec(),
            D::Truncated(t) => {
                let (lo, hi) = t.window();
                let mut b = t.base().breaks();
                b.extend([lo, hi].into_iter().filter(|x| x.is_finite()));
                b
            }
            _ => Vec::new(),
        }
    }

    /// `E[X^k]`; overflows to infinity long before [`Self::log_moment`] does.
    pub fn moment(&self, k: usize) -> Result<f64> {
        self.log_moment(k).map(f64::exp)
    }

    /// `ln E[X^k]` for `k >= 1`.
    pub fn log_moment(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(LossError::InvalidOrder(0));
        }
        if let Some(a) = self.finite_atoms() {
            return a.log_moment(k);
        }
        match self {
            D::PoissonLattice(l) => l.log_moment(k),
            D::Parametric(p) => match p.closed_form_log_moment(k) {
                Some(v) => Ok(v),
                None => self.log_moment_by_quadrature(k),
            },
            _ => self.log_moment_by_quadrature(k),
        }
    }

    /// `ln E[X^k]` by adaptive quadrature of `x^k f(x)`, split at zero.
    pub fn log_moment_by_quadrature(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(LossError::InvalidOrder(0));
        }
        if self.is_discrete() {
            return self.log_moment(k);
        }
        let s = self.support();
        let hint = self.location_scale_hint();
        let breaks = self.breaks();
        let kf = k as f64;
        let mut parts = Vec::with_capacity(2);
        if s.upper > 0.0 {
            let g = |x: f64| {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    self.ln_pdf(x) + kf * x.ln()
                }
            };
            if let Some(v) = log_integral(g, s.lower.max(0.0), s.upper, &breaks, hint)? {
                parts.push(SignedLog { sign: 1.0, log_abs: v });
            }
        }
        if s.lower < 0.0 {
            let g = |x: f64| {
                if x >= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    self.ln_pdf(x) + kf * (-x).ln()
                }
            };
            if let Some(v) = log_integral(g, s.lower, s.upper.min(0.0), &breaks, hint)? {
                let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
                parts.push(SignedLog { sign, log_abs: v });
            }
        }
        let total = signed_log_sum(parts);
        if total.sign <= 0.0 {
            return Err(LossError::NonPositiveMoment { k });
        }
        Ok(total.log_abs)
    }

    /// Smallest `x` with `P(X <= x) >= q`.
    pub fn quantile(&self, q: f64) -> f64 {
        if let Some(a) = self.finite_atoms() {
            return a.quantile(q);
        }
        match self {
            D::Parametric(p) => p.quantile(q),
            D::PoissonLattice(l) => l.quantile(q),
            _ => {
                if q > 0.5 {
                    self.upper_quantile(1.0 - q)
                } else {
                    self.solve(|x| self.cdf_at(x) - q)
                }
            }
        }
    }

    /// Smallest `x` with `P(X > x) <= p`, solved on the survival function.
    pub fn upper_quantile(&self, p: f64) -> f64 {
        if let Some(a) = self.finite_atoms() {
            return a
                .values
                .iter()
                .copied()
                .find(|&v| a.sf(v) <= p)
                .unwrap_or_else(|| a.upper());
        }
        match self {
            D::PoissonLattice(l) => l.upper_quantile(p),
            D::Parametric(d @ ParametricDistribution::Gumbel { .. })
            | D::Parametric(d @ ParametricDistribution::Weibull { .. }) => {
                // closed-form inverses are exact through the upper tail
                let q = 1.0 - p;
                if q < 1.0 {
                    d.quantile(q)
                } else {
                    self.solve(|x| p - self.survival_at(x))
                }
            }
            _ => self.solve(|x| p - self.survival_at(x)),
        }
    }

    /// Root of a nondecreasing function over the support.
    fn solve<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let s = self.support();
        let (c, w) = self.location_scale_hint();
        let w = if w > 0.0 && w.is_finite() { w } else { 1.0 };
        let mut lo = if s.lower.is_finite() { s.lower } else { c - 10.0 * w };
        let mut hi = if s.upper.is_finite() { s.upper } else { c + 10.0 * w };
        let mut step = 10.0 * w;
        while f(lo) > 0.0 && !s.lower.is_finite() && step.is_finite() {
            lo -= step;
            step *= 2.0;
        }
        step = 10.0 * w;
        while f(hi) < 0.0 && !s.upper.is_finite() && step.is_finite() {
            hi += step;
            step *= 2.0;
        }
        if f(lo) >= 0.0 {
            return lo;
        }
        let (_, b) = numeric::bisect(&f, lo, hi, 200);
        b
    }

    /// Derivatives of orders `0..=n` of the density at `x`, where they can
    /// be evaluated in closed form.
    pub fn derivatives_at(&self, x: f64, n: usize) -> Option<Vec<f64>> {
        match self {
            D::Kde(k) => Some(k.derivatives(x, n)),
            D::Parametric(p) => p.derivatives(x, n),
            D::PiecewisePoly(p) => Some(p.derivatives(x, n)),
            D::Truncated(t) if !t.base().is_discrete() => {
                if !t.contains(x) {
                    return Some(vec![0.0; n + 1]);
                }
                let m = t.mass();
                t.base()
                    .derivatives_at(x, n)
                    .map(|d| d.into_iter().map(|v| v / m).collect())
            }
            _ => None,
        }
    }

    /// Conditions the distribution on `[lower, upper]`.
    pub fn truncate(&self, lower: f64, upper: f64) -> Result<TruncatedDistribution> {
        TruncatedDistribution::new(self.clone(), lower, upper)
    }

    /// `P(X < 1)`: the mass lying below the loss scale's origin.
    pub fn mass_below_one(&self) -> f64 {
        if let Some(a) = self.finite_atoms() {
            return a.cdf(1.0) - a.pmf(1.0);
        }
        self.cdf_at(1.0)
    }
}

impl From<CategoricalDistribution> for LossDistribution {
    fn from(d: CategoricalDistribution) -> Self {
        D::Categorical(d)
    }
}

impl From<HistogramDistribution> for LossDistribution {
    fn from(d: HistogramDistribution) -> Self {
        D::Histogram(d)
    }
}

impl From<DiscreteDistribution> for LossDistribution {
    fn from(d: DiscreteDistribution) -> Self {
        D::Discrete(d)
    }
}

impl From<PiecewisePolyDensity> for LossDistribution {
    fn from(d: PiecewisePolyDensity) -> Self {
        D::PiecewisePoly(d)
    }
}

impl From<ParametricDistribution> for LossDistribution {
    fn from(d: ParametricDistribution) -> Self {
        D::Parametric(d)
    }
}

impl From<TruncatedDistribution> for LossDistribution {
    fn from(d: TruncatedDistribution) -> Self {
        D::Truncated(d)
    }
}

impl From<KernelDensityEstimate> for LossDistribution {
    fn from(d: KernelDensityEstimate) -> Self {
        D::Kde(d)
    }
}

impl From<PointMass> for LossDistribution {
    fn from(d: PointMass) -> Self {
        D::PointMass(d)
    }
}

impl From<PoissonLattice> for LossDistribution {
    fn from(d: PoissonLattice) -> Self {
        D::PoissonLattice(d)
    }
}
