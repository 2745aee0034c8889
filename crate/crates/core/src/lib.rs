//! Total preference order on loss distributions.
//!
//! A loss distribution `F1` is preferred to `F2` (`F1 ≼ F2`) when its
//! moment sequence `E[X^k]` is eventually dominated by that of `F2`. For
//! distributions on `[1, ∞)` with compact support this order is total and
//! is decided by the mass near the right end of the support, which is what
//! the fast rules in [`ordering`] exploit.
//!
//! ```
//! use lossorder::{compare, CompareOptions, ParametricDistribution, Relation};
//!
//! let f1 = ParametricDistribution::gamma(260.345, 0.0373929).unwrap().into();
//! let f2 = ParametricDistribution::weibull(20.0, 10.0).unwrap().into();
//! let v = compare(&f1, &f2, &CompareOptions::default()).unwrap();
//! assert_eq!(v.relation, Relation::SecondStrictlyPreferred);
//! ```

// `!(a < b)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod ingest;
pub mod kde;
pub mod numeric;
pub mod ordering;
pub mod simulate;

pub use distributions::{
    Atoms, CategoricalDistribution, DiscreteDistribution, HistogramDistribution, LossDistribution, ParametricDistribution,
    PiecewisePolyDensity, PointMass, PoissonLattice, SupportInterval, TruncatedDistribution,
};
pub use error::{LossError, Result};
pub use kde::{compare_kdes, KernelDensityEstimate};
pub use ordering::{
    compare, compare_categorical, compare_extended, compare_moment_sequences, compare_point_mass, compare_smooth,
    tail_threshold, CompareOptions, EvidencePoint, Ladder, MomentSequence, PreferenceVerdict, Relation, Rule, TailThreshold,
};
pub use simulate::{simulate_outbreaks, Graph, InitialInfection, OutbreakConfig, OutbreakHistogram};
