//! Shared inputs for the benchmarks.

use lossorder::ingest::{self, fixtures, ScaleSpec};
use lossorder::{CategoricalDistribution, KernelDensityEstimate, LossDistribution, ParametricDistribution};

pub fn gumbel_pair() -> (LossDistribution, LossDistribution) {
    (
        ParametricDistribution::gumbel(31.0063, 1.74346).unwrap().into(),
        ParametricDistribution::gumbel(32.0063, 1.74346).unwrap().into(),
    )
}

pub fn gamma_weibull_pair() -> (LossDistribution, LossDistribution) {
    (
        ParametricDistribution::gamma(260.345, 0.0373929).unwrap().into(),
        ParametricDistribution::weibull(20.0, 10.0).unwrap().into(),
    )
}

pub fn outbreak_pair() -> (LossDistribution, LossDistribution) {
    let mut cols = ingest::parse_counts(fixtures::TABLE2_CSV).unwrap().into_iter();
    let (_, c1) = cols.next().unwrap();
    let (_, c2) = cols.next().unwrap();
    (c2.into(), c1.into())
}

pub fn rating_pair() -> (CategoricalDistribution, CategoricalDistribution) {
    let mut g = ingest::parse_ratings(fixtures::TABLE1_CSV, &ScaleSpec::cvss(), "scenario").unwrap();
    (g.remove("1").unwrap(), g.remove("2").unwrap())
}

pub fn nile_kdes() -> (KernelDensityEstimate, KernelDensityEstimate) {
    let halves = ingest::parse_series(fixtures::NILE_CSV, Some(50)).unwrap();
    (
        KernelDensityEstimate::fit(&halves[0]).unwrap(),
        KernelDensityEstimate::fit(&halves[1]).unwrap(),
    )
}
