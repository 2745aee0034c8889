use serde::{Deserialize, Serialize};

use crate::error::{LossError, Result};

/// Grid size used to check a density for negative values.
pub const NONNEGATIVITY_GRID: usize = 1024;
/// Allowed deviation of the total mass from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Density that is a polynomial on each cell of a finite partition.
///
/// Segment `i` covers `[breakpoints[i], breakpoints[i + 1]]`; its coefficients
/// are in ascending powers of the local coordinate `t = x - breakpoints[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseRaw", into = "PiecewiseRaw")]
pub struct PiecewisePolyDensity {
    breakpoints: Vec<f64>,
    coefficients: Vec<Vec<f64>>,
    /// Mass to the left of each segment.
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PiecewiseRaw {
    breakpoints: Vec<f64>,
    coefficients: Vec<Vec<f64>>,
}

impl TryFrom<PiecewiseRaw> for PiecewisePolyDensity {
    type Error = LossError;
    fn try_from(r: PiecewiseRaw) -> Result<Self> {
        PiecewisePolyDensity::new(r.breakpoints, r.coefficients)
    }
}

impl From<PiecewisePolyDensity> for PiecewiseRaw {
    fn from(d: PiecewisePolyDensity) -> Self {
        PiecewiseRaw { breakpoints: d.breakpoints, coefficients: d.coefficients }
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn antiderivative(c: &[f64], t: f64) -> f64 {
    c.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (j, &a)| acc * t + a / (j + 1) as f64)
        * t
}

impl PiecewisePolyDensity {
    pub fn new(breakpoints: Vec<f64>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(LossError::InvalidDistribution("need at least two breakpoints".into()));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(LossError::InvalidDistribution(
                "breakpoints must be finite and strictly ascending".into(),
            ));
        }
        if coefficients.len() != breakpoints.len() - 1 {
            return Err(LossError::InvalidDistribution(format!(
                "{} segments need {} coefficient lists, got {}",
                breakpoints.len() - 1,
                breakpoints.len() - 1,
                coefficients.len()
            )));
        }
        if coefficients.iter().flatten().any(|c| !c.is_finite()) {
            return Err(LossError::InvalidDistribution("non-finite coefficient".into()));
        }
        // identically zero end segments are not part of the support
        let (mut breakpoints, mut coefficients) = (breakpoints, coefficients);
        let zero = |c: &Vec<f64>| c.iter().all(|&a| a == 0.0);
        while coefficients.len() > 1 && zero(coefficients.last().unwrap()) {
            coefficients.pop();
            breakpoints.pop();
        }
        let lead = coefficients.iter().take_while(|c| zero(c)).count().min(coefficients.len() - 1);
        coefficients.drain(..lead);
        breakpoints.drain(..lead);
        let mut cumulative = Vec::with_capacity(coefficients.len());
        let mut acc = 0.0;
        for (i, c) in coefficients.iter().enumerate() {
            cumulative.push(acc);
            acc += antiderivative(c, breakpoints[i + 1] - breakpoints[i]);
        }
        if (acc - 1.0).abs() > NORMALIZATION_TOL {
            return Err(LossError::InvalidDistribution(format!(
                "density integrates to {acc}, not 1"
            )));
        }
        let d = PiecewisePolyDensity { breakpoints, coefficients, cumulative };
        let (lo, hi) = (d.lower(), d.upper());
        for i in 0..NONNEGATIVITY_GRID {
            let x = lo + (hi - lo) * i as f64 / (NONNEGATIVITY_GRID - 1) as f64;
            if d.pdf(x) < -1e-12 {
                return Err(LossError::InvalidDistribution(format!(
                    "density is negative at x = {x}"
                )));
            }
        }
        for (i, c) in d.coefficients.iter().enumerate() {
            let w = d.breakpoints[i + 1] - d.breakpoints[i];
            if horner(c, 0.0) < -1e-12 || horner(c, w) < -1e-12 {
                return Err(LossError::InvalidDistribution(format!(
                    "density is negative at an end of segment {i}"
                )));
            }
        }
        Ok(d)
    }

    /// Uniform density on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(LossError::InvalidDistribution("uniform needs a < b".into()));
        }
        Self::new(vec![a, b], vec![vec![1.0 / (b - a)]])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn lower(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn upper(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Segment containing `x`; the right end belongs to the last segment.
    fn segment(&self, x: f64) -> Option<usize> {
        if x < self.lower() || x > self.upper() {
            return None;
        }
        let i = self.breakpoints.partition_point(|&b| b <= x);
        Some(i.saturating_sub(1).min(self.coefficients.len() - 1))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self.segment(x) {
            Some(i) => horner(&self.coefficients[i], x - self.breakpoints[i]).max(0.0),
            None => 0.0,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.lower() {
            return 0.0;
        }
        if x >= self.upper() {
            return 1.0;
        }
        let i = self.segment(x).unwrap();
        (self.cumulative[i] + antiderivative(&self.coefficients[i], x - self.breakpoints[i])).clamp(0.0, 1.0)
    }

    /// Derivatives of orders `0..=n` at `x` from the segment ending at or
    /// beyond `x`, i.e. the left-sided limits. Zero outside `(lower, upper]`.
    pub fn left_derivatives(&self, x: f64, n: usize) -> Vec<f64> {
        if !(x > self.lower() && x <= self.upper()) {
            return vec![0.0; n + 1];
        }
        let i = self.breakpoints.partition_point(|&b| b < x) - 1;
        self.segment_derivatives(i, x, n)
    }

    fn segment_derivatives(&self, i: usize, x: f64, n: usize) -> Vec<f64> {
        let t = x - self.breakpoints[i];
        let mut c = self.coefficients[i].clone();
        let mut out = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            out.push(horner(&c, t));
            c = c.iter().enumerate().skip(1).map(|(j, &a)| a * j as f64).collect();
        }
        out
    }

    /// Highest polynomial degree over all segments.
    pub fn degree(&self) -> usize {
        self.coefficients.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// Derivatives of orders `0..=n` at `x`, taken from the segment that
    /// contains `x` (left-sided at the right end of the support).
    pub fn derivatives(&self, x: f64, n: usize) -> Vec<f64> {
        match self.segment(x) {
            Some(i) => self.segment_derivatives(i, x, n),
            None => vec![0.0; n + 1],
        }
    }
}
