//! Reading distributions from delimited text and JSON, plus the bundled
//! fixture datasets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::{
    CategoricalDistribution, DiscreteDistribution, HistogramDistribution, LossDistribution, ParametricDistribution,
    PiecewisePolyDensity, PointMass, PoissonLattice,
};
use crate::error::{LossError, Result};
use crate::kde::KernelDensityEstimate;

/// Bundled datasets.
pub mod fixtures {
    /// Expert CVSS ratings for two scenarios (`expert_id,scenario,score,category`).
    pub const TABLE1_CSV: &str = include_str!("../fixtures/table1.csv");
    /// Outbreak-size counts for two network configurations (`size,config1,config2`).
    pub const TABLE2_CSV: &str = include_str!("../fixtures/table2.csv");
    /// Annual Nile flow at Aswan, 1871–1970, one value per line after a header.
    pub const NILE_CSV: &str = include_str!("../fixtures/nile.csv");
}

/// One expert's score for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub expert_id: String,
    pub scenario: String,
    pub score: f64,
    #[serde(default)]
    pub category: Option<String>,
}

/// Score interval `[lower, upper)`, or `[lower, upper]` when `closed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreInterval {
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub closed: bool,
}

impl ScoreInterval {
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && (x < self.upper || (self.closed && x == self.upper))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleCategory {
    pub label: String,
    pub rank: f64,
    pub interval: Option<ScoreInterval>,
}

/// Ordinal categories, most severe first, with optional score intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSpec {
    categories: Vec<ScaleCategory>,
}

impl ScaleSpec {
    pub fn new(categories: Vec<ScaleCategory>) -> Result<Self> {
        if categories.is_empty() {
            return Err(LossError::InvalidConfig("scale has no categories".into()));
        }
        if categories.windows(2).any(|w| !(w[0].rank > w[1].rank)) {
            return Err(LossError::InvalidConfig("scale ranks must be strictly descending".into()));
        }
        let mut intervals: Vec<ScoreInterval> = categories.iter().filter_map(|c| c.interval).collect();
        intervals.sort_by(|a, b| a.lower.total_cmp(&b.lower));
        for w in intervals.windows(2) {
            let touching_closed = w[0].closed && w[0].upper == w[1].lower;
            if w[0].upper > w[1].lower || touching_closed {
                return Err(LossError::InvalidConfig("scale intervals overlap".into()));
            }
        }
        if intervals.iter().any(|i| !(i.lower < i.upper)) {
            return Err(LossError::InvalidConfig("empty scale interval".into()));
        }
        Ok(ScaleSpec { categories })
    }

    /// CVSS coarsening: H = [8, 10], M = [3, 8), L = [0, 3).
    pub fn cvss() -> Self {
        let cat = |label: &str, rank: f64, lower: f64, upper: f64, closed: bool| ScaleCategory {
            label: label.into(),
            rank,
            interval: Some(ScoreInterval { lower, upper, closed }),
        };
        ScaleSpec {
            categories: vec![
                cat("H", 3.0, 8.0, 10.0, true),
                cat("M", 2.0, 3.0, 8.0, false),
                cat("L", 1.0, 0.0, 3.0, false),
            ],
        }
    }

    pub fn categories(&self) -> &[ScaleCategory] {
        &self.categories
    }

    pub fn labels(&self) -> Vec<String> {
        self.categories.iter().map(|c| c.label.clone()).collect()
    }

    /// Index of the category whose interval contains `score`.
    pub fn classify(&self, score: f64) -> Option<usize> {
        self.categories
            .iter()
            .position(|c| c.interval.is_some_and(|i| i.contains(score)))
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.label == label)
    }

    pub fn distribution_from_counts(&self, counts: &[u64]) -> Result<CategoricalDistribution> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(LossError::EmptyData("no ratings in group".into()));
        }
        let pmf = counts.iter().map(|&c| c as f64 / total as f64).collect();
        CategoricalDistribution::with_ranks(
            self.labels(),
            self.categories.iter().map(|c| c.rank).collect(),
            pmf,
        )
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

fn line_of(record: &csv::StringRecord, fallback: usize) -> usize {
    record.position().map_or(fallback, |p| p.line() as usize)
}

fn csv_error(e: csv::Error) -> LossError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    LossError::RowError { line, message: e.to_string() }
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case(name))
        .ok_or_else(|| LossError::Parse(format!("missing column {name:?}")))
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| LossError::RowError { line, message: format!("not a number: {s:?}") })
}

/// Reads `expert_id,scenario,score[,category]` rows.
pub fn parse_rating_records(text: &str) -> Result<Vec<RatingRecord>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let (id, sc, score) = (column(&headers, "expert_id")?, column(&headers, "scenario")?, column(&headers, "score")?);
    let cat = column(&headers, "category").ok();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec, i + 2);
        let get = |j: usize| {
            rec.get(j).ok_or_else(|| LossError::RowError { line, message: "missing field".into() })
        };
        out.push(RatingRecord {
            expert_id: get(id)?.to_string(),
            scenario: get(sc)?.to_string(),
            score: parse_f64(get(score)?, line)?,
            category: cat.and_then(|j| rec.get(j)).filter(|s| !s.is_empty()).map(str::to_string),
        });
    }
    Ok(out)
}

/// Scores grouped by the values of column `group_by`.
pub fn parse_scores_by_group(text: &str, group_by: &str) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let (g, s) = (column(&headers, group_by)?, column(&headers, "score")?);
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec, i + 2);
        let missing = || LossError::RowError { line, message: "missing field".into() };
        let key = rec.get(g).ok_or_else(missing)?;
        let score = parse_f64(rec.get(s).ok_or_else(missing)?, line)?;
        groups.entry(key.to_string()).or_default().push(score);
    }
    if groups.is_empty() {
        return Err(LossError::EmptyData("no rating rows".into()));
    }
    Ok(groups)
}

/// Coarsens scores through `scale` and builds one categorical distribution
/// per value of column `group_by`.
pub fn parse_ratings(text: &str, scale: &ScaleSpec, group_by: &str) -> Result<BTreeMap<String, CategoricalDistribution>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let (g, s) = (column(&headers, group_by)?, column(&headers, "score")?);
    let n = scale.categories().len();
    let mut counts: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec, i + 2);
        let missing = || LossError::RowError { line, message: "missing field".into() };
        let key = rec.get(g).ok_or_else(missing)?;
        let score = parse_f64(rec.get(s).ok_or_else(missing)?, line)?;
        let idx = scale.classify(score).ok_or(LossError::ScaleViolation { line, score })?;
        counts.entry(key.to_string()).or_insert_with(|| vec![0; n])[idx] += 1;
    }
    if counts.is_empty() {
        return Err(LossError::EmptyData("no rating rows".into()));
    }
    counts
        .into_iter()
        .map(|(k, c)| Ok((k, scale.distribution_from_counts(&c)?)))
        .collect()
}

/// One histogram per count column; the first column holds the bin values.
pub fn parse_counts(text: &str) -> Result<Vec<(String, HistogramDistribution)>> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.len() < 2 {
        return Err(LossError::Parse("need a bin column and at least one count column".into()));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut bins = Vec::new();
    let mut counts = vec![Vec::new(); names.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec, i + 2);
        if rec.len() != headers.len() {
            return Err(LossError::RowError {
                line,
                message: format!("expected {} fields, got {}", headers.len(), rec.len()),
            });
        }
        bins.push(parse_f64(&rec[0], line)?);
        for (j, c) in counts.iter_mut().enumerate() {
            let raw = &rec[j + 1];
            let v: i64 = raw
                .parse()
                .map_err(|_| LossError::RowError { line, message: format!("not an integer count: {raw:?}") })?;
            if v < 0 {
                return Err(LossError::RowError { line, message: format!("negative count {v}") });
            }
            c.push(v as u64);
        }
    }
    if bins.is_empty() {
        return Err(LossError::EmptyData("count file has no rows".into()));
    }
    names
        .into_iter()
        .zip(counts)
        .map(|(name, c)| {
            let h = HistogramDistribution::new(bins.clone(), c).map_err(|e| match e {
                LossError::EmptyData(_) => LossError::EmptyData(format!("column {name:?} has no observations")),
                other => other,
            })?;
            Ok((name, h))
        })
        .collect()
}

/// Values of one column (by header name), or of the first column.
pub fn parse_column(text: &str, name: Option<&str>) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let Some((_, first)) = lines.next() else {
        return Err(LossError::EmptyData("series file is empty".into()));
    };
    let split = |l: &str| l.split(',').map(|f| f.trim().to_string()).collect::<Vec<_>>();
    let head = split(first);
    let has_header = head.iter().any(|f| f.parse::<f64>().is_err());
    let idx = match name {
        Some(n) if has_header => head
            .iter()
            .position(|h| h.eq_ignore_ascii_case(n))
            .ok_or_else(|| LossError::Parse(format!("missing column {n:?}")))?,
        Some(n) => return Err(LossError::Parse(format!("column {n:?} requested but file has no header"))),
        None => 0,
    };
    let mut values = Vec::new();
    if !has_header {
        values.push(parse_f64(&head[idx], 1)?);
    }
    for (i, l) in lines {
        let fields = split(l);
        let raw = fields
            .get(idx)
            .ok_or_else(|| LossError::RowError { line: i + 1, message: "missing field".into() })?;
        values.push(parse_f64(raw, i + 1)?);
    }
    if values.is_empty() {
        return Err(LossError::EmptyData("series has no values".into()));
    }
    Ok(values)
}

/// A single-column series, optionally split into `[..split]` and `[split..]`.
pub fn parse_series(text: &str, split: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let values = parse_column(text, None)?;
    match split {
        None => Ok(vec![values]),
        Some(s) if s == 0 || s >= values.len() => Err(LossError::RangeError(format!(
            "split index {s} outside 1..{}",
            values.len()
        ))),
        Some(s) => {
            let (a, b) = values.split_at(s);
            Ok(vec![a.to_vec(), b.to_vec()])
        }
    }
}

/// Optional bounds of a truncation window; `null` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportDoc {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// JSON interchange form of a [`LossDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionDoc {
    Categorical {
        labels: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ranks: Option<Vec<f64>>,
        pmf: Vec<f64>,
    },
    Histogram {
        bins: Vec<f64>,
        counts: Vec<u64>,
    },
    Discrete {
        values: Vec<f64>,
        pmf: Vec<f64>,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        coefficients: Vec<Vec<f64>>,
    },
    Parametric {
        family: String,
        parameters: Vec<f64>,
    },
    Truncated {
        base: Box<DistributionDoc>,
        support: SupportDoc,
    },
    Kde {
        samples: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bandwidth: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound_multiplier: Option<f64>,
    },
    Point {
        value: f64,
    },
    Lattice {
        rate: f64,
        spacing: f64,
        offset: f64,
    },
}

fn bound(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl From<&LossDistribution> for DistributionDoc {
    fn from(d: &LossDistribution) -> Self {
        use LossDistribution as D;
        match d {
            D::Categorical(c) => DistributionDoc::Categorical {
                labels: c.labels().to_vec(),
                ranks: Some(c.ranks().to_vec()),
                pmf: c.pmf().to_vec(),
            },
            D::Histogram(h) => DistributionDoc::Histogram {
                bins: h.bin_values().to_vec(),
                counts: h.counts().to_vec(),
            },
            D::Discrete(x) => DistributionDoc::Discrete {
                values: x.values().to_vec(),
                pmf: x.pmf().to_vec(),
            },
            D::PiecewisePoly(p) => DistributionDoc::Piecewise {
                breakpoints: p.breakpoints().to_vec(),
                coefficients: p.coefficients().to_vec(),
            },
            D::Parametric(p) => DistributionDoc::Parametric {
                family: p.family().to_string(),
                parameters: p.parameters().to_vec(),
            },
            D::Truncated(t) => {
                let (lo, hi) = t.window();
                DistributionDoc::Truncated {
                    base: Box::new(t.base().into()),
                    support: SupportDoc { lower: bound(lo), upper: bound(hi) },
                }
            }
            D::Kde(k) => DistributionDoc::Kde {
                samples: k.samples().to_vec(),
                bandwidth: Some(k.bandwidth()),
                bound_multiplier: Some(k.bound_multiplier()),
            },
            D::PointMass(p) => DistributionDoc::Point { value: p.value() },
            D::PoissonLattice(l) => DistributionDoc::Lattice {
                rate: l.rate(),
                spacing: l.spacing(),
                offset: l.offset(),
            },
        }
    }
}

/// Builds a parametric family from its name and two parameters.
pub fn parametric(family: &str, parameters: &[f64]) -> Result<ParametricDistribution> {
    let [a, b] = parameters else {
        return Err(LossError::InvalidDistribution(format!(
            "{family} takes two parameters, got {}",
            parameters.len()
        )));
    };
    match family.to_ascii_lowercase().as_str() {
        "gumbel" => ParametricDistribution::gumbel(*a, *b),
        "gamma" => ParametricDistribution::gamma(*a, *b),
        "weibull" => ParametricDistribution::weibull(*a, *b),
        "gaussian" | "normal" => ParametricDistribution::gaussian(*a, *b),
        other => Err(LossError::InvalidDistribution(format!("unknown family {other:?}"))),
    }
}

impl TryFrom<DistributionDoc> for LossDistribution {
    type Error = LossError;

    fn try_from(doc: DistributionDoc) -> Result<Self> {
        Ok(match doc {
            DistributionDoc::Categorical { labels, ranks, pmf } => match ranks {
                Some(r) => CategoricalDistribution::with_ranks(labels, r, pmf)?.into(),
                None => CategoricalDistribution::new(labels, pmf)?.into(),
            },
            DistributionDoc::Histogram { bins, counts } => HistogramDistribution::new(bins, counts)?.into(),
            DistributionDoc::Discrete { values, pmf } => DiscreteDistribution::new(values, pmf)?.into(),
            DistributionDoc::Piecewise { breakpoints, coefficients } => {
                PiecewisePolyDensity::new(breakpoints, coefficients)?.into()
            }
            DistributionDoc::Parametric { family, parameters } => parametric(&family, &parameters)?.into(),
            DistributionDoc::Truncated { base, support } => {
                let base = LossDistribution::try_from(*base)?;
                base.truncate(
                    support.lower.unwrap_or(f64::NEG_INFINITY),
                    support.upper.unwrap_or(f64::INFINITY),
                )?
                .into()
            }
            DistributionDoc::Kde { samples, bandwidth, bound_multiplier } => {
                let k = match bandwidth {
                    Some(h) => KernelDensityEstimate::with_bandwidth(&samples, h)?,
                    None => KernelDensityEstimate::fit(&samples)?,
                };
                match bound_multiplier {
                    Some(m) => k.with_bound_multiplier(m)?.into(),
                    None => k.into(),
                }
            }
            DistributionDoc::Point { value } => PointMass::new(value)?.into(),
            DistributionDoc::Lattice { rate, spacing, offset } => PoissonLattice::new(rate, spacing, offset)?.into(),
        })
    }
}

pub fn to_json(d: &LossDistribution) -> String {
    serde_json::to_string_pretty(&DistributionDoc::from(d)).expect("distribution documents always serialise")
}

pub fn from_json(text: &str) -> Result<LossDistribution> {
    let doc: DistributionDoc = serde_json::from_str(text).map_err(|e| LossError::Parse(e.to_string()))?;
    doc.try_into()
}
