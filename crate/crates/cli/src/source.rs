//! Distribution sources given on the command line.

use lossorder::ingest::{self, ScaleSpec};
use lossorder::{LossDistribution, PiecewisePolyDensity, PointMass, PoissonLattice};

use crate::error::{read, CliError};

pub const GRAMMAR: &str = "\
SOURCE forms:
  gumbel:LOC,SCALE  gamma:SHAPE,SCALE  weibull:SHAPE,SCALE  gaussian:MEAN,SD (alias normal)
  point:A                      point mass at A
  uniform:A,B                  uniform density on [A, B]
  lattice:RATE,SPACING,OFFSET  OFFSET + SPACING * Poisson(RATE)
  FILE.json                    distribution document (see docs/FORMATS.md)
  FILE.csv:COLUMN              count column of a size,count1,count2,... table
  FILE.csv:GROUP=VALUE         ratings file rows with GROUP == VALUE, coarsened
                               to the CVSS scale H/M/L
Any SOURCE may end in @LO,HI to truncate it to [LO, HI].";

const FAMILIES: &[&str] = &["gumbel", "gamma", "weibull", "gaussian", "normal", "point", "uniform", "lattice"];

fn numbers(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{what}: {p:?} is not a number")))
        })
        .collect()
}

fn arity<const N: usize>(v: Vec<f64>, spec: &str) -> Result<[f64; N], CliError> {
    let n = v.len();
    v.try_into()
        .map_err(|_| CliError::Usage(format!("{spec}: expected {N} parameters, got {n}")))
}

fn inline(family: &str, params: &str, spec: &str) -> Result<LossDistribution, CliError> {
    let p = numbers(params, spec)?;
    Ok(match family {
        "point" => {
            let [a] = arity(p, spec)?;
            PointMass::new(a)?.into()
        }
        "uniform" => {
            let [a, b] = arity(p, spec)?;
            if !(a < b) {
                return Err(CliError::Usage(format!("{spec}: need A < B")));
            }
            PiecewisePolyDensity::new(vec![a, b], vec![vec![1.0 / (b - a)]])?.into()
        }
        "lattice" => {
            let [rate, spacing, offset] = arity(p, spec)?;
            PoissonLattice::new(rate, spacing, offset)?.into()
        }
        _ => ingest::parametric(family, &p)?.into(),
    })
}

fn from_csv(path: &str, selector: &str) -> Result<LossDistribution, CliError> {
    let text = read(path)?;
    if let Some((group, value)) = selector.split_once('=') {
        let mut groups = ingest::parse_ratings(&text, &ScaleSpec::cvss(), group)?;
        return groups
            .remove(value)
            .map(Into::into)
            .ok_or_else(|| CliError::Usage(format!("{path}: no rows with {group} = {value:?}")));
    }
    ingest::parse_counts(&text)?
        .into_iter()
        .find(|(name, _)| name == selector)
        .map(|(_, h)| h.into())
        .ok_or_else(|| CliError::Usage(format!("{path}: no count column {selector:?}")))
}

type Window = Option<(f64, f64)>;

/// Splits a trailing `@LO,HI` off `spec`.
fn truncation(spec: &str) -> Result<(&str, Window), CliError> {
    let Some((head, tail)) = spec.rsplit_once('@') else {
        return Ok((spec, None));
    };
    match numbers(tail, spec)?.as_slice() {
        &[lo, hi] => Ok((head, Some((lo, hi)))),
        _ => Err(CliError::Usage(format!("{spec}: truncation needs @LO,HI"))),
    }
}

pub fn parse(spec: &str) -> Result<LossDistribution, CliError> {
    let (body, window) = truncation(spec)?;
    let d = match body.split_once(':') {
        Some((family, params)) if FAMILIES.contains(&family.to_ascii_lowercase().as_str()) => {
            inline(&family.to_ascii_lowercase(), params, spec)?
        }
        _ => match body.rsplit_once(':') {
            Some((path, selector)) if path.to_ascii_lowercase().ends_with(".csv") => from_csv(path, selector)?,
            _ if body.to_ascii_lowercase().ends_with(".csv") => {
                return Err(CliError::Usage(format!("{spec}: CSV sources need :COLUMN or :GROUP=VALUE")))
            }
            _ if body.to_ascii_lowercase().ends_with(".json") => ingest::from_json(&read(body)?)?,
            _ => return Err(CliError::Usage(format!("unrecognised source {spec:?}\n\n{GRAMMAR}"))),
        },
    };
    Ok(match window {
        Some((lo, hi)) => d.truncate(lo, hi)?.into(),
        None => d,
    })
}
