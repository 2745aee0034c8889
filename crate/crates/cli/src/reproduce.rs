//! Re-runs the worked examples and data sets against their published values.

use std::collections::BTreeMap;
use std::path::Path;

use lossorder::ingest::{self, fixtures, ScaleSpec};
use lossorder::{
    compare, compare_categorical, compare_kdes, compare_moment_sequences, tail_threshold, CompareOptions,
    KernelDensityEstimate, LossDistribution, MomentSequence, ParametricDistribution, Relation,
};
use serde::Serialize;

use crate::error::{read, CliError};

pub const CHECKS: &[&str] = &["example1", "example2", "example3", "table1", "table2", "nile", "cvss"];

const MOMENT_RTOL: f64 = 1e-3;
const BANDWIDTH_RTOL: f64 = 0.01;

#[derive(Debug, Serialize)]
pub struct Item {
    pub quantity: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub items: Vec<Item>,
}

#[derive(Default)]
struct Items(Vec<Item>);

impl Items {
    fn push(&mut self, quantity: impl Into<String>, expected: impl Into<String>, computed: String, pass: bool) {
        self.0.push(Item { quantity: quantity.into(), expected: expected.into(), computed, pass });
    }

    fn moments(&mut self, label: &str, d: &LossDistribution, expected: &[f64]) {
        for (i, &e) in expected.iter().enumerate() {
            let k = i + 1;
            let (computed, pass) = match d.moment(k) {
                Ok(m) => (format!("{m:.6}"), (m - e).abs() <= MOMENT_RTOL * e.abs()),
                Err(err) => (err.to_string(), false),
            };
            self.push(format!("{label} E[X^{k}]"), format!("{e} (rel. {MOMENT_RTOL})"), computed, pass);
        }
    }

    fn relation(&mut self, quantity: &str, expected: Relation, got: Relation) {
        self.push(quantity, format!("{expected:?}"), format!("{got:?}"), got == expected);
    }

    fn range(&mut self, quantity: &str, lo: f64, hi: f64, got: f64) {
        self.push(quantity, format!("[{lo}, {hi}]"), format!("{got:.4}"), (lo..=hi).contains(&got));
    }

    fn close(&mut self, quantity: &str, expected: f64, rtol: f64, got: f64) {
        let pass = (got - expected).abs() <= rtol * expected.abs();
        self.push(quantity, format!("{expected} (rel. {rtol})"), format!("{got:.4}"), pass);
    }
}

pub struct Fixtures {
    table1: String,
    table2: String,
    nile: String,
}

impl Fixtures {
    pub fn builtin() -> Self {
        Fixtures {
            table1: fixtures::TABLE1_CSV.into(),
            table2: fixtures::TABLE2_CSV.into(),
            nile: fixtures::NILE_CSV.into(),
        }
    }

    /// Reads `table1.csv`, `table2.csv` and `nile.csv` from `dir`, falling
    /// back to the built-in copy of any that is missing.
    pub fn from_dir(dir: &Path) -> Result<Self, CliError> {
        let load = |name: &str, builtin: &str| -> Result<String, CliError> {
            let p = dir.join(name);
            if p.exists() {
                read(&p.to_string_lossy())
            } else {
                Ok(builtin.to_string())
            }
        };
        Ok(Fixtures {
            table1: load("table1.csv", fixtures::TABLE1_CSV)?,
            table2: load("table2.csv", fixtures::TABLE2_CSV)?,
            nile: load("nile.csv", fixtures::NILE_CSV)?,
        })
    }
}

type Run = Result<(), lossorder::LossError>;

fn gumbel(a: f64, b: f64) -> Result<LossDistribution, lossorder::LossError> {
    Ok(ParametricDistribution::gumbel(a, b)?.into())
}

fn example1(it: &mut Items) -> Run {
    let f1 = gumbel(31.0063, 1.74346)?;
    let f2 = gumbel(32.0063, 1.74346)?;
    it.moments("F1", &f1, &[30.0, 905.0, 27437.3, 835606.0, 2.55545e7]);
    it.moments("F2", &f2, &[31.0, 966.0, 30243.3, 950906.0, 3.00162e7]);
    let v = compare(&f1, &f2, &CompareOptions::default())?;
    it.relation("verdict", Relation::FirstStrictlyPreferred, v.relation);
    it.range("x0", 1.0, 25.0, tail_threshold(&f1, &f2, &v)?.x0);
    Ok(())
}

fn example2(it: &mut Items) -> Run {
    let f1 = gumbel(6.27294, 2.20532)?;
    let f2 = gumbel(6.19073, 2.06288)?;
    it.moments("F1", &f1, &[5.0, 33.0, 219.215, 1654.9, 11957.8]);
    it.moments("F2", &f2, &[5.0, 32.0, 208.895, 1517.51, 10806.8]);
    let v = compare(&f1, &f2, &CompareOptions::default())?;
    it.relation("verdict", Relation::SecondStrictlyPreferred, v.relation);
    it.range("x0", 4.5, 6.5, tail_threshold(&f1, &f2, &v)?.x0);
    Ok(())
}

fn example3(it: &mut Items) -> Run {
    let f1: LossDistribution = ParametricDistribution::gamma(260.345, 0.0373929)?.into();
    let f2: LossDistribution = ParametricDistribution::weibull(20.0, 10.0)?.into();
    it.moments("Gamma", &f1, &[9.73504, 95.1351, 933.259, 9190.01, 90839.7]);
    it.moments("Weibull", &f2, &[9.73504, 95.1351, 933.041, 9181.69, 90640.2]);
    let opts = CompareOptions::default();
    let mv = compare_moment_sequences(
        &MomentSequence::compute(&f1, opts.k_max)?,
        &MomentSequence::compute(&f2, opts.k_max)?,
        &opts,
    )?;
    let stab = mv.stabilization_index;
    it.push("stabilization index", "3", format!("{stab:?}"), stab == Some(3));
    let v = compare(&f1, &f2, &opts)?;
    it.relation("verdict", Relation::SecondStrictlyPreferred, v.relation);
    it.range("x0", 9.5, 11.5, tail_threshold(&f1, &f2, &v)?.x0);
    Ok(())
}

fn table1(it: &mut Items, fx: &Fixtures) -> Run {
    let groups = ingest::parse_ratings(&fx.table1, &ScaleSpec::cvss(), "scenario")?;
    let pmf = |g: &str| groups.get(g).map(|c| c.pmf().to_vec());
    for (g, want) in [("1", [0.5, 0.5, 0.0]), ("2", [7.0 / 9.0, 2.0 / 9.0, 0.0])] {
        let got = pmf(g);
        let pass = got.as_deref() == Some(&want[..]);
        let shown = got.map_or_else(|| "missing".to_string(), |v| format!("{v:.4?}"));
        it.push(format!("scenario {g} pmf (H, M, L)"), format!("{want:.4?}"), shown, pass);
    }
    let (Some(s1), Some(s2)) = (groups.get("1"), groups.get("2")) else {
        return Ok(());
    };
    let v = compare_categorical(s1, s2)?;
    it.relation("verdict", Relation::FirstStrictlyPreferred, v.relation);
    let (d1, d2): (LossDistribution, LossDistribution) = (s1.clone().into(), s2.clone().into());
    let label = tail_threshold(&d1, &d2, &v)?.label;
    it.push("threshold category", "M", label.clone().unwrap_or_else(|| "-".into()), label.as_deref() == Some("M"));
    Ok(())
}

fn table2(it: &mut Items, fx: &Fixtures) -> Run {
    let cols: BTreeMap<String, _> = ingest::parse_counts(&fx.table2)?.into_iter().collect();
    let (Some(c1), Some(c2)) = (cols.get("config1"), cols.get("config2")) else {
        it.push("columns", "config1, config2", format!("{:?}", cols.keys().collect::<Vec<_>>()), false);
        return Ok(());
    };
    it.push("runs", "1000 / 1000", format!("{} / {}", c1.total(), c2.total()), c1.total() == 1000 && c2.total() == 1000);
    let (d1, d2): (LossDistribution, LossDistribution) = (c2.clone().into(), c1.clone().into());
    let v = compare(&d1, &d2, &CompareOptions::default())?;
    it.relation("config2 vs config1", Relation::FirstStrictlyPreferred, v.relation);
    let x0 = tail_threshold(&d1, &d2, &v)?.x0;
    it.push("x0", "9", format!("{x0}"), x0 == 9.0);
    Ok(())
}

fn kde_pair(it: &mut Items, samples: [&[f64]; 2], h: [f64; 2]) -> Result<(LossDistribution, LossDistribution, lossorder::PreferenceVerdict), lossorder::LossError> {
    let k1 = KernelDensityEstimate::fit(samples[0])?;
    let k2 = KernelDensityEstimate::fit(samples[1])?;
    it.close("h1", h[0], BANDWIDTH_RTOL, k1.bandwidth());
    it.close("h2", h[1], BANDWIDTH_RTOL, k2.bandwidth());
    let v = compare_kdes(&k1, &k2, &CompareOptions::default())?;
    it.relation("verdict", Relation::SecondStrictlyPreferred, v.relation);
    Ok((k1.into(), k2.into(), v))
}

fn nile(it: &mut Items, fx: &Fixtures) -> Run {
    let halves = ingest::parse_series(&fx.nile, Some(50))?;
    let (d1, d2, v) = kde_pair(it, [&halves[0], &halves[1]], [79.32, 45.28])?;
    it.range("x0", 150.0, 300.0, tail_threshold(&d1, &d2, &v)?.x0);
    Ok(())
}

fn cvss(it: &mut Items, fx: &Fixtures) -> Run {
    let groups = ingest::parse_scores_by_group(&fx.table1, "scenario")?;
    let (Some(g1), Some(g2)) = (groups.get("1"), groups.get("2")) else {
        it.push("scenarios", "1, 2", format!("{:?}", groups.keys().collect::<Vec<_>>()), false);
        return Ok(());
    };
    kde_pair(it, [g1, g2], [0.798, 0.346])?;
    Ok(())
}

pub fn run_check(name: &'static str, fx: &Fixtures) -> CheckResult {
    let mut it = Items::default();
    let outcome = match name {
        "example1" => example1(&mut it),
        "example2" => example2(&mut it),
        "example3" => example3(&mut it),
        "table1" => table1(&mut it, fx),
        "table2" => table2(&mut it, fx),
        "nile" => nile(&mut it, fx),
        "cvss" => cvss(&mut it, fx),
        _ => unreachable!("unknown check {name}"),
    };
    if let Err(e) = outcome {
        it.push("run", "completes", e.to_string(), false);
    }
    let items = it.0;
    CheckResult { name, pass: !items.is_empty() && items.iter().all(|i| i.pass), items }
}

pub fn resolve(only: &[String]) -> Result<Vec<&'static str>, CliError> {
    if only.is_empty() {
        return Ok(CHECKS.to_vec());
    }
    only.iter()
        .map(|n| {
            CHECKS
                .iter()
                .copied()
                .find(|c| c == n)
                .ok_or_else(|| CliError::Usage(format!("unknown check {n:?}; known: {}", CHECKS.join(", "))))
        })
        .collect()
}

pub fn print_table(results: &[CheckResult], out: &mut impl std::io::Write) -> std::io::Result<()> {
    let rows: Vec<[&str; 5]> = results
        .iter()
        .flat_map(|r| {
            r.items.iter().map(|i| {
                [r.name, i.quantity.as_str(), i.expected.as_str(), i.computed.as_str(), if i.pass { "ok" } else { "MISMATCH" }]
            })
        })
        .collect();
    let header = ["check", "quantity", "expected", "computed", "status"];
    let mut width = header.map(str::len);
    for row in &rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    for row in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = row.iter().zip(width).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", cells.join("  ").trim_end())?;
    }
    writeln!(out)?;
    for r in results {
        writeln!(out, "{} {}", if r.pass { "PASS" } else { "FAIL" }, r.name)?;
    }
    Ok(())
}
