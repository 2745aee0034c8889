#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lossorder::ingest;
use lossorder::{compare, compare_kdes, CompareOptions, KernelDensityEstimate, LossDistribution};

mod error;
mod report;
mod reproduce;
mod simulate;
mod source;

use error::{read, CliError};
use report::{ComparisonReport, Extras};

/// Orders loss distributions by their eventual moment behaviour.
#[derive(Parser)]
#[command(name = "lossorder", version)]
#[command(after_help = "Exit codes: 0 first preferred, 1 second preferred, 2 equivalent, 3 incomparable; \
    10 bad input, 11 undecided within the moment budget, 12 numerical failure. \
    `reproduce` exits 1 when a check fails. LOSSORDER_KMAX sets the moment-prefix length.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two distributions; JSON report on stdout.
    #[command(after_help = source::GRAMMAR)]
    Compare {
        first: String,
        second: String,
        #[command(flatten)]
        extras: ExtraArgs,
        /// Treat category ranks as losses on the partner's numeric scale.
        #[arg(long)]
        common_scale: bool,
    },
    /// Fit KDEs to two samples from one file and compare them.
    Kde {
        file: PathBuf,
        /// Split a single series after this many values.
        #[arg(long, conflicts_with = "group_by")]
        split: Option<usize>,
        /// Group the `score` column by this column (exactly two groups).
        #[arg(long)]
        group_by: Option<String>,
        /// Series column to read when splitting (default: the first).
        #[arg(long, conflicts_with = "group_by")]
        column: Option<String>,
        /// Multiple of the bandwidth added to the largest sample.
        #[arg(long, default_value_t = 1.0)]
        bound_multiplier: f64,
        #[command(flatten)]
        extras: ExtraArgs,
    },
    /// Simulate outbreak-size histograms by bond percolation.
    Simulate {
        /// complete:N, erdos-renyi:N,Q,SEED or an edge-list file.
        #[arg(long, default_value = "complete:20")]
        graph: String,
        /// Transmission probability; repeat for several columns.
        #[arg(long = "p", required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `uniform` or a node index.
        #[arg(long, default_value = "uniform")]
        initial: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Re-run the worked examples and data sets; table of expected vs computed.
    Reproduce {
        /// Run only this check; repeatable.
        #[arg(long)]
        only: Vec<String>,
        /// Directory with table1.csv, table2.csv and nile.csv overriding the built-in copies.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone, Copy)]
struct ExtraArgs {
    /// Add the tail threshold x0.
    #[arg(long)]
    threshold: bool,
    /// With --threshold, include the survival grid that was checked.
    #[arg(long, requires = "threshold")]
    evidence: bool,
    /// Add the first K moments of both inputs.
    #[arg(long, value_name = "K")]
    moments: Option<usize>,
    /// Add density and survival grids.
    #[arg(long)]
    plot_data: bool,
}

impl From<ExtraArgs> for Extras {
    fn from(a: ExtraArgs) -> Self {
        Extras { threshold: a.threshold, evidence: a.evidence, moments: a.moments, plot_data: a.plot_data }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn options() -> Result<CompareOptions, CliError> {
    let opts = CompareOptions::default();
    match std::env::var("LOSSORDER_KMAX") {
        Err(_) => Ok(opts),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= opts.window => Ok(opts.with_k_max(k)),
            _ => Err(CliError::Usage(format!(
                "LOSSORDER_KMAX must be an integer >= {}, got {v:?}",
                opts.window
            ))),
        },
    }
}

fn emit(report: &impl serde::Serialize) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, report).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_compare(first: &str, second: &str, extras: Extras, common_scale: bool) -> Result<i32, CliError> {
    let mut opts = options()?;
    opts.common_scale = common_scale;
    let d1 = source::parse(first)?;
    let d2 = source::parse(second)?;
    let v = compare(&d1, &d2, &opts)?;
    let report = ComparisonReport::build([first.into(), second.into()], [&d1, &d2], v, extras)?;
    emit(&report)?;
    Ok(report.exit_code())
}

struct KdeArgs {
    file: PathBuf,
    split: Option<usize>,
    group_by: Option<String>,
    column: Option<String>,
    bound_multiplier: f64,
}

fn kde_samples(a: &KdeArgs) -> Result<[(String, Vec<f64>); 2], CliError> {
    let text = read(&a.file.to_string_lossy())?;
    let pair = if let Some(g) = &a.group_by {
        let groups = ingest::parse_scores_by_group(&text, g)?;
        if groups.len() != 2 {
            return Err(CliError::Usage(format!("--group-by {g} gives {} groups, need 2", groups.len())));
        }
        let mut it = groups.into_iter();
        [it.next().unwrap(), it.next().unwrap()]
    } else {
        let values = ingest::parse_column(&text, a.column.as_deref())?;
        let s = a.split.unwrap_or(values.len() / 2);
        if s > values.len() {
            return Err(CliError::Usage(format!("--split {s} exceeds the {} values", values.len())));
        }
        let (x, y) = values.split_at(s);
        [(format!("[..{s}]"), x.to_vec()), (format!("[{s}..]"), y.to_vec())]
    };
    for (name, xs) in &pair {
        if xs.len() < 2 {
            return Err(CliError::Usage(format!("sample {name} has {} points, need at least 2", xs.len())));
        }
    }
    Ok(pair)
}

fn cmd_kde(a: KdeArgs, extras: Extras) -> Result<i32, CliError> {
    let opts = options()?;
    let [(n1, x1), (n2, x2)] = kde_samples(&a)?;
    let k1 = KernelDensityEstimate::fit(&x1)?.with_bound_multiplier(a.bound_multiplier)?;
    let k2 = KernelDensityEstimate::fit(&x2)?.with_bound_multiplier(a.bound_multiplier)?;
    let v = compare_kdes(&k1, &k2, &opts)?;
    let (d1, d2): (LossDistribution, LossDistribution) = (k1.clone().into(), k2.clone().into());
    let report = ComparisonReport::build([n1, n2], [&d1, &d2], v, extras)?.with_kdes(&k1, &k2);
    emit(&report)?;
    Ok(report.exit_code())
}

fn cmd_simulate(sim: simulate::Simulation, format: Format, output: Option<PathBuf>) -> Result<i32, CliError> {
    let hists = sim.run()?;
    let mut buf = Vec::new();
    match format {
        Format::Csv => sim.write_csv(&hists, &mut buf)?,
        Format::Json => sim.write_json(&hists, &mut buf)?,
    }
    match output {
        Some(path) => std::fs::write(&path, buf).map_err(|source| CliError::Io { path, source })?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    Ok(0)
}

fn cmd_reproduce(only: &[String], fixtures: Option<PathBuf>, json: bool) -> Result<i32, CliError> {
    let names = reproduce::resolve(only)?;
    let fx = match fixtures {
        Some(dir) => reproduce::Fixtures::from_dir(&dir)?,
        None => reproduce::Fixtures::builtin(),
    };
    let results: Vec<_> = names.into_iter().map(|n| reproduce::run_check(n, &fx)).collect();
    if json {
        emit(&results)?;
    } else {
        reproduce::print_table(&results, &mut std::io::stdout().lock())?;
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.pass).map(|r| r.name.to_string()).collect();
    if failed.is_empty() {
        Ok(0)
    } else {
        Err(CliError::ChecksFailed(failed))
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Compare { first, second, extras, common_scale } => {
            cmd_compare(&first, &second, extras.into(), common_scale)
        }
        Command::Kde { file, split, group_by, column, bound_multiplier, extras } => cmd_kde(
            KdeArgs { file, split, group_by, column, bound_multiplier },
            extras.into(),
        ),
        Command::Simulate { graph, p, runs, seed, initial, format, output } => {
            let sim = simulate::Simulation {
                graph: simulate::parse_graph(&graph)?,
                ps: p,
                runs,
                seed,
                initial: simulate::parse_initial(&initial)?,
            };
            cmd_simulate(sim, format, output)
        }
        Command::Reproduce { only, fixtures, json } => cmd_reproduce(&only, fixtures, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 10 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lossorder: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
