use std::io::Write;

use lossorder::{simulate_outbreaks, Graph, InitialInfection, OutbreakConfig, OutbreakHistogram};
use serde::Serialize;

use crate::error::{read, CliError};

pub const GRAPH_GRAMMAR: &str = "complete:N | erdos-renyi:N,Q,SEED | FILE (edge list, one `u v` per line)";

pub fn parse_graph(spec: &str) -> Result<Graph, CliError> {
    let bad = || CliError::Usage(format!("invalid graph {spec:?}; expected {GRAPH_GRAMMAR}"));
    match spec.split_once(':') {
        Some(("complete", n)) => Ok(Graph::complete(n.trim().parse().map_err(|_| bad())?)?),
        Some(("erdos-renyi", rest)) => {
            let f: Vec<&str> = rest.split(',').map(str::trim).collect();
            let [n, q, seed] = f.as_slice() else {
                return Err(bad());
            };
            Ok(Graph::erdos_renyi(
                n.parse().map_err(|_| bad())?,
                q.parse().map_err(|_| bad())?,
                seed.parse().map_err(|_| bad())?,
            )?)
        }
        _ => Ok(Graph::parse_edge_list(&read(spec)?)?),
    }
}

pub fn parse_initial(s: &str) -> Result<InitialInfection, CliError> {
    if s == "uniform" {
        return Ok(InitialInfection::Uniform);
    }
    s.parse()
        .map(InitialInfection::Node)
        .map_err(|_| CliError::Usage(format!("initial node must be `uniform` or an index, got {s:?}")))
}

#[derive(Debug, Serialize)]
struct ConfigReport<'a> {
    name: String,
    p: f64,
    mean_size: f64,
    /// `counts[s - 1]` runs ended with `s` infected nodes.
    counts: &'a [u64],
}

#[derive(Debug, Serialize)]
struct SimulationReport<'a> {
    nodes: usize,
    edges: usize,
    runs: u64,
    seed: u64,
    initial: InitialInfection,
    configs: Vec<ConfigReport<'a>>,
}

pub struct Simulation {
    pub graph: Graph,
    pub ps: Vec<f64>,
    pub runs: u64,
    pub seed: u64,
    pub initial: InitialInfection,
}

impl Simulation {
    pub fn run(&self) -> Result<Vec<OutbreakHistogram>, CliError> {
        self.ps
            .iter()
            .map(|&p| {
                let cfg = OutbreakConfig::new(p, self.runs, self.seed)?.with_initial(self.initial);
                Ok(simulate_outbreaks(&self.graph, &cfg)?)
            })
            .collect()
    }

    /// `size,config1,config2,...`, one row per outbreak size.
    pub fn write_csv(&self, hists: &[OutbreakHistogram], out: &mut impl Write) -> std::io::Result<()> {
        let names: Vec<String> = (1..=hists.len()).map(|i| format!("config{i}")).collect();
        writeln!(out, "size,{}", names.join(","))?;
        for s in 1..=self.graph.node_count() {
            let row: Vec<String> = hists.iter().map(|h| h.count(s).to_string()).collect();
            writeln!(out, "{s},{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn write_json(&self, hists: &[OutbreakHistogram], out: &mut impl Write) -> Result<(), CliError> {
        let report = SimulationReport {
            nodes: self.graph.node_count(),
            edges: self.graph.edges().len(),
            runs: self.runs,
            seed: self.seed,
            initial: self.initial,
            configs: hists
                .iter()
                .zip(&self.ps)
                .enumerate()
                .map(|(i, (h, &p))| ConfigReport {
                    name: format!("config{}", i + 1),
                    p,
                    mean_size: h.mean_size(),
                    counts: h.counts(),
                })
                .collect(),
        };
        serde_json::to_writer_pretty(&mut *out, &report).map_err(std::io::Error::from)?;
        writeln!(out)?;
        Ok(())
    }
}
