//! Monte-Carlo bond percolation: outbreak sizes on a contact graph.
//!
//! In each run every edge is open independently with probability `p`; the
//! outbreak is the open-edge component containing the initially infected
//! node. Run `i` draws from a ChaCha8 stream keyed by `(seed, i)`, so the
//! histogram does not depend on how runs are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::HistogramDistribution;
use crate::error::{LossError, Result};

/// Undirected simple graph on nodes `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, normalising each edge to `(min, max)` and dropping
    /// duplicates.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if node_count == 0 {
            return Err(LossError::InvalidConfig("graph needs at least one node".into()));
        }
        let mut out = Vec::new();
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(LossError::InvalidConfig(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            if u == v {
                return Err(LossError::InvalidConfig(format!("self-loop at node {u}")));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Graph { node_count, edges: out })
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    /// G(n, q): each of the `n (n - 1) / 2` possible edges present with
    /// probability `q`.
    pub fn erdos_renyi(n: usize, q: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(LossError::InvalidConfig(format!("edge probability {q} outside [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < q {
                    edges.push((u, v));
                }
            }
        }
        Self::new(n, edges)
    }

    /// Parses an edge list with one `u v` pair per line. Blank lines and
    /// lines starting with `#` are skipped; the node count is one more than
    /// the largest index unless a `nodes N` line raises it.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut declared = 0usize;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
            let bad = |message: String| LossError::RowError { line: i + 1, message };
            if fields.first() == Some(&"nodes") {
                declared = fields
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("expected `nodes N`".into()))?;
                continue;
            }
            if fields.len() != 2 {
                return Err(bad(format!("expected two node indices, got {line:?}")));
            }
            let parse = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("invalid node index {s:?}")));
            edges.push((parse(fields[0])?, parse(fields[1])?));
        }
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0).max(declared);
        Self::new(n, edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// True when every node is reachable from every other.
    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.node_count);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        uf.size(0) == self.node_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialInfection {
    /// A node drawn uniformly at random in every run.
    Uniform,
    Node(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutbreakConfig {
    pub transmission_probability: f64,
    pub runs: u64,
    pub seed: u64,
    pub initial: InitialInfection,
}

impl OutbreakConfig {
    pub fn new(transmission_probability: f64, runs: u64, seed: u64) -> Result<Self> {
        let cfg = OutbreakConfig {
            transmission_probability,
            runs,
            seed,
            initial: InitialInfection::Uniform,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_initial(mut self, initial: InitialInfection) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.transmission_probability) {
            return Err(LossError::InvalidConfig(format!(
                "transmission probability {} outside [0, 1]",
                self.transmission_probability
            )));
        }
        if self.runs == 0 {
            return Err(LossError::InvalidConfig("runs must be positive".into()));
        }
        Ok(())
    }
}

/// `counts[s - 1]` is the number of runs with an outbreak of size `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutbreakHistogram {
    counts: Vec<u64>,
    runs: u64,
}

impl OutbreakHistogram {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(LossError::EmptyData("histogram has no bins".into()));
        }
        let runs = counts.iter().sum();
        Ok(OutbreakHistogram { counts, runs })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    /// Runs that ended with `size` infected nodes.
    pub fn count(&self, size: usize) -> u64 {
        size.checked_sub(1)
            .and_then(|i| self.counts.get(i).copied())
            .unwrap_or(0)
    }

    pub fn mean_size(&self) -> f64 {
        let s: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i + 1) as f64 * c as f64)
            .sum();
        s / self.runs as f64
    }

    /// Normalised histogram over outbreak sizes `1..=node_count`.
    pub fn to_distribution(&self) -> Result<HistogramDistribution> {
        if self.runs == 0 {
            return Err(LossError::EmptyData("no simulation runs recorded".into()));
        }
        let bins = (1..=self.counts.len()).map(|s| s as f64).collect();
        HistogramDistribution::new(bins, self.counts.clone())
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    fn size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

fn run_once(g: &Graph, cfg: &OutbreakConfig, run: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(run);
    let start = match cfg.initial {
        InitialInfection::Uniform => rng.random_range(0..g.node_count),
        InitialInfection::Node(v) => v,
    };
    let mut uf = UnionFind::new(g.node_count);
    for &(u, v) in &g.edges {
        // one draw per edge even when p is 0 or 1, so runs with different
        // p share their randomness edge by edge
        if rng.random::<f64>() < cfg.transmission_probability {
            uf.union(u, v);
        }
    }
    uf.size(start)
}

/// Runs `cfg.runs` independent outbreaks on `g` in parallel.
pub fn simulate_outbreaks(g: &Graph, cfg: &OutbreakConfig) -> Result<OutbreakHistogram> {
    cfg.validate()?;
    if let InitialInfection::Node(v) = cfg.initial {
        if v >= g.node_count {
            return Err(LossError::InvalidConfig(format!(
                "initial node {v} outside 0..{}",
                g.node_count
            )));
        }
    }
    let n = g.node_count;
    let counts = (0..cfg.runs)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, run| {
                acc[run_once(g, cfg, run) - 1] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    OutbreakHistogram::from_counts(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_validation() {
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::new(3, [(1, 1)]).is_err());
        let g = Graph::new(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(Graph::complete(20).unwrap().edges().len(), 190);
    }

    #[test]
    fn edge_list_parsing() {
        let g = Graph::parse_edge_list("# ring\n0 1\n1 2\n2,0\n\nnodes 5\n").unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edges().len(), 3);
        assert!(!g.is_connected());
        assert!(matches!(
            Graph::parse_edge_list("0 x\n"),
            Err(LossError::RowError { line: 1, .. })
        ));
    }

    #[test]
    fn degenerate_probabilities() {
        let g = Graph::complete(20).unwrap();
        let h0 = simulate_outbreaks(&g, &OutbreakConfig::new(0.0, 100, 1).unwrap()).unwrap();
        assert_eq!(h0.count(1), 100);
        let h1 = simulate_outbreaks(&g, &OutbreakConfig::new(1.0, 50, 1).unwrap()).unwrap();
        assert_eq!(h1.count(20), 50);
        assert_eq!(h1.runs(), 50);
    }

    #[test]
    fn invalid_configs() {
        assert!(OutbreakConfig::new(1.5, 10, 0).is_err());
        assert!(OutbreakConfig::new(0.5, 0, 0).is_err());
        let g = Graph::complete(4).unwrap();
        let cfg = OutbreakConfig::new(0.5, 10, 0).unwrap().with_initial(InitialInfection::Node(9));
        assert!(simulate_outbreaks(&g, &cfg).is_err());
    }

    #[test]
    fn same_seed_same_histogram() {
        let g = Graph::erdos_renyi(30, 0.2, 5).unwrap();
        let cfg = OutbreakConfig::new(0.4, 500, 42).unwrap();
        assert_eq!(simulate_outbreaks(&g, &cfg).unwrap(), simulate_outbreaks(&g, &cfg).unwrap());
    }

    #[test]
    fn single_bin_distribution() {
        let h = OutbreakHistogram::from_counts(vec![0, 0, 7]).unwrap();
        let d = h.to_distribution().unwrap();
        assert_eq!(d.pmf(), vec![0.0, 0.0, 1.0]);
    }
}
