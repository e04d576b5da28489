//! Hardware graphs and minor embedding.
//!
//! # Node numbering
//!
//! Chimera `C(m, n, t)`: qubit `(row, col, u, k)` with `row < m`, `col < n`,
//! shore `u ∈ {0 (vertical), 1 (horizontal)}` and `k < t` has id
//! `((row·n + col)·2 + u)·t + k`. Each unit cell is a complete bipartite
//! `K_{t,t}` between its two shores; vertical qubits couple to the same `k`
//! in the cell below, horizontal qubits to the same `k` in the cell to the
//! right.
//!
//! Pegasus `P(m)`: qubit `(u, w, k, z)` with `u ∈ {0, 1}`, `w < m`, `k < 12`,
//! `z < m - 1` has id `u·12·m·(m-1) + w·12·(m-1) + k·(m-1) + z`. A vertical
//! qubit (`u = 0`) is the segment at `x = 12w + k` covering
//! `y ∈ [12z + o₀[k], 12z + o₀[k] + 12)`; horizontal qubits swap the axes and
//! use `o₁`. With `o₀ = (2,2,2,2,10,10,10,10,6,6,6,6)` and
//! `o₁ = (6,6,6,6,2,2,2,2,10,10,10,10)` the couplers are: crossing
//! perpendicular segments (internal, up to 12), collinear neighbours `z`,
//! `z + 1` (external, up to 2) and the pairs `k = 2j, 2j + 1` at equal
//! `(u, w, z)` (odd, 1). All `24·m·(m-1)` coordinates are kept, including
//! the boundary qubits that a fabricated chip leaves out.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::SourceGraph;
use crate::report::ValidationReport;
use crate::rng::{self, derive_seed, ChaCha8Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    Chimera {
        m: usize,
        n: usize,
        t: usize,
    },
    Pegasus {
        m: usize,
    },
    /// Any other simple graph.
    Custom,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Chimera { m, n, t } => write!(f, "chimera:{m},{n},{t}"),
            Topology::Pegasus { m } => write!(f, "pegasus:{m}"),
            Topology::Custom => write!(f, "custom"),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    /// Accepts `chimera:m,n,t` and `pegasus:m`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "expected 'chimera:m,n,t' or 'pegasus:m', got '{s}'"
            ))
        };
        let (family, dims) = s.split_once(':').ok_or_else(bad)?;
        let dims: Vec<usize> = dims
            .split(',')
            .map(|d| d.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (family.trim().to_ascii_lowercase().as_str(), dims.as_slice()) {
            ("chimera", &[m, n, t]) => Ok(Topology::Chimera { m, n, t }),
            ("chimera", &[m]) => Ok(Topology::Chimera { m, n: m, t: 4 }),
            ("pegasus", &[m]) => Ok(Topology::Pegasus { m }),
            _ => Err(bad()),
        }
    }
}

impl Topology {
    pub fn build(&self) -> Result<HardwareGraph> {
        match *self {
            Topology::Chimera { m, n, t } => chimera_graph(m, n, t),
            Topology::Pegasus { m } => pegasus_graph(m),
            Topology::Custom => Err(Error::InvalidTopology(
                "a custom topology has no generator".to_string(),
            )),
        }
    }
}

/// Simple undirected graph of qubits and couplers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardwareGraph {
    topology: Topology,
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl HardwareGraph {
    /// Normalizes, sorts and deduplicates `edges`; rejects self-loops and
    /// out-of-range ids.
    pub fn from_edges(
        topology: Topology,
        num_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop at node {a}")));
            }
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::InvalidTopology(format!(
                    "edge ({a}, {b}) out of range for {num_nodes} nodes"
                )));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adj = vec![Vec::new(); num_nodes];
        for &(a, b) in &list {
            adj[a].push(b);
            adj[b].push(a);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self {
            topology,
            num_nodes,
            edges: list,
            adj,
        })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn chimera_index(n: usize, t: usize, row: usize, col: usize, u: usize, k: usize) -> usize {
    ((row * n + col) * 2 + u) * t + k
}

pub fn chimera_graph(m: usize, n: usize, t: usize) -> Result<HardwareGraph> {
    if m == 0 || n == 0 || t == 0 {
        return Err(Error::InvalidTopology(format!(
            "chimera dimensions must be positive, got ({m}, {n}, {t})"
        )));
    }
    let id = |r, c, u, k| chimera_index(n, t, r, c, u, k);
    let mut edges = Vec::new();
    for r in 0..m {
        for c in 0..n {
            for a in 0..t {
                for b in 0..t {
                    edges.push((id(r, c, 0, a), id(r, c, 1, b)));
                }
                if r + 1 < m {
                    edges.push((id(r, c, 0, a), id(r + 1, c, 0, a)));
                }
                if c + 1 < n {
                    edges.push((id(r, c, 1, a), id(r, c + 1, 1, a)));
                }
            }
        }
    }
    HardwareGraph::from_edges(Topology::Chimera { m, n, t }, 2 * m * n * t, edges)
}

const PEGASUS_TILE: usize = 12;
const PEGASUS_VERTICAL_OFFSETS: [usize; 12] = [2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6];
const PEGASUS_HORIZONTAL_OFFSETS: [usize; 12] = [6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10];

pub fn pegasus_index(m: usize, u: usize, w: usize, k: usize, z: usize) -> usize {
    let m1 = m - 1;
    u * PEGASUS_TILE * m * m1 + w * PEGASUS_TILE * m1 + k * m1 + z
}

pub fn pegasus_graph(m: usize) -> Result<HardwareGraph> {
    if m < 2 {
        return Err(Error::InvalidTopology(format!(
            "pegasus needs m >= 2, got {m}"
        )));
    }
    let m1 = m - 1;
    let id = |u, w, k, z| pegasus_index(m, u, w, k, z);
    let mut edges = Vec::new();
    for u in 0..2 {
        for w in 0..m {
            for k in 0..PEGASUS_TILE {
                for z in 0..m1 {
                    if k % 2 == 0 {
                        edges.push((id(u, w, k, z), id(u, w, k + 1, z)));
                    }
                    if z + 1 < m1 {
                        edges.push((id(u, w, k, z), id(u, w, k, z + 1)));
                    }
                }
            }
        }
    }
    // A vertical segment at x = 12w + k, y in [12z + o0[k], +12) crosses the
    // horizontal segment at y = 12w' + kk whose x-range contains 12w + k.
    for w in 0..m {
        for k in 0..PEGASUS_TILE {
            for z in 0..m1 {
                for kk in 0..PEGASUS_TILE {
                    let hw = z + usize::from(kk < PEGASUS_VERTICAL_OFFSETS[k]);
                    let hz = w as isize - isize::from(k < PEGASUS_HORIZONTAL_OFFSETS[kk]);
                    if hw < m && hz >= 0 && (hz as usize) < m1 {
                        edges.push((id(0, w, k, z), id(1, hw, kk, hz as usize)));
                    }
                }
            }
        }
    }
    HardwareGraph::from_edges(Topology::Pegasus { m }, 24 * m * m1, edges)
}

/// Source node `i` is represented by the hardware nodes in `chains[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub chains: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn qubits_used(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    /// `{"<source node>": [hardware nodes…]}`
    pub fn to_json(&self) -> Result<String> {
        let map: BTreeMap<usize, &Vec<usize>> = self.chains.iter().enumerate().collect();
        Ok(serde_json::to_string_pretty(&map)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let map: BTreeMap<usize, Vec<usize>> = serde_json::from_str(text)?;
        let n = map.len();
        let mut chains = vec![Vec::new(); n];
        for (k, v) in map {
            if k >= n {
                return Err(Error::Parse(format!(
                    "source nodes must be 0..{n}, found {k}"
                )));
            }
            chains[k] = v;
        }
        Ok(Self { chains })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingStats {
    pub nodes: usize,
    pub edges: usize,
    pub qubits_used: usize,
    pub qubits_per_node: f64,
    pub max_chain_length: usize,
}

pub fn embedding_stats(src: &SourceGraph, emb: &Embedding) -> EmbeddingStats {
    let qubits_used = emb.qubits_used();
    EmbeddingStats {
        nodes: src.num_nodes,
        edges: src.num_edges(),
        qubits_used,
        qubits_per_node: if src.num_nodes == 0 {
            0.0
        } else {
            qubits_used as f64 / src.num_nodes as f64
        },
        max_chain_length: emb.chains.iter().map(Vec::len).max().unwrap_or(0),
    }
}

fn chain_connected(hw: &HardwareGraph, chain: &[usize]) -> bool {
    if chain.len() <= 1 {
        return true;
    }
    let members: HashSet<usize> = chain.iter().copied().collect();
    let mut seen = HashSet::from([chain[0]]);
    let mut queue = VecDeque::from([chain[0]]);
    while let Some(g) = queue.pop_front() {
        for &h in hw.neighbors(g) {
            if members.contains(&h) && seen.insert(h) {
                queue.push_back(h);
            }
        }
    }
    seen.len() == members.len()
}

fn chains_touch(hw: &HardwareGraph, a: &[usize], b: &[usize]) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let large: HashSet<usize> = large.iter().copied().collect();
    small
        .iter()
        .any(|&g| hw.neighbors(g).iter().any(|h| large.contains(h)))
}

/// Checks chain count, non-empty chains, node ids, disjointness, chain
/// connectivity and coverage of every source edge.
pub fn verify_embedding(
    src: &SourceGraph,
    hw: &HardwareGraph,
    emb: &Embedding,
) -> ValidationReport {
    let mut report = ValidationReport::new();
    if emb.chains.len() != src.num_nodes {
        report.push(
            "chain-count",
            format!(
                "{} chains for {} source nodes",
                emb.chains.len(),
                src.num_nodes
            ),
        );
        return report;
    }
    let mut owner: Vec<Option<usize>> = vec![None; hw.num_nodes()];
    let mut in_range = true;
    for (v, chain) in emb.chains.iter().enumerate() {
        if chain.is_empty() {
            report.push("empty-chain", format!("source node {v}"));
        }
        for &g in chain {
            if g >= hw.num_nodes() {
                report.push("node-range", format!("source node {v}, hardware node {g}"));
                in_range = false;
                continue;
            }
            match owner[g] {
                Some(u) => report.push(
                    "disjointness",
                    format!("hardware node {g} in chains {u} and {v}"),
                ),
                None => owner[g] = Some(v),
            }
        }
    }
    if !in_range {
        return report;
    }
    for (v, chain) in emb.chains.iter().enumerate() {
        if !chain_connected(hw, chain) {
            report.push("connectivity", format!("source node {v}"));
        }
    }
    for &(u, v) in &src.edges {
        if !chains_touch(hw, &emb.chains[u], &emb.chains[v]) {
            report.push("edge-coverage", format!("source edge ({u}, {v})"));
        }
    }
    report
}

/// Knobs of [`find_embedding_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedParams {
    /// Independent restarts before giving up.
    pub tries: usize,
    /// Tear-and-reroute passes per restart.
    pub max_rounds: usize,
    /// Weight of a qubit already used by `c` chains is `base^c`; `base`
    /// starts here and grows by `penalty_growth` every pass.
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    /// Passes without fewer shared qubits before the crowded region is
    /// torn out and rebuilt.
    pub patience: usize,
    /// Upper bound on chain-shortening passes once no qubit is shared.
    pub refine_passes: usize,
}

impl Default for EmbedParams {
    fn default() -> Self {
        Self {
            tries: 10,
            max_rounds: 40,
            initial_penalty: 4.0,
            penalty_growth: 1.5,
            patience: 4,
            refine_passes: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Embedder<'a> {
    src_adj: Vec<Vec<usize>>,
    hw: &'a HardwareGraph,
    chains: Vec<Vec<usize>>,
    usage: Vec<u32>,
    /// Accumulated congestion per qubit; never decreases within a try.
    history: Vec<f64>,
    rng: ChaCha8Rng,
    penalty: f64,
}

impl<'a> Embedder<'a> {
    fn new(src: &SourceGraph, hw: &'a HardwareGraph, seed: u64, penalty: f64) -> Self {
        Self {
            src_adj: src.adjacency(),
            hw,
            chains: vec![Vec::new(); src.num_nodes],
            usage: vec![0; hw.num_nodes()],
            history: vec![0.0; hw.num_nodes()],
            rng: rng::seeded(seed),
            penalty,
        }
    }

    fn weight(&self, g: usize) -> f64 {
        (1.0 + self.history[g]) * self.penalty.powi(self.usage[g] as i32)
    }

    fn record_congestion(&mut self) {
        for (h, &u) in self.history.iter_mut().zip(&self.usage) {
            if u > 1 {
                *h += 1.0;
            }
        }
    }

    fn tear(&mut self, v: usize) {
        for g in std::mem::take(&mut self.chains[v]) {
            self.usage[g] -= 1;
        }
    }

    fn random_index(&mut self, n: usize) -> usize {
        rng::uniform_below(&mut self.rng, n as u64) as usize
    }

    /// Node-weighted shortest paths from every node of `chain`. `dist[g]`
    /// counts the weights of all path nodes after the chain, `g` included.
    fn distances_from(&self, chain: &[usize], weights: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let n = self.hw.num_nodes();
        let mut dist = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        for &g in chain {
            dist[g] = 0.0;
            heap.push(Entry { cost: 0.0, node: g });
        }
        while let Some(Entry { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for &h in self.hw.neighbors(node) {
                let c = cost + weights[h];
                if c < dist[h] {
                    dist[h] = c;
                    parent[h] = node;
                    heap.push(Entry { cost: c, node: h });
                }
            }
        }
        (dist, parent)
    }

    /// Places `v` as a root plus shortest paths to every embedded neighbour.
    fn place(&mut self, v: usize) {
        let placed: Vec<usize> = self.src_adj[v]
            .iter()
            .copied()
            .filter(|&u| !self.chains[u].is_empty())
            .collect();
        let n = self.hw.num_nodes();
        if placed.is_empty() {
            let free: Vec<usize> = (0..n).filter(|&g| self.usage[g] == 0).collect();
            let g = if free.is_empty() {
                self.random_index(n)
            } else {
                free[self.random_index(free.len())]
            };
            self.chains[v] = vec![g];
            self.usage[g] += 1;
            return;
        }

        let weights: Vec<f64> = (0..n).map(|g| self.weight(g)).collect();
        let searches: Vec<(Vec<f64>, Vec<usize>)> = placed
            .par_iter()
            .map(|&u| self.distances_from(&self.chains[u], &weights))
            .collect();
        let mut best_cost = f64::INFINITY;
        let mut best = Vec::new();
        for (g, &w) in weights.iter().enumerate() {
            let mut cost = w;
            for (dist, _) in &searches {
                // A root inside the neighbour's chain needs no extra path.
                let d = if dist[g] == 0.0 { 0.0 } else { dist[g] - w };
                cost += d;
            }
            if !cost.is_finite() {
                continue;
            }
            if cost < best_cost - 1e-12 {
                best_cost = cost;
                best.clear();
                best.push(g);
            } else if (cost - best_cost).abs() <= 1e-12 {
                best.push(g);
            }
        }
        if best.is_empty() {
            // Disconnected hardware: no root reaches every neighbour.
            let g = self.random_index(n);
            self.chains[v] = vec![g];
            self.usage[g] += 1;
            return;
        }
        let root = best[self.random_index(best.len())];
        let mut chain = vec![root];
        let mut members = HashSet::from([root]);
        for (dist, parent) in &searches {
            let mut g = root;
            while dist[g] != 0.0 {
                g = parent[g];
                if dist[g] == 0.0 {
                    break;
                }
                if members.insert(g) {
                    chain.push(g);
                }
            }
        }
        for &g in &chain {
            self.usage[g] += 1;
        }
        self.chains[v] = chain;
    }

    fn overlaps(&self) -> usize {
        self.usage.iter().filter(|&&c| c > 1).count()
    }

    /// Source order: breadth-first from random roots, neighbours shuffled.
    fn bfs_order(&mut self) -> Vec<usize> {
        let n = self.src_adj.len();
        let mut roots: Vec<usize> = (0..n).collect();
        rng::fisher_yates(&mut roots, &mut self.rng);
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for r in roots {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            let mut queue = VecDeque::from([r]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                let mut next = self.src_adj[v].clone();
                rng::fisher_yates(&mut next, &mut self.rng);
                for u in next {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        order
    }

    /// Tears out every chain holding a shared qubit, plus their neighbours,
    /// and re-places them, most-constrained first. Single-chain moves cannot
    /// leave a crowded region whose every exit crosses an occupied qubit.
    fn shake(&mut self) {
        let n = self.chains.len();
        let mut torn = vec![false; n];
        for v in 0..n {
            if self.chains[v].iter().any(|&g| self.usage[g] > 1) {
                torn[v] = true;
                for &u in &self.src_adj[v] {
                    torn[u] = true;
                }
            }
        }
        let mut pending: Vec<usize> = (0..n).filter(|&v| torn[v]).collect();
        for &v in &pending {
            self.tear(v);
        }
        rng::fisher_yates(&mut pending, &mut self.rng);
        while !pending.is_empty() {
            let (idx, _) = pending
                .iter()
                .enumerate()
                .max_by_key(|&(i, &v)| {
                    let placed = self.src_adj[v]
                        .iter()
                        .filter(|&&u| !self.chains[u].is_empty())
                        .count();
                    (placed, std::cmp::Reverse(i))
                })
                .expect("pending is non-empty");
            let v = pending.swap_remove(idx);
            self.place(v);
        }
    }

    fn run(&mut self, params: &EmbedParams) -> bool {
        for v in self.bfs_order() {
            self.place(v);
        }
        let mut best = usize::MAX;
        let mut stalled = 0;
        for _ in 0..params.max_rounds {
            let overlaps = self.overlaps();
            if overlaps == 0 {
                return true;
            }
            self.record_congestion();
            if overlaps < best {
                best = overlaps;
                stalled = 0;
            } else {
                stalled += 1;
            }
            if stalled >= params.patience {
                self.shake();
                best = usize::MAX;
                stalled = 0;
                continue;
            }
            self.penalty *= params.penalty_growth;
            let mut order: Vec<usize> = (0..self.chains.len()).collect();
            rng::fisher_yates(&mut order, &mut self.rng);
            for v in order {
                self.tear(v);
                self.place(v);
            }
        }
        self.overlaps() == 0
    }

    /// Drops chain qubits that are not needed to stay connected and reach
    /// every neighbour.
    fn trim_chain(&mut self, v: usize) {
        let mut changed = true;
        while changed && self.chains[v].len() > 1 {
            changed = false;
            for idx in 0..self.chains[v].len() {
                let g = self.chains[v][idx];
                let mut rest = self.chains[v].clone();
                rest.swap_remove(idx);
                let still_ok = chain_connected(self.hw, &rest)
                    && self.src_adj[v]
                        .iter()
                        .all(|&u| chains_touch(self.hw, &rest, &self.chains[u]));
                if still_ok {
                    self.usage[g] -= 1;
                    self.chains[v] = rest;
                    changed = true;
                    break;
                }
            }
        }
        self.chains[v].sort_unstable();
    }

    fn trim(&mut self) {
        for v in 0..self.chains.len() {
            self.trim_chain(v);
        }
    }

    fn qubits_used(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    /// Shortens an overlap-free embedding. Every chain is rerouted with
    /// occupied qubits priced out; the new chain is kept if it is
    /// overlap-free and no longer than the old one, so chains can drift
    /// toward their neighbours across equal-length moves. Stops after
    /// `patience` passes without a net gain, or `passes` in total.
    fn refine(&mut self, passes: usize, patience: usize) {
        self.history.fill(0.0);
        self.penalty = self.penalty.max(self.hw.num_nodes() as f64 * 4.0);
        self.trim();
        let mut best = self.qubits_used();
        let mut stalled = 0;
        for _ in 0..passes {
            let mut order: Vec<usize> = (0..self.chains.len()).collect();
            rng::fisher_yates(&mut order, &mut self.rng);
            for v in order {
                let old = self.chains[v].clone();
                self.tear(v);
                self.place(v);
                self.trim_chain(v);
                let worse = self.chains[v].len() > old.len()
                    || self.chains[v].iter().any(|&g| self.usage[g] > 1);
                if worse {
                    self.tear(v);
                    for &g in &old {
                        self.usage[g] += 1;
                    }
                    self.chains[v] = old;
                }
            }
            let used = self.qubits_used();
            if used < best {
                best = used;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= patience {
                    break;
                }
            }
        }
    }
}

/// Randomized chain-growth heuristic with default parameters.
pub fn find_embedding(src: &SourceGraph, hw: &HardwareGraph, seed: u64) -> Option<Embedding> {
    find_embedding_with(src, hw, seed, &EmbedParams::default())
}

/// Greedy minor embedding in the style of Cai, Macready and Roy: every source
/// node is placed as a root qubit plus node-weighted shortest paths to the
/// chains of its already-placed neighbours. Qubits may be shared while the
/// search runs; shared qubits get exponentially more expensive each pass and
/// chains are torn out and rerouted until no qubit is shared. Restart `i`
/// draws from `derive_seed(seed, [i])`.
///
/// Returns `None` when no valid embedding is found within the budget. A
/// returned embedding always passes [`verify_embedding`].
pub fn find_embedding_with(
    src: &SourceGraph,
    hw: &HardwareGraph,
    seed: u64,
    params: &EmbedParams,
) -> Option<Embedding> {
    if src.num_nodes == 0 {
        return Some(Embedding { chains: Vec::new() });
    }
    if src.num_nodes > hw.num_nodes() || src.num_edges() > hw.num_edges() {
        return None;
    }
    for attempt in 0..params.tries {
        let mut e = Embedder::new(
            src,
            hw,
            derive_seed(seed, &[attempt as u64]),
            params.initial_penalty,
        );
        if e.run(params) {
            e.refine(params.refine_passes, params.patience);
            let emb = Embedding { chains: e.chains };
            if verify_embedding(src, hw, &emb).ok {
                return Some(emb);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{build_qubo, source_graph};
    use crate::schedule::random_mdrrt;

    fn cycle(n: usize) -> HardwareGraph {
        HardwareGraph::from_edges(Topology::Custom, n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn complete(n: usize) -> SourceGraph {
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                e.push((a, b));
            }
        }
        SourceGraph::new(n, e)
    }

    #[test]
    fn single_chimera_cell() {
        let g = chimera_graph(1, 1, 4).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (8, 16));
        assert!(chimera_graph(0, 1, 4).is_err());
    }

    #[test]
    fn chimera_sizes_and_degree() {
        let g = chimera_graph(16, 16, 4).unwrap();
        assert_eq!(g.num_nodes(), 2048);
        assert_eq!(g.max_degree(), 6);
        assert_eq!(g.num_edges(), 16 * 16 * 16 + 2 * 15 * 16 * 4);
        assert_eq!(chimera_graph(3, 3, 4).unwrap().max_degree(), 6);
    }

    #[test]
    fn pegasus_sizes_and_degree() {
        let g = pegasus_graph(16).unwrap();
        assert_eq!(g.num_nodes(), 5760);
        assert_eq!(g.max_degree(), 15);
        let small = pegasus_graph(2).unwrap();
        assert_eq!(small.num_nodes(), 48);
        assert!(small.max_degree() <= 15);
        assert!(small.edges().iter().all(|&(a, b)| a < b));
        assert!(pegasus_graph(1).is_err());
    }

    #[test]
    fn pegasus_interior_qubits_have_full_degree() {
        let m = 6;
        let g = pegasus_graph(m).unwrap();
        let full = (0..g.num_nodes()).filter(|&v| g.degree(v) == 15).count();
        assert!(full > g.num_nodes() / 3, "{full}");
    }

    #[test]
    fn topology_parsing() {
        assert_eq!(
            "pegasus:16".parse::<Topology>().unwrap(),
            Topology::Pegasus { m: 16 }
        );
        assert_eq!(
            "chimera:2,3,4".parse::<Topology>().unwrap(),
            Topology::Chimera { m: 2, n: 3, t: 4 }
        );
        assert!("zephyr:4".parse::<Topology>().is_err());
        assert!("pegasus:x".parse::<Topology>().is_err());
        assert_eq!(Topology::Pegasus { m: 3 }.to_string(), "pegasus:3");
    }

    #[test]
    fn triangle_into_triangle() {
        let emb = find_embedding(&complete(3), &cycle(3), 0).unwrap();
        assert!(emb.chains.iter().all(|c| c.len() == 1));
        assert!(verify_embedding(&complete(3), &cycle(3), &emb).ok);
        let stats = embedding_stats(&complete(3), &emb);
        assert_eq!(stats.qubits_per_node, 1.0);
    }

    #[test]
    fn k4_into_c4_fails() {
        assert!(find_embedding(&complete(4), &cycle(4), 0).is_none());
    }

    #[test]
    fn four_team_source_into_small_chimera() {
        let (q, _) = build_qubo(&random_mdrrt(4, 0).unwrap()).unwrap();
        let src = source_graph(&q);
        let hw = chimera_graph(2, 2, 4).unwrap();
        let emb = find_embedding(&src, &hw, 1).unwrap();
        assert!(verify_embedding(&src, &hw, &emb).ok);
        let stats = embedding_stats(&src, &emb);
        assert!(stats.qubits_used >= 6);
        assert!(stats.qubits_per_node >= 1.0);
    }

    #[test]
    fn embedding_is_deterministic_per_seed() {
        let (q, _) = build_qubo(&random_mdrrt(6, 2).unwrap()).unwrap();
        let src = source_graph(&q);
        let hw = chimera_graph(4, 4, 4).unwrap();
        assert_eq!(find_embedding(&src, &hw, 5), find_embedding(&src, &hw, 5));
    }

    #[test]
    fn verify_reports_each_rule() {
        // Path a-b realized on a path of hardware nodes 0-1-2.
        let hw = HardwareGraph::from_edges(Topology::Custom, 3, [(0, 1), (1, 2)]).unwrap();
        let src = SourceGraph::new(2, vec![(0, 1)]);
        let good = Embedding {
            chains: vec![vec![0, 1], vec![2]],
        };
        assert!(verify_embedding(&src, &hw, &good).ok);

        let uncovered = Embedding {
            chains: vec![vec![0], vec![2]],
        };
        assert!(verify_embedding(&src, &hw, &uncovered).has_rule("edge-coverage"));

        let shared = Embedding {
            chains: vec![vec![0, 1], vec![1, 2]],
        };
        assert!(verify_embedding(&src, &hw, &shared).has_rule("disjointness"));

        let split = Embedding {
            chains: vec![vec![0, 2], vec![1]],
        };
        assert!(verify_embedding(&src, &hw, &split).has_rule("connectivity"));

        let short = Embedding {
            chains: vec![vec![0]],
        };
        assert!(verify_embedding(&src, &hw, &short).has_rule("chain-count"));

        let empty = Embedding {
            chains: vec![vec![0, 1], vec![]],
        };
        assert!(verify_embedding(&src, &hw, &empty).has_rule("empty-chain"));
    }

    #[test]
    fn embedding_json_round_trip() {
        let emb = Embedding {
            chains: vec![vec![3, 4], vec![7]],
        };
        let text = emb.to_json().unwrap();
        assert!(text.contains("\"0\""));
        assert_eq!(Embedding::from_json(&text).unwrap(), emb);
    }
}
