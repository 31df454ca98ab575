//! Random multigraphs and edge-boundary sizes `L_S`.
//!
//! Graphs are undirected multigraphs without self-loops. Parallel edges are
//! kept as a multiplicity because the infection pressure between two nodes
//! scales with it.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::seq::{index, SliceRandom};
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::Serialize;

use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};

/// Default cap on the number of subsets enumerated by [`min_cut_over_size`].
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Stubs thrown away while building a configuration-model graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DiscardedStubs {
    pub self_loop_stubs: u64,
    pub leftover_stubs: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n_nodes: usize,
    /// Sorted `(neighbour, multiplicity)` lists, mirrored on both endpoints.
    neighbors: Vec<Vec<(u32, u32)>>,
    degree_sum: u64,
    discarded: DiscardedStubs,
}

impl Graph {
    /// Builds a graph from `(u, v, multiplicity)` triples. Repeated pairs
    /// accumulate; self-loops and out-of-range nodes are rejected.
    pub fn from_edges<I>(n_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u32)>,
    {
        let mut map: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (u, v, m) in edges {
            if u >= n_nodes || v >= n_nodes {
                return Err(Error::param(format!("edge ({u}, {v}) outside [0, {n_nodes})")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at node {u}")));
            }
            if m == 0 {
                continue;
            }
            *map.entry((u.min(v), u.max(v))).or_insert(0) += m;
        }
        Ok(Self::from_canonical(n_nodes, map, DiscardedStubs::default()))
    }

    fn from_canonical(n_nodes: usize, map: BTreeMap<(usize, usize), u32>, discarded: DiscardedStubs) -> Self {
        let mut neighbors = vec![Vec::new(); n_nodes];
        let mut degree_sum = 0u64;
        for (&(u, v), &m) in &map {
            neighbors[u].push((v as u32, m));
            neighbors[v].push((u as u32, m));
            degree_sum += 2 * m as u64;
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Graph { n_nodes, neighbors, degree_sum, discarded }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn degree_sum(&self) -> u64 {
        self.degree_sum
    }

    /// Total edge count, counting multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.degree_sum / 2
    }

    pub fn degree(&self, node: usize) -> u64 {
        self.neighbors[node].iter().map(|&(_, m)| m as u64).sum()
    }

    pub fn neighbors(&self, node: usize) -> &[(u32, u32)] {
        &self.neighbors[node]
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        self.neighbors[u]
            .binary_search_by_key(&(v as u32), |&(w, _)| w)
            .map_or(0, |i| self.neighbors[u][i].1)
    }

    pub fn discarded(&self) -> DiscardedStubs {
        self.discarded
    }

    /// Edges as `(u, v, multiplicity)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&(v, _)| (v as usize) > u)
                .map(move |&(v, m)| (u, v as usize, m))
        })
    }

    /// Writes the `nodes N` header followed by sorted `u v multiplicity` lines.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "nodes {}", self.n_nodes)?;
        for (u, v, m) in self.edges() {
            writeln!(out, "{u} {v} {m}")?;
        }
        Ok(())
    }

    /// Parses the edge-list format. Blank lines and `#` comment lines are
    /// skipped, so files carrying a metadata header round-trip.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut n_nodes = None;
        let mut edges = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match (n_nodes, fields.as_slice()) {
                (None, ["nodes", n]) => {
                    n_nodes = Some(n.parse::<usize>().map_err(|e| err(format!("bad node count: {e}")))?);
                }
                (None, _) => return Err(err("expected header 'nodes N'".into())),
                (Some(_), [u, v, m]) => {
                    let parse = |s: &str| s.parse::<usize>().map_err(|e| err(format!("bad integer '{s}': {e}")));
                    let m = m.parse::<u32>().map_err(|e| err(format!("bad multiplicity: {e}")))?;
                    edges.push((parse(u)?, parse(v)?, m));
                }
                (Some(_), _) => return Err(err("expected 'u v multiplicity'".into())),
            }
        }
        let n = n_nodes.ok_or_else(|| Error::Parse { line: 0, msg: "missing 'nodes N' header".into() })?;
        Graph::from_edges(n, edges)
    }
}

/// `G(n, p)`: every unordered pair present independently with probability `p`.
///
/// Row `i` draws the neighbours `j > i` from its own stream using geometric
/// gaps, so rows are generated in parallel without changing the result.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param("graph needs at least one node"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability must lie in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(Graph::from_canonical(n, BTreeMap::new(), DiscardedStubs::default()));
    }
    let gap = Geometric::new(p).map_err(|e| Error::param(e.to_string()))?;
    let rows: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::ErdosRenyiRow, i as u64);
            let mut row = Vec::new();
            let mut j = i as u64 + 1;
            loop {
                j = j.saturating_add(gap.sample(&mut rng));
                if j >= n as u64 {
                    break;
                }
                row.push((i, j as usize));
                j += 1;
            }
            row
        })
        .collect();
    let map = rows.into_iter().flatten().map(|e| (e, 1)).collect();
    Ok(Graph::from_canonical(n, map, DiscardedStubs::default()))
}

/// Configuration model: i.i.d. degrees, uniform stub matching. Self-loops and
/// the leftover stub of an odd total are discarded; parallel edges become
/// multiplicities.
pub fn gen_configuration(n: usize, dist: &DegreeDistribution, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param("graph needs at least one node"));
    }
    let degrees: Vec<u64> = (0..n)
        .into_par_iter()
        .map(|i| dist.sample(&mut stream(seed, Purpose::Degree, i as u64)))
        .collect();
    let mut stubs: Vec<u32> = Vec::with_capacity(degrees.iter().sum::<u64>() as usize);
    for (node, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(node as u32, d as usize));
    }
    stubs.shuffle(&mut stream(seed, Purpose::StubShuffle, 0));

    let mut discarded = DiscardedStubs { leftover_stubs: (stubs.len() % 2) as u64, ..Default::default() };
    let mut map: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0] as usize, pair[1] as usize);
        if u == v {
            discarded.self_loop_stubs += 2;
        } else {
            *map.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        }
    }
    Ok(Graph::from_canonical(n, map, discarded))
}

/// A node subset `S` of a graph with `n` nodes; nonempty and proper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutQuery {
    members: Vec<bool>,
    size: usize,
}

impl CutQuery {
    pub fn new(n_nodes: usize, nodes: &[usize]) -> Result<Self> {
        let mut members = vec![false; n_nodes];
        for &v in nodes {
            if v >= n_nodes {
                return Err(Error::param(format!("node {v} outside [0, {n_nodes})")));
            }
            if members[v] {
                return Err(Error::param(format!("node {v} listed twice")));
            }
            members[v] = true;
        }
        if nodes.is_empty() || nodes.len() == n_nodes {
            return Err(Error::param("cut subset must be nonempty and proper"));
        }
        Ok(CutQuery { members, size: nodes.len() })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn n_nodes(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn nodes(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&v| self.members[v]).collect()
    }

    pub fn complement(&self) -> CutQuery {
        CutQuery { members: self.members.iter().map(|b| !b).collect(), size: self.members.len() - self.size }
    }
}

/// `L_S`: edges between `S` and its complement, counting multiplicity.
pub fn cut_size(g: &Graph, q: &CutQuery) -> Result<u64> {
    if q.n_nodes() != g.n_nodes() {
        return Err(Error::param(format!(
            "query built for {} nodes, graph has {}",
            q.n_nodes(),
            g.n_nodes()
        )));
    }
    Ok(cut_of_members(g, &q.members))
}

fn cut_of_members(g: &Graph, members: &[bool]) -> u64 {
    let mut cut = 0u64;
    for (u, &inside) in members.iter().enumerate() {
        if inside {
            cut += g.neighbors[u]
                .iter()
                .filter(|&&(v, _)| !members[v as usize])
                .map(|&(_, m)| m as u64)
                .sum::<u64>();
        }
    }
    cut
}

/// Minimum of `L_S` over a family of subsets, with one minimiser.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinCut {
    pub size: u64,
    pub witness: Vec<usize>,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) is exact at every step
        c = match c.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    c
}

fn check_size(g: &Graph, k: usize) -> Result<()> {
    if k == 0 || k >= g.n_nodes() {
        return Err(Error::param(format!("subset size must satisfy 1 <= k < n = {}, got {k}", g.n_nodes())));
    }
    Ok(())
}

/// Exact `min L_S` over all `|S| = k` by exhaustive enumeration.
///
/// Refuses with [`Error::BudgetExceeded`] when `C(n, k) > budget`. The
/// witness is the lexicographically smallest minimiser.
pub fn min_cut_over_size(g: &Graph, k: usize, budget: u64) -> Result<MinCut> {
    check_size(g, k)?;
    let n = g.n_nodes();
    let required = binomial(n, k);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { n, k, required, cap: budget });
    }
    let best = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut search = Enumeration::new(g, k);
            search.push(first);
            search.descend(first + 1);
            (search.best, search.best_set)
        })
        .reduce_with(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one starting node");
    Ok(MinCut { size: best.0, witness: best.1 })
}

/// Depth-first subset enumeration with incremental cut maintenance: adding
/// `v` changes the cut by `deg(v) - 2 * (edges from v into S)`.
struct Enumeration<'g> {
    g: &'g Graph,
    k: usize,
    degrees: Vec<u64>,
    links_into_set: Vec<u64>,
    chosen: Vec<usize>,
    cut: u64,
    best: u64,
    best_set: Vec<usize>,
}

impl<'g> Enumeration<'g> {
    fn new(g: &'g Graph, k: usize) -> Self {
        let n = g.n_nodes();
        Enumeration {
            g,
            k,
            degrees: (0..n).map(|v| g.degree(v)).collect(),
            links_into_set: vec![0; n],
            chosen: Vec::with_capacity(k),
            cut: 0,
            best: u64::MAX,
            best_set: Vec::new(),
        }
    }

    fn push(&mut self, v: usize) {
        self.cut = self.cut + self.degrees[v] - 2 * self.links_into_set[v];
        for &(w, m) in &self.g.neighbors[v] {
            self.links_into_set[w as usize] += m as u64;
        }
        self.chosen.push(v);
    }

    fn pop(&mut self) {
        let v = self.chosen.pop().expect("pop on empty set");
        for &(w, m) in &self.g.neighbors[v] {
            self.links_into_set[w as usize] -= m as u64;
        }
        self.cut = self.cut + 2 * self.links_into_set[v] - self.degrees[v];
    }

    fn descend(&mut self, from: usize) {
        if self.chosen.len() == self.k {
            if self.cut < self.best {
                self.best = self.cut;
                self.best_set.clone_from(&self.chosen);
            }
            return;
        }
        let remaining = self.k - self.chosen.len();
        for v in from..=self.g.n_nodes() - remaining {
            self.push(v);
            self.descend(v + 1);
            self.pop();
        }
    }
}

/// Minimum `L_S` over `samples` uniformly drawn subsets of size `k`; an upper
/// bound on the true minimum. Sample `i` uses its own stream, so the result
/// is independent of thread count.
pub fn sampled_min_cut(g: &Graph, k: usize, samples: u64, seed: u64) -> Result<MinCut> {
    check_size(g, k)?;
    if samples == 0 {
        return Err(Error::param("need at least one sample"));
    }
    let n = g.n_nodes();
    let best = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::CutSample, i);
            let mut set = index::sample(&mut rng, n, k).into_vec();
            set.sort_unstable();
            let mut members = vec![false; n];
            for &v in &set {
                members[v] = true;
            }
            (cut_of_members(g, &members), i, set)
        })
        .reduce_with(|a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a })
        .expect("samples >= 1");
    Ok(MinCut { size: best.0, witness: best.2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    /// Exact minimum meets the bound.
    Satisfied,
    /// A set with `L_S < bound` was found; see the witness.
    Violated,
    /// Enumeration was over budget and sampling found no violation.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeCheck {
    pub k: usize,
    pub bound: f64,
    pub min_cut: u64,
    pub exact: bool,
    pub witness: Vec<usize>,
    pub status: CheckStatus,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub budget: u64,
    /// Subsets drawn per size when enumeration is over budget.
    pub samples: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { budget: DEFAULT_ENUMERATION_BUDGET, samples: 100_000, seed: crate::rng::DEFAULT_SEED }
    }
}

/// Checks `L_S >= bound(k)` for every `|S| = k`, `k_lo <= k <= k_hi`.
///
/// Sizes whose enumeration exceeds the budget fall back to sampling and are
/// reported [`CheckStatus::Inconclusive`] unless a violation turns up.
pub fn verify_uniform_bound<F>(g: &Graph, k_lo: usize, k_hi: usize, bound: F, opts: VerifyOptions) -> Result<Vec<SizeCheck>>
where
    F: Fn(usize) -> f64,
{
    if k_lo == 0 || k_lo > k_hi || k_hi >= g.n_nodes() {
        return Err(Error::param(format!(
            "need 1 <= k_lo <= k_hi < n = {}, got [{k_lo}, {k_hi}]",
            g.n_nodes()
        )));
    }
    let mut out = Vec::with_capacity(k_hi - k_lo + 1);
    for k in k_lo..=k_hi {
        let b = bound(k);
        let (mc, exact) = match min_cut_over_size(g, k, opts.budget) {
            Ok(mc) => (mc, true),
            Err(Error::BudgetExceeded { .. }) => {
                (sampled_min_cut(g, k, opts.samples, opts.seed.wrapping_add(k as u64))?, false)
            }
            Err(e) => return Err(e),
        };
        let status = if (mc.size as f64) < b {
            CheckStatus::Violated
        } else if exact {
            CheckStatus::Satisfied
        } else {
            CheckStatus::Inconclusive
        };
        out.push(SizeCheck { k, bound: b, min_cut: mc.size, exact, witness: mc.witness, status });
    }
    Ok(out)
}
