//! Exact event-driven simulation of the contact process.
//!
//! Infected nodes heal at rate 1; a healthy node `j` becomes infected at rate
//! `τ Σ_{i infected} A_ij`. The incoming multiplicity of every node (its
//! "pressure") is maintained incrementally and the healthy pressures live in a
//! sum tree, so one event costs `O(deg · log N)`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream, Purpose, SimRng};
use crate::sumtree::SumTree;

const AUDIT_INTERVAL: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    All,
    Nodes(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContactConfig {
    /// Per-edge infection rate.
    pub tau: f64,
    pub initial: InitialState,
    /// Censoring horizon. Supercritical runs need one, or they effectively
    /// never terminate.
    pub t_max: Option<f64>,
    pub seed: u64,
}

impl ContactConfig {
    pub fn new(tau: f64) -> Self {
        ContactConfig { tau, initial: InitialState::All, t_max: None, seed: crate::rng::DEFAULT_SEED }
    }

    pub fn with_initial(mut self, nodes: Vec<usize>) -> Self {
        self.initial = InitialState::Nodes(nodes);
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = Some(t_max);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, g: &Graph) -> Result<()> {
        // τ = 0 is the pure death chain, useful as a reference
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::param(format!("infection rate must be nonnegative and finite, got {}", self.tau)));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(Error::param(format!("t_max must be positive, got {t}")));
            }
        }
        match &self.initial {
            InitialState::All if g.n_nodes() == 0 => Err(Error::param("graph has no nodes")),
            InitialState::All => Ok(()),
            InitialState::Nodes(nodes) => {
                if nodes.is_empty() {
                    return Err(Error::param("initial infected set is empty"));
                }
                let mut seen = vec![false; g.n_nodes()];
                for &v in nodes {
                    if v >= g.n_nodes() {
                        return Err(Error::param(format!("initial node {v} out of range")));
                    }
                    if std::mem::replace(&mut seen[v], true) {
                        return Err(Error::param(format!("initial node {v} listed twice")));
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Heal(usize),
    Infect(usize),
    /// No infected nodes remain; nothing happened.
    Extinct,
}

/// One sample path. Use [`ContactProcess::step`] to drive it by hand.
pub struct ContactProcess<'g> {
    graph: &'g Graph,
    tau: f64,
    infected: Vec<bool>,
    infected_list: Vec<u32>,
    /// Position in `infected_list`, or `u32::MAX` when healthy.
    slot: Vec<u32>,
    /// `pressure[j] = Σ_{i infected} A_ij`, kept for every node.
    pressure: Vec<u64>,
    /// Healthy nodes weighted by pressure; infected nodes have weight 0.
    healthy: SumTree,
    time: f64,
    events: u64,
    rng: SimRng,
}

impl<'g> ContactProcess<'g> {
    pub fn new(graph: &'g Graph, cfg: &ContactConfig, rng: SimRng) -> Result<Self> {
        cfg.validate(graph)?;
        let n = graph.n_nodes();
        let mut p = ContactProcess {
            graph,
            tau: cfg.tau,
            infected: vec![false; n],
            infected_list: Vec::new(),
            slot: vec![u32::MAX; n],
            pressure: vec![0; n],
            healthy: SumTree::new(n),
            time: 0.0,
            events: 0,
            rng,
        };
        match &cfg.initial {
            InitialState::All => (0..n).for_each(|v| p.infect(v)),
            InitialState::Nodes(nodes) => nodes.iter().for_each(|&v| p.infect(v)),
        }
        Ok(p)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn infected_count(&self) -> usize {
        self.infected_list.len()
    }

    pub fn is_infected(&self, v: usize) -> bool {
        self.infected[v]
    }

    /// `Σ_{i infected, j healthy} A_ij`.
    pub fn boundary_edges(&self) -> u64 {
        self.healthy.total()
    }

    pub fn total_rate(&self) -> f64 {
        self.infected_list.len() as f64 + self.tau * self.healthy.total() as f64
    }

    /// Waiting time until the next event, or `None` when extinct.
    pub fn next_waiting_time(&mut self) -> Option<f64> {
        let rate = self.total_rate();
        if self.infected_list.is_empty() {
            return None;
        }
        let e: f64 = Exp1.sample(&mut self.rng);
        Some(e / rate)
    }

    /// Applies one event chosen according to the current rates, without
    /// advancing the clock.
    pub fn apply_event(&mut self) -> Event {
        let n_inf = self.infected_list.len();
        if n_inf == 0 {
            return Event::Extinct;
        }
        let heal_rate = n_inf as f64;
        let infect_rate = self.tau * self.healthy.total() as f64;
        let heal = infect_rate == 0.0 || self.rng.random::<f64>() * (heal_rate + infect_rate) < heal_rate;
        self.events += 1;
        let ev = if heal {
            let v = self.infected_list[self.rng.random_range(0..n_inf)] as usize;
            self.heal(v);
            Event::Heal(v)
        } else {
            let target = self.rng.random_range(0..self.healthy.total());
            let v = self.healthy.find(target);
            self.infect(v);
            Event::Infect(v)
        };
        if cfg!(debug_assertions) && self.events.is_multiple_of(AUDIT_INTERVAL) {
            if let Err(msg) = self.audit() {
                panic!("contact process bookkeeping drifted: {msg}");
            }
        }
        ev
    }

    /// Advances to the next event. Returns `Event::Extinct` without moving
    /// the clock when nothing is infected.
    pub fn step(&mut self) -> Event {
        match self.next_waiting_time() {
            None => Event::Extinct,
            Some(dt) => {
                self.time += dt;
                self.apply_event()
            }
        }
    }

    fn infect(&mut self, v: usize) {
        debug_assert!(!self.infected[v]);
        self.infected[v] = true;
        self.slot[v] = self.infected_list.len() as u32;
        self.infected_list.push(v as u32);
        self.healthy.set(v, 0);
        for &(u, m) in self.graph.neighbors(v) {
            let u = u as usize;
            self.pressure[u] += m as u64;
            if !self.infected[u] {
                self.healthy.set(u, self.pressure[u]);
            }
        }
    }

    fn heal(&mut self, v: usize) {
        debug_assert!(self.infected[v]);
        self.infected[v] = false;
        let s = self.slot[v] as usize;
        self.infected_list.swap_remove(s);
        if let Some(&moved) = self.infected_list.get(s) {
            self.slot[moved as usize] = s as u32;
        }
        self.slot[v] = u32::MAX;
        for &(u, m) in self.graph.neighbors(v) {
            let u = u as usize;
            self.pressure[u] -= m as u64;
            if !self.infected[u] {
                self.healthy.set(u, self.pressure[u]);
            }
        }
        self.healthy.set(v, self.pressure[v]);
    }

    /// Recomputes all pressures from scratch and compares them with the
    /// incremental state.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let n = self.graph.n_nodes();
        let mut pressure = vec![0u64; n];
        for v in (0..n).filter(|&v| self.infected[v]) {
            for &(u, m) in self.graph.neighbors(v) {
                pressure[u as usize] += m as u64;
            }
        }
        if pressure != self.pressure {
            return Err("pressure vector mismatch".into());
        }
        let mut boundary = 0;
        for (v, &p) in pressure.iter().enumerate().take(n) {
            let want = if self.infected[v] { 0 } else { p };
            if self.healthy.get(v) != want {
                return Err(format!("sum tree weight mismatch at node {v}"));
            }
            boundary += want;
        }
        if boundary != self.healthy.total() {
            return Err("sum tree total mismatch".into());
        }
        let count = self.infected.iter().filter(|&&b| b).count();
        if count != self.infected_list.len() {
            return Err("infected list length mismatch".into());
        }
        if self.infected_list.iter().enumerate().any(|(i, &v)| self.slot[v as usize] as usize != i) {
            return Err("infected list index mismatch".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtinctionSample {
    /// Extinction time, or `t_max` when censored.
    pub time: f64,
    pub censored: bool,
    pub peak_infected: usize,
    pub events: u64,
}

fn run_to_extinction(g: &Graph, cfg: &ContactConfig, rng: SimRng) -> Result<ExtinctionSample> {
    let mut p = ContactProcess::new(g, cfg, rng)?;
    let mut peak = p.infected_count();
    let horizon = cfg.t_max.unwrap_or(f64::INFINITY);
    while let Some(dt) = p.next_waiting_time() {
        if p.time + dt > horizon {
            return Ok(ExtinctionSample { time: horizon, censored: true, peak_infected: peak, events: p.events });
        }
        p.time += dt;
        p.apply_event();
        peak = peak.max(p.infected_count());
    }
    Ok(ExtinctionSample { time: p.time, censored: false, peak_infected: peak, events: p.events })
}

/// Replication `index` of the experiment identified by `cfg.seed`.
pub fn simulate_replication(g: &Graph, cfg: &ContactConfig, index: u64) -> Result<ExtinctionSample> {
    run_to_extinction(g, cfg, stream(cfg.seed, Purpose::Replication, index))
}

/// A single path; identical to replication 0.
pub fn simulate_extinction(g: &Graph, cfg: &ContactConfig) -> Result<ExtinctionSample> {
    simulate_replication(g, cfg, 0)
}

/// Runs `reps` replications in parallel. The result is ordered by
/// replication index and does not depend on the thread count.
pub fn replicate(g: &Graph, cfg: &ContactConfig, reps: u64) -> Result<Vec<ExtinctionSample>> {
    cfg.validate(g)?;
    (0..reps).into_par_iter().map(|r| simulate_replication(g, cfg, r)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtinctionSummary {
    pub reps: u64,
    pub censored_count: u64,
    /// Mean over uncensored samples.
    pub mean: Option<f64>,
    /// Standard error of `mean`; needs two uncensored samples.
    pub stderr: Option<f64>,
    /// Mean of `min(T, t_max)` over all samples, a lower estimate of `E[T]`.
    pub restricted_mean: f64,
    pub restricted_stderr: f64,
}

fn mean_and_stderr(xs: impl Iterator<Item = f64> + Clone) -> (usize, f64, f64) {
    let n = xs.clone().count();
    if n == 0 {
        return (0, f64::NAN, f64::NAN);
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (1, mean, f64::NAN);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (n, mean, (var / n as f64).sqrt())
}

pub fn summarize(samples: &[ExtinctionSample]) -> ExtinctionSummary {
    let uncensored = samples.iter().filter(|s| !s.censored).map(|s| s.time);
    let (n, mean, stderr) = mean_and_stderr(uncensored);
    let (_, restricted_mean, restricted_stderr) = mean_and_stderr(samples.iter().map(|s| s.time));
    ExtinctionSummary {
        reps: samples.len() as u64,
        censored_count: (samples.len() - n) as u64,
        mean: (n > 0).then_some(mean),
        stderr: (n > 1).then_some(stderr),
        restricted_mean,
        restricted_stderr: if samples.len() > 1 { restricted_stderr } else { 0.0 },
    }
}

/// Mean extinction time over the uncensored replications. Fails with
/// [`Error::NoUncensoredSamples`] when every replication hit `t_max`.
pub fn estimate_mean_extinction(g: &Graph, cfg: &ContactConfig, reps: u64) -> Result<ExtinctionSummary> {
    if reps == 0 {
        return Err(Error::param("need at least one replication"));
    }
    let summary = summarize(&replicate(g, cfg, reps)?);
    if summary.mean.is_none() {
        return Err(Error::NoUncensoredSamples { reps });
    }
    Ok(summary)
}

/// `|I_t|` at each requested time along one path. The horizon is the last
/// sample time; `cfg.t_max` is ignored.
pub fn infected_trajectory(g: &Graph, cfg: &ContactConfig, sample_times: &[f64]) -> Result<Vec<usize>> {
    if sample_times.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::param("sample times must be sorted ascending"));
    }
    if sample_times.first().is_some_and(|&t| !(t >= 0.0)) {
        return Err(Error::param("sample times must be nonnegative"));
    }
    let mut p = ContactProcess::new(g, cfg, stream(cfg.seed, Purpose::Trajectory, 0))?;
    let mut out = Vec::with_capacity(sample_times.len());
    let mut next = 0;
    while next < sample_times.len() {
        let Some(dt) = p.next_waiting_time() else { break };
        let t_next = p.time + dt;
        while next < sample_times.len() && sample_times[next] < t_next {
            out.push(p.infected_count());
            next += 1;
        }
        p.time = t_next;
        p.apply_event();
    }
    out.resize(sample_times.len(), 0);
    Ok(out)
}
