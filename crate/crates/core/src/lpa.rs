// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Asynchronous label propagation.
//!
//! A node `i` scores each label `k` found among its neighbors as
//!
//! ```text
//! S(k) = sum over neighbors j labeled k of (1 + c * h_j(i))
//! ```
//!
//! where `h_j(i)` counts the edges from `j` to other neighbors of `i`. With
//! `c = 0` this is plain majority voting. A node is *passive* when its current
//! label is among the best-scoring labels and *active* otherwise, so updating
//! an active node always changes its label.
//!
//! Two drivers are provided. [`run_speedup`] keeps every active node in an
//! [`ActivePool`] and only ever updates pool members, stopping once the pool
//! drains. [`run_original`] is the classic sweep-based variant that visits
//! every node in a fresh random order each pass.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{sorted_intersection_count, Graph};
use crate::partition::Partition;
use crate::pool::ActivePool;

pub type Label = usize;

/// Scores within this relative distance of the maximum count as tied.
/// Absorbs rounding in `count + c * strength` for non-dyadic `c`.
const TIE_TOLERANCE: f64 = 1e-9;

/// Per-node label assignment.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling(Vec<Label>);

impl Labeling {
    /// Every node carries its own id as label.
    pub fn singletons(n: usize) -> Labeling {
        Labeling((0..n).collect())
    }

    pub fn from_vec(labels: Vec<Label>) -> Labeling {
        Labeling(labels)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Label {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, label: Label) {
        self.0[i] = label;
    }

    pub fn as_slice(&self) -> &[Label] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Label> {
        self.0
    }

    /// Writes `original_node_id label_id` lines using `g`'s node names.
    pub fn write_text<W: std::io::Write>(&self, g: &Graph, mut out: W) -> std::io::Result<()> {
        for (i, label) in self.0.iter().enumerate() {
            writeln!(out, "{} {}", g.name(i), label)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpaConfig {
    /// Neighborhood-strength weight in `[0, 1]`.
    pub c: f64,
    pub seed: u64,
    /// Cap on attempted updates; `None` means `100 * n`.
    pub max_updates: Option<usize>,
}

impl LpaConfig {
    pub fn new(c: f64, seed: u64) -> Result<LpaConfig> {
        let cfg = LpaConfig {
            c,
            seed,
            max_updates: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_max_updates(mut self, max_updates: usize) -> LpaConfig {
        self.max_updates = Some(max_updates);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.c) {
            return Err(Error::InvalidParameter(format!(
                "c must lie in [0, 1], got {}",
                self.c
            )));
        }
        Ok(())
    }

    fn update_cap(&self, n: usize) -> usize {
        self.max_updates.unwrap_or(100 * n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeState {
    InteriorPassive,
    BoundaryPassive,
    BoundaryActive,
}

impl NodeState {
    pub fn is_active(self) -> bool {
        self == NodeState::BoundaryActive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    #[serde(skip)]
    pub labeling: Labeling,
    /// Updates that changed a label.
    pub effective_updates: usize,
    /// Updates attempted, including ones that kept the label.
    pub attempted_updates: usize,
    /// Full passes over all nodes; zero for the pool-driven variant.
    pub sweeps: usize,
    pub converged: bool,
    pub runtime_ms: f64,
}

/// `h_j(i)`: edges from `j` into the neighborhood of `i`, excluding `i`.
///
/// Because the graph is simple this equals the number of common neighbors
/// of `i` and `j`.
pub fn neighborhood_link_count(g: &Graph, j: usize, i: usize) -> usize {
    debug_assert!(g.has_edge(i, j), "{j} is not a neighbor of {i}");
    sorted_intersection_count(g.neighbors(j), g.neighbors(i))
}

/// `h` for every directed edge slot, aligned with the flat adjacency array.
#[derive(Debug, Clone)]
pub struct LinkCounts(Vec<u32>);

impl LinkCounts {
    pub fn new(g: &Graph) -> LinkCounts {
        let mut h = vec![0u32; g.slot_count()];
        for i in 0..g.n() {
            let base = g.edge_offset(i);
            for (k, &j) in g.neighbors(i).iter().enumerate() {
                if j < i {
                    // symmetric: reuse the value computed from j's side
                    let back = g.edge_offset(j) + g.neighbors(j).binary_search(&i).unwrap();
                    h[base + k] = h[back];
                } else {
                    h[base + k] = sorted_intersection_count(g.neighbors(j), g.neighbors(i)) as u32;
                }
            }
        }
        LinkCounts(h)
    }

    /// `h_j(i)` where `j` is the neighbor stored at `slot`.
    pub fn at(&self, slot: usize) -> u32 {
        self.0[slot]
    }
}

/// Scratch space for tallying the labels around one node.
#[derive(Debug, Clone)]
struct Tally {
    count: Vec<u32>,
    strength: Vec<u64>,
    touched: Vec<Label>,
    best: Vec<Label>,
}

impl Tally {
    fn new(n: usize) -> Tally {
        Tally {
            count: vec![0; n],
            strength: vec![0; n],
            touched: Vec::new(),
            best: Vec::new(),
        }
    }

    fn clear(&mut self) {
        for &k in &self.touched {
            self.count[k] = 0;
            self.strength[k] = 0;
        }
        self.touched.clear();
        self.best.clear();
    }

    /// Accumulates counts and strengths of `i`'s neighbor labels; `h(k, j)`
    /// yields `h_j(i)` for the k-th neighbor `j`.
    fn fill<H>(&mut self, g: &Graph, labels: &[Label], i: usize, mut h: H)
    where
        H: FnMut(usize, usize) -> u64,
    {
        self.clear();
        for (k, &j) in g.neighbors(i).iter().enumerate() {
            let label = labels[j];
            if self.count[label] == 0 {
                self.touched.push(label);
            }
            self.count[label] += 1;
            self.strength[label] += h(k, j);
        }
    }

    fn score(&self, label: Label, c: f64) -> f64 {
        self.count[label] as f64 + c * self.strength[label] as f64
    }

    /// Labels tied for the top score, in order of first appearance among
    /// the sorted neighbors.
    fn argmax(&mut self, c: f64) -> &[Label] {
        let max = self
            .touched
            .iter()
            .map(|&k| self.score(k, c))
            .fold(f64::NEG_INFINITY, f64::max);
        let floor = max - TIE_TOLERANCE * max.abs().max(1.0);
        self.best.clear();
        for &k in &self.touched {
            if self.score(k, c) >= floor {
                self.best.push(k);
            }
        }
        &self.best
    }
}

/// Scores `S(C_k)` of every label present among `i`'s neighbors.
pub fn label_scores(g: &Graph, labels: &Labeling, i: usize, c: f64) -> BTreeMap<Label, f64> {
    let mut scores = BTreeMap::new();
    for &j in g.neighbors(i) {
        let h = if c == 0.0 {
            0
        } else {
            neighborhood_link_count(g, j, i)
        };
        *scores.entry(labels.get(j)).or_insert(0.0) += 1.0 + c * h as f64;
    }
    scores
}

/// Neighborhood view used by the update drivers: precomputed `h` values plus
/// a reusable tally buffer.
#[derive(Debug, Clone)]
struct Scorer<'g> {
    g: &'g Graph,
    links: Option<LinkCounts>,
    c: f64,
    tally: Tally,
}

impl<'g> Scorer<'g> {
    fn new(g: &'g Graph, c: f64) -> Scorer<'g> {
        // h is irrelevant when c = 0
        let links = (c != 0.0).then(|| LinkCounts::new(g));
        Scorer {
            g,
            links,
            c,
            tally: Tally::new(g.n()),
        }
    }

    fn fill(&mut self, labels: &[Label], i: usize) {
        let base = self.g.edge_offset(i);
        match &self.links {
            Some(links) => self
                .tally
                .fill(self.g, labels, i, |k, _| links.at(base + k) as u64),
            None => self.tally.fill(self.g, labels, i, |_, _| 0),
        }
    }

    fn best(&mut self, labels: &[Label], i: usize) -> &[Label] {
        self.fill(labels, i);
        self.tally.argmax(self.c)
    }

    fn classify(&mut self, labels: &[Label], i: usize) -> NodeState {
        let own = labels[i];
        let nbrs = self.g.neighbors(i);
        if nbrs.iter().all(|&j| labels[j] == own) {
            return NodeState::InteriorPassive;
        }
        if self.best(labels, i).contains(&own) {
            NodeState::BoundaryPassive
        } else {
            NodeState::BoundaryActive
        }
    }
}

/// Labels of maximum score around `i`, in order of first appearance among
/// the sorted neighbors. Empty for isolated nodes.
pub fn best_labels(g: &Graph, labels: &Labeling, i: usize, c: f64) -> Vec<Label> {
    let mut tally = Tally::new(g.n());
    tally.fill(g, labels.as_slice(), i, |_, j| {
        if c == 0.0 {
            0
        } else {
            neighborhood_link_count(g, j, i) as u64
        }
    });
    tally.argmax(c).to_vec()
}

pub fn classify_node(g: &Graph, labels: &Labeling, i: usize, c: f64) -> NodeState {
    let own = labels.get(i);
    if g.neighbors(i).iter().all(|&j| labels.get(j) == own) {
        return NodeState::InteriorPassive;
    }
    if best_labels(g, labels, i, c).contains(&own) {
        NodeState::BoundaryPassive
    } else {
        NodeState::BoundaryActive
    }
}

/// Moves `i` to a uniformly chosen best-scoring label and returns it.
///
/// `i` must be active; in debug builds a passive node trips an assertion.
pub fn update_node<R: Rng + ?Sized>(
    g: &Graph,
    labels: &mut Labeling,
    i: usize,
    c: f64,
    rng: &mut R,
) -> Label {
    debug_assert!(
        classify_node(g, labels, i, c).is_active(),
        "update_node called on passive node {i}"
    );
    let best = best_labels(g, labels, i, c);
    let label = best[rng.random_range(0..best.len())];
    labels.set(i, label);
    label
}

/// One update performed by [`SpeedupRun::step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Update {
    pub node: usize,
    pub from: Label,
    pub to: Label,
}

/// Pool-driven label propagation, exposed step by step.
///
/// The pool holds exactly the nodes classified
/// [`NodeState::BoundaryActive`]. After an update only the updated node and
/// its neighbors can change state, so only those are reclassified.
pub struct SpeedupRun<'g> {
    scorer: Scorer<'g>,
    labels: Vec<Label>,
    pool: ActivePool,
    rng: ChaCha8Rng,
    updates: usize,
}

impl<'g> SpeedupRun<'g> {
    pub fn new(g: &'g Graph, cfg: &LpaConfig) -> Result<SpeedupRun<'g>> {
        SpeedupRun::with_labels(g, cfg, Labeling::singletons(g.n()))
    }

    /// Starts from an arbitrary labeling instead of singletons.
    pub fn with_labels(g: &'g Graph, cfg: &LpaConfig, labels: Labeling) -> Result<SpeedupRun<'g>> {
        cfg.validate()?;
        if labels.len() != g.n() {
            return Err(Error::SizeMismatch(labels.len(), g.n()));
        }
        let labels = labels.into_vec();
        if labels.iter().any(|&l| l >= g.n()) {
            return Err(Error::InvalidParameter(
                "label ids must be below the node count".into(),
            ));
        }
        let mut scorer = Scorer::new(g, cfg.c);
        let mut pool = ActivePool::new(g.n());
        for i in 0..g.n() {
            if scorer.classify(&labels, i).is_active() {
                pool.insert(i);
            }
        }
        Ok(SpeedupRun {
            scorer,
            labels,
            pool,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            updates: 0,
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn pool(&self) -> &ActivePool {
        &self.pool
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn is_converged(&self) -> bool {
        self.pool.is_empty()
    }

    /// Updates one random active node; `None` once the pool is empty.
    pub fn step(&mut self) -> Option<Update> {
        let i = self.pool.sample(&mut self.rng)?;
        let from = self.labels[i];
        let best = self.scorer.best(&self.labels, i);
        let to = best[self.rng.random_range(0..best.len())];
        debug_assert_ne!(from, to, "pool member {i} was passive");
        self.labels[i] = to;
        self.updates += 1;

        self.refresh(i);
        let g = self.scorer.g;
        for &j in g.neighbors(i) {
            self.refresh(j);
        }
        Some(Update { node: i, from, to })
    }

    fn refresh(&mut self, v: usize) {
        if self.scorer.classify(&self.labels, v).is_active() {
            self.pool.insert(v);
        } else {
            self.pool.remove(v);
        }
    }
}

/// Runs pool-driven label propagation from singleton labels until no active
/// node remains or the update cap is hit.
pub fn run_speedup(g: &Graph, cfg: &LpaConfig) -> Result<RunResult> {
    let start = Instant::now();
    let cap = cfg.update_cap(g.n());
    let mut run = SpeedupRun::new(g, cfg)?;
    while !run.is_converged() && run.updates() < cap {
        run.step();
    }
    let converged = run.is_converged();
    let updates = run.updates();
    Ok(RunResult {
        labeling: Labeling::from_vec(run.labels),
        effective_updates: updates,
        attempted_updates: updates,
        sweeps: 0,
        converged,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Sweep-based asynchronous label propagation.
///
/// Each sweep visits all nodes in a fresh random order and moves each to a
/// uniformly chosen best-scoring label (possibly its current one). The run
/// stops after the first sweep that leaves every node passive.
pub fn run_original(g: &Graph, cfg: &LpaConfig) -> Result<RunResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = g.n();
    let cap = cfg.update_cap(n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut scorer = Scorer::new(g, cfg.c);
    let mut labels: Vec<Label> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let (mut sweeps, mut attempted, mut effective) = (0, 0, 0);
    let mut converged = n == 0;
    while !converged && attempted + n <= cap {
        order.shuffle(&mut rng);
        for &i in &order {
            if g.degree(i) == 0 {
                continue;
            }
            let best = scorer.best(&labels, i);
            let to = best[rng.random_range(0..best.len())];
            if to != labels[i] {
                labels[i] = to;
                effective += 1;
            }
        }
        sweeps += 1;
        attempted += n;
        converged = (0..n).all(|i| !scorer.classify(&labels, i).is_active());
    }
    Ok(RunResult {
        labeling: Labeling::from_vec(labels),
        effective_updates: effective,
        attempted_updates: attempted,
        sweeps,
        converged,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Communities are connected groups of equally labeled nodes: a label held
/// by two disconnected groups yields two communities.
pub fn extract_communities(g: &Graph, labels: &Labeling) -> Partition {
    let n = g.n();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v) {
                if comp[w] == usize::MAX && labels.get(w) == labels.get(v) {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    Partition::from_labels(&comp)
}

/// True when every label class induces a connected subgraph.
pub fn labels_are_connected(g: &Graph, labels: &Labeling) -> bool {
    let by_label = Partition::from_labels(labels.as_slice());
    extract_communities(g, labels).len() == by_label.len()
}
