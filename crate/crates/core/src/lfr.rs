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

//! LFR-style benchmark graphs with planted communities.
//!
//! Generation follows the usual recipe: power-law degrees, power-law
//! community sizes, nodes placed into communities large enough for their
//! intra-community degree, then configuration-model wiring of intra and
//! inter stubs separately. Bad pairings (self-loops, duplicates, intra pairs
//! in the inter phase) are repaired by degree-preserving edge swaps.

use std::collections::HashSet;
use std::io::Write;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

const MAX_GENERATION_ATTEMPTS: usize = 100;
const MAX_SEQUENCE_DRAWS: usize = 1000;
const SWAP_ATTEMPTS_PER_PAIR: usize = 200;
pub const MAX_CONNECT_RETRIES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LfrParams {
    pub n: usize,
    pub avg_k: f64,
    pub max_k: usize,
    pub mu: f64,
    pub size_min: usize,
    pub size_max: usize,
    /// Magnitude of the degree exponent; weights are `k^-degree_exp`.
    pub degree_exp: f64,
    /// Magnitude of the community-size exponent.
    pub size_exp: f64,
    pub seed: u64,
}

impl Default for LfrParams {
    fn default() -> Self {
        LfrParams {
            n: 1000,
            avg_k: 5.0,
            max_k: 50,
            mu: 0.1,
            size_min: 10,
            size_max: 50,
            degree_exp: 2.0,
            size_exp: 1.0,
            seed: 0,
        }
    }
}

impl LfrParams {
    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Largest intra degree a node of degree `degree` can be given.
    fn max_intra_degree(&self, degree: usize) -> usize {
        ((1.0 - self.mu) * degree as f64).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let infeasible = |msg: String| Err(Error::Infeasible(msg));
        if self.n < 2 {
            return infeasible(format!("n = {} must be at least 2", self.n));
        }
        if !(0.0..1.0).contains(&self.mu) {
            return infeasible(format!("mu = {} must lie in [0, 1)", self.mu));
        }
        if self.size_min == 0 || self.size_min > self.size_max || self.size_max > self.n {
            return infeasible(format!(
                "need 1 <= size_min <= size_max <= n, got {} <= {} <= {}",
                self.size_min, self.size_max, self.n
            ));
        }
        if self.avg_k.is_nan() || self.avg_k <= 1.0 || self.avg_k > self.max_k as f64 {
            return infeasible(format!(
                "need 1 < avg_k <= max_k, got avg_k = {} and max_k = {}",
                self.avg_k, self.max_k
            ));
        }
        if self.max_k >= self.n {
            return infeasible(format!(
                "max_k = {} must be below n = {}",
                self.max_k, self.n
            ));
        }
        if (1.0 - self.mu) * self.avg_k >= self.size_min as f64 {
            return infeasible(format!(
                "(1 - mu) * avg_k = {} must be below size_min = {}",
                (1.0 - self.mu) * self.avg_k,
                self.size_min
            ));
        }
        if self.max_intra_degree(self.max_k) + 1 > self.size_max {
            return infeasible(format!(
                "a node of degree max_k = {} needs {} intra links, more than size_max - 1 = {}",
                self.max_k,
                self.max_intra_degree(self.max_k),
                self.size_max - 1
            ));
        }
        for (name, e) in [("degree_exp", self.degree_exp), ("size_exp", self.size_exp)] {
            if !(e >= 0.0 && e.is_finite()) {
                return infeasible(format!("{name} = {e} must be a finite non-negative value"));
            }
        }
        Ok(())
    }
}

/// Inverse-CDF sampler over integers `lo..=hi` with arbitrary weights.
#[derive(Debug, Clone)]
struct DiscreteSampler {
    lo: usize,
    cumulative: Vec<f64>,
}

impl DiscreteSampler {
    fn new(lo: usize, weights: Vec<f64>) -> DiscreteSampler {
        let mut acc = 0.0;
        let cumulative = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        DiscreteSampler { lo, cumulative }
    }

    fn power_law(exponent: f64, lo: usize, hi: usize) -> DiscreteSampler {
        DiscreteSampler::new(lo, (lo..=hi).map(|x| (x as f64).powf(-exponent)).collect())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.lo + idx.min(self.cumulative.len() - 1)
    }
}

/// Integer in `[lo, hi]` with `P(x)` proportional to `x^-exponent`.
pub fn sample_power_law<R: Rng + ?Sized>(
    exponent: f64,
    lo: usize,
    hi: usize,
    rng: &mut R,
) -> Result<usize> {
    if lo == 0 || lo > hi {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    Ok(DiscreteSampler::power_law(exponent, lo, hi).sample(rng))
}

/// Degree distribution on `[1, max_k]` whose expectation equals `avg_k`.
///
/// Weights are `k^-exp` above a floor degree `lo`, and the floor itself gets
/// a fractional weight `f * lo^-exp` chosen so the mean comes out exact. This
/// is the discrete analogue of solving for a real-valued minimum degree.
fn degree_sampler(exponent: f64, avg_k: f64, max_k: usize) -> DiscreteSampler {
    let w = |x: usize| (x as f64).powf(-exponent);
    // mean with floor `lo` at full weight
    let mean_from = |lo: usize| {
        let (num, den) = (lo..=max_k).fold((0.0, 0.0), |(a, b), x| (a + x as f64 * w(x), b + w(x)));
        num / den
    };
    let mut lo = 1;
    while lo < max_k && mean_from(lo + 1) <= avg_k {
        lo += 1;
    }
    let (above_num, above_den) =
        (lo + 1..=max_k).fold((0.0, 0.0), |(a, b), x| (a + x as f64 * w(x), b + w(x)));
    let factor = if avg_k > lo as f64 {
        ((above_num - avg_k * above_den) / (w(lo) * (avg_k - lo as f64))).max(0.0)
    } else {
        1.0
    };
    let weights = (lo..=max_k)
        .map(|x| if x == lo { factor * w(x) } else { w(x) })
        .collect();
    DiscreteSampler::new(lo, weights)
}

#[derive(Debug, Clone)]
pub struct PlantedNetwork {
    pub graph: Graph,
    pub truth: Partition,
}

impl PlantedNetwork {
    /// Writes `node community` lines.
    pub fn write_truth<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for v in 0..self.graph.n() {
            writeln!(out, "{} {}", self.graph.name(v), self.truth.community_of(v))?;
        }
        Ok(())
    }
}

/// Per-node fraction of edges leaving the node's ground-truth community,
/// averaged over nodes with at least one edge.
pub fn realized_mixing(net: &PlantedNetwork) -> f64 {
    let g = &net.graph;
    let mut total = 0.0;
    let mut counted = 0usize;
    for v in 0..g.n() {
        let d = g.degree(v);
        if d == 0 {
            continue;
        }
        let cv = net.truth.community_of(v);
        let out = g
            .neighbors(v)
            .iter()
            .filter(|&&w| net.truth.community_of(w) != cv)
            .count();
        total += out as f64 / d as f64;
        counted += 1;
    }
    if counted == 0 {
        0.0
    } else {
        total / counted as f64
    }
}

/// Generates a benchmark network.
///
/// For `mu <= 0.5` each planted community should induce a connected
/// subgraph. Generation is repeated up to [`MAX_CONNECT_RETRIES`] times to
/// get there; if every try leaves some community split, the first complete
/// network is returned anyway. Very sparse settings can make connected
/// communities impossible.
pub fn generate(params: &LfrParams) -> Result<PlantedNetwork> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut last_err = None;
    let mut fallback = None;
    let mut connect_tries = 0;
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        match attempt(params, &mut rng) {
            Ok((net, true)) => return Ok(net),
            Ok((net, false)) => {
                fallback.get_or_insert(net);
                connect_tries += 1;
                if connect_tries == MAX_CONNECT_RETRIES {
                    break;
                }
            }
            Err(e @ (Error::Wiring(_) | Error::Infeasible(_))) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    fallback.ok_or_else(|| last_err.unwrap_or_else(|| Error::Wiring("no attempt made".into())))
}

/// True when every planted community induces a connected subgraph.
pub fn communities_connected(net: &PlantedNetwork) -> bool {
    net.truth.communities().iter().all(|comm| {
        let sub = net.graph.induced_subgraph(comm);
        crate::graph::connected_components(&sub).len() == 1
    })
}

fn draw_degrees(params: &LfrParams, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let sampler = degree_sampler(params.degree_exp, params.avg_k, params.max_k);
    for _ in 0..MAX_SEQUENCE_DRAWS {
        let degrees: Vec<usize> = (0..params.n).map(|_| sampler.sample(rng)).collect();
        let mean = degrees.iter().sum::<usize>() as f64 / params.n as f64;
        if (mean - params.avg_k).abs() > 0.05 * params.avg_k {
            continue;
        }
        return Ok(degrees);
    }
    Err(Error::Infeasible(format!(
        "could not draw a degree sequence with mean within 5% of {}",
        params.avg_k
    )))
}

fn draw_sizes(params: &LfrParams, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let sampler = DiscreteSampler::power_law(params.size_exp, params.size_min, params.size_max);
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < params.n {
        let s = sampler.sample(rng);
        sizes.push(s);
        total += s;
    }
    let last = sizes.len() - 1;
    sizes[last] -= total - params.n;
    // the trimmed tail borrows nodes from communities above the minimum
    while sizes[last] < params.size_min {
        let donors: Vec<usize> = (0..last).filter(|&k| sizes[k] > params.size_min).collect();
        let Some(&k) = donors.choose(rng) else {
            if last == 0 {
                break;
            }
            // nothing to borrow: fold the remainder into another community
            let leftover = sizes.pop().unwrap();
            let k = rng.random_range(0..sizes.len());
            sizes[k] += leftover;
            break;
        };
        sizes[k] -= 1;
        sizes[last] += 1;
    }
    Ok(sizes)
}

/// Places nodes so each fits its intra degree; `None` if placement gets stuck.
fn assign_communities(
    intra: &[usize],
    sizes: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..intra.len()).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| intra[b].cmp(&intra[a]));
    let mut free: Vec<usize> = sizes.to_vec();
    let mut membership = vec![0; intra.len()];
    for v in order {
        let eligible = |k: usize| free[k] > 0 && sizes[k] > intra[v];
        let room: usize = (0..sizes.len())
            .filter(|&k| eligible(k))
            .map(|k| free[k])
            .sum();
        if room == 0 {
            return None;
        }
        let mut pick = rng.random_range(0..room);
        let mut chosen = 0;
        for (k, &slots) in free.iter().enumerate() {
            if !eligible(k) {
                continue;
            }
            if pick < slots {
                chosen = k;
                break;
            }
            pick -= slots;
        }
        free[chosen] -= 1;
        membership[v] = chosen;
    }
    Some(membership)
}

/// Edge set with O(1) membership tests.
#[derive(Default)]
struct EdgeStore {
    set: HashSet<(usize, usize)>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl EdgeStore {
    fn contains(&self, u: usize, v: usize) -> bool {
        self.set.contains(&key(u, v))
    }

    fn replace(&mut self, old: (usize, usize), new: [(usize, usize); 2]) {
        self.set.remove(&key(old.0, old.1));
        for (a, b) in new {
            self.set.insert(key(a, b));
        }
    }
}

/// Simple graph on `members` built greedily by Havel-Hakimi: the node with
/// most remaining stubs links to the next ones in line. Stubs that cannot be
/// placed without a multi-edge are left over; `degree` is lowered by that
/// amount. The leftover total is always even.
fn havel_hakimi(members: &[usize], degree: &mut [usize]) -> Vec<(usize, usize)> {
    let mut remaining: Vec<(usize, usize)> = members.iter().map(|&v| (degree[v], v)).collect();
    let mut edges = Vec::new();
    loop {
        remaining.retain(|&(r, _)| r > 0);
        if remaining.is_empty() {
            return edges;
        }
        remaining.sort_unstable_by(|a, b| b.cmp(a));
        let (r, v) = remaining[0];
        let linked = r.min(remaining.len() - 1);
        degree[v] -= r - linked;
        remaining[0].0 = 0;
        for slot in &mut remaining[1..=linked] {
            slot.0 -= 1;
            edges.push((v, slot.1));
        }
    }
}

/// Degree-preserving random double-edge swaps.
fn shuffle_edges(
    edges: &mut [(usize, usize)],
    store: &mut EdgeStore,
    swaps: usize,
    rng: &mut ChaCha8Rng,
) {
    if edges.len() < 2 {
        return;
    }
    for _ in 0..swaps {
        let i = rng.random_range(0..edges.len());
        let j = rng.random_range(0..edges.len());
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.random::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        // (a, b), (c, d) -> (a, d), (c, b)
        if a == d || c == b || a == c || b == d || store.contains(a, d) || store.contains(c, b) {
            continue;
        }
        store.set.remove(&key(c, d));
        store.replace((a, b), [(a, d), (c, b)]);
        edges[i] = (a, d);
        edges[j] = (c, b);
    }
}

/// Intra-community edges: configuration-model pairing first, falling back
/// to a randomized Havel-Hakimi graph when pairing gets stuck on a tight
/// degree sequence.
///
/// Intra stubs the fallback cannot place are handed to the inter phase by
/// lowering `intra`.
fn wire_community(
    members: &[usize],
    intra: &mut [usize],
    rng: &mut ChaCha8Rng,
) -> (Vec<(usize, usize)>, EdgeStore) {
    let mut stubs: Vec<usize> = members
        .iter()
        .flat_map(|&v| std::iter::repeat_n(v, intra[v]))
        .collect();
    let mut store = EdgeStore::default();
    if let Ok(edges) = wire(&mut stubs, |_, _| true, &mut store, rng) {
        return (edges, store);
    }
    let mut edges = havel_hakimi(members, intra);
    let mut store = EdgeStore::default();
    for &(u, v) in &edges {
        store.set.insert(key(u, v));
    }
    let swaps = 10 * edges.len();
    shuffle_edges(&mut edges, &mut store, swaps, rng);
    (edges, store)
}

/// Configuration-model pairing of `stubs` with swap repair. Returns the new
/// edges; `allowed` filters acceptable endpoint pairs.
fn wire<F>(
    stubs: &mut [usize],
    allowed: F,
    store: &mut EdgeStore,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize)>>
where
    F: Fn(usize, usize) -> bool,
{
    debug_assert!(stubs.len().is_multiple_of(2));
    stubs.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    let mut pending = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && allowed(u, v) && !store.contains(u, v) {
            store.set.insert(key(u, v));
            edges.push((u, v));
        } else {
            pending.push((u, v));
        }
    }
    let ok =
        |store: &EdgeStore, a: usize, b: usize| a != b && allowed(a, b) && !store.contains(a, b);
    for (u, v) in pending {
        let mut placed = false;
        for _ in 0..SWAP_ATTEMPTS_PER_PAIR {
            if edges.is_empty() {
                break;
            }
            let idx = rng.random_range(0..edges.len());
            let (mut x, mut y) = edges[idx];
            if rng.random::<bool>() {
                std::mem::swap(&mut x, &mut y);
            }
            // replace (x, y) and the bad pair (u, v) by (u, x) and (v, y)
            if key(u, x) == key(v, y) || !ok(store, u, x) || !ok(store, v, y) {
                continue;
            }
            store.replace((x, y), [(u, x), (v, y)]);
            edges[idx] = (u, x);
            edges.push((v, y));
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::Wiring(format!(
                "could not place stub pair ({u}, {v}) after {SWAP_ATTEMPTS_PER_PAIR} swaps"
            )));
        }
    }
    Ok(edges)
}

fn local_components(members: &[usize], edges: &[(usize, usize)], local: &[usize]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, local[u]), find(&mut parent, local[v]));
        if a != b {
            parent[a] = b;
        }
    }
    (0..members.len()).map(|x| find(&mut parent, x)).collect()
}

/// Joins the components of one community by degree-preserving swaps.
///
/// Each round takes an edge `(b1, b2)` lying on a cycle and an edge
/// `(a1, a2)` of the smallest other component, and replaces them by
/// `(a1, b1)` and `(a2, b2)`. The cycle edge keeps its side connected, so
/// every round merges two components. A disconnected community with at least
/// `size - 1` edges always has a cycle, so this only fails on communities
/// that are too sparse or hold a member without intra edges.
fn connect_community(
    members: &[usize],
    edges: &mut [(usize, usize)],
    local: &[usize],
    store: &mut EdgeStore,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    for _ in 0..members.len() {
        let root = local_components(members, edges, local);
        let mut sizes = vec![0usize; members.len()];
        for &r in &root {
            sizes[r] += 1;
        }
        if sizes.iter().filter(|&&s| s > 0).count() <= 1 {
            return Ok(());
        }
        let comp_of = |e: usize| root[local[edges[e].0]];
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.shuffle(rng);
        let on_cycle = |e: usize| {
            let (u, v) = edges[e];
            let rest: Vec<(usize, usize)> = edges
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != e)
                .map(|(_, &edge)| edge)
                .collect();
            let r = local_components(members, &rest, local);
            r[local[u]] == r[local[v]]
        };
        let Some(eb) = order.iter().copied().find(|&e| on_cycle(e)) else {
            return Err(Error::Wiring(
                "community is a forest with too few edges".into(),
            ));
        };
        let target = comp_of(eb);
        let Some(ea) = order
            .iter()
            .copied()
            .filter(|&e| comp_of(e) != target)
            .min_by_key(|&e| (sizes[comp_of(e)], comp_of(e)))
        else {
            return Err(Error::Wiring("community member without intra edges".into()));
        };
        let (a1, a2) = edges[ea];
        let (b1, b2) = edges[eb];
        // endpoints lie in different components, so the new edges are fresh
        store.set.remove(&key(b1, b2));
        store.replace((a1, a2), [(a1, b1), (a2, b2)]);
        edges[ea] = (a1, b1);
        edges[eb] = (a2, b2);
    }
    Err(Error::Wiring("community stayed disconnected".into()))
}

/// Per-node mixing level `m` such that giving every node the share
/// `min(m, 1 - floor / d)` of inter links averages to `mu` over nodes.
///
/// Nodes held at `floor` intra links cannot mix as much as `mu`; the
/// remaining nodes make up for them.
fn compensated_mixing(degrees: &[usize], mu: f64, floor: usize) -> f64 {
    let mean_share = |m: f64| {
        degrees
            .iter()
            .map(|&d| m.min(1.0 - floor.min(d) as f64 / d as f64))
            .sum::<f64>()
            / degrees.len() as f64
    };
    if floor == 0 || mean_share(1.0) <= mu {
        return if floor == 0 { mu } else { 1.0 };
    }
    let (mut lo, mut hi) = (mu, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mean_share(mid) < mu {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Intra degrees by randomized rounding of `(1 - m) d`, so the expected
/// inter share of each node is exactly `m`. With `keep_connected` every node
/// keeps at least one intra link.
fn draw_intra_degrees(
    degrees: &[usize],
    mu: f64,
    keep_connected: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let floor = usize::from(keep_connected);
    let mixing = compensated_mixing(degrees, mu, floor);
    degrees
        .iter()
        .map(|&d| {
            let target = ((1.0 - mixing) * d as f64).max(floor.min(d) as f64);
            let base = target.floor();
            let up = rng.random::<f64>() < target - base;
            base as usize + usize::from(up)
        })
        .collect()
}

/// One generation pass; the flag reports whether every community could be
/// connected (always true when connectivity is not required).
fn attempt(params: &LfrParams, rng: &mut ChaCha8Rng) -> Result<(PlantedNetwork, bool)> {
    let n = params.n;
    let mut degrees = draw_degrees(params, rng)?;
    let keep_connected = params.mu <= 0.5;
    let mut intra = draw_intra_degrees(&degrees, params.mu, keep_connected, rng);
    let sizes = draw_sizes(params, rng)?;
    let membership = assign_communities(&intra, &sizes, rng)
        .ok_or_else(|| Error::Infeasible("no community large enough for a node".into()))?;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    for v in 0..n {
        members[membership[v]].push(v);
    }

    // a connected community needs at least size - 1 intra edges; top up
    // intra stubs of random members at the expense of their inter stubs
    if keep_connected {
        let mut boosted = 0usize;
        for comm in &members {
            let needed = 2 * (comm.len() - 1);
            let mut total: usize = comm.iter().map(|&v| intra[v]).sum();
            while total < needed {
                let candidates: Vec<usize> = comm
                    .iter()
                    .copied()
                    .filter(|&v| intra[v] < degrees[v] && intra[v] + 1 < comm.len())
                    .collect();
                let Some(&v) = candidates.choose(rng) else {
                    break;
                };
                intra[v] += 1;
                total += 1;
                boosted += 1;
            }
        }
        // hand the same number of stubs back to inter links from communities
        // with room to spare, keeping the overall mixing on target
        let mut slack: Vec<usize> = members
            .iter()
            .map(|comm| {
                let total: usize = comm.iter().map(|&v| intra[v]).sum();
                total.saturating_sub(2 * (comm.len() - 1))
            })
            .collect();
        let mut donors: Vec<usize> = (0..n)
            .filter(|&v| intra[v] > 1 && slack[membership[v]] > 0)
            .collect();
        while boosted > 0 && !donors.is_empty() {
            let idx = rng.random_range(0..donors.len());
            let v = donors[idx];
            let k = membership[v];
            if intra[v] <= 1 || slack[k] == 0 {
                donors.swap_remove(idx);
                continue;
            }
            intra[v] -= 1;
            slack[k] -= 1;
            boosted -= 1;
        }
    }

    // intra-stub parity per community: prefer raising a node's intra count
    // within its degree, then raising degree and intra count together, and
    // only then lowering an intra count
    for comm in &members {
        let total: usize = comm.iter().map(|&v| intra[v]).sum();
        if total.is_multiple_of(2) {
            continue;
        }
        let mut order = comm.clone();
        order.shuffle(rng);
        let fits = |v: usize| intra[v] + 1 < comm.len();
        let min_left = if keep_connected { 2 } else { 1 };
        if let Some(&v) = order.iter().find(|&&v| intra[v] < degrees[v] && fits(v)) {
            intra[v] += 1;
        } else if let Some(&v) = order
            .iter()
            .find(|&&v| degrees[v] < params.max_k && fits(v))
        {
            intra[v] += 1;
            degrees[v] += 1;
        } else if let Some(&v) = order.iter().find(|&&v| intra[v] >= min_left) {
            intra[v] -= 1;
        } else {
            return Err(Error::Infeasible("cannot repair intra-stub parity".into()));
        }
    }
    let inter_total: usize = (0..n).map(|v| degrees[v] - intra[v]).sum();
    if inter_total % 2 == 1 {
        let candidates: Vec<usize> = (0..n).filter(|&v| degrees[v] < params.max_k).collect();
        let &v = candidates
            .choose(rng)
            .ok_or_else(|| Error::Infeasible("every node already has max_k stubs".into()))?;
        degrees[v] += 1;
    }

    let mut local = vec![0usize; n];
    let mut all_edges = Vec::new();
    let mut connected = true;
    for comm in &members {
        for (idx, &v) in comm.iter().enumerate() {
            local[v] = idx;
        }
        let (mut edges, mut store) = wire_community(comm, &mut intra, rng);
        if keep_connected && connect_community(comm, &mut edges, &local, &mut store, rng).is_err() {
            connected = false;
        }
        all_edges.extend(edges);
    }

    // inter edges join distinct communities, so they never collide with
    // intra edges
    let mut stubs: Vec<usize> = (0..n)
        .flat_map(|v| std::iter::repeat_n(v, degrees[v] - intra[v]))
        .collect();
    let inter = wire(
        &mut stubs,
        |u, v| membership[u] != membership[v],
        &mut EdgeStore::default(),
        rng,
    )?;
    all_edges.extend(inter);

    let names = (0..n).map(|v| v.to_string()).collect();
    let (graph, stats) = Graph::build(names, all_edges);
    debug_assert_eq!(stats.self_loops_dropped + stats.duplicates_dropped, 0);
    let truth = Partition::from_communities(members)?;
    Ok((PlantedNetwork { graph, truth }, connected))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(sample_power_law(2.0, 7, 7, &mut rng).unwrap(), 7);
        }
        assert!(sample_power_law(2.0, 8, 7, &mut rng).is_err());
        assert!(sample_power_law(2.0, 0, 7, &mut rng).is_err());
    }

    #[test]
    fn exponent_two_ratio() {
        // exact weights: P(10)/P(20) = (20/10)^2 = 4
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = [0usize; 51];
        for _ in 0..100_000 {
            counts[sample_power_law(2.0, 10, 50, &mut rng).unwrap()] += 1;
        }
        let ratio = counts[10] as f64 / counts[20] as f64;
        assert!((ratio - 4.0).abs() <= 0.4, "ratio {ratio}");
    }

    #[test]
    fn exponent_zero_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (lo, hi, draws) = (3usize, 12usize, 50_000usize);
        let mut counts = vec![0f64; hi - lo + 1];
        for _ in 0..draws {
            counts[sample_power_law(0.0, lo, hi, &mut rng).unwrap() - lo] += 1.0;
        }
        let expected = draws as f64 / counts.len() as f64;
        let chi2: f64 = counts
            .iter()
            .map(|c| (c - expected).powi(2) / expected)
            .sum();
        // 9 degrees of freedom, 99.9th percentile is 27.88
        assert!(chi2 < 27.88, "chi2 {chi2}");
    }

    #[test]
    fn degree_sampler_hits_target_mean() {
        for (exp, avg, max) in [
            (2.0, 5.0, 50),
            (2.0, 20.0, 50),
            (3.0, 2.0, 30),
            (2.0, 1.5, 50),
        ] {
            let s = degree_sampler(exp, avg, max);
            let total = *s.cumulative.last().unwrap();
            let mut prev = 0.0;
            let mut mean = 0.0;
            for (i, &c) in s.cumulative.iter().enumerate() {
                mean += (s.lo + i) as f64 * (c - prev) / total;
                prev = c;
            }
            assert!(
                (mean - avg).abs() < 1e-9,
                "exp {exp} avg {avg}: mean {mean}"
            );
        }
    }

    #[test]
    fn rejects_infeasible_params() {
        let bad = [
            LfrParams {
                mu: 1.0,
                ..LfrParams::default()
            },
            LfrParams {
                size_min: 60,
                ..LfrParams::default()
            },
            LfrParams {
                avg_k: 60.0,
                ..LfrParams::default()
            },
            LfrParams {
                max_k: 1000,
                ..LfrParams::default()
            },
            LfrParams {
                size_min: 4,
                ..LfrParams::default()
            },
            // degree-50 node needs 50 intra links at zero mixing
            LfrParams {
                mu: 0.0,
                ..LfrParams::default()
            },
        ];
        for p in bad {
            assert!(matches!(generate(&p), Err(Error::Infeasible(_))), "{p:?}");
        }
    }

    #[test]
    fn zero_mixing_keeps_edges_inside() {
        let p = LfrParams {
            n: 300,
            max_k: 25,
            mu: 0.0,
            seed: 5,
            ..LfrParams::default()
        };
        let net = generate(&p).unwrap();
        for (u, v) in net.graph.edges() {
            assert_eq!(net.truth.community_of(u), net.truth.community_of(v));
        }
        assert_eq!(realized_mixing(&net), 0.0);
    }

    #[test]
    fn singleton_truth_mixes_fully() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let net = PlantedNetwork {
            graph: g,
            truth: Partition::singletons(3),
        };
        assert_eq!(realized_mixing(&net), 1.0);
    }

    #[test]
    fn truth_file_layout() {
        let net = PlantedNetwork {
            graph: Graph::from_edges(2, &[(0, 1)]),
            truth: Partition::whole(2),
        };
        let mut out = Vec::new();
        net.write_truth(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 0\n1 0\n");
    }
}
