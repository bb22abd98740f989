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

//! Undirected simple graphs in compressed adjacency form.
//!
//! Every graph in this crate is immutable once built. Construction normalizes
//! the input: self-loops are dropped, parallel edges are collapsed and each
//! neighbor list is sorted ascending, so the rest of the code can rely on
//! binary search and merge-style intersection.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable undirected simple graph with dense node ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    names: Vec<String>,
}

/// Counts of input items removed while normalizing to a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

impl Graph {
    /// Builds a graph over nodes named `"0"..."n-1"`.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let names = (0..n).map(|i| i.to_string()).collect();
        Graph::build(names, edges.iter().copied()).0
    }

    /// Builds a graph whose node `i` carries the external name `names[i]`.
    pub fn build<I>(names: Vec<String>, edges: I) -> (Graph, IngestStats)
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = names.len();
        let mut stats = IngestStats::default();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut raw_edges = 0usize;
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u == v {
                stats.self_loops_dropped += 1;
                continue;
            }
            raw_edges += 1;
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * raw_edges);
        offsets.push(0);
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        stats.duplicates_dropped = raw_edges - neighbors.len() / 2;
        (
            Graph {
                offsets,
                neighbors,
                names,
            },
            stats,
        )
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Sorted neighbor ids of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Position of `i`'s first neighbor in the flat adjacency array. Arrays
    /// indexed by directed edge slot use `edge_offset(i) + k` for the k-th
    /// neighbor.
    pub fn edge_offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Number of directed edge slots, i.e. `2m`.
    pub fn slot_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            self.neighbors.len() as f64 / self.n() as f64
        }
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// Subgraph induced by `nodes`; node `k` of the result is `nodes[k]`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut remap = vec![usize::MAX; self.n()];
        for (k, &v) in nodes.iter().enumerate() {
            remap[v] = k;
        }
        let names = nodes.iter().map(|&v| self.names[v].clone()).collect();
        let edges = nodes.iter().enumerate().flat_map(|(k, &v)| {
            let remap = &remap;
            self.neighbors(v).iter().filter_map(move |&w| {
                (remap[w] != usize::MAX && k < remap[w]).then_some((k, remap[w]))
            })
        });
        Graph::build(names, edges).0
    }

    /// Writes `name name` lines, one per undirected edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.names[u], self.names[v])?;
        }
        Ok(())
    }

    pub fn summary(&self) -> GraphSummary {
        let mean_cc = if self.n() == 0 {
            0.0
        } else {
            (0..self.n())
                .map(|i| clustering_coefficient(self, i))
                .sum::<f64>()
                / self.n() as f64
        };
        GraphSummary {
            n: self.n(),
            m: self.m(),
            mean_degree: self.mean_degree(),
            mean_cc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub mean_degree: f64,
    pub mean_cc: f64,
}

/// A parsed edge list together with normalization counts.
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub stats: IngestStats,
}

/// Parses whitespace-separated `u v` lines. Lines starting with `#` or `%`
/// are comments. Node tokens are arbitrary strings mapped to dense ids in
/// order of first appearance.
pub fn parse_edge_list(text: &str) -> Result<ParsedGraph> {
    parse_edge_list_reader(text.as_bytes())
}

pub fn parse_edge_list_reader<R: BufRead>(reader: R) -> Result<ParsedGraph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |tok: &str| -> usize {
        if let Some(&id) = ids.get(tok) {
            return id;
        }
        let id = names.len();
        ids.insert(tok.to_owned(), id);
        names.push(tok.to_owned());
        id
    };
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 2 node tokens, found {}", tokens.len()),
            });
        }
        let u = intern(tokens[0]);
        let v = intern(tokens[1]);
        edges.push((u, v));
    }
    if names.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (graph, stats) = Graph::build(names, edges);
    Ok(ParsedGraph { graph, stats })
}

/// Connected components, each sorted ascending, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

/// Induced subgraph on the largest connected component. Among components of
/// equal size the one holding the smallest node id wins. Node ids of the
/// result are re-densified in ascending order of the input ids.
pub fn largest_connected_component(g: &Graph) -> Result<Graph> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let components = connected_components(g);
    // components are ordered by smallest member, so the first maximum wins ties
    let mut best = &components[0];
    for comp in &components[1..] {
        if comp.len() > best.len() {
            best = comp;
        }
    }
    if best.len() == g.n() {
        return Ok(g.clone());
    }
    Ok(g.induced_subgraph(best))
}

/// Number of edges among the neighbors of `i`.
pub fn neighbor_links(g: &Graph, i: usize) -> usize {
    let nbrs = g.neighbors(i);
    let mut z = 0;
    for (k, &u) in nbrs.iter().enumerate() {
        z += sorted_intersection_count(g.neighbors(u), &nbrs[k + 1..]);
    }
    z
}

/// Local clustering coefficient `z / (d(d-1)/2)`. Nodes of degree 0 or 1
/// get 1.
pub fn clustering_coefficient(g: &Graph, i: usize) -> f64 {
    let d = g.degree(i);
    if d <= 1 {
        return 1.0;
    }
    let pairs = d * (d - 1) / 2;
    neighbor_links(g, i) as f64 / pairs as f64
}

pub(crate) fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Cumulative distribution of local clustering coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcHistogram {
    pub bin_width: f64,
    /// Upper edge of each bin; the last edge is 1.
    pub upper_edges: Vec<f64>,
    /// `P(CC <= upper_edges[b])`.
    pub cumulative: Vec<f64>,
    pub mean_cc: f64,
}

pub fn cc_distribution(g: &Graph, bin_width: f64) -> Result<CcHistogram> {
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bin width must lie in (0, 1], got {bin_width}"
        )));
    }
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let bins = ((1.0 / bin_width) - 1e-9).ceil().max(1.0) as usize;
    let mut counts = vec![0usize; bins];
    let mut total = 0.0;
    for i in 0..g.n() {
        let cc = clustering_coefficient(g, i);
        total += cc;
        // bins are closed on the right: cc = 0.1 belongs to (0, 0.1]
        let b = ((cc / bin_width) - 1e-9).ceil().max(1.0) as usize - 1;
        counts[b.min(bins - 1)] += 1;
    }
    let n = g.n() as f64;
    let mut cumulative = Vec::with_capacity(bins);
    let mut running = 0usize;
    for &c in &counts {
        running += c;
        cumulative.push(running as f64 / n);
    }
    let upper_edges = (1..=bins)
        .map(|b| (b as f64 * bin_width).min(1.0))
        .collect();
    Ok(CcHistogram {
        bin_width,
        upper_edges,
        cumulative,
        mean_cc: total / n,
    })
}
