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
#![allow(dead_code)]

use nslpa::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi graph with `n` nodes and edge probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Random labels drawn from `0..k`, `k <= n`.
pub fn random_labels(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

/// Dense adjacency matrix, for oracles that should not share code with
/// the adjacency lists under test.
pub fn matrix(g: &Graph) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; g.n()]; g.n()];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// The 200-graph corpus: n in 2..=30, edge probability in [0.2, 0.6].
pub fn corpus() -> Vec<(Graph, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|t| {
            let n = rng.random_range(2..=30);
            let p = rng.random_range(0.2..=0.6);
            let k = rng.random_range(1..=n);
            (random_graph(n, p, t), random_labels(n, k, t))
        })
        .collect()
}

pub fn karate() -> Graph {
    let text = include_str!("../../data/karate.txt");
    nslpa::graph::parse_edge_list(text).unwrap().graph
}
