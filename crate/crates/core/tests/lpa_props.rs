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
mod common;

use std::collections::BTreeMap;

use common::{corpus, matrix, random_graph, random_labels};
use nslpa::graph::largest_connected_component;
use nslpa::lpa::{
    best_labels, classify_node, extract_communities, label_scores, neighborhood_link_count,
    run_original, run_speedup, SpeedupRun,
};
use nslpa::{Graph, Labeling, LpaConfig, NodeState};
use proptest::prelude::*;

/// Labels with the largest plain neighbor count.
fn majority_set(g: &Graph, labels: &[usize], i: usize) -> Vec<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &j in g.neighbors(i) {
        *counts.entry(labels[j]).or_default() += 1;
    }
    let top = counts.values().copied().max().unwrap_or(0);
    counts
        .into_iter()
        .filter(|&(_, c)| c == top)
        .map(|(l, _)| l)
        .collect()
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Full rescan of the active set.
fn active_set(g: &Graph, labels: &Labeling, c: f64) -> Vec<usize> {
    (0..g.n())
        .filter(|&i| classify_node(g, labels, i, c).is_active())
        .collect()
}

#[test]
fn zero_weight_argmax_is_majority_on_corpus() {
    let mut mismatches = 0;
    for (g, labels) in corpus() {
        let lab = Labeling::from_vec(labels.clone());
        for i in 0..g.n() {
            if g.degree(i) == 0 {
                continue;
            }
            let scores = label_scores(&g, &lab, i, 0.0);
            let top = scores.values().cloned().fold(f64::MIN, f64::max);
            let from_scores: Vec<usize> = scores
                .iter()
                .filter(|&(_, &s)| s == top)
                .map(|(&l, _)| l)
                .collect();
            if from_scores != majority_set(&g, &labels, i)
                || sorted(best_labels(&g, &lab, i, 0.0)) != from_scores
            {
                mismatches += 1;
            }
        }
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn link_count_matches_matrix_intersection_on_corpus() {
    let mut mismatches = 0;
    for (g, _) in corpus() {
        let a = matrix(&g);
        for i in 0..g.n() {
            for &j in g.neighbors(i) {
                let brute = (0..g.n()).filter(|&k| k != i && a[j][k] && a[i][k]).count();
                if neighborhood_link_count(&g, j, i) != brute {
                    mismatches += 1;
                }
            }
        }
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn scores_match_direct_sum_on_corpus() {
    let a_c = [0.05, 0.5, 1.0];
    for (g, labels) in corpus().into_iter().take(50) {
        let a = matrix(&g);
        let lab = Labeling::from_vec(labels.clone());
        for i in 0..g.n() {
            for &c in &a_c {
                let mut expected: BTreeMap<usize, f64> = BTreeMap::new();
                for j in 0..g.n() {
                    if a[i][j] {
                        let h = (0..g.n()).filter(|&k| k != i && a[j][k] && a[i][k]).count();
                        *expected.entry(labels[j]).or_default() += 1.0 + c * h as f64;
                    }
                }
                let got = label_scores(&g, &lab, i, c);
                assert_eq!(got.len(), expected.len());
                for (l, s) in expected {
                    assert!((got[&l] - s).abs() < 1e-9);
                }
            }
        }
    }
}

fn connected_graph() -> impl Strategy<Value = Graph> {
    (3usize..=30, 0.15f64..=0.6, any::<u64>())
        .prop_map(|(n, p, seed)| largest_connected_component(&random_graph(n, p, seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pool_tracks_rescan_and_updates_are_effective(
        g in connected_graph(),
        c in prop::sample::select(vec![0.0, 0.05, 0.25, 1.0]),
        seed in any::<u64>(),
        start in any::<u64>(),
    ) {
        let cfg = LpaConfig::new(c, seed).unwrap();
        let k = (start as usize % g.n()) + 1;
        let initial = Labeling::from_vec(random_labels(g.n(), k, start));
        let mut run = SpeedupRun::with_labels(&g, &cfg, initial).unwrap();
        let mut steps = 0;
        loop {
            let lab = Labeling::from_vec(run.labels().to_vec());
            let mut members = run.pool().members().to_vec();
            members.sort_unstable();
            prop_assert_eq!(&members, &active_set(&g, &lab, c));
            if steps >= 100 * g.n() {
                break;
            }
            match run.step() {
                Some(u) => {
                    prop_assert_ne!(u.from, u.to);
                    prop_assert_eq!(run.labels()[u.node], u.to);
                }
                None => break,
            }
            steps += 1;
        }
        prop_assert_eq!(run.updates(), steps);
    }

    #[test]
    fn converged_runs_are_sound(
        g in connected_graph(),
        c in prop::sample::select(vec![0.0, 0.25, 0.8, 1.0]),
        seed in any::<u64>(),
    ) {
        let cfg = LpaConfig::new(c, seed).unwrap();
        for result in [run_speedup(&g, &cfg).unwrap(), run_original(&g, &cfg).unwrap()] {
            if result.converged {
                prop_assert!(active_set(&g, &result.labeling, c).is_empty());
            }
            let p = extract_communities(&g, &result.labeling);
            prop_assert_eq!(p.n(), g.n());
        }
    }

    #[test]
    fn zero_weight_fixed_point_is_local_majority(g in connected_graph(), seed in any::<u64>()) {
        let result = run_speedup(&g, &LpaConfig::new(0.0, seed).unwrap()).unwrap();
        prop_assume!(result.converged);
        let labels = result.labeling.as_slice();
        for i in 0..g.n() {
            let own = g.neighbors(i).iter().filter(|&&j| labels[j] == labels[i]).count();
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for &j in g.neighbors(i) {
                *counts.entry(labels[j]).or_default() += 1;
            }
            prop_assert!(counts.values().all(|&cnt| own >= cnt));
        }
    }

    #[test]
    fn runs_are_deterministic(g in connected_graph(), c in 0.0f64..=1.0, seed in any::<u64>()) {
        let cfg = LpaConfig::new(c, seed).unwrap();
        let (a, b) = (run_speedup(&g, &cfg).unwrap(), run_speedup(&g, &cfg).unwrap());
        prop_assert_eq!(a.labeling, b.labeling);
        prop_assert_eq!(a.effective_updates, b.effective_updates);
        let (a, b) = (run_original(&g, &cfg).unwrap(), run_original(&g, &cfg).unwrap());
        prop_assert_eq!(a.labeling, b.labeling);
        prop_assert_eq!((a.sweeps, a.effective_updates), (b.sweeps, b.effective_updates));
    }
}

#[test]
fn two_triangles_split_for_every_seed() {
    let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]);
    for c in [0.0, 1.0] {
        let mut worst = 0;
        for seed in 0..2000 {
            let r = run_speedup(&g, &LpaConfig::new(c, seed).unwrap()).unwrap();
            assert!(r.converged);
            let l = r.labeling.as_slice();
            assert!(l[0] == l[1] && l[1] == l[2], "seed {seed}: {l:?}");
            assert!(l[3] == l[4] && l[4] == l[5], "seed {seed}: {l:?}");
            worst = worst.max(r.effective_updates);
        }
        assert!(worst <= 3 * g.n(), "c={c}: {worst} updates");
    }
}

#[test]
fn triangle_pair_ends_in_interior_or_boundary_states() {
    let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]);
    let lab = Labeling::from_vec(vec![0, 0, 0, 3, 3, 3]);
    assert_eq!(classify_node(&g, &lab, 0, 0.0), NodeState::InteriorPassive);
    assert_eq!(classify_node(&g, &lab, 2, 0.0), NodeState::BoundaryPassive);
    assert_eq!(classify_node(&g, &lab, 2, 1.0), NodeState::BoundaryPassive);
}
