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

//! Partition quality (modularity), partition similarity (NMI, ARI) and
//! community-size statistics.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

/// Newman modularity `Q = sum_k (e_kk - a_k^2)`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    if p.n() != g.n() {
        return Err(Error::SizeMismatch(p.n(), g.n()));
    }
    let m = g.m();
    if m == 0 {
        return Err(Error::NoEdges);
    }
    let k = p.len();
    let mut internal = vec![0usize; k];
    let mut degree_sum = vec![0usize; k];
    for v in 0..g.n() {
        let cv = p.community_of(v);
        degree_sum[cv] += g.degree(v);
        for &w in g.neighbors(v) {
            if v < w && p.community_of(w) == cv {
                internal[cv] += 1;
            }
        }
    }
    let m = m as f64;
    Ok(internal
        .iter()
        .zip(&degree_sum)
        .map(|(&l, &d)| {
            let a = d as f64 / (2.0 * m);
            l as f64 / m - a * a
        })
        .sum())
}

/// Sparse contingency table of two partitions over the same nodes.
struct Contingency {
    n: usize,
    cells: BTreeMap<(usize, usize), usize>,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Contingency {
    fn new(a: &Partition, b: &Partition) -> Result<Contingency> {
        if a.n() != b.n() {
            return Err(Error::SizeMismatch(a.n(), b.n()));
        }
        let mut cells = BTreeMap::new();
        for v in 0..a.n() {
            *cells
                .entry((a.community_of(v), b.community_of(v)))
                .or_insert(0) += 1;
        }
        Ok(Contingency {
            n: a.n(),
            cells,
            rows: a.sizes(),
            cols: b.sizes(),
        })
    }
}

/// Normalized mutual information in the confusion-matrix form
///
/// ```text
/// NMI = -2 sum_ij N_ij ln(N_ij n / (N_i N_j)) / (sum_i N_i ln(N_i / n) + sum_j N_j ln(N_j / n))
/// ```
///
/// When both partitions are a single community the denominator vanishes and
/// the result is 1 (they are necessarily identical).
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    let t = Contingency::new(a, b)?;
    if t.n == 0 {
        return Ok(1.0);
    }
    let n = t.n as f64;
    let entropy_term =
        |sizes: &[usize]| -> f64 { sizes.iter().map(|&s| s as f64 * (s as f64 / n).ln()).sum() };
    let denom = entropy_term(&t.rows) + entropy_term(&t.cols);
    if denom == 0.0 {
        return Ok(1.0);
    }
    let mut num = 0.0;
    for (&(i, j), &nij) in &t.cells {
        let nij = nij as f64;
        num += nij * (nij * n / (t.rows[i] as f64 * t.cols[j] as f64)).ln();
    }
    Ok((-2.0 * num / denom).clamp(0.0, 1.0))
}

fn pairs(x: usize) -> f64 {
    let x = x as f64;
    x * (x - 1.0) / 2.0
}

/// Hubert-Arabie adjusted Rand index over node pairs.
///
/// Returns 1 when the chance-adjusted denominator vanishes, which only
/// happens when both partitions are all singletons or both a single
/// community.
pub fn ari(a: &Partition, b: &Partition) -> Result<f64> {
    let t = Contingency::new(a, b)?;
    if t.n < 2 {
        return Err(Error::TooFewNodes(t.n));
    }
    let index: f64 = t.cells.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = t.rows.iter().map(|&c| pairs(c)).sum();
    let sum_b: f64 = t.cols.iter().map(|&c| pairs(c)).sum();
    let expected = sum_a * sum_b / pairs(t.n);
    let max = 0.5 * (sum_a + sum_b);
    let denom = max - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

/// Scores for one detected partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Modularity; absent when no graph was supplied.
    pub q: Option<f64>,
    /// Similarity to a ground truth; absent without one.
    pub nmi: Option<f64>,
    pub ari: Option<f64>,
    /// Community sizes, descending.
    pub sizes: Vec<usize>,
}

impl MetricReport {
    pub fn compute(
        detected: &Partition,
        graph: Option<&Graph>,
        truth: Option<&Partition>,
    ) -> Result<MetricReport> {
        let q = graph.map(|g| modularity(g, detected)).transpose()?;
        let (nmi, ari) = match truth {
            Some(t) => (Some(nmi(detected, t)?), Some(ari(detected, t)?)),
            None => (None, None),
        };
        let mut sizes = detected.sizes();
        sizes.sort_unstable_by(|x, y| y.cmp(x));
        Ok(MetricReport { q, nmi, ari, sizes })
    }
}

/// Empirical `P(S > s)` of community sizes for every integer `s` from 1 to
/// the largest size.
pub fn size_ccdf(p: &Partition) -> Result<Vec<(usize, f64)>> {
    if p.is_empty() {
        return Err(Error::InvalidPartition("no communities".into()));
    }
    let mut sizes = p.sizes();
    sizes.sort_unstable();
    let total = sizes.len() as f64;
    let max = *sizes.last().unwrap();
    let mut out = Vec::with_capacity(max);
    let mut at_most = 0;
    for s in 1..=max {
        while at_most < sizes.len() && sizes[at_most] <= s {
            at_most += 1;
        }
        out.push((s, (sizes.len() - at_most) as f64 / total));
    }
    Ok(out)
}

/// Writes `s,P(S>s)` rows under a header.
pub fn write_ccdf_csv<W: Write>(ccdf: &[(usize, f64)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "s,p_greater")?;
    for (s, p) in ccdf {
        writeln!(out, "{s},{p}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSegment {
    /// Slope of `ln P(S > s)` against `ln s`.
    pub alpha: f64,
    pub s_min: f64,
    pub s_max: f64,
    /// Points used in the fit.
    pub points: usize,
}

/// One or two power-law segments fitted to a CCDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub segments: Vec<PowerLawSegment>,
}

impl PowerLawFit {
    pub fn alpha(&self) -> f64 {
        self.segments[0].alpha
    }
}

/// Ordinary least squares slope on log-log points with `s` in
/// `[s_min, s_max]` and a strictly positive probability.
pub fn fit_power_law_segment(
    points: &[(f64, f64)],
    s_min: f64,
    s_max: f64,
) -> Result<PowerLawSegment> {
    if !(s_min > 0.0 && s_min < s_max) {
        return Err(Error::DegenerateRange(format!(
            "need 0 < s_min < s_max, got [{s_min}, {s_max}]"
        )));
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(s, p)| s >= s_min && s <= s_max && p > 0.0)
        .map(|&(s, p)| (s.ln(), p.ln()))
        .collect();
    if logs.len() < 3 {
        return Err(Error::DegenerateRange(format!(
            "{} usable points in [{s_min}, {s_max}], need at least 3",
            logs.len()
        )));
    }
    let k = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateRange("all points share one size".into()));
    }
    Ok(PowerLawSegment {
        alpha: sxy / sxx,
        s_min,
        s_max,
        points: logs.len(),
    })
}

/// Fits `P(S > s) ~ s^alpha` on each of the given ranges independently.
/// One range gives a single fit, two give a two-part fit.
pub fn fit_power_law(points: &[(f64, f64)], ranges: &[(f64, f64)]) -> Result<PowerLawFit> {
    if ranges.is_empty() {
        return Err(Error::DegenerateRange("no fit range given".into()));
    }
    let segments = ranges
        .iter()
        .map(|&(lo, hi)| fit_power_law_segment(points, lo, hi))
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerLawFit { segments })
}

/// CCDF from [`size_ccdf`] as floating-point points for fitting.
pub fn ccdf_points(ccdf: &[(usize, f64)]) -> Vec<(f64, f64)> {
    ccdf.iter().map(|&(s, p)| (s as f64, p)).collect()
}
