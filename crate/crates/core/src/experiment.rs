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

//! Seeded batches of detection runs and their aggregate reports.
//!
//! Run `r` of every batch uses seed `seed_base + r`; benchmark network `w`
//! of an LFR sweep uses seed `seed_base + w`. Runs of one batch execute in
//! parallel, but results are gathered in run order and reduced serially, so
//! a report depends only on its configuration.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{largest_connected_component, parse_edge_list_reader, Graph};
use crate::lfr::{self, LfrParams};
use crate::lpa::{extract_communities, run_original, run_speedup, LpaConfig};
use crate::metrics::{ari, modularity, nmi};
use crate::partition::Partition;

pub const SCHEMA_VERSION: u32 = 1;

/// Neighborhood-strength weights explored by default.
pub const DEFAULT_C_GRID: [f64; 6] = [0.0, 0.05, 0.25, 0.65, 0.8, 1.0];

/// Mixing values of the default LFR sweep: 0.10, 0.15, ..., 0.75.
pub fn default_mu_grid() -> Vec<f64> {
    (0..14).map(|k| (10 + 5 * k) as f64 / 100.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Original,
    Speedup,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Original => "original",
            Algorithm::Speedup => "speedup",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Algorithm::Original),
            "speedup" => Ok(Algorithm::Speedup),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// Edge list file; detection runs on its largest connected component.
    EdgeList(PathBuf),
    /// An in-memory graph, used as is.
    Graph(Graph),
    /// Generated benchmark networks for every mixing value.
    Lfr {
        params: LfrParams,
        mus: Vec<f64>,
        networks: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricToggles {
    pub modularity: bool,
    /// NMI and ARI against the planted partition (LFR sources only).
    pub similarity: bool,
}

impl Default for MetricToggles {
    fn default() -> Self {
        MetricToggles {
            modularity: true,
            similarity: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: Source,
    pub algorithm: Algorithm,
    pub c_values: Vec<f64>,
    pub runs: usize,
    pub seed_base: u64,
    pub metrics: MetricToggles,
    /// Keep every run's record in the report.
    pub keep_runs: bool,
}

impl ExperimentConfig {
    pub fn new(source: Source) -> ExperimentConfig {
        ExperimentConfig {
            source,
            algorithm: Algorithm::Speedup,
            c_values: DEFAULT_C_GRID.to_vec(),
            runs: 100,
            seed_base: 0,
            metrics: MetricToggles::default(),
            keep_runs: true,
        }
    }

    /// LFR defaults swept over [`default_mu_grid`], 10 networks per mixing
    /// value and the best of 10 runs per network.
    pub fn paper_lfr(seed_base: u64) -> ExperimentConfig {
        ExperimentConfig {
            runs: 10,
            seed_base,
            ..ExperimentConfig::new(Source::Lfr {
                params: LfrParams::default(),
                mus: default_mu_grid(),
                networks: 10,
            })
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        for &c in &self.c_values {
            LpaConfig::new(c, 0)?;
        }
        if let Source::Lfr {
            params,
            mus,
            networks,
        } = &self.source
        {
            if *networks == 0 {
                return Err(Error::InvalidParameter(
                    "networks must be at least 1".into(),
                ));
            }
            for &mu in mus {
                params.with_mu(mu).validate()?;
            }
        }
        Ok(())
    }
}

/// Outcome of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub c: f64,
    pub seed: u64,
    pub mu: Option<f64>,
    pub network: Option<usize>,
    pub n: usize,
    pub q: Option<f64>,
    pub nmi: Option<f64>,
    pub ari: Option<f64>,
    pub communities: usize,
    pub effective_updates: usize,
    pub attempted_updates: usize,
    pub sweeps: usize,
    pub converged: bool,
}

/// Modularity summary for one `c` on one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CRow {
    pub c: f64,
    pub max_q: f64,
    /// Mean modularity; at `c = 0` single-community runs are left out.
    pub avg_q: f64,
    /// Mean attempted updates divided by `n`.
    pub avg_updates_per_node: f64,
    /// Runs left out of `avg_q`.
    pub excluded: usize,
}

/// Similarity summary for one `(mu, c)` cell of an LFR sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuRow {
    pub mu: f64,
    pub c: f64,
    /// Best NMI per network, averaged over networks.
    pub mean_best_nmi: f64,
    pub mean_best_ari: f64,
    pub max_nmi: f64,
    pub max_ari: f64,
    pub avg_nmi: f64,
    pub avg_ari: f64,
    pub avg_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub schema_version: u32,
    pub algorithm: Algorithm,
    pub runs_per_cell: usize,
    pub seed_base: u64,
    pub c_rows: Vec<CRow>,
    pub mu_rows: Vec<MuRow>,
    #[serde(default)]
    pub runs: Vec<RunRecord>,
}

impl AggregateReport {
    fn empty(cfg: &ExperimentConfig) -> AggregateReport {
        AggregateReport {
            schema_version: SCHEMA_VERSION,
            algorithm: cfg.algorithm,
            runs_per_cell: cfg.runs,
            seed_base: cfg.seed_base,
            c_rows: Vec::new(),
            mu_rows: Vec::new(),
            runs: Vec::new(),
        }
    }

    fn is_lfr(&self) -> bool {
        !self.mu_rows.is_empty()
    }
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    let file = std::fs::File::open(path)?;
    let parsed = parse_edge_list_reader(std::io::BufReader::new(file))?;
    largest_connected_component(&parsed.graph)
}

fn single_run(
    g: &Graph,
    truth: Option<&Partition>,
    cfg: &ExperimentConfig,
    c: f64,
    seed: u64,
) -> Result<RunRecord> {
    let lpa = LpaConfig::new(c, seed)?;
    let result = match cfg.algorithm {
        Algorithm::Speedup => run_speedup(g, &lpa)?,
        Algorithm::Original => run_original(g, &lpa)?,
    };
    let found = extract_communities(g, &result.labeling);
    let q = if cfg.metrics.modularity && g.m() > 0 {
        Some(modularity(g, &found)?)
    } else {
        None
    };
    let (nmi, ari) = match truth {
        Some(t) if cfg.metrics.similarity => (Some(nmi(&found, t)?), Some(ari(&found, t)?)),
        _ => (None, None),
    };
    Ok(RunRecord {
        c,
        seed,
        mu: None,
        network: None,
        n: g.n(),
        q,
        nmi,
        ari,
        communities: found.len(),
        effective_updates: result.effective_updates,
        attempted_updates: result.attempted_updates,
        sweeps: result.sweeps,
        converged: result.converged,
    })
}

fn batch(
    g: &Graph,
    truth: Option<&Partition>,
    cfg: &ExperimentConfig,
    c: f64,
) -> Result<Vec<RunRecord>> {
    (0..cfg.runs)
        .into_par_iter()
        .map(|r| single_run(g, truth, cfg, c, cfg.seed_base.wrapping_add(r as u64)))
        .collect()
}

/// Streaming modularity aggregate for one `c`.
struct QAccumulator {
    c: f64,
    max_q: f64,
    q_sum: f64,
    q_count: usize,
    excluded: usize,
    updates_sum: f64,
    runs: usize,
}

impl QAccumulator {
    fn new(c: f64) -> QAccumulator {
        QAccumulator {
            c,
            max_q: f64::NEG_INFINITY,
            q_sum: 0.0,
            q_count: 0,
            excluded: 0,
            updates_sum: 0.0,
            runs: 0,
        }
    }

    fn push(&mut self, rec: &RunRecord) {
        self.runs += 1;
        self.updates_sum += rec.attempted_updates as f64 / rec.n as f64;
        let Some(q) = rec.q else { return };
        self.max_q = self.max_q.max(q);
        if self.c == 0.0 && rec.communities == 1 {
            self.excluded += 1;
        } else {
            self.q_sum += q;
            self.q_count += 1;
        }
    }

    fn finish(self) -> CRow {
        let mean = |sum: f64, k: usize| if k == 0 { 0.0 } else { sum / k as f64 };
        CRow {
            c: self.c,
            max_q: if self.max_q.is_finite() {
                self.max_q
            } else {
                0.0
            },
            avg_q: mean(self.q_sum, self.q_count),
            avg_updates_per_node: mean(self.updates_sum, self.runs),
            excluded: self.excluded,
        }
    }
}

fn run_on_graph(g: &Graph, cfg: &ExperimentConfig) -> Result<AggregateReport> {
    let mut report = AggregateReport::empty(cfg);
    for &c in &cfg.c_values {
        let records = batch(g, None, cfg, c)?;
        let mut acc = QAccumulator::new(c);
        for rec in &records {
            acc.push(rec);
        }
        report.c_rows.push(acc.finish());
        if cfg.keep_runs {
            report.runs.extend(records);
        }
    }
    Ok(report)
}

fn run_on_lfr(
    params: &LfrParams,
    mus: &[f64],
    networks: usize,
    cfg: &ExperimentConfig,
) -> Result<AggregateReport> {
    let mut report = AggregateReport::empty(cfg);
    for &mu in mus {
        let nets = (0..networks)
            .into_par_iter()
            .map(|w| {
                lfr::generate(
                    &params
                        .with_mu(mu)
                        .with_seed(cfg.seed_base.wrapping_add(w as u64)),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        for &c in &cfg.c_values {
            let mut best_nmi = Vec::with_capacity(networks);
            let mut best_ari = Vec::with_capacity(networks);
            let mut all = Vec::new();
            for (w, net) in nets.iter().enumerate() {
                let mut records = batch(&net.graph, Some(&net.truth), cfg, c)?;
                for rec in &mut records {
                    rec.mu = Some(mu);
                    rec.network = Some(w);
                }
                let fold_max = |f: fn(&RunRecord) -> Option<f64>| {
                    records
                        .iter()
                        .filter_map(f)
                        .fold(f64::NEG_INFINITY, f64::max)
                };
                best_nmi.push(fold_max(|r| r.nmi));
                best_ari.push(fold_max(|r| r.ari));
                all.extend(records);
            }
            let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
            let column = |f: fn(&RunRecord) -> Option<f64>| -> Vec<f64> {
                all.iter().filter_map(f).collect()
            };
            let (nmis, aris, qs) = (column(|r| r.nmi), column(|r| r.ari), column(|r| r.q));
            let max = |xs: &[f64]| xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let finite_or_zero = |x: f64| if x.is_finite() { x } else { 0.0 };
            report.mu_rows.push(MuRow {
                mu,
                c,
                mean_best_nmi: finite_or_zero(mean(&best_nmi)),
                mean_best_ari: finite_or_zero(mean(&best_ari)),
                max_nmi: finite_or_zero(max(&nmis)),
                max_ari: finite_or_zero(max(&aris)),
                avg_nmi: finite_or_zero(mean(&nmis)),
                avg_ari: finite_or_zero(mean(&aris)),
                avg_q: finite_or_zero(mean(&qs)),
            });
            if cfg.keep_runs {
                report.runs.extend(all);
            }
        }
    }
    Ok(report)
}

/// Executes every seeded run the configuration describes and aggregates the
/// results. Inputs are loaded and validated before any run starts.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<AggregateReport> {
    cfg.validate()?;
    match &cfg.source {
        Source::EdgeList(path) => {
            let g = load_graph(path)?;
            run_on_graph(&g, cfg)
        }
        Source::Graph(g) => run_on_graph(g, cfg),
        Source::Lfr {
            params,
            mus,
            networks,
        } => run_on_lfr(params, mus, *networks, cfg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

pub const C_ROW_HEADER: &str = "c,max_q,avg_q,avg_updates_per_node,excluded";
pub const MU_ROW_HEADER: &str =
    "mu,c,mean_best_nmi,mean_best_ari,max_nmi,max_ari,avg_nmi,avg_ari,avg_q";

pub fn write_report<W: Write>(
    report: &AggregateReport,
    format: ReportFormat,
    mut out: W,
) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        ReportFormat::Csv if report.is_lfr() => {
            writeln!(out, "{MU_ROW_HEADER}")?;
            for r in &report.mu_rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.mu,
                    r.c,
                    r.mean_best_nmi,
                    r.mean_best_ari,
                    r.max_nmi,
                    r.max_ari,
                    r.avg_nmi,
                    r.avg_ari,
                    r.avg_q
                )?;
            }
        }
        ReportFormat::Csv => {
            writeln!(out, "{C_ROW_HEADER}")?;
            for r in &report.c_rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.c, r.max_q, r.avg_q, r.avg_updates_per_node, r.excluded
                )?;
            }
        }
    }
    Ok(())
}

/// Writes the report to `path`.
pub fn emit_report(report: &AggregateReport, format: ReportFormat, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    write_report(report, format, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn read_json_report(text: &str) -> Result<AggregateReport> {
    Ok(serde_json::from_str(text)?)
}
