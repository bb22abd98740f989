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
//! `nslpa` command-line driver.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nslpa::experiment::{
    default_mu_grid, emit_report, load_graph, run_experiment, write_report, Algorithm,
    ExperimentConfig, ReportFormat, Source, DEFAULT_C_GRID,
};
use nslpa::graph::cc_distribution;
use nslpa::io::{assignment_names, assignment_partition, parse_assignment};
use nslpa::lfr::{self, LfrParams};
use nslpa::lpa::{extract_communities, run_original, run_speedup, Labeling, LpaConfig};
use nslpa::metrics::{size_ccdf, write_ccdf_csv, MetricReport};

#[derive(Parser)]
#[command(
    name = "nslpa",
    version,
    about = "Label propagation community detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one detection on the largest component of an edge list.
    Detect(DetectArgs),
    /// Generate a planted-partition benchmark network.
    LfrGen(LfrGenArgs),
    /// Batch runs over a grid of c values (and mixing values for LFR).
    Sweep(SweepArgs),
    /// Score an existing labeling.
    Metrics(MetricsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Original,
    Speedup,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Algorithm {
        match a {
            AlgorithmArg::Original => Algorithm::Original,
            AlgorithmArg::Speedup => Algorithm::Speedup,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> ReportFormat {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Speedup)]
    algorithm: AlgorithmArg,
    /// Where to write `node label` lines; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap on attempted updates (default 100 n).
    #[arg(long)]
    max_updates: Option<usize>,
}

#[derive(Args)]
struct LfrArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 5.0)]
    avg_k: f64,
    #[arg(long, default_value_t = 50)]
    max_k: usize,
    #[arg(long, default_value_t = 10)]
    size_min: usize,
    #[arg(long, default_value_t = 50)]
    size_max: usize,
    #[arg(long, default_value_t = 2.0)]
    degree_exp: f64,
    #[arg(long, default_value_t = 1.0)]
    size_exp: f64,
}

impl LfrArgs {
    fn params(&self, mu: f64, seed: u64) -> LfrParams {
        LfrParams {
            n: self.n,
            avg_k: self.avg_k,
            max_k: self.max_k,
            mu,
            size_min: self.size_min,
            size_max: self.size_max,
            degree_exp: self.degree_exp,
            size_exp: self.size_exp,
            seed,
        }
    }
}

#[derive(Args)]
struct LfrGenArgs {
    #[command(flatten)]
    lfr: LfrArgs,
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes `<out>.edges` and `<out>.truth`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// LFR defaults, mixing 0.10..0.75, 10 networks, best of 10 runs.
    PaperLfr,
}

#[derive(Args)]
struct SweepArgs {
    /// Edge list to sweep; omit with `--preset` or `--lfr`.
    #[arg(long, conflicts_with_all = ["preset", "lfr_mode"])]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Sweep generated benchmark networks instead of an edge list.
    #[arg(long = "lfr")]
    lfr_mode: bool,
    #[command(flatten)]
    lfr: LfrArgs,
    /// Comma-separated mixing values for LFR sweeps.
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    /// Networks generated per mixing value.
    #[arg(long)]
    networks: Option<usize>,
    /// Comma-separated c values.
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<f64>>,
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Speedup)]
    algorithm: AlgorithmArg,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Leave per-run records out of JSON reports.
    #[arg(long)]
    no_runs: bool,
}

#[derive(Args)]
struct MetricsArgs {
    /// Detected `node label` lines.
    #[arg(long)]
    input: PathBuf,
    /// Ground-truth `node community` lines.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Edge list; enables modularity. Its largest component defines the node set.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Also write the community-size CCDF as CSV.
    #[arg(long)]
    ccdf: Option<PathBuf>,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn detect(args: DetectArgs) -> Result<()> {
    let g = load_graph(&args.input).with_context(|| format!("loading {}", args.input.display()))?;
    let mut cfg = LpaConfig::new(args.c, args.seed)?;
    if let Some(cap) = args.max_updates {
        cfg = cfg.with_max_updates(cap);
    }
    let result = match Algorithm::from(args.algorithm) {
        Algorithm::Speedup => run_speedup(&g, &cfg)?,
        Algorithm::Original => run_original(&g, &cfg)?,
    };
    let found = extract_communities(&g, &result.labeling);
    let report = MetricReport::compute(&found, (g.m() > 0).then_some(&g), None)?;
    let summary = serde_json::json!({
        "graph": g.summary(),
        "run": result,
        "communities": found.len(),
        "q": report.q,
    });

    // labels go to --out, or ahead of the summary on stdout
    let labels = Labeling::from_vec(found.membership().to_vec());
    let mut out = open_out(args.out.as_deref())?;
    labels.write_text(&g, &mut out)?;
    out.flush()?;
    drop(out);
    if args.out.is_some() {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        eprintln!("{}", serde_json::to_string_pretty(&summary)?);
    }
    Ok(())
}

fn lfr_gen(args: LfrGenArgs) -> Result<()> {
    let params = args.lfr.params(args.mu, args.seed);
    let net = lfr::generate(&params)?;
    let with_ext = |ext: &str| {
        let mut s = args.out.clone().into_os_string();
        s.push(ext);
        PathBuf::from(s)
    };
    let mut edges = open_out(Some(&with_ext(".edges")))?;
    net.graph.write_edge_list(&mut edges)?;
    edges.flush()?;
    let mut truth = open_out(Some(&with_ext(".truth")))?;
    net.write_truth(&mut truth)?;
    truth.flush()?;
    let echo = serde_json::json!({
        "params": params,
        "graph": net.graph.summary(),
        "communities": net.truth.len(),
        "realized_mixing": lfr::realized_mixing(&net),
        "communities_connected": lfr::communities_connected(&net),
    });
    println!("{}", serde_json::to_string_pretty(&echo)?);
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut cfg = match (&args.input, args.preset, args.lfr_mode) {
        (Some(path), _, _) => {
            fs::metadata(path).with_context(|| format!("cannot read {}", path.display()))?;
            ExperimentConfig::new(Source::EdgeList(path.clone()))
        }
        (None, Some(Preset::PaperLfr), _) => ExperimentConfig::paper_lfr(args.seed),
        (None, None, true) => ExperimentConfig {
            runs: 10,
            ..ExperimentConfig::new(Source::Lfr {
                params: args.lfr.params(0.1, 0),
                mus: default_mu_grid(),
                networks: 10,
            })
        },
        (None, None, false) => bail!("sweep needs --input, --lfr or --preset"),
    };
    if let Source::Lfr {
        params,
        mus,
        networks,
    } = &mut cfg.source
    {
        if args.preset.is_none() {
            *params = args.lfr.params(0.1, 0);
        }
        if let Some(m) = &args.mu {
            *mus = m.clone();
        }
        if let Some(k) = args.networks {
            *networks = k;
        }
    } else if args.mu.is_some() || args.networks.is_some() {
        bail!("--mu and --networks only apply to LFR sweeps");
    }
    cfg.c_values = args.c.clone().unwrap_or_else(|| DEFAULT_C_GRID.to_vec());
    if let Some(r) = args.runs {
        cfg.runs = r;
    }
    cfg.seed_base = args.seed;
    cfg.algorithm = args.algorithm.into();
    cfg.keep_runs = !args.no_runs;

    let report = run_experiment(&cfg)?;
    let format = ReportFormat::from(args.format);
    match &args.out {
        Some(path) => emit_report(&report, format, path)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => {
            let mut out = open_out(None)?;
            write_report(&report, format, &mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn metrics(args: MetricsArgs) -> Result<()> {
    let pairs = parse_assignment(&read(&args.input)?)
        .with_context(|| format!("parsing {}", args.input.display()))?;
    let graph = args
        .graph
        .as_deref()
        .map(|p| load_graph(p).with_context(|| format!("loading {}", p.display())))
        .transpose()?;
    let names = match &graph {
        Some(g) => g.names().to_vec(),
        None => assignment_names(&pairs),
    };
    let keep = |pairs: Vec<(String, String)>| -> Vec<(String, String)> {
        // nodes outside the analyzed component are ignored
        let set: std::collections::HashSet<&str> = names.iter().map(String::as_str).collect();
        pairs
            .into_iter()
            .filter(|(v, _)| set.contains(v.as_str()))
            .collect()
    };
    let mut detected = assignment_partition(&keep(pairs), &names)?;
    if let Some(g) = &graph {
        let labels = Labeling::from_vec(detected.membership().to_vec());
        detected = extract_communities(g, &labels);
    }
    let truth = args
        .truth
        .as_deref()
        .map(|p| -> Result<_> {
            let t =
                parse_assignment(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
            Ok(assignment_partition(&keep(t), &names)?)
        })
        .transpose()?;
    let report = MetricReport::compute(&detected, graph.as_ref(), truth.as_ref())?;
    let mut value = serde_json::to_value(&report)?;
    if let Some(g) = &graph {
        value["mean_cc"] = serde_json::json!(cc_distribution(g, 0.1)?.mean_cc);
    }
    if let Some(path) = &args.ccdf {
        let mut out = open_out(Some(path))?;
        write_ccdf_csv(&size_ccdf(&detected)?, &mut out)?;
        out.flush()?;
    }
    let mut out = open_out(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(a) => detect(a),
        Command::LfrGen(a) => lfr_gen(a),
        Command::Sweep(a) => sweep(a),
        Command::Metrics(a) => metrics(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
