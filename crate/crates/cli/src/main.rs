//! Command-line shell over the coalition formation engine. All real work
//! lives in the library crate; this file only parses arguments, wires up
//! options, and routes bytes to stdout or a file.
//!
//! Exit codes: 0 success, 1 failed audit (`verify`), 2 invalid input,
//! 3 tripped safety limit, 4 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fedcoalitions::{baseline_partition, verify, FormConfig, MergeMode, Partition, TieBreak};
use fedcoalitions_cli::instance::{self, InstanceSpec, WeightDist};
use fedcoalitions_cli::report::{
    self, render_report_text, render_sweep_text, render_verification_text, EngineOptions,
    SweepConfig, VerifyPolicy,
};
use fedcoalitions_cli::{dot, CliError};

#[derive(Parser)]
#[command(
    name = "fedcoalitions",
    version,
    about = "Form conflict-free coalitions of federated-learning participants"
)]
struct Cli {
    /// Seed for anything random (generation, sweep trials).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Admissibility rule the audit applies to prospective merges.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Strict)]
    mode: ModeArg,

    /// Refuse maximal-clique enumeration beyond this many nodes.
    #[arg(long, global = true, default_value_t = 128)]
    max_cliques_nodes: usize,

    /// Abort cycle/path enumeration beyond this many results.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    enum_limit: usize,

    /// Report format on stdout (documents such as instances and DOT ignore
    /// this).
    #[arg(long, global = true, value_enum, default_value_t = OutputArg::Json)]
    output: OutputArg,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Competitors may never share a coalition.
    Strict,
    /// Competitors may share one if neither can reach the other through its
    /// benefit edges.
    Reachability,
}

impl From<ModeArg> for MergeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => MergeMode::StrictIndependence,
            ModeArg::Reachability => MergeMode::Reachability,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TieBreakArg {
    /// Prefer larger cliques, then heavier, then lexicographic.
    MaxCardinality,
    /// Lexicographically smallest clique.
    Lexicographic,
}

impl From<TieBreakArg> for TieBreak {
    fn from(t: TieBreakArg) -> Self {
        match t {
            TieBreakArg::MaxCardinality => TieBreak::MaxCardinality,
            TieBreakArg::Lexicographic => TieBreak::Lexicographic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum VerifyArg {
    /// Audit when the baseline is small enough, skip otherwise.
    #[default]
    Auto,
    /// Always audit; abort loudly if the partition is too large.
    Always,
    /// Skip the audit.
    Never,
}

impl From<VerifyArg> for VerifyPolicy {
    fn from(v: VerifyArg) -> Self {
        match v {
            VerifyArg::Auto => VerifyPolicy::Auto,
            VerifyArg::Always => VerifyPolicy::Always,
            VerifyArg::Never => VerifyPolicy::Never,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance document.
    Generate {
        /// Number of participants.
        #[arg(long)]
        n: usize,
        /// Probability that an unordered pair competes.
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        /// Probability that an ordered pair carries a benefit edge.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Weight distribution: `uniform:LO,HI` or `constant:W`.
        #[arg(long, default_value = "uniform:0.1,1.0")]
        weights: WeightDist,
        /// Write here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Form coalitions on an instance and report the full run.
    Partition {
        /// Instance document to read.
        #[arg(long, short)]
        instance: PathBuf,
        /// When to run the exhaustive audit.
        #[arg(long, value_enum, default_value_t = VerifyArg::Auto)]
        verify: VerifyArg,
        /// Audit only partitions whose baseline has at most this many
        /// coalitions.
        #[arg(long, default_value_t = 15)]
        oracle_cap: usize,
        /// Clique-cover tie-breaking strategy.
        #[arg(long, value_enum, default_value_t = TieBreakArg::MaxCardinality)]
        tie_break: TieBreakArg,
        /// Attach wall-clock timings (makes output non-reproducible).
        #[arg(long)]
        timings: bool,
        /// Write here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compute only the seed partition (clique cover refined by strongly
    /// connected components).
    Baseline {
        /// Instance document to read.
        #[arg(long, short)]
        instance: PathBuf,
        /// Clique-cover tie-breaking strategy.
        #[arg(long, value_enum, default_value_t = TieBreakArg::MaxCardinality)]
        tie_break: TieBreakArg,
        /// Write here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Audit a stored partition against an instance. Exits 1 if the audit
    /// finds violations.
    Verify {
        /// Instance document to read.
        #[arg(long, short)]
        instance: PathBuf,
        /// Partition to audit: a JSON array of coalitions, e.g. [[0,1],[2]].
        #[arg(long, short)]
        partition: PathBuf,
        /// Largest partition (block count) the audit will attempt.
        #[arg(long, default_value_t = 15)]
        oracle_cap: usize,
        /// Write here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Generate many instances per competition level and aggregate
    /// utilities.
    Sweep {
        /// Number of participants per instance.
        #[arg(long)]
        n: usize,
        /// Comma-separated competition probabilities.
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.3,0.4")]
        alphas: Vec<f64>,
        /// Instances per alpha.
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Probability that an ordered pair carries a benefit edge.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Weight distribution: `uniform:LO,HI` or `constant:W`.
        #[arg(long, default_value = "uniform:0.1,1.0")]
        weights: WeightDist,
        /// When to audit each trial.
        #[arg(long, value_enum, default_value_t = VerifyArg::Auto)]
        verify: VerifyArg,
        /// Audit only trials whose baseline has at most this many coalitions.
        #[arg(long, default_value_t = 15)]
        oracle_cap: usize,
        /// Write here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Render an instance (and optionally a partition) as Graphviz DOT.
    ExportDot {
        /// Instance document to read.
        #[arg(long, short)]
        instance: PathBuf,
        /// Partition to cluster by; defaults to freshly formed coalitions.
        #[arg(long, short)]
        partition: Option<PathBuf>,
        /// Write here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn load_partition(path: &Path, n: usize) -> Result<Partition, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let blocks: Vec<Vec<usize>> = serde_json::from_str(&text)?;
    Ok(Partition::from_index_blocks(n, blocks)?)
}

fn blocks_json(p: &Partition) -> Vec<Vec<usize>> {
    p.blocks().iter().map(|b| b.indices()).collect()
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let form = |tie_break: TieBreakArg| FormConfig {
        tie_break: tie_break.into(),
        max_clique_nodes: cli.max_cliques_nodes,
        enum_limit: cli.enum_limit,
    };

    match &cli.cmd {
        Cmd::Generate {
            n,
            alpha,
            density,
            weights,
            out,
        } => {
            let inst = InstanceSpec {
                n: *n,
                alpha: *alpha,
                benefit_density: *density,
                weight_dist: *weights,
                seed: cli.seed,
            }
            .generate()?;
            emit(out.as_deref(), &instance::to_json(&inst))?;
        }

        Cmd::Partition {
            instance: path,
            verify,
            oracle_cap,
            tie_break,
            timings,
            out,
        } => {
            let inst = instance::load(path)?;
            let opts = EngineOptions {
                form: form(*tie_break),
                mode: cli.mode.into(),
                oracle_cap: *oracle_cap,
                verify: (*verify).into(),
                timings: *timings,
            };
            let report = report::run_instance(&inst, &opts)?;
            let text = match cli.output {
                OutputArg::Json => to_pretty_json(&report),
                OutputArg::Text => render_report_text(&report),
            };
            emit(out.as_deref(), &text)?;
        }

        Cmd::Baseline {
            instance: path,
            tie_break,
            out,
        } => {
            let inst = instance::load(path)?;
            let p = baseline_partition(&inst.benefit, &inst.competing, &form(*tie_break))?;
            let text = match cli.output {
                OutputArg::Json => to_pretty_json(&blocks_json(&p)),
                OutputArg::Text => {
                    let mut s = String::new();
                    for block in p.blocks() {
                        let ids: Vec<String> =
                            block.members().map(|v| v.index().to_string()).collect();
                        s.push_str(&format!("{{{}}}\n", ids.join(", ")));
                    }
                    s
                }
            };
            emit(out.as_deref(), &text)?;
        }

        Cmd::Verify {
            instance: path,
            partition,
            oracle_cap,
            out,
        } => {
            let inst = instance::load(path)?;
            let p = load_partition(partition, inst.n())?;
            let audit = verify(
                &inst.benefit,
                &inst.competing,
                &p,
                cli.mode.into(),
                *oracle_cap,
            )?;
            let doc = report::verification_doc(&audit, &p);
            let text = match cli.output {
                OutputArg::Json => to_pretty_json(&doc),
                OutputArg::Text => render_verification_text(&doc),
            };
            emit(out.as_deref(), &text)?;
            if !doc.all_ok {
                return Ok(ExitCode::from(1));
            }
        }

        Cmd::Sweep {
            n,
            alphas,
            trials,
            density,
            weights,
            verify,
            oracle_cap,
            out,
        } => {
            let cfg = SweepConfig {
                n: *n,
                alphas: alphas.clone(),
                trials: *trials,
                benefit_density: *density,
                weight_dist: *weights,
                seed: cli.seed,
            };
            let opts = EngineOptions {
                form: form(TieBreakArg::MaxCardinality),
                mode: cli.mode.into(),
                oracle_cap: *oracle_cap,
                verify: (*verify).into(),
                timings: false,
            };
            let report = report::sweep(&cfg, &opts)?;
            let text = match cli.output {
                OutputArg::Json => to_pretty_json(&report),
                OutputArg::Text => render_sweep_text(&report),
            };
            emit(out.as_deref(), &text)?;
        }

        Cmd::ExportDot {
            instance: path,
            partition,
            out,
        } => {
            let inst = instance::load(path)?;
            let p = match partition {
                Some(file) => load_partition(file, inst.n())?,
                None => {
                    let cfg = form(TieBreakArg::MaxCardinality);
                    fedcoalitions::form_coalitions(&inst.benefit, &inst.competing, &cfg)?
                        .partition
                }
            };
            emit(out.as_deref(), &dot::render(&inst, &p))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
