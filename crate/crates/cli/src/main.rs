use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nodeloc::error::CliError;
use nodeloc::generate::{generate_paths, generate_topology, GraphModel, MonitorRule, TopologySpec};
use nodeloc::outcome::OutcomeFile;
use nodeloc::report::{emit_json, emit_text, parse_report};
use nodeloc::{analyze, AnalyzeOptions, TopologyDocument};
use nodeloc_core::oracle::simulate_measurements;
use nodeloc_core::{FailureSet, ModelKind, Oracle, OracleConfig, ProbingModel, Topology};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "nodeloc", version, about = "Node failure identifiability for monitored networks")]
struct Cli {
    /// Seed for random generation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest number of non-monitors the brute-force oracle will enumerate.
    #[arg(long, global = true, default_value_t = OracleConfig::default().max_sigma)]
    guard: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Cap,
    Csp,
    Up,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Cap => ModelKind::Cap,
            Model::Csp => ModelKind::Csp,
            Model::Up => ModelKind::Up,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct Input {
    /// Topology document (JSON).
    topology: PathBuf,
    /// Measurement paths, one per line as node names; replaces any paths in the document.
    #[arg(long)]
    paths: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-k verdicts and bounds on maximum identifiability.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Probing models to analyze (repeatable); defaults to all applicable.
        #[arg(long = "model", value_enum)]
        models: Vec<Model>,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        oracle: Switch,
    },
    /// Brute-force k-identifiability with counterexamples.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long = "model", value_enum)]
        models: Vec<Model>,
        /// Check only this k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Probe outcomes produced by a set of failed nodes.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        model: Model,
        /// Comma-separated failed node names.
        #[arg(long, value_delimiter = ',')]
        fail: Vec<String>,
    },
    /// Failure sets consistent with observed outcomes.
    Localize {
        #[command(flatten)]
        input: Input,
        outcomes: PathBuf,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Generate topologies or path sets.
    Gen {
        #[command(subcommand)]
        what: Gen,
    },
    /// Re-check a JSON report and render it in the chosen format.
    Report { report: PathBuf },
}

#[derive(Subcommand)]
enum Gen {
    /// Random topology.
    Topo {
        #[command(subcommand)]
        model: TopoModel,
        #[command(flatten)]
        monitors: MonitorArgs,
    },
    /// Attach shortest monitor-to-monitor paths to a topology.
    Paths {
        topology: PathBuf,
        #[arg(long, default_value_t = 1)]
        per_pair: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MonitorArgs {
    #[arg(long, global = true)]
    monitors: Option<usize>,
    #[arg(long, global = true)]
    monitor_fraction: Option<f64>,
}

#[derive(Subcommand)]
enum TopoModel {
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
    Ba {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m0: usize,
    },
    Grid {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
    },
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path)
        .map_err(CliError::from)
        .with_context(|| format!("reading {}", path.display()))
}

fn load(input: &Input) -> anyhow::Result<TopologyDocument> {
    let doc = TopologyDocument::parse(&read(&input.topology)?)
        .with_context(|| format!("in {}", input.topology.display()))?;
    match &input.paths {
        None => Ok(doc),
        Some(p) => {
            let text = String::from_utf8(read(p)?).map_err(|e| CliError::Format(e.to_string()))?;
            let paths = doc
                .parse_path_lines(&text)
                .with_context(|| format!("in {}", p.display()))?;
            Ok(doc.with_paths(Some(paths))?)
        }
    }
}

fn probing_model(doc: &TopologyDocument, topology: &Topology, model: ModelKind) -> anyhow::Result<ProbingModel> {
    Ok(match model {
        ModelKind::Cap => ProbingModel::Cap,
        ModelKind::Csp => ProbingModel::Csp,
        ModelKind::Up => ProbingModel::Up(
            doc.ensemble(topology)?
                .ok_or_else(|| CliError::Usage("UP needs a path set (add \"paths\" or pass --paths)".into()))?,
        ),
    })
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

#[derive(Serialize)]
struct OracleLevel {
    k: usize,
    identifiable: bool,
    counterexample: Option<(Vec<String>, Vec<String>)>,
}

#[derive(Serialize)]
struct OracleOutput {
    model: ModelKind,
    sigma: usize,
    omega: usize,
    levels: Vec<OracleLevel>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = OracleConfig { max_sigma: cli.guard };
    match cli.command {
        Command::Analyze {
            input,
            models,
            k_max,
            oracle,
        } => {
            let doc = load(&input)?;
            let options = AnalyzeOptions {
                models: models.into_iter().map(Into::into).collect(),
                k_max,
                oracle: oracle == Switch::On,
                guard: cli.guard,
            };
            let report = analyze(&doc, &options)?;
            match cli.format {
                Format::Json => print!("{}", emit_json(&report)),
                Format::Text => print!("{}", emit_text(&report)),
            }
        }
        Command::Oracle { input, models, k } => {
            let doc = load(&input)?;
            let topology = doc.topology()?;
            let mut kinds: Vec<ModelKind> = models.into_iter().map(Into::into).collect();
            if kinds.is_empty() {
                kinds = vec![ModelKind::Cap, ModelKind::Csp];
                if doc.paths().is_some() {
                    kinds.push(ModelKind::Up);
                }
            }
            let mut outputs = Vec::new();
            for kind in kinds {
                let model = probing_model(&doc, &topology, kind)?;
                let o = Oracle::new(&topology, &model, config)?;
                let ks: Vec<usize> = match k {
                    Some(k) => vec![k],
                    None => (0..=topology.sigma()).collect(),
                };
                let mut levels = Vec::new();
                for k in ks {
                    let r = o.k_identifiable(k)?;
                    levels.push(OracleLevel {
                        k,
                        identifiable: r.holds(),
                        counterexample: r
                            .counterexample
                            .map(|(a, b)| (doc.names_of(a.nodes()), doc.names_of(b.nodes()))),
                    });
                }
                outputs.push(OracleOutput {
                    model: kind,
                    sigma: topology.sigma(),
                    omega: o.omega(),
                    levels,
                });
            }
            match cli.format {
                Format::Json => print_json(&outputs),
                Format::Text => {
                    for out in outputs {
                        println!("[{}] sigma {} omega {}", out.model.name(), out.sigma, out.omega);
                        for l in out.levels {
                            match l.counterexample {
                                None => println!("  k={} identifiable", l.k),
                                Some((a, b)) => println!(
                                    "  k={} not identifiable: {{{}}} vs {{{}}}",
                                    l.k,
                                    a.join(","),
                                    b.join(",")
                                ),
                            }
                        }
                    }
                }
            }
        }
        Command::Simulate { input, model, fail } => {
            let doc = load(&input)?;
            let topology = doc.topology()?;
            let model = probing_model(&doc, &topology, model.into())?;
            let ids = fail
                .iter()
                .filter(|s| !s.is_empty())
                .map(|name| {
                    doc.id(name)
                        .ok_or_else(|| CliError::Usage(format!("unknown node {name:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let truth = FailureSet::new(&topology, ids)?;
            let out = simulate_measurements(&topology, &model, &truth)?;
            print!("{}", OutcomeFile::from_map(&doc, &out).emit());
        }
        Command::Localize { input, outcomes, k_max } => {
            let doc = load(&input)?;
            let topology = doc.topology()?;
            let file = OutcomeFile::parse(&read(&outcomes)?).with_context(|| format!("in {}", outcomes.display()))?;
            let model = probing_model(&doc, &topology, file.model)?;
            let map = file.to_map(&doc)?;
            let o = Oracle::new(&topology, &model, config)?;
            let found = o.localize(&map, k_max.unwrap_or(topology.sigma()))?;
            let named: Vec<Vec<String>> = found.iter().map(|f| doc.names_of(f.nodes())).collect();
            match cli.format {
                Format::Json => print_json(&named),
                Format::Text => {
                    for f in named {
                        println!("{{{}}}", f.join(","));
                    }
                }
            }
        }
        Command::Gen { what } => match what {
            Gen::Topo { model, monitors } => {
                let seed = cli
                    .seed
                    .ok_or_else(|| CliError::Usage("topology generation needs --seed".into()))?;
                let model = match model {
                    TopoModel::Er { n, p } => GraphModel::ErdosRenyi { n, p },
                    TopoModel::Ba { n, m0 } => GraphModel::BarabasiAlbert { n, m0 },
                    TopoModel::Grid { width, height } => GraphModel::Grid { width, height },
                };
                let monitors = match (monitors.monitors, monitors.monitor_fraction) {
                    (Some(c), _) => MonitorRule::Count(c),
                    (None, Some(f)) => MonitorRule::Fraction(f),
                    (None, None) => unreachable!("clap requires one of the monitor flags"),
                };
                print!("{}", generate_topology(&TopologySpec { model, monitors, seed })?.emit());
            }
            Gen::Paths { topology, per_pair } => {
                let doc = TopologyDocument::parse(&read(&topology)?)
                    .with_context(|| format!("in {}", topology.display()))?;
                let (doc, warnings) = generate_paths(&doc, per_pair)?;
                for w in warnings {
                    eprintln!("warning: {w}");
                }
                print!("{}", doc.emit());
            }
        },
        Command::Report { report } => {
            let r = parse_report(&read(&report)?).with_context(|| format!("in {}", report.display()))?;
            match cli.format {
                Format::Json => print!("{}", emit_json(&r)),
                Format::Text => print!("{}", emit_text(&r)),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("nodeloc: {err:#}");
            let code = err.downcast_ref::<CliError>().map_or(2, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
