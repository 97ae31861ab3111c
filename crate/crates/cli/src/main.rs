use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use approxsym::experiment::{compare_variants, grid_search, read_records_file, run_experiment, write_comparisons};
use approxsym::experiment::{GridSearchSpec, Pairing};
use approxsym::{
    anneal, exact_symmetry, normalized_symmetry, AnnealConfig, CentralityKind, Energy, Error, ExperimentSpec, Graph,
    GuidanceParams, ModelSpec, MoveStrategy, SearchMode,
};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "approxsym", version, about = "Approximate graph symmetry by simulated annealing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Anneal one graph and print the best permutation found.
    Symmetry {
        graph: PathBuf,
        /// Guide moves by this centrality (uniform moves when absent).
        #[arg(long)]
        centrality: Option<CentralityKind>,
        #[arg(long, default_value_t = approxsym::guidance::DEFAULT_BETA)]
        beta: f64,
        #[arg(long, default_value_t = approxsym::guidance::DEFAULT_PHI)]
        phi: f64,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long, default_value_t = approxsym::anneal::DEFAULT_T_MIN)]
        tmin: f64,
        #[arg(long, default_value_t = 1)]
        restarts: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Search only permutations without fixed points.
        #[arg(long)]
        derangements: bool,
    },
    /// Generate a graph: `generate ba n=150 k=5 --seed 1 -o g.txt`.
    Generate {
        /// grid, er, ba or dd.
        family: String,
        /// key=value parameters; grid sides as dims=5x20.
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run an experiment config and write the sorted run records.
    Experiment {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Evaluate a beta/phi lattice and print the ranked table.
    Gridsearch {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact symmetry by exhaustive search (at most 10 vertices).
    Oracle {
        graph: PathBuf,
        #[arg(long)]
        derangements: bool,
    },
    /// Paired t-tests of two variants from an experiment CSV.
    Stats {
        csv: PathBuf,
        /// Baseline and candidate labels, `A,B`.
        #[arg(long, value_parser = parse_pair)]
        pair: (String, String),
        /// Pair individual runs instead of per-graph means.
        #[arg(long)]
        per_run: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() && a != b => Ok((a.to_string(), b.to_string())),
        _ => Err(format!("expected two different labels `A,B`, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io_error() {
        3
    } else if e.is_config_error() || matches!(e, Error::Csv(_)) {
        2
    } else {
        1
    }
}

fn run(command: Command) -> approxsym::Result<()> {
    match command {
        Command::Symmetry { graph, centrality, beta, phi, steps, tmax, tmin, restarts, seed, derangements } => {
            let g = Graph::read_edge_list(&graph)?;
            let strategy = match centrality {
                Some(kind) => {
                    let params = GuidanceParams { centrality: kind, beta, phi };
                    params.validate()?;
                    MoveStrategy::Guided(params)
                }
                None => MoveStrategy::Uniform,
            };
            let cfg = AnnealConfig {
                steps,
                t_max: tmax,
                t_min: tmin,
                restarts,
                derangement_only: derangements,
                ..AnnealConfig::default().with_seed(seed).with_strategy(strategy)
            };
            let schedule = cfg.schedule(&g)?;
            let r = anneal(&g, &cfg)?;
            let guidance = strategy.guidance();
            let record = json!({
                "n": g.n(),
                "edges": g.edge_count(),
                "strategy": if guidance.is_some() { "guided" } else { "uniform" },
                "centrality": guidance.map(|p| p.centrality.name()),
                "beta": guidance.map(|p| p.beta),
                "phi": guidance.map(|p| p.phi),
                "seed": seed,
                "steps": schedule.steps,
                "t_max": schedule.t_max,
                "t_min": schedule.t_min,
                "restarts": restarts,
                "epsilon": r.best_epsilon,
                "S": r.best_s,
                "restart_bests": r.restart_bests,
                "proposed_moves": r.proposed_moves,
                "accepted_moves": r.accepted_moves,
                "permutation": r.best_permutation.as_slice(),
            });
            print_line(&record)
        }
        Command::Generate { family, params, seed, output } => {
            let spec = model_from_args(&family, &params)?;
            let g = spec.generate(seed)?;
            match output {
                Some(path) => write_file(&path, |w| Ok(g.write_edge_list(w)?)),
                None => {
                    let mut out = io::stdout().lock();
                    g.write_edge_list(&mut out)?;
                    Ok(out.flush()?)
                }
            }
        }
        Command::Experiment { config, output } => {
            let spec = ExperimentSpec::from_file(&config)?;
            let records = run_experiment(&spec, &output)?;
            eprintln!("wrote {} records to {}", records.len(), output.display());
            Ok(())
        }
        Command::Gridsearch { config, output } => {
            let spec = GridSearchSpec::from_file(&config)?;
            let table = grid_search(&spec)?;
            match output {
                Some(path) => write_file(&path, |w| table.write_csv(w)),
                None => table.write_csv(io::stdout().lock()),
            }
        }
        Command::Oracle { graph, derangements } => {
            let g = Graph::read_edge_list(&graph)?;
            let mode = if derangements { SearchMode::DerangementsOnly } else { SearchMode::NonIdentity };
            let r = exact_symmetry(&g, mode)?;
            let s = normalized_symmetry(Energy { epsilon: r.exact_epsilon, n: g.n() })?;
            print_line(&json!({
                "n": g.n(),
                "edges": g.edge_count(),
                "mode": r.mode.name(),
                "exact_epsilon": r.exact_epsilon,
                "S": s,
                "witness": r.witness.as_slice(),
                "searched": r.searched,
            }))
        }
        Command::Stats { csv, pair, per_run, output } => {
            let records = read_records_file(&csv)?;
            let pairing = if per_run { Pairing::PerRun } else { Pairing::GraphMean };
            let rows = compare_variants(&records, &pair.0, &pair.1, pairing)?;
            match output {
                Some(path) => write_file(&path, |w| write_comparisons(w, &rows)),
                None => write_comparisons(io::stdout().lock(), &rows),
            }
        }
    }
}

fn print_line(value: &serde_json::Value) -> approxsym::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{value}")?;
    Ok(out.flush()?)
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> approxsym::Result<()>) -> approxsym::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    Ok(w.flush()?)
}

/// Builds a model from `key=value` arguments.
fn model_from_args(family: &str, params: &[String]) -> approxsym::Result<ModelSpec> {
    let mut kv = BTreeMap::new();
    for p in params {
        let (k, v) =
            p.split_once('=').ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got {p:?}")))?;
        if kv.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::InvalidParameter(format!("parameter {k} given twice")));
        }
    }
    let mut take =
        |key: &str| kv.remove(key).ok_or_else(|| Error::InvalidParameter(format!("{family} needs parameter {key}")));
    let spec = match family {
        "grid" => {
            ModelSpec::Grid { dims: take("dims")?.split('x').map(|d| number(d, "dims")).collect::<Result<_, _>>()? }
        }
        "er" => ModelSpec::Er { n: number(&take("n")?, "n")?, p: number(&take("p")?, "p")? },
        "ba" => {
            let n = number(&take("n")?, "n")?;
            let k = number(&take("k")?, "k")?;
            let m0 = match take("m0") {
                Ok(v) => Some(number(&v, "m0")?),
                Err(_) => None,
            };
            ModelSpec::Ba { n, k, m0 }
        }
        "dd" => ModelSpec::Dd { n: number(&take("n")?, "n")?, sigma: number(&take("sigma")?, "sigma")? },
        other => return Err(Error::InvalidParameter(format!("unknown family {other:?}; expected grid, er, ba or dd"))),
    };
    if let Some(extra) = kv.keys().next() {
        return Err(Error::InvalidParameter(format!("unknown parameter {extra} for {family}")));
    }
    spec.validate()?;
    Ok(spec)
}

fn number<T: std::str::FromStr>(s: &str, key: &str) -> approxsym::Result<T> {
    s.parse().map_err(|_| Error::InvalidParameter(format!("cannot parse {key}={s}")))
}
