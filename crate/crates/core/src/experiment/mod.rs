//! Declarative benchmark batches.
//!
//! An [`ExperimentSpec`] names graph models, annealing variants and a repeat
//! count. Every graph instance is generated once and shared by all variants,
//! so results can be compared pairwise per instance. Seeds for graphs and
//! runs are derived from the master seed and the run's identity (model,
//! instance, variant label, repeat), never from execution order.
//!
//! Runs are appended to the output CSV as they finish, alongside a progress
//! manifest (`<out>.progress`). An interrupted batch resumes from the
//! manifest; when everything is done the CSV is rewritten in sorted order
//! and the manifest is removed.

mod gridsearch;
mod record;
mod report;

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anneal::{anneal_with, AnnealConfig, MoveStrategy, DEFAULT_T_MIN};
use crate::centrality::CentralityKind;
use crate::error::{Error, Result};
use crate::generators::ModelSpec;
use crate::graph::Graph;
use crate::guidance::{build_similarity, GuidanceParams, SimilarityMatrix, DEFAULT_BETA, DEFAULT_PHI};

pub use gridsearch::{grid_search, GridCell, GridSearchSpec, GridSearchTable};
pub use record::{read_records, read_records_file, write_records, RunKey, RunRecord, CSV_COLUMNS};
pub use report::{compare_variants, write_comparisons, Comparison, Pairing};

/// Annealing settings shared by every variant of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealSettings {
    pub steps: Option<u64>,
    pub t_max: Option<f64>,
    pub t_min: f64,
    pub restarts: u32,
    pub forbid_identity: bool,
    pub derangement_only: bool,
}

impl Default for AnnealSettings {
    fn default() -> Self {
        AnnealSettings {
            steps: None,
            t_max: None,
            t_min: DEFAULT_T_MIN,
            restarts: 1,
            forbid_identity: true,
            derangement_only: false,
        }
    }
}

impl AnnealSettings {
    pub fn config(&self, strategy: MoveStrategy, seed: u64) -> AnnealConfig {
        AnnealConfig {
            steps: self.steps,
            t_max: self.t_max,
            t_min: self.t_min,
            move_strategy: strategy,
            restarts: self.restarts,
            seed,
            forbid_identity: self.forbid_identity,
            derangement_only: self.derangement_only,
            trace_points: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    Uniform,
    Guided,
}

/// One annealing variant. Guided variants need a centrality; `beta` and
/// `phi` fall back to the library defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSpec {
    pub label: String,
    pub strategy: StrategyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centrality: Option<CentralityKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

impl VariantSpec {
    pub fn uniform(label: impl Into<String>) -> Self {
        VariantSpec { label: label.into(), strategy: StrategyName::Uniform, centrality: None, beta: None, phi: None }
    }

    pub fn guided(label: impl Into<String>, params: GuidanceParams) -> Self {
        VariantSpec {
            label: label.into(),
            strategy: StrategyName::Guided,
            centrality: Some(params.centrality),
            beta: Some(params.beta),
            phi: Some(params.phi),
        }
    }

    pub fn move_strategy(&self) -> Result<MoveStrategy> {
        match self.strategy {
            StrategyName::Uniform => {
                if self.centrality.is_some() || self.beta.is_some() || self.phi.is_some() {
                    return Err(Error::invalid(format!(
                        "variant {:?}: uniform strategy takes no centrality/beta/phi",
                        self.label
                    )));
                }
                Ok(MoveStrategy::Uniform)
            }
            StrategyName::Guided => {
                let centrality = self.centrality.ok_or_else(|| {
                    Error::invalid(format!("variant {:?}: guided strategy needs a centrality", self.label))
                })?;
                let params = GuidanceParams {
                    centrality,
                    beta: self.beta.unwrap_or(DEFAULT_BETA),
                    phi: self.phi.unwrap_or(DEFAULT_PHI),
                };
                params.validate()?;
                Ok(MoveStrategy::Guided(params))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    #[serde(flatten)]
    pub model: ModelSpec,
    /// Number of distinct graph instances drawn from the model.
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    pub master_seed: u64,
    #[serde(default = "one")]
    pub repeats: usize,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    /// Store measured wall time. Off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub anneal: AnnealSettings,
    pub models: Vec<ModelEntry>,
    pub variants: Vec<VariantSpec>,
}

fn one() -> usize {
    1
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        ExperimentSpec::from_toml(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::invalid("repeats must be at least 1"));
        }
        if self.variants.is_empty() {
            return Err(Error::invalid("at least one variant is required"));
        }
        if self.models.is_empty() {
            return Err(Error::invalid("at least one model is required"));
        }
        let mut labels = HashSet::new();
        for v in &self.variants {
            if v.label.is_empty() || v.label.contains(['\t', '\n', ',']) {
                return Err(Error::invalid(format!("invalid variant label {:?}", v.label)));
            }
            if !labels.insert(v.label.as_str()) {
                return Err(Error::invalid(format!("duplicate variant label {:?}", v.label)));
            }
            v.move_strategy()?;
        }
        let mut models = HashSet::new();
        for m in &self.models {
            m.model.validate()?;
            if !models.insert((m.model.family(), m.model.params())) {
                return Err(Error::invalid(format!("model {} listed twice", m.model)));
            }
        }
        let probe = Graph::complete(2);
        self.anneal.config(MoveStrategy::Uniform, 0).schedule(&probe).map(|_| ())?;
        Ok(())
    }

    /// Total number of runs the spec describes.
    pub fn run_count(&self) -> usize {
        self.models.iter().map(|m| m.instances).sum::<usize>() * self.variants.len() * self.repeats
    }

    fn fingerprint(&self) -> u64 {
        let text = toml::to_string(self).unwrap_or_default();
        fnv1a(text.as_bytes())
    }
}

/// Options that affect how, not what, an experiment runs.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Stop after this many new runs, leaving the progress manifest behind
    /// as if interrupted.
    pub stop_after: Option<usize>,
}

/// The outcome of [`run_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub enum Completion {
    /// All runs finished; the CSV is sorted and final.
    Finished(Vec<RunRecord>),
    /// Stopped early; the manifest allows resuming.
    Interrupted { completed: usize, total: usize },
}

// --- seed derivation --------------------------------------------------------

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

fn mix(parts: &[u64]) -> u64 {
    parts.iter().fold(0u64, |h, &p| splitmix(h ^ p))
}

const GRAPH_DOMAIN: u64 = 0x4752_4150_4800_0000;
const RUN_DOMAIN: u64 = 0x5255_4e00_0000_0000;

/// Seed of graph instance `graph_id` of `model`.
pub fn graph_seed(master: u64, model: &ModelSpec, graph_id: usize) -> u64 {
    let model_hash = fnv1a(format!("{}|{}", model.family(), model.params()).as_bytes());
    mix(&[GRAPH_DOMAIN, master, model_hash, graph_id as u64])
}

/// Seed of one annealing run.
pub fn run_seed(master: u64, model: &ModelSpec, graph_id: usize, variant: &str, run_id: usize) -> u64 {
    let model_hash = fnv1a(format!("{}|{}", model.family(), model.params()).as_bytes());
    mix(&[RUN_DOMAIN, master, model_hash, graph_id as u64, fnv1a(variant.as_bytes()), run_id as u64])
}

// --- execution --------------------------------------------------------------

/// A generated instance shared by all variants.
struct Instance<'s> {
    model: &'s ModelSpec,
    graph_id: usize,
    graph: Graph,
}

struct Progress {
    csv: csv::Writer<BufWriter<File>>,
    manifest: BufWriter<File>,
    new_runs: usize,
    stop_after: Option<usize>,
}

impl Progress {
    fn record(&mut self, r: &RunRecord) -> Result<()> {
        self.csv.serialize(r)?;
        self.csv.flush()?;
        writeln!(self.manifest, "{}", r.key().manifest_line())?;
        self.manifest.flush()?;
        self.new_runs += 1;
        Ok(())
    }

    fn should_stop(&self) -> bool {
        self.stop_after.is_some_and(|cap| self.new_runs >= cap)
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".progress");
    PathBuf::from(name)
}

/// Runs every `(instance, variant, repeat)` of `spec` and writes the sorted
/// records to `out`.
pub fn run_experiment(spec: &ExperimentSpec, out: &Path) -> Result<Vec<RunRecord>> {
    match run_experiment_with(spec, out, &RunOptions::default())? {
        Completion::Finished(records) => Ok(records),
        Completion::Interrupted { .. } => unreachable!("no stop requested"),
    }
}

pub fn run_experiment_with(spec: &ExperimentSpec, out: &Path, opts: &RunOptions) -> Result<Completion> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| execute(spec, out, opts))
}

fn execute(spec: &ExperimentSpec, out: &Path, opts: &RunOptions) -> Result<Completion> {
    let manifest = manifest_path(out);
    let fingerprint = format!("# spec {:016x}", spec.fingerprint());
    let done = resume_state(out, &manifest, &fingerprint)?;
    let total = spec.run_count();

    let instances: Vec<Instance> = spec
        .models
        .iter()
        .flat_map(|entry| (0..entry.instances).map(move |id| (&entry.model, id)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(model, graph_id)| {
            let graph = model.generate(graph_seed(spec.master_seed, model, graph_id))?;
            Ok(Instance { model, graph_id, graph })
        })
        .collect::<Result<_>>()?;

    let csv_file = OpenOptions::new().append(true).create(true).open(out)?;
    let needs_header = csv_file.metadata()?.len() == 0;
    let mut manifest_file = OpenOptions::new().append(true).create(true).open(&manifest)?;
    if manifest_file.metadata()?.len() == 0 {
        writeln!(manifest_file, "{fingerprint}")?;
    }
    let progress = Mutex::new(Progress {
        csv: csv::WriterBuilder::new().has_headers(needs_header).from_writer(BufWriter::new(csv_file)),
        manifest: BufWriter::new(manifest_file),
        new_runs: 0,
        stop_after: opts.stop_after,
    });

    let units: Vec<(&Instance, &VariantSpec)> =
        instances.iter().flat_map(|inst| spec.variants.iter().map(move |v| (inst, v))).collect();
    units.par_iter().try_for_each(|&(inst, variant)| run_unit(spec, inst, variant, &done, &progress))?;

    let progress = progress.into_inner().expect("worker panicked while writing");
    let stopped = progress.should_stop();
    drop(progress);

    let mut records = record::read_records_lenient(out)?;
    if stopped && records.len() < total {
        return Ok(Completion::Interrupted { completed: records.len(), total });
    }
    records.sort_by(|a, b| a.key().cmp(&b.key()));
    let tmp = out.with_extension("csv.tmp");
    write_records(BufWriter::new(File::create(&tmp)?), &records)?;
    fs::rename(&tmp, out)?;
    fs::remove_file(&manifest)?;
    Ok(Completion::Finished(records))
}

/// Reads the manifest of an interrupted batch and trims the CSV down to the
/// runs it vouches for. Without a manifest the batch starts from scratch.
fn resume_state(out: &Path, manifest: &Path, fingerprint: &str) -> Result<HashSet<String>> {
    let file = match File::open(manifest) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            File::create(out)?;
            return Ok(HashSet::new());
        }
        Err(e) => return Err(e.into()),
    };
    let mut lines = BufReader::new(file).lines();
    match lines.next().transpose()? {
        Some(first) if first == fingerprint => {}
        Some(_) => {
            return Err(Error::invalid(format!(
                "{} belongs to a different experiment configuration; delete it to start over",
                manifest.display()
            )))
        }
        None => {}
    }
    let done: HashSet<String> = lines.collect::<std::io::Result<_>>()?;
    let kept: Vec<RunRecord> =
        record::read_records_lenient(out)?.into_iter().filter(|r| done.contains(&r.key().manifest_line())).collect();
    let confirmed: HashSet<String> = kept.iter().map(|r| r.key().manifest_line()).collect();
    write_records(BufWriter::new(File::create(out)?), &kept)?;
    if kept.is_empty() {
        // write_records emitted a bare header; appending must not add another
        File::create(out)?;
    }
    let mut m = BufWriter::new(File::create(manifest)?);
    writeln!(m, "{fingerprint}")?;
    for line in &confirmed {
        writeln!(m, "{line}")?;
    }
    m.flush()?;
    Ok(confirmed)
}

fn similarity_for(g: &Graph, strategy: &MoveStrategy) -> Result<Option<SimilarityMatrix>> {
    match strategy.guidance() {
        Some(params) => Ok(Some(build_similarity(&params.centrality.compute(g)?, params.beta)?)),
        None => Ok(None),
    }
}

fn run_unit(
    spec: &ExperimentSpec,
    inst: &Instance,
    variant: &VariantSpec,
    done: &HashSet<String>,
    progress: &Mutex<Progress>,
) -> Result<()> {
    let strategy = variant.move_strategy()?;
    let mut sim: Option<Option<SimilarityMatrix>> = None;
    for run_id in 0..spec.repeats {
        let base = RunKey {
            family: inst.model.family().to_string(),
            params: inst.model.params(),
            graph_id: inst.graph_id,
            variant: variant.label.clone(),
            run_id,
        };
        if done.contains(&base.manifest_line()) {
            continue;
        }
        if progress.lock().expect("writer lock").should_stop() {
            return Ok(());
        }
        let sim = match &sim {
            Some(s) => s,
            None => sim.insert(similarity_for(&inst.graph, &strategy)?),
        };
        let seed = run_seed(spec.master_seed, inst.model, inst.graph_id, &variant.label, run_id);
        let cfg = spec.anneal.config(strategy, seed);
        let result = anneal_with(&inst.graph, &cfg, sim.as_ref(), &mut ())?;
        let guidance = strategy.guidance();
        let record = RunRecord {
            family: base.family,
            params: base.params,
            n: inst.graph.n(),
            graph_id: inst.graph_id,
            variant: base.variant,
            centrality: guidance.map(|p| p.centrality.name().to_string()).unwrap_or_default(),
            beta: guidance.map(|p| p.beta),
            phi: guidance.map(|p| p.phi),
            run_id,
            seed,
            epsilon: result.best_epsilon,
            s: result.best_s,
            steps: result.proposed_moves,
            accepted_moves: result.accepted_moves,
            wall_time_ms: if spec.record_timing { result.wall_time.as_millis() as u64 } else { 0 },
        };
        let mut p = progress.lock().expect("writer lock");
        if p.should_stop() {
            return Ok(());
        }
        p.record(&record)?;
    }
    Ok(())
}

/// Every run seed the spec will use, in expansion order.
pub fn planned_seeds(spec: &ExperimentSpec) -> Vec<u64> {
    let mut seeds = Vec::with_capacity(spec.run_count());
    for entry in &spec.models {
        for graph_id in 0..entry.instances {
            for v in &spec.variants {
                for run_id in 0..spec.repeats {
                    seeds.push(run_seed(spec.master_seed, &entry.model, graph_id, &v.label, run_id));
                }
            }
        }
    }
    seeds
}
