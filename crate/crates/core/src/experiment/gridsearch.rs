use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{graph_seed, run_seed, AnnealSettings, ModelEntry};
use crate::anneal::{anneal_with, MoveStrategy};
use crate::centrality::CentralityKind;
use crate::error::{Error, Result};
use crate::guidance::{build_similarity, GuidanceParams};

/// Tuning sweep over the division constant `beta` and probability constant
/// `phi`. Every cell anneals the same instances with the same seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSearchSpec {
    pub master_seed: u64,
    pub centralities: Vec<CentralityKind>,
    pub beta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Also evaluate the uniform strategy as a reference row.
    #[serde(default = "yes")]
    pub include_uniform: bool,
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub anneal: AnnealSettings,
    pub models: Vec<ModelEntry>,
}

fn yes() -> bool {
    true
}

impl GridSearchSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: GridSearchSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        GridSearchSpec::from_toml(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta.is_empty() || self.phi.is_empty() || self.centralities.is_empty() {
            return Err(Error::invalid("grid search needs non-empty beta, phi and centrality lists"));
        }
        if self.models.iter().all(|m| m.instances == 0) {
            return Err(Error::invalid("grid search needs at least one instance"));
        }
        for &centrality in &self.centralities {
            for &beta in &self.beta {
                for &phi in &self.phi {
                    GuidanceParams { centrality, beta, phi }.validate()?;
                }
            }
        }
        for m in &self.models {
            m.model.validate()?;
        }
        Ok(())
    }

    fn strategies(&self) -> Vec<MoveStrategy> {
        let mut out = Vec::new();
        if self.include_uniform {
            out.push(MoveStrategy::Uniform);
        }
        for &centrality in &self.centralities {
            for &beta in &self.beta {
                for &phi in &self.phi {
                    out.push(MoveStrategy::Guided(GuidanceParams { centrality, beta, phi }));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCell {
    /// `None` for the uniform reference row.
    pub centrality: Option<CentralityKind>,
    pub beta: Option<f64>,
    pub phi: Option<f64>,
    pub mean_s: f64,
    pub sd_s: f64,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSearchTable {
    /// Sorted by mean S ascending (best first).
    pub rows: Vec<GridCell>,
}

impl GridSearchTable {
    pub fn best_guided(&self) -> Option<&GridCell> {
        self.rows.iter().find(|c| c.centrality.is_some())
    }

    pub fn uniform(&self) -> Option<&GridCell> {
        self.rows.iter().find(|c| c.centrality.is_none())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rank", "strategy", "centrality", "beta", "phi", "mean_S", "sd_S", "instances"])?;
        for (rank, c) in self.rows.iter().enumerate() {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                (rank + 1).to_string(),
                if c.centrality.is_some() { "guided" } else { "uniform" }.to_string(),
                c.centrality.map(|k| k.name().to_string()).unwrap_or_default(),
                opt(c.beta),
                opt(c.phi),
                c.mean_s.to_string(),
                c.sd_s.to_string(),
                c.instances.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean normalized symmetry of every `(centrality, beta, phi)` cell over the
/// spec's instances.
pub fn grid_search(spec: &GridSearchSpec) -> Result<GridSearchTable> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| search(spec))
}

fn search(spec: &GridSearchSpec) -> Result<GridSearchTable> {
    let strategies = spec.strategies();
    let instances: Vec<_> =
        spec.models.iter().flat_map(|entry| (0..entry.instances).map(move |id| (&entry.model, id))).collect();

    // per instance: S for each strategy, in `strategies` order
    let per_instance: Vec<Vec<f64>> = instances
        .par_iter()
        .map(|&(model, graph_id)| {
            let g = model.generate(graph_seed(spec.master_seed, model, graph_id))?;
            let seed = run_seed(spec.master_seed, model, graph_id, "gridsearch", 0);
            let mut centralities = Vec::new();
            strategies
                .iter()
                .map(|strategy| {
                    let sim = match strategy.guidance() {
                        Some(p) => {
                            let c = match centralities.iter().find(|(k, _)| *k == p.centrality) {
                                Some((_, c)) => c,
                                None => {
                                    centralities.push((p.centrality, p.centrality.compute(&g)?));
                                    &centralities.last().expect("just pushed").1
                                }
                            };
                            Some(build_similarity(c, p.beta)?)
                        }
                        None => None,
                    };
                    let cfg = spec.anneal.config(*strategy, seed);
                    Ok(anneal_with(&g, &cfg, sim.as_ref(), &mut ())?.best_s)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let k = per_instance.len();
    let mut rows: Vec<GridCell> = strategies
        .iter()
        .enumerate()
        .map(|(i, strategy)| {
            let values: Vec<f64> = per_instance.iter().map(|row| row[i]).collect();
            let mean = values.iter().sum::<f64>() / k as f64;
            let sd = if k > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
            } else {
                0.0
            };
            let g = strategy.guidance();
            GridCell {
                centrality: g.map(|p| p.centrality),
                beta: g.map(|p| p.beta),
                phi: g.map(|p| p.phi),
                mean_s: mean,
                sd_s: sd,
                instances: k,
            }
        })
        .collect();
    // stable sort keeps lattice order among ties
    rows.sort_by(|a, b| a.mean_s.total_cmp(&b.mean_s));
    Ok(GridSearchTable { rows })
}
