//! Approximate graph symmetry by simulated annealing over vertex
//! permutations, with optional centrality-guided moves.
//!
//! The approximate symmetry of a graph is the smallest number of edges that
//! some non-trivial vertex permutation maps onto non-edges. Zero means the
//! graph has a non-trivial automorphism.
//!
//! ```
//! use approxsym::{anneal, AnnealConfig, Graph};
//!
//! let g = Graph::cycle(8)?;
//! let result = anneal(&g, &AnnealConfig::default().with_seed(1))?;
//! assert_eq!(result.best_epsilon, 0); // rotations and reflections exist
//! # Ok::<(), approxsym::Error>(())
//! ```
//!
//! Guided annealing biases the choice of transposition toward aligning
//! vertices with similar centrality:
//!
//! ```
//! use approxsym::{anneal, AnnealConfig, CentralityKind, GuidanceParams, ModelSpec, MoveStrategy};
//!
//! let g = ModelSpec::Ba { n: 60, k: 3, m0: None }.generate(7)?;
//! let cfg = AnnealConfig::default()
//!     .with_steps(200_000)
//!     .with_strategy(MoveStrategy::Guided(GuidanceParams::new(CentralityKind::Eigenvector)));
//! let result = anneal(&g, &cfg)?;
//! assert!(result.best_s < 0.1);
//! # Ok::<(), approxsym::Error>(())
//! ```
//!
//! The guide in `book/` walks through every module with runnable snippets;
//! those snippets are compiled and run as doc-tests of this crate.

pub mod anneal;
pub mod centrality;
pub mod energy;
mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod guidance;
pub mod oracle;
pub mod stats;

pub use anneal::{anneal, anneal_with, AnnealConfig, AnnealResult, MoveStrategy, Schedule, StepEvent};
pub use centrality::{CentralityKind, CentralityVector};
pub use energy::{energy, energy_delta, energy_dense_oracle, normalized_symmetry, Energy};
pub use error::{Error, Result};
pub use experiment::{ExperimentSpec, RunRecord};
pub use generators::ModelSpec;
pub use graph::{Graph, Permutation};
pub use guidance::{build_similarity, GuidanceParams, SimilarityMatrix};
pub use oracle::{exact_symmetry, ExactResult, SearchMode};
pub use stats::{cohens_d, paired_t_test, PairedSample, TestReport};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/objective.md")]
    mod objective {}
    #[doc = include_str!("../../../book/src/centralities.md")]
    mod centralities {}
    #[doc = include_str!("../../../book/src/guided-moves.md")]
    mod guided_moves {}
    #[doc = include_str!("../../../book/src/annealing.md")]
    mod annealing {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/exact-oracle.md")]
    mod exact_oracle {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
}
