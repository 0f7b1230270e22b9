//! Goal-conditioned tool prediction over object-centric scene graphs.
//!
//! The crate covers the full pipeline at desk scale:
//!
//! - [`autodiff`]: a minimal dense reverse-mode differentiation engine,
//!   generic over the scalar type.
//! - [`embeddings`]: word vectors for object classes and goal tokens
//!   (seeded hash vectors, file-loaded tables, and a bundled toy
//!   knowledge table with cluster structure).
//! - [`worldmodel`]: object-centric home/factory scenes plus a symbolic
//!   action simulator with preconditions and effects.
//! - [`toolnet`]: the gated graph-convolution predictor `p(t | scene, goal)`
//!   with its incremental components (metric fusion, goal-conditioned
//!   attention, factored likelihood, tool-relevance head, knowledge-base
//!   embeddings, loss weighting).
//! - [`dataset`]: scripted-teacher demonstration synthesis and the two
//!   corpus augmentation strategies (cross-scene replay, object removal).
//! - [`gentest`]: the five generalization scenario generators.
//! - [`trainer`]: weighted binary cross-entropy training, evaluation,
//!   and the ablation results table.
//! - [`planner`]: forward symbolic search, optionally prioritized by
//!   model likelihoods, with effective-branching-factor reporting.

pub mod autodiff;
pub mod dataset;
pub mod embeddings;
pub mod gentest;
pub mod error;
pub mod toolnet;
pub mod train;
pub mod worldmodel;

/// Dense matrix of `f64` values. The whole pipeline runs on 64-bit floats.
pub type DTensor = autodiff::Tensor<f64>;
/// Computation tape over `f64`.
pub type DTape = autodiff::Tape<f64>;
/// Named trainable parameters over `f64`.
pub type DParamStore = autodiff::ParamStore<f64>;

/// Single-precision variants, for callers that trade accuracy for memory.
pub type Tensor32 = autodiff::Tensor<f32>;
pub type Tape32 = autodiff::Tape<f32>;
