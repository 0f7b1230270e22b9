//! Error types shared across the pipeline.

use thiserror::Error;

/// Errors raised by tensor operations and the computation tape.
#[derive(Debug, Error)]
pub enum AutodiffError {
    #[error("shape mismatch in {op}: left is {left}, right is {right}")]
    ShapeMismatch {
        op: &'static str,
        left: String,
        right: String,
    },
    #[error("{op} expects a scalar (1x1) value, got {shape}")]
    NotScalar { op: &'static str, shape: String },
    #[error("checkpoint parse error at line {line}: {reason}")]
    CheckpointParse { line: usize, reason: String },
    #[error("unknown parameter {0} in checkpoint")]
    UnknownParam(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors raised by the world model and symbolic simulator.
#[derive(Debug, Error)]
pub enum WorldError {
    #[error("unknown domain: {0}")]
    UnknownDomain(String),
    #[error("unknown object id: {0}")]
    UnknownObject(String),
    #[error("precondition violated for {action}: {predicate}")]
    PreconditionViolation { action: String, predicate: String },
    #[error("malformed action {action}: {reason}")]
    MalformedAction { action: String, reason: String },
}

/// Errors raised by embedding providers.
#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("embedding file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("embedding file {path}, line {line}: expected {expected} values, found {found}")]
    Arity {
        path: String,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("embedding file {path}, line {line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
}

/// Errors raised by the predictive model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("feature width mismatch: expected {expected}, got {got}")]
    FeatureWidth { expected: usize, got: usize },
    #[error(transparent)]
    Autodiff(#[from] AutodiffError),
}

/// Errors raised during corpus synthesis.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("teaching failed for goal {goal} on scene {scene}: {reason}")]
    TeachingFailure {
        goal: String,
        scene: String,
        reason: String,
    },
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("corpus line {line}: {reason}")]
    CorpusParse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Errors raised during training and evaluation.
#[derive(Debug, Error)]
pub enum TrainError {
    #[error("bad training configuration: {0}")]
    Config(String),
    #[error("label/prediction length mismatch: {pred} vs {labels}")]
    LengthMismatch { pred: usize, labels: usize },
    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("no evaluation cases supplied")]
    EmptyEvaluation,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Autodiff(#[from] AutodiffError),
}

/// Errors raised by the planner front-end.
#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("effective branching factor undefined for depth {depth} with {nodes} nodes")]
    BadEbfInput { depth: usize, nodes: usize },
}
