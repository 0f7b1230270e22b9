//! Optimizing predictor parameters on a demonstration corpus and scoring
//! the result.
//!
//! Training minimizes summed binary cross-entropy between the predicted
//! tool distribution and the multi-hot label of each demonstrated plan,
//! one plan per optimizer step by default. A prediction counts as correct
//! when the recommended token appears in some demonstration for the same
//! (goal, scene) pair, so every tool the teachers actually reached for is
//! an acceptable answer, and bare-handed pairs accept only `no-tool`.

mod results;

pub use results::{run_table, ResultsRow, ResultsTable};

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::autodiff::{load_params, save_params, ParamStore, Tape, Tensor};
use crate::dataset::{
    alpha, label_vector, record_scene, split_of, Corpus, DemoPlan, Origin, Split,
};
use crate::embeddings::{EmbeddingProvider, DEFAULT_SEED};
use crate::error::TrainError;
use crate::gentest::{CaseType, GenCase};
use crate::toolnet::{
    candidate_tools, encode_scene, forward_trace, init_params, predict, ModelConfig,
    SceneEncoding, NO_TOOL,
};
use crate::worldmodel::{goal_by_id, make_scene, tool_vocabulary, Domain, GoalSpec, WorldGraph};

/// Optimization hyperparameters. All of them must be positive; two configs
/// with equal fields produce bitwise-identical runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    /// Plans folded into one optimizer step.
    pub batch_size: usize,
    pub seed: u64,
    /// Epochs without a validation-accuracy improvement before stopping.
    pub patience: usize,
    /// Loss multiplier for cost-optimal plans when a row trains weighted.
    pub w_opt: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            learning_rate: 1e-3,
            optimizer: Optimizer::Adam { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 },
            batch_size: 1,
            seed: 0,
            patience: 20,
            w_opt: 2.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        fn positive(name: &str, v: f64) -> Result<(), TrainError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(TrainError::Config(format!("{name} must be positive, got {v}")))
            }
        }
        for (name, v) in [
            ("epochs", self.epochs),
            ("batch-size", self.batch_size),
            ("patience", self.patience),
        ] {
            if v == 0 {
                return Err(TrainError::Config(format!("{name} must be positive")));
            }
        }
        positive("learning-rate", self.learning_rate)?;
        positive("w-opt", self.w_opt)?;
        if let Optimizer::Adam { beta1, beta2, epsilon } = self.optimizer {
            for (name, b) in [("beta1", beta1), ("beta2", beta2)] {
                if !(0.0..1.0).contains(&b) {
                    return Err(TrainError::Config(format!(
                        "{name} must lie in [0, 1), got {b}"
                    )));
                }
            }
            positive("epsilon", epsilon)?;
        }
        Ok(())
    }
}

/// One row of the component study: model flags plus the two switches the
/// model itself cannot see.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ablation {
    pub label: String,
    pub model: ModelConfig,
    /// Embed classes with the bundled knowledge table instead of hashes.
    pub knowledge: bool,
    /// Scale each record's loss by its optimality weight.
    pub weighting: bool,
}

impl Ablation {
    /// The embedding provider this row trains and evaluates with.
    pub fn provider(&self) -> EmbeddingProvider {
        if self.knowledge {
            EmbeddingProvider::toy_kb(self.model.embed_dim, DEFAULT_SEED)
        } else {
            EmbeddingProvider::hash(self.model.embed_dim, DEFAULT_SEED)
        }
    }
}

/// The incremental component stack, one row per addition. Flags accumulate
/// left to right, matching the columns of the accuracy table: the bare
/// graph network, metric features, attention, factored tool scoring, the
/// no-tool head, knowledge embeddings, loss weighting.
pub fn ladder(base: &ModelConfig) -> Vec<Ablation> {
    let row = |label: &str, model: &ModelConfig, knowledge, weighting| Ablation {
        label: label.to_string(),
        model: model.clone(),
        knowledge,
        weighting,
    };
    let mut model = base.clone();
    model.metric = false;
    model.attention = false;
    model.late_fusion = false;
    model.no_tool_head = false;
    let mut rows = vec![row("GGCN", &model, false, false)];
    model.metric = true;
    rows.push(row("+Metric", &model, false, false));
    model.attention = true;
    rows.push(row("+Attn", &model, false, false));
    model.late_fusion = true;
    rows.push(row("+L", &model, false, false));
    model.no_tool_head = true;
    rows.push(row("+NT", &model, false, false));
    rows.push(row("+C", &model, true, false));
    rows.push(row("+W", &model, true, true));
    rows
}

/// Summed binary cross-entropy between one prediction and its label
/// vector, scaled by `alpha` when weighting is on. Predictions are clamped
/// to [1e-9, 1 - 1e-9] so perfect and saturated slots stay finite.
pub fn bce_loss(
    pred: &[f64],
    labels: &[f64],
    alpha: f64,
    weighting: bool,
) -> Result<f64, TrainError> {
    if pred.len() != labels.len() {
        return Err(TrainError::LengthMismatch { pred: pred.len(), labels: labels.len() });
    }
    let eps = 1e-9;
    let mut loss = 0.0;
    for (&p, &y) in pred.iter().zip(labels) {
        let p = p.clamp(eps, 1.0 - eps);
        loss -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
    }
    Ok(if weighting { alpha * loss } else { loss })
}

/// One scored prediction task: a goal, the scene to predict on, and every
/// answer some demonstration of that pair vouches for.
#[derive(Clone, Debug)]
pub struct EvalCase {
    pub goal: GoalSpec,
    pub scene: WorldGraph,
    pub acceptable: BTreeSet<String>,
}

/// Correct/total counts from one evaluation pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitEval {
    pub correct: usize,
    pub total: usize,
}

impl SplitEval {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }

    fn absorb(&mut self, other: SplitEval) {
        self.correct += other.correct;
        self.total += other.total;
    }
}

/// Accuracy over a generalization suite, overall and per family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GentestEval {
    pub overall: SplitEval,
    /// Counts for each family with at least one case in the suite.
    pub per_type: Vec<(CaseType, SplitEval)>,
}

/// The scene identity a corpus record was demonstrated on: its generator
/// seed plus whatever the removal augmentation deleted.
fn scene_key(plan: &DemoPlan) -> (u64, Vec<String>) {
    match &plan.origin {
        Origin::Removal { removed } => (plan.scene_seed, removed.clone()),
        _ => (plan.scene_seed, Vec::new()),
    }
}

/// Collects the distinct (goal, scene) pairs of one split as evaluation
/// cases. The acceptable set unions `tools_used` over every record of the
/// pair, whichever split the record landed in; records that used no tool
/// contribute the `no-tool` answer.
pub fn split_cases(
    corpus: &Corpus,
    held_out_seed: u64,
    domain: Domain,
    split: Split,
) -> Vec<EvalCase> {
    let mut acceptable: BTreeMap<(u32, u64, Vec<String>), BTreeSet<String>> = BTreeMap::new();
    let mut members = BTreeSet::new();
    for plan in corpus.domain_plans(domain) {
        let (seed, removed) = scene_key(plan);
        let key = (plan.goal_id, seed, removed);
        let answers = acceptable.entry(key.clone()).or_default();
        if plan.tools_used.is_empty() {
            answers.insert(NO_TOOL.to_string());
        } else {
            answers.extend(plan.tools_used.iter().cloned());
        }
        if split_of(plan, held_out_seed) == split {
            members.insert(key);
        }
    }
    members
        .into_iter()
        .map(|key| {
            let (goal_id, scene_seed, removed) = &key;
            let goal = goal_by_id(domain, *goal_id).expect("corpus goal ids are valid");
            let mut scene = make_scene(domain, *scene_seed);
            for id in removed {
                scene.remove_node(id);
            }
            EvalCase { goal, scene, acceptable: acceptable[&key].clone() }
        })
        .collect()
}

fn case_correct(
    params: &ParamStore<f64>,
    model: &ModelConfig,
    provider: &EmbeddingProvider,
    goal: &GoalSpec,
    scene: &WorldGraph,
    accepts: impl Fn(&str) -> bool,
) -> Result<bool, TrainError> {
    let candidates = candidate_tools(scene, model.late_fusion, &[]);
    let enc = encode_scene(scene, goal, provider, &candidates);
    let prediction = predict(params, model, &enc)?;
    Ok(accepts(prediction.best()))
}

/// Scores frozen parameters over a case set, in parallel. The result only
/// counts verdicts, so case order never changes it.
pub fn evaluate(
    params: &ParamStore<f64>,
    model: &ModelConfig,
    provider: &EmbeddingProvider,
    cases: &[EvalCase],
) -> Result<SplitEval, TrainError> {
    if cases.is_empty() {
        return Err(TrainError::EmptyEvaluation);
    }
    let verdicts: Vec<bool> = cases
        .par_iter()
        .map(|case| {
            case_correct(params, model, provider, &case.goal, &case.scene, |token| {
                case.acceptable.contains(token)
            })
        })
        .collect::<Result<_, TrainError>>()?;
    let correct = verdicts.into_iter().filter(|&ok| ok).count();
    Ok(SplitEval { correct, total: cases.len() })
}

/// Scores one domain's cases of a generalization suite, overall and per
/// family. Cases from other domains are ignored; an empty remainder is an
/// error, like any empty evaluation.
pub fn evaluate_gentest(
    params: &ParamStore<f64>,
    model: &ModelConfig,
    provider: &EmbeddingProvider,
    domain: Domain,
    suite: &[GenCase],
) -> Result<GentestEval, TrainError> {
    let cases: Vec<&GenCase> = suite.iter().filter(|c| c.domain == domain).collect();
    if cases.is_empty() {
        return Err(TrainError::EmptyEvaluation);
    }
    let verdicts: Vec<(CaseType, bool)> = cases
        .par_iter()
        .map(|case| {
            let ok = case_correct(params, model, provider, &case.goal, &case.scene, |token| {
                case.accepts(token)
            })?;
            Ok((case.case_type, ok))
        })
        .collect::<Result<_, TrainError>>()?;
    let mut overall = SplitEval::default();
    let mut families: BTreeMap<CaseType, SplitEval> = BTreeMap::new();
    for (case_type, ok) in verdicts {
        let tally = SplitEval { correct: usize::from(ok), total: 1 };
        overall.absorb(tally);
        families.entry(case_type).or_default().absorb(tally);
    }
    Ok(GentestEval { overall, per_type: families.into_iter().collect() })
}

/// One training record, ready for the tape. Records of the same (goal,
/// scene) pair share an encoding slot.
struct Sample {
    encoding: usize,
    labels: Tensor<f64>,
    alpha: f64,
}

fn build_samples(
    corpus: &Corpus,
    held_out_seed: u64,
    domain: Domain,
    model: &ModelConfig,
    provider: &EmbeddingProvider,
    weighting: bool,
    w_opt: f64,
) -> (Vec<SceneEncoding>, Vec<Sample>) {
    let mut slots: BTreeMap<(u32, u64, Vec<String>), usize> = BTreeMap::new();
    let mut encodings = Vec::new();
    let mut samples = Vec::new();
    for plan in corpus.domain_plans(domain) {
        if split_of(plan, held_out_seed) != Split::Train {
            continue;
        }
        let (seed, removed) = scene_key(plan);
        let encoding = *slots.entry((plan.goal_id, seed, removed)).or_insert_with(|| {
            let scene = record_scene(plan);
            let candidates = candidate_tools(&scene, model.late_fusion, &[]);
            encodings.push(encode_scene(&scene, &plan.goal(), provider, &candidates));
            encodings.len() - 1
        });
        samples.push(Sample {
            encoding,
            labels: Tensor::row(&label_vector(plan, &encodings[encoding].candidates)),
            alpha: alpha(plan, weighting, w_opt),
        });
    }
    (encodings, samples)
}

/// Forward, loss, backward for one record; gradients land in `params`.
/// The weight scales the whole summed loss, leaving the weighting-off path
/// bitwise identical to an unweighted run.
fn backprop(
    params: &mut ParamStore<f64>,
    model: &ModelConfig,
    enc: &SceneEncoding,
    sample: &Sample,
    epoch: usize,
) -> Result<f64, TrainError> {
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let trace = forward_trace(&mut tape, &bound, model, enc)?;
    let mut loss = tape.bce_uniform(trace.output, sample.labels.clone(), 1.0)?;
    if sample.alpha != 1.0 {
        loss = tape.affine(loss, sample.alpha, 0.0);
    }
    let value = tape.value(loss).item();
    if !value.is_finite() {
        return Err(TrainError::Diverged { epoch });
    }
    tape.backward(loss)?;
    params.accumulate_grads(&tape, &bound);
    Ok(value)
}

enum OptState {
    Sgd,
    Adam {
        step: i32,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
        first: BTreeMap<String, Tensor<f64>>,
        second: BTreeMap<String, Tensor<f64>>,
    },
}

impl OptState {
    fn new(optimizer: &Optimizer) -> Self {
        match *optimizer {
            Optimizer::Sgd => OptState::Sgd,
            Optimizer::Adam { beta1, beta2, epsilon } => OptState::Adam {
                step: 0,
                beta1,
                beta2,
                epsilon,
                first: BTreeMap::new(),
                second: BTreeMap::new(),
            },
        }
    }

    fn apply(&mut self, params: &mut ParamStore<f64>, lr: f64) {
        match self {
            OptState::Sgd => {
                for (_, param) in params.iter_mut() {
                    for (w, &g) in param.value.data_mut().iter_mut().zip(param.grad.data()) {
                        *w -= lr * g;
                    }
                }
            }
            OptState::Adam { step, beta1, beta2, epsilon, first, second } => {
                *step += 1;
                let correct1 = 1.0 - beta1.powi(*step);
                let correct2 = 1.0 - beta2.powi(*step);
                for (name, param) in params.iter_mut() {
                    let (rows, cols) = param.value.shape();
                    if !first.contains_key(name) {
                        first.insert(name.to_string(), Tensor::zeros(rows, cols));
                        second.insert(name.to_string(), Tensor::zeros(rows, cols));
                    }
                    let m = first.get_mut(name).expect("just inserted");
                    let v = second.get_mut(name).expect("just inserted");
                    let weights = param.value.data_mut().iter_mut();
                    for (((w, &g), m), v) in weights
                        .zip(param.grad.data())
                        .zip(m.data_mut())
                        .zip(v.data_mut())
                    {
                        *m = *beta1 * *m + (1.0 - *beta1) * g;
                        *v = *beta2 * *v + (1.0 - *beta2) * g * g;
                        *w -= lr * (*m / correct1) / ((*v / correct2).sqrt() + *epsilon);
                    }
                }
            }
        }
    }
}

/// Loss and validation accuracy after one epoch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
}

/// What [`train`] hands back: the checkpoint from the best validation
/// epoch and the full epoch log.
pub struct TrainOutcome {
    pub params: ParamStore<f64>,
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
}

fn epoch_rng(seed: u64, domain: Domain, epoch: usize) -> ChaCha8Rng {
    let tag: u64 = match domain {
        Domain::Home => 0x7472_6169_6e2d_6800,
        Domain::Factory => 0x7472_6169_6e2d_6600,
    };
    let mut s = tag ^ seed;
    for part in [epoch as u64] {
        s = (s ^ part).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
    ChaCha8Rng::seed_from_u64(s)
}

/// Fits one domain's predictor on the corpus's training scenes.
///
/// Record order is reshuffled every epoch from the config seed, the
/// validation score is checked after each epoch, and the parameters from
/// the best validation epoch are returned once `patience` epochs pass
/// without improvement or the epoch budget runs out. A non-finite loss
/// aborts with the offending epoch.
pub fn train(
    corpus: &Corpus,
    held_out_seed: u64,
    domain: Domain,
    cfg: &TrainConfig,
    ablation: &Ablation,
    provider: &EmbeddingProvider,
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    if ablation.model.embed_dim != provider.dim() {
        return Err(TrainError::Config(format!(
            "embedding width {} does not match the model's {}",
            provider.dim(),
            ablation.model.embed_dim
        )));
    }
    let (encodings, samples) = build_samples(
        corpus,
        held_out_seed,
        domain,
        &ablation.model,
        provider,
        ablation.weighting,
        cfg.w_opt,
    );
    if samples.is_empty() {
        return Err(TrainError::Config(format!(
            "corpus has no {} training records",
            domain.name()
        )));
    }
    let val_cases = split_cases(corpus, held_out_seed, domain, Split::Val);
    if val_cases.is_empty() {
        return Err(TrainError::Config(format!(
            "corpus has no {} validation records",
            domain.name()
        )));
    }

    let mut params = init_params(&ablation.model, tool_vocabulary(domain).len())?;
    let mut opt = OptState::new(&cfg.optimizer);
    let mut history = Vec::new();
    let mut best: Option<(usize, f64, ParamStore<f64>)> = None;
    let mut stale = 0;
    let mut order: Vec<usize> = (0..samples.len()).collect();

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut epoch_rng(cfg.seed, domain, epoch));
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            params.zero_grads();
            for &i in chunk {
                let sample = &samples[i];
                loss_sum +=
                    backprop(&mut params, &ablation.model, &encodings[sample.encoding], sample, epoch)?;
            }
            opt.apply(&mut params, cfg.learning_rate);
        }
        let val = evaluate(&params, &ablation.model, provider, &val_cases)?;
        history.push(EpochStats {
            epoch,
            train_loss: loss_sum / samples.len() as f64,
            val_accuracy: val.accuracy(),
        });
        if best.as_ref().map_or(true, |(_, acc, _)| val.accuracy() > *acc) {
            best = Some((epoch, val.accuracy(), params.clone()));
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    let (best_epoch, _, best_params) = best.expect("at least one epoch runs");
    Ok(TrainOutcome { params: best_params, history, best_epoch })
}

/// Writes a checkpoint whose header records the row it came from and the
/// embedding table it expects at prediction time.
pub fn save_model(
    path: &Path,
    params: &ParamStore<f64>,
    ablation: &Ablation,
    provider: &EmbeddingProvider,
) -> Result<(), TrainError> {
    let mut meta = BTreeMap::new();
    let header = serde_json::to_string(ablation)
        .map_err(|e| TrainError::Config(format!("unserializable ablation: {e}")))?;
    meta.insert("ablation".to_string(), header);
    meta.insert("embeddings".to_string(), provider.fingerprint());
    Ok(save_params(path, params, &meta)?)
}

/// A reloaded checkpoint plus its header fields.
pub struct ModelFile {
    pub params: ParamStore<f64>,
    pub ablation: Ablation,
    /// Fingerprint of the provider the checkpoint was trained with; callers
    /// supplying their own provider should compare before predicting.
    pub embeddings_fingerprint: String,
}

pub fn load_model(path: &Path) -> Result<ModelFile, TrainError> {
    let checkpoint = load_params(path)?;
    let header = checkpoint
        .meta
        .get("ablation")
        .ok_or_else(|| TrainError::Config("checkpoint lacks an ablation header".to_string()))?;
    let ablation: Ablation = serde_json::from_str(header)
        .map_err(|e| TrainError::Config(format!("bad ablation header: {e}")))?;
    let embeddings_fingerprint = checkpoint
        .meta
        .get("embeddings")
        .cloned()
        .unwrap_or_default();
    Ok(ModelFile { params: checkpoint.params, ablation, embeddings_fingerprint })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{augment_corpus, build_corpus, CorpusConfig};

    fn base_ablation() -> Ablation {
        Ablation {
            label: "GGCN".to_string(),
            model: ModelConfig::default(),
            knowledge: false,
            weighting: false,
        }
    }

    fn toy_setup() -> (Corpus, u64) {
        let cfg = CorpusConfig {
            domains: vec![Domain::Home],
            scenes: 2,
            teacher_seeds: 2,
            ..CorpusConfig::default()
        };
        let corpus = build_corpus(&cfg).expect("toy corpus builds");
        (corpus, cfg.held_out_seed())
    }

    /// Five plans, as small as training gets: goals 1-5 on scene 0, with
    /// scene 1 records left in place for validation.
    fn five_plan_corpus() -> (Corpus, u64) {
        let (mut corpus, held_out) = toy_setup();
        corpus.plans.retain(|p| {
            (p.scene_seed != held_out && p.goal_id <= 5 && p.style_seed == 0)
                || p.scene_seed == held_out
        });
        assert_eq!(
            corpus.plans.iter().filter(|p| p.scene_seed != held_out).count(),
            5
        );
        (corpus, held_out)
    }

    #[test]
    fn perfect_predictions_cost_almost_nothing() {
        let labels = [1.0, 0.0, 0.0, 1.0, 0.0];
        let loss = bce_loss(&labels, &labels, 1.0, false).unwrap();
        assert!(loss >= 0.0 && loss <= labels.len() as f64 * 2e-9, "loss {loss}");
    }

    #[test]
    fn weighting_off_matches_alpha_one_bitwise() {
        let pred = [0.3, 0.9, 0.125, 0.5];
        let labels = [0.0, 1.0, 0.0, 1.0];
        let off = bce_loss(&pred, &labels, 7.5, false).unwrap();
        let neutral = bce_loss(&pred, &labels, 1.0, true).unwrap();
        assert_eq!(off.to_bits(), neutral.to_bits());
    }

    #[test]
    fn single_slot_coin_flip_costs_ln_two() {
        let loss = bce_loss(&[0.5], &[1.0], 1.0, false).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn mismatched_lengths_are_refused() {
        let err = bce_loss(&[0.5, 0.5], &[1.0], 1.0, false).unwrap_err();
        assert!(matches!(err, TrainError::LengthMismatch { pred: 2, labels: 1 }));
    }

    #[test]
    fn tape_loss_agrees_with_the_reference_formula() {
        let pred = [0.2, 0.85, 0.5, 0.01, 0.99];
        let labels = [0.0, 1.0, 1.0, 0.0, 1.0];
        for (alpha, weighting) in [(1.0, false), (2.0, true), (0.5, true)] {
            let mut tape: Tape<f64> = Tape::new();
            let p = tape.leaf(Tensor::row(&pred));
            let mut loss = tape.bce_uniform(p, Tensor::row(&labels), 1.0).unwrap();
            if weighting && alpha != 1.0 {
                loss = tape.affine(loss, alpha, 0.0);
            }
            let reference = bce_loss(&pred, &labels, alpha, weighting).unwrap();
            assert_eq!(tape.value(loss).item().to_bits(), reference.to_bits());
        }
    }

    #[test]
    fn config_rejects_non_positive_values() {
        let good = TrainConfig::default();
        assert!(good.validate().is_ok());
        let mut bad = good.clone();
        bad.epochs = 0;
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.learning_rate = -1e-3;
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.optimizer = Optimizer::Adam { beta1: 1.0, beta2: 0.999, epsilon: 1e-8 };
        assert!(bad.validate().is_err());
        let mut bad = good;
        bad.w_opt = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn ladder_accumulates_components_in_order() {
        let rows = ladder(&ModelConfig::default());
        let labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["GGCN", "+Metric", "+Attn", "+L", "+NT", "+C", "+W"]);
        for row in &rows {
            row.model.validate().expect("every row is a legal config");
        }
        assert!(!rows[0].model.metric && !rows[0].model.no_tool_head);
        assert!(rows[1].model.metric && !rows[1].model.attention);
        assert!(rows[2].model.attention && !rows[2].model.late_fusion);
        assert!(rows[3].model.late_fusion && !rows[3].model.no_tool_head);
        assert!(rows[4].model.no_tool_head && !rows[4].knowledge);
        assert!(rows[5].knowledge && !rows[5].weighting);
        assert!(rows[6].knowledge && rows[6].weighting);
    }

    #[test]
    fn split_cases_union_every_demonstrated_tool() {
        let (corpus, held_out) = toy_setup();
        let val = split_cases(&corpus, held_out, Domain::Home, Split::Val);
        let test = split_cases(&corpus, held_out, Domain::Home, Split::Test);
        assert_eq!(val.len(), 8, "one case per goal");
        assert_eq!(test.len(), 8);
        for case in val.iter().chain(&test) {
            assert!(!case.acceptable.is_empty());
            let mut expected = BTreeSet::new();
            for plan in corpus.domain_plans(Domain::Home) {
                if plan.goal_id == case.goal.id && plan.scene_seed == held_out {
                    if plan.tools_used.is_empty() {
                        expected.insert(NO_TOOL.to_string());
                    } else {
                        expected.extend(plan.tools_used.iter().cloned());
                    }
                }
            }
            assert_eq!(case.acceptable, expected, "goal {}", case.goal.id);
        }
    }

    #[test]
    fn evaluation_needs_at_least_one_case() {
        let params = init_params(&ModelConfig::default(), 3).unwrap();
        let provider = EmbeddingProvider::hash(ModelConfig::default().embed_dim, DEFAULT_SEED);
        let err = evaluate(&params, &ModelConfig::default(), &provider, &[]).unwrap_err();
        assert!(matches!(err, TrainError::EmptyEvaluation));
    }

    #[test]
    fn evaluation_ignores_case_order() {
        let (corpus, held_out) = toy_setup();
        let ablation = base_ablation();
        let provider = ablation.provider();
        let params =
            init_params(&ablation.model, tool_vocabulary(Domain::Home).len()).unwrap();
        let mut cases = split_cases(&corpus, held_out, Domain::Home, Split::Val);
        let forward = evaluate(&params, &ablation.model, &provider, &cases).unwrap();
        cases.reverse();
        let backward = evaluate(&params, &ablation.model, &provider, &cases).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn toy_corpus_loss_halves_within_a_hundred_epochs() {
        let (corpus, held_out) = five_plan_corpus();
        let cfg = TrainConfig { epochs: 100, patience: 100, ..TrainConfig::default() };
        let ablation = base_ablation();
        let outcome =
            train(&corpus, held_out, Domain::Home, &cfg, &ablation, &ablation.provider())
                .expect("toy training runs");
        let start = outcome.history.first().unwrap().train_loss;
        let floor = outcome
            .history
            .iter()
            .map(|e| e.train_loss)
            .fold(f64::INFINITY, f64::min);
        assert!(
            floor <= start * 0.5,
            "loss only fell from {start} to {floor} in {} epochs",
            outcome.history.len()
        );
    }

    #[test]
    fn same_seed_reproduces_the_same_history() {
        let (corpus, held_out) = five_plan_corpus();
        let cfg = TrainConfig { epochs: 5, ..TrainConfig::default() };
        let ablation = base_ablation();
        let provider = ablation.provider();
        let a = train(&corpus, held_out, Domain::Home, &cfg, &ablation, &provider).unwrap();
        let b = train(&corpus, held_out, Domain::Home, &cfg, &ablation, &provider).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.best_epoch, b.best_epoch);
    }

    #[test]
    fn weighted_rows_scale_optimal_records() {
        let (corpus, held_out) = toy_setup();
        let mut weighted = base_ablation();
        weighted.weighting = true;
        let provider = weighted.provider();
        let (_, samples) = build_samples(
            &corpus,
            held_out,
            Domain::Home,
            &weighted.model,
            &provider,
            weighted.weighting,
            2.0,
        );
        let mut seen = BTreeSet::new();
        for s in &samples {
            assert!(s.alpha == 1.0 || s.alpha == 2.0);
            seen.insert(s.alpha.to_bits());
        }
        assert_eq!(seen.len(), 2, "both weights occur on a stock corpus");
    }

    #[test]
    fn checkpoints_round_trip_with_their_header() {
        let dir = std::env::temp_dir().join("toolnet-train-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("model.ckpt");
        let ablation = ladder(&ModelConfig::default()).pop().unwrap();
        let provider = ablation.provider();
        let params =
            init_params(&ablation.model, tool_vocabulary(Domain::Home).len()).unwrap();
        save_model(&path, &params, &ablation, &provider).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded.ablation, ablation);
        assert_eq!(loaded.embeddings_fingerprint, provider.fingerprint());
        assert_eq!(loaded.params.scalar_count(), params.scalar_count());
        for (name, param) in params.iter() {
            let same = loaded.params.get(name).expect("parameter survives");
            assert_eq!(same.value, param.value);
        }
        std::fs::remove_file(&path).ok();
    }

    // Saturating activations plus the clamped cross-entropy keep the loss
    // finite under any learning rate, so a poisoned weight is the one way
    // a non-finite loss can actually appear.
    #[test]
    fn divergence_reports_the_epoch() {
        let (corpus, held_out) = five_plan_corpus();
        let ablation = base_ablation();
        let provider = ablation.provider();
        let (encodings, samples) = build_samples(
            &corpus,
            held_out,
            Domain::Home,
            &ablation.model,
            &provider,
            false,
            2.0,
        );
        let mut params =
            init_params(&ablation.model, tool_vocabulary(Domain::Home).len()).unwrap();
        params.get_mut("init/w").unwrap().value.set(0, 0, f64::NAN);
        let sample = &samples[0];
        match backprop(&mut params, &ablation.model, &encodings[sample.encoding], sample, 3) {
            Err(TrainError::Diverged { epoch: 3 }) => {}
            Err(other) => panic!("unexpected error: {other}"),
            Ok(loss) => panic!("poisoned parameters still produced loss {loss}"),
        }
    }
}
