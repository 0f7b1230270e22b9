//! Goal-conditioned tool prediction.
//!
//! A gated graph convolution encoder turns the scene graph into node states,
//! a readout summarizes them against the goal, and a sigmoid head scores
//! every candidate tool plus a terminal no-tool slot. Four optional
//! components stack on the base model:
//!
//! * `metric`: a small PReLU network over raw position/size features, fused
//!   with the propagated states so the readout sees geometry undistorted by
//!   message passing.
//! * `attention`: goal-weighted readout instead of a plain mean.
//! * `late_fusion`: score each candidate from its own embedding with one
//!   shared weight vector, so unseen tool classes can be scored; the no-tool
//!   slot uses the zero embedding.
//! * `no_tool_head`: a dedicated head for "use nothing", mixed in as
//!   `p = (1 - p_nt) * [tools; 0] + p_nt * [0..0, 1]`.

mod encode;

pub use encode::{
    attr_column, candidate_tools, encode_scene, SceneEncoding, CHANNELS, METRIC_EXTRAS,
    STATE_FEATURES,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{BoundParams, ParamStore, Tape, Tensor, ValueId};
use crate::error::ModelError;

/// Token reported when the model recommends acting without any tool.
pub const NO_TOOL: &str = "no-tool";

/// Architecture and ablation switches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub embed_dim: usize,
    pub hidden: usize,
    /// Message-passing rounds; propagation weights are shared across rounds.
    pub steps: usize,
    pub metric: bool,
    pub attention: bool,
    pub late_fusion: bool,
    pub no_tool_head: bool,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            embed_dim: crate::embeddings::DEFAULT_DIM,
            hidden: 32,
            steps: 2,
            metric: false,
            attention: false,
            late_fusion: false,
            no_tool_head: false,
            seed: 7,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.embed_dim == 0 || self.hidden == 0 || self.steps == 0 {
            return Err(ModelError::Config(
                "embed-dim, hidden, and steps must all be positive".to_string(),
            ));
        }
        if self.attention && !self.metric {
            return Err(ModelError::Config(
                "the attention readout consumes fused metric features; enable metric too"
                    .to_string(),
            ));
        }
        Ok(())
    }

    /// Width of the per-node vector the readout sees.
    pub fn readout_width(&self) -> usize {
        if self.metric {
            2 * self.hidden
        } else {
            self.hidden
        }
    }
}

fn expected_shapes(cfg: &ModelConfig, tool_count: usize) -> Vec<(String, (usize, usize))> {
    let d = cfg.embed_dim;
    let h = cfg.hidden;
    let r = cfg.readout_width();
    let s = r + d;
    let mut shapes = vec![
        ("init/w".to_string(), (d + STATE_FEATURES, h)),
        ("init/b".to_string(), (1, h)),
    ];
    for j in 0..CHANNELS {
        shapes.push((format!("prop/w{j}"), (h, h)));
    }
    for gate in ["z", "r", "h"] {
        shapes.push((format!("gru/w{gate}"), (2 * h, h)));
        shapes.push((format!("gru/b{gate}"), (1, h)));
    }
    if cfg.metric {
        shapes.push(("metric/w1".to_string(), (d + METRIC_EXTRAS, h)));
        shapes.push(("metric/b1".to_string(), (1, h)));
        shapes.push(("metric/a1".to_string(), (1, 1)));
        shapes.push(("metric/w2".to_string(), (h, h)));
        shapes.push(("metric/b2".to_string(), (1, h)));
        shapes.push(("metric/a2".to_string(), (1, 1)));
    }
    if cfg.attention {
        shapes.push(("attn/w".to_string(), (r + d, 1)));
    }
    if cfg.late_fusion {
        shapes.push(("late/w1".to_string(), (d + s, h)));
        shapes.push(("late/b1".to_string(), (1, h)));
        shapes.push(("late/w2".to_string(), (h, 1)));
        shapes.push(("late/b2".to_string(), (1, 1)));
    } else {
        let slots = tool_count + usize::from(!cfg.no_tool_head);
        shapes.push(("head/w".to_string(), (s, slots)));
        shapes.push(("head/b".to_string(), (1, slots)));
    }
    if cfg.no_tool_head {
        shapes.push(("nt/w".to_string(), (s, 1)));
        shapes.push(("nt/b".to_string(), (1, 1)));
    }
    shapes
}

/// Fresh parameters for the configuration. Weight matrices get Xavier
/// uniform init, biases start at zero, PReLU slopes at 0.25. `tool_count`
/// sizes the fixed-width head and is ignored under `late_fusion`.
pub fn init_params(cfg: &ModelConfig, tool_count: usize) -> Result<ParamStore<f64>, ModelError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = ParamStore::new();
    for (name, (rows, cols)) in expected_shapes(cfg, tool_count) {
        let kind = name.rsplit('/').next().unwrap_or("");
        let value = if kind.starts_with('b') {
            Tensor::zeros(rows, cols)
        } else if kind.starts_with('a') {
            Tensor::from_vec(rows, cols, vec![0.25; rows * cols])
        } else {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            let data = (0..rows * cols)
                .map(|_| rng.gen_range(-limit..limit))
                .collect();
            Tensor::from_vec(rows, cols, data)
        };
        params.insert(&name, value);
    }
    Ok(params)
}

/// Verifies that `params` holds every tensor the configuration's forward
/// pass will look up, with the right shapes.
pub fn check_params(
    params: &ParamStore<f64>,
    cfg: &ModelConfig,
    tool_count: usize,
) -> Result<(), ModelError> {
    cfg.validate()?;
    for (name, shape) in expected_shapes(cfg, tool_count) {
        match params.get(&name) {
            None => return Err(ModelError::Config(format!("missing parameter {name}"))),
            Some(p) if p.value.shape() != shape => {
                return Err(ModelError::Config(format!(
                    "parameter {name} has shape {:?}, expected {:?}",
                    p.value.shape(),
                    shape
                )));
            }
            Some(_) => {}
        }
    }
    Ok(())
}

fn linear(
    tape: &mut Tape<f64>,
    x: ValueId,
    w: ValueId,
    b: ValueId,
) -> Result<ValueId, ModelError> {
    let lin = tape.matmul(x, w)?;
    Ok(tape.add(lin, b)?)
}

fn ones_column(tape: &mut Tape<f64>, n: usize) -> ValueId {
    tape.constant(Tensor::from_vec(n, 1, vec![1.0; n]))
}

/// Tape nodes of interest from one forward pass. `output` is always a row
/// of `|candidates| + 1` probabilities with the no-tool slot last; the rest
/// expose intermediate stages for inspection.
pub struct ForwardTrace {
    pub output: ValueId,
    /// The scene readout, 1 x readout-width.
    pub readout: ValueId,
    /// Attention weights over nodes (1 x n), present under `attention`.
    pub attention: Option<ValueId>,
    /// The dedicated no-tool probability (1 x 1), present under
    /// `no_tool_head`.
    pub no_tool: Option<ValueId>,
    /// Tool probabilities before no-tool mixing (1 x slots), absent only in
    /// the degenerate empty-candidate factored case.
    pub tools: Option<ValueId>,
}

/// Builds the forward pass on `tape`; see [`ForwardTrace`].
///
/// `bound` must come from a store that satisfies [`check_params`] for this
/// configuration and candidate count.
pub fn forward_trace(
    tape: &mut Tape<f64>,
    bound: &BoundParams,
    cfg: &ModelConfig,
    enc: &SceneEncoding,
) -> Result<ForwardTrace, ModelError> {
    let d = cfg.embed_dim;
    let n = enc.features.rows();
    if enc.features.cols() != d + STATE_FEATURES {
        return Err(ModelError::FeatureWidth {
            expected: d + STATE_FEATURES,
            got: enc.features.cols(),
        });
    }
    if enc.adjacency.len() != CHANNELS {
        return Err(ModelError::Config(format!(
            "expected {CHANNELS} adjacency channels, got {}",
            enc.adjacency.len()
        )));
    }

    let feats = tape.constant(enc.features.clone());
    let pre = linear(tape, feats, bound.id("init/w"), bound.id("init/b"))?;
    let mut h = tape.tanh(pre);

    let channels: Vec<ValueId> = enc
        .adjacency
        .iter()
        .map(|a| tape.constant(a.clone()))
        .collect();
    for _ in 0..cfg.steps {
        let mut x = None;
        for (j, &adj) in channels.iter().enumerate() {
            let hw = tape.matmul(h, bound.id(&format!("prop/w{j}")))?;
            let msg = tape.matmul(adj, hw)?;
            x = Some(match x {
                Some(acc) => tape.add(acc, msg)?,
                None => msg,
            });
        }
        let x = x.expect("at least one relation channel");

        let hx = tape.concat_cols(&[h, x])?;
        let z_pre = linear(tape, hx, bound.id("gru/wz"), bound.id("gru/bz"))?;
        let z = tape.sigmoid(z_pre);
        let r_pre = linear(tape, hx, bound.id("gru/wr"), bound.id("gru/br"))?;
        let r = tape.sigmoid(r_pre);
        let rh = tape.hadamard(r, h)?;
        let rhx = tape.concat_cols(&[rh, x])?;
        let cand_pre = linear(tape, rhx, bound.id("gru/wh"), bound.id("gru/bh"))?;
        let cand = tape.tanh(cand_pre);
        let keep = tape.one_minus(z);
        let kept = tape.hadamard(keep, h)?;
        let taken = tape.hadamard(z, cand)?;
        h = tape.add(kept, taken)?;
    }

    let fused = if cfg.metric {
        if enc.metric_features.cols() != d + METRIC_EXTRAS {
            return Err(ModelError::FeatureWidth {
                expected: d + METRIC_EXTRAS,
                got: enc.metric_features.cols(),
            });
        }
        let geo = tape.constant(enc.metric_features.clone());
        let m1_pre = linear(tape, geo, bound.id("metric/w1"), bound.id("metric/b1"))?;
        let m1 = tape.prelu(m1_pre, bound.id("metric/a1"))?;
        let m2_pre = linear(tape, m1, bound.id("metric/w2"), bound.id("metric/b2"))?;
        let m2 = tape.prelu(m2_pre, bound.id("metric/a2"))?;
        tape.concat_cols(&[h, m2])?
    } else {
        h
    };

    let goal_text = tape.constant(enc.goal_text.clone());
    let mut attention = None;
    let readout = if cfg.attention {
        let goal_obj = tape.constant(enc.goal_objects.clone());
        let ones = ones_column(tape, n);
        let tiled_goal = tape.matmul(ones, goal_obj)?;
        let score_in = tape.concat_cols(&[fused, tiled_goal])?;
        let scores = tape.matmul(score_in, bound.id("attn/w"))?;
        let scores_row = tape.transpose(scores);
        let weights = tape.softmax_rows(scores_row);
        attention = Some(weights);
        tape.matmul(weights, fused)?
    } else {
        let total = tape.sum_rows(fused);
        tape.affine(total, 1.0 / n as f64, 0.0)
    };
    let head_in = tape.concat_cols(&[readout, goal_text])?;

    let k = enc.candidates.len();
    let tool_probs = if cfg.late_fusion {
        // One shared scorer applied to [candidate embedding; readout; goal];
        // without the separate no-tool head the last row is the zero
        // embedding and doubles as the no-tool slot. The scorer needs its
        // hidden layer: the readout and goal columns are identical across
        // rows, so an affine map would rank candidates the same way for
        // every goal.
        let slots = k + usize::from(!cfg.no_tool_head);
        if slots == 0 {
            None
        } else {
            let mut embeds = Tensor::zeros(slots, d);
            for row in 0..k {
                for col in 0..d {
                    embeds.set(row, col, enc.candidate_embeddings.get(row, col));
                }
            }
            let embeds = tape.constant(embeds);
            let ones = ones_column(tape, slots);
            let tiled_ctx = tape.matmul(ones, head_in)?;
            let score_in = tape.concat_cols(&[embeds, tiled_ctx])?;
            let hid_pre = linear(tape, score_in, bound.id("late/w1"), bound.id("late/b1"))?;
            let hid = tape.tanh(hid_pre);
            let scores = linear(tape, hid, bound.id("late/w2"), bound.id("late/b2"))?;
            let probs_col = tape.sigmoid(scores);
            Some(tape.transpose(probs_col))
        }
    } else {
        let logits = linear(tape, head_in, bound.id("head/w"), bound.id("head/b"))?;
        Some(tape.sigmoid(logits))
    };

    let mut no_tool = None;
    let out = if cfg.no_tool_head {
        let nt_pre = linear(tape, head_in, bound.id("nt/w"), bound.id("nt/b"))?;
        let p_nt = tape.sigmoid(nt_pre);
        no_tool = Some(p_nt);
        match tool_probs {
            Some(tools) => {
                let keep = tape.one_minus(p_nt);
                let scaled = tape.scalar_mul(keep, tools)?;
                tape.concat_cols(&[scaled, p_nt])?
            }
            None => p_nt,
        }
    } else {
        tool_probs.expect("head always present without the no-tool component")
    };

    debug_assert_eq!(tape.value(out).shape(), (1, k + 1));
    Ok(ForwardTrace {
        output: out,
        readout,
        attention,
        no_tool,
        tools: tool_probs,
    })
}

/// Builds the forward pass and returns only the probability output node.
pub fn forward(
    tape: &mut Tape<f64>,
    bound: &BoundParams,
    cfg: &ModelConfig,
    enc: &SceneEncoding,
) -> Result<ValueId, ModelError> {
    Ok(forward_trace(tape, bound, cfg, enc)?.output)
}

/// Output of one model query.
#[derive(Clone, Debug)]
pub struct Prediction {
    /// Tool classes in slot order; the probability vector has one extra
    /// trailing slot for no-tool.
    pub candidates: Vec<String>,
    pub probs: Vec<f64>,
}

impl Prediction {
    pub fn no_tool_prob(&self) -> f64 {
        *self.probs.last().expect("output always has the no-tool slot")
    }

    /// Likelihood of a specific token; `None` when the token was not a
    /// candidate slot.
    pub fn prob_of(&self, token: &str) -> Option<f64> {
        if token == NO_TOOL {
            return Some(self.no_tool_prob());
        }
        self.candidates
            .iter()
            .position(|c| c == token)
            .map(|i| self.probs[i])
    }

    /// The recommended tool: highest-likelihood candidate (first slot wins
    /// ties), or no-tool when it strictly beats every tool.
    pub fn best(&self) -> &str {
        let mut best = None;
        let mut best_p = f64::NEG_INFINITY;
        for (i, &p) in self.probs[..self.candidates.len()].iter().enumerate() {
            if p > best_p {
                best_p = p;
                best = Some(i);
            }
        }
        match best {
            Some(i) if self.no_tool_prob() <= best_p => &self.candidates[i],
            _ => NO_TOOL,
        }
    }
}

/// Runs one forward pass on a fresh tape and returns the probabilities.
pub fn predict(
    params: &ParamStore<f64>,
    cfg: &ModelConfig,
    enc: &SceneEncoding,
) -> Result<Prediction, ModelError> {
    check_params(params, cfg, enc.candidates.len())?;
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape);
    let out = forward(&mut tape, &bound, cfg, enc)?;
    Ok(Prediction {
        candidates: enc.candidates.clone(),
        probs: tape.value(out).data().to_vec(),
    })
}
