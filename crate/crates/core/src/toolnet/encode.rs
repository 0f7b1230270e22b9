//! Scene and goal encoding into the tensors the network consumes.

use std::collections::BTreeSet;

use crate::autodiff::Tensor;
use crate::embeddings::EmbeddingProvider;
use crate::worldmodel::vocab::{tool_vocabulary, Attr, Relation, ATTR_COUNT};
use crate::worldmodel::{GoalSpec, WorldGraph};
use crate::DTensor;

/// Non-embedding feature width per node: attribute bits, scaled position,
/// scaled size, and the goal-mention flag.
pub const STATE_FEATURES: usize = ATTR_COUNT + 3 + 3 + 1;

/// Metric-path feature width beyond the embedding: position and size.
pub const METRIC_EXTRAS: usize = 6;

/// Number of relation message channels: the three directed relations in
/// both directions, plus two symmetric Near channels.
pub const CHANNELS: usize = 8;

/// Everything the forward pass needs, in the graph's node order.
pub struct SceneEncoding {
    pub node_ids: Vec<String>,
    /// n x (d + STATE_FEATURES): [embedding | bits | pos/10 | size/2 | goal].
    pub features: DTensor,
    /// n x (d + METRIC_EXTRAS): [embedding | pos/10 | size/2].
    pub metric_features: DTensor,
    /// CHANNELS row-normalized adjacency matrices, n x n.
    pub adjacency: Vec<DTensor>,
    /// Bag of words over the whole goal text, 1 x d.
    pub goal_text: DTensor,
    /// Bag of words over the goal's object words only, 1 x d.
    pub goal_objects: DTensor,
    /// Candidate tool classes in head order; the final output slot after
    /// these is always the no-tool option.
    pub candidates: Vec<String>,
    /// Candidate class embeddings, |candidates| x d.
    pub candidate_embeddings: DTensor,
}

/// The candidate tool list for a scene.
///
/// The fixed-width head scores the whole domain tool vocabulary in a frozen
/// order, whether or not the instances are present. The factored head scores
/// whatever movable tool classes the scene actually contains, so its list
/// varies per scene and can absorb extra tokens supplied by an evaluator.
/// Both lists are sorted; the no-tool slot is appended downstream.
pub fn candidate_tools(g: &WorldGraph, factored: bool, extra: &[&str]) -> Vec<String> {
    if !factored {
        return tool_vocabulary(g.domain)
            .iter()
            .map(|c| c.to_string())
            .collect();
    }
    let mut set: BTreeSet<String> = g
        .nodes()
        .iter()
        .filter(|n| n.flags.tool && n.flags.movable)
        .map(|n| n.class.clone())
        .collect();
    for token in extra {
        set.insert(token.to_string());
    }
    set.into_iter().collect()
}

fn row_normalize(m: &mut DTensor) {
    for r in 0..m.rows() {
        let degree: f64 = (0..m.cols()).map(|c| m.get(r, c)).sum();
        if degree > 0.0 {
            for c in 0..m.cols() {
                let v = m.get(r, c);
                m.set(r, c, v / degree);
            }
        }
    }
}

/// Encodes one (scene, goal) pair with the given embedding provider and
/// candidate tool list (see [`candidate_tools`]).
pub fn encode_scene(
    g: &WorldGraph,
    goal: &GoalSpec,
    provider: &EmbeddingProvider,
    candidates: &[String],
) -> SceneEncoding {
    let d = provider.dim();
    let nodes = g.nodes();
    let n = nodes.len();
    let mentioned = goal.mentioned_classes();

    let mut features = Tensor::zeros(n, d + STATE_FEATURES);
    let mut metric = Tensor::zeros(n, d + METRIC_EXTRAS);
    for (i, node) in nodes.iter().enumerate() {
        let e = provider.embed(&node.class);
        for (j, &v) in e.iter().enumerate() {
            features.set(i, j, v);
            metric.set(i, j, v);
        }
        for bit in 0..ATTR_COUNT {
            if node.states & (1 << bit) != 0 {
                features.set(i, d + bit, 1.0);
            }
        }
        for k in 0..3 {
            features.set(i, d + ATTR_COUNT + k, node.pos[k] / 10.0);
            features.set(i, d + ATTR_COUNT + 3 + k, node.size[k] / 2.0);
            metric.set(i, d + k, node.pos[k] / 10.0);
            metric.set(i, d + 3 + k, node.size[k] / 2.0);
        }
        if mentioned.contains(&node.class) {
            features.set(i, d + STATE_FEATURES - 1, 1.0);
        }
    }

    let index: std::collections::BTreeMap<&str, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, node)| (node.id.as_str(), i))
        .collect();
    let mut adjacency: Vec<DTensor> = (0..CHANNELS).map(|_| Tensor::zeros(n, n)).collect();
    for (rel, src, dst) in g.edges() {
        let (s, t) = (index[src.as_str()], index[dst.as_str()]);
        match rel {
            Relation::OnTop => {
                adjacency[0].set(t, s, 1.0);
                adjacency[1].set(s, t, 1.0);
            }
            Relation::Inside => {
                adjacency[2].set(t, s, 1.0);
                adjacency[3].set(s, t, 1.0);
            }
            Relation::ConnectedTo => {
                adjacency[4].set(t, s, 1.0);
                adjacency[5].set(s, t, 1.0);
            }
            Relation::Near => {
                // Stored in both directions already; the two Near channels
                // end up identical by construction.
                adjacency[6].set(t, s, 1.0);
                adjacency[7].set(t, s, 1.0);
            }
        }
    }
    for m in &mut adjacency {
        row_normalize(m);
    }

    let goal_text = Tensor::row(&provider.bow(goal.text_tokens()));
    let goal_objects = Tensor::row(&provider.bow(goal.object_words.iter().map(String::as_str)));

    let mut candidate_embeddings = Tensor::zeros(candidates.len(), d);
    for (i, class) in candidates.iter().enumerate() {
        for (j, &v) in provider.embed(class).iter().enumerate() {
            candidate_embeddings.set(i, j, v);
        }
    }

    SceneEncoding {
        node_ids: nodes.iter().map(|node| node.id.clone()).collect(),
        features,
        metric_features: metric,
        adjacency,
        goal_text,
        goal_objects,
        candidates: candidates.to_vec(),
        candidate_embeddings,
    }
}

/// The per-node attribute bit column offset, exposed for tests.
pub fn attr_column(d: usize, attr: Attr) -> usize {
    d + attr as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{EmbeddingProvider, DEFAULT_SEED};
    use crate::worldmodel::{goal_by_id, make_scene, Domain};

    #[test]
    fn feature_layout_matches_the_documented_widths() {
        let g = make_scene(Domain::Home, 0);
        let goal = goal_by_id(Domain::Home, 1).unwrap();
        let provider = EmbeddingProvider::hash(16, DEFAULT_SEED);
        let cands = candidate_tools(&g, false, &[]);
        let enc = encode_scene(&g, &goal, &provider, &cands);
        let n = g.nodes().len();
        assert_eq!(enc.features.shape(), (n, 16 + STATE_FEATURES));
        assert_eq!(enc.metric_features.shape(), (n, 16 + METRIC_EXTRAS));
        assert_eq!(enc.adjacency.len(), CHANNELS);
        for m in &enc.adjacency {
            assert_eq!(m.shape(), (n, n));
            for r in 0..n {
                let s: f64 = (0..n).map(|c| m.get(r, c)).sum();
                assert!(s < 1.0 + 1e-9, "row sum {s}");
            }
        }
        assert_eq!(enc.goal_text.shape(), (1, 16));
        assert_eq!(
            enc.candidate_embeddings.shape(),
            (enc.candidates.len(), 16)
        );
    }

    #[test]
    fn goal_flag_marks_only_mentioned_classes() {
        let g = make_scene(Domain::Home, 0);
        let goal = goal_by_id(Domain::Home, 1).unwrap();
        let provider = EmbeddingProvider::hash(16, DEFAULT_SEED);
        let cands = candidate_tools(&g, false, &[]);
        let enc = encode_scene(&g, &goal, &provider, &cands);
        let flag_col = 16 + STATE_FEATURES - 1;
        for (i, id) in enc.node_ids.iter().enumerate() {
            let node = g.node(id).unwrap();
            let expected = matches!(node.class.as_str(), "milk-carton" | "fridge");
            assert_eq!(
                enc.features.get(i, flag_col) == 1.0,
                expected,
                "flag mismatch on {id}"
            );
        }
    }

    #[test]
    fn near_channels_are_symmetric_and_duplicated() {
        let g = make_scene(Domain::Factory, 3);
        let goal = goal_by_id(Domain::Factory, 1).unwrap();
        let provider = EmbeddingProvider::hash(8, DEFAULT_SEED);
        let cands = candidate_tools(&g, false, &[]);
        let enc = encode_scene(&g, &goal, &provider, &cands);
        let near = &enc.adjacency[6];
        assert_eq!(near, &enc.adjacency[7]);
        // Row normalization breaks matrix symmetry but not edge symmetry.
        for r in 0..near.rows() {
            for c in 0..near.cols() {
                assert_eq!(near.get(r, c) > 0.0, near.get(c, r) > 0.0);
            }
        }
    }

    #[test]
    fn dirty_bit_appears_in_features() {
        let g = make_scene(Domain::Home, 0);
        let goal = goal_by_id(Domain::Home, 3).unwrap();
        let provider = EmbeddingProvider::hash(8, DEFAULT_SEED);
        let cands = candidate_tools(&g, false, &[]);
        let enc = encode_scene(&g, &goal, &provider, &cands);
        let i = enc.node_ids.iter().position(|id| id == "dirt").unwrap();
        assert_eq!(enc.features.get(i, attr_column(8, Attr::Dirty)), 1.0);
    }

    #[test]
    fn factored_candidates_track_scene_contents() {
        let mut g = make_scene(Domain::Home, 0);
        let fixed = candidate_tools(&g, false, &[]);
        assert!(fixed.contains(&"tray".to_string()));
        assert!(fixed.windows(2).all(|w| w[0] < w[1]), "vocabulary sorted");

        let scoped = candidate_tools(&g, true, &[]);
        assert!(scoped.iter().all(|c| fixed.contains(c)));
        for id in ["stick", "mop"] {
            g.remove_node(id);
        }
        let after = candidate_tools(&g, true, &["bucket"]);
        assert!(!after.contains(&"stick".to_string()));
        assert!(!after.contains(&"mop".to_string()));
        assert!(after.contains(&"bucket".to_string()), "extras are included");
        // The fixed list never reacts to scene edits.
        assert_eq!(candidate_tools(&g, false, &[]), fixed);
    }
}
