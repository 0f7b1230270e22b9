//! Demonstration corpus: scripted teacher plans for every (goal, scene)
//! pair, plan augmentation, labels, and JSON Lines serialization.

mod augment;
mod teacher;

pub use augment::{augment_corpus, AugmentReport};
pub use teacher::{demonstrate_all, teach};

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DatasetError;
use crate::worldmodel::{
    apply, goal_by_id, make_scene, plan_cost, satisfied, Action, Domain, GoalSpec, WorldGraph,
};

/// How a corpus record came to exist.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Origin {
    /// Emitted directly by a scripted teacher.
    Teacher,
    /// A plan that succeeded on another scene, replayed here.
    CrossScene { from_seed: u64 },
    /// The teacher's scene with goal-irrelevant objects deleted.
    Removal { removed: Vec<String> },
}

/// One demonstrated plan. The scene is stored by reference: regenerate it
/// with [`record_scene`], which reapplies any removal list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoPlan {
    pub domain: Domain,
    pub goal_id: u32,
    pub scene_seed: u64,
    pub style_seed: u64,
    pub origin: Origin,
    pub actions: Vec<Action>,
    /// Classes of tool-flagged objects appearing in action arguments.
    pub tools_used: Vec<String>,
    pub sim_cost: u32,
    /// Shortest sim-cost among the records of its (goal, scene) pair; set
    /// by [`mark_optimal`], shared on ties.
    pub optimal: bool,
}

impl DemoPlan {
    pub fn goal(&self) -> GoalSpec {
        goal_by_id(self.domain, self.goal_id).expect("corpus goal ids are valid")
    }
}

/// Which part of the experiment a record belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// Scene-boundary split: every scene except the last is training data; the
/// held-out scene's records are divided equally between validation and test
/// by teacher-seed parity.
pub fn split_of(plan: &DemoPlan, held_out_seed: u64) -> Split {
    if plan.scene_seed != held_out_seed {
        Split::Train
    } else if plan.style_seed % 2 == 0 {
        Split::Val
    } else {
        Split::Test
    }
}

/// The whole demonstration set, both domains mixed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub plans: Vec<DemoPlan>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }

    pub fn domain_plans(&self, domain: Domain) -> impl Iterator<Item = &DemoPlan> {
        self.plans.iter().filter(move |p| p.domain == domain)
    }
}

/// Rebuilds the exact scene a record was demonstrated on.
pub fn record_scene(plan: &DemoPlan) -> WorldGraph {
    let mut g = make_scene(plan.domain, plan.scene_seed);
    if let Origin::Removal { removed } = &plan.origin {
        for id in removed {
            g.remove_node(id);
        }
    }
    g
}

/// Replays `actions` from `scene` and returns the final state, or the first
/// simulator rejection.
pub fn replay(
    scene: &WorldGraph,
    actions: &[Action],
) -> Result<WorldGraph, crate::error::WorldError> {
    let mut g = scene.clone();
    for a in actions {
        g = apply(&g, a)?;
    }
    Ok(g)
}

/// Classes of tool-flagged objects named in the plan's action arguments.
pub fn tools_used(scene: &WorldGraph, actions: &[Action]) -> Vec<String> {
    let mut used = BTreeSet::new();
    for a in actions {
        for arg in a.args() {
            if let Some(node) = scene.node(arg) {
                if node.flags.tool {
                    used.insert(node.class.clone());
                }
            }
        }
    }
    used.into_iter().collect()
}

/// Validates a finished plan against its scene and packages it as a record.
/// The replay check is part of construction: a plan that does not reach the
/// goal state is refused.
pub fn demo_plan(
    goal: &GoalSpec,
    scene: &WorldGraph,
    scene_seed: u64,
    style_seed: u64,
    origin: Origin,
    actions: Vec<Action>,
) -> Result<DemoPlan, DatasetError> {
    let scene_name = format!("{}-{scene_seed}", goal.domain.name());
    let end = replay(scene, &actions).map_err(|e| DatasetError::TeachingFailure {
        goal: goal.key(),
        scene: scene_name.clone(),
        reason: e.to_string(),
    })?;
    if !satisfied(&end, goal) {
        return Err(DatasetError::TeachingFailure {
            goal: goal.key(),
            scene: scene_name,
            reason: "plan ran to completion without reaching the goal state".to_string(),
        });
    }
    Ok(DemoPlan {
        domain: goal.domain,
        goal_id: goal.id,
        scene_seed,
        style_seed,
        origin,
        tools_used: tools_used(scene, &actions),
        sim_cost: plan_cost(&actions),
        actions,
        optimal: false,
    })
}

/// Sets the `optimal` flag: within each (domain, goal, scene) group the
/// records with the minimum sim-cost are optimal, ties included.
pub fn mark_optimal(plans: &mut [DemoPlan]) {
    let mut best: std::collections::BTreeMap<(Domain, u32, u64), u32> =
        std::collections::BTreeMap::new();
    for p in plans.iter() {
        best.entry((p.domain, p.goal_id, p.scene_seed))
            .and_modify(|b| *b = (*b).min(p.sim_cost))
            .or_insert(p.sim_cost);
    }
    for p in plans.iter_mut() {
        p.optimal = p.sim_cost == best[&(p.domain, p.goal_id, p.scene_seed)];
    }
}

/// Corpus generation parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub domains: Vec<Domain>,
    /// Scene seeds 0..scenes; the last one is held out for val/test.
    pub scenes: u64,
    /// Style seeds 0..teacher_seeds per (goal, scene) pair.
    pub teacher_seeds: u64,
    pub removal_seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            domains: vec![Domain::Home, Domain::Factory],
            scenes: 10,
            teacher_seeds: 8,
            removal_seed: 1,
        }
    }
}

impl CorpusConfig {
    pub fn held_out_seed(&self) -> u64 {
        self.scenes.saturating_sub(1)
    }
}

/// Runs the scripted teachers over every (domain, goal, scene, style) cell.
/// Augmentation is separate; see [`augment_corpus`].
pub fn build_corpus(cfg: &CorpusConfig) -> Result<Corpus, DatasetError> {
    let mut plans = Vec::new();
    for &domain in &cfg.domains {
        for goal in crate::worldmodel::goals(domain) {
            for scene_seed in 0..cfg.scenes {
                let scene = make_scene(domain, scene_seed);
                for style_seed in 0..cfg.teacher_seeds {
                    plans.push(teach(&goal, &scene, scene_seed, style_seed)?);
                }
            }
        }
    }
    mark_optimal(&mut plans);
    Ok(Corpus { plans })
}

/// Writes one record per line.
pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<(), DatasetError> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    for plan in &corpus.plans {
        serde_json::to_writer(&mut out, plan).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_corpus(path: &Path) -> Result<Corpus, DatasetError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut plans = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let plan = serde_json::from_str(&line).map_err(|e| DatasetError::CorpusParse {
            line: i + 1,
            reason: e.to_string(),
        })?;
        plans.push(plan);
    }
    Ok(Corpus { plans })
}

/// Multi-hot label over `candidates` plus the trailing no-tool slot: 1 for
/// every used tool, and the no-tool slot is 1 exactly when the plan used
/// none.
pub fn label_vector(plan: &DemoPlan, candidates: &[String]) -> Vec<f64> {
    let mut y = vec![0.0; candidates.len() + 1];
    for tool in &plan.tools_used {
        if let Some(i) = candidates.iter().position(|c| c == tool) {
            y[i] = 1.0;
        }
    }
    if plan.tools_used.is_empty() {
        y[candidates.len()] = 1.0;
    }
    y
}

/// Loss weight for a record: `w_opt` for optimal plans when weighting is
/// on, 1 otherwise.
pub fn alpha(plan: &DemoPlan, weighting: bool, w_opt: f64) -> f64 {
    if weighting && plan.optimal {
        w_opt
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan_stub(goal_id: u32, scene_seed: u64, style_seed: u64, cost: u32) -> DemoPlan {
        DemoPlan {
            domain: Domain::Home,
            goal_id,
            scene_seed,
            style_seed,
            origin: Origin::Teacher,
            actions: vec![],
            tools_used: vec![],
            sim_cost: cost,
            optimal: false,
        }
    }

    #[test]
    fn optimal_marks_minimum_cost_with_ties() {
        let mut plans = vec![
            plan_stub(1, 0, 0, 30),
            plan_stub(1, 0, 1, 28),
            plan_stub(1, 0, 2, 28),
            plan_stub(1, 1, 0, 40),
        ];
        mark_optimal(&mut plans);
        assert_eq!(
            plans.iter().map(|p| p.optimal).collect::<Vec<_>>(),
            vec![false, true, true, true]
        );
    }

    #[test]
    fn split_respects_scene_boundaries() {
        assert_eq!(split_of(&plan_stub(1, 3, 0, 1), 9), Split::Train);
        assert_eq!(split_of(&plan_stub(1, 9, 0, 1), 9), Split::Val);
        assert_eq!(split_of(&plan_stub(1, 9, 3, 1), 9), Split::Test);
    }

    #[test]
    fn labels_are_multi_hot_with_exclusive_no_tool() {
        let candidates: Vec<String> =
            ["stick", "tray"].iter().map(|s| s.to_string()).collect();
        let mut p = plan_stub(1, 0, 0, 10);
        p.tools_used = vec!["stick".into(), "tray".into()];
        assert_eq!(label_vector(&p, &candidates), vec![1.0, 1.0, 0.0]);
        p.tools_used.clear();
        assert_eq!(label_vector(&p, &candidates), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn weighting_off_means_unit_alpha() {
        let mut p = plan_stub(1, 0, 0, 10);
        p.optimal = true;
        assert_eq!(alpha(&p, false, 2.0), 1.0);
        assert_eq!(alpha(&p, true, 2.0), 2.0);
        p.optimal = false;
        assert_eq!(alpha(&p, true, 2.0), 1.0);
    }
}
