//! Corpus growth without new teaching: replaying training plans across
//! sibling scenes, and re-validating them on scenes with irrelevant
//! objects deleted. Both only ever touch training scenes; the held-out
//! scene stays untouched.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serde::{Deserialize, Serialize};

use super::{demo_plan, Corpus, CorpusConfig, DemoPlan, Origin};
use crate::worldmodel::{make_scene, Domain, AGENT_ID};

/// Maximum objects deleted per removal record.
const MAX_REMOVED: usize = 5;

/// How many augmentation candidates were tried and kept, per strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentReport {
    pub cross_attempted: usize,
    pub cross_accepted: usize,
    pub removal_attempted: usize,
    pub removal_accepted: usize,
}

/// Extends the corpus in place with both augmentations, then refreshes the
/// optimality marks over the merged set.
pub fn augment_corpus(corpus: &mut Corpus, cfg: &CorpusConfig) -> AugmentReport {
    let mut report = AugmentReport::default();
    let held_out = cfg.held_out_seed();
    let teacher_plans: Vec<DemoPlan> = corpus
        .plans
        .iter()
        .filter(|p| p.origin == Origin::Teacher && p.scene_seed != held_out)
        .cloned()
        .collect();

    let mut grown = Vec::new();
    for plan in &teacher_plans {
        grown.extend(cross_scene(plan, cfg, &mut report));
        grown.extend(removal(plan, cfg, &mut report));
    }
    corpus.plans.extend(grown);
    corpus.plans.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    super::mark_optimal(&mut corpus.plans);
    report
}

fn sort_key(p: &DemoPlan) -> (Domain, u32, u64, u64, u8, u64) {
    let (origin_rank, origin_seed) = match &p.origin {
        Origin::Teacher => (0, 0),
        Origin::CrossScene { from_seed } => (1, *from_seed),
        Origin::Removal { .. } => (2, 0),
    };
    (p.domain, p.goal_id, p.scene_seed, p.style_seed, origin_rank, origin_seed)
}

/// Replays one teacher plan on every other training scene of its domain
/// and goal, keeping the copies that still reach the goal.
fn cross_scene(
    plan: &DemoPlan,
    cfg: &CorpusConfig,
    report: &mut AugmentReport,
) -> Vec<DemoPlan> {
    let goal = plan.goal();
    let mut out = Vec::new();
    for scene_seed in 0..cfg.held_out_seed() {
        if scene_seed == plan.scene_seed {
            continue;
        }
        report.cross_attempted += 1;
        let scene = make_scene(plan.domain, scene_seed);
        let replayed = demo_plan(
            &goal,
            &scene,
            scene_seed,
            plan.style_seed,
            Origin::CrossScene { from_seed: plan.scene_seed },
            plan.actions.clone(),
        );
        if let Ok(p) = replayed {
            report.cross_accepted += 1;
            out.push(p);
        }
    }
    out
}

/// Deletes a few objects the plan never touches and the goal never names,
/// then re-validates the plan on the thinned scene.
fn removal(plan: &DemoPlan, cfg: &CorpusConfig, report: &mut AugmentReport) -> Vec<DemoPlan> {
    let goal = plan.goal();
    let scene = make_scene(plan.domain, plan.scene_seed);
    let mentioned = goal.mentioned_classes();
    let touched: std::collections::BTreeSet<&str> =
        plan.actions.iter().flat_map(|a| a.args()).collect();
    let candidates: Vec<String> = scene
        .nodes()
        .iter()
        .filter(|n| {
            n.id != AGENT_ID
                && n.class != "floor"
                && !mentioned.contains(&n.class)
                && !touched.contains(n.id.as_str())
        })
        .map(|n| n.id.clone())
        .collect();
    if candidates.is_empty() {
        return Vec::new();
    }
    report.removal_attempted += 1;

    let mut rng = removal_rng(plan, cfg.removal_seed);
    let k = rng.gen_range(1..=MAX_REMOVED.min(candidates.len()));
    let mut removed: Vec<String> =
        candidates.choose_multiple(&mut rng, k).cloned().collect();
    removed.sort();

    let mut thinned = scene;
    for id in &removed {
        thinned.remove_node(id);
    }
    let replayed = demo_plan(
        &goal,
        &thinned,
        plan.scene_seed,
        plan.style_seed,
        Origin::Removal { removed },
        plan.actions.clone(),
    );
    match replayed {
        Ok(p) => {
            report.removal_accepted += 1;
            vec![p]
        }
        Err(_) => Vec::new(),
    }
}

fn removal_rng(plan: &DemoPlan, removal_seed: u64) -> ChaCha8Rng {
    let tag = match plan.domain {
        Domain::Home => 0x7265_6d6f_7665_6800,
        Domain::Factory => 0x7265_6d6f_7665_6600,
    };
    let mut s = tag ^ u64::from(plan.goal_id);
    for part in [plan.scene_seed, plan.style_seed, removal_seed] {
        s = (s ^ part).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
    ChaCha8Rng::seed_from_u64(s)
}
