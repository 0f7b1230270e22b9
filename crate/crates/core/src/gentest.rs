//! Generalization test suites: five families of scene perturbations that
//! probe whether a trained predictor reads the scene or memorizes the
//! training distribution.
//!
//! Every case is built the same way: take a goal and a fresh scene, apply
//! one mutation, then let the scripted teachers re-derive which tools (or
//! bare hands) still solve the goal. Whatever they demonstrate becomes the
//! case's acceptable answer set, so the ground truth always comes from the
//! simulator and never from the mutation's intent. Cases whose mutation
//! cannot apply, or that leave no admissible answer, are skipped and
//! tallied rather than silently dropped.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{demonstrate_all, split_of, tools_used, Corpus, CorpusConfig, Split};
use crate::embeddings::{kb_cluster_of, EmbeddingProvider, KB_CLUSTERS};
use crate::error::DatasetError;
use crate::toolnet::NO_TOOL;
use crate::worldmodel::{
    class_spec, expand_token, finish_load, make_scene, Constraint, Domain, GoalSpec, Relation,
    WorldGraph, CATEGORY_ALIASES,
};

/// The five perturbation families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum CaseType {
    /// Familiar objects moved to new spots, so a memorized layout is wrong.
    #[serde(rename = "I")]
    Relocation,
    /// The habitually demonstrated tool is gone; fall back or go bare-handed.
    #[serde(rename = "II")]
    ToolAbsence,
    /// The usual tool swapped for a related class never seen in training.
    #[serde(rename = "III")]
    UnseenSubstitute,
    /// The usual tool swapped for something useless for the job.
    #[serde(rename = "IV")]
    UnrelatedSubstitute,
    /// The goal now names an object class the training goals never moved.
    #[serde(rename = "V")]
    NovelGoalObject,
}

pub const CASE_TYPES: [CaseType; 5] = [
    CaseType::Relocation,
    CaseType::ToolAbsence,
    CaseType::UnseenSubstitute,
    CaseType::UnrelatedSubstitute,
    CaseType::NovelGoalObject,
];

impl CaseType {
    /// Roman numeral used in reports and file names.
    pub fn numeral(self) -> &'static str {
        match self {
            CaseType::Relocation => "I",
            CaseType::ToolAbsence => "II",
            CaseType::UnseenSubstitute => "III",
            CaseType::UnrelatedSubstitute => "IV",
            CaseType::NovelGoalObject => "V",
        }
    }

    fn index(self) -> usize {
        CASE_TYPES.iter().position(|t| *t == self).unwrap()
    }
}

/// What was done to the base scene, recorded for inspection and debugging.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mutation {
    /// One object moved onto a different fixture (or the floor).
    Relocated { object: String, onto: String },
    /// Every instance of a class deleted; their contents land on the floor.
    RemovedTool { class: String, ids: Vec<String> },
    /// Every instance of `from` turned into a `to`; `related` says whether
    /// the replacement plausibly does the same job.
    ReplacedTool {
        from: String,
        to: String,
        ids: Vec<String>,
        related: bool,
    },
    /// Goal objects replaced by a novel class and the instruction reworded
    /// to match.
    ReplacedGoalObject {
        from: String,
        to: String,
        ids: Vec<String>,
    },
}

/// One generalization case: a perturbed scene, the goal to solve on it, and
/// the answer tokens the teachers could still demonstrate.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct GenCase {
    pub case_type: CaseType,
    pub domain: Domain,
    /// Full goal spec, inline: novel-object cases rewrite the instruction,
    /// so the goal is not always one of the fixed sixteen.
    pub goal: GoalSpec,
    pub scene_seed: u64,
    pub mutation: Mutation,
    pub scene: WorldGraph,
    /// Tokens counted as correct: tool classes, possibly [`NO_TOOL`].
    pub acceptable: Vec<String>,
}

impl GenCase {
    /// Whether a predicted token is an acceptable answer for this case.
    pub fn accepts(&self, token: &str) -> bool {
        self.acceptable.iter().any(|a| a == token)
    }
}

#[derive(Clone, Debug)]
pub struct GentestConfig {
    /// Scene seeds to perturb. Defaults to the held-out seed plus fresh
    /// seeds past the training range, so every case pairs a goal with a
    /// scene no teacher demonstration was collected on.
    pub base_scenes: Vec<u64>,
    pub seed: u64,
}

impl Default for GentestConfig {
    fn default() -> Self {
        GentestConfig { base_scenes: (9..15).collect(), seed: 11 }
    }
}

/// Per-family generation tally. `skipped` counts (goal, scene) pairs where
/// the mutation did not apply or left the goal unsolvable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TypeTally {
    pub generated: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct GentestReport {
    /// Indexed like [`CASE_TYPES`].
    pub tallies: [TypeTally; 5],
}

impl GentestReport {
    pub fn tally(&self, t: CaseType) -> TypeTally {
        self.tallies[t.index()]
    }

    pub fn total_generated(&self) -> usize {
        self.tallies.iter().map(|t| t.generated).sum()
    }
}

/// Counts how often each tool token appears in the training split's
/// demonstrations of one goal.
pub fn training_tool_histogram(
    corpus: &Corpus,
    cfg: &CorpusConfig,
    domain: Domain,
    goal_id: u32,
) -> BTreeMap<String, usize> {
    let held_out = cfg.held_out_seed();
    let mut hist = BTreeMap::new();
    for plan in &corpus.plans {
        if plan.domain != domain
            || plan.goal_id != goal_id
            || split_of(plan, held_out) != Split::Train
        {
            continue;
        }
        for tool in &plan.tools_used {
            *hist.entry(tool.clone()).or_insert(0usize) += 1;
        }
    }
    hist
}

/// Tool classes ordered by training frequency, most demonstrated first,
/// ties broken lexicographically.
pub fn tools_by_frequency(hist: &BTreeMap<String, usize>) -> Vec<String> {
    let mut order: Vec<(&String, &usize)> = hist.iter().collect();
    order.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    order.into_iter().map(|(t, _)| t.clone()).collect()
}

/// Every tool token that labels at least one training plan in the domain.
pub fn trained_tokens(corpus: &Corpus, cfg: &CorpusConfig, domain: Domain) -> BTreeSet<String> {
    let held_out = cfg.held_out_seed();
    corpus
        .plans
        .iter()
        .filter(|p| p.domain == domain && split_of(p, held_out) == Split::Train)
        .flat_map(|p| p.tools_used.iter().cloned())
        .collect()
}

/// Union of tool sets over every demonstration the teachers can still run
/// on this scene. An empty demonstration contributes [`NO_TOOL`].
pub fn acceptable_answers(goal: &GoalSpec, scene: &WorldGraph) -> Vec<String> {
    let mut out = BTreeSet::new();
    for actions in demonstrate_all(goal, scene) {
        let tools = tools_used(scene, &actions);
        if tools.is_empty() {
            out.insert(NO_TOOL.to_string());
        } else {
            out.extend(tools);
        }
    }
    out.into_iter().collect()
}

/// Generates the full suite: every family crossed with every goal and every
/// base scene, in a fixed order, from one seed.
pub fn generate_suite(
    corpus: &Corpus,
    corpus_cfg: &CorpusConfig,
    provider: &EmbeddingProvider,
    cfg: &GentestConfig,
) -> (Vec<GenCase>, GentestReport) {
    let mut cases = Vec::new();
    let mut report = GentestReport::default();
    for case_type in CASE_TYPES {
        for &domain in &corpus_cfg.domains {
            let seen = seen_classes(domain, corpus_cfg);
            for goal in crate::worldmodel::goals(domain) {
                let hist = training_tool_histogram(corpus, corpus_cfg, domain, goal.id);
                for &scene_seed in &cfg.base_scenes {
                    let base = make_scene(domain, scene_seed);
                    let mut rng = case_rng(cfg, case_type, domain, goal.id, scene_seed);
                    let built = match case_type {
                        CaseType::Relocation => relocate(&goal, &base, &hist, &mut rng),
                        CaseType::ToolAbsence => remove_tool(&goal, &base, &hist),
                        CaseType::UnseenSubstitute => {
                            substitute_unseen(&goal, &base, &hist, &seen, provider)
                        }
                        CaseType::UnrelatedSubstitute => substitute_unrelated(&goal, &base, &hist),
                        CaseType::NovelGoalObject => novel_goal_object(&goal, &base, &seen, &mut rng),
                    };
                    let tally = &mut report.tallies[case_type.index()];
                    let Some((scene, mutated_goal, mutation)) = built else {
                        tally.skipped += 1;
                        continue;
                    };
                    if scene == base || scene.check_invariants().is_err() {
                        tally.skipped += 1;
                        continue;
                    }
                    let acceptable = acceptable_answers(&mutated_goal, &scene);
                    if acceptable.is_empty() {
                        tally.skipped += 1;
                        continue;
                    }
                    tally.generated += 1;
                    cases.push(GenCase {
                        case_type,
                        domain,
                        goal: mutated_goal,
                        scene_seed,
                        mutation,
                        scene,
                        acceptable,
                    });
                }
            }
        }
    }
    (cases, report)
}

fn case_rng(
    cfg: &GentestConfig,
    case_type: CaseType,
    domain: Domain,
    goal_id: u32,
    scene_seed: u64,
) -> ChaCha8Rng {
    let tag = match domain {
        Domain::Home => 0x6765_6e74_6573_7468,
        Domain::Factory => 0x6765_6e74_6573_7466,
    };
    let mut s = cfg.seed ^ tag;
    for part in [case_type.index() as u64 + 1, u64::from(goal_id), scene_seed] {
        s = (s ^ part).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
    ChaCha8Rng::seed_from_u64(s)
}

/// Classes named by the goal, with category words expanded.
fn goal_classes(goal: &GoalSpec) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for word in &goal.object_words {
        let expanded = expand_token(word);
        if expanded.is_empty() {
            out.insert(word.clone());
        } else {
            out.extend(expanded.iter().map(|c| c.to_string()));
        }
    }
    for c in &goal.constraints {
        match c {
            Constraint::Inside { classes, container } => {
                out.extend(classes.iter().cloned());
                out.insert(container.clone());
            }
            Constraint::OnSurface { classes, surface } => {
                out.extend(classes.iter().cloned());
                out.insert(surface.clone());
            }
            Constraint::Attached { class, to } => {
                out.insert(class.clone());
                out.insert(to.clone());
            }
            Constraint::AttrSet { class, .. }
            | Constraint::AttrClear { class, .. }
            | Constraint::WeightOn { class } => {
                out.insert(class.clone());
            }
        }
    }
    out
}

/// Most demonstrated tool class that the goal text does not itself mention,
/// restricted to classes actually present in the scene.
fn preferred_present_tool(
    goal: &GoalSpec,
    scene: &WorldGraph,
    hist: &BTreeMap<String, usize>,
) -> Option<String> {
    let mentioned = goal_classes(goal);
    tools_by_frequency(hist)
        .into_iter()
        .find(|class| !mentioned.contains(class) && scene.nodes().iter().any(|n| &n.class == class))
}

fn instances_of(scene: &WorldGraph, class: &str) -> Vec<String> {
    scene
        .nodes()
        .iter()
        .filter(|n| n.class == class)
        .map(|n| n.id.clone())
        .collect()
}

/// Union of classes appearing in any training scene of the domain. Classes
/// outside this set are what "unseen" means for substitution cases.
fn seen_classes(domain: Domain, cfg: &CorpusConfig) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    for seed in 0..cfg.held_out_seed() {
        seen.extend(make_scene(domain, seed).nodes().iter().map(|n| n.class.clone()));
    }
    seen
}

/// Floor-seated height for an object of height `h`.
fn floor_z(h: f64) -> f64 {
    h * 0.5
}

/// Moves one goal object (or, for goals without movable objects, the
/// habitual tool) onto a different immovable surface.
fn relocate(
    goal: &GoalSpec,
    base: &WorldGraph,
    hist: &BTreeMap<String, usize>,
    rng: &mut ChaCha8Rng,
) -> Option<(WorldGraph, GoalSpec, Mutation)> {
    let mentioned = goal_classes(goal);
    let mut movable: Vec<String> = base
        .nodes()
        .iter()
        .filter(|n| mentioned.contains(&n.class) && n.flags.movable)
        .map(|n| n.id.clone())
        .collect();
    if movable.is_empty() {
        let class = preferred_present_tool(goal, base, hist)?;
        movable = instances_of(base, &class)
            .into_iter()
            .filter(|id| base.node(id).is_some_and(|n| n.flags.movable))
            .collect();
    }
    movable.sort();
    let object = movable.choose(rng)?.clone();
    let current = base.supporter(&object).map(|(_, s)| s.to_string());
    let mut spots: Vec<String> = base
        .nodes()
        .iter()
        .filter(|n| n.flags.surface && !n.flags.movable && Some(&n.id) != current.as_ref())
        .map(|n| n.id.clone())
        .collect();
    spots.sort();
    let onto = spots.choose(rng)?.clone();
    let mut scene = base.clone();
    let obj = scene.node(&object)?.clone();
    let target = scene.node(&onto)?.clone();
    let (x, y, z) = if onto == "floor" {
        (rng.gen_range(1.0..9.0), rng.gen_range(1.0..9.0), floor_z(obj.size[2]))
    } else {
        let hx = (target.size[0] - obj.size[0]).max(0.0) * 0.5;
        let hy = (target.size[1] - obj.size[1]).max(0.0) * 0.5;
        (
            target.pos[0] + rng.gen_range(-1.0..1.0) * hx,
            target.pos[1] + rng.gen_range(-1.0..1.0) * hy,
            target.top() + obj.size[2] * 0.5,
        )
    };
    let delta = [x - obj.pos[0], y - obj.pos[1], z - obj.pos[2]];
    if let Some((rel, sup)) = scene.supporter(&object).map(|(r, s)| (r, s.to_string())) {
        scene.remove_edge(rel, &object, &sup);
    }
    scene.translate_subtree(&object, delta);
    scene.add_edge(Relation::OnTop, &object, &onto);
    scene.refresh_near();
    Some((scene, goal.clone(), Mutation::Relocated { object, onto }))
}

/// Deletes every instance of the goal's habitual tool class. Contents of a
/// deleted container spill onto the floor where it stood.
fn remove_tool(
    goal: &GoalSpec,
    base: &WorldGraph,
    hist: &BTreeMap<String, usize>,
) -> Option<(WorldGraph, GoalSpec, Mutation)> {
    let class = preferred_present_tool(goal, base, hist)?;
    let ids = instances_of(base, &class);
    let mut scene = base.clone();
    for id in &ids {
        let riders: Vec<String> = scene.contents(id).into_iter().map(str::to_string).collect();
        for rider in riders {
            let (rel, _) = scene.supporter(&rider)?;
            scene.remove_edge(rel, &rider, id);
            let n = scene.node(&rider)?;
            let dz = floor_z(n.size[2]) - n.pos[2];
            scene.translate_subtree(&rider, [0.0, 0.0, dz]);
            scene.add_edge(Relation::OnTop, &rider, "floor");
        }
        scene.remove_node(id);
    }
    scene.refresh_near();
    Some((scene, goal.clone(), Mutation::RemovedTool { class, ids }))
}

/// Rewrites every instance of `from` into class `to`: new id, class spec
/// flags and size, re-seated on whatever supported it.
fn replace_class(
    base: &WorldGraph,
    from: &str,
    to: &str,
) -> Option<(WorldGraph, Vec<String>)> {
    let spec = class_spec(base.domain, to)?;
    let ids = instances_of(base, from);
    if ids.is_empty() {
        return None;
    }
    let mut scene = base.clone();
    let mut serial = instances_of(base, to)
        .iter()
        .filter_map(|id| id.rsplit('-').next()?.parse::<u32>().ok())
        .max()
        .unwrap_or(0);
    for old in &ids {
        serial += 1;
        let new_id = format!("{to}-{serial}");
        scene.rename_node(old, &new_id);
        let (old_h, old_z) = {
            let n = scene.node_mut(&new_id)?;
            let prior = (n.size[2], n.pos[2]);
            n.class = to.to_string();
            n.flags = spec.flags;
            n.size = spec.size;
            prior
        };
        let new_z = match scene.supporter(&new_id) {
            Some((Relation::OnTop, sup)) if sup != "floor" => {
                scene.node(sup)?.top() + spec.size[2] * 0.5
            }
            Some((Relation::Inside, sup)) => {
                let c = scene.node(sup)?;
                c.pos[2] - c.size[2] * 0.5 + spec.size[2] * 0.5
            }
            _ => floor_z(spec.size[2]),
        };
        let _ = old_h;
        scene.translate_subtree(&new_id, [0.0, 0.0, new_z - old_z]);
    }
    scene.refresh_near();
    Some((scene, ids))
}

/// Swaps the habitual tool for its nearest knowledge-base neighbour among
/// classes never instantiated in training scenes.
fn substitute_unseen(
    goal: &GoalSpec,
    base: &WorldGraph,
    hist: &BTreeMap<String, usize>,
    seen: &BTreeSet<String>,
    provider: &EmbeddingProvider,
) -> Option<(WorldGraph, GoalSpec, Mutation)> {
    let mentioned = goal_classes(goal);
    for from in tools_by_frequency(hist) {
        if mentioned.contains(&from) || instances_of(base, &from).is_empty() {
            continue;
        }
        let Some(cluster) = kb_cluster_of(&from) else { continue };
        let members = KB_CLUSTERS.iter().find(|(name, _)| *name == cluster)?.1;
        let pool: Vec<&str> = members
            .iter()
            .copied()
            .filter(|m| {
                *m != from
                    && !seen.contains(*m)
                    && class_spec(base.domain, m).is_some()
            })
            .collect();
        let Some((to, _)) = provider.rank_by_similarity(&from, pool).into_iter().next() else {
            continue;
        };
        let (scene, ids) = replace_class(base, &from, &to)?;
        let mutation = Mutation::ReplacedTool { from, to, ids, related: true };
        return Some((scene, goal.clone(), mutation));
    }
    None
}

/// Swaps the habitual tool for headphones, which help with nothing here.
fn substitute_unrelated(
    goal: &GoalSpec,
    base: &WorldGraph,
    hist: &BTreeMap<String, usize>,
) -> Option<(WorldGraph, GoalSpec, Mutation)> {
    let from = preferred_present_tool(goal, base, hist)?;
    let (scene, ids) = replace_class(base, &from, "headphone")?;
    let mutation = Mutation::ReplacedTool { from, to: "headphone".into(), ids, related: false };
    Some((scene, goal.clone(), mutation))
}

/// Classes eligible to stand in for each goal object in novel-object cases.
const NOVEL_OBJECTS: &[(&str, &[&str])] = &[
    ("apple", &["banana", "guava", "pillow"]),
    ("orange", &["banana", "guava", "pillow"]),
    ("cube", &["pillow"]),
    ("bottle", &["pillow"]),
    ("crate", &["pillow"]),
];

/// Replaces a goal object class with a novel one and rewords the goal.
fn novel_goal_object(
    goal: &GoalSpec,
    base: &WorldGraph,
    seen: &BTreeSet<String>,
    rng: &mut ChaCha8Rng,
) -> Option<(WorldGraph, GoalSpec, Mutation)> {
    let (from, to) = NOVEL_OBJECTS.iter().find_map(|(from, pool)| {
        if instances_of(base, from).is_empty() || !goal_classes(goal).contains(*from) {
            return None;
        }
        let open: Vec<&str> = pool
            .iter()
            .copied()
            .filter(|c| !seen.contains(*c) && class_spec(base.domain, c).is_some())
            .collect();
        let to = open.choose(rng)?;
        Some((from.to_string(), to.to_string()))
    })?;
    let (scene, ids) = replace_class(base, &from, &to)?;
    let rewritten = rewrite_goal(goal, &from, &to);
    let mutation = Mutation::ReplacedGoalObject { from, to, ids };
    Some((scene, rewritten, mutation))
}

/// Substitutes `to` for `from` in a goal's constraints, object words, and
/// instruction text. A category word that already covers the replacement
/// ("fruits" covers guava) stays as it is.
fn rewrite_goal(goal: &GoalSpec, from: &str, to: &str) -> GoalSpec {
    let mut out = goal.clone();
    let swap = |classes: &mut Vec<String>| {
        for c in classes.iter_mut() {
            if c == from {
                *c = to.to_string();
            }
        }
        classes.sort();
        classes.dedup();
    };
    for c in &mut out.constraints {
        match c {
            Constraint::Inside { classes, .. } | Constraint::OnSurface { classes, .. } => {
                swap(classes)
            }
            Constraint::Attached { class, .. }
            | Constraint::AttrSet { class, .. }
            | Constraint::AttrClear { class, .. }
            | Constraint::WeightOn { class } => {
                if class == from {
                    *class = to.to_string();
                }
            }
        }
    }
    for word in &mut out.object_words {
        let covers = expand_token(word);
        if !(word == from || covers.contains(&from)) || covers.contains(&to) {
            continue;
        }
        let replacement = CATEGORY_ALIASES
            .iter()
            .find(|(_, classes)| classes.contains(&to))
            .map(|(alias, _)| alias.to_string())
            .unwrap_or_else(|| to.to_string());
        out.text = out.text.replace(word.as_str(), &replacement);
        *word = replacement;
    }
    out
}

/// Writes cases as one JSON object per line.
pub fn write_cases(path: &std::path::Path, cases: &[GenCase]) -> Result<(), DatasetError> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for case in cases {
        serde_json::to_writer(&mut out, case)
            .map_err(|e| DatasetError::CorpusParse { line: 0, reason: e.to_string() })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_cases(path: &std::path::Path) -> Result<Vec<GenCase>, DatasetError> {
    use std::io::BufRead;
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut cases = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut case: GenCase = serde_json::from_str(&line)
            .map_err(|e| DatasetError::CorpusParse { line: i + 1, reason: e.to_string() })?;
        case.scene = finish_load(case.scene);
        cases.push(case);
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{augment_corpus, build_corpus};
    use crate::worldmodel::goals;

    fn small_setup() -> (Corpus, CorpusConfig, EmbeddingProvider) {
        let cfg = CorpusConfig {
            domains: vec![Domain::Home, Domain::Factory],
            scenes: 4,
            teacher_seeds: 4,
            removal_seed: 1,
        };
        let mut corpus = build_corpus(&cfg).expect("corpus builds");
        augment_corpus(&mut corpus, &cfg);
        let provider =
            EmbeddingProvider::toy_kb(crate::embeddings::DEFAULT_DIM, crate::embeddings::DEFAULT_SEED);
        (corpus, cfg, provider)
    }

    #[test]
    fn suite_covers_every_family_and_reports_honestly() {
        let (corpus, cfg, provider) = small_setup();
        let gcfg = GentestConfig { base_scenes: vec![3, 4, 5], seed: 11 };
        let (cases, report) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        assert_eq!(cases.len(), report.total_generated());
        for t in CASE_TYPES {
            let tally = report.tally(t);
            assert!(tally.generated > 0, "no cases of type {}", t.numeral());
            let budget = 2 * 8 * gcfg.base_scenes.len();
            assert_eq!(tally.generated + tally.skipped, budget);
        }
        for case in &cases {
            assert!(!case.acceptable.is_empty());
            assert!(case.scene.check_invariants().is_ok());
            assert_ne!(case.scene, make_scene(case.domain, case.scene_seed));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let (corpus, cfg, provider) = small_setup();
        let gcfg = GentestConfig { base_scenes: vec![3, 4], seed: 7 };
        let (a, ra) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        let (b, rb) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        assert_eq!(ra.tallies, rb.tallies);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn absence_cases_lack_the_removed_class() {
        let (corpus, cfg, provider) = small_setup();
        let gcfg = GentestConfig { base_scenes: vec![3, 4, 5], seed: 11 };
        let (cases, _) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        let mut saw_bare_hands_fallback = false;
        for case in cases.iter().filter(|c| c.case_type == CaseType::ToolAbsence) {
            let Mutation::RemovedTool { class, ids } = &case.mutation else {
                panic!("absence case carries the wrong mutation kind");
            };
            assert!(case.scene.nodes().iter().all(|n| &n.class != class));
            for id in ids {
                assert!(!case.scene.contains(id));
            }
            assert!(!case.accepts(class));
            saw_bare_hands_fallback |= case.acceptable == [NO_TOOL];
        }
        assert!(saw_bare_hands_fallback, "expected at least one hands-only fallback case");
    }

    #[test]
    fn unseen_substitutes_are_absent_from_training_scenes() {
        let (corpus, cfg, provider) = small_setup();
        let gcfg = GentestConfig { base_scenes: vec![3, 4, 5], seed: 11 };
        let (cases, _) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        let subs: Vec<&GenCase> =
            cases.iter().filter(|c| c.case_type == CaseType::UnseenSubstitute).collect();
        assert!(!subs.is_empty());
        for case in subs {
            let Mutation::ReplacedTool { from, to, related, .. } = &case.mutation else {
                panic!("substitution case carries the wrong mutation kind");
            };
            assert!(related);
            assert_eq!(kb_cluster_of(from), kb_cluster_of(to), "{from} vs {to}");
            let seen = seen_classes(case.domain, &cfg);
            assert!(!seen.contains(to), "{to} appears in training scenes");
            assert!(case.scene.nodes().iter().any(|n| &n.class == to));
            assert!(case.scene.nodes().iter().all(|n| &n.class != from));
        }
    }

    #[test]
    fn unrelated_substitutes_never_count_as_answers() {
        let (corpus, cfg, provider) = small_setup();
        let gcfg = GentestConfig { base_scenes: vec![3, 4, 5], seed: 11 };
        let (cases, _) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        let mut n = 0;
        for case in cases.iter().filter(|c| c.case_type == CaseType::UnrelatedSubstitute) {
            n += 1;
            let Mutation::ReplacedTool { to, related, .. } = &case.mutation else {
                panic!("substitution case carries the wrong mutation kind");
            };
            assert!(!related);
            assert_eq!(to, "headphone");
            assert!(!case.accepts("headphone"));
        }
        assert!(n > 0);
    }

    #[test]
    fn novel_goal_objects_rewrite_instruction_and_constraints() {
        let (corpus, cfg, provider) = small_setup();
        let gcfg = GentestConfig { base_scenes: vec![3, 4, 5], seed: 11 };
        let (cases, _) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        let novel: Vec<&GenCase> =
            cases.iter().filter(|c| c.case_type == CaseType::NovelGoalObject).collect();
        assert!(!novel.is_empty());
        for case in novel {
            let Mutation::ReplacedGoalObject { from, to, .. } = &case.mutation else {
                panic!("novel-object case carries the wrong mutation kind");
            };
            let mut placed = BTreeSet::new();
            for c in &case.goal.constraints {
                if let Constraint::Inside { classes, .. } | Constraint::OnSurface { classes, .. } =
                    c
                {
                    placed.extend(classes.iter().cloned());
                }
            }
            assert!(placed.contains(to), "rewritten constraints never name {to}");
            assert!(!placed.contains(from), "rewritten constraints still name {from}");
            assert!(goal_classes(&case.goal).contains(to), "goal words do not cover {to}");
            assert!(case.scene.nodes().iter().any(|n| &n.class == to));
            assert!(case.scene.nodes().iter().all(|n| &n.class != from));
            let end = crate::dataset::replay(
                &case.scene,
                &demonstrate_all(&case.goal, &case.scene)[0],
            )
            .expect("demonstration replays");
            assert!(crate::worldmodel::satisfied(&end, &case.goal));
        }
    }

    #[test]
    fn relocation_moves_exactly_one_object() {
        let (corpus, cfg, provider) = small_setup();
        let gcfg = GentestConfig { base_scenes: vec![3, 4], seed: 11 };
        let (cases, _) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        for case in cases.iter().filter(|c| c.case_type == CaseType::Relocation) {
            let Mutation::Relocated { object, onto } = &case.mutation else {
                panic!("relocation case carries the wrong mutation kind");
            };
            let base = make_scene(case.domain, case.scene_seed);
            assert!(case.scene.has_edge(Relation::OnTop, object, onto));
            let moved = case.scene.node(object).unwrap();
            let before = base.node(object).unwrap();
            assert!(moved.pos != before.pos);
            assert_eq!(case.scene.nodes().len(), base.nodes().len());
        }
    }

    #[test]
    fn cases_round_trip_through_files() {
        let (corpus, cfg, provider) = small_setup();
        let gcfg = GentestConfig { base_scenes: vec![3], seed: 11 };
        let (cases, _) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        let dir = std::env::temp_dir().join("gentest-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cases.jsonl");
        write_cases(&path, &cases).unwrap();
        let back = read_cases(&path).unwrap();
        assert_eq!(back.len(), cases.len());
        for (a, b) in cases.iter().zip(&back) {
            assert_eq!(a.scene, b.scene);
            assert_eq!(a.acceptable, b.acceptable);
            assert_eq!(a.goal, b.goal);
            assert!(b.scene.node("agent").is_some() || !b.scene.nodes().is_empty());
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn histogram_orders_by_frequency_then_name() {
        let mut hist = BTreeMap::new();
        hist.insert("tray".to_string(), 5);
        hist.insert("box".to_string(), 9);
        hist.insert("big-tray".to_string(), 5);
        assert_eq!(tools_by_frequency(&hist), ["box", "big-tray", "tray"]);
    }

    #[test]
    fn every_goal_yields_a_case_somewhere() {
        let (corpus, cfg, provider) = small_setup();
        let gcfg = GentestConfig { base_scenes: vec![3, 4, 5, 6], seed: 11 };
        let (cases, _) = generate_suite(&corpus, &cfg, &provider, &gcfg);
        for domain in [Domain::Home, Domain::Factory] {
            for goal in goals(domain) {
                let n = cases
                    .iter()
                    .filter(|c| c.domain == domain && c.goal.id == goal.id)
                    .count();
                assert!(n > 0, "{}-{} produced no cases at all", domain.name(), goal.id);
            }
        }
    }
}
