//! Goal catalogue and satisfaction checking.
//!
//! Each domain has eight fixed goals given as short natural-language strings.
//! The words that name objects are listed separately: they drive the
//! per-node goal flag in model features, so the encoder can tell a box the
//! instruction asks about from a box that merely sits in the room.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::graph::WorldGraph;
use super::vocab::{class_spec, expand_token, Attr, Domain, Relation, AGENT_ID};

/// One checkable condition over a world graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Constraint {
    /// Every instance of one of `classes` sits in a container of
    /// `container` class (possibly riding a carrier that sits inside).
    Inside { classes: Vec<String>, container: String },
    /// Every instance of one of `classes` rests on a `surface` instance,
    /// directly or through a stack.
    OnSurface { classes: Vec<String>, surface: String },
    /// Every instance of `class` is fastened to a `to` instance.
    Attached { class: String, to: String },
    /// Every instance of `class` has the attribute bit set.
    AttrSet { class: String, attr: Attr },
    /// No instance of `class` has the attribute bit set.
    AttrClear { class: String, attr: Attr },
    /// Every instance of `class` has some movable object resting on it.
    WeightOn { class: String },
}

/// A goal: instruction text plus the formal conditions that decide success.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub domain: Domain,
    pub id: u32,
    pub text: String,
    /// The words in `text` that name objects (possibly category words).
    pub object_words: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl GoalSpec {
    /// Stable identifier used in file names and reports.
    pub fn key(&self) -> String {
        format!("{}-{}", self.domain.name(), self.id)
    }

    pub fn text_tokens(&self) -> Vec<&str> {
        self.text.split_whitespace().collect()
    }

    /// Classes the goal text refers to, with category words expanded.
    pub fn mentioned_classes(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for word in &self.object_words {
            let expanded = expand_token(word);
            if expanded.is_empty() {
                if class_spec(self.domain, word).is_some() {
                    out.insert(word.clone());
                }
            } else {
                out.extend(expanded.iter().map(|c| c.to_string()));
            }
        }
        out
    }
}

fn strings(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

fn goal(
    domain: Domain,
    id: u32,
    text: &str,
    object_words: &[&str],
    constraints: Vec<Constraint>,
) -> GoalSpec {
    GoalSpec {
        domain,
        id,
        text: text.to_string(),
        object_words: strings(object_words),
        constraints,
    }
}

/// The eight goals of a domain, in id order.
pub fn goals(domain: Domain) -> Vec<GoalSpec> {
    use Constraint::*;
    match domain {
        Domain::Home => vec![
            goal(
                domain,
                1,
                "place milk in fridge",
                &["milk", "fridge"],
                vec![Inside {
                    classes: strings(&["milk-carton"]),
                    container: "fridge".into(),
                }],
            ),
            goal(
                domain,
                2,
                "put fruits in cupboard",
                &["fruits", "cupboard"],
                vec![Inside {
                    classes: strings(&["apple", "banana", "guava", "orange"]),
                    container: "cupboard".into(),
                }],
            ),
            goal(
                domain,
                3,
                "remove dirt from floor",
                &["dirt", "floor"],
                vec![AttrClear { class: "dirt".into(), attr: Attr::Dirty }],
            ),
            goal(
                domain,
                4,
                "stick paper to wall",
                &["paper", "wall"],
                vec![Attached { class: "paper".into(), to: "wall".into() }],
            ),
            goal(
                domain,
                5,
                "put cubes in box",
                &["cubes", "box"],
                vec![Inside { classes: strings(&["cube"]), container: "box".into() }],
            ),
            goal(
                domain,
                6,
                "place bottles in dumpster",
                &["bottles", "dumpster"],
                vec![Inside {
                    classes: strings(&["bottle"]),
                    container: "dumpster".into(),
                }],
            ),
            goal(
                domain,
                7,
                "place a weight on paper",
                &["weight", "paper"],
                vec![WeightOn { class: "paper".into() }],
            ),
            goal(
                domain,
                8,
                "illuminate the room",
                &["room"],
                vec![AttrSet { class: "light-switch".into(), attr: Attr::On }],
            ),
        ],
        Domain::Factory => vec![
            goal(
                domain,
                1,
                "stack crates on platform",
                &["crates", "platform"],
                vec![OnSurface {
                    classes: strings(&["crate"]),
                    surface: "platform".into(),
                }],
            ),
            goal(
                domain,
                2,
                "stick paper to wall",
                &["paper", "wall"],
                vec![Attached { class: "paper".into(), to: "wall".into() }],
            ),
            goal(
                domain,
                3,
                "fix board on wall",
                &["board", "wall"],
                vec![Attached { class: "board".into(), to: "wall".into() }],
            ),
            goal(
                domain,
                4,
                "turning the generator on",
                &["generator"],
                vec![AttrSet { class: "generator".into(), attr: Attr::On }],
            ),
            goal(
                domain,
                5,
                "assemble and paint parts",
                &["parts"],
                vec![
                    AttrSet { class: "spare-parts".into(), attr: Attr::Welded },
                    AttrSet { class: "spare-parts".into(), attr: Attr::Painted },
                ],
            ),
            goal(
                domain,
                6,
                "move tools to workbench",
                &["tools", "workbench"],
                vec![OnSurface {
                    classes: strings(&["drill", "hammer", "screwdriver"]),
                    surface: "worktable".into(),
                }],
            ),
            goal(
                domain,
                7,
                "clean the water spill",
                &["water"],
                vec![AttrClear { class: "water".into(), attr: Attr::Dirty }],
            ),
            goal(
                domain,
                8,
                "clean the oil spill",
                &["oil"],
                vec![AttrClear { class: "oil".into(), attr: Attr::Dirty }],
            ),
        ],
    }
}

pub fn goal_by_id(domain: Domain, id: u32) -> Option<GoalSpec> {
    goals(domain).into_iter().find(|g| g.id == id)
}

fn one_constraint(g: &WorldGraph, c: &Constraint) -> bool {
    match c {
        Constraint::Inside { classes, container } => g
            .nodes()
            .iter()
            .filter(|n| classes.contains(&n.class))
            .all(|n| {
                g.nodes()
                    .iter()
                    .filter(|d| &d.class == container)
                    .any(|d| g.within(&n.id, &d.id))
            }),
        Constraint::OnSurface { classes, surface } => g
            .nodes()
            .iter()
            .filter(|n| classes.contains(&n.class))
            .all(|n| {
                g.nodes()
                    .iter()
                    .filter(|d| &d.class == surface)
                    .any(|d| g.rests_on(&n.id, &d.id))
            }),
        Constraint::Attached { class, to } => g
            .nodes()
            .iter()
            .filter(|n| &n.class == class)
            .all(|n| {
                g.nodes().iter().filter(|d| &d.class == to).any(|d| {
                    g.has_edge(Relation::ConnectedTo, &n.id, &d.id)
                })
            }),
        Constraint::AttrSet { class, attr } => g
            .nodes()
            .iter()
            .filter(|n| &n.class == class)
            .all(|n| n.state(*attr)),
        Constraint::AttrClear { class, attr } => g
            .nodes()
            .iter()
            .filter(|n| &n.class == class)
            .all(|n| !n.state(*attr)),
        Constraint::WeightOn { class } => g
            .nodes()
            .iter()
            .filter(|n| &n.class == class)
            .all(|n| {
                g.nodes()
                    .iter()
                    .filter(|m| m.flags.movable && m.id != AGENT_ID)
                    .any(|m| g.rests_on(&m.id, &n.id))
            }),
    }
}

/// Whether all of the goal's conditions hold. Conditions quantify over the
/// instances actually present, so a constraint over an absent class is
/// vacuously true; scene generation guarantees the relevant instances exist.
pub fn satisfied(g: &WorldGraph, goal: &GoalSpec) -> bool {
    goal.constraints.iter().all(|c| one_constraint(g, c))
}
