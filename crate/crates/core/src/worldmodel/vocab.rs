//! Object vocabulary for the two domains.
//!
//! Each class carries the footnote-style property flags (surface, container,
//! can-open, ...), a movability bit, a tool bit, and a default size. Tools
//! are the classes a plan may exploit to reach a goal faster; only movable
//! tools are prediction candidates.

use serde::{Deserialize, Serialize};

/// Attribute bit positions in `ObjectNode::states`. Each is one side of a
/// binary attribute pair; the cleared bit means the opposite side
/// (Free, Outside, Off, Closed, ...).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attr {
    Grabbed = 0,
    InsideContainer = 1,
    On = 2,
    Open = 3,
    Sticky = 4,
    Dirty = 5,
    Welded = 6,
    Drilled = 7,
    Driven = 8,
    Cut = 9,
    Painted = 10,
}

pub const ATTR_COUNT: usize = 11;

pub const ATTR_NAMES: [&str; ATTR_COUNT] = [
    "grabbed", "inside", "on", "open", "sticky", "dirty", "welded", "drilled", "driven", "cut",
    "painted",
];

/// Typed scene-graph relations. OnTop/Inside/ConnectedTo are directed;
/// Near is symmetric and always stored in both directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    OnTop,
    Inside,
    ConnectedTo,
    Near,
}

pub const RELATION_COUNT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Home,
    Factory,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Home => "home",
            Domain::Factory => "factory",
        }
    }

    pub fn parse(s: &str) -> Option<Domain> {
        match s {
            "home" => Some(Domain::Home),
            "factory" => Some(Domain::Factory),
            _ => None,
        }
    }
}

/// Per-class property flags, mirrored onto every instance node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFlags {
    pub tool: bool,
    pub movable: bool,
    pub surface: bool,
    pub can_open: bool,
    pub can_operate: bool,
    pub can_climb: bool,
    pub container: bool,
    pub cleaning_agent: bool,
}

/// Static description of one object class.
pub struct ClassSpec {
    pub token: &'static str,
    pub flags: ClassFlags,
    pub size: [f64; 3],
}

const fn flags(bits: [bool; 8]) -> ClassFlags {
    ClassFlags {
        tool: bits[0],
        movable: bits[1],
        surface: bits[2],
        can_open: bits[3],
        can_operate: bits[4],
        can_climb: bits[5],
        container: bits[6],
        cleaning_agent: bits[7],
    }
}

const F: bool = false;
const T: bool = true;

macro_rules! class {
    ($token:literal, [$($b:expr),*], [$x:expr, $y:expr, $z:expr]) => {
        ClassSpec { token: $token, flags: flags([$($b),*]), size: [$x, $y, $z] }
    };
}

// Flag order: tool, movable, surface, can-open, can-operate, can-climb,
// container, cleaning-agent.

/// Classes appearing in home scenes.
pub const HOME_CLASSES: &[ClassSpec] = &[
    class!("floor", [F, F, T, F, F, F, F, F], [10.0, 10.0, 0.02]),
    class!("wall", [F, F, F, F, F, F, F, F], [10.0, 0.1, 2.5]),
    class!("fridge", [F, F, T, T, F, F, T, F], [0.8, 0.8, 1.7]),
    class!("cupboard", [F, F, T, T, F, F, T, F], [1.0, 0.5, 1.8]),
    class!("table", [F, F, T, F, F, F, F, F], [1.2, 0.8, 0.7]),
    class!("big-table", [F, F, T, F, F, F, F, F], [2.6, 1.6, 0.7]),
    class!("couch", [F, F, T, F, F, F, F, F], [1.8, 0.8, 0.45]),
    class!("shelf", [F, F, T, F, F, F, F, F], [0.9, 0.3, 1.0]),
    class!("dumpster", [F, F, F, T, F, F, T, F], [1.2, 0.8, 1.0]),
    class!("door", [F, F, F, T, F, F, F, F], [0.9, 0.04, 2.0]),
    class!("light-switch", [F, F, F, F, T, F, F, F], [0.08, 0.03, 0.08]),
    class!("dirt", [F, F, F, F, F, F, F, F], [0.5, 0.5, 0.02]),
    class!("big-tray", [T, T, T, F, F, F, F, F], [0.9, 0.6, 0.08]),
    class!("tray", [T, T, T, F, F, F, F, F], [0.45, 0.3, 0.06]),
    class!("book", [T, T, T, F, F, F, F, F], [0.2, 0.15, 0.04]),
    class!("box", [T, T, F, T, F, F, T, F], [0.6, 0.6, 0.5]),
    class!("chair", [T, T, T, F, F, T, F, F], [0.45, 0.45, 0.5]),
    class!("stool", [T, T, T, F, F, T, F, F], [0.4, 0.4, 0.5]),
    class!("stick", [T, T, F, F, F, F, F, F], [1.5, 0.05, 0.05]),
    class!("glue", [T, T, F, F, F, F, F, F], [0.06, 0.06, 0.15]),
    class!("tape", [T, T, F, F, F, F, F, F], [0.1, 0.1, 0.05]),
    class!("mop", [T, T, F, F, F, F, F, T], [0.25, 0.25, 1.3]),
    class!("sponge", [T, T, F, F, F, F, F, T], [0.12, 0.08, 0.05]),
    class!("vacuum", [T, T, F, F, F, F, F, T], [0.35, 0.3, 1.1]),
    class!("paper", [F, T, T, F, F, F, F, F], [0.21, 0.3, 0.01]),
    class!("cube", [F, T, F, F, F, F, F, F], [0.12, 0.12, 0.12]),
    class!("bottle", [F, T, F, F, F, F, F, F], [0.08, 0.08, 0.25]),
    class!("apple", [F, T, F, F, F, F, F, F], [0.08, 0.08, 0.08]),
    class!("orange", [F, T, F, F, F, F, F, F], [0.075, 0.075, 0.075]),
    class!("milk-carton", [F, T, F, F, F, F, F, F], [0.1, 0.1, 0.25]),
];

/// Classes appearing in factory scenes.
pub const FACTORY_CLASSES: &[ClassSpec] = &[
    class!("floor", [F, F, T, F, F, F, F, F], [10.0, 10.0, 0.02]),
    class!("wall", [F, F, F, F, F, F, F, F], [10.0, 0.1, 2.5]),
    class!("worktable", [F, F, T, F, F, F, F, F], [2.0, 1.0, 0.7]),
    class!("long-shelf", [F, F, T, F, F, F, F, F], [1.8, 0.35, 1.0]),
    class!("platform", [F, F, T, F, F, F, F, F], [2.0, 2.0, 0.3]),
    class!("cupboard", [F, F, T, T, F, F, T, F], [1.0, 0.5, 1.8]),
    class!("generator", [F, F, F, F, T, F, F, F], [1.1, 0.8, 1.0]),
    class!("assembly-station", [F, F, T, F, F, F, F, F], [1.5, 1.0, 0.9]),
    // Ramp and lift are listed as tools but are fixed infrastructure; being
    // immovable keeps them out of the prediction candidate set.
    class!("ramp", [T, F, T, F, F, F, F, F], [2.0, 1.0, 0.5]),
    class!("lift", [T, F, T, F, F, F, F, F], [1.5, 1.5, 0.4]),
    class!("oil", [F, F, F, F, F, F, F, F], [0.6, 0.6, 0.01]),
    class!("water", [F, F, F, F, F, F, F, F], [0.6, 0.6, 0.01]),
    class!("tray", [T, T, T, F, F, F, F, F], [0.45, 0.3, 0.06]),
    class!("box", [T, T, F, T, F, F, T, F], [0.6, 0.6, 0.5]),
    class!("stick", [T, T, F, F, F, F, F, F], [1.5, 0.05, 0.05]),
    class!("drill", [T, T, F, F, T, F, F, F], [0.25, 0.08, 0.2]),
    class!("hammer", [T, T, F, F, T, F, F, F], [0.3, 0.1, 0.05]),
    class!("ladder", [T, T, F, F, F, T, F, F], [0.5, 0.4, 1.0]),
    class!("trolley", [T, T, F, T, F, F, T, F], [0.9, 0.6, 0.9]),
    class!("brick", [T, T, F, F, F, F, F, F], [0.2, 0.1, 0.08]),
    class!("blow-dryer", [T, T, F, F, T, F, F, T], [0.2, 0.08, 0.2]),
    class!("spraypaint", [T, T, F, F, T, F, F, F], [0.07, 0.07, 0.2]),
    class!("welder", [T, T, F, F, T, F, F, F], [0.4, 0.25, 0.3]),
    class!("gasoline", [T, T, F, F, F, F, F, F], [0.25, 0.15, 0.3]),
    class!("coal", [T, T, F, F, F, F, F, F], [0.3, 0.2, 0.2]),
    class!("toolbox", [T, T, F, T, F, F, T, F], [0.5, 0.3, 0.25]),
    class!("wood-cutter", [T, T, F, F, T, F, F, F], [0.5, 0.3, 0.3]),
    class!("3d-printer", [T, T, F, F, T, F, F, F], [0.5, 0.5, 0.5]),
    class!("screwdriver", [T, T, F, F, T, F, F, F], [0.25, 0.03, 0.03]),
    class!("mop", [T, T, F, F, F, F, F, T], [0.25, 0.25, 1.3]),
    class!("glue", [T, T, F, F, F, F, F, F], [0.06, 0.06, 0.15]),
    class!("tape", [T, T, F, F, F, F, F, F], [0.1, 0.1, 0.05]),
    class!("stool", [T, T, T, F, F, T, F, F], [0.4, 0.4, 0.5]),
    class!("screw", [F, T, F, F, F, F, F, F], [0.02, 0.02, 0.06]),
    class!("nail", [F, T, F, F, F, F, F, F], [0.02, 0.02, 0.08]),
    class!("wood", [F, T, F, F, F, F, F, F], [1.0, 0.2, 0.05]),
    class!("board", [F, T, F, F, F, F, F, F], [0.8, 0.6, 0.03]),
    class!("paper", [F, T, T, F, F, F, F, F], [0.21, 0.3, 0.01]),
    class!("crate", [F, T, T, F, F, F, F, F], [0.5, 0.5, 0.4]),
    class!("spare-parts", [F, T, F, F, F, F, F, F], [0.3, 0.3, 0.2]),
];

/// Classes that exist only as generalization-test substitutes; they never
/// appear in generated scenes but need flags and sizes when spliced in.
pub const SUBSTITUTE_CLASSES: &[ClassSpec] = &[
    class!("basket", [T, T, F, F, F, F, T, F], [0.5, 0.35, 0.3]),
    class!("bucket", [T, T, F, F, F, F, T, F], [0.35, 0.35, 0.4]),
    class!("container", [T, T, F, F, F, F, T, F], [0.6, 0.4, 0.4]),
    // In the factory "crate" is a goal object; spliced into a home scene it
    // acts as a carrier, so the substitute entry marks it as a tool. Domain
    // lists take precedence in lookup.
    class!("crate", [T, T, F, F, F, F, T, F], [0.5, 0.5, 0.4]),
    class!("seat", [T, T, T, F, F, T, F, F], [0.45, 0.45, 0.5]),
    class!("step-ladder", [T, T, F, F, F, T, F, F], [0.5, 0.4, 0.9]),
    class!("mallet", [T, T, F, F, T, F, F, F], [0.32, 0.12, 0.06]),
    class!("paste", [T, T, F, F, F, F, F, F], [0.07, 0.07, 0.12]),
    class!("brush", [T, T, F, F, F, F, F, T], [0.25, 0.06, 0.05]),
    class!("headphone", [F, T, F, F, F, F, F, F], [0.18, 0.16, 0.08]),
    class!("guava", [F, T, F, F, F, F, F, F], [0.07, 0.07, 0.07]),
    class!("banana", [F, T, F, F, F, F, F, F], [0.18, 0.04, 0.04]),
    class!("pillow", [F, T, F, F, F, F, F, F], [0.55, 0.45, 0.2]),
];

/// Node id of the robot in every scene.
pub const AGENT_ID: &str = "robot";

/// Goal-text words that stand for groups of object classes. Words without an
/// entry name a class directly.
pub const CATEGORY_ALIASES: &[(&str, &[&str])] = &[
    ("fruits", &["apple", "banana", "guava", "orange"]),
    ("milk", &["milk-carton"]),
    ("cubes", &["cube"]),
    ("bottles", &["bottle"]),
    ("crates", &["crate"]),
    ("pillows", &["pillow"]),
    ("parts", &["spare-parts"]),
    ("tools", &["drill", "hammer", "screwdriver"]),
    ("workbench", &["worktable"]),
    ("room", &["light-switch"]),
];

/// Adhesives usable in the stick-to-wall goals (Release on a surface makes
/// it sticky). Includes substitutes so replaced tools keep working.
pub const ADHESIVES: &[&str] = &["glue", "paste", "tape"];

/// Classes that can drive a nail by force.
pub const HAMMERS: &[&str] = &["brick", "hammer", "mallet"];

/// Classes that drive a screw when operated.
pub const SCREW_DRIVERS: &[&str] = &["drill", "screwdriver"];

/// Fuel accepted by the generator.
pub const FUELS: &[&str] = &["coal", "gasoline"];

/// Cleaning compatibility. Dirt accepts any cleaning agent; spills are
/// restricted by class.
pub const WATER_CLEANERS: &[&str] = &["blow-dryer", "mop", "sponge"];
pub const OIL_CLEANERS: &[&str] = &["mop", "sponge"];

/// Spill/patch classes whose Dirty bit models "needs cleaning".
pub const CLEANABLE: &[&str] = &["dirt", "oil", "water"];

pub fn classes_of(domain: Domain) -> &'static [ClassSpec] {
    match domain {
        Domain::Home => HOME_CLASSES,
        Domain::Factory => FACTORY_CLASSES,
    }
}

/// Looks up a class spec in the domain list, then among substitutes.
pub fn class_spec(domain: Domain, token: &str) -> Option<&'static ClassSpec> {
    classes_of(domain)
        .iter()
        .find(|c| c.token == token)
        .or_else(|| SUBSTITUTE_CLASSES.iter().find(|c| c.token == token))
}

/// The domain's prediction vocabulary: movable tool classes, sorted. The
/// fixed-width model head is laid out in exactly this order.
pub fn tool_vocabulary(domain: Domain) -> Vec<&'static str> {
    let mut tools: Vec<&'static str> = classes_of(domain)
        .iter()
        .filter(|c| c.flags.tool && c.flags.movable)
        .map(|c| c.token)
        .collect();
    tools.sort_unstable();
    tools
}

/// Expands a goal-text word to the class tokens it can refer to.
pub fn expand_token(token: &str) -> Vec<&'static str> {
    for (alias, classes) in CATEGORY_ALIASES {
        if *alias == token {
            return classes.to_vec();
        }
    }
    Vec::new()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn home_tool_vocabulary_matches_the_movable_bold_set() {
        let tools = tool_vocabulary(Domain::Home);
        assert_eq!(
            tools,
            vec![
                "big-tray", "book", "box", "chair", "glue", "mop", "sponge", "stick", "stool",
                "tape", "tray", "vacuum"
            ]
        );
    }

    #[test]
    fn factory_tool_vocabulary_excludes_fixed_infrastructure() {
        let tools = tool_vocabulary(Domain::Factory);
        assert_eq!(tools.len(), 21);
        assert!(!tools.contains(&"ramp"));
        assert!(!tools.contains(&"lift"));
        assert!(tools.contains(&"welder"));
        assert!(tools.contains(&"3d-printer"));
    }

    #[test]
    fn class_tokens_are_unique_per_domain() {
        for domain in [Domain::Home, Domain::Factory] {
            let mut seen = std::collections::BTreeSet::new();
            for c in classes_of(domain) {
                assert!(seen.insert(c.token), "duplicate class {}", c.token);
            }
        }
    }

    #[test]
    fn every_class_has_positive_size() {
        for c in HOME_CLASSES.iter().chain(FACTORY_CLASSES).chain(SUBSTITUTE_CLASSES) {
            assert!(c.size.iter().all(|&s| s > 0.0), "{} has a flat side", c.token);
        }
    }

    #[test]
    fn category_expansion_covers_goal_words() {
        assert!(expand_token("fruits").contains(&"apple"));
        assert_eq!(expand_token("milk"), vec!["milk-carton"]);
        // "weight" deliberately has no expansion: any movable object can act
        // as one, so no class is goal-mentioned.
        assert!(expand_token("weight").is_empty());
    }

    #[test]
    fn substitutes_cover_the_replacement_examples() {
        for token in ["seat", "step-ladder", "basket", "bucket", "mallet", "headphone", "guava", "pillow"] {
            assert!(
                SUBSTITUTE_CLASSES.iter().any(|c| c.token == token),
                "missing substitute {token}"
            );
        }
    }
}
