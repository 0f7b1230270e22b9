//! Object-centric world model: vocabulary, scene graphs, scene generation,
//! actions, the symbolic simulator, and goal checking.

pub mod action;
pub mod gen;
pub mod goal;
pub mod graph;
pub mod sim;
pub mod vocab;

pub use action::{plan_cost, Action};
pub use gen::make_scene;
pub use goal::{goal_by_id, goals, satisfied, Constraint, GoalSpec};
pub use graph::{agent_node, finish_load, ObjectNode, WorldGraph, NEAR_THRESHOLD};
pub use sim::{
    applicable, apply, candidate_actions, clearance, within_reach, REACH_RADIUS, VERTICAL_REACH,
};
pub use vocab::{
    class_spec, classes_of, expand_token, tool_vocabulary, Attr, ClassFlags, Domain, Relation,
    AGENT_ID, ATTR_COUNT, CATEGORY_ALIASES, RELATION_COUNT,
};
