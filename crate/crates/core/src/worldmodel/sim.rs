//! Symbolic action simulator.
//!
//! `apply` takes a world graph and an action and either returns the successor
//! graph or reports which precondition failed. Successors are fresh values;
//! the input graph is never mutated, so search and data generation can fan
//! out from one state freely.
//!
//! Geometry is deliberately coarse but consistent:
//! - manipulation reach is the planar distance from the agent to the target's
//!   footprint rectangle, under [`REACH_RADIUS`], plus a vertical band of
//!   [`VERTICAL_REACH`] above the agent's feet;
//! - climbing a stool or ladder raises the feet by the climbed object's
//!   height, which is how high shelves become reachable;
//! - holding a long object (any side over a meter, like a stick) stretches
//!   the push radius by that length, which is how far table centers become
//!   reachable.

use super::action::Action;
use super::graph::{ObjectNode, WorldGraph};
use super::vocab::{
    Attr, Relation, ADHESIVES, AGENT_ID, CLEANABLE, FUELS, HAMMERS, OIL_CLEANERS, SCREW_DRIVERS,
    WATER_CLEANERS,
};
use crate::error::WorldError;

/// Planar manipulation radius in meters.
pub const REACH_RADIUS: f64 = 1.0;
/// How far above the agent's feet the gripper reaches.
pub const VERTICAL_REACH: f64 = 1.4;
/// Height of a held object above the agent's feet.
pub const HOLD_HEIGHT: f64 = 0.9;
/// Margin around a fixture's footprint where the agent stands to work at it.
const APPROACH_MARGIN: f64 = 0.3;
/// Standing offset when approaching a free-standing object.
const FLOOR_APPROACH_OFFSET: f64 = 0.35;
const ROOM_MIN: f64 = 0.2;
const ROOM_MAX: f64 = 9.8;
/// A held object with a side at least this long extends the push radius.
const LONG_TOOL_MIN: f64 = 1.0;

fn fail(action: &Action, predicate: &str) -> WorldError {
    WorldError::PreconditionViolation {
        action: action.name().to_string(),
        predicate: predicate.to_string(),
    }
}

fn need<'g>(g: &'g WorldGraph, id: &str) -> Result<&'g ObjectNode, WorldError> {
    g.node(id)
        .ok_or_else(|| WorldError::UnknownObject(id.to_string()))
}

fn clamp_room(v: f64) -> f64 {
    v.clamp(ROOM_MIN, ROOM_MAX)
}

/// Nearest point on the boundary of an axis-aligned rectangle. Points
/// outside project onto the rim; points inside push out through the nearest
/// edge (ties resolved in a fixed edge order for determinism).
fn nearest_rim_point(center: [f64; 2], half: [f64; 2], p: [f64; 2]) -> [f64; 2] {
    let dx = p[0] - center[0];
    let dy = p[1] - center[1];
    let inside = dx.abs() <= half[0] && dy.abs() <= half[1];
    if !inside {
        return [
            p[0].clamp(center[0] - half[0], center[0] + half[0]),
            p[1].clamp(center[1] - half[1], center[1] + half[1]),
        ];
    }
    let to_left = half[0] + dx;
    let to_right = half[0] - dx;
    let to_bottom = half[1] + dy;
    let to_top = half[1] - dy;
    let best = to_left.min(to_right).min(to_bottom).min(to_top);
    if best == to_left {
        [center[0] - half[0], p[1]]
    } else if best == to_right {
        [center[0] + half[0], p[1]]
    } else if best == to_bottom {
        [p[0], center[1] - half[1]]
    } else {
        [p[0], center[1] + half[1]]
    }
}

/// Where the agent stands to work on `id`: beside the supporting fixture if
/// the object rests on one, otherwise a step away from the object itself.
pub fn approach_point(g: &WorldGraph, id: &str) -> [f64; 2] {
    let node = g.node(id).expect("approach target exists");
    match g.root_fixture(id) {
        Some(root_id) => {
            let root = g.node(root_id).expect("root fixture exists");
            let half = [
                root.size[0] * 0.5 + APPROACH_MARGIN,
                root.size[1] * 0.5 + APPROACH_MARGIN,
            ];
            let p = nearest_rim_point(
                [root.pos[0], root.pos[1]],
                half,
                [node.pos[0], node.pos[1]],
            );
            [clamp_room(p[0]), clamp_room(p[1])]
        }
        None => [
            clamp_room(node.pos[0] - FLOOR_APPROACH_OFFSET),
            clamp_room(node.pos[1]),
        ],
    }
}

/// Planar distance from the agent to `id`'s footprint rectangle.
pub fn clearance(g: &WorldGraph, id: &str) -> f64 {
    let agent = g.agent();
    g.node(id)
        .expect("clearance target exists")
        .footprint_distance(agent.pos[0], agent.pos[1])
}

fn vertical_ok(g: &WorldGraph, node: &ObjectNode) -> bool {
    node.pos[2] <= g.agent().pos[2] + VERTICAL_REACH
}

/// Whether the agent can manipulate `id` from where it stands.
pub fn within_reach(g: &WorldGraph, id: &str) -> bool {
    g.node(id).is_some_and(|node| {
        clearance(g, id) < REACH_RADIUS && vertical_ok(g, node)
    })
}

/// Push radius, stretched by a long held object.
pub fn push_radius(g: &WorldGraph) -> f64 {
    let bonus = g
        .held()
        .and_then(|h| g.node(h))
        .map(|n| {
            let longest = n.size[0].max(n.size[1]).max(n.size[2]);
            if longest >= LONG_TOOL_MIN {
                longest
            } else {
                0.0
            }
        })
        .unwrap_or(0.0);
    REACH_RADIUS + bonus
}

fn held_follows(g: &mut WorldGraph, agent_pos: [f64; 3]) {
    if let Some(held) = g.held().map(str::to_string) {
        let current = g.node(&held).expect("held node exists").pos;
        let target = [
            agent_pos[0],
            agent_pos[1],
            agent_pos[2] + HOLD_HEIGHT,
        ];
        g.translate_subtree(
            &held,
            [
                target[0] - current[0],
                target[1] - current[1],
                target[2] - current[2],
            ],
        );
    }
}

fn drop_supporter_edge(g: &mut WorldGraph, id: &str) {
    if let Some((rel, sup)) = g.supporter(id).map(|(r, s)| (r, s.to_string())) {
        g.remove_edge(rel, id, &sup);
    }
}

fn ungrip(g: &mut WorldGraph, obj: &str) {
    g.remove_edge(Relation::ConnectedTo, obj, AGENT_ID);
    let node = g.node_mut(obj).expect("held node exists");
    node.set_state(Attr::Grabbed, false);
}

fn is_fastened(g: &WorldGraph, id: &str) -> bool {
    g.edges()
        .any(|(r, s, d)| *r == Relation::ConnectedTo && s == id && d != AGENT_ID)
}

/// Applies one action, returning the successor state or the violated
/// precondition.
pub fn apply(g: &WorldGraph, action: &Action) -> Result<WorldGraph, WorldError> {
    let mut next = g.clone();
    match action {
        Action::MoveTo { target } => {
            let node = need(g, target)?;
            if node.id == AGENT_ID {
                return Err(fail(action, "target-is-other"));
            }
            if g.held() == Some(target.as_str()) {
                return Err(fail(action, "target-not-held"));
            }
            let dest = approach_point(g, target);
            let pos = [dest[0], dest[1], 0.0];
            drop_supporter_edge(&mut next, AGENT_ID);
            next.node_mut(AGENT_ID).unwrap().pos = pos;
            held_follows(&mut next, pos);
        }
        Action::Pick { target } => {
            let node = need(g, target)?;
            if !node.flags.movable {
                return Err(fail(action, "target-movable"));
            }
            if g.held().is_some() {
                return Err(fail(action, "gripper-free"));
            }
            if is_fastened(g, target) {
                return Err(fail(action, "target-loose"));
            }
            if g.has_edge(Relation::OnTop, AGENT_ID, target) {
                return Err(fail(action, "not-under-agent"));
            }
            if let Some((Relation::Inside, container)) = g.supporter(target) {
                let c = g.node(container).expect("container exists");
                if c.flags.can_open && !c.state(Attr::Open) {
                    return Err(fail(action, "container-open"));
                }
            }
            if clearance(g, target) >= REACH_RADIUS || !vertical_ok(g, node) {
                return Err(fail(action, "in-reach"));
            }
            drop_supporter_edge(&mut next, target);
            next.add_edge(Relation::ConnectedTo, target, AGENT_ID);
            {
                let n = next.node_mut(target).unwrap();
                n.set_state(Attr::Grabbed, true);
                n.set_state(Attr::InsideContainer, false);
            }
            let agent_pos = next.agent().pos;
            held_follows(&mut next, agent_pos);
        }
        Action::Drop { obj, dest } => {
            if g.held() != Some(obj.as_str()) {
                return Err(fail(action, "holding-object"));
            }
            let dest_node = need(g, dest)?;
            if dest_node.id == AGENT_ID {
                return Err(fail(action, "dest-is-other"));
            }
            if g.subtree(obj).iter().any(|m| m == dest) {
                return Err(fail(action, "dest-outside-load"));
            }
            let obj_size = g.node(obj).expect("held node exists").size;
            let agent = g.agent().pos;
            if dest == "floor" {
                let pos = [
                    (agent[0] + 0.3).clamp(0.1, 9.9),
                    agent[1].clamp(0.1, 9.9),
                    obj_size[2] * 0.5,
                ];
                ungrip(&mut next, obj);
                let current = next.node(obj).unwrap().pos;
                next.translate_subtree(
                    obj,
                    [pos[0] - current[0], pos[1] - current[1], pos[2] - current[2]],
                );
                next.add_edge(Relation::OnTop, obj, "floor");
            } else if dest_node.flags.container {
                if clearance(g, dest) >= REACH_RADIUS {
                    return Err(fail(action, "near-destination"));
                }
                if dest_node.flags.can_open && !dest_node.state(Attr::Open) {
                    return Err(fail(action, "container-open"));
                }
                if obj_size.iter().zip(dest_node.size).any(|(&o, d)| o > d) {
                    return Err(fail(action, "fits-inside"));
                }
                if !vertical_ok(g, dest_node) {
                    return Err(fail(action, "in-reach"));
                }
                let base = dest_node.pos[2] - dest_node.size[2] * 0.5;
                let pos = [dest_node.pos[0], dest_node.pos[1], base + obj_size[2] * 0.5];
                ungrip(&mut next, obj);
                let current = next.node(obj).unwrap().pos;
                next.translate_subtree(
                    obj,
                    [pos[0] - current[0], pos[1] - current[1], pos[2] - current[2]],
                );
                next.add_edge(Relation::Inside, obj, dest);
                next.node_mut(obj).unwrap().set_state(Attr::InsideContainer, true);
            } else if dest_node.flags.surface {
                if clearance(g, dest) >= REACH_RADIUS {
                    return Err(fail(action, "near-destination"));
                }
                if obj_size[0] > dest_node.size[0] || obj_size[1] > dest_node.size[1] {
                    return Err(fail(action, "fits-on"));
                }
                if dest_node.top() > agent[2] + VERTICAL_REACH {
                    return Err(fail(action, "in-reach"));
                }
                let half = [
                    (dest_node.size[0] - obj_size[0]).max(0.0) * 0.5,
                    (dest_node.size[1] - obj_size[1]).max(0.0) * 0.5,
                ];
                let pos = [
                    agent[0].clamp(dest_node.pos[0] - half[0], dest_node.pos[0] + half[0]),
                    agent[1].clamp(dest_node.pos[1] - half[1], dest_node.pos[1] + half[1]),
                    dest_node.top() + obj_size[2] * 0.5,
                ];
                ungrip(&mut next, obj);
                let current = next.node(obj).unwrap().pos;
                next.translate_subtree(
                    obj,
                    [pos[0] - current[0], pos[1] - current[1], pos[2] - current[2]],
                );
                next.add_edge(Relation::OnTop, obj, dest);
            } else {
                return Err(fail(action, "destination-supports"));
            }
        }
        Action::Push { obj } => {
            let node = need(g, obj)?;
            if !node.flags.movable {
                return Err(fail(action, "target-movable"));
            }
            if g.held() == Some(obj.as_str()) {
                return Err(fail(action, "target-not-held"));
            }
            if g.has_edge(Relation::OnTop, AGENT_ID, obj) {
                return Err(fail(action, "not-under-agent"));
            }
            if is_fastened(g, obj) {
                return Err(fail(action, "target-loose"));
            }
            let agent = g.agent();
            let dist_to_rect = node.footprint_distance(agent.pos[0], agent.pos[1]);
            if dist_to_rect >= push_radius(g) || !vertical_ok(g, node) {
                return Err(fail(action, "in-reach"));
            }
            let dx = agent.pos[0] - node.pos[0];
            let dy = agent.pos[1] - node.pos[1];
            let dist = (dx * dx + dy * dy).sqrt();
            if dist > 1e-9 {
                let step = (dist - 0.1).max(0.0).min(1.0);
                let mut target = [
                    node.pos[0] + dx / dist * step,
                    node.pos[1] + dy / dist * step,
                ];
                match g.supporter(obj) {
                    Some((Relation::OnTop, sup)) if sup != "floor" => {
                        let s = g.node(sup).expect("supporter exists");
                        let half = [
                            (s.size[0] - node.size[0]).max(0.0) * 0.5,
                            (s.size[1] - node.size[1]).max(0.0) * 0.5,
                        ];
                        target[0] = target[0].clamp(s.pos[0] - half[0], s.pos[0] + half[0]);
                        target[1] = target[1].clamp(s.pos[1] - half[1], s.pos[1] + half[1]);
                    }
                    _ => {
                        target[0] = target[0].clamp(0.1, 9.9);
                        target[1] = target[1].clamp(0.1, 9.9);
                    }
                }
                let delta = [target[0] - node.pos[0], target[1] - node.pos[1], 0.0];
                next.translate_subtree(obj, delta);
            }
        }
        Action::ClimbUp { target } => {
            let node = need(g, target)?;
            if !node.flags.can_climb {
                return Err(fail(action, "climbable"));
            }
            if g.agent().pos[2] > 0.0 {
                return Err(fail(action, "feet-on-floor"));
            }
            if g.held() == Some(target.as_str()) {
                return Err(fail(action, "target-not-held"));
            }
            if clearance(g, target) >= REACH_RADIUS {
                return Err(fail(action, "in-reach"));
            }
            let pos = [node.pos[0], node.pos[1], node.size[2]];
            next.add_edge(Relation::OnTop, AGENT_ID, target);
            next.node_mut(AGENT_ID).unwrap().pos = pos;
            held_follows(&mut next, pos);
        }
        Action::ClimbDown => {
            if g.agent().pos[2] <= 0.0 {
                return Err(fail(action, "climbed"));
            }
            drop_supporter_edge(&mut next, AGENT_ID);
            let mut pos = next.agent().pos;
            pos[2] = 0.0;
            next.node_mut(AGENT_ID).unwrap().pos = pos;
            held_follows(&mut next, pos);
        }
        Action::Open { target } => {
            let node = need(g, target)?;
            if !node.flags.can_open {
                return Err(fail(action, "openable"));
            }
            if node.state(Attr::Open) {
                return Err(fail(action, "closed"));
            }
            if clearance(g, target) >= REACH_RADIUS || !vertical_ok(g, node) {
                return Err(fail(action, "in-reach"));
            }
            next.node_mut(target).unwrap().set_state(Attr::Open, true);
        }
        Action::Close { target } => {
            let node = need(g, target)?;
            if !node.flags.can_open {
                return Err(fail(action, "openable"));
            }
            if !node.state(Attr::Open) {
                return Err(fail(action, "open"));
            }
            if clearance(g, target) >= REACH_RADIUS || !vertical_ok(g, node) {
                return Err(fail(action, "in-reach"));
            }
            next.node_mut(target).unwrap().set_state(Attr::Open, false);
        }
        Action::SwitchOn { target } => {
            let node = need(g, target)?;
            if !node.flags.can_operate {
                return Err(fail(action, "operable"));
            }
            if node.state(Attr::On) {
                return Err(fail(action, "off"));
            }
            if clearance(g, target) >= REACH_RADIUS || !vertical_ok(g, node) {
                return Err(fail(action, "in-reach"));
            }
            if node.class == "generator" {
                let fueled = g.edges().any(|(r, s, d)| {
                    *r == Relation::ConnectedTo
                        && d == target
                        && g.node(s).is_some_and(|n| FUELS.contains(&n.class.as_str()))
                });
                if !fueled {
                    return Err(fail(action, "fueled"));
                }
            }
            next.node_mut(target).unwrap().set_state(Attr::On, true);
        }
        Action::SwitchOff { target } => {
            let node = need(g, target)?;
            if !node.flags.can_operate {
                return Err(fail(action, "operable"));
            }
            if !node.state(Attr::On) {
                return Err(fail(action, "on"));
            }
            if clearance(g, target) >= REACH_RADIUS || !vertical_ok(g, node) {
                return Err(fail(action, "in-reach"));
            }
            next.node_mut(target).unwrap().set_state(Attr::On, false);
        }
        Action::Operate { tool } => {
            if g.held() != Some(tool.as_str()) {
                return Err(fail(action, "tool-held"));
            }
            let class = g.node(tool).expect("held node exists").class.clone();
            match class.as_str() {
                "welder" => {
                    let parts: Vec<String> = g
                        .nodes()
                        .iter()
                        .filter(|n| {
                            n.class == "spare-parts"
                                && !n.state(Attr::Welded)
                                && within_reach(g, &n.id)
                        })
                        .map(|n| n.id.clone())
                        .collect();
                    if parts.is_empty() {
                        return Err(fail(action, "workpiece-in-reach"));
                    }
                    for id in parts {
                        next.node_mut(&id).unwrap().set_state(Attr::Welded, true);
                    }
                }
                c if SCREW_DRIVERS.contains(&c) => {
                    let agent = g.agent().pos;
                    let mut screws: Vec<(&ObjectNode, f64)> = g
                        .nodes()
                        .iter()
                        .filter(|n| {
                            n.class == "screw"
                                && !n.state(Attr::Driven)
                                && is_fastened(g, &n.id)
                                && within_reach(g, &n.id)
                        })
                        .map(|n| {
                            let dx = n.pos[0] - agent[0];
                            let dy = n.pos[1] - agent[1];
                            (n, dx * dx + dy * dy)
                        })
                        .collect();
                    screws.sort_by(|a, b| {
                        a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.id.cmp(&b.0.id))
                    });
                    let Some((screw, _)) = screws.first() else {
                        return Err(fail(action, "workpiece-in-reach"));
                    };
                    let id = screw.id.clone();
                    next.node_mut(&id).unwrap().set_state(Attr::Driven, true);
                }
                "wood-cutter" => {
                    let targets: Vec<String> = g
                        .nodes()
                        .iter()
                        .filter(|n| {
                            n.class == "wood" && !n.state(Attr::Cut) && within_reach(g, &n.id)
                        })
                        .map(|n| n.id.clone())
                        .collect();
                    if targets.is_empty() {
                        return Err(fail(action, "workpiece-in-reach"));
                    }
                    for id in targets {
                        next.node_mut(&id).unwrap().set_state(Attr::Cut, true);
                    }
                }
                "3d-printer" => {
                    if g.node(tool).unwrap().state(Attr::On) {
                        return Err(fail(action, "printer-off"));
                    }
                    next.node_mut(tool).unwrap().set_state(Attr::On, true);
                }
                _ => return Err(fail(action, "operating-behavior")),
            }
        }
        Action::Clean { target } => {
            let node = need(g, target)?;
            if !CLEANABLE.contains(&node.class.as_str()) {
                return Err(fail(action, "cleanable"));
            }
            if !node.state(Attr::Dirty) {
                return Err(fail(action, "dirty"));
            }
            let Some(held) = g.held() else {
                return Err(fail(action, "holding-cleaner"));
            };
            let cleaner = g.node(held).expect("held node exists");
            if !cleaner.flags.cleaning_agent {
                return Err(fail(action, "holding-cleaner"));
            }
            let compatible = match node.class.as_str() {
                "water" => WATER_CLEANERS.contains(&cleaner.class.as_str()),
                "oil" => OIL_CLEANERS.contains(&cleaner.class.as_str()),
                _ => true,
            };
            if !compatible {
                return Err(fail(action, "cleaner-compatible"));
            }
            if cleaner.flags.can_operate && !cleaner.state(Attr::On) {
                return Err(fail(action, "cleaner-on"));
            }
            if clearance(g, target) >= REACH_RADIUS || !vertical_ok(g, node) {
                return Err(fail(action, "in-reach"));
            }
            next.node_mut(target).unwrap().set_state(Attr::Dirty, false);
        }
        Action::ReleaseOn { material, target } => {
            if g.held() != Some(material.as_str()) {
                return Err(fail(action, "material-held"));
            }
            let target_node = need(g, target)?;
            if clearance(g, target) >= REACH_RADIUS || !vertical_ok(g, target_node) {
                return Err(fail(action, "in-reach"));
            }
            let mat_class = g.node(material).expect("held node exists").class.clone();
            match mat_class.as_str() {
                c if ADHESIVES.contains(&c) => {
                    next.node_mut(target).unwrap().set_state(Attr::Sticky, true);
                }
                c if FUELS.contains(&c) && target_node.class == "generator" => {
                    let agent = g.agent().pos;
                    let rim = nearest_rim_point(
                        [target_node.pos[0], target_node.pos[1]],
                        [target_node.size[0] * 0.5, target_node.size[1] * 0.5],
                        [agent[0], agent[1]],
                    );
                    let half_h = g.node(material).unwrap().size[2] * 0.5;
                    ungrip(&mut next, material);
                    let current = next.node(material).unwrap().pos;
                    next.translate_subtree(
                        material,
                        [rim[0] - current[0], rim[1] - current[1], half_h - current[2]],
                    );
                    next.add_edge(Relation::ConnectedTo, material, target);
                }
                "spraypaint" => {
                    next.node_mut(target).unwrap().set_state(Attr::Painted, true);
                }
                "nail" | "screw" if target_node.class == "wall" => {
                    let agent = g.agent().pos;
                    let x = agent[0].clamp(
                        target_node.pos[0] - target_node.size[0] * 0.5,
                        target_node.pos[0] + target_node.size[0] * 0.5,
                    );
                    let face_off = target_node.size[1] * 0.5 + 0.02;
                    let y = if agent[1] >= target_node.pos[1] {
                        target_node.pos[1] + face_off
                    } else {
                        target_node.pos[1] - face_off
                    };
                    ungrip(&mut next, material);
                    {
                        let m = next.node_mut(material).unwrap();
                        m.pos = [x, y, 1.2];
                        m.set_state(Attr::Driven, false);
                    }
                    next.add_edge(Relation::ConnectedTo, material, target);
                }
                _ => return Err(fail(action, "release-behavior")),
            }
        }
        Action::PushUntilForce { target } => {
            let Some(held) = g.held().map(str::to_string) else {
                return Err(fail(action, "holding-object"));
            };
            if held == *target {
                return Err(fail(action, "target-is-other"));
            }
            let target_node = need(g, target)?;
            if clearance(g, target) >= REACH_RADIUS || !vertical_ok(g, target_node) {
                return Err(fail(action, "in-reach"));
            }
            let held_node = g.node(&held).expect("held node exists");
            let agent = g.agent().pos;
            if held_node.state(Attr::Sticky) {
                let pos = if target_node.class == "wall" {
                    let x = agent[0].clamp(
                        target_node.pos[0] - target_node.size[0] * 0.5,
                        target_node.pos[0] + target_node.size[0] * 0.5,
                    );
                    let face_off = target_node.size[1] * 0.5 + held_node.size[1] * 0.5;
                    let y = if agent[1] >= target_node.pos[1] {
                        target_node.pos[1] + face_off
                    } else {
                        target_node.pos[1] - face_off
                    };
                    [x, y, 1.2]
                } else {
                    let rim = nearest_rim_point(
                        [target_node.pos[0], target_node.pos[1]],
                        [target_node.size[0] * 0.5, target_node.size[1] * 0.5],
                        [agent[0], agent[1]],
                    );
                    [rim[0], rim[1], agent[2] + HOLD_HEIGHT]
                };
                ungrip(&mut next, &held);
                let current = next.node(&held).unwrap().pos;
                next.translate_subtree(
                    &held,
                    [pos[0] - current[0], pos[1] - current[1], pos[2] - current[2]],
                );
                next.add_edge(Relation::ConnectedTo, &held, target);
            } else if matches!(target_node.class.as_str(), "nail" | "screw")
                && is_fastened(g, target)
                && !target_node.state(Attr::Driven)
                && HAMMERS.contains(&held_node.class.as_str())
            {
                next.node_mut(target).unwrap().set_state(Attr::Driven, true);
            } else if held_node.class == "board" && target_node.class == "wall" {
                let anchor = g.nodes().iter().find(|n| {
                    matches!(n.class.as_str(), "nail" | "screw")
                        && n.state(Attr::Driven)
                        && g.has_edge(Relation::ConnectedTo, &n.id, target)
                        && within_reach(g, &n.id)
                });
                let Some(anchor) = anchor else {
                    return Err(fail(action, "driven-fastener"));
                };
                let face_off = target_node.size[1] * 0.5 + held_node.size[2] * 0.5;
                let y = if agent[1] >= target_node.pos[1] {
                    target_node.pos[1] + face_off
                } else {
                    target_node.pos[1] - face_off
                };
                let pos = [anchor.pos[0], y, anchor.pos[2]];
                ungrip(&mut next, &held);
                let current = next.node(&held).unwrap().pos;
                next.translate_subtree(
                    &held,
                    [pos[0] - current[0], pos[1] - current[1], pos[2] - current[2]],
                );
                next.add_edge(Relation::ConnectedTo, &held, target);
            } else {
                return Err(fail(action, "force-behavior"));
            }
        }
    }
    next.refresh_near();
    Ok(next)
}

/// Whether `apply` would succeed, without building the successor.
pub fn applicable(g: &WorldGraph, action: &Action) -> bool {
    apply(g, action).is_ok()
}

/// Syntactically sensible action candidates in a state, pruned by class
/// capabilities but not validity-checked; search filters through `apply`.
pub fn candidate_actions(g: &WorldGraph) -> Vec<Action> {
    let mut out = Vec::new();
    let held = g.held().map(str::to_string);
    let held_node = held.as_deref().and_then(|h| g.node(h));
    for node in g.nodes() {
        let id = &node.id;
        if id == AGENT_ID {
            continue;
        }
        if held.as_deref() != Some(id.as_str()) {
            out.push(Action::MoveTo { target: id.clone() });
            if node.flags.movable {
                if held.is_none() {
                    out.push(Action::Pick { target: id.clone() });
                }
                out.push(Action::Push { obj: id.clone() });
            }
        }
        if node.flags.can_climb {
            out.push(Action::ClimbUp { target: id.clone() });
        }
        if node.flags.can_open {
            if node.state(Attr::Open) {
                out.push(Action::Close { target: id.clone() });
            } else {
                out.push(Action::Open { target: id.clone() });
            }
        }
        if node.flags.can_operate {
            if node.state(Attr::On) {
                out.push(Action::SwitchOff { target: id.clone() });
            } else {
                out.push(Action::SwitchOn { target: id.clone() });
            }
        }
        if let Some(h) = held_node {
            if h.id != node.id && (node.flags.surface || node.flags.container) {
                out.push(Action::Drop { obj: h.id.clone(), dest: id.clone() });
            }
            let releasable = ADHESIVES.contains(&h.class.as_str())
                || h.class == "spraypaint"
                || (FUELS.contains(&h.class.as_str()) && node.class == "generator")
                || (matches!(h.class.as_str(), "nail" | "screw") && node.class == "wall");
            if releasable && h.id != node.id {
                out.push(Action::ReleaseOn { material: h.id.clone(), target: id.clone() });
            }
            let pressable = node.class == "wall"
                || matches!(node.class.as_str(), "nail" | "screw");
            if pressable && h.id != node.id {
                out.push(Action::PushUntilForce { target: id.clone() });
            }
        }
        if CLEANABLE.contains(&node.class.as_str())
            && node.state(Attr::Dirty)
            && held_node.is_some_and(|h| h.flags.cleaning_agent)
        {
            out.push(Action::Clean { target: id.clone() });
        }
    }
    if let Some(h) = held_node {
        if h.flags.can_operate || h.class == "wood-cutter" || h.class == "welder" {
            out.push(Action::Operate { tool: h.id.clone() });
        }
    }
    if g.agent().pos[2] > 0.0 {
        out.push(Action::ClimbDown);
    }
    out
}
