use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::vocab::{Attr, ClassFlags, Domain, Relation, AGENT_ID};

/// Distance under which two object centers are considered Near (3-D).
pub const NEAR_THRESHOLD: f64 = 1.0;

/// One object instance (or the robot) in a scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectNode {
    pub id: String,
    pub class: String,
    /// Attribute bits, indexed by [`Attr`].
    pub states: u16,
    /// Center position in meters.
    pub pos: [f64; 3],
    /// Axis-aligned extent in meters.
    pub size: [f64; 3],
    pub flags: ClassFlags,
}

impl ObjectNode {
    pub fn state(&self, attr: Attr) -> bool {
        self.states & (1 << attr as u16) != 0
    }

    pub fn set_state(&mut self, attr: Attr, value: bool) {
        if value {
            self.states |= 1 << attr as u16;
        } else {
            self.states &= !(1 << attr as u16);
        }
    }

    /// Top face height of the object.
    pub fn top(&self) -> f64 {
        self.pos[2] + self.size[2] * 0.5
    }

    /// Distance from a point to this object's footprint rectangle in the
    /// floor plane; zero inside the footprint.
    pub fn footprint_distance(&self, x: f64, y: f64) -> f64 {
        let dx = (x - self.pos[0]).abs() - self.size[0] * 0.5;
        let dy = (y - self.pos[1]).abs() - self.size[1] * 0.5;
        let dx = dx.max(0.0);
        let dy = dy.max(0.0);
        (dx * dx + dy * dy).sqrt()
    }

    pub fn center_distance(&self, other: &ObjectNode) -> f64 {
        let dx = self.pos[0] - other.pos[0];
        let dy = self.pos[1] - other.pos[1];
        let dz = self.pos[2] - other.pos[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Object-centric scene state: nodes plus typed relation edges.
///
/// Values are immutable from the outside; the simulator produces fresh
/// successors. Edges are kept in a sorted set so iteration, serialization,
/// and hashing are deterministic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldGraph {
    pub domain: Domain,
    pub scene_seed: u64,
    nodes: Vec<ObjectNode>,
    edges: BTreeSet<(Relation, String, String)>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl WorldGraph {
    pub fn new(domain: Domain, scene_seed: u64, mut nodes: Vec<ObjectNode>) -> Self {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        let mut graph = WorldGraph {
            domain,
            scene_seed,
            nodes,
            edges: BTreeSet::new(),
            index: BTreeMap::new(),
        };
        graph.rebuild_index();
        graph
    }

    pub(crate) fn rebuild_index(&mut self) {
        self.index = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();
    }

    pub fn nodes(&self) -> &[ObjectNode] {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Option<&ObjectNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub(crate) fn node_mut(&mut self, id: &str) -> Option<&mut ObjectNode> {
        let i = *self.index.get(id)?;
        Some(&mut self.nodes[i])
    }

    pub fn agent(&self) -> &ObjectNode {
        self.node(AGENT_ID).expect("scene has no agent node")
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn edges(&self) -> impl Iterator<Item = &(Relation, String, String)> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, rel: Relation, src: &str, dst: &str) -> bool {
        self.edges
            .contains(&(rel, src.to_string(), dst.to_string()))
    }

    pub(crate) fn add_edge(&mut self, rel: Relation, src: &str, dst: &str) {
        debug_assert!(src != dst, "self edge {rel:?} on {src}");
        debug_assert!(self.contains(src) && self.contains(dst));
        self.edges.insert((rel, src.to_string(), dst.to_string()));
    }

    pub(crate) fn remove_edge(&mut self, rel: Relation, src: &str, dst: &str) {
        self.edges
            .remove(&(rel, src.to_string(), dst.to_string()));
    }

    /// Renames a node, rewriting every edge that touches it. The node list
    /// is re-sorted so serialization stays canonical. The new id must be
    /// unused.
    pub(crate) fn rename_node(&mut self, old: &str, new: &str) {
        debug_assert!(!self.contains(new), "rename target {new} already taken");
        if let Some(n) = self.node_mut(old) {
            n.id = new.to_string();
        }
        self.edges = std::mem::take(&mut self.edges)
            .into_iter()
            .map(|(r, s, d)| {
                let s = if s == old { new.to_string() } else { s };
                let d = if d == old { new.to_string() } else { d };
                (r, s, d)
            })
            .collect();
        self.nodes.sort_by(|a, b| a.id.cmp(&b.id));
        self.rebuild_index();
    }

    /// Drops all edges touching `id` and the node itself.
    pub fn remove_node(&mut self, id: &str) {
        self.edges
            .retain(|(_, s, d)| s != id && d != id);
        self.nodes.retain(|n| n.id != id);
        self.rebuild_index();
    }

    /// Destinations of `rel` edges out of `src`.
    pub fn targets(&self, rel: Relation, src: &str) -> Vec<&str> {
        self.edges
            .iter()
            .filter(|(r, s, _)| *r == rel && s == src)
            .map(|(_, _, d)| d.as_str())
            .collect()
    }

    /// Sources of `rel` edges into `dst`.
    pub fn sources(&self, rel: Relation, dst: &str) -> Vec<&str> {
        self.edges
            .iter()
            .filter(|(r, _, d)| *r == rel && d == dst)
            .map(|(_, s, _)| s.as_str())
            .collect()
    }

    /// The OnTop/Inside edge out of `id`, if any. An object rests on or in
    /// at most one thing.
    pub fn supporter(&self, id: &str) -> Option<(Relation, &str)> {
        self.edges
            .iter()
            .find(|(r, s, _)| s == id && matches!(r, Relation::OnTop | Relation::Inside))
            .map(|(r, _, d)| (*r, d.as_str()))
    }

    /// Objects resting on or in `id` (one level).
    pub fn contents(&self, id: &str) -> Vec<&str> {
        self.edges
            .iter()
            .filter(|(r, _, d)| d == id && matches!(r, Relation::OnTop | Relation::Inside))
            .map(|(_, s, _)| s.as_str())
            .collect()
    }

    /// The object currently in the gripper, if any.
    pub fn held(&self) -> Option<&str> {
        self.sources(Relation::ConnectedTo, AGENT_ID).into_iter().next()
    }

    /// `id` together with everything transitively resting on or in it.
    pub fn subtree(&self, id: &str) -> Vec<String> {
        let mut out = vec![id.to_string()];
        let mut cursor = 0;
        while cursor < out.len() {
            let current = out[cursor].clone();
            for child in self.contents(&current) {
                if !out.iter().any(|o| o == child) {
                    out.push(child.to_string());
                }
            }
            cursor += 1;
        }
        out
    }

    /// Whether `id` is inside `container` through the support chain: the
    /// chain may pass over carriers (OnTop hops), but the hop that reaches
    /// the container must be an Inside edge.
    pub fn within(&self, id: &str, container: &str) -> bool {
        let mut current = id.to_string();
        for _ in 0..self.nodes.len() {
            match self.supporter(&current) {
                Some((rel, sup)) => {
                    if sup == container {
                        return rel == Relation::Inside;
                    }
                    current = sup.to_string();
                }
                None => return false,
            }
        }
        false
    }

    /// Whether `id` rests on `surface` through any chain of OnTop/Inside
    /// hops (a crate on a crate on the platform counts).
    pub fn rests_on(&self, id: &str, surface: &str) -> bool {
        let mut current = id.to_string();
        for _ in 0..self.nodes.len() {
            match self.supporter(&current) {
                Some((_, sup)) => {
                    if sup == surface {
                        return true;
                    }
                    current = sup.to_string();
                }
                None => return false,
            }
        }
        false
    }

    /// The topmost supporter of `id` that is not the floor: the fixture
    /// whose footprint governs how the agent approaches `id`. None when the
    /// object stands on the floor (or nothing).
    pub fn root_fixture(&self, id: &str) -> Option<&str> {
        let mut current = id;
        let mut last: Option<&str> = None;
        for _ in 0..self.nodes.len() {
            match self.supporter(current) {
                Some((_, sup)) if sup != "floor" => {
                    last = Some(sup);
                    current = sup;
                }
                _ => break,
            }
        }
        last
    }

    /// Recomputes all Near edges from current positions: centers closer
    /// than [`NEAR_THRESHOLD`], stored in both directions.
    pub(crate) fn refresh_near(&mut self) {
        self.edges.retain(|(r, _, _)| *r != Relation::Near);
        let mut pairs = Vec::new();
        for i in 0..self.nodes.len() {
            for j in (i + 1)..self.nodes.len() {
                if self.nodes[i].center_distance(&self.nodes[j]) < NEAR_THRESHOLD {
                    pairs.push((self.nodes[i].id.clone(), self.nodes[j].id.clone()));
                }
            }
        }
        for (a, b) in pairs {
            self.edges.insert((Relation::Near, a.clone(), b.clone()));
            self.edges.insert((Relation::Near, b, a));
        }
    }

    /// Moves `id` and its whole subtree by a shared delta so contents track
    /// their carrier.
    pub(crate) fn translate_subtree(&mut self, id: &str, delta: [f64; 3]) {
        for member in self.subtree(id) {
            let node = self.node_mut(&member).expect("subtree member exists");
            node.pos[0] += delta[0];
            node.pos[1] += delta[1];
            node.pos[2] += delta[2];
        }
    }

    /// Structural sanity used by tests and the mutation generators.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (rel, src, dst) in &self.edges {
            if src == dst {
                return Err(format!("self edge {rel:?} on {src}"));
            }
            if !self.contains(src) || !self.contains(dst) {
                return Err(format!("dangling edge {rel:?} {src} -> {dst}"));
            }
            if *rel == Relation::Near
                && !self
                    .edges
                    .contains(&(Relation::Near, dst.clone(), src.clone()))
            {
                return Err(format!("asymmetric Near {src} -> {dst}"));
            }
        }
        for node in &self.nodes {
            if node.size.iter().any(|&s| s <= 0.0) {
                return Err(format!("{} has non-positive size", node.id));
            }
            let inside: Vec<_> = self
                .edges
                .iter()
                .filter(|(r, s, _)| *r == Relation::Inside && s == &node.id)
                .collect();
            if inside.len() > 1 {
                return Err(format!("{} is inside two containers", node.id));
            }
            let supports: Vec<_> = self
                .edges
                .iter()
                .filter(|(r, s, _)| {
                    s == &node.id && matches!(r, Relation::OnTop | Relation::Inside)
                })
                .collect();
            if supports.len() > 1 {
                return Err(format!("{} has two supporters", node.id));
            }
        }
        if !self.contains(AGENT_ID) {
            return Err("agent node missing".into());
        }
        Ok(())
    }

    /// Stable byte key of the symbolic state: relations, attribute bits, and
    /// positions quantized to a 0.5 m grid. Used by search for duplicate
    /// detection.
    pub fn state_key(&self) -> Vec<u8> {
        let mut key = Vec::new();
        for (rel, src, dst) in &self.edges {
            key.push(*rel as u8);
            key.extend_from_slice(src.as_bytes());
            key.push(0);
            key.extend_from_slice(dst.as_bytes());
            key.push(0);
        }
        key.push(0xff);
        for node in &self.nodes {
            key.extend_from_slice(node.id.as_bytes());
            key.extend_from_slice(&node.states.to_le_bytes());
            for p in node.pos {
                let q = (p * 2.0).round() as i32;
                key.extend_from_slice(&q.to_le_bytes());
            }
            key.push(0);
        }
        key
    }
}

/// Restores the id index after deserialization.
pub fn finish_load(mut graph: WorldGraph) -> WorldGraph {
    graph.rebuild_index();
    graph
}

/// The robot node every scene starts with.
pub fn agent_node(pos: [f64; 3]) -> ObjectNode {
    ObjectNode {
        id: AGENT_ID.into(),
        class: "robot".into(),
        states: 0,
        pos,
        size: [0.4, 0.4, 1.6],
        flags: ClassFlags::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldmodel::vocab::ClassFlags;

    fn node(id: &str, pos: [f64; 3]) -> ObjectNode {
        ObjectNode {
            id: id.into(),
            class: id.into(),
            states: 0,
            pos,
            size: [0.1, 0.1, 0.1],
            flags: ClassFlags::default(),
        }
    }

    fn tiny_graph() -> WorldGraph {
        let nodes = vec![
            node("robot", [0.0, 0.0, 0.0]),
            node("tray", [0.5, 0.0, 0.0]),
            node("apple", [0.5, 0.0, 0.1]),
            node("table", [5.0, 5.0, 0.35]),
        ];
        let mut g = WorldGraph::new(Domain::Home, 0, nodes);
        g.add_edge(Relation::OnTop, "apple", "tray");
        g.refresh_near();
        g
    }

    #[test]
    fn near_is_symmetric_and_threshold_based() {
        let g = tiny_graph();
        assert!(g.has_edge(Relation::Near, "robot", "tray"));
        assert!(g.has_edge(Relation::Near, "tray", "robot"));
        assert!(!g.has_edge(Relation::Near, "robot", "table"));
        g.check_invariants().unwrap();
    }

    #[test]
    fn subtree_translation_moves_contents() {
        let mut g = tiny_graph();
        g.translate_subtree("tray", [1.0, 0.0, 0.0]);
        assert_eq!(g.node("tray").unwrap().pos[0], 1.5);
        assert_eq!(g.node("apple").unwrap().pos[0], 1.5);
        assert_eq!(g.node("robot").unwrap().pos[0], 0.0);
    }

    #[test]
    fn within_requires_an_inside_hop_into_the_container() {
        let nodes = vec![
            node("robot", [0.0; 3]),
            node("apple", [1.0, 0.0, 0.2]),
            node("tray", [1.0, 0.0, 0.1]),
            node("cupboard", [1.0, 0.0, 0.9]),
        ];
        let mut g = WorldGraph::new(Domain::Home, 0, nodes);
        g.add_edge(Relation::OnTop, "apple", "tray");
        g.add_edge(Relation::Inside, "tray", "cupboard");
        assert!(g.within("apple", "cupboard"));
        assert!(g.within("tray", "cupboard"));
        // OnTop alone is not containment.
        assert!(!g.within("apple", "tray"));
        assert!(g.rests_on("apple", "cupboard"));
    }

    #[test]
    fn state_key_ignores_sub_grid_jitter_but_sees_attribute_bits() {
        let mut a = tiny_graph();
        let mut b = tiny_graph();
        b.node_mut("apple").unwrap().pos[0] += 0.1;
        assert_eq!(a.state_key(), b.state_key());
        a.node_mut("apple").unwrap().set_state(Attr::Grabbed, true);
        assert_ne!(a.state_key(), b.state_key());
    }

    #[test]
    fn serialization_round_trips() {
        let g = tiny_graph();
        let json = serde_json::to_string(&g).unwrap();
        let back = finish_load(serde_json::from_str(&json).unwrap());
        assert_eq!(g, back);
        assert!(back.node("apple").is_some());
    }

    #[test]
    fn footprint_distance_is_zero_inside_and_euclidean_outside() {
        let mut table = node("table", [5.0, 5.0, 0.35]);
        table.size = [2.0, 1.0, 0.7];
        assert_eq!(table.footprint_distance(5.0, 5.0), 0.0);
        assert_eq!(table.footprint_distance(6.5, 5.0), 0.5);
        let d = table.footprint_distance(6.3, 5.9);
        assert!((d - (0.3f64 * 0.3 + 0.4 * 0.4).sqrt()).abs() < 1e-12);
    }
}
