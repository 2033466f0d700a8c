//! Arena search tree. Decision nodes double as observation nodes: the child
//! reached through action `a` and observation `o` is the node for history
//! `h·(a,o)`.

use std::collections::HashMap;

use smallvec::SmallVec;

use crate::belief::Knowledge;
use crate::model::{ActionId, Observation, State};

pub(crate) type NodeId = u32;

pub(crate) const NO_PARENT: NodeId = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum GoalStatus {
    Unknown,
    /// `exact` is false when only particles confirmed the goal.
    Goal { exact: bool },
    NotGoal,
}

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub action: ActionId,
    pub count: u32,
    pub value: f64,
    /// Applicability was confirmed at this node.
    pub checked: bool,
    pub children: SmallVec<[(Option<Observation>, NodeId); 2]>,
}

impl Edge {
    pub fn new(action: ActionId) -> Self {
        Edge {
            action,
            count: 0,
            value: 0.0,
            checked: false,
            children: SmallVec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub parent: NodeId,
    /// Step from the parent; `None` at the root.
    pub action: Option<ActionId>,
    pub observation: Option<Observation>,
    pub known: Knowledge,
    /// Every action from the episode start to here is deterministic.
    pub deterministic: bool,
    pub count: u32,
    pub value: f64,
    pub rollouts: u32,
    pub particles: Vec<State>,
    pub goal: GoalStatus,
    pub expanded: bool,
    pub edges: Vec<Edge>,
}

impl Node {
    pub fn new(
        parent: NodeId,
        action: Option<ActionId>,
        observation: Option<Observation>,
        known: Knowledge,
        deterministic: bool,
    ) -> Self {
        Node {
            parent,
            action,
            observation,
            known,
            deterministic,
            count: 0,
            value: 0.0,
            rollouts: 0,
            particles: Vec::new(),
            goal: GoalStatus::Unknown,
            expanded: false,
            edges: Vec::new(),
        }
    }

    /// Minimum over visited edges.
    pub fn best_value(&self) -> Option<f64> {
        self.edges
            .iter()
            .filter(|e| e.count > 0)
            .map(|e| e.value)
            .min_by(|a, b| a.total_cmp(b))
    }
}

/// Cost of an action edge from its observation children as (count, value)
/// pairs: one step plus the count-weighted mean of the children. Returns the
/// value and the total count.
pub(crate) fn edge_backup(children: impl IntoIterator<Item = (u32, f64)>) -> (f64, u32) {
    let (sum, total) = children
        .into_iter()
        .fold((0.0, 0u32), |(s, t), (c, v)| (s + c as f64 * v, t + c));
    (1.0 + sum / total.max(1) as f64, total)
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn with_root(root: Node) -> Self {
        Tree { nodes: vec![root] }
    }

    pub fn add(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        (self.nodes.len() - 1) as NodeId
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    #[inline]
    pub fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id as usize]
    }

    /// Moves the subtree under `id` into a fresh arena with `id` as root.
    pub fn extract(&mut self, id: NodeId) -> Tree {
        let mut order = vec![id];
        let mut head = 0;
        while head < order.len() {
            let n = &self.nodes[order[head] as usize];
            head += 1;
            for e in &n.edges {
                order.extend(e.children.iter().map(|&(_, c)| c));
            }
        }
        let index: HashMap<NodeId, NodeId> = order.iter().enumerate().map(|(i, &old)| (old, i as NodeId)).collect();
        let placeholder = Node::new(NO_PARENT, None, None, Knowledge::empty(0), true);
        let mut nodes = Vec::with_capacity(order.len());
        for &old in &order {
            let mut n = std::mem::replace(&mut self.nodes[old as usize], placeholder.clone());
            n.parent = if old == id { NO_PARENT } else { index[&n.parent] };
            for e in n.edges.iter_mut() {
                for (_, c) in e.children.iter_mut() {
                    *c = index[c];
                }
            }
            nodes.push(n);
        }
        nodes[0].action = None;
        nodes[0].observation = None;
        Tree { nodes }
    }
}
