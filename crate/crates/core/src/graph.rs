//! Typed dependency graph derived from a feature model's relations.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::model::{ConstraintKind, Decomposition, FeatureModel, GroupKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    Decomp(GroupKind),
    Select,
    Variation,
    Default,
    Imply,
    Exclude,
    Reject,
    IncludedIn,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 10] = [
        EdgeLabel::Decomp(GroupKind::And),
        EdgeLabel::Decomp(GroupKind::Xor),
        EdgeLabel::Decomp(GroupKind::Or),
        EdgeLabel::Select,
        EdgeLabel::Variation,
        EdgeLabel::Default,
        EdgeLabel::Imply,
        EdgeLabel::Exclude,
        EdgeLabel::Reject,
        EdgeLabel::IncludedIn,
    ];

    /// Edges that structure the model top-down: decompositions, configuration
    /// bindings, and container membership. Constraints are not structural.
    pub fn is_structural(self) -> bool {
        !self.is_constraint()
    }

    pub fn is_constraint(self) -> bool {
        matches!(
            self,
            EdgeLabel::Imply | EdgeLabel::Exclude | EdgeLabel::Reject
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::Decomp(kind) => kind.keyword(),
            EdgeLabel::Select => "select",
            EdgeLabel::Variation => "variation",
            EdgeLabel::Default => "default",
            EdgeLabel::Imply => "imply",
            EdgeLabel::Exclude => "exclude",
            EdgeLabel::Reject => "reject",
            EdgeLabel::IncludedIn => "included-in",
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<ConstraintKind> for EdgeLabel {
    fn from(kind: ConstraintKind) -> Self {
        match kind {
            ConstraintKind::Imply => EdgeLabel::Imply,
            ConstraintKind::Exclude => EdgeLabel::Exclude,
            ConstraintKind::Reject => EdgeLabel::Reject,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: String,
    pub label: EdgeLabel,
    pub dest: String,
    /// Set on the reverse copy of an `exclude` edge.
    pub mirrored: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
}

/// Nodes are feature names; edges carry one [`EdgeLabel`] per relation occurrence.
///
/// `included in` edges point from member to container. Decomposition and
/// configuration edges point from the owning feature to the referenced one.
/// `exclude` edges are stored in both directions.
#[derive(Clone, Debug, Default)]
pub struct FeatureGraph {
    nodes: Vec<String>,
    node_set: HashSet<String>,
    phantoms: HashSet<String>,
    edges: Vec<Edge>,
    outgoing: HashMap<String, Vec<usize>>,
    incoming: HashMap<String, Vec<usize>>,
}

pub fn build_graph(model: &FeatureModel) -> FeatureGraph {
    let mut graph = FeatureGraph::default();
    for feature in model.features() {
        if graph.node_set.insert(feature.name.clone()) {
            graph.nodes.push(feature.name.clone());
        }
    }
    for feature in model.features() {
        let owner = feature.name.as_str();
        for d in &feature.decompositions {
            match d {
                Decomposition::Group { kind, children } => {
                    for child in children {
                        graph.push(owner, EdgeLabel::Decomp(*kind), child, false);
                    }
                }
                Decomposition::Select { base, variations } => {
                    graph.push(owner, EdgeLabel::Select, base, false);
                    for v in variations {
                        graph.push(owner, EdgeLabel::Variation, v, false);
                    }
                }
                Decomposition::Default { target } => {
                    graph.push(owner, EdgeLabel::Default, target, false);
                }
            }
        }
        for c in &feature.constraints {
            graph.push(owner, c.kind.into(), &c.target, false);
            if c.kind == ConstraintKind::Exclude {
                graph.push(&c.target, EdgeLabel::Exclude, owner, true);
            }
        }
        for container in &feature.included_in {
            graph.push(owner, EdgeLabel::IncludedIn, container, false);
        }
    }
    graph
}

impl FeatureGraph {
    fn push(&mut self, source: &str, label: EdgeLabel, dest: &str, mirrored: bool) {
        for name in [source, dest] {
            if self.node_set.insert(name.to_string()) {
                self.nodes.push(name.to_string());
                self.phantoms.insert(name.to_string());
            }
        }
        let id = self.edges.len();
        self.edges.push(Edge {
            source: source.to_string(),
            label,
            dest: dest.to_string(),
            mirrored,
        });
        self.outgoing
            .entry(source.to_string())
            .or_default()
            .push(id);
        self.incoming.entry(dest.to_string()).or_default().push(id);
    }

    /// Node names: declared features in declaration order, then phantom nodes.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn contains(&self, name: &str) -> bool {
        self.node_set.contains(name)
    }

    /// Whether a node only exists because some relation references an undeclared name.
    pub fn is_phantom(&self, name: &str) -> bool {
        self.phantoms.contains(name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge set view, for order-insensitive comparisons.
    pub fn edge_set(&self) -> BTreeSet<(String, EdgeLabel, String)> {
        self.edges
            .iter()
            .map(|e| (e.source.clone(), e.label, e.dest.clone()))
            .collect()
    }

    pub fn outgoing<'a>(&'a self, name: &str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.outgoing
            .get(name)
            .into_iter()
            .flatten()
            .map(move |&i| &self.edges[i])
    }

    pub fn incoming<'a>(&'a self, name: &str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.incoming
            .get(name)
            .into_iter()
            .flatten()
            .map(move |&i| &self.edges[i])
    }

    fn check(&self, name: &str) -> Result<(), GraphError> {
        if self.contains(name) {
            Ok(())
        } else {
            Err(GraphError::UnknownFeature(name.to_string()))
        }
    }

    /// Structural parents: owners of decomposition/configuration edges into
    /// `name`, plus the containers `name` is included in.
    pub fn hierarchy_parents<'a>(
        &'a self,
        name: &str,
    ) -> impl Iterator<Item = (EdgeLabel, &'a str)> + 'a {
        let owners = self
            .incoming(name)
            .filter(|e| e.label.is_structural() && e.label != EdgeLabel::IncludedIn)
            .map(|e| (e.label, e.source.as_str()));
        let containers = self
            .outgoing(name)
            .filter(|e| e.label == EdgeLabel::IncludedIn)
            .map(|e| (e.label, e.dest.as_str()));
        owners.chain(containers)
    }

    /// Inverse of [`hierarchy_parents`](Self::hierarchy_parents).
    pub fn hierarchy_children<'a>(
        &'a self,
        name: &str,
    ) -> impl Iterator<Item = (EdgeLabel, &'a str)> + 'a {
        let owned = self
            .outgoing(name)
            .filter(|e| e.label.is_structural() && e.label != EdgeLabel::IncludedIn)
            .map(|e| (e.label, e.dest.as_str()));
        let members = self
            .incoming(name)
            .filter(|e| e.label == EdgeLabel::IncludedIn)
            .map(|e| (e.label, e.source.as_str()));
        owned.chain(members)
    }

    /// Breadth-first traversal along outgoing edges whose label passes `follow`.
    ///
    /// Returns every visited node, seeds first, in visit order. Neighbors are
    /// expanded in edge declaration order.
    pub fn bfs<'a, I, F>(&'a self, seeds: I, follow: F) -> Vec<&'a str>
    where
        I: IntoIterator<Item = &'a str>,
        F: Fn(EdgeLabel) -> bool,
    {
        let mut visited: HashSet<&str> = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for seed in seeds {
            if visited.insert(seed) {
                order.push(seed);
                queue.push_back(seed);
            }
        }
        while let Some(node) = queue.pop_front() {
            for edge in self.outgoing(node) {
                if follow(edge.label) && visited.insert(edge.dest.as_str()) {
                    order.push(edge.dest.as_str());
                    queue.push_back(edge.dest.as_str());
                }
            }
        }
        order
    }

    /// Nodes reachable from `name` through [`hierarchy_children`](Self::hierarchy_children),
    /// restricted to `labels`. `name` itself is excluded.
    pub fn descendants_via(
        &self,
        name: &str,
        labels: &[EdgeLabel],
    ) -> Result<BTreeSet<String>, GraphError> {
        self.check(name)?;
        Ok(self.closure(name, |n| {
            self.hierarchy_children(n)
                .filter(|(l, _)| labels.contains(l))
                .map(|(_, c)| c)
                .collect()
        }))
    }

    /// Ancestors restricted to the given structural labels.
    pub fn ancestors_via(
        &self,
        name: &str,
        labels: &[EdgeLabel],
    ) -> Result<BTreeSet<String>, GraphError> {
        self.check(name)?;
        Ok(self.closure(name, |n| {
            self.hierarchy_parents(n)
                .filter(|(l, _)| labels.contains(l))
                .map(|(_, p)| p)
                .collect()
        }))
    }

    fn closure<'a, F>(&'a self, start: &'a str, step: F) -> BTreeSet<String>
    where
        F: Fn(&'a str) -> Vec<&'a str>,
    {
        let mut seen: HashSet<&str> = HashSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            for next in step(node) {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        seen.into_iter()
            .filter(|&n| n != start)
            .map(str::to_string)
            .collect()
    }
}

/// Labels whose edges make one feature structurally above another.
pub const HIERARCHY_LABELS: [EdgeLabel; 7] = [
    EdgeLabel::Decomp(GroupKind::And),
    EdgeLabel::Decomp(GroupKind::Xor),
    EdgeLabel::Decomp(GroupKind::Or),
    EdgeLabel::Select,
    EdgeLabel::Variation,
    EdgeLabel::Default,
    EdgeLabel::IncludedIn,
];

/// All features that might affect `name`: the transitive structural parents
/// (decomposition owners, configurations binding it, and its containers).
pub fn ancestors(graph: &FeatureGraph, name: &str) -> Result<BTreeSet<String>, GraphError> {
    let mut result = graph.ancestors_via(name, &HIERARCHY_LABELS)?;
    result.remove(name);
    Ok(result)
}

/// Immediate reverse neighbors of `name`, grouped by edge label.
pub fn dependents(
    graph: &FeatureGraph,
    name: &str,
) -> Result<BTreeMap<EdgeLabel, Vec<String>>, GraphError> {
    graph.check(name)?;
    let mut grouped: BTreeMap<EdgeLabel, Vec<String>> = BTreeMap::new();
    for edge in graph.incoming(name) {
        let sources = grouped.entry(edge.label).or_default();
        if !sources.contains(&edge.source) {
            sources.push(edge.source.clone());
        }
    }
    Ok(grouped)
}
