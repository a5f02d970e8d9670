//! Domain types: features, their relations, and the model that owns them.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{build_graph, FeatureGraph};
use crate::syntax::SourceSpan;

/// A `key: value, value` characteristic of a feature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub key: String,
    pub values: Vec<String>,
}

impl Attribute {
    pub fn new<K: Into<String>, V: Into<String>>(
        key: K,
        values: impl IntoIterator<Item = V>,
    ) -> Self {
        Attribute {
            key: key.into(),
            values: values.into_iter().map(Into::into).collect(),
        }
    }
}

/// Kind of a group decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    /// All children are compulsory.
    And,
    /// Exactly one child.
    Xor,
    /// One or more children.
    Or,
}

impl GroupKind {
    pub fn keyword(self) -> &'static str {
        match self {
            GroupKind::And => "and",
            GroupKind::Xor => "xor",
            GroupKind::Or => "or",
        }
    }
}

/// Flat discriminant of [`Decomposition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecompositionKind {
    And,
    Xor,
    Or,
    Select,
    Default,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Decomposition {
    /// `and(...)`, `xor(...)` or `or(...)` over child features.
    Group {
        kind: GroupKind,
        children: Vec<String>,
    },
    /// `select Base (variation = V1, ...)`: a configuration choosing variations of a base feature.
    Select {
        base: String,
        variations: Vec<String>,
    },
    /// `default Target`: the feature picked when nothing is selected explicitly.
    Default { target: String },
}

impl Decomposition {
    pub fn group<S: Into<String>>(kind: GroupKind, children: impl IntoIterator<Item = S>) -> Self {
        Decomposition::Group {
            kind,
            children: children.into_iter().map(Into::into).collect(),
        }
    }

    pub fn select<S: Into<String>>(
        base: impl Into<String>,
        variations: impl IntoIterator<Item = S>,
    ) -> Self {
        Decomposition::Select {
            base: base.into(),
            variations: variations.into_iter().map(Into::into).collect(),
        }
    }

    pub fn default_to(target: impl Into<String>) -> Self {
        Decomposition::Default {
            target: target.into(),
        }
    }

    pub fn kind(&self) -> DecompositionKind {
        match self {
            Decomposition::Group {
                kind: GroupKind::And,
                ..
            } => DecompositionKind::And,
            Decomposition::Group {
                kind: GroupKind::Xor,
                ..
            } => DecompositionKind::Xor,
            Decomposition::Group {
                kind: GroupKind::Or,
                ..
            } => DecompositionKind::Or,
            Decomposition::Select { .. } => DecompositionKind::Select,
            Decomposition::Default { .. } => DecompositionKind::Default,
        }
    }

    pub fn is_group(&self) -> bool {
        matches!(self, Decomposition::Group { .. })
    }

    /// Every feature name this clause mentions, in source order.
    pub fn references(&self) -> Vec<&str> {
        match self {
            Decomposition::Group { children, .. } => children.iter().map(String::as_str).collect(),
            Decomposition::Select { base, variations } => std::iter::once(base.as_str())
                .chain(variations.iter().map(String::as_str))
                .collect(),
            Decomposition::Default { target } => vec![target.as_str()],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    Imply,
    Exclude,
    Reject,
}

impl ConstraintKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstraintKind::Imply => "imply",
            ConstraintKind::Exclude => "exclude",
            ConstraintKind::Reject => "reject",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub target: String,
}

impl Constraint {
    pub fn new(kind: ConstraintKind, target: impl Into<String>) -> Self {
        Constraint {
            kind,
            target: target.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Feature {
    pub name: String,
    pub attributes: Vec<Attribute>,
    pub decompositions: Vec<Decomposition>,
    pub constraints: Vec<Constraint>,
    /// Configurations this feature is a member of.
    pub included_in: Vec<String>,
}

impl Feature {
    pub fn new(name: impl Into<String>) -> Self {
        Feature {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_attribute(mut self, attribute: Attribute) -> Self {
        self.attributes.push(attribute);
        self
    }

    pub fn with_decomposition(mut self, decomposition: Decomposition) -> Self {
        self.decompositions.push(decomposition);
        self
    }

    pub fn with_constraint(mut self, kind: ConstraintKind, target: impl Into<String>) -> Self {
        self.constraints.push(Constraint::new(kind, target));
        self
    }

    pub fn included_in(mut self, container: impl Into<String>) -> Self {
        self.included_in.push(container.into());
        self
    }

    pub fn attribute(&self, key: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.key == key)
    }

    /// The and/xor/or group, if the feature has one.
    pub fn group(&self) -> Option<(GroupKind, &[String])> {
        self.decompositions.iter().find_map(|d| match d {
            Decomposition::Group { kind, children } => Some((*kind, children.as_slice())),
            _ => None,
        })
    }

    pub fn has_relations(&self) -> bool {
        !(self.decompositions.is_empty()
            && self.constraints.is_empty()
            && self.included_in.is_empty())
    }

    /// Every feature name referenced by any relation of this feature.
    pub fn references(&self) -> impl Iterator<Item = &str> {
        self.decompositions
            .iter()
            .flat_map(|d| d.references())
            .chain(self.constraints.iter().map(|c| c.target.as_str()))
            .chain(self.included_in.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("unknown feature `{0}`")]
    Unknown(String),
    #[error("feature name `{name}` is ambiguous: {}", candidates.join(", "))]
    Ambiguous {
        name: String,
        candidates: Vec<String>,
    },
}

/// A named, ordered collection of features with its derived dependency graph.
///
/// Feature declaration order is preserved. Duplicate names are kept so that
/// [`validate`](crate::validate) can report them; lookups resolve to the first
/// declaration.
#[derive(Clone, Debug)]
pub struct FeatureModel {
    name: String,
    features: Vec<Feature>,
    index: HashMap<String, usize>,
    graph: FeatureGraph,
    spans: HashMap<String, SourceSpan>,
}

impl FeatureModel {
    pub fn new(name: impl Into<String>, features: Vec<Feature>) -> Self {
        let mut model = FeatureModel {
            name: name.into(),
            features,
            index: HashMap::new(),
            graph: FeatureGraph::default(),
            spans: HashMap::new(),
        };
        model.rebuild();
        model
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Self::new(name, Vec::new())
    }

    pub(crate) fn with_spans(mut self, spans: HashMap<String, SourceSpan>) -> Self {
        self.spans = spans;
        self
    }

    fn rebuild(&mut self) {
        self.index.clear();
        for (i, f) in self.features.iter().enumerate() {
            self.index.entry(f.name.clone()).or_insert(i);
        }
        self.graph = build_graph(self);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn graph(&self) -> &FeatureGraph {
        &self.graph
    }

    pub fn feature(&self, name: &str) -> Option<&Feature> {
        self.index.get(name).map(|&i| &self.features[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Declaration position of a feature.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Source location of a feature's declaration, when the model was parsed from text.
    pub fn span_of(&self, name: &str) -> Option<SourceSpan> {
        self.spans.get(name).copied()
    }

    pub fn feature_names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn push_feature(&mut self, feature: Feature) {
        self.features.push(feature);
        self.rebuild();
    }

    pub fn rename(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Resolves a user-supplied feature name.
    ///
    /// An exact match wins. Otherwise the name matches a declared feature when
    /// both agree ignoring ASCII case and treating `-` and `_` as the same
    /// character; more than one such match is an error.
    pub fn resolve(&self, name: &str) -> Result<&Feature, LookupError> {
        if let Some(f) = self.feature(name) {
            return Ok(f);
        }
        let key = loose_key(name);
        let mut hits = self
            .features
            .iter()
            .filter(|f| loose_key(&f.name) == key)
            .collect::<Vec<_>>();
        hits.dedup_by(|a, b| a.name == b.name);
        match hits.len() {
            0 => Err(LookupError::Unknown(name.to_string())),
            1 => Ok(hits[0]),
            _ => Err(LookupError::Ambiguous {
                name: name.to_string(),
                candidates: hits.iter().map(|f| f.name.clone()).collect(),
            }),
        }
    }
}

fn loose_key(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c == '_' {
                '-'
            } else {
                c.to_ascii_lowercase()
            }
        })
        .collect()
}

/// Structural equality: name and features. Source spans are ignored.
impl PartialEq for FeatureModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.features == other.features
    }
}

impl Eq for FeatureModel {}

impl fmt::Display for FeatureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_canonical(self))
    }
}
