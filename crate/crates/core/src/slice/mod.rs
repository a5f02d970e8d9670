//! Forward and backward slicing of feature models.
//!
//! A slice query names a feature, a direction and a relation:
//!
//! * forward AND: one slice per immediate compulsory child (and-group
//!   members, selected base, variations, default target), each holding the
//!   feature, the child, and everything reachable from the child along
//!   compulsory edges and `imply` constraints;
//! * forward OR: a single slice covering the feature and the given
//!   alternatives, plus any or/xor parent they share;
//! * backward (either relation): the feature and all of its ancestors.
//!
//! In forward slices, a feature rejected by a configuration inside the slice
//! is removed, unless it was named in the query.

pub mod oracle;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{ancestors, EdgeLabel};
use crate::model::{ConstraintKind, Decomposition, Feature, FeatureModel, GroupKind, LookupError};
use crate::recognize::{feature_type_mining, FeatureKind, Meaning};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    And,
    Or,
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            _ => Err(format!(
                "unknown direction `{s}` (expected forward or backward)"
            )),
        }
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(Relation::And),
            "or" => Ok(Relation::Or),
            _ => Err(format!("unknown relation `{s}` (expected AND or OR)")),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "Forward",
            Direction::Backward => "Backward",
        })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::And => "AND",
            Relation::Or => "OR",
        })
    }
}

/// Slicing criterion: `Slice <feature> <direction> <relation> [alternatives]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceQuery {
    pub feature: String,
    pub direction: Direction,
    pub relation: Relation,
    /// Only meaningful with [`Relation::Or`].
    pub alternatives: Vec<String>,
}

impl SliceQuery {
    pub fn new(feature: impl Into<String>, direction: Direction, relation: Relation) -> Self {
        SliceQuery {
            feature: feature.into(),
            direction,
            relation,
            alternatives: Vec::new(),
        }
    }

    pub fn with_alternatives<S: Into<String>>(
        mut self,
        alternatives: impl IntoIterator<Item = S>,
    ) -> Self {
        self.alternatives = alternatives.into_iter().map(Into::into).collect();
        self
    }
}

impl fmt::Display for SliceQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Slice {} {} {}",
            self.feature, self.direction, self.relation
        )?;
        for a in &self.alternatives {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

/// Parses `Slice Static-list Forward OR static-queue`. The leading `Slice`
/// is optional; alternatives may be separated by spaces or commas.
impl FromStr for SliceQuery {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut words = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|w| !w.is_empty())
            .peekable();
        if words
            .peek()
            .is_some_and(|w| w.eq_ignore_ascii_case("slice"))
        {
            words.next();
        }
        let feature = words.next().ok_or("missing feature")?;
        let direction = words.next().ok_or("missing direction")?.parse()?;
        let relation = words.next().ok_or("missing relation")?.parse()?;
        Ok(SliceQuery::new(feature, direction, relation).with_alternatives(words))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("{0}")]
    UnknownFeature(LookupError),
    #[error("alternative: {0}")]
    UnknownAlternative(LookupError),
    #[error("alternatives are only allowed with the OR relation")]
    AlternativesWithAnd,
    #[error("alternative `{0}` is the sliced feature itself")]
    AlternativeEqualsFeature(String),
}

impl SliceError {
    pub fn code(&self) -> &'static str {
        match self {
            SliceError::UnknownFeature(_) => "UNKNOWN_FEATURE",
            SliceError::UnknownAlternative(_) => "UNKNOWN_ALTERNATIVE",
            SliceError::AlternativesWithAnd => "ALTERNATIVES_WITH_AND",
            SliceError::AlternativeEqualsFeature(_) => "ALTERNATIVE_EQUALS_FEATURE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceResult {
    /// The query with every name resolved to its declared spelling.
    pub query: SliceQuery,
    pub kind: FeatureKind,
    pub meaning: Meaning,
    pub slices: Vec<FeatureModel>,
}

impl SliceResult {
    /// Feature names of each slice, in slice order.
    pub fn feature_sets(&self) -> Vec<BTreeSet<String>> {
        self.slices
            .iter()
            .map(|s| s.feature_names().map(str::to_string).collect())
            .collect()
    }

    /// Multiset equality of the slices' feature sets.
    pub fn same_slices(&self, other: &SliceResult) -> bool {
        let mut a = self.feature_sets();
        let mut b = other.feature_sets();
        a.sort();
        b.sort();
        a == b
    }
}

/// Query validation and name resolution shared with the oracle.
pub(crate) fn resolve_query(
    model: &FeatureModel,
    query: &SliceQuery,
) -> Result<SliceQuery, SliceError> {
    let feature = model
        .resolve(&query.feature)
        .map_err(SliceError::UnknownFeature)?
        .name
        .clone();
    if query.relation == Relation::And && !query.alternatives.is_empty() {
        return Err(SliceError::AlternativesWithAnd);
    }
    let mut alternatives = Vec::with_capacity(query.alternatives.len());
    for alt in &query.alternatives {
        let resolved = model
            .resolve(alt)
            .map_err(SliceError::UnknownAlternative)?
            .name
            .clone();
        if resolved == feature {
            return Err(SliceError::AlternativeEqualsFeature(alt.clone()));
        }
        if !alternatives.contains(&resolved) {
            alternatives.push(resolved);
        }
    }
    Ok(SliceQuery {
        feature,
        direction: query.direction,
        relation: query.relation,
        alternatives,
    })
}

/// Runs a slicing query: classifies the feature, then dispatches on direction and relation.
pub fn slice(model: &FeatureModel, query: &SliceQuery) -> Result<SliceResult, SliceError> {
    let query = resolve_query(model, query)?;
    let (kind, meaning) =
        feature_type_mining(model, &query.feature).map_err(SliceError::UnknownFeature)?;
    let slices = match (query.direction, query.relation) {
        (Direction::Forward, Relation::And) => select_and(model, &query.feature)?,
        (Direction::Forward, Relation::Or) => {
            select_or(model, &query.feature, &query.alternatives)?
        }
        (Direction::Backward, _) => parent_slice(model, &query.feature)?,
    };
    Ok(SliceResult {
        query,
        kind,
        meaning,
        slices,
    })
}

/// Edges a forward slice follows: compulsory structure and implications.
fn follows_forward(label: EdgeLabel) -> bool {
    matches!(
        label,
        EdgeLabel::Decomp(GroupKind::And)
            | EdgeLabel::Select
            | EdgeLabel::Variation
            | EdgeLabel::Default
            | EdgeLabel::Imply
    )
}

fn is_compulsory_child(label: EdgeLabel) -> bool {
    follows_forward(label) && label != EdgeLabel::Imply
}

fn resolved<'m>(model: &'m FeatureModel, name: &str) -> Result<&'m Feature, SliceError> {
    model.resolve(name).map_err(SliceError::UnknownFeature)
}

/// Forward AND slices of `name`, one per immediate compulsory child in
/// declaration order, or a single slice when there is no such child.
pub fn select_and(model: &FeatureModel, name: &str) -> Result<Vec<FeatureModel>, SliceError> {
    let f = resolved(model, name)?.name.as_str();
    let graph = model.graph();
    let mut children: Vec<&str> = Vec::new();
    let mut implied: Vec<&str> = Vec::new();
    for edge in graph.outgoing(f) {
        let list = if is_compulsory_child(edge.label) {
            &mut children
        } else if edge.label == EdgeLabel::Imply {
            &mut implied
        } else {
            continue;
        };
        if !list.contains(&edge.dest.as_str()) {
            list.push(edge.dest.as_str());
        }
    }

    let protected = [f];
    if children.is_empty() {
        let members = graph.bfs([f], follows_forward);
        return Ok(vec![finish(model, members, &protected, 1)]);
    }
    Ok(children
        .iter()
        .enumerate()
        .map(|(i, &child)| {
            let mut members = vec![f];
            members.extend(graph.bfs(
                std::iter::once(child).chain(implied.iter().copied()),
                follows_forward,
            ));
            finish(model, members, &protected, i + 1)
        })
        .collect())
}

/// The single forward OR slice of `name` together with `alternatives`.
pub fn select_or(
    model: &FeatureModel,
    name: &str,
    alternatives: &[String],
) -> Result<Vec<FeatureModel>, SliceError> {
    let f = resolved(model, name)?.name.as_str();
    let mut alts: Vec<&str> = Vec::new();
    for a in alternatives {
        let a = model
            .resolve(a)
            .map_err(SliceError::UnknownAlternative)?
            .name
            .as_str();
        if a == f {
            return Err(SliceError::AlternativeEqualsFeature(a.to_string()));
        }
        alts.push(a);
    }
    let graph = model.graph();
    let mut members = graph.bfs(
        std::iter::once(f).chain(alts.iter().copied()),
        follows_forward,
    );
    for edge in graph.incoming(f) {
        if matches!(
            edge.label,
            EdgeLabel::Decomp(GroupKind::Or | GroupKind::Xor)
        ) && graph
            .outgoing(&edge.source)
            .any(|e| e.label == edge.label && alts.contains(&e.dest.as_str()))
        {
            members.push(edge.source.as_str());
        }
    }
    let mut protected = vec![f];
    protected.extend(alts);
    Ok(vec![finish(model, members, &protected, 1)])
}

/// The backward slice: `name` and all of its ancestors.
pub fn parent_slice(model: &FeatureModel, name: &str) -> Result<Vec<FeatureModel>, SliceError> {
    let f = resolved(model, name)?.name.clone();
    let anc = ancestors(model.graph(), &f)
        .map_err(|_| SliceError::UnknownFeature(LookupError::Unknown(f.clone())))?;
    let mut members: HashSet<&str> = anc.iter().map(String::as_str).collect();
    members.insert(&f);
    Ok(vec![extract(model, &members, 1)])
}

/// Removes rejected features from a forward slice and materializes it.
fn finish(
    model: &FeatureModel,
    members: Vec<&str>,
    protected: &[&str],
    index: usize,
) -> FeatureModel {
    let mut set: HashSet<&str> = members.into_iter().collect();
    let rejected: Vec<&str> = set
        .iter()
        .filter_map(|n| model.feature(n))
        .flat_map(|f| f.constraints.iter())
        .filter(|c| c.kind == ConstraintKind::Reject)
        .map(|c| c.target.as_str())
        .collect();
    for r in rejected {
        if !protected.contains(&r) {
            set.remove(r);
        }
    }
    extract(model, &set, index)
}

/// Builds the sub-model over `members`, keeping features in declaration order
/// and dropping every relation that leaves the member set.
pub(crate) fn extract(model: &FeatureModel, members: &HashSet<&str>, index: usize) -> FeatureModel {
    let inside = |n: &String| members.contains(n.as_str());
    let features = model
        .features()
        .iter()
        .filter(|f| members.contains(f.name.as_str()))
        .map(|f| Feature {
            name: f.name.clone(),
            attributes: f.attributes.clone(),
            decompositions: f
                .decompositions
                .iter()
                .filter_map(|d| match d {
                    Decomposition::Group { kind, children } => {
                        let children: Vec<String> =
                            children.iter().filter(|c| inside(c)).cloned().collect();
                        (!children.is_empty()).then_some(Decomposition::Group {
                            kind: *kind,
                            children,
                        })
                    }
                    Decomposition::Select { base, variations } => {
                        let variations: Vec<String> =
                            variations.iter().filter(|v| inside(v)).cloned().collect();
                        (inside(base) && !variations.is_empty()).then(|| Decomposition::Select {
                            base: base.clone(),
                            variations,
                        })
                    }
                    Decomposition::Default { target } => inside(target).then(|| d.clone()),
                })
                .collect(),
            constraints: f
                .constraints
                .iter()
                .filter(|c| inside(&c.target))
                .cloned()
                .collect(),
            included_in: f
                .included_in
                .iter()
                .filter(|c| inside(c))
                .cloned()
                .collect(),
        })
        .collect();
    FeatureModel::new(format!("{}-slice-{index}", model.name()), features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Decomposition as D;
    use crate::validate::{has_errors, validate};

    fn names(m: &FeatureModel) -> Vec<&str> {
        m.feature_names().collect()
    }

    fn chain() -> FeatureModel {
        FeatureModel::new(
            "Chain",
            vec![
                Feature::new("A").with_decomposition(D::group(GroupKind::And, ["B"])),
                Feature::new("B").with_decomposition(D::group(GroupKind::And, ["C"])),
                Feature::new("C"),
            ],
        )
    }

    #[test]
    fn query_text_round_trip() {
        let q: SliceQuery = "Slice Static-list Forward OR static-queue".parse().unwrap();
        assert_eq!(
            q,
            SliceQuery::new("Static-list", Direction::Forward, Relation::Or)
                .with_alternatives(["static-queue"])
        );
        assert_eq!(q.to_string(), "Slice Static-list Forward OR static-queue");
        assert!("Slice x sideways AND".parse::<SliceQuery>().is_err());
        assert!("Slice".parse::<SliceQuery>().is_err());
    }

    #[test]
    fn chain_forward_and_is_one_transitive_slice() {
        let slices = select_and(&chain(), "A").unwrap();
        assert_eq!(slices.len(), 1);
        assert_eq!(names(&slices[0]), ["A", "B", "C"]);
    }

    #[test]
    fn chain_backward() {
        let slices = parent_slice(&chain(), "C").unwrap();
        assert_eq!(names(&slices[0]), ["A", "B", "C"]);
        let slices = parent_slice(&chain(), "A").unwrap();
        assert_eq!(names(&slices[0]), ["A"]);
    }

    #[test]
    fn leaf_forward_and_is_singleton() {
        let slices = select_and(&chain(), "C").unwrap();
        assert_eq!(slices.len(), 1);
        assert_eq!(names(&slices[0]), ["C"]);
    }

    #[test]
    fn one_slice_per_and_child_with_implications() {
        let m = FeatureModel::new(
            "M",
            vec![
                Feature::new("P")
                    .with_decomposition(D::group(GroupKind::And, ["X", "Y"]))
                    .with_constraint(ConstraintKind::Imply, "I"),
                Feature::new("X").with_constraint(ConstraintKind::Exclude, "Y"),
                Feature::new("Y").with_constraint(ConstraintKind::Imply, "J"),
                Feature::new("I"),
                Feature::new("J"),
            ],
        );
        let slices = select_and(&m, "P").unwrap();
        assert_eq!(names(&slices[0]), ["P", "X", "I"]);
        assert_eq!(names(&slices[1]), ["P", "Y", "I", "J"]);
        // exclude never pulls features in, and is dropped with its endpoint
        assert!(slices[0].feature("X").unwrap().constraints.is_empty());
        assert_eq!(
            slices[0].feature("P").unwrap().decompositions,
            vec![D::group(GroupKind::And, ["X"])]
        );
        for s in &slices {
            assert!(!has_errors(&validate(s)));
        }
    }

    #[test]
    fn xor_children_are_not_compulsory() {
        let m = FeatureModel::new(
            "M",
            vec![
                Feature::new("P").with_decomposition(D::group(GroupKind::Xor, ["X", "Y"])),
                Feature::new("X"),
                Feature::new("Y"),
            ],
        );
        let slices = select_and(&m, "P").unwrap();
        assert_eq!(slices.len(), 1);
        assert_eq!(names(&slices[0]), ["P"]);

        let slices = select_or(&m, "X", &["Y".to_string()]).unwrap();
        assert_eq!(names(&slices[0]), ["P", "X", "Y"]);
        assert_eq!(
            slices[0].feature("P").unwrap().decompositions,
            vec![D::group(GroupKind::Xor, ["X", "Y"])]
        );
    }

    #[test]
    fn rejected_features_are_filtered_from_forward_slices() {
        let m = FeatureModel::new(
            "M",
            vec![
                Feature::new("Cfg")
                    .with_decomposition(D::select("Base", ["V1", "V2"]))
                    .with_constraint(ConstraintKind::Reject, "V2"),
                Feature::new("Base"),
                Feature::new("V1"),
                Feature::new("V2"),
            ],
        );
        let slices = select_and(&m, "Cfg").unwrap();
        assert_eq!(slices.len(), 3);
        assert_eq!(names(&slices[2]), ["Cfg"]);
        assert_eq!(names(&slices[1]), ["Cfg", "V1"]);
        // a named alternative survives rejection
        let slices = select_or(&m, "Cfg", &["V2".to_string()]).unwrap();
        assert_eq!(names(&slices[0]), ["Cfg", "Base", "V1", "V2"]);
    }

    #[test]
    fn query_errors() {
        let m = chain();
        let q = SliceQuery::new("A", Direction::Forward, Relation::And).with_alternatives(["B"]);
        assert_eq!(slice(&m, &q).unwrap_err(), SliceError::AlternativesWithAnd);
        let q = SliceQuery::new("A", Direction::Forward, Relation::Or).with_alternatives(["a"]);
        assert_eq!(
            slice(&m, &q).unwrap_err().code(),
            "ALTERNATIVE_EQUALS_FEATURE"
        );
        let q = SliceQuery::new("A", Direction::Forward, Relation::Or).with_alternatives(["ghost"]);
        assert_eq!(slice(&m, &q).unwrap_err().code(), "UNKNOWN_ALTERNATIVE");
        let q = SliceQuery::new("ghost", Direction::Backward, Relation::And);
        assert_eq!(slice(&m, &q).unwrap_err().code(), "UNKNOWN_FEATURE");
    }

    #[test]
    fn backward_ignores_relation() {
        let m = chain();
        let and = slice(
            &m,
            &SliceQuery::new("C", Direction::Backward, Relation::And),
        )
        .unwrap();
        let or = slice(&m, &SliceQuery::new("C", Direction::Backward, Relation::Or)).unwrap();
        assert_eq!(and.slices, or.slices);
        assert_eq!(or.query.relation, Relation::Or);
    }
}
