//! Structural well-formedness checks.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::graph::{EdgeLabel, FeatureGraph};
use crate::model::{Decomposition, FeatureModel};
use crate::syntax::{is_plain_identifier, is_word, SourceSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticCode {
    /// Structural edges form a cycle.
    Cycle,
    /// `imply` constraints form a cycle. Legal, but suspicious.
    ImplyCycle,
    Unresolved,
    DuplicateFeature,
    DuplicateAttribute,
    EmptyAttribute,
    MultipleGroups,
    DuplicateChild,
    EmptyDecomposition,
    SelfReference,
    InvalidIdentifier,
    /// Two declared names differ only by letter case.
    CaseCollision,
    // JSON import problems.
    InvalidJson,
    MissingField,
    UnknownField,
    TypeMismatch,
    UnsupportedSchema,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Cycle => "CYCLE",
            DiagnosticCode::ImplyCycle => "IMPLY_CYCLE",
            DiagnosticCode::Unresolved => "UNRESOLVED",
            DiagnosticCode::DuplicateFeature => "DUPLICATE_FEATURE",
            DiagnosticCode::DuplicateAttribute => "DUPLICATE_ATTRIBUTE",
            DiagnosticCode::EmptyAttribute => "EMPTY_ATTRIBUTE",
            DiagnosticCode::MultipleGroups => "MULTIPLE_GROUPS",
            DiagnosticCode::DuplicateChild => "DUPLICATE_CHILD",
            DiagnosticCode::EmptyDecomposition => "EMPTY_DECOMPOSITION",
            DiagnosticCode::SelfReference => "SELF_REFERENCE",
            DiagnosticCode::InvalidIdentifier => "INVALID_IDENTIFIER",
            DiagnosticCode::CaseCollision => "CASE_COLLISION",
            DiagnosticCode::InvalidJson => "INVALID_JSON",
            DiagnosticCode::MissingField => "MISSING_FIELD",
            DiagnosticCode::UnknownField => "UNKNOWN_FIELD",
            DiagnosticCode::TypeMismatch => "TYPE_MISMATCH",
            DiagnosticCode::UnsupportedSchema => "UNSUPPORTED_SCHEMA",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub feature: Option<String>,
    pub message: String,
    pub span: Option<SourceSpan>,
    /// JSON-pointer path, for problems found while importing JSON.
    pub path: Option<String>,
}

impl Diagnostic {
    pub fn error(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            feature: None,
            message: message.into(),
            span: None,
            path: None,
        }
    }

    pub fn warning(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Self::error(code, message)
        }
    }

    pub fn at_path(mut self, path: impl Into<String>) -> Self {
        self.path = Some(path.into());
        self
    }

    fn on(mut self, model: &FeatureModel, feature: &str) -> Self {
        self.span = model.span_of(feature);
        self.feature = Some(feature.to_string());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.message, self.code)?;
        if let Some(path) = &self.path {
            write!(f, " at {path}")?;
        }
        Ok(())
    }
}

/// Checks every model invariant and returns one diagnostic per problem.
/// An empty list means the model is well formed.
pub fn validate(model: &FeatureModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_identifiers(model, &mut out);
    check_features(model, &mut out);
    check_cycles(model, &mut out);
    check_case_collisions(model, &mut out);
    out
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

fn check_identifiers(model: &FeatureModel, out: &mut Vec<Diagnostic>) {
    if !is_plain_identifier(model.name()) {
        out.push(Diagnostic::error(
            DiagnosticCode::InvalidIdentifier,
            format!("model name {:?} is not a valid identifier", model.name()),
        ));
    }
    for f in model.features() {
        let mut bad: Vec<&str> = Vec::new();
        let names = std::iter::once(f.name.as_str()).chain(f.references());
        let keys = f.attributes.iter().map(|a| a.key.as_str());
        for (name, ok) in names
            .map(|n| (n, is_plain_identifier(n)))
            .chain(keys.map(|k| (k, is_word(k))))
        {
            if !ok && !bad.contains(&name) {
                bad.push(name);
            }
        }
        for name in bad {
            out.push(
                Diagnostic::error(
                    DiagnosticCode::InvalidIdentifier,
                    format!("{name:?} is not a valid identifier"),
                )
                .on(model, &f.name),
            );
        }
    }
}

fn check_features(model: &FeatureModel, out: &mut Vec<Diagnostic>) {
    let mut seen = HashSet::new();
    for f in model.features() {
        let name = f.name.as_str();
        if !seen.insert(name) {
            out.push(
                Diagnostic::error(
                    DiagnosticCode::DuplicateFeature,
                    format!("feature {name} is declared more than once"),
                )
                .on(model, name),
            );
        }

        let mut keys = HashSet::new();
        for a in &f.attributes {
            if !keys.insert(a.key.as_str()) {
                out.push(
                    Diagnostic::error(
                        DiagnosticCode::DuplicateAttribute,
                        format!("feature {name} repeats attribute {}", a.key),
                    )
                    .on(model, name),
                );
            }
            if a.values.is_empty() {
                out.push(
                    Diagnostic::error(
                        DiagnosticCode::EmptyAttribute,
                        format!("attribute {} of feature {name} has no values", a.key),
                    )
                    .on(model, name),
                );
            }
        }

        if f.decompositions.iter().filter(|d| d.is_group()).count() > 1 {
            out.push(
                Diagnostic::error(
                    DiagnosticCode::MultipleGroups,
                    format!("feature {name} has more than one and/xor/or decomposition"),
                )
                .on(model, name),
            );
        }
        for d in &f.decompositions {
            let list: &[String] = match d {
                Decomposition::Group { children, .. } => children,
                Decomposition::Select { variations, .. } => variations,
                Decomposition::Default { .. } => &[],
            };
            if list.is_empty() && !matches!(d, Decomposition::Default { .. }) {
                out.push(
                    Diagnostic::error(
                        DiagnosticCode::EmptyDecomposition,
                        format!(
                            "feature {name} has a {:?} decomposition with no members",
                            d.kind()
                        ),
                    )
                    .on(model, name),
                );
            }
            let mut members = HashSet::new();
            let mut reported = HashSet::new();
            for child in list {
                if !members.insert(child.as_str()) && reported.insert(child.as_str()) {
                    out.push(
                        Diagnostic::error(
                            DiagnosticCode::DuplicateChild,
                            format!("{child} appears twice in a decomposition of {name}"),
                        )
                        .on(model, name),
                    );
                }
            }
        }

        let mut self_ref = false;
        let mut unresolved = Vec::new();
        for target in f.references() {
            if target == name {
                self_ref = true;
            } else if !model.contains(target) && !unresolved.contains(&target) {
                unresolved.push(target);
            }
        }
        if self_ref {
            out.push(
                Diagnostic::error(
                    DiagnosticCode::SelfReference,
                    format!("feature {name} refers to itself"),
                )
                .on(model, name),
            );
        }
        for target in unresolved {
            out.push(
                Diagnostic::error(
                    DiagnosticCode::Unresolved,
                    format!("feature {name} refers to undeclared feature {target}"),
                )
                .on(model, name),
            );
        }
    }
}

/// Strongly connected components of size > 1 over the edges selected by
/// `step`, each listed in node declaration order.
fn cycles<'a>(
    graph: &'a FeatureGraph,
    step: impl Fn(&'a str) -> Vec<&'a str>,
) -> Vec<Vec<&'a str>> {
    let mut g = DiGraph::<&str, ()>::new();
    let ids: HashMap<&str, _> = graph
        .nodes()
        .iter()
        .map(|n| (n.as_str(), g.add_node(n.as_str())))
        .collect();
    for node in graph.nodes() {
        for next in step(node) {
            if next != node {
                g.add_edge(ids[node.as_str()], ids[next], ());
            }
        }
    }
    let order: HashMap<&str, usize> = graph
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut sccs: Vec<Vec<&str>> = tarjan_scc(&g)
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            let mut names: Vec<&str> = c.into_iter().map(|i| g[i]).collect();
            names.sort_by_key(|n| order[n]);
            names
        })
        .collect();
    sccs.sort_by_key(|c| order[c[0]]);
    sccs
}

fn check_cycles(model: &FeatureModel, out: &mut Vec<Diagnostic>) {
    let graph = model.graph();
    for members in cycles(graph, |n| {
        graph.hierarchy_children(n).map(|(_, c)| c).collect()
    }) {
        out.push(
            Diagnostic::error(
                DiagnosticCode::Cycle,
                format!("structural cycle through {}", members.join(", ")),
            )
            .on(model, members[0]),
        );
    }
    let implies = |n| {
        graph
            .outgoing(n)
            .filter(|e| e.label == EdgeLabel::Imply)
            .map(|e| e.dest.as_str())
            .collect()
    };
    for members in cycles(graph, implies) {
        out.push(
            Diagnostic::warning(
                DiagnosticCode::ImplyCycle,
                format!(
                    "imply constraints form a cycle through {}",
                    members.join(", ")
                ),
            )
            .on(model, members[0]),
        );
    }
}

fn check_case_collisions(model: &FeatureModel, out: &mut Vec<Diagnostic>) {
    let mut by_fold: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for name in model.feature_names() {
        let group = by_fold.entry(name.to_lowercase()).or_default();
        if !group.contains(&name) {
            group.push(name);
        }
    }
    let mut groups: Vec<Vec<&str>> = by_fold.into_values().filter(|g| g.len() > 1).collect();
    groups.sort_by_key(|g| model.position(g[0]));
    for group in groups {
        out.push(
            Diagnostic::warning(
                DiagnosticCode::CaseCollision,
                format!("feature names differ only by case: {}", group.join(", ")),
            )
            .on(model, group[1]),
        );
    }
}
