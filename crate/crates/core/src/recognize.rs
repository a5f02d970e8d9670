//! Elementary/configuration feature patterns and feature type mining.

use std::fmt;

use serde::Serialize;

use crate::model::{ConstraintKind, Decomposition, Feature, FeatureModel, LookupError};
use crate::syntax::{render_constraint, render_decomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeatureKind {
    Elementary,
    Configuration,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Elementary => "ELEMENTARY",
            FeatureKind::Configuration => "CONFIGURATION",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureKind::Elementary => "Elementary feature",
            FeatureKind::Configuration => "Configuration feature",
        })
    }
}

/// The two feature patterns.
///
/// The elementary pattern admits an and/xor/or group, imply/exclude
/// constraints, and container membership. The configuration pattern
/// additionally admits select, default, and reject.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    Elementary,
    Configuration,
}

fn decomposition_allowed(pattern: Pattern, d: &Decomposition) -> bool {
    match (pattern, d) {
        (_, Decomposition::Group { .. }) => true,
        (Pattern::Configuration, _) => true,
        (Pattern::Elementary, Decomposition::Select { .. } | Decomposition::Default { .. }) => {
            false
        }
    }
}

fn constraint_allowed(pattern: Pattern, kind: ConstraintKind) -> bool {
    pattern == Pattern::Configuration || kind != ConstraintKind::Reject
}

/// Whether every relation clause of `feature` is producible by `pattern`.
pub fn match_pattern(feature: &Feature, pattern: Pattern) -> bool {
    feature
        .decompositions
        .iter()
        .all(|d| decomposition_allowed(pattern, d))
        && feature
            .constraints
            .iter()
            .all(|c| constraint_allowed(pattern, c.kind))
}

/// A feature is a configuration iff it uses a construct only the
/// configuration pattern admits (select, default, or reject).
pub fn recognize(feature: &Feature) -> FeatureKind {
    if match_pattern(feature, Pattern::Elementary) {
        FeatureKind::Elementary
    } else {
        FeatureKind::Configuration
    }
}

/// The semantics tuple of a feature: name, decomposition, constraint, included-in.
///
/// Decomposition and constraint entries use the canonical clause syntax.
/// `variation` echoes the feature's `variation` attribute, when present; it
/// is informational and ignored by equality.
#[derive(Clone, Debug, Serialize)]
pub struct Meaning {
    pub name: String,
    pub decomposition: Vec<String>,
    pub constraint: Vec<String>,
    pub included_in: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variation: Option<Vec<String>>,
}

impl PartialEq for Meaning {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.decomposition == other.decomposition
            && self.constraint == other.constraint
            && self.included_in == other.included_in
    }
}

impl Eq for Meaning {}

const EMPTY: &str = "---";

fn joined(items: &[String]) -> String {
    if items.is_empty() {
        EMPTY.to_string()
    } else {
        items.join("; ")
    }
}

impl Meaning {
    pub fn of(feature: &Feature) -> Self {
        Meaning {
            name: feature.name.clone(),
            decomposition: feature
                .decompositions
                .iter()
                .map(render_decomposition)
                .collect(),
            constraint: feature.constraints.iter().map(render_constraint).collect(),
            included_in: feature.included_in.clone(),
            variation: feature.attribute("variation").map(|a| a.values.clone()),
        }
    }

    /// The included-in field as displayed: containers joined by `, `, or `---`.
    pub fn included_in_display(&self) -> String {
        if self.included_in.is_empty() {
            EMPTY.to_string()
        } else {
            self.included_in.join(", ")
        }
    }

    /// Constraints in the report style, e.g. `Reject st-beh`.
    fn constraint_display(&self) -> String {
        let items: Vec<String> = self
            .constraint
            .iter()
            .map(|c| {
                let (kind, rest) = c.split_once('(').unwrap_or((c, ""));
                let mut chars = kind.chars();
                let head: String = chars
                    .next()
                    .map(|h| h.to_uppercase().collect())
                    .unwrap_or_default();
                format!("{head}{} {}", chars.as_str(), rest.trim_end_matches(')'))
            })
            .collect();
        joined(&items)
    }

    /// Text report of a recognition result.
    pub fn report(&self, kind: FeatureKind) -> String {
        let mut out = format!("T = {kind}\nM = {{\n  Name: {}\n", self.name);
        if let Some(v) = &self.variation {
            out.push_str(&format!("  Variation: {}\n", v.join(", ")));
        }
        out.push_str(&format!(
            "  Decomposition: {}\n",
            joined(&self.decomposition)
        ));
        out.push_str(&format!("  Constraint: {}\n", self.constraint_display()));
        out.push_str(&format!(
            "  Included in: {}\n}}\n",
            self.included_in_display()
        ));
        out
    }
}

/// Classifies the named feature and extracts its meaning.
pub fn feature_type_mining(
    model: &FeatureModel,
    name: &str,
) -> Result<(FeatureKind, Meaning), LookupError> {
    let feature = model.resolve(name)?;
    Ok((recognize(feature), Meaning::of(feature)))
}
