use std::fmt::Write;

use crate::graph::EdgeLabel;
use crate::model::FeatureModel;
use crate::recognize::{recognize, FeatureKind};

fn is_plain_id(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders the model's feature graph as a Graphviz digraph.
///
/// Configuration features get a double border, `reject` edges are dashed,
/// and each `exclude` constraint is drawn once without an arrowhead.
/// Undeclared (phantom) nodes are dotted.
pub fn to_dot(model: &FeatureModel) -> String {
    let graph = model.graph();
    let name = if is_plain_id(model.name()) {
        model.name().to_string()
    } else {
        quoted(model.name())
    };
    let mut out = format!("digraph {name} {{\n");
    for node in graph.nodes() {
        let style = match model.feature(node) {
            Some(f) if recognize(f) == FeatureKind::Configuration => " [peripheries=2]",
            Some(_) => "",
            None => " [style=dotted]",
        };
        let _ = writeln!(out, "  {}{style};", quoted(node));
    }
    for edge in graph.edges().iter().filter(|e| !e.mirrored) {
        let extra = match edge.label {
            EdgeLabel::Exclude => ", dir=none",
            EdgeLabel::Reject => ", style=dashed",
            _ => "",
        };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}{extra}];",
            quoted(&edge.source),
            quoted(&edge.dest),
            quoted(edge.label.as_str())
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConstraintKind, Decomposition, Feature, GroupKind};

    #[test]
    fn empty_model() {
        assert_eq!(to_dot(&FeatureModel::empty("M")), "digraph M {\n}\n");
    }

    #[test]
    fn styles_and_counts() {
        let m = FeatureModel::new(
            "Shop-1",
            vec![
                Feature::new("Cfg")
                    .with_decomposition(Decomposition::select("A", ["B"]))
                    .with_constraint(ConstraintKind::Reject, "C"),
                Feature::new("A")
                    .with_decomposition(Decomposition::group(GroupKind::Or, ["B", "C"])),
                Feature::new("B").with_constraint(ConstraintKind::Exclude, "C"),
                Feature::new("C"),
            ],
        );
        let dot = to_dot(&m);
        assert!(dot.starts_with("digraph \"Shop-1\" {\n"));
        assert!(dot.contains("  \"Cfg\" [peripheries=2];\n"));
        assert!(dot.contains("  \"A\";\n"));
        assert!(dot.contains("  \"Cfg\" -> \"C\" [label=\"reject\", style=dashed];\n"));
        assert!(dot.contains("  \"B\" -> \"C\" [label=\"exclude\", dir=none];\n"));
        let edges = dot.matches(" -> ").count();
        assert_eq!(edges, m.graph().edges().len() - 1);
        assert_eq!(to_dot(&m), dot);
    }
}
