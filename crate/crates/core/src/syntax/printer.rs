use std::fmt::Write;

use super::lexer::{is_ident_continue, is_ident_start, Keyword};
use crate::model::{Constraint, Decomposition, Feature, FeatureModel};

/// Whether `s` lexes as a single identifier token (and is not a keyword).
pub fn is_plain_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start)
        && chars.all(is_ident_continue)
        && Keyword::lookup(s).is_none()
}

fn quote(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn value(v: &str) -> String {
    if is_plain_identifier(v) {
        v.to_string()
    } else {
        quote(v)
    }
}

/// Prefix form of a decomposition clause, without the `decomposition` keyword.
pub fn render_decomposition(d: &Decomposition) -> String {
    match d {
        Decomposition::Group { kind, children } => {
            format!("{}({})", kind.keyword(), children.join(", "))
        }
        Decomposition::Select { base, variations } => {
            let vars = variations
                .iter()
                .map(|v| format!("variation = {v}"))
                .collect::<Vec<_>>()
                .join(", ");
            format!("select {base} ({vars})")
        }
        Decomposition::Default { target } => format!("default {target}"),
    }
}

/// `imply(x)`, `exclude(x)` or `reject(x)`.
pub fn render_constraint(c: &Constraint) -> String {
    format!("{}({})", c.kind.keyword(), c.target)
}

fn print_feature(out: &mut String, f: &Feature) {
    let _ = writeln!(out, "  feature {};", f.name);
    if !f.attributes.is_empty() {
        let attrs = f
            .attributes
            .iter()
            .map(|a| {
                let values = a
                    .values
                    .iter()
                    .map(|v| value(v))
                    .collect::<Vec<_>>()
                    .join(", ");
                format!("{}: {}", a.key, values)
            })
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "    attributes {attrs};");
    }
    if f.has_relations() {
        out.push_str("    relations\n");
        for d in &f.decompositions {
            let _ = writeln!(out, "      decomposition {};", render_decomposition(d));
        }
        for c in &f.constraints {
            let _ = writeln!(out, "      constraints {};", render_constraint(c));
        }
        if !f.included_in.is_empty() {
            let _ = writeln!(out, "      included in {};", f.included_in.join(", "));
        }
    }
    out.push_str("  end feature;\n");
}

/// Deterministic `.fm` rendering of a model.
///
/// Two-space indentation, features in declaration order, clauses ordered
/// decomposition, constraints, included in. Attribute values are quoted only
/// when they are not plain identifiers.
pub fn print_canonical(model: &FeatureModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "feature model {};", model.name());
    for f in model.features() {
        print_feature(&mut out, f);
    }
    let _ = writeln!(out, "end fm {};", model.name());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Attribute, ConstraintKind, GroupKind};
    use crate::syntax::parse;

    #[test]
    fn empty_model() {
        assert_eq!(
            print_canonical(&FeatureModel::empty("M")),
            "feature model M;\nend fm M;\n"
        );
    }

    #[test]
    fn feature_layout() {
        let m = FeatureModel::new(
            "M",
            vec![Feature::new("q")
                .with_attribute(Attribute::new("variation", ["str", "st-beh"]))
                .with_attribute(Attribute::new("note", ["needs quoting", "and"]))
                .with_constraint(ConstraintKind::Exclude, "s")
                .with_decomposition(Decomposition::group(GroupKind::And, ["str", "st-beh"]))
                .included_in("Q")],
        );
        let expected = "feature model M;
  feature q;
    attributes variation: str, st-beh, note: \"needs quoting\", \"and\";
    relations
      decomposition and(str, st-beh);
      constraints exclude(s);
      included in Q;
  end feature;
end fm M;
";
        assert_eq!(print_canonical(&m), expected);
        assert_eq!(parse(expected).unwrap(), m);
    }

    #[test]
    fn renders_clause_fragments() {
        assert_eq!(
            render_decomposition(&Decomposition::select(
                "List",
                ["static-list", "static_queue"]
            )),
            "select List (variation = static-list, variation = static_queue)"
        );
        assert_eq!(
            render_decomposition(&Decomposition::default_to("x")),
            "default x"
        );
        assert_eq!(
            render_constraint(&Constraint::new(ConstraintKind::Reject, "st-beh")),
            "reject(st-beh)"
        );
    }

    #[test]
    fn escapes_round_trip() {
        let m = FeatureModel::new(
            "M",
            vec![Feature::new("a").with_attribute(Attribute::new(
                "k",
                ["q\"uote\\ \n\t\r", "", "9lives", "é-ok"],
            ))],
        );
        let text = print_canonical(&m);
        assert!(text.contains("é-ok"));
        assert_eq!(parse(&text).unwrap(), m);
    }
}
