use std::collections::HashMap;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::model::{
    Attribute, Constraint, ConstraintKind, Decomposition, Feature, FeatureModel, GroupKind,
};
use crate::recognize::{FeatureKind, Meaning};
use crate::validate::{Diagnostic, DiagnosticCode};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Serialize)]
struct ModelDoc<'a> {
    schema: u64,
    name: &'a str,
    features: Vec<FeatureDoc<'a>>,
}

#[derive(Serialize)]
struct FeatureDoc<'a> {
    name: &'a str,
    attributes: Vec<AttributeDoc<'a>>,
    decompositions: Vec<DecompositionDoc<'a>>,
    constraints: Vec<ConstraintDoc<'a>>,
    included_in: &'a [String],
}

#[derive(Serialize)]
struct AttributeDoc<'a> {
    key: &'a str,
    values: &'a [String],
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum DecompositionDoc<'a> {
    And {
        children: &'a [String],
    },
    Xor {
        children: &'a [String],
    },
    Or {
        children: &'a [String],
    },
    Select {
        base: &'a str,
        variations: &'a [String],
    },
    Default {
        target: &'a str,
    },
}

#[derive(Serialize)]
struct ConstraintDoc<'a> {
    kind: &'static str,
    target: &'a str,
}

impl<'a> From<&'a Decomposition> for DecompositionDoc<'a> {
    fn from(d: &'a Decomposition) -> Self {
        match d {
            Decomposition::Group {
                kind: GroupKind::And,
                children,
            } => DecompositionDoc::And { children },
            Decomposition::Group {
                kind: GroupKind::Xor,
                children,
            } => DecompositionDoc::Xor { children },
            Decomposition::Group {
                kind: GroupKind::Or,
                children,
            } => DecompositionDoc::Or { children },
            Decomposition::Select { base, variations } => {
                DecompositionDoc::Select { base, variations }
            }
            Decomposition::Default { target } => DecompositionDoc::Default { target },
        }
    }
}

/// Compact JSON with a fixed key order and arrays in declaration order.
pub fn to_json(model: &FeatureModel) -> String {
    let doc = ModelDoc {
        schema: SCHEMA_VERSION,
        name: model.name(),
        features: model
            .features()
            .iter()
            .map(|f| FeatureDoc {
                name: &f.name,
                attributes: f
                    .attributes
                    .iter()
                    .map(|a| AttributeDoc {
                        key: &a.key,
                        values: &a.values,
                    })
                    .collect(),
                decompositions: f
                    .decompositions
                    .iter()
                    .map(DecompositionDoc::from)
                    .collect(),
                constraints: f
                    .constraints
                    .iter()
                    .map(|c| ConstraintDoc {
                        kind: c.kind.keyword(),
                        target: &c.target,
                    })
                    .collect(),
                included_in: &f.included_in,
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("model documents always serialize")
}

/// Pretty JSON for a recognition result: `{"kind": ..., "meaning": {...}}`.
pub fn recognition_json(kind: FeatureKind, meaning: &Meaning) -> String {
    #[derive(Serialize)]
    struct Report<'a> {
        kind: FeatureKind,
        meaning: &'a Meaning,
    }
    serde_json::to_string_pretty(&Report { kind, meaning }).expect("reports always serialize")
}

struct Decoder {
    diagnostics: Vec<Diagnostic>,
}

impl Decoder {
    fn report(&mut self, code: DiagnosticCode, message: String, path: &str) {
        let path = if path.is_empty() { "/" } else { path };
        self.diagnostics
            .push(Diagnostic::error(code, message).at_path(path));
    }

    fn object<'v>(
        &mut self,
        value: &'v Value,
        path: &str,
        allowed: &[&str],
    ) -> Option<&'v Map<String, Value>> {
        let Some(map) = value.as_object() else {
            self.report(
                DiagnosticCode::TypeMismatch,
                "expected an object".into(),
                path,
            );
            return None;
        };
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                self.report(
                    DiagnosticCode::UnknownField,
                    format!("unknown field: {key}"),
                    &format!("{path}/{}", pointer_escape(key)),
                );
            }
        }
        Some(map)
    }

    fn string(&mut self, map: &Map<String, Value>, key: &str, path: &str) -> Option<String> {
        match map.get(key) {
            None => {
                self.report(
                    DiagnosticCode::MissingField,
                    format!("missing field: {key}"),
                    path,
                );
                None
            }
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.report(
                    DiagnosticCode::TypeMismatch,
                    "expected a string".into(),
                    &format!("{path}/{key}"),
                );
                None
            }
        }
    }

    fn array<'v>(&mut self, map: &'v Map<String, Value>, key: &str, path: &str) -> &'v [Value] {
        match map.get(key) {
            None => &[],
            Some(Value::Array(items)) => items,
            Some(_) => {
                self.report(
                    DiagnosticCode::TypeMismatch,
                    "expected an array".into(),
                    &format!("{path}/{key}"),
                );
                &[]
            }
        }
    }

    fn strings(&mut self, map: &Map<String, Value>, key: &str, path: &str) -> Vec<String> {
        let items = self.array(map, key, path);
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            match item {
                Value::String(s) => out.push(s.clone()),
                _ => self.report(
                    DiagnosticCode::TypeMismatch,
                    "expected a string".into(),
                    &format!("{path}/{key}/{i}"),
                ),
            }
        }
        out
    }

    fn model(&mut self, root: &Value) -> Option<FeatureModel> {
        let map = self.object(root, "", &["schema", "name", "features"])?;
        match map.get("schema") {
            None => {}
            Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
            Some(v) => self.report(
                DiagnosticCode::UnsupportedSchema,
                format!("unsupported schema version {v} (expected {SCHEMA_VERSION})"),
                "/schema",
            ),
        }
        let name = self.string(map, "name", "");
        if !map.contains_key("features") {
            self.report(
                DiagnosticCode::MissingField,
                "missing field: features".into(),
                "/",
            );
        }
        let features: Vec<Option<Feature>> = self
            .array(map, "features", "")
            .iter()
            .enumerate()
            .map(|(i, f)| self.feature(f, &format!("/features/{i}")))
            .collect();

        let mut first_seen: HashMap<&str, usize> = HashMap::new();
        for (i, f) in features.iter().enumerate() {
            if let Some(f) = f {
                if let Some(prev) = first_seen.insert(&f.name, i) {
                    first_seen.insert(&f.name, prev);
                    let mut d = Diagnostic::error(
                        DiagnosticCode::DuplicateFeature,
                        format!("feature {} is declared more than once", f.name),
                    )
                    .at_path(format!("/features/{i}/name"));
                    d.feature = Some(f.name.clone());
                    self.diagnostics.push(d);
                }
            }
        }

        let name = name?;
        let features: Option<Vec<Feature>> = features.into_iter().collect();
        Some(FeatureModel::new(name, features?))
    }

    fn feature(&mut self, value: &Value, path: &str) -> Option<Feature> {
        let map = self.object(
            value,
            path,
            &[
                "name",
                "attributes",
                "decompositions",
                "constraints",
                "included_in",
            ],
        )?;
        let name = self.string(map, "name", path);
        let mut ok = true;

        let mut attributes = Vec::new();
        for (i, a) in self.array(map, "attributes", path).iter().enumerate() {
            let p = format!("{path}/attributes/{i}");
            let Some(am) = self.object(a, &p, &["key", "values"]) else {
                ok = false;
                continue;
            };
            if !am.contains_key("values") {
                self.report(
                    DiagnosticCode::MissingField,
                    "missing field: values".into(),
                    &p,
                );
            }
            let values = self.strings(am, "values", &p);
            match self.string(am, "key", &p) {
                Some(key) => attributes.push(Attribute { key, values }),
                None => ok = false,
            }
        }

        let mut decompositions = Vec::new();
        for (i, d) in self.array(map, "decompositions", path).iter().enumerate() {
            match self.decomposition(d, &format!("{path}/decompositions/{i}")) {
                Some(d) => decompositions.push(d),
                None => ok = false,
            }
        }

        let mut constraints = Vec::new();
        for (i, c) in self.array(map, "constraints", path).iter().enumerate() {
            let p = format!("{path}/constraints/{i}");
            let Some(cm) = self.object(c, &p, &["kind", "target"]) else {
                ok = false;
                continue;
            };
            let kind = self.string(cm, "kind", &p).and_then(|k| match k.as_str() {
                "imply" => Some(ConstraintKind::Imply),
                "exclude" => Some(ConstraintKind::Exclude),
                "reject" => Some(ConstraintKind::Reject),
                other => {
                    self.report(
                        DiagnosticCode::TypeMismatch,
                        format!("unknown constraint kind {other:?}"),
                        &format!("{p}/kind"),
                    );
                    None
                }
            });
            let target = self.string(cm, "target", &p);
            match (kind, target) {
                (Some(kind), Some(target)) => constraints.push(Constraint { kind, target }),
                _ => ok = false,
            }
        }

        let included_in = self.strings(map, "included_in", path);
        let name = name?;
        ok.then_some(Feature {
            name,
            attributes,
            decompositions,
            constraints,
            included_in,
        })
    }

    fn decomposition(&mut self, value: &Value, path: &str) -> Option<Decomposition> {
        let kind = value
            .get("kind")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        let allowed: &[&str] = match kind.as_str() {
            "and" | "xor" | "or" => &["kind", "children"],
            "select" => &["kind", "base", "variations"],
            "default" => &["kind", "target"],
            _ => &["kind"],
        };
        let map = self.object(value, path, allowed)?;
        let require = |dec: &mut Self, key: &str| {
            if !map.contains_key(key) {
                dec.report(
                    DiagnosticCode::MissingField,
                    format!("missing field: {key}"),
                    path,
                );
            }
        };
        match kind.as_str() {
            "and" | "xor" | "or" => {
                require(self, "children");
                let group = match kind.as_str() {
                    "and" => GroupKind::And,
                    "xor" => GroupKind::Xor,
                    _ => GroupKind::Or,
                };
                Some(Decomposition::Group {
                    kind: group,
                    children: self.strings(map, "children", path),
                })
            }
            "select" => {
                require(self, "variations");
                let variations = self.strings(map, "variations", path);
                let base = self.string(map, "base", path)?;
                Some(Decomposition::Select { base, variations })
            }
            "default" => Some(Decomposition::Default {
                target: self.string(map, "target", path)?,
            }),
            _ => {
                if map.contains_key("kind") {
                    self.report(
                        DiagnosticCode::TypeMismatch,
                        format!("unknown decomposition kind {kind:?}"),
                        &format!("{path}/kind"),
                    );
                } else {
                    self.report(
                        DiagnosticCode::MissingField,
                        "missing field: kind".into(),
                        path,
                    );
                }
                None
            }
        }
    }
}

fn pointer_escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// Inverse of [`to_json`]. Unknown keys, missing fields, wrong types, and
/// duplicate feature names are reported with JSON-pointer paths.
pub fn from_json(text: &str) -> Result<FeatureModel, Vec<Diagnostic>> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        vec![Diagnostic::error(
            DiagnosticCode::InvalidJson,
            format!(
                "invalid JSON at line {}, column {}: {e}",
                e.line(),
                e.column()
            ),
        )]
    })?;
    let mut decoder = Decoder {
        diagnostics: Vec::new(),
    };
    let model = decoder.model(&root);
    match model {
        Some(m) if decoder.diagnostics.is_empty() => Ok(m),
        _ => Err(decoder.diagnostics),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FeatureModel {
        FeatureModel::new(
            "List",
            vec![
                Feature::new("St-Queue")
                    .with_decomposition(Decomposition::select("List", ["static_queue"]))
                    .with_decomposition(Decomposition::default_to("static_queue"))
                    .with_constraint(ConstraintKind::Reject, "List"),
                Feature::new("List"),
                Feature::new("static_queue")
                    .with_attribute(Attribute::new("variation", ["str", "st beh"]))
                    .with_decomposition(Decomposition::group(GroupKind::Xor, ["List"]))
                    .included_in("St-Queue"),
            ],
        )
    }

    #[test]
    fn empty_model() {
        assert_eq!(
            to_json(&FeatureModel::empty("M")),
            r#"{"schema":1,"name":"M","features":[]}"#
        );
        assert_eq!(
            from_json(r#"{"name":"M","features":[]}"#).unwrap(),
            FeatureModel::empty("M")
        );
    }

    #[test]
    fn round_trip() {
        let m = sample();
        let text = to_json(&m);
        assert!(text.contains(r#""included_in":["St-Queue"]"#));
        assert_eq!(from_json(&text).unwrap(), m);
    }

    #[test]
    fn missing_name() {
        let diags = from_json("{}").unwrap_err();
        assert!(diags
            .iter()
            .any(|d| d.message == "missing field: name" && d.code == DiagnosticCode::MissingField));
    }

    #[test]
    fn duplicate_features() {
        let diags =
            from_json(r#"{"name":"M","features":[{"name":"A"},{"name":"B"},{"name":"A"}]}"#)
                .unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagnosticCode::DuplicateFeature);
        assert_eq!(diags[0].path.as_deref(), Some("/features/2/name"));
    }

    #[test]
    fn unknown_keys_and_types_have_paths() {
        let text = r#"{"name":"M","extra":1,"features":[
            {"name":"A","constraints":[{"kind":"imply","target":3}],"decompositions":[{"kind":"and","children":["B"],"x":0}]}
        ]}"#;
        let diags = from_json(text).unwrap_err();
        let paths: Vec<_> = diags
            .iter()
            .map(|d| (d.code, d.path.clone().unwrap()))
            .collect();
        assert!(paths.contains(&(DiagnosticCode::UnknownField, "/extra".into())));
        assert!(paths.contains(&(
            DiagnosticCode::UnknownField,
            "/features/0/decompositions/0/x".into()
        )));
        assert!(paths.contains(&(
            DiagnosticCode::TypeMismatch,
            "/features/0/constraints/0/target".into()
        )));
    }

    #[test]
    fn schema_version_and_syntax() {
        let diags = from_json(r#"{"schema":2,"name":"M","features":[]}"#).unwrap_err();
        assert_eq!(diags[0].code, DiagnosticCode::UnsupportedSchema);
        let diags = from_json("{").unwrap_err();
        assert_eq!(diags[0].code, DiagnosticCode::InvalidJson);
    }
}
