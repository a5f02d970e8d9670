//! Feature-model reverse engineering toolkit.
//!
//! The crate reads feature models written in a small textual DSL, recognizes
//! whether each feature is an elementary or a configuration feature, and
//! computes forward and backward graph slices of a model.
//!
//! ```
//! let text = "feature model M;
//!   feature A;
//!     relations
//!       decomposition and(B, C);
//!   end feature;
//!   feature B; end feature;
//!   feature C; end feature;
//! end fm M;";
//! let model = fmre::parse(text).unwrap();
//! let query: fmre::SliceQuery = "Slice A Forward AND".parse().unwrap();
//! let result = fmre::slice(&model, &query).unwrap();
//! assert_eq!(result.slices.len(), 2);
//! ```

pub mod export;
pub mod graph;
pub mod model;
pub mod recognize;
pub mod slice;
pub mod syntax;
pub mod validate;

pub use export::{from_json, to_dot, to_json, ExportFormat};
pub use graph::{
    ancestors, build_graph, dependents, Edge, EdgeLabel, FeatureGraph, GraphError, HIERARCHY_LABELS,
};
pub use model::{
    Attribute, Constraint, ConstraintKind, Decomposition, DecompositionKind, Feature, FeatureModel,
    GroupKind, LookupError,
};
pub use recognize::{feature_type_mining, match_pattern, recognize, FeatureKind, Meaning, Pattern};
pub use slice::oracle::oracle_slice;
pub use slice::{
    parent_slice, select_and, select_or, slice, Direction, Relation, SliceError, SliceQuery,
    SliceResult,
};
pub use syntax::{parse, print_canonical, tokenize, ParseError, SourceSpan, Token, TokenKind};
pub use validate::{has_errors, validate, Diagnostic, DiagnosticCode, Severity};
