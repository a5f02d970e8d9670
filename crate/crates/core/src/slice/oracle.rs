//! Brute-force reference implementation of slicing.
//!
//! Reads relations straight from the features (never the derived graph) and
//! grows each member set by naive fixed-point iteration: sweep every feature,
//! add whatever a qualifying relation reaches, repeat until nothing changes.
//! Quadratic or worse, which is fine for verification.

use std::collections::{BTreeSet, HashSet};

use super::{extract, resolve_query, Direction, Relation, SliceError, SliceResult};
use crate::model::{ConstraintKind, Decomposition, Feature, FeatureModel, GroupKind};
use crate::recognize::{recognize, Meaning};

/// Targets a forward slice may step to from `f`: and-children, selected base,
/// variations, default target, then implied features.
fn forward_targets(f: &Feature) -> Vec<&str> {
    let mut out: Vec<&str> = compulsory_children(f);
    out.extend(
        f.constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::Imply)
            .map(|c| c.target.as_str()),
    );
    out
}

fn compulsory_children(f: &Feature) -> Vec<&str> {
    let mut out = Vec::new();
    for d in &f.decompositions {
        match d {
            Decomposition::Group {
                kind: GroupKind::And,
                children,
            } => out.extend(children.iter().map(String::as_str)),
            Decomposition::Group { .. } => {}
            Decomposition::Select { base, variations } => {
                out.push(base.as_str());
                out.extend(variations.iter().map(String::as_str));
            }
            Decomposition::Default { target } => out.push(target.as_str()),
        }
    }
    out
}

fn implied(f: &Feature) -> Vec<&str> {
    f.constraints
        .iter()
        .filter(|c| c.kind == ConstraintKind::Imply)
        .map(|c| c.target.as_str())
        .collect()
}

fn forward_fixpoint<'m>(model: &'m FeatureModel, seeds: &[&'m str]) -> BTreeSet<&'m str> {
    let mut set: BTreeSet<&str> = seeds.iter().copied().collect();
    loop {
        let mut changed = false;
        for f in model.features() {
            if set.contains(f.name.as_str()) {
                for t in forward_targets(f) {
                    changed |= set.insert(t);
                }
            }
        }
        if !changed {
            return set;
        }
    }
}

fn ancestor_fixpoint<'m>(model: &'m FeatureModel, start: &'m str) -> BTreeSet<&'m str> {
    let mut set = BTreeSet::from([start]);
    loop {
        let mut changed = false;
        for p in model.features() {
            let structural = p.decompositions.iter().flat_map(|d| d.references());
            if structural.into_iter().any(|c| set.contains(c)) {
                changed |= set.insert(p.name.as_str());
            }
            if set.contains(p.name.as_str()) {
                for container in &p.included_in {
                    changed |= set.insert(container.as_str());
                }
            }
        }
        if !changed {
            return set;
        }
    }
}

fn drop_rejected<'m>(
    model: &'m FeatureModel,
    set: BTreeSet<&'m str>,
    protected: &[&str],
) -> HashSet<&'m str> {
    let mut rejected = BTreeSet::new();
    for f in model.features() {
        if set.contains(f.name.as_str()) {
            for c in &f.constraints {
                if c.kind == ConstraintKind::Reject {
                    rejected.insert(c.target.as_str());
                }
            }
        }
    }
    set.into_iter()
        .filter(|n| !rejected.contains(n) || protected.contains(n))
        .collect()
}

/// Same contract as [`slice`](super::slice), computed independently.
pub fn oracle_slice(
    model: &FeatureModel,
    query: &super::SliceQuery,
) -> Result<SliceResult, SliceError> {
    let query = resolve_query(model, query)?;
    let feature = model.feature(&query.feature).expect("resolved");
    let f = feature.name.as_str();

    let member_sets: Vec<HashSet<&str>> = match (query.direction, query.relation) {
        (Direction::Backward, _) => vec![ancestor_fixpoint(model, f).into_iter().collect()],
        (Direction::Forward, Relation::And) => {
            let mut children: Vec<&str> = Vec::new();
            for c in compulsory_children(feature) {
                if !children.contains(&c) {
                    children.push(c);
                }
            }
            if children.is_empty() {
                vec![drop_rejected(model, forward_fixpoint(model, &[f]), &[f])]
            } else {
                children
                    .into_iter()
                    .map(|child| {
                        let mut seeds = vec![child];
                        seeds.extend(implied(feature));
                        let mut set = forward_fixpoint(model, &seeds);
                        set.insert(f);
                        drop_rejected(model, set, &[f])
                    })
                    .collect()
            }
        }
        (Direction::Forward, Relation::Or) => {
            let alts: Vec<&str> = query.alternatives.iter().map(String::as_str).collect();
            let mut seeds = vec![f];
            seeds.extend(&alts);
            let mut set = forward_fixpoint(model, &seeds);
            for p in model.features() {
                for d in &p.decompositions {
                    if let Decomposition::Group {
                        kind: GroupKind::Or | GroupKind::Xor,
                        children,
                    } = d
                    {
                        if children.iter().any(|c| c == f)
                            && children.iter().any(|c| alts.contains(&c.as_str()))
                        {
                            set.insert(p.name.as_str());
                        }
                    }
                }
            }
            vec![drop_rejected(model, set, &seeds)]
        }
    };

    let slices = member_sets
        .iter()
        .enumerate()
        .map(|(i, members)| extract(model, members, i + 1))
        .collect();
    Ok(SliceResult {
        kind: recognize(feature),
        meaning: Meaning::of(feature),
        query,
        slices,
    })
}
