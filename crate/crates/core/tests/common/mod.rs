//! Random well-formed models for property and acceptance tests.
#![allow(dead_code)]

use std::path::PathBuf;

use fmre::{
    Attribute, ConstraintKind, Decomposition, Direction, Feature, FeatureModel, GroupKind,
    Relation, SliceQuery,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MAX_FEATURES: usize = 30;

pub fn corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/list.fm")
}

pub fn corpus_text() -> String {
    std::fs::read_to_string(corpus_path()).expect("corpus readable")
}

pub fn corpus() -> FeatureModel {
    fmre::parse(&corpus_text()).expect("corpus parses")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const PREFIXES: [&str; 6] = ["f", "Node", "st-", "dyn_", "Q", "opt-x"];
const VALUES: [&str; 8] = [
    "array",
    "linked",
    "needs quoting",
    "and",
    "Tab\there",
    "quote\"d",
    "",
    "ünï",
];

fn name_for(i: usize, salt: usize) -> String {
    format!("{}{i}", PREFIXES[(i + salt) % PREFIXES.len()])
}

fn pick_distinct(rng: &mut impl Rng, pool: &[usize], max: usize) -> Vec<usize> {
    let k = rng.gen_range(1..=max.min(pool.len()));
    pool.choose_multiple(rng, k).copied().collect()
}

/// A well-formed model with `0..=max` features. Structural references always
/// point from a lower index to a higher one, and containers sit at a lower
/// index than their members, so the hierarchy is acyclic by construction.
pub fn model_with(rng: &mut impl Rng, max: usize) -> FeatureModel {
    let n = rng.gen_range(0..=max);
    let salt = rng.gen_range(0..PREFIXES.len());
    let names: Vec<String> = (0..n).map(|i| name_for(i, salt)).collect();
    let features = (0..n).map(|i| feature(rng, &names, i)).collect();
    FeatureModel::new(format!("M{}", rng.gen_range(0..1000)), features)
}

pub fn model(rng: &mut impl Rng) -> FeatureModel {
    model_with(rng, MAX_FEATURES)
}

fn feature(rng: &mut impl Rng, names: &[String], i: usize) -> Feature {
    let n = names.len();
    let mut f = Feature::new(names[i].clone());
    let later: Vec<usize> = (i + 1..n).collect();
    let earlier: Vec<usize> = (0..i).collect();
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let name = |j: &usize| names[*j].clone();

    for k in 0..rng.gen_range(0..3) {
        let key = ["role", "variation", "note"][k];
        let values: Vec<&str> = (0..rng.gen_range(1..3))
            .map(|_| *VALUES.choose(rng).unwrap())
            .collect();
        f = f.with_attribute(Attribute::new(key, values));
    }
    if !later.is_empty() && rng.gen_bool(0.5) {
        let kind = *[
            GroupKind::And,
            GroupKind::And,
            GroupKind::Xor,
            GroupKind::Or,
        ]
        .choose(rng)
        .unwrap();
        let children = pick_distinct(rng, &later, 4);
        f = f.with_decomposition(Decomposition::group(kind, children.iter().map(name)));
    }
    if later.len() >= 2 && rng.gen_bool(0.2) {
        let picked = pick_distinct(rng, &later, 4);
        if picked.len() >= 2 {
            let base = name(&picked[0]);
            f = f.with_decomposition(Decomposition::select(base, picked[1..].iter().map(name)));
        }
    }
    if !later.is_empty() && rng.gen_bool(0.15) {
        f = f.with_decomposition(Decomposition::default_to(name(later.choose(rng).unwrap())));
    }
    if !others.is_empty() {
        for kind in [
            ConstraintKind::Imply,
            ConstraintKind::Exclude,
            ConstraintKind::Reject,
        ] {
            if rng.gen_bool(0.2) {
                f = f.with_constraint(kind, name(others.choose(rng).unwrap()));
            }
        }
    }
    if !earlier.is_empty() && rng.gen_bool(0.2) {
        for c in pick_distinct(rng, &earlier, 2) {
            f = f.included_in(name(&c));
        }
    }
    f
}

/// A query over an existing feature of `model`, which must be non-empty.
pub fn query(rng: &mut impl Rng, model: &FeatureModel) -> SliceQuery {
    let names: Vec<&str> = model.feature_names().collect();
    let f = *names.choose(rng).unwrap();
    let direction = if rng.gen_bool(0.5) {
        Direction::Forward
    } else {
        Direction::Backward
    };
    let relation = if rng.gen_bool(0.5) {
        Relation::And
    } else {
        Relation::Or
    };
    let q = SliceQuery::new(f, direction, relation);
    if relation == Relation::And {
        return q;
    }
    let pool: Vec<&str> = names.iter().copied().filter(|&n| n != f).collect();
    let k = rng.gen_range(0..=pool.len().min(2));
    q.with_alternatives(pool.choose_multiple(rng, k).copied())
}

/// A feature that neither references nor is referenced by `avoid`.
pub fn unrelated_feature(rng: &mut impl Rng, model: &FeatureModel, avoid: &str) -> Feature {
    let pool: Vec<String> = model
        .feature_names()
        .filter(|&n| n != avoid)
        .map(str::to_string)
        .collect();
    let mut f = Feature::new(format!("extra{}", model.len()));
    if !pool.is_empty() {
        let children: Vec<String> = pool
            .choose_multiple(rng, 2.min(pool.len()))
            .cloned()
            .collect();
        let containers: Vec<&String> = pool.iter().filter(|n| !children.contains(n)).collect();
        f = f.with_constraint(ConstraintKind::Reject, pool.choose(rng).unwrap().clone());
        if let Some(c) = containers.choose(rng) {
            f = f.included_in((*c).clone());
        }
        f = f.with_decomposition(Decomposition::group(GroupKind::And, children));
    }
    f
}
