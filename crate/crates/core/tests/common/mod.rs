//! Published tables used as fixed oracles by several test targets.
#![allow(dead_code)]

use descsel::eval::ConfusionMatrix;
use descsel::features::{registry, FeatureGroup, FeatureType, FeatureValue, FeatureVector};
use descsel::rules::{classify, CondValue, Condition, Op, Rule, RuleList};
use descsel::ClassLabel;

/// Held-out confusion matrix of the best combined model (40 examples); rows
/// are gold labels, columns predictions, both in this order.
pub const CONFUSION_LABELS: [&str; 15] =
    ["CPQ", "O", "COQ", "C", "CPO", "CO", "PO", "T", "OQ", "POQ", "CPOQ", "Q", "CP", "PQ", "CQ"];

pub const CONFUSION_COUNTS: [[usize; 15]; 15] = [
    [7, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 1, 4, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 6, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
];

/// Per-class recall, precision and fallout in percent, and F, as printed.
pub const CLASS_METRICS: [(&str, f64, f64, f64, f64); 15] = [
    ("CPQ", 100.00, 63.64, 12.12, 0.78),
    ("CPO", 66.67, 100.00, 0.00, 0.80),
    ("CPOQ", 100.00, 100.00, 0.00, 1.00),
    ("T", 50.00, 100.00, 0.00, 0.67),
    ("CP", 100.00, 100.00, 0.00, 1.00),
    ("O", 100.00, 60.00, 5.41, 0.75),
    ("CO", 66.67, 100.00, 0.00, 0.80),
    ("C", 0.00, 0.00, 5.13, 0.00),
    ("CQ", 0.00, 100.00, 0.00, 0.00),
    ("COQ", 100.00, 100.00, 0.00, 1.00),
    ("PO", 50.00, 100.00, 0.00, 0.67),
    ("OQ", 66.67, 50.00, 5.41, 0.57),
    ("Q", 0.00, 0.00, 2.50, 0.00),
    ("POQ", 0.00, 100.00, 0.00, 0.00),
    ("PQ", 0.00, 100.00, 0.00, 0.00),
];

/// Class frequencies over the 393 descriptions, most frequent first.
pub const CLASS_COUNTS: [(&str, usize); 16] = [
    ("CPQ", 64),
    ("CPO", 56),
    ("CPOQ", 46),
    ("T", 42),
    ("CP", 41),
    ("O", 32),
    ("CO", 31),
    ("C", 18),
    ("CQ", 14),
    ("COQ", 13),
    ("OQ", 12),
    ("PO", 11),
    ("Q", 5),
    ("P", 4),
    ("PQ", 2),
    ("POQ", 2),
];

pub fn label(s: &str) -> ClassLabel {
    s.parse().unwrap()
}

pub fn published_confusion() -> ConfusionMatrix {
    ConfusionMatrix::from_grid(
        CONFUSION_LABELS.iter().map(|s| label(s)).collect(),
        CONFUSION_COUNTS.iter().map(|r| r.to_vec()).collect(),
    )
    .unwrap()
}

/// A label sequence with the published class frequencies.
pub fn published_labels() -> Vec<ClassLabel> {
    CLASS_COUNTS.iter().flat_map(|(l, n)| std::iter::repeat_n(label(l), *n)).collect()
}

/// Largest absolute gap between computed and printed Table-4 cells; percent
/// cells are compared as fractions.
pub fn worst_metric_gap() -> (f64, String) {
    let computed = descsel::eval::per_class_metrics(&published_confusion());
    let mut worst = (0.0, String::new());
    for (name, r, p, f, f1) in CLASS_METRICS {
        let m = computed.iter().find(|m| m.label == label(name)).expect("class present");
        for (what, got, want) in [
            ("recall", m.recall, r / 100.0),
            ("precision", m.precision, p / 100.0),
            ("fallout", m.fallout, f / 100.0),
            ("F", m.f1, f1),
        ] {
            let gap = (got - want).abs();
            if gap > worst.0 {
                worst = (gap, format!("{name} {what}: {got:.4} vs {want:.4}"));
            }
        }
    }
    worst
}

pub const FAMILIARITY: &[&str] = &["type-mk", "color-mk", "owner-mk", "price-mk", "quantity-mk", "reference-relation"];
pub const INHERENT: &[&str] = &[
    "utterance-number", "speaker-pair", "speaker", "problem-number", "type", "color", "owner", "price", "quantity",
];
pub const CONCEPTUAL_PACT: &[&str] = &[
    "distance-last-ref", "distance-last-ref-in-turns", "number-prev-mentions", "speaker-of-last-ref",
    "distance-last-related", "color-in-last-exp", "type-in-last-exp", "owner-in-last-exp", "price-in-last-exp",
    "quantity-in-last-exp", "type-in-last-turn", "color-in-last-turn", "owner-in-last-turn", "price-in-last-turn",
    "quantity-in-last-turn", "initial-in-last-turn", "freq-type-expressed", "freq-color-expressed",
    "freq-price-expressed", "freq-owner-expressed", "freq-quantity-expressed", "cp-given-last-2", "cp-given-last-3",
];
pub const CONTRAST: &[&str] = &[
    "type-distractors", "color-distractors", "owner-distractors", "price-distractors", "quantity-distractors",
    "majority-type", "majority-type-freq", "majority-color", "majority-color-freq", "majority-price",
    "majority-price-freq", "majority-owner", "majority-owner-freq", "majority-quantity", "majority-quantity-freq",
];
pub const INTENTIONAL: &[&str] = &[
    "goal", "colormatch", "colormatch-constraintpresence", "pricelimit", "pricelimit-constraintpresence",
    "priceevaluator", "priceevaluator-constraintpresence", "colorlimit", "colorlimit-constraintpresence",
    "priceupperlimit", "priceupperlimit-constraintpresence", "influence-on-listener", "commit-speaker",
    "solution-size", "prev-influence-on-listener", "prev-commit-speaker", "prev-solution-size",
    "distance-of-last-state-in-utterances", "distance-of-last-state-in-turns", "ref-made-in-prev-action-state",
    "speaker-of-last-state", "prev-ref-state", "prev-state-type-expressed", "prev-state-color-expressed",
    "prev-state-owner-expressed", "prev-state-price-expressed", "prev-state-quantity-expressed", "color-contrast",
    "price-contrast",
];

pub fn feature_lists() -> [(FeatureGroup, &'static [&'static str]); 5] {
    [
        (FeatureGroup::Familiarity, FAMILIARITY),
        (FeatureGroup::Inherent, INHERENT),
        (FeatureGroup::ConceptualPact, CONCEPTUAL_PACT),
        (FeatureGroup::Contrast, CONTRAST),
        (FeatureGroup::IntentionalInfluences, INTENTIONAL),
    ]
}

/// The least value satisfying every condition of `rule` on each feature it
/// tests, over an otherwise all-`na` vector.
pub fn witness(rule: &Rule) -> FeatureVector {
    let mut v = FeatureVector::default();
    let mut by_feature: Vec<(usize, Vec<&Condition>)> = Vec::new();
    for c in &rule.conditions {
        let Some(i) = c.index() else { continue };
        match by_feature.iter_mut().find(|(j, _)| *j == i) {
            Some((_, cs)) => cs.push(c),
            None => by_feature.push((i, vec![c])),
        }
    }
    for (i, cs) in by_feature {
        let lo = cs.iter().filter(|c| c.op == Op::Ge).filter_map(|c| num(&c.value)).fold(f64::NEG_INFINITY, f64::max);
        let hi = cs.iter().filter(|c| c.op == Op::Le).filter_map(|c| num(&c.value)).fold(f64::INFINITY, f64::min);
        let value = match cs.iter().find(|c| c.op == Op::Eq) {
            Some(c) => match &c.value {
                CondValue::Sym(s) => FeatureValue::Sym(s.to_lowercase()),
                CondValue::Num(n) => FeatureValue::Num(*n),
                CondValue::Bool(b) => FeatureValue::Bool(*b),
                CondValue::Na => FeatureValue::Na,
            },
            None if lo.is_finite() => FeatureValue::Num(lo),
            None => FeatureValue::Num(hi),
        };
        v.values[i] = value;
    }
    v
}

fn num(c: &CondValue) -> Option<f64> {
    match c {
        CondValue::Num(n) => Some(*n),
        _ => None,
    }
}

/// Every resolvable condition compares against a value of the registry type.
pub fn assert_types_agree(rl: &RuleList) {
    for r in &rl.rules {
        for c in &r.conditions {
            let Some(i) = c.index() else { continue };
            let ok = match (registry()[i].ftype, &c.value) {
                (_, CondValue::Na) => c.op == Op::Eq,
                (FeatureType::Boolean, CondValue::Bool(_)) => c.op == Op::Eq,
                (FeatureType::Symbolic, CondValue::Sym(_)) => c.op == Op::Eq,
                (FeatureType::Numeric, CondValue::Num(_)) => true,
                _ => false,
            };
            assert!(ok, "`{c}` does not fit a {:?} feature", registry()[i].ftype);
        }
    }
}

/// For every rule, its witness vector is claimed by exactly that rule: no
/// earlier rule fires on it. Rules mentioning unknown features can never
/// fire and fall through.
pub fn assert_each_rule_reachable(rl: &RuleList, unreachable: &[usize]) {
    for (i, rule) in rl.rules.iter().enumerate() {
        let v = witness(rule);
        let first = rl.first_match(&v);
        if unreachable.contains(&i) {
            assert_ne!(first, Some(i), "rule {} should never fire", i + 1);
            continue;
        }
        assert_eq!(first, Some(i), "rule {} `{rule}` is shadowed", i + 1);
        assert_eq!(classify(rl, &v), rule.label);
    }
}

