mod common;

use descsel::assets::{fig14, fig16};
use descsel::features::{FeatureValue, FeatureVector};
use descsel::rules::classify;
use descsel::ClassLabel;

use common::*;

#[test]
fn asset_condition_values_fit_registry_types() {
    assert_types_agree(&fig14());
    assert_types_agree(&fig16());
}

#[test]
fn fig14_each_rule_and_default() {
    let rl = fig14();
    assert_each_rule_reachable(&rl, &[]);
    assert_eq!(classify(&rl, &FeatureVector::default()), ClassLabel::CPQ);
}

#[test]
fn fig16_each_rule_and_default() {
    let rl = fig16();
    let unknown: Vec<usize> =
        rl.rules.iter().enumerate().filter(|(_, r)| r.conditions.iter().any(|c| c.index().is_none())).map(|(i, _)| i).collect();
    assert_eq!(unknown.len(), 1);
    assert_each_rule_reachable(&rl, &unknown);
    assert_eq!(classify(&rl, &FeatureVector::default()), ClassLabel::CPQ);
}

#[test]
fn fig14_determinate_colormatch_says_type_only() {
    let rl = fig14();
    let mut v = FeatureVector::default();
    v.set("prev-solution-size", FeatureValue::sym("determinate"));
    v.set("colormatch-constraintpresence", FeatureValue::sym("explicit"));
    // values that keep the earlier rules false
    v.set("goal", FeatureValue::sym("selecttable"));
    v.set("reference-relation", FeatureValue::sym("coref"));
    v.set("colorlimit", FeatureValue::Bool(false));
    v.set("color-contrast", FeatureValue::Bool(false));
    v.set("influence-on-listener", FeatureValue::sym("action-directive"));
    v.set("prev-commit-speaker", FeatureValue::sym("offer"));
    v.set("distance-of-last-state-in-turns", FeatureValue::num(1));
    for (i, r) in rl.rules.iter().take(15).enumerate() {
        assert!(!r.fires(&v), "rule {} fires", i + 1);
    }
    assert_eq!(rl.first_match(&v), Some(15));
    assert_eq!(classify(&rl, &v), ClassLabel::T);
}

#[test]
fn first_match_wins_over_later_rules() {
    let rl = fig14();
    // satisfies rule 8 (colorlimit -> CO) and rule 16 (-> T)
    let mut v = FeatureVector::default();
    v.set("colorlimit", FeatureValue::Bool(true));
    v.set("prev-solution-size", FeatureValue::sym("determinate"));
    v.set("colormatch-constraintpresence", FeatureValue::sym("explicit"));
    assert!(rl.rules[15].fires(&v));
    assert_eq!(classify(&rl, &v), ClassLabel::CO);

    let rl = fig16();
    // `color = unk AND speaker-pair = GARRETT-STEVE` -> O precedes `color = unk` -> T
    let mut v = FeatureVector::default();
    v.set("color", FeatureValue::sym("unk"));
    v.set("speaker-pair", FeatureValue::sym("garrett-steve"));
    assert_eq!(classify(&rl, &v), ClassLabel::O);
    v.set("speaker-pair", FeatureValue::sym("jon-julie"));
    assert_eq!(classify(&rl, &v), ClassLabel::T);
}

#[test]
fn fig16_problem_alias_and_numeric_bounds() {
    let rl = fig16();
    let mut v = FeatureVector::default();
    v.set("speaker-pair", FeatureValue::sym("dave-greg"));
    v.set("utterance-number", FeatureValue::num(25));
    v.set("problem-number", FeatureValue::num(1));
    assert_eq!(classify(&rl, &v), ClassLabel::CQ);
    v.set("utterance-number", FeatureValue::num(28));
    assert_eq!(classify(&rl, &v), ClassLabel::CPQ);
}
