mod common;

use std::collections::HashSet;

use descsel::corpus::{Attr, AttrSet};
use descsel::eval::{majority_baseline, per_class_metrics};
use descsel::features::{feature_index, registry, REFERENCE_CLASS_COUNTS};
use descsel::{encode_class, ClassLabel};

use common::*;

#[test]
fn class_metrics_reproduce_from_confusion_matrix() {
    let (gap, at) = worst_metric_gap();
    assert!(gap <= 0.005, "worst cell {at}");
}

#[test]
fn spot_cells() {
    let m = per_class_metrics(&published_confusion());
    let cpq = m.iter().find(|c| c.label == ClassLabel::CPQ).unwrap();
    assert!((cpq.recall - 1.0).abs() < 1e-12);
    assert!((cpq.precision - 7.0 / 11.0).abs() < 1e-12);
    assert!((cpq.fallout - 4.0 / 33.0).abs() < 1e-12);
    assert!((cpq.f1 - 0.7778).abs() < 1e-4);
    let cq = m.iter().find(|c| c.label == ClassLabel::CQ).unwrap();
    assert_eq!((cq.recall, cq.precision, cq.f1), (0.0, 1.0, 0.0));
    assert_eq!(published_confusion().total(), 40);
}

#[test]
fn confusion_totals_and_weighted_recall() {
    let c = published_confusion();
    let rows: usize = (0..c.labels.len()).map(|i| c.row_total(i)).sum();
    assert_eq!(rows, c.total());
    let weighted: f64 = per_class_metrics(&c)
        .iter()
        .enumerate()
        .map(|(i, m)| m.recall * c.row_total(i) as f64)
        .sum::<f64>()
        / c.total() as f64;
    assert!((weighted - c.accuracy()).abs() < 1e-12);
    assert!((c.accuracy() - 29.0 / 40.0).abs() < 1e-12);
}

#[test]
fn majority_of_published_counts() {
    let labels = published_labels();
    assert_eq!(labels.len(), 393);
    assert_eq!(majority_baseline(&labels), Some((ClassLabel::CPQ, 64.0 / 393.0)));
}

#[test]
fn shipped_class_counts_match() {
    for ((name, n), (label, m)) in CLASS_COUNTS.iter().zip(REFERENCE_CLASS_COUNTS.iter()) {
        assert_eq!((label.as_str(), *m), (*name, *n));
    }
    let order: Vec<&str> = ClassLabel::ALL.iter().map(|c| c.as_str()).collect();
    let published: Vec<&str> = CLASS_COUNTS.iter().map(|(l, _)| *l).collect();
    assert_eq!(order, published);
}

#[test]
fn encoding_is_a_bijection() {
    let attrs = [Attr::Color, Attr::Price, Attr::Owner, Attr::Quantity];
    let mut seen = HashSet::new();
    for mask in 0..16u8 {
        let mut s = AttrSet::default().with(Attr::Type);
        for (i, a) in attrs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s.insert(*a);
            }
        }
        let label = encode_class(s);
        assert!(seen.insert(label), "collision at {label}");
        assert_eq!(label.attrs().without(Attr::Type), s.without(Attr::Type));
    }
    assert_eq!(seen.len(), 16);
    let utt37 = AttrSet::default().with(Attr::Type).with(Attr::Color).with(Attr::Price).with(Attr::Owner);
    assert_eq!(encode_class(utt37), ClassLabel::CPO);
}

#[test]
fn registry_matches_published_feature_lists() {
    assert_eq!(registry().len(), 82);
    let mut total = 0;
    for (g, names) in feature_lists() {
        let in_registry: Vec<&str> = registry().iter().filter(|d| d.group == g).map(|d| d.name).collect();
        let mut a = in_registry.clone();
        let mut b = names.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b, "{g}");
        for n in names {
            assert!(feature_index(n).is_some());
        }
        total += names.len();
    }
    assert_eq!(total, 82);
}
