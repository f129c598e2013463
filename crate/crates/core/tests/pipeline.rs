use descsel::corpus::{parse_corpus, serialize_corpus, validate, Corpus};
use descsel::features::{read_dataset, registry, write_dataset, FeatureGroup, FeatureValue, GroupSet};
use descsel::synth::{generate, SynthParams};
use descsel::{extract_examples, ClassLabel, FocusModel};

const FIG1: &str = include_str!("data/fig1.coco");

fn fig1() -> Corpus {
    parse_corpus(FIG1).expect("fixture parses and validates")
}

#[test]
fn excerpt_yields_one_row_per_mention() {
    let ex = extract_examples(&fig1(), GroupSet::all(), Some(FocusModel::Segment)).unwrap();
    assert_eq!(ex.len(), 13);
    let labels: Vec<&str> = ex.iter().map(|e| e.label.as_str()).collect();
    assert_eq!(labels, ["CPO", "CPO", "PO", "CPO", "PO", "CO", "PO", "C", "C", "CPO", "C", "T", "C"]);
    assert_eq!(ex[0].provenance.utterance, 37);
    assert_eq!(ex[0].label, ClassLabel::CPO);
    let utts: Vec<u32> = ex.iter().map(|e| e.provenance.utterance).collect();
    assert_eq!(utts, [37, 38, 39, 40, 42, 43, 44, 47, 47, 48, 51, 51, 52]);
}

#[test]
fn excerpt_feature_spot_checks() {
    let ex = extract_examples(&fig1(), GroupSet::all(), Some(FocusModel::Segment)).unwrap();
    let get = |i: usize, f: &str| ex[i].features.get(f).unwrap().clone();
    assert_eq!(get(0, "reference-relation"), FeatureValue::sym("initial"));
    assert_eq!(get(0, "speaker"), FeatureValue::sym("G"));
    assert_eq!(get(0, "utterance-number"), FeatureValue::num(37));
    assert_eq!(get(0, "influence-on-listener"), FeatureValue::sym("action-directive"));
    // the rug at 40 was last described at 37, three utterances earlier
    assert_eq!(get(3, "distance-last-ref"), FeatureValue::num(3));
    assert_eq!(get(3, "number-prev-mentions"), FeatureValue::num(1));
    assert_eq!(get(3, "color-in-last-exp"), FeatureValue::Bool(true));
    assert_eq!(get(4, "color-in-last-exp"), FeatureValue::Bool(true));
    assert_eq!(get(7, "color-in-last-exp"), FeatureValue::Bool(false));
}

#[test]
fn corpus_text_round_trips() {
    let c = fig1();
    let text = serialize_corpus(&c);
    assert_eq!(parse_corpus(&text).unwrap(), c);
    assert_eq!(serialize_corpus(&parse_corpus(&text).unwrap()), text);
}

#[test]
fn dataset_round_trips_and_masks_groups() {
    let c = fig1();
    let ex = extract_examples(&c, GroupSet::all(), Some(FocusModel::OneUtterance)).unwrap();
    let mut buf = Vec::new();
    write_dataset(&ex, &mut buf).unwrap();
    let header = String::from_utf8(buf.clone()).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header.split(',').count(), 83);
    let rows = read_dataset(buf.as_slice()).unwrap();
    assert_eq!(rows.len(), ex.len());
    for (r, e) in rows.iter().zip(&ex) {
        assert_eq!(r.features, e.features);
        assert_eq!(r.label, Some(e.label));
    }

    let fam: GroupSet = "fam".parse().unwrap();
    for e in extract_examples(&c, fam, None).unwrap() {
        for (def, v) in registry().iter().zip(&e.features.values) {
            if def.group != FeatureGroup::Familiarity {
                assert_eq!(v, &FeatureValue::Na, "{}", def.name);
            }
        }
    }
}

#[test]
fn contrast_without_focus_is_rejected() {
    assert!(extract_examples(&fig1(), GroupSet::all(), None).is_err());
}

/// Cutting the dialogue after any utterance leaves the features of every
/// earlier mention unchanged: nothing said later leaks backwards.
fn assert_prefix_stable(c: &Corpus, focus: FocusModel) {
    let full = extract_examples(c, GroupSet::all(), Some(focus)).unwrap();
    for (di, d) in c.dialogues.iter().enumerate() {
        for cut in 1..d.utterances.len() {
            let mut prefix = c.clone();
            prefix.dialogues = vec![d.clone()];
            prefix.dialogues[0].utterances.truncate(cut);
            let part = extract_examples(&prefix, GroupSet::all(), Some(focus)).unwrap();
            let matching: Vec<_> = full.iter().filter(|e| e.provenance.dialogue == c.dialogues[di].id).collect();
            for (p, f) in part.iter().zip(matching) {
                assert_eq!(p.provenance, f.provenance);
                assert_eq!(p.features, f.features, "{:?} under {focus}", p.provenance);
            }
        }
    }
}

#[test]
fn features_do_not_depend_on_later_utterances() {
    for focus in FocusModel::ALL {
        assert_prefix_stable(&fig1(), *focus);
    }
    let synth = generate(&SynthParams { n_dialogues: 2, seed: 5, ..SynthParams::default() }).unwrap();
    assert_prefix_stable(&synth, FocusModel::Segment);
}

#[test]
fn synthetic_corpus_round_trips_through_text() {
    let c = generate(&SynthParams { seed: 3, ..SynthParams::default() }).unwrap();
    assert!(validate(&c).is_empty());
    let text = serialize_corpus(&c);
    let back = parse_corpus(&text).unwrap();
    assert_eq!(back, c);
    let n = c.mention_count();
    assert!((300..=500).contains(&n), "{n} mentions");
}
