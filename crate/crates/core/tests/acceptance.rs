//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use descsel::assets::{fig14, fig16};
use descsel::corpus::{Attr, AttrSet};
use descsel::eval::{
    cross_validate_with, majority_baseline, paired_t, report, run_experiment, ExperimentConfig, FoldPlan,
};
use descsel::features::{group_size, registry, FeatureValue, FeatureVector, FEATURE_COUNT};
use descsel::rules::{classify, foil_gain, MajorityLearner, RipperLearner};
use descsel::synth::{generate, SynthParams};
use descsel::{encode_class, extract_examples, ClassLabel, GroupSet, LearnerParams};

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (gap, at) = worst_metric_gap();
    let elapsed = start.elapsed();
    outcome(
        gap <= 0.005 && elapsed < Duration::from_secs(1),
        format!("per-class metrics from the 40-example confusion matrix; worst gap {gap:.5} ({at}); {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let sizes: Vec<usize> = feature_lists().iter().map(|(g, _)| group_size(*g)).collect();
    let mut mismatches = Vec::new();
    for (g, names) in feature_lists() {
        let got: Vec<&str> = registry().iter().filter(|d| d.group == g).map(|d| d.name).collect();
        if got != names {
            mismatches.push(g.to_string());
        }
    }
    outcome(
        FEATURE_COUNT == 82 && registry().len() == 82 && sizes == [6, 9, 23, 15, 29] && mismatches.is_empty(),
        format!("{} features, group sizes {sizes:?}, name mismatches in {mismatches:?}", registry().len()),
    )
}

fn criterion_3() -> Outcome {
    let attrs = [Attr::Color, Attr::Price, Attr::Owner, Attr::Quantity];
    let mut images = std::collections::BTreeSet::new();
    for mask in 0..16u8 {
        let mut s = AttrSet::default().with(Attr::Type);
        for (i, a) in attrs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s.insert(*a);
            }
        }
        images.insert(encode_class(s));
    }
    let all: std::collections::BTreeSet<ClassLabel> = ClassLabel::ALL.iter().copied().collect();
    let utt37 = encode_class(AttrSet::default().with(Attr::Type).with(Attr::Color).with(Attr::Price).with(Attr::Owner));
    outcome(images == all && utt37 == ClassLabel::CPO, format!("{} distinct images of 16 subsets; {{type,color,price,owner}} -> {utt37}", images.len()))
}

fn criterion_4() -> Outcome {
    let got = majority_baseline(&published_labels());
    outcome(got == Some((ClassLabel::CPQ, 64.0 / 393.0)), format!("majority over 393 published labels: {got:?}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let p = SynthParams::default();
    let corpus = generate(&p).expect("generator");
    let examples = extract_examples(&corpus, GroupSet::all(), Some(p.focus)).expect("features");
    let params = LearnerParams::default();
    let rl = descsel::train(&examples, &params);
    let train_acc =
        examples.iter().filter(|e| classify(&rl, &e.features) == e.label).count() as f64 / examples.len() as f64;
    let plan = FoldPlan::new(examples.len(), 25, 0).expect("plan");
    let learned = cross_validate_with(&examples, &RipperLearner { params }, &plan).expect("cv");
    let majority = cross_validate_with(&examples, &MajorityLearner, &plan).expect("cv");
    let t = paired_t(&learned.per_fold_accuracy, &majority.per_fold_accuracy).expect("t");
    let elapsed = start.elapsed();
    let pass = train_acc == 1.0
        && learned.mean >= 0.95
        && t.t > 0.0
        && t.significant_01
        && t.df == 24
        && elapsed < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "{} mentions, {} rules; train {:.1}%, 25-fold CV {:.1}% vs majority {:.1}% (t={:.2}, df={}); {elapsed:.1?}",
            examples.len(),
            rl.rules.len(),
            100.0 * train_acc,
            100.0 * learned.mean,
            100.0 * majority.mean,
            t.t,
            t.df
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    for (name, rl) in [("fig14", fig14()), ("fig16", fig16())] {
        let unresolved: Vec<usize> = rl
            .rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.conditions.iter().any(|c| c.index().is_none()))
            .map(|(i, _)| i)
            .collect();
        for (i, rule) in rl.rules.iter().enumerate() {
            let v = witness(rule);
            let first = rl.first_match(&v);
            let ok = if unresolved.contains(&i) { first != Some(i) } else { first == Some(i) && classify(&rl, &v) == rule.label };
            if !ok {
                failures.push(format!("{name} rule {}", i + 1));
            }
        }
        if classify(&rl, &FeatureVector::default()) != rl.default_label {
            failures.push(format!("{name} default"));
        }
    }
    let rl = fig14();
    let mut v = FeatureVector::default();
    v.set("prev-solution-size", FeatureValue::sym("determinate"));
    v.set("colormatch-constraintpresence", FeatureValue::sym("explicit"));
    v.set("goal", FeatureValue::sym("selecttable"));
    v.set("reference-relation", FeatureValue::sym("coref"));
    v.set("colorlimit", FeatureValue::Bool(false));
    v.set("influence-on-listener", FeatureValue::sym("action-directive"));
    let earlier_silent = rl.rules[..15].iter().all(|r| !r.fires(&v));
    let t_case = classify(&rl, &v);
    if !earlier_silent || t_case != ClassLabel::T {
        failures.push(format!("T-rule case gave {t_case}"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} + {} rules each claimed by their own witness vector, defaults {} / {}; T-rule case -> {t_case}; failures {failures:?}",
            fig14().rules.len(),
            fig16().rules.len(),
            fig14().default_label,
            fig16().default_label
        ),
    )
}

fn criterion_7() -> Outcome {
    let plan = FoldPlan::new(393, 25, 0).expect("plan");
    let sizes = plan.fold_sizes();
    let sixteen = sizes.iter().filter(|s| **s == 16).count();
    let fifteen = sizes.iter().filter(|s| **s == 15).count();
    let mut tested = vec![0; 393];
    for f in 0..25 {
        for i in plan.test_indices(f) {
            tested[i] += 1;
        }
    }
    let once = tested.iter().all(|c| *c == 1);

    let series: Vec<f64> = (0..25).map(|i| 0.4 + 0.01 * (i % 7) as f64).collect();
    let self_t = paired_t(&series, &series).expect("t").t;

    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p0 = rng.gen_range(1..200usize);
        let n0 = rng.gen_range(0..200usize);
        let p1 = rng.gen_range(1..=p0);
        let n1 = rng.gen_range(0..=n0);
        let oracle = p1 as f64 * ((p1 as f64 / (p1 + n1) as f64).log2() - (p0 as f64 / (p0 + n0) as f64).log2());
        worst = worst.max((foil_gain(p0, n0, p1, n1) - oracle).abs());
    }
    outcome(
        sixteen == 18 && fifteen == 7 && once && self_t == 0.0 && worst < 1e-9,
        format!(
            "393/25 folds: {sixteen} of 16, {fifteen} of 15, each tested once: {once}; self t = {self_t}; foil gain max error {worst:.1e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    println!("     Headline accuracies of the original 17-row comparison (e.g. 59.9% best combined model,");
    println!("     42.4% intentional influences, 16.9% baseline) are NOT reproducible here: the annotated");
    println!("     dialogue corpus they were measured on is not distributed. Criteria 1-7 (published-table");
    println!("     metric reproduction, oracle equivalence, planted-policy recovery, protocol invariants)");
    println!("     stand in for them, and the same experiment runner is exercised end to end below on");
    println!("     synthetic data.");
    let p = SynthParams { n_dialogues: 4, seed: 11, ..SynthParams::default() };
    let corpus = generate(&p).expect("generator");
    let suite = ExperimentConfig::standard_suite(&LearnerParams::default());
    match run_experiment(&corpus, &suite, 10, 0) {
        Ok(rep) => {
            let table = report::accuracy_table(&rep);
            let shaped = rep.rows.len() == 17
                && rep.t_matrix.len() == 17
                && table.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count() >= 17;
            for line in table.lines().take(21) {
                println!("     | {line}");
            }
            outcome(shaped, format!("17-row report over {} synthetic mentions, {} folds", rep.examples, rep.k))
        }
        Err(e) => outcome(false, format!("experiment failed: {e}")),
    }
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("published per-class metrics reproduce (+-0.005, <1s)", criterion_1),
        ("feature registry audit (82; 6/9/23/15/29; names)", criterion_2),
        ("class encoding bijection; utterance 37 -> CPO", criterion_3),
        ("majority oracle (CPQ, 64/393)", criterion_4),
        ("planted-policy recovery (100% train, >=95% CV, p<.01, <60s)", criterion_5),
        ("shipped rule-set semantics", criterion_6),
        ("protocol invariants", criterion_7),
        ("non-reproducibility statement; synthetic 17-row report", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let r = check();
        if !r.pass {
            failed += 1;
        }
        println!("{} criterion {}: {name}: {}", if r.pass { "PASS" } else { "FAIL" }, i + 1, r.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
