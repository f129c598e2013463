use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CondValue, Condition, Op, Rule, RuleList};
use crate::features::{registry, ClassLabel, Example, FeatureType, FeatureValue, FeatureVector};

/// Anything that turns labelled examples into a rule list.
pub trait Learner: Sync {
    fn name(&self) -> String;
    fn fit(&self, examples: &[&Example]) -> RuleList;
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerParams {
    /// Grow/prune rules on separate splits (IREP-style) instead of growing
    /// each rule until it is pure.
    pub noise_correction: bool,
    /// Positives a rule must cover to be kept.
    pub min_coverage: usize,
    pub rng_seed: u64,
    /// Share of each class's data used for growing when pruning is on.
    pub grow_ratio: f64,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams { noise_correction: false, min_coverage: 1, rng_seed: 0, grow_ratio: 2.0 / 3.0 }
    }
}

/// FOIL information gain of specializing a rule covering `p0`/`n0`
/// positives/negatives to one covering `p1`/`n1`.
pub fn foil_gain(p0: usize, n0: usize, p1: usize, n1: usize) -> f64 {
    if p1 == 0 || p0 == 0 {
        return 0.0;
    }
    let info = |p: usize, n: usize| (p as f64 / (p + n) as f64).log2();
    p1 as f64 * (info(p1, n1) - info(p0, n0))
}

/// [`foil_gain`] of `after` over `before`, counting examples labelled with
/// `after`'s label as positive.
pub fn rule_gain(before: &Rule, after: &Rule, examples: &[Example]) -> f64 {
    let count = |r: &Rule| {
        examples.iter().filter(|e| r.fires(&e.features)).fold((0, 0), |(p, n), e| {
            if e.label == after.label {
                (p + 1, n)
            } else {
                (p, n + 1)
            }
        })
    };
    let (p0, n0) = count(before);
    let (p1, n1) = count(after);
    foil_gain(p0, n0, p1, n1)
}

/// Always predicts the most frequent training label.
#[derive(Clone, Copy, Debug, Default)]
pub struct MajorityLearner;

impl Learner for MajorityLearner {
    fn name(&self) -> String {
        "majority".into()
    }

    fn fit(&self, examples: &[&Example]) -> RuleList {
        RuleList::constant(class_order(examples).last().copied().unwrap_or(ClassLabel::CPQ))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RipperLearner {
    pub params: LearnerParams,
}

impl Learner for RipperLearner {
    fn name(&self) -> String {
        if self.params.noise_correction {
            "rules+prune".into()
        } else {
            "rules".into()
        }
    }

    fn fit(&self, examples: &[&Example]) -> RuleList {
        learn(examples, &self.params)
    }
}

pub fn train(examples: &[Example], params: &LearnerParams) -> RuleList {
    let refs: Vec<&Example> = examples.iter().collect();
    learn(&refs, params)
}

/// Present labels, rarest first; equal counts put the label that comes later
/// in the reference frequency order first. The last entry is the default.
fn class_order(examples: &[&Example]) -> Vec<ClassLabel> {
    let mut counts: BTreeMap<ClassLabel, usize> = BTreeMap::new();
    for e in examples {
        *counts.entry(e.label).or_default() += 1;
    }
    let mut order: Vec<(ClassLabel, usize)> = counts.into_iter().collect();
    order.sort_by(|(a, ca), (b, cb)| ca.cmp(cb).then(b.index().cmp(&a.index())));
    order.into_iter().map(|(c, _)| c).collect()
}

fn learn(examples: &[&Example], params: &LearnerParams) -> RuleList {
    let order = class_order(examples);
    let Some(&default_label) = order.last() else {
        return RuleList::constant(ClassLabel::CPQ);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut remaining: Vec<usize> = (0..examples.len()).collect();
    let mut rules = Vec::new();

    for &class in &order[..order.len() - 1] {
        loop {
            let pos: Vec<usize> = remaining.iter().copied().filter(|i| examples[*i].label == class).collect();
            if pos.is_empty() {
                break;
            }
            let neg: Vec<usize> = remaining.iter().copied().filter(|i| examples[*i].label != class).collect();
            let rule = if params.noise_correction {
                grow_and_prune(examples, &pos, &neg, class, params, &mut rng)
            } else {
                let conditions = grow(examples, &pos, &neg, Vec::new());
                accept(examples, &pos, &neg, Rule { conditions, label: class }, params)
            };
            let Some(rule) = rule else { break };
            remaining.retain(|i| !rule.fires(&examples[*i].features));
            rules.push(rule);
        }
    }
    RuleList { rules, default_label }
}

fn counts(examples: &[&Example], idx: &[usize], conditions: &[Condition]) -> usize {
    idx.iter().filter(|i| conditions.iter().all(|c| c.holds(&examples[**i].features))).count()
}

/// Keeps a grown rule if it is non-trivial, covers enough positives and more
/// positives than negatives.
fn accept(examples: &[&Example], pos: &[usize], neg: &[usize], rule: Rule, params: &LearnerParams) -> Option<Rule> {
    if rule.conditions.is_empty() {
        return None;
    }
    let p = counts(examples, pos, &rule.conditions);
    let n = counts(examples, neg, &rule.conditions);
    (p >= params.min_coverage.max(1) && p > n).then_some(rule)
}

/// Adds the highest-gain condition until the rule covers no negatives or no
/// condition has positive gain.
fn grow(examples: &[&Example], pos: &[usize], neg: &[usize], mut conditions: Vec<Condition>) -> Vec<Condition> {
    let mut cov_pos: Vec<usize> = pos.iter().copied().filter(|i| fires(&conditions, &examples[*i].features)).collect();
    let mut cov_neg: Vec<usize> = neg.iter().copied().filter(|i| fires(&conditions, &examples[*i].features)).collect();
    while !cov_neg.is_empty() && !cov_pos.is_empty() {
        let Some(best) = best_condition(examples, &cov_pos, &cov_neg, &conditions) else { break };
        cov_pos.retain(|i| best.holds(&examples[*i].features));
        cov_neg.retain(|i| best.holds(&examples[*i].features));
        conditions.push(best);
    }
    conditions
}

fn fires(conditions: &[Condition], v: &FeatureVector) -> bool {
    conditions.iter().all(|c| c.holds(v))
}

struct Candidate {
    gain: f64,
    feature: &'static str,
    op: Op,
    value: CondValue,
    index: usize,
}

impl Candidate {
    /// Higher gain first, then feature name, operator and value text.
    fn better_than(&self, other: &Candidate) -> bool {
        if (self.gain - other.gain).abs() > 1e-12 {
            return self.gain > other.gain;
        }
        (self.feature, self.op, self.value.to_string()).cmp(&(other.feature, other.op, other.value.to_string()))
            == Ordering::Less
    }
}

/// Scores every test the covered examples suggest: equality on each observed
/// symbol, boolean or `na`, and thresholds at midpoints between observed
/// numeric values.
fn best_condition(examples: &[&Example], pos: &[usize], neg: &[usize], used: &[Condition]) -> Option<Condition> {
    let (p0, n0) = (pos.len(), neg.len());
    let mut best: Option<Candidate> = None;
    let mut offer = |c: Candidate| {
        if c.gain > 1e-12 && best.as_ref().is_none_or(|b| c.better_than(b)) {
            best = Some(c);
        }
    };
    let taken = |i: usize, op: Op| used.iter().any(|c| c.index() == Some(i) && c.op == op);

    for (fi, def) in registry().iter().enumerate() {
        let value_of = |i: usize| &examples[i].features.values[fi];

        // equality tests, keyed case-insensitively to match rule semantics
        if !taken(fi, Op::Eq) {
            let mut tally: BTreeMap<String, (CondValue, usize, usize)> = BTreeMap::new();
            for (idx, is_pos) in pos.iter().map(|i| (*i, true)).chain(neg.iter().map(|i| (*i, false))) {
                let cv = match value_of(idx) {
                    FeatureValue::Na => CondValue::Na,
                    FeatureValue::Bool(b) => CondValue::Bool(*b),
                    FeatureValue::Sym(s) => CondValue::Sym(s.clone()),
                    FeatureValue::Num(_) => continue,
                };
                let key = cv.to_string().to_ascii_lowercase();
                let entry = tally.entry(key).or_insert((cv, 0, 0));
                if is_pos {
                    entry.1 += 1;
                } else {
                    entry.2 += 1;
                }
            }
            for (_, (value, p1, n1)) in tally {
                offer(Candidate { gain: foil_gain(p0, n0, p1, n1), feature: def.name, op: Op::Eq, value, index: fi });
            }
        }

        if def.ftype != FeatureType::Numeric {
            continue;
        }
        let mut nums: Vec<(f64, bool)> = pos
            .iter()
            .map(|i| (*i, true))
            .chain(neg.iter().map(|i| (*i, false)))
            .filter_map(|(i, is_pos)| value_of(i).as_num().map(|x| (x, is_pos)))
            .collect();
        if nums.len() < 2 {
            continue;
        }
        nums.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (tp, tn) = nums.iter().fold((0, 0), |(p, n), (_, is_pos)| if *is_pos { (p + 1, n) } else { (p, n + 1) });
        let (mut lp, mut ln) = (0, 0);
        for w in 0..nums.len() - 1 {
            if nums[w].1 {
                lp += 1;
            } else {
                ln += 1;
            }
            let (a, b) = (nums[w].0, nums[w + 1].0);
            if a == b {
                continue;
            }
            let mid = a + (b - a) / 2.0;
            if !taken(fi, Op::Le) {
                offer(Candidate { gain: foil_gain(p0, n0, lp, ln), feature: def.name, op: Op::Le, value: CondValue::Num(mid), index: fi });
            }
            if !taken(fi, Op::Ge) {
                let (gp, gn) = (tp - lp, tn - ln);
                offer(Candidate { gain: foil_gain(p0, n0, gp, gn), feature: def.name, op: Op::Ge, value: CondValue::Num(mid), index: fi });
            }
        }
    }
    best.map(|c| Condition::with_index(c.index, c.op, c.value))
}

fn worth(p: usize, n: usize) -> f64 {
    if p + n == 0 {
        0.0
    } else {
        (p as f64 - n as f64) / (p + n) as f64
    }
}

/// Grows a rule on a random share of the data, then drops the trailing
/// conditions whose removal maximizes (p−n)/(p+n) on the held-back share.
fn grow_and_prune(
    examples: &[&Example],
    pos: &[usize],
    neg: &[usize],
    label: ClassLabel,
    params: &LearnerParams,
    rng: &mut ChaCha8Rng,
) -> Option<Rule> {
    let split = |idx: &[usize], rng: &mut ChaCha8Rng| {
        let mut v = idx.to_vec();
        v.shuffle(rng);
        let cut = ((v.len() as f64) * params.grow_ratio).round() as usize;
        let cut = cut.clamp(usize::from(!v.is_empty()), v.len());
        let prune = v.split_off(cut);
        (v, prune)
    };
    let (grow_pos, prune_pos) = split(pos, rng);
    let (grow_neg, prune_neg) = split(neg, rng);
    let conditions = grow(examples, &grow_pos, &grow_neg, Vec::new());
    if conditions.is_empty() {
        return None;
    }

    let mut best_len = conditions.len();
    let mut best_worth = f64::NEG_INFINITY;
    for len in (1..=conditions.len()).rev() {
        let w = worth(counts(examples, &prune_pos, &conditions[..len]), counts(examples, &prune_neg, &conditions[..len]));
        if w > best_worth {
            best_worth = w;
            best_len = len;
        }
    }
    let conditions = conditions[..best_len].to_vec();
    let (pp, pn) = (counts(examples, &prune_pos, &conditions), counts(examples, &prune_neg, &conditions));
    // stop once a rule is wrong more often than right on unseen data
    if pp + pn > 0 && pp < pn {
        return None;
    }
    accept(examples, pos, neg, Rule { conditions, label }, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureValue, Provenance};
    use crate::rules::classify;

    fn ex(pairs: &[(&str, FeatureValue)], label: ClassLabel) -> Example {
        let mut v = FeatureVector::default();
        for (n, x) in pairs {
            v.set(n, x.clone());
        }
        Example { features: v, label, provenance: Provenance { dialogue: "d".into(), utterance: 0, mention_id: "m".into() } }
    }

    #[test]
    fn gain_examples() {
        assert!((foil_gain(4, 4, 3, 1) - 3.0 * (0.75f64.log2() - 0.5f64.log2())).abs() < 1e-12);
        assert!((foil_gain(4, 4, 3, 1) - 1.7549).abs() < 1e-4);
        assert_eq!(foil_gain(4, 4, 0, 0), 0.0);
        assert_eq!(foil_gain(4, 4, 4, 4), 0.0);
    }

    #[test]
    fn single_label_gives_empty_rules() {
        let data = vec![ex(&[], ClassLabel::CP), ex(&[], ClassLabel::CP)];
        let rl = train(&data, &LearnerParams::default());
        assert!(rl.rules.is_empty());
        assert_eq!(rl.default_label, ClassLabel::CP);
    }

    #[test]
    fn two_examples_one_boolean() {
        let data = vec![
            ex(&[("type-mk", FeatureValue::Bool(true))], ClassLabel::C),
            ex(&[("type-mk", FeatureValue::Bool(false))], ClassLabel::O),
        ];
        let rl = train(&data, &LearnerParams::default());
        assert_eq!(rl.rules.len(), 1);
        // equal counts: the label later in the reference order is learned first
        assert_eq!(rl.rules[0].label, ClassLabel::C);
        assert_eq!(rl.default_label, ClassLabel::O);
        for e in &data {
            assert_eq!(classify(&rl, &e.features), e.label);
        }
    }

    #[test]
    fn numeric_thresholds_use_midpoints() {
        let data: Vec<Example> = (0..6)
            .map(|i| {
                let label = if i < 2 { ClassLabel::T } else { ClassLabel::CPQ };
                ex(&[("price", FeatureValue::num(i * 100))], label)
            })
            .collect();
        let rl = train(&data, &LearnerParams::default());
        assert_eq!(rl.rules.len(), 1);
        assert_eq!(rl.rules[0].to_string(), "IF price <= 150 THEN T");
    }

    #[test]
    fn pruning_is_deterministic() {
        let data: Vec<Example> = (0..40)
            .map(|i| {
                let label = if i % 3 == 0 { ClassLabel::T } else { ClassLabel::CPQ };
                ex(&[("utterance-number", FeatureValue::num(i)), ("type-mk", FeatureValue::Bool(i % 3 == 0))], label)
            })
            .collect();
        let params = LearnerParams { noise_correction: true, rng_seed: 7, ..Default::default() };
        let a = train(&data, &params);
        assert_eq!(a, train(&data, &params));
        assert_eq!(a.rules[0].to_string(), "IF type-mk = yes THEN T");
    }

    #[test]
    fn majority_learner() {
        let data = [ex(&[], ClassLabel::CP), ex(&[], ClassLabel::O), ex(&[], ClassLabel::O)];
        let refs: Vec<&Example> = data.iter().collect();
        assert_eq!(MajorityLearner.fit(&refs), RuleList::constant(ClassLabel::O));
    }
}
