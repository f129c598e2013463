use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::{Corpus, Dialogue, GoalMode, RefRelation};

/// One broken invariant, located by dialogue, utterance and record id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub dialogue: String,
    pub utterance: Option<u32>,
    pub record: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dialogue {}", self.dialogue)?;
        if let Some(u) = self.utterance {
            write!(f, ", utterance {u}")?;
        }
        write!(f, ", record {}: {}", self.record, self.rule)
    }
}

/// Checks every cross-record invariant; an empty result means the corpus is
/// valid.
pub fn validate(corpus: &Corpus) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for d in &corpus.dialogues {
        if !ids.insert(d.id.as_str()) {
            out.push(Violation {
                dialogue: d.id.clone(),
                utterance: None,
                record: d.id.clone(),
                rule: "duplicate dialogue id".into(),
            });
        }
        validate_dialogue(d, &mut out);
    }
    out
}

fn validate_dialogue(d: &Dialogue, out: &mut Vec<Violation>) {
    let mut push = |utt: Option<u32>, record: &str, rule: String| {
        out.push(Violation { dialogue: d.id.clone(), utterance: utt, record: record.to_string(), rule });
    };

    if d.speakers.0 == d.speakers.1 {
        push(None, &d.id, format!("speaker pair repeats `{}`", d.speakers.0));
    }
    let speaking: BTreeSet<&str> = d.utterances.iter().map(|u| u.speaker.as_str()).collect();
    if !d.utterances.is_empty() && speaking.len() != 2 {
        push(None, &d.id, format!("expected exactly two distinct speakers, found {}", speaking.len()));
    }

    let mut last_number: Option<u32> = None;
    let mut introduced: HashSet<&str> = HashSet::new();
    let mut seen_entities: HashSet<&str> = HashSet::new();
    let mut mention_ids: HashSet<&str> = HashSet::new();

    for u in &d.utterances {
        let here = Some(u.number);
        let utt_id = format!("U{}", u.number);
        if let Some(prev) = last_number {
            if u.number <= prev {
                push(here, &utt_id, format!("utterance numbers must increase (after {prev})"));
            }
        }
        last_number = Some(u.number);
        if u.speaker != d.speakers.0 && u.speaker != d.speakers.1 {
            push(here, &utt_id, format!("speaker `{}` not in pair {}-{}", u.speaker, d.speakers.0, d.speakers.1));
        }

        for ps in &u.ps {
            match ps.mode {
                GoalMode::Introduce => {
                    introduced.insert(&ps.goal_id);
                }
                GoalMode::Continue => {
                    if !introduced.contains(ps.goal_id.as_str()) {
                        push(here, &ps.goal_id, "continue of a goal never introduced".into());
                    }
                }
            }
        }

        for m in &u.mentions {
            let id = m.mention_id.as_str();
            if !mention_ids.insert(id) {
                push(here, id, "duplicate mention id".into());
            }
            let seen = seen_entities.contains(m.entity_id.as_str());
            match m.relation {
                RefRelation::Initial if seen => {
                    push(here, id, format!("initial mention of already-seen entity {}", m.entity_id));
                }
                RefRelation::Coref if !seen => {
                    push(here, id, format!("coref to unseen entity {}", m.entity_id));
                }
                _ => {}
            }
            let overlap = m.explicit.intersection(m.inferred);
            if !overlap.is_empty() {
                push(here, id, format!("explicit and inferred attributes overlap on {overlap}"));
            }
            for a in m.explicit.union(m.inferred).iter() {
                if !m.values.contains_key(&a) {
                    push(here, id, format!("attribute `{a}` is explicit/inferred but has no value (use unk)"));
                }
            }
            for (a, v) in &m.values {
                if !v.fits(*a) {
                    push(here, id, format!("value `{v}` does not belong to attribute `{a}`"));
                }
            }
            if !introduced.contains(m.goal_id.as_str()) {
                push(here, id, format!("ACT goal {} has no PS record at or before this utterance", m.goal_id));
            }
            seen_entities.insert(&m.entity_id);
        }
    }
}
