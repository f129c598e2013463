use std::collections::{BTreeMap, BTreeSet};

use super::class::{derive_agreement_state, encode_class, AgreementState};
use super::{Example, FeatureError, FeatureGroup, FeatureValue, FeatureVector, GroupSet, Provenance};
use crate::corpus::{Attr, AttrSet, ConstraintKind, Dialogue, ListenerInfluence, PsRecord, RefRelation, SpeakerInfluence, Utterance};
use crate::discourse::{build_model, DiscourseModel, Fact, Knowledge, MentionEvent};
use crate::focus::{distractors_at, segment_structure, FocusModel, SegmentStructure};

use FeatureValue::{Bool, Na};

/// Per-dialogue state shared by all mentions: the discourse model, the
/// segment structure and the agreement state of every utterance.
pub struct DialogueFeatures<'d> {
    pub model: DiscourseModel<'d>,
    pub segments: SegmentStructure,
    pub states: Vec<AgreementState>,
}

impl<'d> DialogueFeatures<'d> {
    pub fn new(d: &'d Dialogue) -> Result<Self, FeatureError> {
        let model = build_model(d)?;
        let segments = segment_structure(d)?;
        let states = d
            .utterances
            .iter()
            .map(|u| derive_agreement_state(u.du_or_na(), u.ps.first().map(|p| p.solution_size)))
            .collect();
        Ok(DialogueFeatures { model, segments, states })
    }

    fn dialogue(&self) -> &'d Dialogue {
        self.model.dialogue
    }

    pub fn examples(&self, groups: GroupSet, focus: Option<FocusModel>) -> Result<Vec<Example>, FeatureError> {
        (0..self.model.events.len())
            .map(|pos| {
                let e = &self.model.events[pos];
                Ok(Example {
                    features: self.vector(pos, groups, focus)?,
                    label: encode_class(e.mention.explicit),
                    provenance: Provenance {
                        dialogue: self.dialogue().id.clone(),
                        utterance: e.utterance.number,
                        mention_id: e.mention.mention_id.clone(),
                    },
                })
            })
            .collect()
    }

    /// The feature vector of the mention at document position `pos`. Only
    /// information available before the mention is consulted, apart from the
    /// mention's own attribute values and its utterance's task annotations.
    pub fn vector(&self, pos: usize, groups: GroupSet, focus: Option<FocusModel>) -> Result<FeatureVector, FeatureError> {
        let mut v = FeatureVector::default();
        let e = &self.model.events[pos];
        let k = e.effective_knowledge(self.dialogue());
        if groups.contains(FeatureGroup::Familiarity) {
            self.familiarity(e, &mut v);
        }
        if groups.contains(FeatureGroup::Inherent) {
            self.inherent(e, &k, &mut v);
        }
        if groups.contains(FeatureGroup::ConceptualPact) {
            self.conceptual_pact(e, &mut v);
        }
        if groups.contains(FeatureGroup::Contrast) {
            let focus = focus.ok_or(FeatureError::MissingFocus)?;
            self.contrast(e, &k, focus, &mut v);
        }
        if groups.contains(FeatureGroup::IntentionalInfluences) {
            self.intentional(e, &k, &mut v);
        }
        Ok(v)
    }

    fn familiarity(&self, e: &MentionEvent<'_>, v: &mut FeatureVector) {
        for a in Attr::ALL {
            v.set(&format!("{a}-mk"), Bool(e.snapshot.mutually_known.contains(*a)));
        }
        v.set("reference-relation", FeatureValue::sym(e.mention.relation.as_str()));
    }

    fn inherent(&self, e: &MentionEvent<'_>, k: &Knowledge, v: &mut FeatureVector) {
        let d = self.dialogue();
        let speaker = &e.utterance.speaker;
        v.set("utterance-number", FeatureValue::num(e.utterance.number));
        v.set("speaker-pair", FeatureValue::sym(d.speaker_pair()));
        v.set("speaker", FeatureValue::sym(speaker.as_str()));
        v.set("problem-number", FeatureValue::num(d.problem));
        for a in [Attr::Type, Attr::Color, Attr::Owner] {
            let s = k.get(&a).map(|f| fact_token(f, speaker)).unwrap_or_else(|| "unk".into());
            v.set(a.as_str(), FeatureValue::Sym(s));
        }
        // unknown numeric values are -1 so that threshold tests can single them out
        let price = match k.get(&Attr::Price) {
            Some(Fact::Price(p)) => f64::from(*p),
            _ => -1.0,
        };
        let quantity = match k.get(&Attr::Quantity) {
            Some(Fact::Quantity(q)) => f64::from(*q),
            _ => -1.0,
        };
        v.set("price", FeatureValue::Num(price));
        v.set("quantity", FeatureValue::Num(quantity));
    }

    fn conceptual_pact(&self, e: &MentionEvent<'_>, v: &mut FeatureVector) {
        let history: Vec<&MentionEvent<'_>> = self.model.history(e.pos).collect();
        let speaker = &e.utterance.speaker;

        v.set("number-prev-mentions", FeatureValue::num(history.len() as u32));
        for a in [Attr::Type, Attr::Color, Attr::Price, Attr::Owner, Attr::Quantity] {
            let n = history.iter().filter(|h| h.mention.explicit.contains(a)).count();
            v.set(&format!("freq-{a}-expressed"), FeatureValue::num(n as u32));
        }

        let related: BTreeSet<&str> = e.mention.links.iter().map(String::as_str).collect();
        let last_related = self.model.events[..e.pos].iter().rev().find(|h| related.contains(h.mention.entity_id.as_str()));
        v.set(
            "distance-last-related",
            last_related.map_or(Na, |h| FeatureValue::num(e.utterance.number - h.utterance.number)),
        );

        for (n, name) in [(2, "cp-given-last-2"), (3, "cp-given-last-3")] {
            let value = if history.len() < n {
                Na
            } else {
                let recent = &history[history.len() - n..];
                let first = recent[0].mention.explicit;
                if recent.iter().all(|h| h.mention.explicit == first) {
                    FeatureValue::sym(encode_class(first).as_str())
                } else {
                    FeatureValue::sym("none")
                }
            };
            v.set(name, value);
        }

        let Some(last) = history.last() else {
            for name in [
                "distance-last-ref",
                "distance-last-ref-in-turns",
                "speaker-of-last-ref",
                "initial-in-last-turn",
            ] {
                v.set(name, Na);
            }
            for a in Attr::ALL {
                v.set(&format!("{a}-in-last-exp"), Na);
                v.set(&format!("{a}-in-last-turn"), Na);
            }
            return;
        };
        v.set("distance-last-ref", FeatureValue::num(e.utterance.number - last.utterance.number));
        v.set("distance-last-ref-in-turns", FeatureValue::num((e.turn - last.turn) as u32));
        v.set("speaker-of-last-ref", FeatureValue::sym(relative_speaker(&last.utterance.speaker, speaker)));

        let in_turn: Vec<&&MentionEvent<'_>> = history.iter().filter(|h| h.turn == last.turn).collect();
        let turn_explicit = in_turn.iter().fold(AttrSet::EMPTY, |acc, h| acc.union(h.mention.explicit));
        for a in Attr::ALL {
            v.set(&format!("{a}-in-last-exp"), Bool(last.mention.explicit.contains(*a)));
            v.set(&format!("{a}-in-last-turn"), Bool(turn_explicit.contains(*a)));
        }
        v.set("initial-in-last-turn", Bool(in_turn.iter().any(|h| h.mention.relation == RefRelation::Initial)));
    }

    fn contrast(&self, e: &MentionEvent<'_>, k: &Knowledge, focus: FocusModel, v: &mut FeatureVector) {
        let set = distractors_at(&self.model, &self.segments, e.pos, focus);
        let speaker = &e.utterance.speaker;
        for a in Attr::ALL {
            let n = set
                .members
                .iter()
                .filter(|s| s.known_before.get(a).is_some_and(|f| k.get(a) != Some(f)))
                .count();
            v.set(&format!("{a}-distractors"), FeatureValue::num(n as u32));
        }
        for a in [Attr::Type, Attr::Color, Attr::Price, Attr::Owner, Attr::Quantity] {
            let mut counts: BTreeMap<MajorityKey, usize> = BTreeMap::new();
            for s in &set.members {
                if let Some(f) = s.known_before.get(&a) {
                    *counts.entry(MajorityKey::of(f, speaker)).or_default() += 1;
                }
            }
            // ascending iteration plus strict comparison: ties go to the smallest value
            let mut best: Option<(&MajorityKey, usize)> = None;
            for (key, n) in &counts {
                if best.is_none_or(|(_, m)| *n > m) {
                    best = Some((key, *n));
                }
            }
            let (value, freq) = match best {
                Some((MajorityKey::Num(n), c)) => (FeatureValue::num(*n), c),
                Some((MajorityKey::Sym(s), c)) => (FeatureValue::sym(s.as_str()), c),
                None => (Na, 0),
            };
            v.set(&format!("majority-{a}"), value);
            v.set(&format!("majority-{a}-freq"), FeatureValue::num(freq as u32));
        }
    }

    fn intentional(&self, e: &MentionEvent<'_>, k: &Knowledge, v: &mut FeatureVector) {
        let d = self.dialogue();
        let u = e.utterance;
        let i = e.utt_index;
        let speaker = &u.speaker;
        let goal_id = e.mention.goal_id.as_str();

        // task situation
        let goal = d.utterances[..=i]
            .iter()
            .rev()
            .flat_map(|u| u.ps.iter().rev())
            .find(|p| p.goal_id == goal_id)
            .map(|p| p.goal_label);
        v.set("goal", goal.map_or(Na, |g| FeatureValue::sym(g.as_str())));
        for (kind, name) in [
            (ConstraintKind::DropColorMatch, "colormatch"),
            (ConstraintKind::PriceLimit, "pricelimit"),
            (ConstraintKind::PriceEvaluator, "priceevaluator"),
            (ConstraintKind::ColorLimit, "colorlimit"),
            (ConstraintKind::PriceUpperLimit, "priceupperlimit"),
        ] {
            let change = u.ps.iter().flat_map(|p| p.constraint_changes.iter()).find(|c| c.kind == kind);
            v.set(name, Bool(change.is_some()));
            v.set(
                &format!("{name}-constraintpresence"),
                change.and_then(|c| c.presence).map_or(Na, |p| FeatureValue::sym(p.as_str())),
            );
        }

        // agreement state
        set_influences(v, "", Some(u), goal_id);
        set_influences(v, "prev-", i.checked_sub(1).map(|j| &d.utterances[j]), goal_id);

        let last_state = (0..=i).rev().find(|j| self.states[*j].is_critical());
        match last_state {
            Some(j) => {
                let su = &d.utterances[j];
                v.set("distance-of-last-state-in-utterances", FeatureValue::num(u.number - su.number));
                let turns = self.model.utt_turn[i] - self.model.utt_turn[j];
                v.set("distance-of-last-state-in-turns", FeatureValue::num(turns as u32));
                v.set("speaker-of-last-state", FeatureValue::sym(relative_speaker(&su.speaker, speaker)));
            }
            None => {
                v.set("distance-of-last-state-in-utterances", Na);
                v.set("distance-of-last-state-in-turns", Na);
                v.set("speaker-of-last-state", Na);
            }
        }
        let entity = e.mention.entity_id.as_str();
        let prev_action = (0..i).rev().find(|j| self.states[*j].is_critical());
        v.set(
            "ref-made-in-prev-action-state",
            prev_action.map_or(Na, |j| Bool(d.utterances[j].mentions.iter().any(|m| m.entity_id == entity))),
        );

        let history: Vec<&MentionEvent<'_>> = self.model.history(e.pos).collect();
        v.set(
            "prev-ref-state",
            history.last().map_or(Na, |h| FeatureValue::sym(self.states[h.utt_index].as_str())),
        );
        let in_state = history.iter().rev().find(|h| self.states[h.utt_index].is_critical());
        for a in Attr::ALL {
            v.set(&format!("prev-state-{a}-expressed"), in_state.map_or(Na, |h| Bool(h.mention.explicit.contains(*a))));
        }

        // solution interactions
        let (color, price) = self.solution_contrast(e, k);
        v.set("color-contrast", Bool(color));
        v.set("price-contrast", Bool(price));
    }

    /// Whether the target's color contrasts with the partial solution, and
    /// whether its price stands out among the live alternatives.
    ///
    /// Items last mentioned in an unconditional commit are agreed; items last
    /// mentioned in a propose or partner-decidable state after the latest
    /// commit are the open alternatives. Only earlier utterances count.
    fn solution_contrast(&self, e: &MentionEvent<'_>, k: &Knowledge) -> (bool, bool) {
        let d = self.dialogue();
        let i = e.utt_index;
        let target = e.mention.entity_id.as_str();
        let last_commit = (0..i).rev().find(|j| self.states[*j] == AgreementState::UnconditionalCommit);

        let mut latest: BTreeMap<&str, usize> = BTreeMap::new();
        for h in self.model.events.iter().take_while(|h| h.utt_index < i) {
            latest.insert(h.mention.entity_id.as_str(), h.utt_index);
        }
        latest.remove(target);

        let mut agreed: Vec<Knowledge> = Vec::new();
        let mut alternatives: Vec<Knowledge> = Vec::new();
        for (ent, j) in latest {
            match self.states[j] {
                AgreementState::UnconditionalCommit => agreed.push(self.model.knowledge_before(ent, e.pos)),
                AgreementState::Propose | AgreementState::PartnerDecidableOption
                    if last_commit.is_none_or(|c| j > c) =>
                {
                    alternatives.push(self.model.knowledge_before(ent, e.pos))
                }
                _ => {}
            }
        }

        let color_contrast = match k.get(&Attr::Color) {
            Some(c) => {
                agreed.iter().any(|a| a.get(&Attr::Color) == Some(c))
                    && alternatives.iter().any(|a| a.get(&Attr::Color).is_some_and(|o| o != c))
            }
            None => false,
        };

        let alt_prices: Vec<u32> = alternatives.iter().filter_map(price_of).collect();
        let price_contrast = match (price_of(k), alt_prices.iter().min(), alt_prices.iter().max()) {
            (Some(p), Some(&lo), Some(&hi)) => {
                let nearly_complete = d.budget.is_some_and(|budget| {
                    let spent: u64 = agreed
                        .iter()
                        .filter_map(|a| {
                            let q = match a.get(&Attr::Quantity) {
                                Some(Fact::Quantity(q)) => u64::from(*q),
                                _ => 1,
                            };
                            price_of(a).map(|p| u64::from(p) * q)
                        })
                        .sum();
                    u64::from(budget).saturating_sub(spent) <= u64::from(lo)
                });
                p < lo || (nearly_complete && p > hi)
            }
            _ => false,
        };
        (color_contrast, price_contrast)
    }
}

fn price_of(k: &Knowledge) -> Option<u32> {
    match k.get(&Attr::Price) {
        Some(Fact::Price(p)) => Some(*p),
        _ => None,
    }
}

/// The problem-solving record most relevant to a goal: the one for the goal
/// itself, else the utterance's first record.
fn ps_for<'u>(u: &'u Utterance, goal_id: &str) -> Option<&'u PsRecord> {
    u.ps.iter().find(|p| p.goal_id == goal_id).or_else(|| u.ps.first())
}

fn set_influences(v: &mut FeatureVector, prefix: &str, u: Option<&Utterance>, goal_id: &str) {
    let du = u.map(Utterance::du_or_na);
    let listener = du.map(|d| d.listener).filter(|l| *l != ListenerInfluence::Na);
    let speaker = du.map(|d| d.speaker).filter(|s| *s != SpeakerInfluence::Na);
    let size = u.and_then(|u| ps_for(u, goal_id)).map(|p| p.solution_size);
    v.set(&format!("{prefix}influence-on-listener"), listener.map_or(Na, |l| FeatureValue::sym(l.as_str())));
    v.set(&format!("{prefix}commit-speaker"), speaker.map_or(Na, |s| FeatureValue::sym(s.as_str())));
    v.set(&format!("{prefix}solution-size"), size.map_or(Na, |s| FeatureValue::sym(s.as_str())));
}

fn relative_speaker(other: &str, current: &str) -> &'static str {
    if other == current {
        "self"
    } else {
        "other"
    }
}

/// A fact as a feature token, with ownership relative to `speaker`.
fn fact_token(f: &Fact, speaker: &str) -> String {
    match f {
        Fact::Type(t) => t.as_str().into(),
        Fact::Color(c) => c.as_str().into(),
        Fact::Owner(h) => h.relative_to(speaker).as_str().into(),
        Fact::Price(p) => p.to_string(),
        Fact::Quantity(q) => q.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum MajorityKey {
    Num(u32),
    Sym(String),
}

impl MajorityKey {
    fn of(f: &Fact, speaker: &str) -> MajorityKey {
        match f {
            Fact::Price(p) => MajorityKey::Num(*p),
            Fact::Quantity(q) => MajorityKey::Num(u32::from(*q)),
            other => MajorityKey::Sym(fact_token(other, speaker)),
        }
    }
}
