//! Discourse model: folds mention records, in document order, into entities
//! whose known attributes accumulate over the dialogue.
//!
//! Every mention is paired with a snapshot of its entity computed from
//! strictly earlier mentions, so nothing derived from a snapshot can see the
//! mention's own annotation.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::corpus::{Attr, AttrSet, AttrValue, Color, Dialogue, FurnitureType, MentionRecord, Owner, Utterance};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiscourseError {
    #[error("dialogue {dialogue}: mention {mention} corefers with unknown entity {entity}")]
    UnknownEntity { dialogue: String, mention: String, entity: String },
    #[error("dialogue {dialogue}: no utterance numbered {utterance}")]
    UnknownUtterance { dialogue: String, utterance: u32 },
    #[error("dialogue {dialogue}: no mention with id {mention}")]
    UnknownMention { dialogue: String, mention: String },
}

/// Who owns an item, independent of who is speaking.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Holder {
    Speaker(String),
    Joint,
}

impl Holder {
    fn from_relative(owner: Owner, speaker: &str, partner: &str) -> Holder {
        match owner {
            Owner::SelfOwned => Holder::Speaker(speaker.to_string()),
            Owner::Other => Holder::Speaker(partner.to_string()),
            Owner::Ours => Holder::Joint,
        }
    }

    /// Ownership from the point of view of `speaker`.
    pub fn relative_to(&self, speaker: &str) -> Owner {
        match self {
            Holder::Speaker(s) if s == speaker => Owner::SelfOwned,
            Holder::Speaker(_) => Owner::Other,
            Holder::Joint => Owner::Ours,
        }
    }
}

/// A known attribute value, with ownership made speaker-independent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Fact {
    Type(FurnitureType),
    Color(Color),
    Owner(Holder),
    Price(u32),
    Quantity(u8),
}

impl Fact {
    /// Converts an annotated value; `unk` carries no knowledge.
    pub fn from_value(value: AttrValue, speaker: &str, partner: &str) -> Option<Fact> {
        Some(match value {
            AttrValue::Type(t) => Fact::Type(t),
            AttrValue::Color(c) => Fact::Color(c),
            AttrValue::Owner(o) => Fact::Owner(Holder::from_relative(o, speaker, partner)),
            AttrValue::Price(p) => Fact::Price(p),
            AttrValue::Quantity(q) => Fact::Quantity(q),
            AttrValue::Unk => return None,
        })
    }
}

pub type Knowledge = BTreeMap<Attr, Fact>;

/// A maximal run of consecutive utterances by one speaker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Turn {
    pub index: usize,
    pub speaker: String,
    pub utterances: Vec<u32>,
}

/// Splits a dialogue into turns; indices start at 0.
pub fn turns(d: &Dialogue) -> Vec<Turn> {
    let mut out: Vec<Turn> = Vec::new();
    for u in &d.utterances {
        match out.last_mut() {
            Some(t) if t.speaker == u.speaker => t.utterances.push(u.number),
            _ => out.push(Turn { index: out.len(), speaker: u.speaker.clone(), utterances: vec![u.number] }),
        }
    }
    out
}

/// The turn containing utterance `utt`.
pub fn turn_index(d: &Dialogue, utt: u32) -> Result<Turn, DiscourseError> {
    turns(d)
        .into_iter()
        .find(|t| t.utterances.contains(&utt))
        .ok_or_else(|| DiscourseError::UnknownUtterance { dialogue: d.id.clone(), utterance: utt })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LastMention {
    pub utterance: u32,
    pub turn: usize,
    pub speaker: String,
    pub explicit: AttrSet,
}

/// What was known about an entity just before a mention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntitySnapshot {
    pub entity_id: String,
    pub known_before: Knowledge,
    /// Attributes with any accumulated value.
    pub mutually_known: AttrSet,
    pub prior_mentions: usize,
    pub last_mention: Option<LastMention>,
}

impl EntitySnapshot {
    fn new(entity_id: &str, known_before: Knowledge, prior_mentions: usize, last_mention: Option<LastMention>) -> Self {
        let mutually_known = known_before.keys().copied().collect();
        EntitySnapshot { entity_id: entity_id.to_string(), known_before, mutually_known, prior_mentions, last_mention }
    }
}

/// One mention in document order together with its context.
#[derive(Clone, Debug)]
pub struct MentionEvent<'d> {
    /// Position in document order within the dialogue.
    pub pos: usize,
    /// Index of the utterance in `Dialogue::utterances`.
    pub utt_index: usize,
    pub utterance: &'d Utterance,
    pub mention: &'d MentionRecord,
    pub turn: usize,
    pub snapshot: EntitySnapshot,
}

impl MentionEvent<'_> {
    /// Snapshot knowledge overlaid with this mention's own values.
    pub fn effective_knowledge(&self, d: &Dialogue) -> Knowledge {
        let mut k = self.snapshot.known_before.clone();
        let partner = d.partner_of(&self.utterance.speaker);
        for (attr, v) in &self.mention.values {
            if let Some(f) = Fact::from_value(*v, &self.utterance.speaker, partner) {
                k.insert(*attr, f);
            }
        }
        k
    }
}

/// The folded discourse model of one dialogue.
#[derive(Clone, Debug)]
pub struct DiscourseModel<'d> {
    pub dialogue: &'d Dialogue,
    pub events: Vec<MentionEvent<'d>>,
    pub turns: Vec<Turn>,
    /// Turn index per utterance index.
    pub utt_turn: Vec<usize>,
    /// Per entity: (mention position, knowledge after that mention).
    timeline: HashMap<String, Vec<(usize, Knowledge)>>,
    /// Attribute conflicts resolved by last-writer-wins.
    pub warnings: Vec<String>,
}

/// Builds the discourse model: one snapshot per mention, in document order.
pub fn build_model(d: &Dialogue) -> Result<DiscourseModel<'_>, DiscourseError> {
    let turns = turns(d);
    let mut utt_turn = Vec::with_capacity(d.utterances.len());
    for (ti, t) in turns.iter().enumerate() {
        utt_turn.extend(std::iter::repeat_n(ti, t.utterances.len()));
    }

    let mut running: HashMap<String, Knowledge> = HashMap::new();
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut last: HashMap<String, LastMention> = HashMap::new();
    let mut timeline: HashMap<String, Vec<(usize, Knowledge)>> = HashMap::new();
    let mut events = Vec::with_capacity(d.mention_count());
    let mut warnings = Vec::new();

    let mut pos = 0;
    for (utt_index, u) in d.utterances.iter().enumerate() {
        let partner = d.partner_of(&u.speaker);
        for m in &u.mentions {
            let seen = running.contains_key(&m.entity_id);
            if m.relation == crate::corpus::RefRelation::Coref && !seen {
                return Err(DiscourseError::UnknownEntity {
                    dialogue: d.id.clone(),
                    mention: m.mention_id.clone(),
                    entity: m.entity_id.clone(),
                });
            }
            let mut known = running.get(&m.entity_id).cloned().unwrap_or_default();
            if m.relation.is_inferential() && !m.links.is_empty() {
                for attr in Attr::ALL {
                    if known.contains_key(attr) {
                        continue;
                    }
                    if let Some(shared) = shared_fact(&running, &m.links, *attr) {
                        known.insert(*attr, shared);
                    }
                }
            }
            let snapshot = EntitySnapshot::new(
                &m.entity_id,
                known.clone(),
                counts.get(&m.entity_id).copied().unwrap_or(0),
                last.get(&m.entity_id).cloned(),
            );

            for (attr, v) in &m.values {
                let Some(fact) = Fact::from_value(*v, &u.speaker, partner) else { continue };
                if let Some(old) = known.get(attr) {
                    if *old != fact {
                        warnings.push(format!(
                            "dialogue {}, mention {}: {} changes from {:?} to {:?}",
                            d.id, m.mention_id, attr, old, fact
                        ));
                    }
                }
                known.insert(*attr, fact);
            }
            timeline.entry(m.entity_id.clone()).or_default().push((pos, known.clone()));
            running.insert(m.entity_id.clone(), known);
            *counts.entry(m.entity_id.clone()).or_default() += 1;
            last.insert(
                m.entity_id.clone(),
                LastMention {
                    utterance: u.number,
                    turn: utt_turn[utt_index],
                    speaker: u.speaker.clone(),
                    explicit: m.explicit,
                },
            );
            events.push(MentionEvent { pos, utt_index, utterance: u, mention: m, turn: utt_turn[utt_index], snapshot });
            pos += 1;
        }
    }

    Ok(DiscourseModel { dialogue: d, events, turns, utt_turn, timeline, warnings })
}

/// The fact all linked entities agree on for `attr`, if they all know it.
fn shared_fact(running: &HashMap<String, Knowledge>, links: &[String], attr: Attr) -> Option<Fact> {
    let mut shared: Option<&Fact> = None;
    for link in links {
        let fact = running.get(link)?.get(&attr)?;
        match shared {
            None => shared = Some(fact),
            Some(s) if s == fact => {}
            Some(_) => return None,
        }
    }
    shared.cloned()
}

impl<'d> DiscourseModel<'d> {
    pub fn event_by_mention_id(&self, mention_id: &str) -> Result<&MentionEvent<'d>, DiscourseError> {
        self.events.iter().find(|e| e.mention.mention_id == mention_id).ok_or_else(|| {
            DiscourseError::UnknownMention { dialogue: self.dialogue.id.clone(), mention: mention_id.to_string() }
        })
    }

    /// Knowledge about `entity` accumulated from mentions before position `pos`.
    pub fn knowledge_before(&self, entity: &str, pos: usize) -> Knowledge {
        self.timeline
            .get(entity)
            .and_then(|tl| tl.iter().take_while(|(p, _)| *p < pos).last())
            .map(|(_, k)| k.clone())
            .unwrap_or_default()
    }

    /// Snapshot of any entity as of position `pos` (strictly earlier mentions).
    pub fn snapshot_before(&self, entity: &str, pos: usize) -> EntitySnapshot {
        let earlier: Vec<&MentionEvent<'d>> =
            self.events[..pos.min(self.events.len())].iter().filter(|e| e.mention.entity_id == entity).collect();
        let last_mention = earlier.last().map(|e| LastMention {
            utterance: e.utterance.number,
            turn: e.turn,
            speaker: e.utterance.speaker.clone(),
            explicit: e.mention.explicit,
        });
        EntitySnapshot::new(entity, self.knowledge_before(entity, pos), earlier.len(), last_mention)
    }

    /// Earlier mentions of the same entity, oldest first.
    pub fn history(&self, pos: usize) -> impl Iterator<Item = &MentionEvent<'d>> {
        let entity = &self.events[pos].mention.entity_id;
        self.events[..pos].iter().filter(move |e| &e.mention.entity_id == entity)
    }
}
