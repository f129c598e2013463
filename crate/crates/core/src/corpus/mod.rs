//! The annotated dialogue corpus: domain types, the text format, and
//! invariant checking.
//!
//! A corpus file is UTF-8, one record per line, fields separated by tabs.
//! Lines whose first non-blank character is `#` are comments.
//!
//! ```text
//! DIALOGUE <id> PAIR <spkA>-<spkB> PROBLEM <n> [BUDGET <dollars>]
//! U  <utt-no> <speaker> <free text>
//! PS <utt-no> <goal-label> <introduce|continue> <goal-id> <change[:implicit|:explicit],...|none> <determinate|indeterminate>
//! DU <utt-no> <action-directive|open-option|info-request|na> <offer|commit|na>
//! DE <utt-no> <mention-id> <relation> <entity-id> LINK=<id,...|-> ATTRS=<attr=val,...|-> EXPL=<attr,...|-> INFR=<attr,...|-> ACT=<goal-id> "<surface>"
//! ```
//!
//! Within an utterance the record order is `U`, `PS*`, `DU?`, `DE*`.

mod parse;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

pub use parse::{parse_corpus, parse_corpus_unchecked, serialize_corpus, CorpusError};
pub use validate::{validate, Violation};

token_enum! {
    /// The five attributes an object description can carry.
    pub enum Attr {
        Type => "type",
        Color => "color",
        Owner => "owner",
        Price => "price",
        Quantity => "quantity",
    }
}

token_enum! {
    pub enum FurnitureType {
        Sofa => "sofa",
        Chair => "chair",
        Table => "table",
        Rug => "rug",
        Lamp => "lamp",
        Superordinate => "superordinate",
    }
}

token_enum! {
    pub enum Color {
        Red => "red",
        Blue => "blue",
        Green => "green",
        Yellow => "yellow",
    }
}

token_enum! {
    /// Ownership as seen from the speaker of the mention.
    pub enum Owner {
        SelfOwned => "self",
        Other => "other",
        Ours => "ours",
    }
}

/// Largest quantity the task domain allows.
pub const MAX_QUANTITY: u8 = 4;

/// One annotated attribute value; `Unk` is a first-class value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AttrValue {
    Type(FurnitureType),
    Color(Color),
    Owner(Owner),
    Price(u32),
    Quantity(u8),
    Unk,
}

impl AttrValue {
    pub fn parse(attr: Attr, token: &str) -> Result<AttrValue, String> {
        if token == "unk" {
            return Ok(AttrValue::Unk);
        }
        match attr {
            Attr::Type => token.parse().map(AttrValue::Type),
            Attr::Color => token.parse().map(AttrValue::Color),
            Attr::Owner => token.parse().map(AttrValue::Owner),
            Attr::Price => token
                .parse::<u32>()
                .map(AttrValue::Price)
                .map_err(|_| format!("price must be integer dollars or unk, got `{token}`")),
            Attr::Quantity => match token.parse::<u8>() {
                Ok(q) if q <= MAX_QUANTITY => Ok(AttrValue::Quantity(q)),
                _ => Err(format!("quantity must be 0-{MAX_QUANTITY} or unk, got `{token}`")),
            },
        }
    }

    pub fn is_unk(self) -> bool {
        self == AttrValue::Unk
    }

    /// Whether this value belongs to `attr`'s vocabulary.
    pub fn fits(self, attr: Attr) -> bool {
        matches!(
            (attr, self),
            (_, AttrValue::Unk)
                | (Attr::Type, AttrValue::Type(_))
                | (Attr::Color, AttrValue::Color(_))
                | (Attr::Owner, AttrValue::Owner(_))
                | (Attr::Price, AttrValue::Price(_))
                | (Attr::Quantity, AttrValue::Quantity(_))
        )
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Type(t) => t.fmt(f),
            AttrValue::Color(c) => c.fmt(f),
            AttrValue::Owner(o) => o.fmt(f),
            AttrValue::Price(p) => p.fmt(f),
            AttrValue::Quantity(q) => q.fmt(f),
            AttrValue::Unk => f.write_str("unk"),
        }
    }
}

/// A subset of [`Attr`], stored as a bit set in canonical attribute order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrSet(u8);

impl AttrSet {
    pub const EMPTY: AttrSet = AttrSet(0);

    fn bit(attr: Attr) -> u8 {
        1 << (attr as u8)
    }

    pub fn all() -> AttrSet {
        Attr::ALL.iter().copied().collect()
    }

    pub fn contains(self, attr: Attr) -> bool {
        self.0 & Self::bit(attr) != 0
    }

    pub fn insert(&mut self, attr: Attr) {
        self.0 |= Self::bit(attr);
    }

    pub fn remove(&mut self, attr: Attr) {
        self.0 &= !Self::bit(attr);
    }

    pub fn with(mut self, attr: Attr) -> AttrSet {
        self.insert(attr);
        self
    }

    pub fn without(mut self, attr: Attr) -> AttrSet {
        self.remove(attr);
        self
    }

    pub fn union(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 & other.0)
    }

    pub fn difference(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Attr> {
        Attr::ALL.iter().copied().filter(move |a| self.contains(*a))
    }
}

impl FromIterator<Attr> for AttrSet {
    fn from_iter<I: IntoIterator<Item = Attr>>(iter: I) -> Self {
        let mut set = AttrSet::EMPTY;
        for a in iter {
            set.insert(a);
        }
        set
    }
}

impl fmt::Display for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        let names: Vec<&str> = self.iter().map(Attr::as_str).collect();
        f.write_str(&names.join(","))
    }
}

token_enum! {
    pub enum GoalLabel {
        SelectSofa => "SelectSofa",
        SelectTable => "SelectTable",
        SelectChairs => "SelectChairs",
        SelectOptionalItem => "SelectOptionalItem",
        SelectOptionalItemLR => "SelectOptionalItemLR",
        SelectOptionalItemDR => "SelectOptionalItemDR",
    }
}

token_enum! {
    pub enum GoalMode {
        Introduce => "introduce",
        Continue => "continue",
    }
}

token_enum! {
    pub enum ConstraintKind {
        DropColorMatch => "dropcolormatch",
        ColorLimit => "colorlimit",
        PriceLimit => "pricelimit",
        PriceUpperLimit => "priceupperlimit",
        PriceEvaluator => "priceevaluator",
    }
}

token_enum! {
    pub enum Presence {
        Implicit => "implicit",
        Explicit => "explicit",
    }
}

token_enum! {
    pub enum SolutionSize {
        Determinate => "determinate",
        Indeterminate => "indeterminate",
    }
}

/// A constraint change, optionally flagged as implicit or explicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintChange {
    pub kind: ConstraintKind,
    pub presence: Option<Presence>,
}

impl fmt::Display for ConstraintChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.presence {
            Some(p) => write!(f, "{}:{}", self.kind, p),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// Problem-solving layer: one record per goal/action the utterance touches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsRecord {
    pub goal_label: GoalLabel,
    pub mode: GoalMode,
    pub goal_id: String,
    /// Empty means `none`.
    pub constraint_changes: Vec<ConstraintChange>,
    pub solution_size: SolutionSize,
}

token_enum! {
    pub enum ListenerInfluence {
        ActionDirective => "action-directive",
        OpenOption => "open-option",
        InfoRequest => "info-request",
        Na => "na",
    }
}

token_enum! {
    pub enum SpeakerInfluence {
        Offer => "offer",
        Commit => "commit",
        Na => "na",
    }
}

/// Dialogue-act layer (influence on listener and on speaker).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DuRecord {
    pub listener: ListenerInfluence,
    pub speaker: SpeakerInfluence,
}

impl DuRecord {
    pub const NA: DuRecord = DuRecord {
        listener: ListenerInfluence::Na,
        speaker: SpeakerInfluence::Na,
    };
}

token_enum! {
    pub enum RefRelation {
        Initial => "initial",
        Coref => "coref",
        Set => "set",
        Class => "class",
        CnAnaphora => "cnanaphora",
        Predicative => "predicative",
    }
}

impl RefRelation {
    /// Relations that tie the mention to other discourse entities.
    pub fn is_inferential(self) -> bool {
        matches!(
            self,
            RefRelation::Set | RefRelation::Class | RefRelation::CnAnaphora | RefRelation::Predicative
        )
    }
}

/// Discourse-entity layer: one object description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MentionRecord {
    pub mention_id: String,
    pub relation: RefRelation,
    pub entity_id: String,
    pub links: Vec<String>,
    pub values: BTreeMap<Attr, AttrValue>,
    pub explicit: AttrSet,
    pub inferred: AttrSet,
    pub goal_id: String,
    pub surface: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Utterance {
    pub number: u32,
    pub speaker: String,
    pub text: String,
    pub ps: Vec<PsRecord>,
    pub du: Option<DuRecord>,
    pub mentions: Vec<MentionRecord>,
}

impl Utterance {
    /// Dialogue-act record, with a missing `DU` line read as `na`/`na`.
    pub fn du_or_na(&self) -> DuRecord {
        self.du.unwrap_or(DuRecord::NA)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dialogue {
    pub id: String,
    pub speakers: (String, String),
    pub problem: u32,
    /// Combined budget in dollars, when the annotation records it.
    pub budget: Option<u32>,
    pub utterances: Vec<Utterance>,
}

impl Dialogue {
    /// `A-B` with the two speakers sorted.
    pub fn speaker_pair(&self) -> String {
        let (a, b) = (&self.speakers.0, &self.speakers.1);
        if a <= b {
            format!("{a}-{b}")
        } else {
            format!("{b}-{a}")
        }
    }

    /// The other member of the speaker pair.
    pub fn partner_of(&self, speaker: &str) -> &str {
        if speaker == self.speakers.0 {
            &self.speakers.1
        } else {
            &self.speakers.0
        }
    }

    pub fn utterance(&self, number: u32) -> Option<&Utterance> {
        self.utterances.iter().find(|u| u.number == number)
    }

    pub fn mention_count(&self) -> usize {
        self.utterances.iter().map(|u| u.mentions.len()).sum()
    }

    /// Mentions in document order, paired with their utterance.
    pub fn mentions(&self) -> impl Iterator<Item = (&Utterance, &MentionRecord)> {
        self.utterances
            .iter()
            .flat_map(|u| u.mentions.iter().map(move |m| (u, m)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    pub dialogues: Vec<Dialogue>,
}

impl Corpus {
    pub fn mention_count(&self) -> usize {
        self.dialogues.iter().map(Dialogue::mention_count).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attr_set_display_is_canonical() {
        let s: AttrSet = [Attr::Price, Attr::Type, Attr::Owner].into_iter().collect();
        assert_eq!(s.to_string(), "type,owner,price");
        assert_eq!(AttrSet::EMPTY.to_string(), "-");
        assert_eq!(AttrSet::all().len(), 5);
    }

    #[test]
    fn attr_value_vocabularies() {
        assert_eq!(AttrValue::parse(Attr::Type, "rug"), Ok(AttrValue::Type(FurnitureType::Rug)));
        assert_eq!(AttrValue::parse(Attr::Price, "unk"), Ok(AttrValue::Unk));
        assert!(AttrValue::parse(Attr::Quantity, "5").is_err());
        assert!(AttrValue::parse(Attr::Color, "purple").is_err());
        assert!(AttrValue::Price(3).fits(Attr::Price));
        assert!(!AttrValue::Price(3).fits(Attr::Owner));
    }

    #[test]
    fn speaker_pair_is_sorted() {
        let d = Dialogue {
            id: "d".into(),
            speakers: ("STEVE".into(), "GARRETT".into()),
            problem: 1,
            budget: None,
            utterances: vec![],
        };
        assert_eq!(d.speaker_pair(), "GARRETT-STEVE");
        assert_eq!(d.partner_of("STEVE"), "GARRETT");
    }
}
