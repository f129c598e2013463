use std::fmt;
use std::str::FromStr;

use crate::corpus::{Attr, AttrSet, DuRecord, ListenerInfluence, SolutionSize, SpeakerInfluence};

/// Which of color, price, owner and quantity a description expresses; the
/// type alone is `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    CPQ,
    CPO,
    CPOQ,
    T,
    CP,
    O,
    CO,
    C,
    CQ,
    COQ,
    OQ,
    PO,
    Q,
    P,
    PQ,
    POQ,
}

/// The letters and their attributes, in label order.
const LETTERS: [(char, Attr); 4] = [('C', Attr::Color), ('P', Attr::Price), ('O', Attr::Owner), ('Q', Attr::Quantity)];

impl ClassLabel {
    /// All sixteen labels, most frequent in the reference corpus first.
    pub const ALL: &'static [ClassLabel] = &[
        ClassLabel::CPQ,
        ClassLabel::CPO,
        ClassLabel::CPOQ,
        ClassLabel::T,
        ClassLabel::CP,
        ClassLabel::O,
        ClassLabel::CO,
        ClassLabel::C,
        ClassLabel::CQ,
        ClassLabel::COQ,
        ClassLabel::OQ,
        ClassLabel::PO,
        ClassLabel::Q,
        ClassLabel::P,
        ClassLabel::PQ,
        ClassLabel::POQ,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::CPQ => "CPQ",
            ClassLabel::CPO => "CPO",
            ClassLabel::CPOQ => "CPOQ",
            ClassLabel::T => "T",
            ClassLabel::CP => "CP",
            ClassLabel::O => "O",
            ClassLabel::CO => "CO",
            ClassLabel::C => "C",
            ClassLabel::CQ => "CQ",
            ClassLabel::COQ => "COQ",
            ClassLabel::OQ => "OQ",
            ClassLabel::PO => "PO",
            ClassLabel::Q => "Q",
            ClassLabel::P => "P",
            ClassLabel::PQ => "PQ",
            ClassLabel::POQ => "POQ",
        }
    }

    /// The non-type attributes the label expresses.
    pub fn attrs(self) -> AttrSet {
        let s = self.as_str();
        LETTERS.iter().filter(|(c, _)| s.contains(*c)).map(|(_, a)| *a).collect()
    }

    pub fn index(self) -> usize {
        ClassLabel::ALL.iter().position(|c| *c == self).expect("label in ALL")
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassLabel::ALL
            .iter()
            .copied()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown class label `{s}`"))
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The class of a description from its explicit attributes. The type is
/// ignored: every description names it, possibly with a pronoun.
pub fn encode_class(explicit: AttrSet) -> ClassLabel {
    let code: String = LETTERS.iter().filter(|(_, a)| explicit.contains(*a)).map(|(c, _)| *c).collect();
    if code.is_empty() {
        return ClassLabel::T;
    }
    code.parse().expect("every subset of CPOQ is a label")
}

/// Reference counts per label in the original 393-description corpus.
pub const REFERENCE_CLASS_COUNTS: [(ClassLabel, usize); 16] = [
    (ClassLabel::CPQ, 64),
    (ClassLabel::CPO, 56),
    (ClassLabel::CPOQ, 46),
    (ClassLabel::T, 42),
    (ClassLabel::CP, 41),
    (ClassLabel::O, 32),
    (ClassLabel::CO, 31),
    (ClassLabel::C, 18),
    (ClassLabel::CQ, 14),
    (ClassLabel::COQ, 13),
    (ClassLabel::OQ, 12),
    (ClassLabel::PO, 11),
    (ClassLabel::Q, 5),
    (ClassLabel::P, 4),
    (ClassLabel::PQ, 2),
    (ClassLabel::POQ, 2),
];

token_enum! {
    /// Where an utterance leaves the collaborative agreement process.
    pub enum AgreementState {
        Propose => "propose",
        PartnerDecidableOption => "partner-decidable-option",
        UnconditionalCommit => "unconditional-commit",
        UnendorsedOption => "unendorsed-option",
        Statement => "statement",
    }
}

impl AgreementState {
    /// States that move the negotiation forward, as opposed to statements.
    pub fn is_critical(self) -> bool {
        self != AgreementState::Statement
    }
}

/// Derives the agreement state from the influence tags and solution size.
pub fn derive_agreement_state(du: DuRecord, size: Option<SolutionSize>) -> AgreementState {
    use AgreementState::*;
    match (du.speaker, du.listener, size) {
        (SpeakerInfluence::Commit, _, _) => UnconditionalCommit,
        (SpeakerInfluence::Offer, _, Some(SolutionSize::Determinate)) => Propose,
        (SpeakerInfluence::Offer, _, Some(SolutionSize::Indeterminate)) => PartnerDecidableOption,
        (_, ListenerInfluence::OpenOption, Some(SolutionSize::Determinate)) => UnendorsedOption,
        _ => Statement,
    }
}
