//! Synthetic corpora with a planted attribute-selection policy.
//!
//! Each dialogue is built left to right. Goals, agreement moves, speakers and
//! the entity behind every mention are drawn first; the mention's explicit
//! attributes are then chosen by classifying its feature vector with the
//! policy, so labels always follow from features and never the reverse.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{
    Attr, AttrSet, AttrValue, Color, ConstraintChange, ConstraintKind, Corpus, Dialogue, DuRecord, FurnitureType,
    GoalLabel, GoalMode, ListenerInfluence, MentionRecord, Owner, Presence, PsRecord, RefRelation, SolutionSize,
    SpeakerInfluence, Utterance,
};
use crate::features::{ClassLabel, DialogueFeatures, FeatureError, GroupSet};
use crate::focus::FocusModel;
use crate::rules::{classify, parse_rulelist, RuleList};

/// A five-rule policy over familiarity, inherent and intentional-influence
/// features. Apart from the initial-mention split, the rules cover disjoint
/// regions, so their order does not matter.
pub const DEFAULT_POLICY: &str = "\
IF reference-relation = initial AND quantity >= 2 THEN CPQ
IF reference-relation = initial THEN CPO
IF reference-relation = coref AND prev-commit-speaker = commit THEN C
IF reference-relation = coref AND prev-commit-speaker = offer AND solution-size = determinate THEN T
IF reference-relation = coref AND prev-commit-speaker = na AND influence-on-listener = action-directive THEN CP
DEFAULT O
";

pub fn default_policy() -> RuleList {
    parse_rulelist(DEFAULT_POLICY).expect("built-in policy parses")
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Features(#[from] FeatureError),
}

#[derive(Clone, Debug)]
pub struct SynthParams {
    pub seed: u64,
    pub n_dialogues: usize,
    pub utterances_per_dialogue: RangeInclusive<usize>,
    pub entities_per_dialogue: RangeInclusive<usize>,
    pub policy: RuleList,
    /// Share of mentions whose label is replaced by a different random one.
    pub label_noise: f64,
    /// Focus model used when computing the features the policy sees.
    pub focus: FocusModel,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            seed: 0,
            n_dialogues: 13,
            utterances_per_dialogue: 20..=30,
            entities_per_dialogue: 6..=12,
            policy: default_policy(),
            label_noise: 0.0,
            focus: FocusModel::Segment,
        }
    }
}

impl SynthParams {
    fn check(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Params(m.into()));
        if self.utterances_per_dialogue.is_empty() || *self.utterances_per_dialogue.start() < 2 {
            return bad("utterances per dialogue must be a nonempty range starting at 2 or more");
        }
        if self.entities_per_dialogue.is_empty() || *self.entities_per_dialogue.start() < 1 {
            return bad("entities per dialogue must be a nonempty range starting at 1 or more");
        }
        if !(0.0..1.0).contains(&self.label_noise) {
            return bad("label noise must lie in [0, 1)");
        }
        let unknown = self.policy.unresolved_features();
        if !unknown.is_empty() {
            return Err(SynthError::Params(format!("policy uses unknown features: {}", unknown.join(", "))));
        }
        Ok(())
    }
}

const NAMES: [&str; 10] = ["Garrett", "Steve", "Julie", "Jon", "Dave", "Greg", "Jill", "Penny", "Kathy", "Mark"];

const GOALS: [(GoalLabel, FurnitureType); 5] = [
    (GoalLabel::SelectSofa, FurnitureType::Sofa),
    (GoalLabel::SelectTable, FurnitureType::Table),
    (GoalLabel::SelectChairs, FurnitureType::Chair),
    (GoalLabel::SelectOptionalItemLR, FurnitureType::Rug),
    (GoalLabel::SelectOptionalItemDR, FurnitureType::Lamp),
];

struct Entity {
    id: String,
    ftype: FurnitureType,
    color: Color,
    holder: usize,
    price: u32,
    quantity: u8,
}

pub fn generate(p: &SynthParams) -> Result<Corpus, SynthError> {
    p.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut dialogues = Vec::with_capacity(p.n_dialogues);
    for n in 0..p.n_dialogues {
        dialogues.push(dialogue(p, &mut rng, n)?);
    }
    Ok(Corpus { dialogues })
}

fn dialogue(p: &SynthParams, rng: &mut ChaCha8Rng, n: usize) -> Result<Dialogue, SynthError> {
    let pair: Vec<&str> = NAMES.choose_multiple(rng, 2).copied().collect();
    let speakers = [pair[0].to_string(), pair[1].to_string()];
    let mut d = Dialogue {
        id: format!("syn{:03}", n + 1),
        speakers: (speakers[0].clone(), speakers[1].clone()),
        problem: rng.gen_range(1..=4),
        budget: Some(rng.gen_range(8..=24) * 50),
        utterances: Vec::new(),
    };
    let n_utts = rng.gen_range(p.utterances_per_dialogue.clone());
    let max_entities = rng.gen_range(p.entities_per_dialogue.clone());

    let mut entities: Vec<Entity> = Vec::new();
    // (goal id, goal index) for goals introduced so far
    let mut goals: Vec<(String, usize)> = Vec::new();
    let mut current = 0usize;
    let mut speaker = 0usize;
    let mut mention_no = 0usize;

    for i in 0..n_utts {
        if i > 0 && (i == 1 || rng.gen_bool(0.7)) {
            speaker = 1 - speaker;
        }
        let mode = if goals.is_empty() || (goals.len() < GOALS.len() && rng.gen_bool(0.15)) {
            goals.push((format!("act{}", goals.len() + 1), goals.len()));
            current = goals.len() - 1;
            GoalMode::Introduce
        } else {
            if goals.len() > 1 && rng.gen_bool(0.1) {
                current = rng.gen_range(0..goals.len());
            }
            GoalMode::Continue
        };
        let (goal_id, goal_index) = goals[current].clone();
        let constraint_changes = if rng.gen_bool(0.12) {
            vec![ConstraintChange {
                kind: *ConstraintKind::ALL.choose(rng).expect("nonempty"),
                presence: [None, Some(Presence::Implicit), Some(Presence::Explicit)].choose(rng).copied().flatten(),
            }]
        } else {
            Vec::new()
        };
        let ps = PsRecord {
            goal_label: GOALS[goal_index].0,
            mode,
            goal_id: goal_id.clone(),
            constraint_changes,
            solution_size: if rng.gen_bool(0.4) { SolutionSize::Determinate } else { SolutionSize::Indeterminate },
        };
        let du = DuRecord {
            listener: *[
                ListenerInfluence::ActionDirective,
                ListenerInfluence::OpenOption,
                ListenerInfluence::InfoRequest,
                ListenerInfluence::Na,
            ]
            .choose(rng)
            .expect("nonempty"),
            speaker: *[SpeakerInfluence::Offer, SpeakerInfluence::Commit, SpeakerInfluence::Na].choose(rng).expect("nonempty"),
        };
        d.utterances.push(Utterance {
            number: (i + 1) as u32,
            speaker: speakers[speaker].clone(),
            text: String::new(),
            ps: vec![ps],
            du: Some(du),
            mentions: Vec::new(),
        });

        let n_mentions = if rng.gen_bool(0.3) { 2 } else { 1 };
        let mut surfaces = Vec::new();
        for _ in 0..n_mentions {
            mention_no += 1;
            let ftype = GOALS[goal_index].1;
            let (entity, relation, links) = pick_entity(rng, &mut entities, ftype, max_entities);
            let m = mention(p, rng, &mut d, &entities[entity], relation, links, speaker, &goal_id, mention_no)?;
            surfaces.push(m);
        }
        let u = d.utterances.last_mut().expect("pushed above");
        u.text = format!("{}.", surfaces.join(" and "));
    }
    Ok(d)
}

/// Chooses who is mentioned: a fresh entity of the goal's type, an earlier
/// one (preferably of that type), or now and then a set over two earlier
/// entities.
fn pick_entity(
    rng: &mut ChaCha8Rng,
    entities: &mut Vec<Entity>,
    ftype: FurnitureType,
    max_entities: usize,
) -> (usize, RefRelation, Vec<String>) {
    let mentioned: Vec<usize> = (0..entities.len()).collect();
    let same_type: Vec<usize> = mentioned.iter().copied().filter(|e| entities[*e].ftype == ftype).collect();
    let room = entities.len() < max_entities;

    if mentioned.len() >= 2 && room && rng.gen_bool(0.05) {
        let pair: Vec<usize> = mentioned.choose_multiple(rng, 2).copied().collect();
        let links = pair.iter().map(|e| entities[*e].id.clone()).collect();
        let color = entities[pair[0]].color;
        entities.push(Entity {
            id: format!("e{}", entities.len() + 1),
            ftype: FurnitureType::Superordinate,
            color,
            holder: entities[pair[0]].holder,
            price: entities[pair[0]].price,
            quantity: 2,
        });
        return (entities.len() - 1, RefRelation::Set, links);
    }
    if same_type.is_empty() && (room || mentioned.is_empty()) || room && rng.gen_bool(0.4) {
        entities.push(Entity {
            id: format!("e{}", entities.len() + 1),
            ftype,
            color: *Color::ALL.choose(rng).expect("nonempty"),
            holder: rng.gen_range(0..2),
            price: rng.gen_range(2..=24) * 25,
            quantity: if ftype == FurnitureType::Chair { rng.gen_range(1..=4) } else { 1 },
        });
        return (entities.len() - 1, RefRelation::Initial, Vec::new());
    }
    let pool = if same_type.is_empty() { &mentioned } else { &same_type };
    (*pool.choose(rng).expect("nonempty pool"), RefRelation::Coref, Vec::new())
}

fn value_of(e: &Entity, attr: Attr, speaker: usize) -> AttrValue {
    match attr {
        Attr::Type => AttrValue::Type(e.ftype),
        Attr::Color => AttrValue::Color(e.color),
        Attr::Owner => AttrValue::Owner(if e.holder == speaker { Owner::SelfOwned } else { Owner::Other }),
        Attr::Price => AttrValue::Price(e.price),
        Attr::Quantity => AttrValue::Quantity(e.quantity),
    }
}

/// Appends one mention to the last utterance of `d` and returns its surface.
///
/// The explicit set comes from the policy. Its label is found by a small
/// fixpoint: classify with the type plus some inferred attributes as known
/// values, add the chosen attributes' values and classify again; if the
/// label moves, fall back to recording all five values, which makes the
/// features independent of the choice.
#[allow(clippy::too_many_arguments)]
fn mention(
    p: &SynthParams,
    rng: &mut ChaCha8Rng,
    d: &mut Dialogue,
    e: &Entity,
    relation: RefRelation,
    links: Vec<String>,
    speaker: usize,
    goal_id: &str,
    n: usize,
) -> Result<String, SynthError> {
    let mut inferred_candidates = AttrSet::EMPTY.with(Attr::Type);
    for a in [Attr::Color, Attr::Price, Attr::Owner, Attr::Quantity] {
        if rng.gen_bool(0.25) {
            inferred_candidates.insert(a);
        }
    }
    let noisy = p.label_noise > 0.0 && rng.gen_bool(p.label_noise);
    let noise_label = *ClassLabel::ALL.choose(rng).expect("nonempty");

    let record = |known: AttrSet| MentionRecord {
        mention_id: format!("m{n}"),
        relation,
        entity_id: e.id.clone(),
        links: links.clone(),
        values: known.iter().map(|a| (a, value_of(e, a, speaker))).collect::<BTreeMap<_, _>>(),
        explicit: AttrSet::EMPTY,
        inferred: AttrSet::EMPTY,
        goal_id: goal_id.to_string(),
        surface: String::new(),
    };
    let label_with = |d: &mut Dialogue, known: AttrSet| -> Result<ClassLabel, SynthError> {
        d.utterances.last_mut().expect("utterance").mentions.push(record(known));
        let pos = d.mention_count() - 1;
        let v = DialogueFeatures::new(d)?.vector(pos, GroupSet::all(), Some(p.focus))?;
        d.utterances.last_mut().expect("utterance").mentions.pop();
        Ok(classify(&p.policy, &v))
    };

    let first = label_with(d, inferred_candidates)?;
    let mut known = inferred_candidates.union(first.attrs());
    let mut label = label_with(d, known)?;
    if label != first {
        known = AttrSet::all();
        label = label_with(d, known)?;
    }
    if noisy && noise_label != label {
        label = noise_label;
        known = known.union(label.attrs());
    }

    let explicit = label.attrs().with(Attr::Type);
    let mut m = record(known.union(explicit));
    m.explicit = explicit;
    m.inferred = m.values.keys().copied().collect::<AttrSet>().difference(explicit);
    m.surface = surface(e, explicit, speaker);
    let s = m.surface.clone();
    d.utterances.last_mut().expect("utterance").mentions.push(m);
    Ok(s)
}

fn surface(e: &Entity, explicit: AttrSet, speaker: usize) -> String {
    let mut words = Vec::new();
    if explicit.contains(Attr::Owner) {
        words.push(if e.holder == speaker { "my" } else { "your" }.to_string());
    } else {
        words.push("the".into());
    }
    if explicit.contains(Attr::Quantity) {
        words.push(e.quantity.to_string());
    }
    if explicit.contains(Attr::Color) {
        words.push(e.color.to_string());
    }
    let noun = match e.ftype {
        FurnitureType::Superordinate => "ones".to_string(),
        t if e.quantity > 1 => format!("{t}s"),
        t => t.to_string(),
    };
    words.push(noun);
    if explicit.contains(Attr::Price) {
        words.push(format!("for ${}", e.price));
    }
    words.join(" ")
}
