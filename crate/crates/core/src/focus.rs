//! Focus spaces and distractor sets.
//!
//! Three definitions of "currently salient":
//! - [`FocusModel::Segment`]: the focus stack derived from the
//!   introduce/continue annotations on problem-solving records;
//! - [`FocusModel::OneUtterance`]: entities in the preceding utterance;
//! - [`FocusModel::FiveUtterance`]: entities in the five preceding utterances.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::corpus::{Dialogue, GoalMode};
use crate::discourse::{build_model, DiscourseError, DiscourseModel, EntitySnapshot};

token_enum! {
    pub enum FocusModel {
        Segment => "seg",
        OneUtterance => "1utt",
        FiveUtterance => "5utt",
    }
}

impl FocusModel {
    /// Recency window in utterances, `None` for the segment model.
    pub fn window(self) -> Option<usize> {
        match self {
            FocusModel::Segment => None,
            FocusModel::OneUtterance => Some(1),
            FocusModel::FiveUtterance => Some(5),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FocusModel::Segment => "SEG",
            FocusModel::OneUtterance => "1UTT",
            FocusModel::FiveUtterance => "5UTT",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FocusError {
    #[error("dialogue {dialogue}, utterance {utterance}: continue of goal {goal} that was never introduced")]
    UnknownGoal { dialogue: String, utterance: u32, goal: String },
    #[error(transparent)]
    Discourse(#[from] DiscourseError),
}

/// A discourse segment: a set of goals plus the span of utterances in it or
/// in segments nested under it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub goal_ids: BTreeSet<String>,
    pub start_utt: u32,
    pub end_utt: u32,
    pub parent: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentStructure {
    pub segments: Vec<Segment>,
    /// Innermost segment per utterance index; `None` before the first
    /// problem-solving record.
    pub utt_segment: Vec<Option<usize>>,
}

impl SegmentStructure {
    /// The focus stack in force at an utterance, innermost first.
    pub fn active_stack(&self, utt_index: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.utt_segment.get(utt_index).copied().flatten();
        while let Some(s) = cur {
            out.push(s);
            cur = self.segments[s].parent;
        }
        out
    }

    pub fn active_goals(&self, utt_index: usize) -> BTreeSet<&str> {
        self.active_stack(utt_index)
            .into_iter()
            .flat_map(|s| self.segments[s].goal_ids.iter().map(String::as_str))
            .collect()
    }
}

/// Derives the segment structure with a focus stack: `introduce` pushes a
/// segment for the introduced goals, `continue` of a goal below the top pops
/// back to the segment holding it, and continuing a goal whose segment was
/// already popped opens a fresh segment for it.
pub fn segment_structure(d: &Dialogue) -> Result<SegmentStructure, FocusError> {
    let mut segments: Vec<Segment> = Vec::new();
    let mut utt_segment = Vec::with_capacity(d.utterances.len());
    let mut stack: Vec<usize> = Vec::new();
    let mut introduced: HashSet<String> = HashSet::new();

    for u in &d.utterances {
        if !u.ps.is_empty() {
            let mut continued = BTreeSet::new();
            let mut fresh = BTreeSet::new();
            for ps in &u.ps {
                match ps.mode {
                    GoalMode::Continue => {
                        if !introduced.contains(&ps.goal_id) && !fresh.contains(&ps.goal_id) {
                            return Err(FocusError::UnknownGoal {
                                dialogue: d.id.clone(),
                                utterance: u.number,
                                goal: ps.goal_id.clone(),
                            });
                        }
                        continued.insert(ps.goal_id.clone());
                    }
                    GoalMode::Introduce => {
                        fresh.insert(ps.goal_id.clone());
                    }
                }
            }
            // a goal introduced and continued in the same utterance lives in
            // the new segment
            continued.retain(|g| !fresh.contains(g));

            if !continued.is_empty() {
                let holds = |s: &usize| segments[*s].goal_ids.iter().any(|g| continued.contains(g));
                if let Some(depth) = stack.iter().rposition(holds) {
                    stack.truncate(depth + 1);
                } else {
                    segments.push(Segment {
                        goal_ids: continued.clone(),
                        start_utt: u.number,
                        end_utt: u.number,
                        parent: stack.last().copied(),
                    });
                    stack.push(segments.len() - 1);
                }
            }
            if !fresh.is_empty() {
                introduced.extend(fresh.iter().cloned());
                segments.push(Segment {
                    goal_ids: fresh,
                    start_utt: u.number,
                    end_utt: u.number,
                    parent: stack.last().copied(),
                });
                stack.push(segments.len() - 1);
            }
        }
        let top = stack.last().copied();
        for s in &stack {
            segments[*s].end_utt = u.number;
        }
        utt_segment.push(top);
    }
    Ok(SegmentStructure { segments, utt_segment })
}

/// Entities other than the target that are salient at the target mention,
/// each with its snapshot as of that mention. Sorted by entity id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistractorSet {
    pub members: Vec<EntitySnapshot>,
}

impl DistractorSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn entity_ids(&self) -> Vec<&str> {
        self.members.iter().map(|s| s.entity_id.as_str()).collect()
    }
}

/// Distractors for the mention at document position `pos`.
pub fn distractors_at(
    model: &DiscourseModel<'_>,
    segments: &SegmentStructure,
    pos: usize,
    focus: FocusModel,
) -> DistractorSet {
    let target = &model.events[pos];
    let target_entity = target.mention.entity_id.as_str();
    let mut salient: BTreeMap<&str, ()> = BTreeMap::new();

    match focus.window() {
        Some(w) => {
            let lo = target.utt_index.saturating_sub(w);
            for e in &model.events[..pos] {
                if e.utt_index >= lo && e.utt_index < target.utt_index {
                    salient.insert(&e.mention.entity_id, ());
                }
            }
        }
        None => {
            let stack: HashSet<usize> = segments.active_stack(target.utt_index).into_iter().collect();
            let goals = segments.active_goals(target.utt_index);
            for e in &model.events[..pos] {
                let in_stack = segments.utt_segment[e.utt_index].is_some_and(|s| stack.contains(&s));
                if in_stack && goals.contains(e.mention.goal_id.as_str()) {
                    salient.insert(&e.mention.entity_id, ());
                }
            }
        }
    }
    salient.remove(target_entity);
    DistractorSet { members: salient.keys().map(|id| model.snapshot_before(id, pos)).collect() }
}

/// Distractors for the mention `mention_id` of dialogue `d`.
pub fn distractors(d: &Dialogue, mention_id: &str, focus: FocusModel) -> Result<DistractorSet, FocusError> {
    let model = build_model(d)?;
    let segments = segment_structure(d)?;
    let pos = model.event_by_mention_id(mention_id)?.pos;
    Ok(distractors_at(&model, &segments, pos, focus))
}
