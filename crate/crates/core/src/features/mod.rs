//! Feature extraction: every object description becomes an 82-dimensional
//! vector in five groups, plus the class of attributes it expresses.

mod class;
mod dataset;
mod extract;
mod registry;

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::discourse::DiscourseError;
use crate::focus::{FocusError, FocusModel};

pub use class::{derive_agreement_state, encode_class, AgreementState, ClassLabel, REFERENCE_CLASS_COUNTS};
pub use dataset::{read_dataset, write_dataset, DatasetError, DatasetRow};
pub use extract::DialogueFeatures;
pub use registry::{feature_index, group_size, registry, FeatureDef, FeatureGroup, FeatureType, GroupSet, FEATURE_COUNT};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error(transparent)]
    Focus(#[from] FocusError),
    #[error(transparent)]
    Discourse(#[from] DiscourseError),
    #[error("the contrast-set features need a focus model")]
    MissingFocus,
}

/// One feature value. `Na` marks a feature that does not apply (or a group
/// that was not selected).
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureValue {
    Bool(bool),
    Sym(String),
    Num(f64),
    Na,
}

impl FeatureValue {
    pub fn sym(s: impl Into<String>) -> FeatureValue {
        FeatureValue::Sym(s.into())
    }

    pub fn num(n: impl Into<f64>) -> FeatureValue {
        FeatureValue::Num(n.into())
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            FeatureValue::Num(n) => Some(*n),
            _ => None,
        }
    }

    /// Reads a value in the exported token syntax.
    pub fn parse(ftype: FeatureType, token: &str) -> Result<FeatureValue, String> {
        if token == "na" {
            return Ok(FeatureValue::Na);
        }
        match ftype {
            FeatureType::Boolean => match token {
                "yes" => Ok(FeatureValue::Bool(true)),
                "no" => Ok(FeatureValue::Bool(false)),
                _ => Err(format!("expected yes/no/na, got `{token}`")),
            },
            FeatureType::Numeric => token
                .parse::<f64>()
                .ok()
                .filter(|n| n.is_finite())
                .map(FeatureValue::Num)
                .ok_or_else(|| format!("expected a number or na, got `{token}`")),
            FeatureType::Symbolic => Ok(FeatureValue::Sym(token.to_string())),
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Bool(true) => f.write_str("yes"),
            FeatureValue::Bool(false) => f.write_str("no"),
            FeatureValue::Sym(s) => f.write_str(s),
            FeatureValue::Num(n) if n.fract() == 0.0 && n.abs() < 1e15 => write!(f, "{}", *n as i64),
            FeatureValue::Num(n) => write!(f, "{n}"),
            FeatureValue::Na => f.write_str("na"),
        }
    }
}

/// Values for all registry features, in registry order.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<FeatureValue>,
}

impl Default for FeatureVector {
    fn default() -> Self {
        FeatureVector { values: vec![FeatureValue::Na; FEATURE_COUNT] }
    }
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<&FeatureValue> {
        feature_index(name).map(|i| &self.values[i])
    }

    /// Sets a registry feature; panics on an unknown name.
    pub fn set(&mut self, name: &str, value: FeatureValue) {
        let i = feature_index(name).unwrap_or_else(|| panic!("unknown feature {name}"));
        self.values[i] = value;
    }

    /// A copy with every feature outside `groups` set to `na`.
    pub fn masked(&self, groups: GroupSet) -> FeatureVector {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| if groups.is_active(i) { v.clone() } else { FeatureValue::Na })
            .collect();
        FeatureVector { values }
    }
}

/// Where an example came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub dialogue: String,
    pub utterance: u32,
    pub mention_id: String,
}

/// One training instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub features: FeatureVector,
    pub label: ClassLabel,
    pub provenance: Provenance,
}

/// One example per mention, in corpus order. Features outside `groups` are
/// `na`; `focus` is required when the contrast group is selected.
pub fn extract_examples(
    corpus: &Corpus,
    groups: GroupSet,
    focus: Option<FocusModel>,
) -> Result<Vec<Example>, FeatureError> {
    if groups.contains(FeatureGroup::Contrast) && focus.is_none() {
        return Err(FeatureError::MissingFocus);
    }
    let per_dialogue: Vec<Vec<Example>> = corpus
        .dialogues
        .par_iter()
        .map(|d| DialogueFeatures::new(d)?.examples(groups, focus))
        .collect::<Result<_, _>>()?;
    Ok(per_dialogue.into_iter().flatten().collect())
}
