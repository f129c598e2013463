//! Learned content selection for object descriptions in task-oriented dialogue.
//!
//! The pipeline runs from an annotated dialogue corpus to an evaluated rule
//! model:
//!
//! 1. [`corpus`] parses and validates the line-oriented annotation format
//!    (problem-solving, dialogue-act and discourse-entity layers).
//! 2. [`discourse`] folds mentions into a discourse model so every mention
//!    can be described by what was known *before* it.
//! 3. [`focus`] decides which other entities are salient distractors, under
//!    an intentional segment model or two recency windows.
//! 4. [`features`] turns each mention into the 82-feature vector and one of
//!    16 attribute-subset class labels.
//! 5. [`rules`] induces ordered if-then rule lists by sequential covering and
//!    applies them.
//! 6. [`eval`] scores models with exact-match accuracy, k-fold
//!    cross-validation, paired t-tests, per-class metrics and kappa.
//!
//! [`synth`] generates corpora with a planted selection policy so the whole
//! pipeline can be exercised end to end, and [`assets`] ships two published
//! rule sets.

/// Declares a closed vocabulary of lowercase-ish tokens with `as_str`,
/// `FromStr`, `Display` and an `ALL` table.
macro_rules! token_enum {
    (
        $(#[$meta:meta])*
        $vis:vis enum $name:ident { $($variant:ident => $token:literal),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        $vis enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $token),+ }
            }
        }

        impl std::str::FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($token => Ok($name::$variant),)+
                    _ => Err(format!(
                        "unknown {} `{}` (expected one of: {})",
                        stringify!($name),
                        s,
                        [$($token),+].join(", ")
                    )),
                }
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

pub mod assets;
pub mod corpus;
pub mod discourse;
pub mod eval;
pub mod features;
pub mod focus;
pub mod rules;
pub mod synth;

pub use corpus::{parse_corpus, serialize_corpus, validate, Corpus, Dialogue};
pub use features::{encode_class, extract_examples, ClassLabel, Example, FeatureVector, GroupSet};
pub use focus::FocusModel;
pub use rules::{classify, train, LearnerParams, RuleList};
