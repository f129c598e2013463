//! Two published rule sets, shipped as rule-list text.

use crate::rules::{parse_rulelist, RuleList};

/// Rules learned from the assumed-familiarity and intentional-influence
/// features.
pub const FIG14_TEXT: &str = include_str!("../assets/fig14.rules");

/// The best performing rule set, over familiarity, inherent,
/// intentional-influence and contrast-set features.
pub const FIG16_TEXT: &str = include_str!("../assets/fig16.rules");

pub fn fig14() -> RuleList {
    parse_rulelist(FIG14_TEXT).expect("shipped asset parses")
}

pub fn fig16() -> RuleList {
    parse_rulelist(FIG16_TEXT).expect("shipped asset parses")
}

/// Resolves `@fig14` / `@fig16`.
pub fn builtin(name: &str) -> Option<RuleList> {
    match name {
        "@fig14" => Some(fig14()),
        "@fig16" => Some(fig16()),
        _ => None,
    }
}
