//! Ordered if-then rule lists over feature vectors, their text format, and a
//! sequential-covering learner.

mod learn;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::features::{feature_index, registry, ClassLabel, FeatureValue, FeatureVector};

pub use learn::{foil_gain, rule_gain, train, Learner, LearnerParams, MajorityLearner, RipperLearner};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Eq,
    Le,
    Ge,
}

impl Op {
    pub fn as_str(self) -> &'static str {
        match self {
            Op::Eq => "=",
            Op::Le => "<=",
            Op::Ge => ">=",
        }
    }
}

/// The right-hand side of a condition.
#[derive(Clone, Debug, PartialEq)]
pub enum CondValue {
    Sym(String),
    Num(f64),
    Bool(bool),
    Na,
}

impl CondValue {
    /// `na`, `yes`/`no`, a number, or any other token as a symbol.
    pub fn parse(token: &str) -> CondValue {
        match token {
            "na" => CondValue::Na,
            "yes" => CondValue::Bool(true),
            "no" => CondValue::Bool(false),
            t => match t.parse::<f64>() {
                Ok(n) if n.is_finite() => CondValue::Num(n),
                _ => CondValue::Sym(t.to_string()),
            },
        }
    }
}

impl fmt::Display for CondValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CondValue::Sym(s) => f.write_str(s),
            CondValue::Num(n) => FeatureValue::Num(*n).fmt(f),
            CondValue::Bool(b) => FeatureValue::Bool(*b).fmt(f),
            CondValue::Na => f.write_str("na"),
        }
    }
}

/// Resolves a feature name, accepting `problem` for `problem-number`.
pub fn resolve_feature(name: &str) -> Option<usize> {
    feature_index(name).or(match name {
        "problem" => feature_index("problem-number"),
        _ => None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub feature: String,
    pub op: Op,
    pub value: CondValue,
    index: Option<usize>,
}

impl Condition {
    pub fn new(feature: &str, op: Op, value: CondValue) -> Condition {
        Condition { feature: feature.to_string(), op, value, index: resolve_feature(feature) }
    }

    pub(crate) fn with_index(index: usize, op: Op, value: CondValue) -> Condition {
        Condition { feature: registry()[index].name.to_string(), op, value, index: Some(index) }
    }

    /// Registry position, `None` for a name the registry does not know.
    pub fn index(&self) -> Option<usize> {
        self.index
    }

    /// Unknown features never hold; numeric comparisons fail on `na`;
    /// symbols compare case-insensitively.
    pub fn holds(&self, v: &FeatureVector) -> bool {
        let Some(i) = self.index else { return false };
        holds_value(self.op, &self.value, &v.values[i])
    }
}

pub(crate) fn holds_value(op: Op, cond: &CondValue, x: &FeatureValue) -> bool {
    match (op, cond, x) {
        (Op::Le, CondValue::Num(t), FeatureValue::Num(x)) => x <= t,
        (Op::Ge, CondValue::Num(t), FeatureValue::Num(x)) => x >= t,
        (Op::Eq, CondValue::Num(t), FeatureValue::Num(x)) => x == t,
        (Op::Eq, CondValue::Bool(b), FeatureValue::Bool(x)) => b == x,
        (Op::Eq, CondValue::Na, FeatureValue::Na) => true,
        (Op::Eq, CondValue::Sym(s), FeatureValue::Sym(x)) => s.eq_ignore_ascii_case(x),
        _ => false,
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.feature, self.op.as_str(), self.value)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub label: ClassLabel,
}

impl Rule {
    pub fn fires(&self, v: &FeatureVector) -> bool {
        self.conditions.iter().all(|c| c.holds(v))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IF ")?;
        for (i, c) in self.conditions.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            c.fmt(f)?;
        }
        write!(f, " THEN {}", self.label)
    }
}

/// Rules tried in order; the first that fires decides, else the default.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleList {
    pub rules: Vec<Rule>,
    pub default_label: ClassLabel,
}

impl RuleList {
    pub fn constant(label: ClassLabel) -> RuleList {
        RuleList { rules: Vec::new(), default_label: label }
    }

    /// Index of the first rule that fires.
    pub fn first_match(&self, v: &FeatureVector) -> Option<usize> {
        self.rules.iter().position(|r| r.fires(v))
    }

    /// Feature names in conditions that the registry does not define. Such
    /// conditions never hold.
    pub fn unresolved_features(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .rules
            .iter()
            .flat_map(|r| r.conditions.iter())
            .filter(|c| c.index.is_none())
            .map(|c| c.feature.as_str())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn classify(rl: &RuleList, v: &FeatureVector) -> ClassLabel {
    rl.first_match(v).map_or(rl.default_label, |i| rl.rules[i].label)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct RuleParseError {
    pub line: usize,
    pub message: String,
}

/// Parses `IF <feature> <op> <value> [AND ...] THEN <label>` lines followed
/// by one `DEFAULT <label>` line. Keywords are case-insensitive; `#` starts
/// a comment line.
pub fn parse_rulelist(text: &str) -> Result<RuleList, RuleParseError> {
    let mut rules = Vec::new();
    let mut default_label = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| RuleParseError { line, message };
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        if default_label.is_some() {
            return Err(err("nothing may follow the DEFAULT line".into()));
        }
        let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
        let rest = rest.trim();
        if head.eq_ignore_ascii_case("default") {
            default_label = Some(ClassLabel::from_str(rest).map_err(err)?);
        } else if head.eq_ignore_ascii_case("if") {
            rules.push(parse_rule(rest).map_err(err)?);
        } else {
            return Err(err(format!("expected IF or DEFAULT, found `{head}`")));
        }
    }
    let default_label = default_label.ok_or(RuleParseError {
        line: text.lines().count(),
        message: "missing DEFAULT line".into(),
    })?;
    Ok(RuleList { rules, default_label })
}

fn parse_rule(body: &str) -> Result<Rule, String> {
    let words: Vec<&str> = body.split_whitespace().collect();
    let then = words
        .iter()
        .rposition(|w| w.eq_ignore_ascii_case("then"))
        .ok_or_else(|| "missing THEN".to_string())?;
    let label = match &words[then + 1..] {
        [l] => l.parse::<ClassLabel>()?,
        _ => return Err("expected exactly one label after THEN".into()),
    };
    let mut conditions: Vec<Condition> = Vec::new();
    for part in words[..then].split(|w| w.eq_ignore_ascii_case("and")) {
        let c = parse_condition(&part.join(" "))?;
        if conditions.iter().any(|o| o.feature == c.feature && o.op == c.op) {
            return Err(format!("repeated test `{} {}`", c.feature, c.op.as_str()));
        }
        conditions.push(c);
    }
    Ok(Rule { conditions, label })
}

fn parse_condition(text: &str) -> Result<Condition, String> {
    const OPS: [(&str, Op); 5] = [("<=", Op::Le), (">=", Op::Ge), ("≤", Op::Le), ("≥", Op::Ge), ("=", Op::Eq)];
    let (at, tok, op) = OPS
        .iter()
        .filter_map(|(tok, op)| text.find(tok).map(|at| (at, *tok, *op)))
        .min_by_key(|(at, _, _)| *at)
        .ok_or_else(|| format!("no comparison in condition `{text}`"))?;
    let feature = text[..at].trim();
    let value = text[at + tok.len()..].trim();
    if feature.is_empty() || value.is_empty() || feature.contains(char::is_whitespace) || value.contains(char::is_whitespace)
    {
        return Err(format!("malformed condition `{text}`"));
    }
    let value = CondValue::parse(value);
    if op != Op::Eq && !matches!(value, CondValue::Num(_)) {
        return Err(format!("`{}` needs a numeric value in `{text}`", op.as_str()));
    }
    Ok(Condition::new(feature, op, value))
}

pub fn format_rulelist(rl: &RuleList) -> String {
    let mut out = String::new();
    for r in &rl.rules {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out.push_str(&format!("DEFAULT {}\n", rl.default_label));
    out
}
