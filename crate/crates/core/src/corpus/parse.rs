use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{
    validate, Attr, AttrSet, AttrValue, ConstraintChange, Corpus, Dialogue, DuRecord, MentionRecord, PsRecord,
    Utterance, Violation,
};

const HEADER: &str = "# descsel corpus v1";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{} invariant violation(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
}

/// Parses and validates a corpus.
pub fn parse_corpus(text: &str) -> Result<Corpus, CorpusError> {
    let corpus = parse_corpus_unchecked(text)?;
    let violations = validate(&corpus);
    if violations.is_empty() {
        Ok(corpus)
    } else {
        Err(CorpusError::Invalid(violations))
    }
}

/// Parses a corpus, checking syntax and vocabularies but not cross-record
/// invariants.
pub fn parse_corpus_unchecked(text: &str) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let line = Line::new(line_no, raw.trim_end_matches('\r'));
        match line.keyword() {
            "DIALOGUE" => corpus.dialogues.push(line.dialogue()?),
            "U" => {
                let d = current_dialogue(&mut corpus, &line)?;
                let utt = line.utterance()?;
                d.utterances.push(utt);
            }
            "PS" | "DU" | "DE" => {
                let d = current_dialogue(&mut corpus, &line)?;
                let Some(utt) = d.utterances.last_mut() else {
                    return Err(line.err(0, "record before any U line"));
                };
                let number = line.utt_number()?;
                if number != utt.number {
                    return Err(line.err(1, format!("record for utterance {number} inside utterance {}", utt.number)));
                }
                match line.keyword() {
                    "PS" => {
                        if utt.du.is_some() || !utt.mentions.is_empty() {
                            return Err(line.err(0, "PS record after DU/DE records"));
                        }
                        utt.ps.push(line.ps()?);
                    }
                    "DU" => {
                        if utt.du.is_some() {
                            return Err(line.err(0, "second DU record for one utterance"));
                        }
                        if !utt.mentions.is_empty() {
                            return Err(line.err(0, "DU record after DE records"));
                        }
                        utt.du = Some(line.du()?);
                    }
                    _ => utt.mentions.push(line.mention()?),
                }
            }
            other => return Err(line.err(0, format!("unknown record kind `{other}`"))),
        }
    }
    Ok(corpus)
}

fn current_dialogue<'c>(corpus: &'c mut Corpus, line: &Line<'_>) -> Result<&'c mut Dialogue, CorpusError> {
    corpus
        .dialogues
        .last_mut()
        .ok_or_else(|| line.err(0, "record before any DIALOGUE line"))
}

/// A tab-split input line that remembers field columns for error reports.
struct Line<'a> {
    number: usize,
    fields: Vec<(usize, &'a str)>,
    raw: &'a str,
}

impl<'a> Line<'a> {
    fn new(number: usize, raw: &'a str) -> Self {
        let mut fields = Vec::new();
        let mut offset = 0;
        for part in raw.split('\t') {
            fields.push((offset + 1, part.trim()));
            offset += part.len() + 1;
        }
        Line { number, fields, raw }
    }

    fn keyword(&self) -> &'a str {
        self.fields[0].1
    }

    fn err(&self, field: usize, message: impl Into<String>) -> CorpusError {
        let column = self.fields.get(field).map_or(self.raw.len() + 1, |f| f.0);
        CorpusError::Syntax { line: self.number, column, message: message.into() }
    }

    fn field(&self, i: usize, what: &str) -> Result<&'a str, CorpusError> {
        match self.fields.get(i) {
            Some((_, f)) if !f.is_empty() => Ok(f),
            _ => Err(self.err(i, format!("missing {what}"))),
        }
    }

    fn expect_arity(&self, n: usize) -> Result<(), CorpusError> {
        if self.fields.len() > n {
            return Err(self.err(n, format!("unexpected extra field (a {} record has {n} fields)", self.keyword())));
        }
        Ok(())
    }

    fn parse_field<T: std::str::FromStr>(&self, i: usize, what: &str) -> Result<T, CorpusError>
    where
        T::Err: std::fmt::Display,
    {
        let f = self.field(i, what)?;
        f.parse::<T>().map_err(|e| self.err(i, format!("bad {what} `{f}`: {e}")))
    }

    fn keyword_at(&self, i: usize, kw: &str) -> Result<(), CorpusError> {
        if self.field(i, kw)? != kw {
            return Err(self.err(i, format!("expected `{kw}`")));
        }
        Ok(())
    }

    fn utt_number(&self) -> Result<u32, CorpusError> {
        self.parse_field(1, "utterance number")
    }

    fn dialogue(&self) -> Result<Dialogue, CorpusError> {
        let id = self.field(1, "dialogue id")?.to_string();
        self.keyword_at(2, "PAIR")?;
        let pair = self.field(3, "speaker pair")?;
        let speakers = match pair.split('-').collect::<Vec<_>>().as_slice() {
            [a, b] if !a.is_empty() && !b.is_empty() => (a.to_string(), b.to_string()),
            _ => return Err(self.err(3, format!("speaker pair must be <A>-<B>, got `{pair}`"))),
        };
        self.keyword_at(4, "PROBLEM")?;
        let problem: u32 = self.parse_field(5, "problem number")?;
        if problem == 0 {
            return Err(self.err(5, "problem number must be at least 1"));
        }
        let budget = if self.fields.len() > 6 {
            self.keyword_at(6, "BUDGET")?;
            Some(self.parse_field(7, "budget")?)
        } else {
            None
        };
        self.expect_arity(if budget.is_some() { 8 } else { 6 })?;
        Ok(Dialogue { id, speakers, problem, budget, utterances: Vec::new() })
    }

    fn utterance(&self) -> Result<Utterance, CorpusError> {
        let number = self.utt_number()?;
        let speaker = self.field(2, "speaker")?.to_string();
        let text = self.raw.splitn(4, '\t').nth(3).unwrap_or("").trim().to_string();
        Ok(Utterance { number, speaker, text, ps: Vec::new(), du: None, mentions: Vec::new() })
    }

    fn ps(&self) -> Result<PsRecord, CorpusError> {
        self.expect_arity(7)?;
        let goal_label = self.parse_field(2, "goal label")?;
        let mode = self.parse_field(3, "goal mode")?;
        let goal_id = self.field(4, "goal id")?.to_string();
        let change_field = self.field(5, "constraint change")?;
        let mut constraint_changes = Vec::new();
        if change_field != "none" {
            for part in change_field.split(',') {
                let (kind, presence) = match part.split_once(':') {
                    Some((k, p)) => (k, Some(p)),
                    None => (part, None),
                };
                let kind = kind.parse().map_err(|e: String| self.err(5, e))?;
                let presence = presence
                    .map(|p| p.parse())
                    .transpose()
                    .map_err(|e: String| self.err(5, e))?;
                constraint_changes.push(ConstraintChange { kind, presence });
            }
        }
        let solution_size = self.parse_field(6, "solution size")?;
        Ok(PsRecord { goal_label, mode, goal_id, constraint_changes, solution_size })
    }

    fn du(&self) -> Result<DuRecord, CorpusError> {
        self.expect_arity(4)?;
        Ok(DuRecord {
            listener: self.parse_field(2, "influence on listener")?,
            speaker: self.parse_field(3, "influence on speaker")?,
        })
    }

    fn prefixed(&self, i: usize, prefix: &str) -> Result<&'a str, CorpusError> {
        let f = self.field(i, prefix)?;
        f.strip_prefix(prefix)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| self.err(i, format!("expected {prefix}=...")))
    }

    fn list(&self, i: usize, prefix: &str) -> Result<Vec<&'a str>, CorpusError> {
        let body = self.prefixed(i, prefix)?;
        if body == "-" {
            return Ok(Vec::new());
        }
        let items: Vec<&str> = body.split(',').map(str::trim).collect();
        if items.iter().any(|s| s.is_empty()) {
            return Err(self.err(i, format!("empty item in {prefix} list")));
        }
        Ok(items)
    }

    fn attr_set(&self, i: usize, prefix: &str) -> Result<AttrSet, CorpusError> {
        let mut set = AttrSet::EMPTY;
        for item in self.list(i, prefix)? {
            let a: Attr = item.parse().map_err(|e: String| self.err(i, e))?;
            if set.contains(a) {
                return Err(self.err(i, format!("attribute `{a}` repeated in {prefix}")));
            }
            set.insert(a);
        }
        Ok(set)
    }

    fn mention(&self) -> Result<MentionRecord, CorpusError> {
        self.expect_arity(11)?;
        let mention_id = self.field(2, "mention id")?.to_string();
        let relation = self.parse_field(3, "reference relation")?;
        let entity_id = self.field(4, "entity id")?.to_string();
        let links = self.list(5, "LINK")?.into_iter().map(String::from).collect();
        let mut values = BTreeMap::new();
        for item in self.list(6, "ATTRS")? {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| self.err(6, format!("expected attr=value, got `{item}`")))?;
            let attr: Attr = name.parse().map_err(|e: String| self.err(6, e))?;
            let value = AttrValue::parse(attr, value).map_err(|e| self.err(6, e))?;
            if values.insert(attr, value).is_some() {
                return Err(self.err(6, format!("attribute `{attr}` given twice")));
            }
        }
        let explicit = self.attr_set(7, "EXPL")?;
        let inferred = self.attr_set(8, "INFR")?;
        let goal_id = self.prefixed(9, "ACT")?;
        if goal_id.is_empty() {
            return Err(self.err(9, "empty ACT goal id"));
        }
        let quoted = self.field(10, "surface string")?;
        let surface = quoted
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .filter(|_| quoted.len() >= 2)
            .ok_or_else(|| self.err(10, "surface string must be double-quoted"))?;
        Ok(MentionRecord {
            mention_id,
            relation,
            entity_id,
            links,
            values,
            explicit,
            inferred,
            goal_id: goal_id.to_string(),
            surface: surface.to_string(),
        })
    }
}

/// Writes a corpus in canonical form: fixed field order, one record per line.
pub fn serialize_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for d in &corpus.dialogues {
        write!(out, "DIALOGUE\t{}\tPAIR\t{}-{}\tPROBLEM\t{}", d.id, d.speakers.0, d.speakers.1, d.problem).unwrap();
        if let Some(b) = d.budget {
            write!(out, "\tBUDGET\t{b}").unwrap();
        }
        out.push('\n');
        for u in &d.utterances {
            writeln!(out, "U\t{}\t{}\t{}", u.number, u.speaker, u.text).unwrap();
            for ps in &u.ps {
                let changes = if ps.constraint_changes.is_empty() {
                    "none".to_string()
                } else {
                    ps.constraint_changes.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                };
                writeln!(
                    out,
                    "PS\t{}\t{}\t{}\t{}\t{}\t{}",
                    u.number, ps.goal_label, ps.mode, ps.goal_id, changes, ps.solution_size
                )
                .unwrap();
            }
            if let Some(du) = u.du {
                writeln!(out, "DU\t{}\t{}\t{}", u.number, du.listener, du.speaker).unwrap();
            }
            for m in &u.mentions {
                let links = if m.links.is_empty() { "-".to_string() } else { m.links.join(",") };
                let attrs = if m.values.is_empty() {
                    "-".to_string()
                } else {
                    m.values.iter().map(|(a, v)| format!("{a}={v}")).collect::<Vec<_>>().join(",")
                };
                writeln!(
                    out,
                    "DE\t{}\t{}\t{}\t{}\tLINK={}\tATTRS={}\tEXPL={}\tINFR={}\tACT={}\t\"{}\"",
                    u.number, m.mention_id, m.relation, m.entity_id, links, attrs, m.explicit, m.inferred, m.goal_id,
                    m.surface
                )
                .unwrap();
            }
        }
    }
    out
}
