//! Model and relation documents.
//!
//! A model is stored either as JSON
//!
//! ```json
//! { "format_version": "1", "kind": "nflts",
//!   "states": ["s1", "s2"], "actions": ["a"], "labels": ["p"],
//!   "transitions": [ { "from": "s1", "action": "a", "to": { "s2": "0.5" } } ],
//!   "state_labels": { "s1": { "p": "0.7" } } }
//! ```
//!
//! or in a line-oriented text form with the same content:
//!
//! ```text
//! kind nflts
//! states s1 s2
//! actions a
//! labels p
//! trans s1 a s2:0.5
//! label s1 p:0.7
//! ```
//!
//! Everything after `#` on a text line is a comment. Declarations must come
//! before their first use. Degrees are always decimal strings.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::degree::Degree;
use crate::error::{Context, Error, Result};
use crate::fuzzy_set::FuzzySet;
use crate::model::{LabelId, Nflts, NftsBuilder, StateId};
use crate::relation::{CrispRelation, FuzzyRelation};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Nfts,
    Nflts,
}

/// A parsed model together with the kind its document declared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedModel {
    pub kind: Kind,
    pub model: Nflts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDocument {
    pub from: String,
    pub action: String,
    pub to: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: String,
    pub kind: Kind,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    #[serde(default)]
    pub transitions: Vec<TransitionDocument>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub state_labels: BTreeMap<String, BTreeMap<String, String>>,
}

fn degree(text: &str) -> Result<Degree> {
    text.parse().map_err(|source| Error::Degree { context: "invalid value".into(), source })
}

impl ModelDocument {
    pub fn into_model(self) -> Result<LoadedModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Document(format!("unsupported format_version `{}`", self.format_version)));
        }
        if self.kind == Kind::Nfts && (!self.labels.is_empty() || !self.state_labels.is_empty()) {
            return Err(Error::Document("kind `nfts` does not allow labels; use `nflts`".into()));
        }
        let mut b = NftsBuilder::new();
        for (i, s) in self.states.iter().enumerate() {
            b.add_state(s).field(|| format!("states[{i}]"))?;
        }
        for (i, a) in self.actions.iter().enumerate() {
            b.add_action(a).field(|| format!("actions[{i}]"))?;
        }
        for (i, t) in self.transitions.iter().enumerate() {
            let from = b.state(&t.from).field(|| format!("transitions[{i}].from"))?;
            let action = b.action(&t.action).field(|| format!("transitions[{i}].action"))?;
            let mut entries = Vec::with_capacity(t.to.len());
            for (name, value) in &t.to {
                let at = || format!("transitions[{i}].to.{name}");
                entries.push((b.state(name).field(at)?, degree(value).field(at)?));
            }
            let mu = b.intern_distribution(entries).field(|| format!("transitions[{i}].to"))?;
            b.add_transition(from, action, mu)?;
        }
        let base = b.build()?;
        let label_index: HashMap<&str, LabelId> =
            self.labels.iter().enumerate().map(|(i, p)| (p.as_str(), LabelId::from(i))).collect();
        let mut table = Vec::new();
        for (state, values) in &self.state_labels {
            let s = base.state(state).field(|| format!("state_labels.{state}"))?;
            let mut entries = Vec::new();
            for (p, value) in values {
                let at = || format!("state_labels.{state}.{p}");
                let id = label_index.get(p.as_str()).copied().ok_or_else(|| Error::UnknownLabel(p.clone())).field(at)?;
                entries.push((id, degree(value).field(at)?));
            }
            table.push((s, FuzzySet::from_entries(entries)));
        }
        let model = Nflts::new(base, self.labels, table).field(|| "labels".to_string())?;
        Ok(LoadedModel { kind: self.kind, model })
    }

    pub fn from_model(loaded: &LoadedModel) -> ModelDocument {
        let m = &loaded.model;
        let n = m.nfts();
        let name = |s: StateId| n.state_name(s).to_string();
        let transitions = n
            .transitions()
            .iter()
            .map(|t| TransitionDocument {
                from: name(t.source),
                action: n.action_name(t.action).to_string(),
                to: n.distribution(t.target).iter().map(|(s, d)| (name(s), d.to_string())).collect(),
            })
            .collect();
        let state_labels = n
            .state_ids()
            .filter(|&s| !m.state_label(s).is_empty())
            .map(|s| {
                let values = m.state_label(s).iter().map(|(p, d)| (m.labels()[p.index()].clone(), d.to_string())).collect();
                (name(s), values)
            })
            .collect();
        ModelDocument {
            format_version: FORMAT_VERSION.to_string(),
            kind: loaded.kind,
            states: n.states().to_vec(),
            actions: n.actions().to_vec(),
            labels: m.labels().to_vec(),
            transitions,
            state_labels,
        }
    }
}

/// Parses a model document, JSON if it starts with `{`, text otherwise.
pub fn parse_model(text: &str) -> Result<LoadedModel> {
    if text.trim_start().starts_with('{') {
        let doc: ModelDocument = serde_json::from_str(text)?;
        doc.into_model()
    } else {
        parse_model_text(text)
    }
}

pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path)?;
    parse_model(&text).field(|| path.display().to_string())
}

pub fn model_to_json(loaded: &LoadedModel) -> String {
    serde_json::to_string_pretty(&ModelDocument::from_model(loaded)).expect("documents serialize")
}

fn split_entry(token: &str) -> Option<(&str, &str)> {
    token.rsplit_once(':').filter(|(k, v)| !k.is_empty() && !v.is_empty())
}

/// Parses the line-oriented text form.
pub fn parse_model_text(text: &str) -> Result<LoadedModel> {
    let mut b = NftsBuilder::new();
    let mut kind: Option<Kind> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut label_index: HashMap<String, LabelId> = HashMap::new();
    let mut state_labels: BTreeMap<StateId, Vec<(LabelId, Degree)>> = BTreeMap::new();
    let mut first_label_line = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let at = |e: Error| Error::Parse { line, message: e.to_string() };
        let bad = |message: String| Error::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();
        match head {
            "format_version" => match rest.as_slice() {
                [v] if *v == FORMAT_VERSION => {}
                _ => return Err(bad(format!("unsupported format_version `{}`", rest.join(" ")))),
            },
            "kind" => {
                kind = Some(match rest.as_slice() {
                    ["nfts"] => Kind::Nfts,
                    ["nflts"] => Kind::Nflts,
                    _ => return Err(bad(format!("expected `kind nfts` or `kind nflts`, found `{}`", rest.join(" ")))),
                });
            }
            "states" => {
                for s in rest {
                    b.add_state(s).map_err(at)?;
                }
            }
            "actions" => {
                for a in rest {
                    b.add_action(a).map_err(at)?;
                }
            }
            "labels" => {
                first_label_line.get_or_insert(line);
                for p in rest {
                    if label_index.insert(p.to_string(), LabelId::from(labels.len())).is_some() {
                        return Err(at(Error::Duplicate { kind: "label", name: p.to_string() }));
                    }
                    labels.push(p.to_string());
                }
            }
            "trans" => {
                let [from, action, entries @ ..] = rest.as_slice() else {
                    return Err(bad("expected `trans STATE ACTION [STATE:DEGREE ...]`".into()));
                };
                let from = b.state(from).map_err(at)?;
                let action = b.action(action).map_err(at)?;
                let mut resolved = Vec::with_capacity(entries.len());
                for entry in entries {
                    let (s, d) = split_entry(entry).ok_or_else(|| bad(format!("expected STATE:DEGREE, found `{entry}`")))?;
                    resolved.push((b.state(s).map_err(at)?, degree(d).map_err(at)?));
                }
                let mu = b.intern_distribution(resolved).map_err(at)?;
                b.add_transition(from, action, mu).map_err(at)?;
            }
            "label" => {
                first_label_line.get_or_insert(line);
                let [state, entries @ ..] = rest.as_slice() else {
                    return Err(bad("expected `label STATE [LABEL:DEGREE ...]`".into()));
                };
                let s = b.state(state).map_err(at)?;
                let slot = state_labels.entry(s).or_default();
                for entry in entries {
                    let (p, d) = split_entry(entry).ok_or_else(|| bad(format!("expected LABEL:DEGREE, found `{entry}`")))?;
                    let id = label_index.get(p).copied().ok_or_else(|| at(Error::UnknownLabel(p.to_string())))?;
                    slot.push((id, degree(d).map_err(at)?));
                }
            }
            other => return Err(bad(format!("unknown directive `{other}`"))),
        }
    }
    let kind = match (kind, first_label_line) {
        (Some(Kind::Nfts), Some(line)) => {
            return Err(Error::Parse { line, message: "kind `nfts` does not allow labels; use `nflts`".into() })
        }
        (Some(k), _) => k,
        (None, Some(_)) => Kind::Nflts,
        (None, None) => Kind::Nfts,
    };
    let base = b.build()?;
    let table = state_labels.into_iter().map(|(s, entries)| (s, FuzzySet::from_entries(entries)));
    let model = Nflts::new(base, labels, table)?;
    Ok(LoadedModel { kind, model })
}

pub fn model_to_text(loaded: &LoadedModel) -> String {
    let doc = ModelDocument::from_model(loaded);
    let mut out = String::new();
    let kind = match doc.kind {
        Kind::Nfts => "nfts",
        Kind::Nflts => "nflts",
    };
    let _ = writeln!(out, "kind {kind}");
    let _ = writeln!(out, "states {}", doc.states.join(" "));
    let _ = writeln!(out, "actions {}", doc.actions.join(" "));
    if !doc.labels.is_empty() {
        let _ = writeln!(out, "labels {}", doc.labels.join(" "));
    }
    for t in &doc.transitions {
        let entries: Vec<String> = t.to.iter().map(|(s, d)| format!(" {s}:{d}")).collect();
        let _ = writeln!(out, "trans {} {}{}", t.from, t.action, entries.concat());
    }
    for (s, values) in &doc.state_labels {
        let entries: Vec<String> = values.iter().map(|(p, d)| format!(" {p}:{d}")).collect();
        let _ = writeln!(out, "label {s}{}", entries.concat());
    }
    out
}

/// One pair of a relation document; `degree` defaults to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDocument {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Crisp,
    Fuzzy,
}

/// `{"kind": "fuzzy", "pairs": [{"from": "s1", "to": "s2", "degree": "0.4"}]}`.
/// Pairs that are not listed have degree 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDocument {
    pub kind: RelationKind,
    pub pairs: Vec<PairDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationInput {
    Crisp(CrispRelation),
    Fuzzy(FuzzyRelation),
}

impl RelationDocument {
    /// Resolves names against the row and column universes.
    pub fn resolve<S: AsRef<str>>(&self, rows: &[S], cols: &[S]) -> Result<RelationInput> {
        let index = |names: &[S]| -> HashMap<String, usize> {
            names.iter().enumerate().map(|(i, n)| (n.as_ref().to_string(), i)).collect()
        };
        let (ri, ci) = (index(rows), index(cols));
        let mut r = FuzzyRelation::zeros(rows.len(), cols.len());
        for (i, p) in self.pairs.iter().enumerate() {
            let x = *ri.get(&p.from).ok_or_else(|| Error::UnknownElement(p.from.clone())).field(|| format!("pairs[{i}].from"))?;
            let y = *ci.get(&p.to).ok_or_else(|| Error::UnknownElement(p.to.clone())).field(|| format!("pairs[{i}].to"))?;
            let d = match &p.degree {
                None => Degree::ONE,
                Some(text) => degree(text).field(|| format!("pairs[{i}].degree"))?,
            };
            if self.kind == RelationKind::Crisp && !(d.is_one() || d.is_zero()) {
                return Err(Error::Document(format!("pairs[{i}].degree: crisp relations take degree 0 or 1")));
            }
            r.set(x, y, d);
        }
        Ok(match self.kind {
            RelationKind::Crisp => RelationInput::Crisp(r.cut(Degree::ONE)),
            RelationKind::Fuzzy => RelationInput::Fuzzy(r),
        })
    }

    pub fn from_crisp<S: AsRef<str>>(r: &CrispRelation, rows: &[S], cols: &[S]) -> Self {
        let pairs = r
            .pairs()
            .map(|(x, y)| PairDocument { from: rows[x].as_ref().to_string(), to: cols[y].as_ref().to_string(), degree: None })
            .collect();
        RelationDocument { kind: RelationKind::Crisp, pairs }
    }

    pub fn from_fuzzy<S: AsRef<str>>(r: &FuzzyRelation, rows: &[S], cols: &[S]) -> Self {
        let pairs = r
            .entries()
            .map(|(x, y, d)| PairDocument {
                from: rows[x].as_ref().to_string(),
                to: cols[y].as_ref().to_string(),
                degree: Some(d.to_string()),
            })
            .collect();
        RelationDocument { kind: RelationKind::Fuzzy, pairs }
    }
}

pub fn parse_relation(text: &str) -> Result<RelationDocument> {
    Ok(serde_json::from_str(text)?)
}
