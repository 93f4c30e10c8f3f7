//! Artifact sets and gold answer sets.
//!
//! A [`Corpus`] is always held in canonical order: sources and targets are
//! sorted byte-wise by id, and every index used downstream refers to that
//! order.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Source,
    Target,
}

/// One requirement (source) or candidate document (target).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub id: String,
    pub role: Role,
    pub text: String,
}

impl Artifact {
    /// Builds an artifact, checking the id alphabet and that the text is not blank.
    pub fn new(id: impl Into<String>, role: Role, text: impl Into<String>) -> Result<Self> {
        let id = id.into();
        let text = text.into();
        if !is_valid_id(&id) {
            return Err(Error::InvalidId(id));
        }
        if text.trim().is_empty() {
            return Err(Error::EmptyArtifact(id));
        }
        Ok(Self { id, role, text })
    }
}

/// `[A-Za-z0-9_.-]+`
pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-'))
}

/// The gold trace links of a dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnswerSet {
    links: BTreeSet<(String, String)>,
}

impl AnswerSet {
    /// Builds a set from pairs, rejecting duplicates. Ids are not checked
    /// against any artifact set here; [`Corpus::new`] does that.
    pub fn from_pairs<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut links = BTreeSet::new();
        for (s, t) in pairs {
            let (s, t) = (s.into(), t.into());
            if links.contains(&(s.clone(), t.clone())) {
                return Err(Error::DuplicateLink(s, t));
            }
            links.insert((s, t));
        }
        Ok(Self { links })
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, source: &str, target: &str) -> bool {
        // BTreeSet<(String, String)> cannot be probed with borrowed tuples.
        self.links
            .range((source.to_string(), target.to_string())..)
            .next()
            .is_some_and(|(s, t)| s == source && t == target)
    }

    /// Links in (source, target) order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.links.iter().map(|(s, t)| (s.as_str(), t.as_str()))
    }

    /// Targets linked to `source`, ascending.
    pub fn targets_of<'a>(&'a self, source: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.links
            .range((source.to_string(), String::new())..)
            .take_while(move |(s, _)| s == source)
            .map(|(_, t)| t.as_str())
    }
}

/// Parses the answer-set TSV: `source_id<TAB>target_id` per line, `#`
/// comments and blank lines ignored, no header.
pub fn parse_answers(text: &str) -> Result<AnswerSet> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let source = fields.next().unwrap_or("").trim();
        let target = fields.next().map(str::trim);
        let format_err = |msg: String| Error::Format { line: line_no, msg };
        let target = match target {
            Some(t) if !t.is_empty() => t,
            _ => {
                return Err(format_err(format!(
                    "expected `source<TAB>target`, got {line:?}"
                )))
            }
        };
        if fields.next().is_some() {
            return Err(format_err("more than two fields".into()));
        }
        if source.is_empty() {
            return Err(format_err("empty source id".into()));
        }
        pairs.push((source.to_string(), target.to_string()));
    }
    AnswerSet::from_pairs(pairs)
}

/// Serializes an answer set in the TSV format read by [`parse_answers`].
pub fn write_answers(answers: &AnswerSet) -> String {
    let mut out = String::new();
    for (s, t) in answers.iter() {
        out.push_str(s);
        out.push('\t');
        out.push_str(t);
        out.push('\n');
    }
    out
}

/// Sources, targets and gold links of one dataset, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    sources: Vec<Artifact>,
    targets: Vec<Artifact>,
    answers: AnswerSet,
}

impl Corpus {
    pub fn new(
        mut sources: Vec<Artifact>,
        mut targets: Vec<Artifact>,
        answers: AnswerSet,
    ) -> Result<Self> {
        for (set, role) in [(&mut sources, Role::Source), (&mut targets, Role::Target)] {
            for a in set.iter_mut() {
                if !is_valid_id(&a.id) {
                    return Err(Error::InvalidId(a.id.clone()));
                }
                if a.text.trim().is_empty() {
                    return Err(Error::EmptyArtifact(a.id.clone()));
                }
                a.role = role;
            }
            set.sort_by(|a, b| a.id.as_bytes().cmp(b.id.as_bytes()));
            if let Some(w) = set.windows(2).find(|w| w[0].id == w[1].id) {
                return Err(Error::DuplicateId(w[0].id.clone()));
            }
        }
        if sources.is_empty() {
            return Err(Error::CorpusTooSmall {
                what: "source artifacts",
                needed: 1,
                found: 0,
            });
        }
        if targets.len() < 2 {
            return Err(Error::CorpusTooSmall {
                what: "target artifacts",
                needed: 2,
                found: targets.len(),
            });
        }
        let has = |set: &[Artifact], id: &str| {
            set.binary_search_by(|a| a.id.as_bytes().cmp(id.as_bytes()))
                .is_ok()
        };
        for (s, t) in answers.iter() {
            if !has(&sources, s) {
                return Err(Error::DanglingAnswerId(s.to_string()));
            }
            if !has(&targets, t) {
                return Err(Error::DanglingAnswerId(t.to_string()));
            }
        }
        Ok(Self {
            sources,
            targets,
            answers,
        })
    }

    pub fn sources(&self) -> &[Artifact] {
        &self.sources
    }

    pub fn targets(&self) -> &[Artifact] {
        &self.targets
    }

    pub fn answers(&self) -> &AnswerSet {
        &self.answers
    }

    pub fn source_index(&self, id: &str) -> Option<usize> {
        self.sources
            .binary_search_by(|a| a.id.as_bytes().cmp(id.as_bytes()))
            .ok()
    }

    pub fn target_index(&self, id: &str) -> Option<usize> {
        self.targets
            .binary_search_by(|a| a.id.as_bytes().cmp(id.as_bytes()))
            .ok()
    }

    pub fn source_ids(&self) -> Vec<String> {
        self.sources.iter().map(|a| a.id.clone()).collect()
    }

    pub fn target_ids(&self) -> Vec<String> {
        self.targets.iter().map(|a| a.id.clone()).collect()
    }

    /// Gold-linked targets of one source; empty when the source has no links.
    pub fn gold_targets(&self, source_id: &str) -> Result<BTreeSet<String>> {
        if self.source_index(source_id).is_none() {
            return Err(Error::UnknownSourceId(source_id.to_string()));
        }
        Ok(self
            .answers
            .targets_of(source_id)
            .map(str::to_string)
            .collect())
    }

    /// Sources followed by targets, the order embeddings are computed in.
    pub fn all_artifacts(&self) -> impl Iterator<Item = &Artifact> {
        self.sources.iter().chain(self.targets.iter())
    }
}
