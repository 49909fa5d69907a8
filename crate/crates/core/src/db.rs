//! Per-verb sense entries with case frames and their example case fillers.

use std::io::BufRead;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Example case fillers for one case of one sense. A multiset: committing
/// the same noun twice stores it twice.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FillerSet(pub Vec<String>);

impl FillerSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &str> + ExactSizeIterator {
        self.0.iter().map(String::as_str)
    }

    pub fn push(&mut self, word: impl Into<String>) {
        self.0.push(word.into());
    }
}

impl<S: Into<String>> FromIterator<S> for FillerSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        FillerSet(iter.into_iter().map(Into::into).collect())
    }
}

/// One sense of a verb. A case absent from `frame` is not subcategorized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseEntry {
    pub verb: String,
    #[serde(rename = "sense")]
    pub sense_id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub gloss: String,
    pub frame: IndexMap<String, FillerSet>,
}

impl SenseEntry {
    pub fn fillers(&self, case: &str) -> Option<&FillerSet> {
        self.frame.get(case)
    }

    pub fn subcategorizes(&self, case: &str) -> bool {
        self.frame.contains_key(case)
    }
}

/// A case-marker/noun pair, serialized as `["ga", "noun"]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Complement(pub String, pub String);

impl Complement {
    pub fn new(case: impl Into<String>, noun: impl Into<String>) -> Self {
        Complement(case.into(), noun.into())
    }

    pub fn case(&self) -> &str {
        &self.0
    }

    pub fn noun(&self) -> &str {
        &self.1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceExample {
    pub id: String,
    pub verb: String,
    pub complements: Vec<Complement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<String>,
}

impl SentenceExample {
    pub fn new<C: Into<String>, N: Into<String>>(
        id: impl Into<String>,
        verb: impl Into<String>,
        complements: impl IntoIterator<Item = (C, N)>,
    ) -> Self {
        SentenceExample {
            id: id.into(),
            verb: verb.into(),
            complements: complements.into_iter().map(|(c, n)| Complement::new(c, n)).collect(),
            gold: None,
        }
    }

    pub fn with_gold(mut self, sense: impl Into<String>) -> Self {
        self.gold = Some(sense.into());
        self
    }

    pub fn cases(&self) -> impl Iterator<Item = &str> {
        self.complements.iter().map(Complement::case)
    }

    pub fn filler(&self, case: &str) -> Option<&str> {
        self.complements.iter().find(|c| c.case() == case).map(Complement::noun)
    }

    /// Checks the shape of the sentence on its own: at least one
    /// complement, no repeated case marker.
    pub fn check_shape(&self) -> Result<()> {
        let invalid = |message: &str| Error::InvalidSentence {
            id: self.id.clone(),
            message: message.into(),
        };
        if self.complements.is_empty() {
            return Err(invalid("no complements"));
        }
        for (i, c) in self.complements.iter().enumerate() {
            if self.complements[..i].iter().any(|p| p.case() == c.case()) {
                return Err(invalid(&format!("case `{}` appears twice", c.case())));
            }
        }
        Ok(())
    }

    /// Checks the sentence against a database: the verb has an entry and
    /// the gold sense, if any, is one of its senses.
    pub fn validate(&self, db: &Database) -> Result<()> {
        self.check_shape()?;
        let senses = db
            .senses(&self.verb)
            .ok_or_else(|| Error::UnknownVerb(self.verb.clone()))?;
        if let Some(gold) = &self.gold {
            if !senses.iter().any(|s| &s.sense_id == gold) {
                return Err(Error::UnknownSense {
                    verb: self.verb.clone(),
                    sense: gold.clone(),
                });
            }
        }
        Ok(())
    }
}

/// What to do when a committed sentence carries a case the chosen sense
/// does not subcategorize.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommitPolicy {
    #[default]
    Reject,
    ExtendFrame,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Database {
    verbs: IndexMap<String, Vec<SenseEntry>>,
}

impl Database {
    pub fn load_seeds(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let db = Self::from_reader(std::io::BufReader::new(file))?;
        tracing::info!(
            senses = db.num_senses(),
            mean_fillers_per_case = db.mean_fillers_per_case(),
            "loaded seeds from {}",
            path.display()
        );
        Ok(db)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        Self::from_reader(text.as_bytes())
    }

    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut db = Database::default();
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: SenseEntry = serde_json::from_str(&line).map_err(|e| Error::parse(lineno, e.to_string()))?;
            db.insert_sense(entry).map_err(|e| match e {
                Error::DuplicateSense { .. } => e,
                other => Error::parse(lineno, other.to_string()),
            })?;
        }
        if db.verbs.is_empty() {
            return Err(Error::EmptySeeds);
        }
        Ok(db)
    }

    pub fn from_entries(entries: impl IntoIterator<Item = SenseEntry>) -> Result<Self> {
        let mut db = Database::default();
        for entry in entries {
            db.insert_sense(entry)?;
        }
        if db.verbs.is_empty() {
            return Err(Error::EmptySeeds);
        }
        Ok(db)
    }

    /// Adds a seed sense. Every sense needs at least one case and every
    /// case at least one filler.
    pub fn insert_sense(&mut self, entry: SenseEntry) -> Result<()> {
        if entry.frame.is_empty() {
            return Err(Error::Config(format!(
                "sense `{}` of `{}` has an empty case frame",
                entry.sense_id, entry.verb
            )));
        }
        if let Some((case, _)) = entry.frame.iter().find(|(_, f)| f.is_empty()) {
            return Err(Error::Config(format!(
                "case `{case}` of sense `{}` has no example fillers",
                entry.sense_id
            )));
        }
        let senses = self.verbs.entry(entry.verb.clone()).or_default();
        if senses.iter().any(|s| s.sense_id == entry.sense_id) {
            return Err(Error::DuplicateSense {
                verb: entry.verb,
                sense: entry.sense_id,
            });
        }
        senses.push(entry);
        Ok(())
    }

    pub fn verbs(&self) -> impl Iterator<Item = &str> {
        self.verbs.keys().map(String::as_str)
    }

    pub fn senses(&self, verb: &str) -> Option<&[SenseEntry]> {
        self.verbs.get(verb).map(Vec::as_slice)
    }

    pub fn sense_index(&self, verb: &str, sense: &str) -> Option<usize> {
        self.senses(verb)?.iter().position(|s| s.sense_id == sense)
    }

    pub fn num_senses(&self) -> usize {
        self.verbs.values().map(Vec::len).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = &SenseEntry> {
        self.verbs.values().flatten()
    }

    /// Total number of stored fillers across all senses and cases.
    pub fn total_fillers(&self) -> usize {
        self.entries().flat_map(|e| e.frame.values()).map(FillerSet::len).sum()
    }

    /// Mean filler count over all (sense, case) slots.
    pub fn mean_fillers_per_case(&self) -> f64 {
        let slots: usize = self.entries().map(|e| e.frame.len()).sum();
        if slots == 0 {
            return 0.0;
        }
        self.total_fillers() as f64 / slots as f64
    }

    /// Stores the complements of `x` as example fillers of `sense`.
    /// Validates everything before touching the database, so a failed
    /// commit leaves it unchanged.
    pub fn commit_example(&mut self, x: &SentenceExample, sense: &str, policy: CommitPolicy) -> Result<()> {
        x.check_shape()?;
        let senses = self
            .verbs
            .get_mut(&x.verb)
            .ok_or_else(|| Error::UnknownVerb(x.verb.clone()))?;
        let entry = senses
            .iter_mut()
            .find(|s| s.sense_id == sense)
            .ok_or_else(|| Error::UnknownSense {
                verb: x.verb.clone(),
                sense: sense.to_owned(),
            })?;
        if policy == CommitPolicy::Reject {
            if let Some(case) = x.cases().find(|c| !entry.subcategorizes(c)) {
                return Err(Error::CaseNotInFrame {
                    verb: x.verb.clone(),
                    sense: sense.to_owned(),
                    case: case.to_owned(),
                });
            }
        }
        for c in &x.complements {
            entry.frame.entry(c.case().to_owned()).or_default().push(c.noun());
        }
        Ok(())
    }

    /// Whether committing `x` under `sense` would succeed.
    pub fn can_commit(&self, x: &SentenceExample, sense: &str, policy: CommitPolicy) -> bool {
        let Some(entry) = self
            .senses(&x.verb)
            .and_then(|s| s.iter().find(|e| e.sense_id == sense))
        else {
            return false;
        };
        policy == CommitPolicy::ExtendFrame || x.cases().all(|c| entry.subcategorizes(c))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in self.entries() {
            out.push_str(&serde_json::to_string(entry).expect("sense entry serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_jsonl()).map_err(|e| Error::io(path, e))
    }
}
