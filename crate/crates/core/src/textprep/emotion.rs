use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::lexicon_data::SEED;
use crate::{Error, Result};

const EKMAN: &[&str] = &["joy", "surprise", "anger", "sadness", "disgust", "fear"];
const PLUTCHIK: &[&str] = &[
    "joy",
    "surprise",
    "trust",
    "anger",
    "anticipation",
    "sadness",
    "disgust",
    "fear",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionTaxonomy {
    /// Joy, surprise, anger, sadness, disgust, fear.
    Ekman,
    /// Ekman's six plus trust and anticipation.
    Plutchik,
}

impl EmotionTaxonomy {
    pub fn name(self) -> &'static str {
        match self {
            EmotionTaxonomy::Ekman => "ekman",
            EmotionTaxonomy::Plutchik => "plutchik",
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            EmotionTaxonomy::Ekman => EKMAN,
            EmotionTaxonomy::Plutchik => PLUTCHIK,
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        self.labels().len()
    }

    pub fn index_of(self, emotion: &str) -> Option<usize> {
        self.labels().iter().position(|l| *l == emotion)
    }

    pub fn label(self, index: usize) -> Option<&'static str> {
        self.labels().get(index).copied()
    }
}

impl fmt::Display for EmotionTaxonomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmotionTaxonomy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ekman" | "e" => Ok(EmotionTaxonomy::Ekman),
            "plutchik" | "p" => Ok(EmotionTaxonomy::Plutchik),
            other => Err(Error::Config(format!("unknown emotion taxonomy `{other}`"))),
        }
    }
}

/// One line of a lexicon file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub token: String,
    pub emotion: String,
    pub weight: f64,
}

/// Parses a JSON-lines lexicon file without checking it against a taxonomy.
pub fn read_lexicon_entries(path: &Path) -> Result<Vec<LexiconEntry>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: LexiconEntry = serde_json::from_str(&line).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        entries.push(entry);
    }
    Ok(entries)
}

/// Token to (emotion, weight) associations under a fixed taxonomy.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionLexicon {
    taxonomy: EmotionTaxonomy,
    entries: HashMap<String, Vec<(usize, f64)>>,
}

impl EmotionLexicon {
    /// Every entry must name an emotion of `taxonomy` and carry a finite,
    /// non-negative weight. Tokens are lowercased to match preprocessed text.
    pub fn from_entries<I>(entries: I, taxonomy: EmotionTaxonomy) -> Result<Self>
    where
        I: IntoIterator<Item = LexiconEntry>,
    {
        let mut map: HashMap<String, Vec<(usize, f64)>> = HashMap::new();
        for e in entries {
            let label = taxonomy.index_of(&e.emotion).ok_or_else(|| {
                Error::Data(format!(
                    "lexicon emotion `{}` is not in the {} taxonomy",
                    e.emotion, taxonomy
                ))
            })?;
            if !(e.weight.is_finite() && e.weight >= 0.0) {
                return Err(Error::Data(format!(
                    "lexicon weight for `{}` must be finite and non-negative, got {}",
                    e.token, e.weight
                )));
            }
            map.entry(e.token.to_lowercase())
                .or_default()
                .push((label, e.weight));
        }
        Ok(Self {
            taxonomy,
            entries: map,
        })
    }

    /// The built-in seed lexicon, restricted to the emotions of `taxonomy`.
    pub fn builtin(taxonomy: EmotionTaxonomy) -> Self {
        Self::from_entries(Self::builtin_entries(Some(taxonomy)), taxonomy)
            .expect("seed lexicon is valid")
    }

    /// Seed entries, optionally filtered to one taxonomy.
    pub fn builtin_entries(taxonomy: Option<EmotionTaxonomy>) -> Vec<LexiconEntry> {
        SEED.iter()
            .filter(|(emotion, _)| taxonomy.is_none_or(|t| t.index_of(emotion).is_some()))
            .flat_map(|(emotion, words)| {
                words.iter().map(move |w| LexiconEntry {
                    token: (*w).to_string(),
                    emotion: (*emotion).to_string(),
                    weight: 1.0,
                })
            })
            .collect()
    }

    /// Seed words whose only association is `emotion`.
    pub fn builtin_markers(emotion: &str) -> &'static [&'static str] {
        SEED.iter()
            .find(|(e, _)| *e == emotion)
            .map(|(_, words)| *words)
            .unwrap_or(&[])
    }

    /// Reads a JSON-lines lexicon (`token`, `emotion`, `weight` per line).
    /// Entries whose emotion is outside `taxonomy` are rejected.
    pub fn read_jsonl(path: &Path, taxonomy: EmotionTaxonomy) -> Result<Self> {
        Self::from_entries(read_lexicon_entries(path)?, taxonomy)
    }

    pub fn taxonomy(&self) -> EmotionTaxonomy {
        self.taxonomy
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Summed weight per label over all tokens.
    pub fn scores<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<f64> {
        let mut scores = vec![0.0; self.taxonomy.len()];
        for tok in tokens {
            if let Some(assoc) = self.entries.get(tok.as_ref()) {
                for &(label, w) in assoc {
                    scores[label] += w;
                }
            }
        }
        scores
    }

    /// Argmax of the summed weights. Ties go to the lowest label index, so a
    /// text with no lexicon hits is labelled with index 0.
    pub fn annotate<S: AsRef<str>>(&self, tokens: &[S]) -> usize {
        let scores = self.scores(tokens);
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = i;
            }
        }
        best
    }
}
