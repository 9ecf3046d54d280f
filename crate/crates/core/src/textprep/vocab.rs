use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{preprocess, Document};
use crate::{Error, Result};

pub const PAD_ID: usize = 0;
pub const OOV_ID: usize = 1;

const PAD_TOKEN: &str = "<pad>";
const OOV_TOKEN: &str = "<oov>";

/// Bijective token/id map. Ids 0 and 1 are reserved for padding and
/// out-of-vocabulary tokens; real tokens start at 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    token_to_id: HashMap<String, usize>,
    id_to_token: Vec<String>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self {
            token_to_id: HashMap::new(),
            id_to_token: vec![PAD_TOKEN.to_string(), OOV_TOKEN.to_string()],
        }
    }
}

impl Vocabulary {
    /// Builds a vocabulary from tokens in id order (first token gets id 2).
    /// Repeated tokens keep their first id.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::default();
        for t in tokens {
            vocab.insert(t.into());
        }
        vocab
    }

    fn insert(&mut self, token: String) {
        if !self.token_to_id.contains_key(&token) {
            self.token_to_id.insert(token.clone(), self.id_to_token.len());
            self.id_to_token.push(token);
        }
    }

    /// Total number of ids, including the two reserved ones.
    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    /// True when only the reserved ids are present.
    pub fn is_empty(&self) -> bool {
        self.id_to_token.len() == 2
    }

    pub fn id(&self, token: &str) -> usize {
        self.token_to_id.get(token).copied().unwrap_or(OOV_ID)
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        if id < 2 {
            return None;
        }
        self.id_to_token.get(id).map(String::as_str)
    }

    /// Real tokens in id order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.id_to_token[2..].iter().map(String::as_str)
    }
}

impl From<Vec<String>> for Vocabulary {
    fn from(tokens: Vec<String>) -> Self {
        Vocabulary::from_tokens(tokens)
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(vocab: Vocabulary) -> Self {
        vocab.id_to_token.into_iter().skip(2).collect()
    }
}

/// Collects every preprocessed token that occurs at least `min_count` times
/// across `docs`, in first-occurrence order.
pub fn build_vocab(docs: &[Document], min_count: usize) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::Data("cannot build a vocabulary from zero documents".into()));
    }
    if min_count == 0 {
        return Err(Error::Config("min_count must be positive".into()));
    }
    let mut order: Vec<String> = Vec::new();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for doc in docs {
        for tok in preprocess(&doc.text) {
            let n = counts.entry(tok.clone()).or_insert(0);
            if *n == 0 {
                order.push(tok);
            }
            *n += 1;
        }
    }
    Ok(Vocabulary::from_tokens(
        order.into_iter().filter(|t| counts[t] >= min_count),
    ))
}

/// Maps tokens to ids, truncating to the first `max_len` and right-padding
/// with [`PAD_ID`]. Unknown tokens become [`OOV_ID`].
pub fn encode_ids<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary, max_len: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = tokens
        .iter()
        .take(max_len)
        .map(|t| vocab.id(t.as_ref()))
        .collect();
    ids.resize(max_len, PAD_ID);
    ids
}
