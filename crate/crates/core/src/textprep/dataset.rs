use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EmotionTaxonomy;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        })
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(Error::Config(format!("unknown split `{other}`"))),
        }
    }
}

/// One text sample. On disk this is a JSON object with keys `id`, `text`,
/// optional `label` (1 = fake, 0 = real), optional `emotion` (a label name),
/// `domain` and `split`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(rename = "label", default, skip_serializing_if = "Option::is_none")]
    pub veracity: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotion: Option<String>,
    pub domain: String,
    pub split: Split,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, domain: impl Into<String>, split: Split) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            veracity: None,
            emotion: None,
            domain: domain.into(),
            split,
        }
    }

    pub fn with_veracity(mut self, label: u8) -> Self {
        self.veracity = Some(label);
        self
    }

    pub fn with_emotion(mut self, emotion: impl Into<String>) -> Self {
        self.emotion = Some(emotion.into());
        self
    }

    /// Index of the stored emotion under `taxonomy`, if it names one of its
    /// labels.
    pub fn emotion_id(&self, taxonomy: EmotionTaxonomy) -> Option<usize> {
        self.emotion.as_deref().and_then(|e| taxonomy.index_of(e))
    }

    fn validate(&self) -> Result<()> {
        match self.veracity {
            None | Some(0) | Some(1) => Ok(()),
            Some(v) => Err(Error::Data(format!(
                "document `{}`: label must be 0 or 1, got {v}",
                self.id
            ))),
        }
    }
}

/// Reads a JSON-lines dataset. Blank lines are skipped.
pub fn read_documents(path: &Path) -> Result<Vec<Document>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        doc.validate()?;
        docs.push(doc);
    }
    Ok(docs)
}

pub fn write_documents<W: Write>(mut out: W, docs: &[Document]) -> Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut out, doc).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
