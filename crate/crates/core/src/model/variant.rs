use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::textprep::EmotionTaxonomy;
use crate::{Error, Result};

/// Which heads train the shared extractor besides veracity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Task {
    /// Veracity only.
    Stl,
    /// Veracity plus Ekman emotions.
    MtlEkman,
    /// Veracity plus Plutchik emotions.
    MtlPlutchik,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Adaptation {
    NonDa,
    /// Adds the domain discriminator behind gradient reversal.
    Da,
}

/// One of the six ablation cells, e.g. `DA-MTL(P)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Variant {
    pub adaptation: Adaptation,
    pub task: Task,
}

impl Variant {
    pub const fn new(adaptation: Adaptation, task: Task) -> Self {
        Self { adaptation, task }
    }

    /// All variants in report-column order.
    pub const ALL: [Variant; 6] = [
        Variant::new(Adaptation::NonDa, Task::Stl),
        Variant::new(Adaptation::NonDa, Task::MtlEkman),
        Variant::new(Adaptation::NonDa, Task::MtlPlutchik),
        Variant::new(Adaptation::Da, Task::Stl),
        Variant::new(Adaptation::Da, Task::MtlEkman),
        Variant::new(Adaptation::Da, Task::MtlPlutchik),
    ];

    pub fn is_mtl(self) -> bool {
        self.task != Task::Stl
    }

    pub fn is_da(self) -> bool {
        self.adaptation == Adaptation::Da
    }

    pub fn taxonomy(self) -> Option<EmotionTaxonomy> {
        match self.task {
            Task::Stl => None,
            Task::MtlEkman => Some(EmotionTaxonomy::Ekman),
            Task::MtlPlutchik => Some(EmotionTaxonomy::Plutchik),
        }
    }

    /// Position in [`Variant::ALL`].
    pub fn column(self) -> usize {
        Variant::ALL.iter().position(|v| *v == self).expect("every variant is listed")
    }

    pub fn name(self) -> &'static str {
        match (self.adaptation, self.task) {
            (Adaptation::NonDa, Task::Stl) => "NonDA-STL",
            (Adaptation::NonDa, Task::MtlEkman) => "NonDA-MTL(E)",
            (Adaptation::NonDa, Task::MtlPlutchik) => "NonDA-MTL(P)",
            (Adaptation::Da, Task::Stl) => "DA-STL",
            (Adaptation::Da, Task::MtlEkman) => "DA-MTL(E)",
            (Adaptation::Da, Task::MtlPlutchik) => "DA-MTL(P)",
        }
    }

    /// Parses a comma-separated list, or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Variant>> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Variant::ALL.to_vec());
        }
        let mut out: Vec<Variant> = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let v: Variant = part.parse()?;
            if !out.contains(&v) {
                out.push(v);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("empty variant list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Accepts the display names (`DA-MTL(P)`) and a shell-friendly form
    /// (`da-mtl-p`, `nonda-stl`), case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        let (adaptation, rest) = if let Some(rest) = key.strip_prefix("nonda") {
            (Adaptation::NonDa, rest)
        } else if let Some(rest) = key.strip_prefix("da") {
            (Adaptation::Da, rest)
        } else {
            return Err(Error::Config(format!("unknown variant `{s}`")));
        };
        let task = match rest {
            "stl" => Task::Stl,
            "mtle" => Task::MtlEkman,
            "mtlp" => Task::MtlPlutchik,
            _ => return Err(Error::Config(format!("unknown variant `{s}`"))),
        };
        Ok(Variant::new(adaptation, task))
    }
}

impl TryFrom<String> for Variant {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Variant> for String {
    fn from(v: Variant) -> Self {
        v.name().to_string()
    }
}
