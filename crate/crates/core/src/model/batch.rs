use serde::{Deserialize, Serialize};

use crate::textprep::{encode_ids, preprocess, Vocabulary};
use crate::{Error, Result};

/// Token ids padded to a fixed length, plus the mask of real positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub ids: Vec<usize>,
    pub mask: Vec<bool>,
}

impl Encoded {
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary, max_len: usize) -> Self {
        let ids = encode_ids(tokens, vocab, max_len);
        let real = tokens.len().min(max_len);
        let mask = (0..max_len).map(|t| t < real).collect();
        Self { ids, mask }
    }

    pub fn from_text(text: &str, vocab: &Vocabulary, max_len: usize) -> Self {
        Self::from_tokens(&preprocess(text), vocab, max_len)
    }
}

/// A labelled source-domain sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSample {
    pub input: Encoded,
    /// 1 = fake, 0 = real.
    pub veracity: u8,
    pub emotion: Option<usize>,
}

/// A target-domain sample. There is deliberately no veracity field.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSample {
    pub input: Encoded,
    pub emotion: Option<usize>,
}

/// One training step's worth of data. Domain labels are implicit: source
/// samples are domain 1 and target samples domain 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Batch {
    pub source: Vec<SourceSample>,
    pub target: Vec<TargetSample>,
}

/// `alpha` weights the adversarial loss, `beta` the emotion loss, and the
/// veracity loss gets `1 - alpha - beta`. `lambda` is the gradient-reversal
/// strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl LossWeights {
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        let w = Self { alpha, beta, lambda };
        w.validate()?;
        Ok(w)
    }

    /// Pure veracity training.
    pub fn fnd_only() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            lambda: 0.0,
        }
    }

    /// `(1 - alpha - beta) fnd + alpha adv + beta emo`.
    pub fn combine(&self, fnd: f64, adv: f64, emo: f64) -> f64 {
        (1.0 - self.alpha - self.beta) * fnd + self.alpha * adv + self.beta * emo
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !(ok(self.alpha) && ok(self.beta) && ok(self.lambda)) {
            return Err(Error::Config(format!(
                "loss weights must be finite and non-negative: {self:?}"
            )));
        }
        if self.alpha + self.beta >= 1.0 {
            return Err(Error::Config(format!(
                "alpha + beta must be < 1, got {} + {}",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }
}
