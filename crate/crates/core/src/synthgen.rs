//! Paired synthetic domains with a tunable vocabulary shift and a planted
//! link between emotion and veracity.
//!
//! A document is an unordered bag of three kinds of token:
//!
//! * topic tokens from its domain's pool. Pools hold `topic_pool` tokens,
//!   of which `round(vocab_overlap * topic_pool)` are shared between the
//!   domains. Shared tokens are label-neutral. Private tokens lean towards
//!   one label, and with probability `topic_signal` a document draws all of
//!   its topic tokens from its own label's private half (otherwise from the
//!   whole pool). This is a shortcut that works in-domain and not across.
//! * `markers_per_doc` cue words for the document's emotion, taken from the
//!   built-in lexicon, so the annotator recovers the planted emotion.
//! * function words that carry no signal.
//!
//! The emotion is drawn from the veracity's group with probability
//! `emotion_veracity_corr` and uniformly from the taxonomy otherwise.

use serde::{Deserialize, Serialize};

use crate::rng::SplitMix64;
use crate::textprep::{Document, EmotionLexicon, EmotionTaxonomy, Split};
use crate::{Error, Result};

pub const FAKE_EMOTIONS: &[&str] = &["anger", "fear", "disgust"];

const FUNCTION_WORDS: &[&str] = &[
    "the", "a", "an", "of", "to", "in", "on", "and", "or", "for", "with", "at", "by", "from",
    "as", "this", "that", "it", "was", "is",
];

const TRAIN_FRACTION: f64 = 0.70;
const VAL_FRACTION: f64 = 0.15;

/// Emotions that co-occur with real news when the correlation holds.
pub fn real_emotions(taxonomy: EmotionTaxonomy) -> &'static [&'static str] {
    match taxonomy {
        EmotionTaxonomy::Ekman => &["joy", "surprise"],
        EmotionTaxonomy::Plutchik => &["joy", "trust", "surprise"],
    }
}

/// The veracity a given emotion points to, if it belongs to either group.
pub fn emotion_group(taxonomy: EmotionTaxonomy, emotion: &str) -> Option<u8> {
    if FAKE_EMOTIONS.contains(&emotion) {
        Some(1)
    } else if real_emotions(taxonomy).contains(&emotion) {
        Some(0)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_per_domain: usize,
    pub vocab_overlap: f64,
    pub emotion_veracity_corr: f64,
    pub taxonomy: EmotionTaxonomy,
    /// Inclusive token-count range.
    pub doc_len: (usize, usize),
    pub seed: u64,
    pub topic_pool: usize,
    pub topic_signal: f64,
    /// Fraction of the non-marker tokens that are topic tokens.
    pub topic_share: f64,
    pub markers_per_doc: usize,
    pub source_domain: String,
    pub target_domain: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_per_domain: 2000,
            vocab_overlap: 0.3,
            emotion_veracity_corr: 0.9,
            taxonomy: EmotionTaxonomy::Ekman,
            doc_len: (12, 20),
            seed: 0,
            topic_pool: 40,
            topic_signal: 0.9,
            topic_share: 0.5,
            markers_per_doc: 1,
            source_domain: "synth-src".into(),
            target_domain: "synth-tgt".into(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        let unit = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        if self.n_per_domain < 20 {
            return fail(format!("n_per_domain must be >= 20, got {}", self.n_per_domain));
        }
        if !unit(self.vocab_overlap) || !unit(self.emotion_veracity_corr) || !unit(self.topic_signal)
            || !unit(self.topic_share)
        {
            return fail(
                "vocab_overlap, emotion_veracity_corr, topic_signal and topic_share must lie in [0, 1]"
                    .into(),
            );
        }
        let (lo, hi) = self.doc_len;
        if lo > hi || lo <= self.markers_per_doc {
            return fail(format!(
                "doc_len ({lo}, {hi}) must be ordered with room beyond {} markers",
                self.markers_per_doc
            ));
        }
        if self.topic_pool < 2 {
            return fail("topic_pool must be at least 2".into());
        }
        if self.source_domain == self.target_domain {
            return fail("source and target domain tags must differ".into());
        }
        Ok(())
    }

    fn shared_topics(&self) -> usize {
        (self.vocab_overlap * self.topic_pool as f64).round() as usize
    }

    /// The topic tokens of one domain. Shared tokens come first. For private
    /// tokens, index parity gives the label they lean towards (even = fake).
    pub fn topic_pool(&self, target: bool) -> Vec<String> {
        let shared = self.shared_topics();
        let private = if target { "tpt" } else { "tps" };
        (0..self.topic_pool)
            .map(|i| {
                if i < shared {
                    format!("tpc{i}")
                } else {
                    format!("{private}{i}")
                }
            })
            .collect()
    }
}

fn generate_domain(cfg: &SynthConfig, target: bool) -> Vec<Document> {
    let mut rng = SplitMix64::substream(cfg.seed, u64::from(target));
    let domain = if target { &cfg.target_domain } else { &cfg.source_domain };
    let pool = cfg.topic_pool(target);
    let shared = cfg.shared_topics();
    let halves: [Vec<&str>; 2] = [0, 1].map(|parity| {
        pool.iter()
            .enumerate()
            .filter(|(i, _)| *i >= shared && (i + 1) % 2 == parity)
            .map(|(_, t)| t.as_str())
            .collect()
    });
    let emotions = cfg.taxonomy.labels();
    let groups = [real_emotions(cfg.taxonomy), FAKE_EMOTIONS];

    let n = cfg.n_per_domain;
    let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < n / 2)).collect();
    rng.shuffle(&mut labels);
    let n_train = (n as f64 * TRAIN_FRACTION).round() as usize;
    let n_val = (n as f64 * VAL_FRACTION).round() as usize;

    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let emotion = if rng.bernoulli(cfg.emotion_veracity_corr) {
                *rng.choose(groups[label as usize])
            } else {
                *rng.choose(emotions)
            };
            let (lo, hi) = cfg.doc_len;
            let len = lo + rng.below(hi - lo + 1);
            let free = len - cfg.markers_per_doc;
            let n_topic = (free as f64 * cfg.topic_share).round() as usize;
            let markers = EmotionLexicon::builtin_markers(emotion);
            let mut words: Vec<&str> = Vec::with_capacity(len);
            for _ in 0..cfg.markers_per_doc {
                words.push(rng.choose(markers));
            }
            let on_topic = !halves[label as usize].is_empty() && rng.bernoulli(cfg.topic_signal);
            for _ in 0..n_topic {
                let token = if on_topic {
                    *rng.choose(&halves[label as usize])
                } else {
                    pool[rng.below(pool.len())].as_str()
                };
                words.push(token);
            }
            for _ in n_topic..free {
                words.push(rng.choose(FUNCTION_WORDS));
            }
            rng.shuffle(&mut words);
            let split = if i < n_train {
                Split::Train
            } else if i < n_train + n_val {
                Split::Val
            } else {
                Split::Test
            };
            Document::new(format!("{domain}-{i:05}"), words.join(" "), domain.as_str(), split)
                .with_veracity(label)
                .with_emotion(emotion)
        })
        .collect()
}

/// Generates `(source, target)` corpora. Each domain uses its own substream
/// of `cfg.seed`, so the two can be produced independently.
pub fn generate(cfg: &SynthConfig) -> Result<(Vec<Document>, Vec<Document>)> {
    cfg.validate()?;
    Ok((generate_domain(cfg, false), generate_domain(cfg, true)))
}

/// Plug-in mutual information, in bits, between the documents' emotion
/// labels and veracity labels. Documents missing either are skipped.
pub fn emotion_veracity_mi(docs: &[Document]) -> f64 {
    use std::collections::BTreeMap;
    let mut joint: BTreeMap<(&str, u8), f64> = BTreeMap::new();
    let mut emo: BTreeMap<&str, f64> = BTreeMap::new();
    let mut ver = [0.0f64; 2];
    let mut n = 0.0;
    for d in docs {
        if let (Some(e), Some(v)) = (d.emotion.as_deref(), d.veracity) {
            *joint.entry((e, v)).or_default() += 1.0;
            *emo.entry(e).or_default() += 1.0;
            ver[usize::from(v)] += 1.0;
            n += 1.0;
        }
    }
    joint
        .iter()
        .map(|(&(e, v), &c)| c / n * (c * n / (emo[e] * ver[usize::from(v)])).log2())
        .sum()
}
