//! Emotion-guided, domain-adaptive multi-task fake news classification.
//!
//! A shared LSTM feature extractor is trained jointly by three heads:
//! a veracity (fake/real) classifier, an emotion classifier, and a domain
//! discriminator that sits behind a gradient-reversal layer. The crate also
//! ships the verification harness used to check the model: finite-difference
//! gradient checks, a synthetic cross-domain corpus generator, and an
//! ablation runner that renders accuracy tables.
//!
//! Module map:
//! - [`textprep`]: normalization, vocabulary, lexicon emotion annotation, dataset IO.
//! - [`nn`]: tensors, parameter sets, forward/backward ops, gradient checking, checkpoints.
//! - [`model`]: the multi-task model and its composite loss.
//! - [`train`]: Adam, the mini-batch training loop, and the (alpha, beta) grid search.
//! - [`eval`]: accuracy, the variant matrix runner, and table emission.
//! - [`synthgen`]: seeded paired-domain corpus generator.

pub mod error;
pub mod eval;
pub mod model;
pub mod nn;
pub mod rng;
pub mod synthgen;
pub mod textprep;
pub mod train;

pub use error::{Error, Result};
pub use model::{Adaptation, Batch, LossBreakdown, LossWeights, MtlModel, Task, Variant};
pub use textprep::{Document, EmotionLexicon, EmotionTaxonomy, Split, Vocabulary};
