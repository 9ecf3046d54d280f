//! Text preprocessing, vocabulary construction, lexicon-based emotion
//! annotation, and the JSON-lines dataset format.

mod dataset;
mod emotion;
mod lexicon_data;
mod preprocess;
mod vocab;

pub use dataset::{read_documents, write_documents, Document, Split};
pub use emotion::{read_lexicon_entries, EmotionLexicon, EmotionTaxonomy, LexiconEntry};
pub use preprocess::{is_punctuation, preprocess};
pub use vocab::{build_vocab, encode_ids, Vocabulary, OOV_ID, PAD_ID};
