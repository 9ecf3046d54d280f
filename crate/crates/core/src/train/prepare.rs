use crate::model::{Encoded, SourceSample, TargetSample, Variant};
use crate::textprep::{
    build_vocab, preprocess, Document, EmotionLexicon, LexiconEntry, Split, Vocabulary,
};
use crate::{Error, Result};

use super::TrainConfig;

/// Encoded, labelled data ready for the training loop.
///
/// Target documents keep only their text: veracity is dropped here and the
/// emotion label always comes from the lexicon annotator.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub variant: Variant,
    pub vocab: Vocabulary,
    pub source_train: Vec<SourceSample>,
    pub source_val: Vec<SourceSample>,
    pub target_train: Vec<TargetSample>,
}

fn split_of(docs: &[Document], split: Split) -> Vec<&Document> {
    docs.iter().filter(|d| d.split == split).collect()
}

/// Builds the vocabulary on the source train split and encodes every sample
/// the variant needs. `lexicon` overrides the built-in seed lexicon; entries
/// outside the variant's taxonomy are skipped.
pub fn prepare(
    variant: Variant,
    source: &[Document],
    target: &[Document],
    cfg: &TrainConfig,
    lexicon: Option<&[LexiconEntry]>,
) -> Result<Prepared> {
    cfg.validate()?;
    let train: Vec<Document> = split_of(source, Split::Train).into_iter().cloned().collect();
    let val = split_of(source, Split::Val);
    if train.is_empty() || val.is_empty() {
        return Err(Error::Data(format!(
            "source needs nonempty train and val splits (got {} train, {} val)",
            train.len(),
            val.len()
        )));
    }
    let vocab = build_vocab(&train, cfg.min_count)?;

    let annotator = match (variant.taxonomy(), lexicon) {
        (None, _) => None,
        (Some(tax), None) => Some(EmotionLexicon::builtin(tax)),
        (Some(tax), Some(entries)) => {
            let kept = entries.iter().filter(|e| tax.index_of(&e.emotion).is_some()).cloned();
            Some(EmotionLexicon::from_entries(kept, tax)?)
        }
    };
    let tax = variant.taxonomy();

    let encode = |doc: &Document| {
        let tokens = preprocess(&doc.text);
        (Encoded::from_tokens(&tokens, &vocab, cfg.max_len), tokens)
    };
    let weak_label = |tokens: &[String], doc: &Document| -> Result<usize> {
        let lex = annotator.as_ref().expect("annotator exists for MTL");
        if lex.is_empty() {
            return Err(Error::Data(format!(
                "document `{}` has no emotion label and the lexicon has no {} entries",
                doc.id,
                lex.taxonomy()
            )));
        }
        Ok(lex.annotate(tokens))
    };

    let source_sample = |doc: &Document, with_emotion: bool| -> Result<SourceSample> {
        let veracity = doc
            .veracity
            .ok_or_else(|| Error::Data(format!("source document `{}` has no label", doc.id)))?;
        let (input, tokens) = encode(doc);
        let emotion = match tax {
            Some(t) if with_emotion => Some(match doc.emotion_id(t) {
                Some(e) => e,
                None => weak_label(&tokens, doc)?,
            }),
            _ => None,
        };
        Ok(SourceSample {
            input,
            veracity,
            emotion,
        })
    };

    let source_train = train
        .iter()
        .map(|d| source_sample(d, true))
        .collect::<Result<Vec<_>>>()?;
    let source_val = val
        .into_iter()
        .map(|d| source_sample(d, false))
        .collect::<Result<Vec<_>>>()?;

    let target_train = if variant.is_da() {
        let docs = split_of(target, Split::Train);
        if docs.is_empty() {
            return Err(Error::Data(
                "domain-adaptive training needs a nonempty target train split".into(),
            ));
        }
        docs.into_iter()
            .map(|d| {
                let (input, tokens) = encode(d);
                let emotion = match tax {
                    Some(_) => Some(weak_label(&tokens, d)?),
                    None => None,
                };
                Ok(TargetSample { input, emotion })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    Ok(Prepared {
        variant,
        vocab,
        source_train,
        source_val,
        target_train,
    })
}
