//! Cross-domain evaluation: accuracy, the variant-by-seed matrix, and
//! report tables.

mod table;

use serde::{Deserialize, Serialize};

use crate::model::{LossWeights, MtlModel, Variant};
use crate::textprep::{Document, LexiconEntry, Split};
use crate::train::{grid_search, prepare, train, TrainConfig, TrainRecord};
use crate::{Error, Result};

pub use table::{emit_table, parse_tsv, TableFormat};

/// Fraction of `docs` classified correctly, where a predicted probability
/// `>= 0.5` means fake.
pub fn accuracy(model: &MtlModel, docs: &[Document]) -> Result<f64> {
    let (correct, n) = count_correct(model, docs)?;
    Ok(correct as f64 / n as f64)
}

fn count_correct(model: &MtlModel, docs: &[Document]) -> Result<(usize, usize)> {
    if docs.is_empty() {
        return Err(Error::Data("cannot evaluate on zero documents".into()));
    }
    let mut correct = 0;
    for doc in docs {
        let label = doc
            .veracity
            .ok_or_else(|| Error::Data(format!("evaluation document `{}` has no label", doc.id)))?;
        let p = model.predict_veracity(&model.encode_text(&doc.text))?;
        correct += usize::from(u8::from(p >= 0.5) == label);
    }
    Ok((correct, docs.len()))
}

/// One cell of a report. `seed` is `None` for the mean over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub source: String,
    pub target: String,
    pub variant: Variant,
    pub accuracy: f64,
    pub n_eval: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
}

impl EvalReport {
    /// Mean rows only, in report order.
    pub fn means(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.seed.is_none())
    }

    pub fn mean_of(&self, source: &str, target: &str, variant: Variant) -> Option<f64> {
        self.means()
            .find(|r| r.source == source && r.target == target && r.variant == variant)
            .map(|r| r.accuracy)
    }
}

/// A source corpus and a target corpus with their display names.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPair {
    pub source: String,
    pub target: String,
    pub source_docs: Vec<Document>,
    pub target_docs: Vec<Document>,
}

/// How the loss weights of each cell are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Grid search on source validation accuracy.
    Grid,
    /// The same pair for every cell; each variant drops the terms it lacks.
    Fixed { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixConfig {
    pub train: TrainConfig,
    pub seeds: Vec<u64>,
    pub selection: Selection,
    pub lexicon: Option<Vec<LexiconEntry>>,
}

/// A finished cell, handed to the progress callback.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub row: ReportRow,
    pub record: TrainRecord,
}

pub fn run_matrix(pairs: &[DatasetPair], variants: &[Variant], cfg: &MatrixConfig) -> Result<EvalReport> {
    run_matrix_with(pairs, variants, cfg, |_| {})
}

/// Trains every (pair, variant, seed) cell and evaluates it on the target
/// test split. Rows come out grouped by pair, then seed (means last), then
/// variant, which is the order tables are laid out in.
pub fn run_matrix_with<F>(
    pairs: &[DatasetPair],
    variants: &[Variant],
    cfg: &MatrixConfig,
    mut progress: F,
) -> Result<EvalReport>
where
    F: FnMut(&CellResult),
{
    if pairs.is_empty() || variants.is_empty() || cfg.seeds.is_empty() {
        return Err(Error::Config("matrix needs at least one pair, variant and seed".into()));
    }
    cfg.train.validate()?;
    let mut rows = Vec::new();
    for pair in pairs {
        let test: Vec<Document> = pair
            .target_docs
            .iter()
            .filter(|d| d.split == Split::Test)
            .cloned()
            .collect();
        if test.is_empty() {
            return Err(Error::Data(format!("target `{}` has no test split", pair.target)));
        }
        // cells[v][s]
        let mut cells: Vec<Vec<ReportRow>> = Vec::new();
        for &variant in variants {
            let data = prepare(
                variant,
                &pair.source_docs,
                &pair.target_docs,
                &cfg.train,
                cfg.lexicon.as_deref(),
            )?;
            let mut per_seed = Vec::new();
            for &seed in &cfg.seeds {
                let tc = TrainConfig { seed, ..cfg.train.clone() };
                let outcome = match cfg.selection {
                    Selection::Grid => grid_search(&data, &tc)?.best,
                    Selection::Fixed { alpha, beta } => {
                        train(&data, LossWeights::new(alpha, beta, tc.lambda)?, &tc)?
                    }
                };
                let (correct, n) = count_correct(&outcome.model, &test)?;
                let row = ReportRow {
                    source: pair.source.clone(),
                    target: pair.target.clone(),
                    variant,
                    accuracy: correct as f64 / n as f64,
                    n_eval: n,
                    seed: Some(seed),
                };
                progress(&CellResult {
                    row: row.clone(),
                    record: outcome.record,
                });
                per_seed.push(row);
            }
            cells.push(per_seed);
        }
        for s in 0..cfg.seeds.len() {
            rows.extend(cells.iter().map(|c| c[s].clone()));
        }
        for c in &cells {
            let mean = c.iter().map(|r| r.accuracy).sum::<f64>() / c.len() as f64;
            rows.push(ReportRow {
                seed: None,
                accuracy: mean,
                ..c[0].clone()
            });
        }
    }
    Ok(EvalReport { rows })
}

#[cfg(test)]
mod tests;
