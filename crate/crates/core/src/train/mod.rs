//! Mini-batch training with Adam, seeded shuffling, early stopping on source
//! validation accuracy, and the `(alpha, beta)` grid search.

mod adam;
mod config;
mod grid;
mod prepare;

use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::model::{Batch, LossWeights, MtlModel, SourceSample, Variant};
use crate::rng::SplitMix64;
use crate::{Error, Result};

pub use adam::{clip_grad_norm, Adam, BETA1, BETA2, EPSILON};
pub use config::{TrainConfig, CLIP_NORM, DEFAULT_GRID};
pub use grid::{effective_pair, grid_search, GridCell, GridOutcome};
pub use prepare::{prepare, Prepared};

const SHUFFLE_STREAM: u64 = 1;
const TARGET_STREAM: u64 = 2;

/// Losses averaged over the batches of one epoch, plus source validation
/// accuracy after the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub l_total: f64,
    pub l_fnd: f64,
    pub l_emo: f64,
    pub l_adv: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub variant: Variant,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub seed: u64,
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
}

#[derive(Serialize)]
struct JsonlLine<'a> {
    variant: Variant,
    alpha: f64,
    beta: f64,
    lambda: f64,
    seed: u64,
    #[serde(flatten)]
    epoch: &'a EpochRecord,
    best: bool,
}

impl TrainRecord {
    /// One JSON object per epoch.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.epochs {
            let line = JsonlLine {
                variant: self.variant,
                alpha: self.alpha,
                beta: self.beta,
                lambda: self.lambda,
                seed: self.seed,
                epoch: e,
                best: e.epoch == self.best_epoch,
            };
            serde_json::to_writer(&mut out, &line).map_err(|e| Error::Format(e.to_string()))?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the best validation epoch.
    pub model: MtlModel,
    pub record: TrainRecord,
    /// Kept out of the record so records stay bitwise reproducible.
    pub elapsed: Duration,
}

/// Fraction of samples whose predicted class matches the label, with
/// probability `>= 0.5` meaning fake.
pub fn sample_accuracy(model: &MtlModel, samples: &[SourceSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Data("accuracy over zero samples".into()));
    }
    let mut correct = 0usize;
    for s in samples {
        let pred = u8::from(model.predict_veracity(&s.input)? >= 0.5);
        correct += usize::from(pred == s.veracity);
    }
    Ok(correct as f64 / samples.len() as f64)
}

/// Endless reshuffled walk over `0..n`.
struct Cycle {
    order: Vec<usize>,
    pos: usize,
    rng: SplitMix64,
}

impl Cycle {
    fn new(n: usize, rng: SplitMix64) -> Self {
        Self {
            order: (0..n).collect(),
            pos: n,
            rng,
        }
    }

    fn next(&mut self) -> usize {
        if self.pos == self.order.len() {
            self.rng.shuffle(&mut self.order);
            self.pos = 0;
        }
        self.pos += 1;
        self.order[self.pos - 1]
    }
}

/// Trains a freshly initialized model. The init seed, the epoch shuffle and
/// the target sampling are all derived from `cfg.seed`.
pub fn train(data: &Prepared, weights: LossWeights, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let model = MtlModel::new(data.variant, data.vocab.clone(), cfg.dims(), cfg.seed)?;
    train_model(model, data, weights, cfg)
}

/// Trains `model` in place from its current parameters.
pub fn train_model(
    mut model: MtlModel,
    data: &Prepared,
    weights: LossWeights,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let start = Instant::now();
    cfg.validate()?;
    weights.validate()?;
    if model.variant() != data.variant {
        return Err(Error::VariantMismatch {
            variant: model.variant().to_string(),
            reason: format!("data was prepared for {}", data.variant),
        });
    }
    if data.source_train.is_empty() || data.source_val.is_empty() {
        return Err(Error::Data("empty source train or val split".into()));
    }
    let use_target = data.variant.is_da() && !data.target_train.is_empty();

    let mut shuffle = SplitMix64::substream(cfg.seed, SHUFFLE_STREAM);
    let mut targets = Cycle::new(
        data.target_train.len(),
        SplitMix64::substream(cfg.seed, TARGET_STREAM),
    );
    let mut adam = Adam::new(&model.params);
    let mut order: Vec<usize> = (0..data.source_train.len()).collect();

    let mut best_params = model.params.clone();
    let mut best_epoch = 0;
    let mut best_acc = f64::NEG_INFINITY;
    let mut stale = 0;
    let mut epochs = Vec::new();

    for epoch in 1..=cfg.epochs {
        shuffle.shuffle(&mut order);
        let mut sums = [0.0f64; 4];
        let mut batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let batch = Batch {
                source: chunk.iter().map(|&i| data.source_train[i].clone()).collect(),
                target: if use_target {
                    (0..cfg.batch_size)
                        .map(|_| data.target_train[targets.next()].clone())
                        .collect()
                } else {
                    Vec::new()
                },
            };
            model.params.zero_grads();
            let loss = model.backward(&batch, &weights)?;
            if !loss.total.is_finite() {
                return Err(Error::Data(format!("non-finite loss at epoch {epoch}")));
            }
            clip_grad_norm(&mut model.params, CLIP_NORM);
            adam.step(&mut model.params, cfg.lr)?;
            for (s, v) in sums.iter_mut().zip([loss.total, loss.fnd, loss.emo, loss.adv]) {
                *s += v;
            }
            batches += 1;
        }
        let n = batches as f64;
        let val_accuracy = sample_accuracy(&model, &data.source_val)?;
        epochs.push(EpochRecord {
            epoch,
            l_total: sums[0] / n,
            l_fnd: sums[1] / n,
            l_emo: sums[2] / n,
            l_adv: sums[3] / n,
            val_accuracy,
        });
        if val_accuracy > best_acc {
            best_acc = val_accuracy;
            best_epoch = epoch;
            best_params.copy_values_from(&model.params)?;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    model.params.copy_values_from(&best_params)?;
    model.params.zero_grads();

    Ok(TrainOutcome {
        model,
        record: TrainRecord {
            variant: data.variant,
            alpha: weights.alpha,
            beta: weights.beta,
            lambda: weights.lambda,
            seed: cfg.seed,
            epochs,
            best_epoch,
            best_val_accuracy: best_acc,
        },
        elapsed: start.elapsed(),
    })
}
