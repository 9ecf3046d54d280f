use serde::{Deserialize, Serialize};

use crate::model::{LossWeights, Variant};
use crate::Result;

use super::{train, Prepared, TrainConfig, TrainOutcome};

/// The weights a variant actually trains with: non-adaptive variants have no
/// adversarial term and single-task variants no emotion term.
pub fn effective_pair(variant: Variant, alpha: f64, beta: f64) -> (f64, f64) {
    (
        if variant.is_da() { alpha } else { 0.0 },
        if variant.is_mtl() { beta } else { 0.0 },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub alpha: f64,
    pub beta: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub alpha: f64,
    pub beta: f64,
    pub best: TrainOutcome,
    /// Every trained cell in ascending `(alpha, beta)` order.
    pub cells: Vec<GridCell>,
}

/// Trains one model per distinct effective `(alpha, beta)` pair and keeps the
/// one with the highest source validation accuracy. Ties go to the smaller
/// alpha, then the smaller beta. Grid pairs that a variant collapses onto the
/// same effective weights are trained once, represented by the smallest pair.
pub fn grid_search(data: &Prepared, cfg: &TrainConfig) -> Result<GridOutcome> {
    cfg.validate()?;
    let mut pairs = cfg.grid_pairs();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut seen: Vec<(f64, f64)> = Vec::new();
    let mut cells = Vec::new();
    let mut best: Option<(f64, f64, TrainOutcome)> = None;
    for (alpha, beta) in pairs {
        let eff = effective_pair(data.variant, alpha, beta);
        if seen.contains(&eff) {
            continue;
        }
        seen.push(eff);
        let outcome = train(data, LossWeights::new(alpha, beta, cfg.lambda)?, cfg)?;
        let acc = outcome.record.best_val_accuracy;
        cells.push(GridCell {
            alpha,
            beta,
            val_accuracy: acc,
        });
        // Candidates arrive in tie-break order, so only a strict gain wins.
        if best.as_ref().is_none_or(|b| acc > b.2.record.best_val_accuracy) {
            best = Some((alpha, beta, outcome));
        }
    }
    let (alpha, beta, best) = best.expect("validated grid has at least one pair");
    Ok(GridOutcome {
        alpha,
        beta,
        best,
        cells,
    })
}
