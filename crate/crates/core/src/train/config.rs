use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::ModelDims;
use crate::{Error, Result};

/// Global gradient-norm cap applied before every optimizer step.
pub const CLIP_NORM: f64 = 5.0;

pub const DEFAULT_GRID: [f64; 5] = [0.0, 0.1, 0.2, 0.3, 0.4];

/// Training hyperparameters. Every field has a default, so a config file
/// may set any subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    pub patience: usize,
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub lambda: f64,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub max_len: usize,
    pub min_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let dims = ModelDims::default();
        Self {
            epochs: 30,
            batch_size: 32,
            lr: 1e-3,
            seed: 0,
            patience: 5,
            alpha_grid: DEFAULT_GRID.to_vec(),
            beta_grid: DEFAULT_GRID.to_vec(),
            lambda: 1.0,
            embed_dim: dims.embed_dim,
            hidden_dim: dims.hidden_dim,
            max_len: dims.max_len,
            min_count: 1,
        }
    }
}

impl TrainConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: TrainConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            line: source.line(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dims(&self) -> ModelDims {
        ModelDims {
            embed_dim: self.embed_dim,
            hidden_dim: self.hidden_dim,
            max_len: self.max_len,
        }
    }

    /// `(alpha, beta)` pairs of the grid with `alpha + beta < 1`, in grid order.
    pub fn grid_pairs(&self) -> Vec<(f64, f64)> {
        let mut pairs = Vec::new();
        for &a in &self.alpha_grid {
            for &b in &self.beta_grid {
                if a + b < 1.0 {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.epochs == 0 || self.batch_size == 0 || self.patience == 0 || self.min_count == 0 {
            return fail("epochs, batch_size, patience and min_count must be positive".into());
        }
        if self.embed_dim == 0 || self.hidden_dim == 0 || self.max_len == 0 {
            return fail("embed_dim, hidden_dim and max_len must be positive".into());
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return fail(format!("lr must be positive, got {}", self.lr));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return fail(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if self.alpha_grid.is_empty() || self.beta_grid.is_empty() {
            return fail("alpha_grid and beta_grid must be nonempty".into());
        }
        let in_range = |x: &f64| x.is_finite() && (0.0..1.0).contains(x);
        if !self.alpha_grid.iter().chain(&self.beta_grid).all(in_range) {
            return fail("grid values must lie in [0, 1)".into());
        }
        if self.grid_pairs().is_empty() {
            return fail("no (alpha, beta) pair in the grid satisfies alpha + beta < 1".into());
        }
        Ok(())
    }
}
