//! Runs the six-variant matrix on one synthetic domain pair and prints the
//! mean-accuracy table.
//!
//!     cargo run --release -p emofnd --example ablation -- '{"seeds":[0,1]}'
//!
//! The optional JSON argument overrides fields of `Settings`.

use std::time::Instant;

use emofnd::eval::{emit_table, run_matrix_with, DatasetPair, MatrixConfig, Selection, TableFormat};
use emofnd::synthgen::{generate, SynthConfig};
use emofnd::train::TrainConfig;
use emofnd::Variant;
use serde::Deserialize;

#[derive(Deserialize)]
#[serde(default)]
struct Settings {
    synth: SynthConfig,
    train: TrainConfig,
    seeds: Vec<u64>,
    alpha: f64,
    beta: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            synth: SynthConfig::default(),
            train: TrainConfig {
                epochs: 30,
                batch_size: 32,
                lr: 5e-3,
                patience: 6,
                embed_dim: 16,
                hidden_dim: 16,
                max_len: 24,
                ..Default::default()
            },
            seeds: (0..5).collect(),
            alpha: 0.2,
            beta: 0.3,
        }
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s: Settings = match std::env::args().nth(1) {
        Some(json) => serde_json::from_str(&json)?,
        None => Settings::default(),
    };
    let start = Instant::now();
    let mut pairs = Vec::new();
    for &seed in &s.seeds {
        let (source_docs, target_docs) = generate(&SynthConfig { seed, ..s.synth.clone() })?;
        pairs.push(DatasetPair {
            source: format!("src{seed}"),
            target: format!("tgt{seed}"),
            source_docs,
            target_docs,
        });
    }
    // One synthetic corpus per seed; the training seed follows it.
    let mut means = vec![0.0; Variant::ALL.len()];
    for pair in &pairs {
        let seed: u64 = pair.source[3..].parse()?;
        let cfg = MatrixConfig {
            train: s.train.clone(),
            seeds: vec![seed],
            selection: Selection::Fixed { alpha: s.alpha, beta: s.beta },
            lexicon: None,
        };
        let report = run_matrix_with(std::slice::from_ref(pair), &Variant::ALL, &cfg, |c| {
            eprintln!(
                "{} seed {} acc {:.3} best epoch {} val {:.3} [{:.1}s]",
                c.row.variant,
                seed,
                c.row.accuracy,
                c.record.best_epoch,
                c.record.best_val_accuracy,
                start.elapsed().as_secs_f64()
            );
        })?;
        for r in report.means() {
            means[r.variant.column()] += r.accuracy / pairs.len() as f64;
        }
        print!("{}", emit_table(&report, TableFormat::Text)?);
    }
    for (v, m) in Variant::ALL.iter().zip(&means) {
        println!("{v:>14} {m:.4}");
    }
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
