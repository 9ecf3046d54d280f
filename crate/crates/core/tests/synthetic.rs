//! Statistical properties measured on generated corpora. Slower than the
//! unit tests: each one trains a few dozen small models.

use emofnd::eval::{accuracy, run_matrix, DatasetPair, MatrixConfig, Selection};
use emofnd::model::{Adaptation, Task, Variant};
use emofnd::synthgen::{generate, SynthConfig};
use emofnd::train::{grid_search, prepare, TrainConfig};
use emofnd::Split;

fn small_train() -> TrainConfig {
    TrainConfig {
        epochs: 20,
        batch_size: 32,
        lr: 5e-3,
        patience: 4,
        embed_dim: 12,
        hidden_dim: 12,
        max_len: 24,
        ..Default::default()
    }
}

#[test]
fn grid_search_selects_emotion_weight() {
    let variant = Variant::new(Adaptation::NonDa, Task::MtlEkman);
    let mut positive = 0;
    let mut picks = Vec::new();
    for seed in 0..5 {
        let (s, t) = generate(&SynthConfig { seed, ..Default::default() }).unwrap();
        let cfg = TrainConfig { seed, epochs: 30, patience: 6, embed_dim: 16, hidden_dim: 16, ..small_train() };
        let data = prepare(variant, &s, &t, &cfg, None).unwrap();
        let g = grid_search(&data, &cfg).unwrap();
        // Non-adaptive: alpha collapses, so one cell per beta.
        assert_eq!(g.cells.len(), 5);
        assert_eq!(g.alpha, 0.0);
        picks.push(g.beta);
        positive += usize::from(g.beta > 0.0);
        let test: Vec<_> = s.into_iter().filter(|d| d.split == Split::Test).collect();
        assert!(accuracy(&g.best.model, &test).unwrap() > 0.9);
    }
    assert!(positive >= 4, "selected betas {picks:?}");
}

#[test]
fn wider_shift_does_not_help_the_baseline() {
    let overlaps = [0.0, 0.5, 1.0];
    let mut means = Vec::new();
    for &overlap in &overlaps {
        let pairs: Vec<DatasetPair> = (0..5)
            .map(|seed| {
                let (source_docs, target_docs) = generate(&SynthConfig {
                    n_per_domain: 1000,
                    vocab_overlap: overlap,
                    seed,
                    ..Default::default()
                })
                .unwrap();
                DatasetPair { source: format!("s{seed}"), target: format!("t{seed}"), source_docs, target_docs }
            })
            .collect();
        let cfg = MatrixConfig {
            train: small_train(),
            seeds: vec![0],
            selection: Selection::Fixed { alpha: 0.0, beta: 0.0 },
            lexicon: None,
        };
        let report = run_matrix(&pairs, &Variant::ALL[..1], &cfg).unwrap();
        let accs: Vec<f64> = report.means().map(|r| r.accuracy).collect();
        assert_eq!(accs.len(), 5);
        means.push(accs.iter().sum::<f64>() / 5.0);
    }
    // Accuracy must not rise as the overlap shrinks.
    for w in means.windows(2) {
        assert!(w[1] >= w[0], "overlaps {overlaps:?} gave {means:?}");
    }
}
