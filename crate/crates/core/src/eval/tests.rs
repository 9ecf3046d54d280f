use proptest::prelude::*;

use super::*;
use crate::model::{Adaptation, ModelDims, Task, FND_B, FND_W};
use crate::synthgen::{generate, SynthConfig};
use crate::textprep::Vocabulary;

fn zero_head_model() -> MtlModel {
    let vocab = Vocabulary::from_tokens(["x", "y"]);
    let dims = ModelDims { embed_dim: 2, hidden_dim: 2, max_len: 4 };
    let mut m = MtlModel::new(Variant::ALL[0], vocab, dims, 0).unwrap();
    m.params.get_mut(FND_W).unwrap().fill(0.0);
    m.params.get_mut(FND_B).unwrap().fill(0.0);
    m
}

fn labelled(labels: &[u8]) -> Vec<Document> {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| Document::new(format!("d{i}"), "x y", "t", Split::Test).with_veracity(l))
        .collect()
}

#[test]
fn constant_half_probability_predicts_fake() {
    let m = zero_head_model();
    let docs = labelled(&[1, 0, 0, 1, 1, 0, 0, 0]);
    assert_eq!(accuracy(&m, &docs).unwrap(), 3.0 / 8.0);
    assert_eq!(accuracy(&m, &labelled(&[1, 1])).unwrap(), 1.0);
}

#[test]
fn accuracy_errors() {
    let m = zero_head_model();
    assert!(accuracy(&m, &[]).is_err());
    let mut docs = labelled(&[1]);
    docs[0].veracity = None;
    assert!(accuracy(&m, &docs).is_err());
}

#[test]
fn accuracy_matches_recount_and_ignores_order() {
    let vocab = Vocabulary::from_tokens(["a", "b", "c", "d"]);
    let dims = ModelDims { embed_dim: 3, hidden_dim: 3, max_len: 5 };
    let m = MtlModel::new(Variant::ALL[0], vocab, dims, 42).unwrap();
    let mut rng = crate::rng::SplitMix64::new(1);
    let words = ["a", "b", "c", "d", "zzz"];
    let mut docs: Vec<Document> = (0..60)
        .map(|i| {
            let text: Vec<&str> = (0..4).map(|_| *rng.choose(&words)).collect();
            Document::new(format!("{i}"), text.join(" "), "t", Split::Test)
                .with_veracity(u8::from(rng.bernoulli(0.5)))
        })
        .collect();
    let mut correct = 0;
    for d in &docs {
        let p = m.predict_veracity(&m.encode_text(&d.text)).unwrap();
        let pred = if p >= 0.5 { 1 } else { 0 };
        if Some(pred) == d.veracity {
            correct += 1;
        }
    }
    let acc = accuracy(&m, &docs).unwrap();
    assert_eq!(acc, correct as f64 / 60.0);
    rng.shuffle(&mut docs);
    assert_eq!(accuracy(&m, &docs).unwrap(), acc);
}

fn row(source: &str, target: &str, variant: Variant, acc: f64, seed: Option<u64>) -> ReportRow {
    ReportRow {
        source: source.into(),
        target: target.into(),
        variant,
        accuracy: acc,
        n_eval: 100,
        seed,
    }
}

fn table_one() -> EvalReport {
    let [stl, e, p] = [Variant::ALL[0], Variant::ALL[1], Variant::ALL[2]];
    EvalReport {
        rows: vec![
            row("FAMT", "Celeb", stl, 0.420, None),
            row("FAMT", "Celeb", e, 0.520, None),
            row("FAMT", "Celeb", p, 0.530, None),
            row("Celeb", "FAMT", stl, 0.432, None),
            row("Celeb", "FAMT", e, 0.471, None),
            row("Celeb", "FAMT", p, 0.476, None),
        ],
    }
}

#[test]
fn table_one_block_is_reproduced() {
    let text = emit_table(&table_one(), TableFormat::Text).unwrap();
    let lines: Vec<Vec<&str>> = text.lines().map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], ["Source", "Target", "NonDA-STL", "NonDA-MTL(E)", "NonDA-MTL(P)"]);
    assert_eq!(lines[1], ["FAMT", "Celeb", "0.420", "0.520", "0.530"]);
    assert_eq!(lines[2], ["Celeb", "FAMT", "0.432", "0.471", "0.476"]);

    let tsv = emit_table(&table_one(), TableFormat::Tsv).unwrap();
    assert_eq!(
        tsv,
        "Source\tTarget\tSeed\tN\tNonDA-STL\tNonDA-MTL(E)\tNonDA-MTL(P)\n\
         FAMT\tCeleb\tmean\t100\t0.420\t0.520\t0.530\n\
         Celeb\tFAMT\tmean\t100\t0.432\t0.471\t0.476\n"
    );
}

#[test]
fn single_row_renders_header_plus_one_line() {
    let r = EvalReport { rows: vec![row("a", "b", Variant::ALL[5], 0.6, Some(3))] };
    for f in [TableFormat::Tsv, TableFormat::Text] {
        assert_eq!(emit_table(&r, f).unwrap().lines().count(), 2);
    }
    let text = emit_table(&r, TableFormat::Text).unwrap();
    assert!(text.lines().next().unwrap().contains("Seed"));
}

#[test]
fn emission_errors() {
    assert!(emit_table(&EvalReport::default(), TableFormat::Tsv).is_err());
    assert!(emit_table(&EvalReport::default(), TableFormat::Json).is_err());
    assert!("xml".parse::<TableFormat>().is_err());
    let dup = EvalReport {
        rows: vec![
            row("a", "b", Variant::ALL[0], 0.5, None),
            row("a", "b", Variant::ALL[0], 0.6, None),
        ],
    };
    assert!(emit_table(&dup, TableFormat::Tsv).is_err());
    let tab = EvalReport { rows: vec![row("a\tb", "c", Variant::ALL[0], 0.5, None)] };
    assert!(emit_table(&tab, TableFormat::Tsv).is_err());
}

#[test]
fn json_round_trips() {
    let r = table_one();
    let s = emit_table(&r, TableFormat::Json).unwrap();
    assert_eq!(serde_json::from_str::<EvalReport>(&s).unwrap(), r);
}

#[test]
fn sparse_cells_and_mixed_counts_round_trip() {
    let mut r = EvalReport {
        rows: vec![
            row("a", "b", Variant::ALL[0], 0.5, Some(1)),
            row("a", "b", Variant::ALL[3], 0.25, Some(1)),
            row("a", "b", Variant::ALL[3], 1.0 / 3.0, None),
        ],
    };
    r.rows[1].n_eval = 7;
    let tsv = emit_table(&r, TableFormat::Tsv).unwrap();
    assert!(tsv.contains("\t100,7\t"), "{tsv}");
    assert!(tsv.contains("\t-\t"), "{tsv}");
    assert_eq!(parse_tsv(&tsv).unwrap(), r);
}

#[test]
fn malformed_tsv_is_rejected() {
    for bad in [
        "",
        "Source\tTarget\n",
        "Source\tTarget\tSeed\tN\tNonDA-STL\na\tb\tmean\t3\n",
        "Source\tTarget\tSeed\tN\tNonDA-STL\na\tb\tmean\tx\t0.5\n",
        "Source\tTarget\tSeed\tN\tBogus\na\tb\tmean\t3\t0.5\n",
    ] {
        assert!(parse_tsv(bad).is_err(), "{bad:?}");
    }
}

fn arb_report() -> impl Strategy<Value = EvalReport> {
    let names = prop::sample::select(vec!["famt", "celeb", "gossip", "Politi Fact"]);
    let cell = (0u32..=1000, 1usize..5000);
    (
        prop::collection::vec((names.clone(), names, prop::option::of(0u64..10)), 1..4),
        prop::collection::vec(prop::option::of(cell), 6),
        any::<bool>(),
    )
        .prop_map(|(groups, cells, exact)| {
            let mut rows = Vec::new();
            let mut seen = Vec::new();
            for (s, t, seed) in groups {
                if seen.contains(&(s, t, seed)) {
                    continue;
                }
                seen.push((s, t, seed));
                for (v, c) in Variant::ALL.iter().zip(&cells) {
                    if let Some((k, n)) = c {
                        let acc = if exact { *k as f64 / 1000.0 } else { *k as f64 / *n as f64 };
                        rows.push(ReportRow {
                            source: s.into(),
                            target: t.into(),
                            variant: *v,
                            accuracy: acc.min(1.0),
                            n_eval: *n,
                            seed,
                        });
                    }
                }
            }
            EvalReport { rows }
        })
        .prop_filter("nonempty", |r| !r.rows.is_empty())
}

proptest! {
    #[test]
    fn tsv_round_trip(r in arb_report()) {
        let tsv = emit_table(&r, TableFormat::Tsv).unwrap();
        prop_assert_eq!(parse_tsv(&tsv).unwrap(), r);
    }
}

fn tiny_pair(seed: u64) -> DatasetPair {
    let (s, t) = generate(&SynthConfig {
        n_per_domain: 60,
        doc_len: (6, 8),
        seed,
        ..Default::default()
    })
    .unwrap();
    DatasetPair { source: "src".into(), target: "tgt".into(), source_docs: s, target_docs: t }
}

fn tiny_matrix(seeds: Vec<u64>) -> MatrixConfig {
    MatrixConfig {
        train: TrainConfig {
            epochs: 2,
            batch_size: 16,
            embed_dim: 4,
            hidden_dim: 4,
            max_len: 8,
            lr: 0.01,
            ..Default::default()
        },
        seeds,
        selection: Selection::Fixed { alpha: 0.1, beta: 0.2 },
        lexicon: None,
    }
}

#[test]
fn one_cell_gives_one_row_and_one_mean() {
    let r = run_matrix(&[tiny_pair(1)], &[Variant::ALL[4]], &tiny_matrix(vec![7])).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.rows[0].seed, Some(7));
    assert_eq!(r.rows[1].seed, None);
    assert_eq!(r.rows[0].accuracy, r.rows[1].accuracy);
    assert_eq!(r.rows[0].n_eval, 9);
}

#[test]
fn matrix_means_and_order() {
    let variants = [Variant::ALL[0], Variant::new(Adaptation::Da, Task::MtlPlutchik)];
    let cfg = tiny_matrix(vec![1, 2, 3]);
    let mut cells = 0;
    let r = run_matrix_with(&[tiny_pair(2)], &variants, &cfg, |c| {
        cells += 1;
        assert!(c.record.epochs.len() <= 2);
    })
    .unwrap();
    assert_eq!(cells, 6);
    assert_eq!(r.rows.len(), 8);
    let order: Vec<_> = r.rows.iter().map(|x| (x.seed, x.variant)).collect();
    assert_eq!(order[0], (Some(1), variants[0]));
    assert_eq!(order[1], (Some(1), variants[1]));
    assert_eq!(order[6], (None, variants[0]));
    for v in variants {
        let seeds: Vec<f64> = r.rows.iter().filter(|x| x.variant == v && x.seed.is_some()).map(|x| x.accuracy).collect();
        let mean = seeds.iter().sum::<f64>() / 3.0;
        assert!((r.mean_of("src", "tgt", v).unwrap() - mean).abs() <= 1e-12);
    }
    for x in &r.rows {
        if x.seed.is_some() {
            let k = (x.accuracy * x.n_eval as f64).round();
            assert_eq!(k / x.n_eval as f64, x.accuracy);
        }
    }
    let tsv = emit_table(&r, TableFormat::Tsv).unwrap();
    assert_eq!(parse_tsv(&tsv).unwrap(), r);
    assert_eq!(run_matrix(&[tiny_pair(2)], &variants, &cfg).unwrap(), r);
}

#[test]
fn matrix_errors() {
    let cfg = tiny_matrix(vec![1]);
    assert!(run_matrix(&[], &Variant::ALL, &cfg).is_err());
    assert!(run_matrix(&[tiny_pair(1)], &[], &cfg).is_err());
    let mut pair = tiny_pair(1);
    pair.target_docs.retain(|d| d.split != Split::Test);
    assert!(run_matrix(&[pair], &Variant::ALL[..1], &cfg).is_err());
}
