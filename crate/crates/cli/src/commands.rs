use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use emofnd::eval::{accuracy, emit_table, run_matrix_with, DatasetPair, MatrixConfig, Selection};
use emofnd::model::{gradcheck_instance, LossWeights};
use emofnd::synthgen::{generate, SynthConfig};
use emofnd::textprep::{read_documents, read_lexicon_entries, write_documents, LexiconEntry};
use emofnd::train::{grid_search, prepare, train, TrainConfig, TrainOutcome};
use emofnd::{Document, EmotionLexicon, MtlModel, Variant};
use serde::{Deserialize, Serialize};

use crate::{
    AnnotateArgs, Command, EvalArgs, GencorpusArgs, GradcheckArgs, MatrixArgs, TrainArgs,
    TrainCmdArgs,
};

#[derive(Debug)]
pub enum CliError {
    Lib(emofnd::Error),
    Usage(String),
    CheckFailed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(emofnd::Error::Config(_) | emofnd::Error::VariantMismatch { .. }) => 1,
            CliError::Lib(_) => 2,
            CliError::CheckFailed(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::CheckFailed(m) => f.write_str(m),
        }
    }
}

impl From<emofnd::Error> for CliError {
    fn from(e: emofnd::Error) -> Self {
        CliError::Lib(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Annotate(a) => annotate(a),
        Command::Gencorpus(a) => gencorpus(a),
        Command::Train(a) => train_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Matrix(a) => matrix(a),
        Command::Gradcheck(a) => gradcheck(a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| emofnd::Error::Io { path: path.to_path_buf(), source: e }.into())
}

/// Runs `body` against `--out` or standard output.
fn with_output(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let io_err = |path: &Path, e: io::Error| -> CliError {
        emofnd::Error::Io { path: path.to_path_buf(), source: e }.into()
    };
    match out {
        Some(path) => {
            let mut w = create(path)?;
            body(&mut w)?;
            w.flush().map_err(|e| io_err(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush().map_err(|e| io_err(Path::new("<stdout>"), e))
        }
    }
}

fn annotate(a: AnnotateArgs) -> Result<()> {
    let mut docs = read_documents(&a.input)?;
    let lexicon = match &a.lexicon {
        Some(path) => EmotionLexicon::read_jsonl(path, a.taxonomy)?,
        None => EmotionLexicon::builtin(a.taxonomy),
    };
    let mut labelled = 0;
    for doc in &mut docs {
        if a.force || doc.emotion_id(a.taxonomy).is_none() {
            let id = lexicon.annotate(&emofnd::textprep::preprocess(&doc.text));
            doc.emotion = a.taxonomy.label(id).map(str::to_string);
            labelled += 1;
        }
    }
    with_output(a.out.as_deref(), |w| Ok(write_documents(w, &docs)?))?;
    eprintln!("annotated {labelled} of {} documents ({})", docs.len(), a.taxonomy);
    Ok(())
}

/// One manifest entry. Relative paths resolve against the manifest's
/// directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestEntry {
    path: PathBuf,
    domain: String,
}

type Manifest = BTreeMap<String, ManifestEntry>;

fn gencorpus(a: GencorpusArgs) -> Result<()> {
    let cfg = SynthConfig {
        n_per_domain: a.n,
        vocab_overlap: a.overlap,
        emotion_veracity_corr: a.rho,
        taxonomy: a.taxonomy,
        doc_len: (a.min_len, a.max_len),
        seed: a.seed,
        topic_pool: a.topic_pool,
        topic_signal: a.topic_signal,
        topic_share: a.topic_share,
        markers_per_doc: a.markers,
        source_domain: a.source_name.clone(),
        target_domain: a.target_name.clone(),
    };
    let (source, target) = generate(&cfg)?;
    std::fs::create_dir_all(&a.out_dir)
        .map_err(|e| emofnd::Error::Io { path: a.out_dir.clone(), source: e })?;
    let mut manifest = Manifest::new();
    for (name, docs) in [(&a.source_name, &source), (&a.target_name, &target)] {
        let file = format!("{name}.jsonl");
        let path = a.out_dir.join(&file);
        let mut w = create(&path)?;
        write_documents(&mut w, docs)?;
        w.flush().map_err(|e| emofnd::Error::Io { path: path.clone(), source: e })?;
        manifest.insert(name.clone(), ManifestEntry { path: file.into(), domain: name.clone() });
        println!("{}", path.display());
    }
    let path = a.out_dir.join("manifest.json");
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &manifest)
        .map_err(|e| emofnd::Error::Format(e.to_string()))?;
    writeln!(w).map_err(|e| emofnd::Error::Io { path: path.clone(), source: e })?;
    println!("{}", path.display());
    Ok(())
}

/// Flags over config file over defaults.
fn train_config(a: &TrainArgs) -> Result<TrainConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| emofnd::Error::Io { path: path.clone(), source: e })?;
            serde_json::from_str::<TrainConfig>(&text).map_err(|e| {
                CliError::Usage(format!("config {}: {e}", path.display()))
            })?
        }
        None => TrainConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = &a.$field {
                cfg.$field = v.clone();
            }
        )*};
    }
    set!(epochs, batch_size, lr, seed, patience, alpha_grid, beta_grid, lambda, embed_dim, hidden_dim, max_len, min_count);
    if let (Some(alpha), Some(beta)) = (a.alpha, a.beta) {
        LossWeights::new(alpha, beta, cfg.lambda)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn selection(a: &TrainArgs) -> Selection {
    match (a.alpha, a.beta) {
        (Some(alpha), Some(beta)) => Selection::Fixed { alpha, beta },
        _ => Selection::Grid,
    }
}

fn lexicon(a: &TrainArgs) -> Result<Option<Vec<LexiconEntry>>> {
    Ok(match &a.lexicon {
        Some(path) => Some(read_lexicon_entries(path)?),
        None => None,
    })
}

#[derive(Serialize)]
struct TrainSummary {
    variant: Variant,
    alpha: f64,
    beta: f64,
    lambda: f64,
    seed: u64,
    best_epoch: usize,
    best_val_accuracy: f64,
    epochs_run: usize,
    elapsed_secs: f64,
    checkpoint: PathBuf,
}

fn train_cmd(a: TrainCmdArgs) -> Result<()> {
    let cfg = train_config(&a.train)?;
    let lex = lexicon(&a.train)?;
    if a.variant.is_da() && a.target.is_none() {
        return Err(CliError::Usage(format!("{} needs --target", a.variant)));
    }
    let source = read_documents(&a.source)?;
    let target = match &a.target {
        Some(path) => read_documents(path)?,
        None => Vec::new(),
    };
    let data = prepare(a.variant, &source, &target, &cfg, lex.as_deref())?;
    let outcome: TrainOutcome = match selection(&a.train) {
        Selection::Fixed { alpha, beta } => train(&data, LossWeights::new(alpha, beta, cfg.lambda)?, &cfg)?,
        Selection::Grid => {
            let g = grid_search(&data, &cfg)?;
            for c in &g.cells {
                eprintln!("grid alpha={} beta={} val_accuracy={:.4}", c.alpha, c.beta, c.val_accuracy);
            }
            g.best
        }
    };
    let mut w = create(&a.out)?;
    outcome.model.save(&mut w)?;
    w.flush().map_err(|e| emofnd::Error::Io { path: a.out.clone(), source: e })?;
    if let Some(path) = &a.record {
        let mut w = create(path)?;
        outcome.record.write_jsonl(&mut w)?;
        w.flush().map_err(|e| emofnd::Error::Io { path: path.clone(), source: e })?;
    }
    let r = &outcome.record;
    let summary = TrainSummary {
        variant: r.variant,
        alpha: r.alpha,
        beta: r.beta,
        lambda: r.lambda,
        seed: r.seed,
        best_epoch: r.best_epoch,
        best_val_accuracy: r.best_val_accuracy,
        epochs_run: r.epochs.len(),
        elapsed_secs: outcome.elapsed.as_secs_f64(),
        checkpoint: a.out.clone(),
    };
    println!("{}", serde_json::to_string(&summary).map_err(|e| emofnd::Error::Format(e.to_string()))?);
    Ok(())
}

fn eval_cmd(a: EvalArgs) -> Result<()> {
    let file = File::open(&a.model).map_err(|e| emofnd::Error::Io { path: a.model.clone(), source: e })?;
    let model = MtlModel::load(io::BufReader::new(file))?;
    let docs: Vec<Document> = read_documents(&a.data)?
        .into_iter()
        .filter(|d| a.split.split().is_none_or(|s| d.split == s))
        .collect();
    let acc = accuracy(&model, &docs)?;
    println!(
        "{}",
        serde_json::json!({ "variant": model.variant(), "accuracy": acc, "n_eval": docs.len() })
    );
    Ok(())
}

fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| emofnd::Error::Io { path: path.to_path_buf(), source: e })?;
    let mut m: Manifest = serde_json::from_str(&text).map_err(|source| emofnd::Error::Json {
        path: path.to_path_buf(),
        line: source.line(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    for entry in m.values_mut() {
        if entry.path.is_relative() {
            entry.path = base.join(&entry.path);
        }
    }
    Ok(m)
}

fn domain_docs(manifest: &Manifest, alias: &str) -> Result<Vec<Document>> {
    let entry = manifest
        .get(alias)
        .ok_or_else(|| CliError::Usage(format!("alias `{alias}` is not in the manifest")))?;
    let docs: Vec<Document> = read_documents(&entry.path)?
        .into_iter()
        .filter(|d| d.domain == entry.domain)
        .collect();
    if docs.is_empty() {
        return Err(emofnd::Error::Data(format!(
            "{} has no documents with domain `{}`",
            entry.path.display(),
            entry.domain
        ))
        .into());
    }
    Ok(docs)
}

fn matrix(a: MatrixArgs) -> Result<()> {
    let variants = Variant::parse_list(&a.variants)?;
    if a.seeds == 0 {
        return Err(CliError::Usage("--seeds must be positive".into()));
    }
    let cfg = train_config(&a.train)?;
    let mut pair_names = Vec::new();
    for p in &a.pairs {
        match p.split_once(':') {
            Some((s, t)) if !s.is_empty() && !t.is_empty() => pair_names.push((s.to_string(), t.to_string())),
            _ => return Err(CliError::Usage(format!("pair `{p}` is not SRC:TGT"))),
        }
    }
    let manifest = load_manifest(&a.manifest)?;
    let mut pairs = Vec::new();
    for (s, t) in pair_names {
        pairs.push(DatasetPair {
            source_docs: domain_docs(&manifest, &s)?,
            target_docs: domain_docs(&manifest, &t)?,
            source: s,
            target: t,
        });
    }
    let mcfg = MatrixConfig {
        seeds: (0..a.seeds as u64).map(|i| cfg.seed.wrapping_add(i)).collect(),
        selection: selection(&a.train),
        lexicon: lexicon(&a.train)?,
        train: cfg,
    };
    let report = run_matrix_with(&pairs, &variants, &mcfg, |c| {
        eprintln!(
            "{} -> {} {} seed {}: accuracy {:.4} (alpha {}, beta {}, best epoch {})",
            c.row.source,
            c.row.target,
            c.row.variant,
            c.row.seed.unwrap_or_default(),
            c.row.accuracy,
            c.record.alpha,
            c.record.beta,
            c.record.best_epoch
        );
    })?;
    let table = emit_table(&report, a.format)?;
    with_output(a.out.as_deref(), |w| {
        w.write_all(table.as_bytes())
            .map_err(|e| emofnd::Error::Io { path: PathBuf::from("<output>"), source: e }.into())
    })
}

fn gradcheck(a: GradcheckArgs) -> Result<()> {
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
    }
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for seed in 0..a.seeds {
        let (mut model, batch, w) = gradcheck_instance(a.variant, seed)?;
        let report = model.check_gradients(&batch, &w, a.tol)?;
        println!("seed {seed}: max relative error {:.3e}", report.max_rel_error);
        worst = worst.max(report.max_rel_error);
        if !report.passed() {
            failed.push(seed);
        }
    }
    println!("{}: worst {:.3e} over {} seeds (tol {:e})", a.variant, worst, a.seeds, a.tol);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("gradient check failed for seeds {failed:?}")))
    }
}
