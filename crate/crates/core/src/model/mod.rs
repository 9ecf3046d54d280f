//! The multi-task model: a shared embedding + LSTM extractor feeding a
//! veracity head, an emotion head, and a domain discriminator behind a
//! gradient-reversal layer.
//!
//! With per-batch means
//!
//! ```text
//! L_fnd = mean over source of BCE(veracity)
//! L_emo = mean over source and target of CE(emotion)
//! L_adv = mean over source and target of BCE(domain), source = 1, target = 0
//! L_total = (1 - alpha - beta) L_fnd + alpha L_adv + beta L_emo
//! ```
//!
//! the backward pass gives the discriminator `alpha dL_adv` and the extractor
//! `(1 - alpha - beta) dL_fnd + beta dL_emo - lambda alpha dL_adv`. Terms that
//! a variant lacks are exactly zero and their weight is forced to zero.

mod batch;
mod variant;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

pub use batch::{Batch, Encoded, LossWeights, SourceSample, TargetSample};
pub use variant::{Adaptation, Task, Variant};

use crate::nn::{
    affine_backward, affine_forward, embed_backward, embed_forward, lstm_backward, lstm_forward,
    lstm_param_names, read_checkpoint, sigmoid, sigmoid_bce, softmax_ce, write_checkpoint, Grl,
    GrlConfig, LstmCache, ParamSet, Tensor2, grad_check, GradCheckReport,
};
use crate::rng::SplitMix64;
use crate::textprep::{EmotionTaxonomy, Vocabulary, OOV_ID, PAD_ID};
use crate::{Error, Result};

pub const EMBED: &str = "embed";
pub const LSTM_PREFIX: &str = "lstm.";
pub const FND_W: &str = "fnd.W";
pub const FND_B: &str = "fnd.b";
pub const EMO_W: &str = "emo.W";
pub const EMO_B: &str = "emo.b";
pub const DOM_W: &str = "dom.W";
pub const DOM_B: &str = "dom.b";

/// Half-width of the uniform initialization range.
pub const INIT_SCALE: f64 = 0.08;
pub const FORGET_BIAS: f64 = 1.0;

/// Parameter ownership: extractor (embedding + LSTM), veracity head,
/// emotion head, discriminator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamGroup {
    Extractor,
    Veracity,
    Emotion,
    Discriminator,
}

pub fn param_group(name: &str) -> ParamGroup {
    if name.starts_with("fnd.") {
        ParamGroup::Veracity
    } else if name.starts_with("emo.") {
        ParamGroup::Emotion
    } else if name.starts_with("dom.") {
        ParamGroup::Discriminator
    } else {
        ParamGroup::Extractor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDims {
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub max_len: usize,
}

impl Default for ModelDims {
    fn default() -> Self {
        Self {
            embed_dim: 32,
            hidden_dim: 64,
            max_len: 200,
        }
    }
}

/// Component losses of one batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub fnd: f64,
    pub emo: f64,
    pub adv: f64,
}

/// Weights actually applied, after the variant has zeroed absent terms.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TermWeights {
    fnd: f64,
    emo: f64,
    adv: f64,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    variant: Variant,
    taxonomy: Option<EmotionTaxonomy>,
    dims: ModelDims,
    vocab: Vocabulary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MtlModel {
    variant: Variant,
    vocab: Vocabulary,
    dims: ModelDims,
    pub params: ParamSet,
}

/// Per-sample forward state.
struct Features {
    embedded_ids: Vec<usize>,
    h: Vec<f64>,
    cache: LstmCache,
}

impl MtlModel {
    /// Seeded initialization: every weight uniform in +/-[`INIT_SCALE`], biases
    /// zero except the LSTM forget gate at [`FORGET_BIAS`]. Parameters are drawn
    /// in a fixed order (embedding, LSTM, veracity, emotion, discriminator),
    /// so variants sharing a seed share their extractor and veracity head.
    /// The padding and unknown-token rows of the embedding are zero and
    /// never read: an unknown token always feeds a zero input vector.
    pub fn new(variant: Variant, vocab: Vocabulary, dims: ModelDims, seed: u64) -> Result<Self> {
        if dims.embed_dim == 0 || dims.hidden_dim == 0 || dims.max_len == 0 {
            return Err(Error::Config(format!("model dims must be positive: {dims:?}")));
        }
        let mut rng = SplitMix64::new(seed);
        let mut uniform = |rows: usize, cols: usize| -> Tensor2 {
            let data = (0..rows * cols).map(|_| rng.uniform(-INIT_SCALE, INIT_SCALE)).collect();
            Tensor2::from_vec(rows, cols, data).expect("finite init")
        };
        let (e, h) = (dims.embed_dim, dims.hidden_dim);
        let mut params = ParamSet::new();
        let mut embed = uniform(vocab.len(), e);
        embed.row_mut(PAD_ID).fill(0.0);
        embed.row_mut(OOV_ID).fill(0.0);
        params.add(EMBED, embed)?;
        for name in lstm_param_names(LSTM_PREFIX) {
            let kind = &name[LSTM_PREFIX.len()..LSTM_PREFIX.len() + 1];
            let t = match kind {
                "W" => uniform(h, e),
                "U" => uniform(h, h),
                _ => {
                    let mut b = Tensor2::zeros(h, 1);
                    if name.ends_with("_f") {
                        b.fill(FORGET_BIAS);
                    }
                    b
                }
            };
            params.add(name, t)?;
        }
        params.add(FND_W, uniform(1, h))?;
        params.add(FND_B, Tensor2::zeros(1, 1))?;
        if let Some(tax) = variant.taxonomy() {
            params.add(EMO_W, uniform(tax.len(), h))?;
            params.add(EMO_B, Tensor2::zeros(tax.len(), 1))?;
        }
        if variant.is_da() {
            params.add(DOM_W, uniform(1, h))?;
            params.add(DOM_B, Tensor2::zeros(1, 1))?;
        }
        Ok(Self {
            variant,
            vocab,
            dims,
            params,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dims(&self) -> ModelDims {
        self.dims
    }

    pub fn num_emotions(&self) -> Option<usize> {
        self.variant.taxonomy().map(EmotionTaxonomy::len)
    }

    pub fn encode_text(&self, text: &str) -> Encoded {
        Encoded::from_text(text, &self.vocab, self.dims.max_len)
    }

    fn head(&self, h: &[f64], w: &str, b: &str) -> Result<Vec<f64>> {
        head(&self.params, h, w, b)
    }

    /// Final hidden state of the extractor.
    pub fn hidden(&self, input: &Encoded) -> Result<Vec<f64>> {
        Ok(features(&self.params, input)?.h)
    }

    /// Probability that the input is fake. Class 1 when `>= 0.5`.
    pub fn predict_veracity(&self, input: &Encoded) -> Result<f64> {
        let h = self.hidden(input)?;
        Ok(sigmoid(self.head(&h, FND_W, FND_B)?[0]))
    }

    /// Most probable emotion; ties go to the lowest index.
    pub fn predict_emotion(&self, input: &Encoded) -> Result<usize> {
        if !self.variant.is_mtl() {
            return Err(Error::VariantMismatch {
                variant: self.variant.to_string(),
                reason: "single-task model has no emotion head".into(),
            });
        }
        let h = self.hidden(input)?;
        let logits = self.head(&h, EMO_W, EMO_B)?;
        let mut best = 0;
        for (i, &z) in logits.iter().enumerate().skip(1) {
            if z > logits[best] {
                best = i;
            }
        }
        Ok(best)
    }

    fn term_weights(&self, w: &LossWeights) -> Result<TermWeights> {
        w.validate()?;
        let alpha = if self.variant.is_da() { w.alpha } else { 0.0 };
        let beta = if self.variant.is_mtl() { w.beta } else { 0.0 };
        Ok(TermWeights {
            fnd: 1.0 - alpha - beta,
            emo: beta,
            adv: alpha,
            lambda: w.lambda,
        })
    }

    fn check_batch(&self, batch: &Batch) -> Result<()> {
        let mismatch = |reason: String| Error::VariantMismatch {
            variant: self.variant.to_string(),
            reason,
        };
        if batch.source.is_empty() {
            return Err(mismatch("batch has no source samples".into()));
        }
        if !self.variant.is_da() && !batch.target.is_empty() {
            return Err(mismatch("non-adaptive model got target samples".into()));
        }
        for s in &batch.source {
            if s.veracity > 1 {
                return Err(Error::Data(format!("veracity label {} is not 0/1", s.veracity)));
            }
        }
        if let Some(k) = self.num_emotions() {
            let labels = batch
                .source
                .iter()
                .map(|s| s.emotion)
                .chain(batch.target.iter().map(|t| t.emotion));
            for e in labels {
                match e {
                    None => return Err(mismatch("multi-task batch is missing emotion labels".into())),
                    Some(e) if e >= k => {
                        return Err(Error::OutOfRange {
                            context: "emotion label",
                            index: e,
                            limit: k,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// Component losses and the weighted total, without touching gradients.
    pub fn forward_loss(&self, batch: &Batch, w: &LossWeights) -> Result<LossBreakdown> {
        self.check_batch(batch)?;
        let t = self.term_weights(w)?;
        run(self.variant, Params::Read(&self.params), batch, t)
    }

    /// Forward pass plus backward accumulation into `self.params` gradients.
    /// Call [`ParamSet::zero_grads`] first for a fresh gradient.
    pub fn backward(&mut self, batch: &Batch, w: &LossWeights) -> Result<LossBreakdown> {
        self.check_batch(batch)?;
        let t = self.term_weights(w)?;
        run(self.variant, Params::Write(&mut self.params), batch, t)
    }

    /// The scalar whose finite differences the gradient of `param` must
    /// match: `L_total` for head parameters, and the reversed objective
    /// `(1 - alpha - beta) L_fnd + beta L_emo - lambda alpha L_adv` for
    /// extractor parameters.
    pub fn gradient_objective(&self, batch: &Batch, w: &LossWeights, param: &str) -> Result<f64> {
        let losses = self.forward_loss(batch, w)?;
        if param_group(param) != ParamGroup::Extractor {
            return Ok(losses.total);
        }
        let t = self.term_weights(w)?;
        Ok(t.fnd * losses.fnd + t.emo * losses.emo - t.lambda * t.adv * losses.adv)
    }

    pub fn save<W: Write>(&self, out: W) -> Result<()> {
        let header = CheckpointHeader {
            variant: self.variant,
            taxonomy: self.variant.taxonomy(),
            dims: self.dims,
            vocab: self.vocab.clone(),
        };
        let json = serde_json::to_string(&header).map_err(|e| Error::Checkpoint(e.to_string()))?;
        write_checkpoint(out, &json, &self.params)
    }

    pub fn load<R: Read>(input: R) -> Result<Self> {
        let (json, params) = read_checkpoint(input)?;
        let header: CheckpointHeader =
            serde_json::from_str(&json).map_err(|e| Error::Checkpoint(format!("header: {e}")))?;
        if header.taxonomy != header.variant.taxonomy() {
            return Err(Error::Checkpoint("taxonomy does not match variant".into()));
        }
        let model = Self {
            variant: header.variant,
            vocab: header.vocab,
            dims: header.dims,
            params,
        };
        let template = Self::new(model.variant, model.vocab.clone(), model.dims, 0)?;
        let same_layout = template.params.names().eq(model.params.names())
            && template
                .params
                .iter()
                .zip(model.params.iter())
                .all(|((_, a, _), (_, b, _))| a.shape() == b.shape());
        if !same_layout {
            return Err(Error::Checkpoint("parameter layout does not match header".into()));
        }
        Ok(model)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.save(&mut buf)?;
        Ok(buf)
    }

    /// Recomputes the gradient for `batch` from scratch and compares every
    /// parameter entry against central differences of
    /// [`MtlModel::gradient_objective`].
    pub fn check_gradients(&mut self, batch: &Batch, w: &LossWeights, tol: f64) -> Result<GradCheckReport> {
        self.params.zero_grads();
        self.backward(batch, w)?;
        // Validate once so the objective closure can unwrap.
        self.forward_loss(batch, w)?;
        let probe = self.clone();
        Ok(grad_check(&self.params, tol, |p, name| {
            let mut m = probe.clone();
            m.params = p.clone();
            m.gradient_objective(batch, w, name).expect("batch validated above")
        }))
    }
}

/// A small random model and batch for gradient checking: vocabulary of 6
/// tokens, dims at most 8, weights uniform in +/-0.5 so that every gate is
/// away from saturation and gradients are not trivially small.
pub fn gradcheck_instance(variant: Variant, seed: u64) -> Result<(MtlModel, Batch, LossWeights)> {
    let mut rng = SplitMix64::new(seed);
    let vocab = Vocabulary::from_tokens(["a", "b", "c", "d", "e", "f"]);
    let dims = ModelDims {
        embed_dim: 2 + rng.below(4),
        hidden_dim: 2 + rng.below(4),
        max_len: 3 + rng.below(3),
    };
    let mut model = MtlModel::new(variant, vocab, dims, seed)?;
    for (_, v, _) in model.params.iter_mut() {
        v.data_mut().iter_mut().for_each(|x| *x = rng.uniform(-0.5, 0.5));
    }
    let k = model.num_emotions();
    let encoded = |rng: &mut SplitMix64| {
        let len = 1 + rng.below(dims.max_len);
        let ids = (0..dims.max_len)
            .map(|t| if t < len { rng.below(model.vocab.len()) } else { 0 })
            .collect();
        let mask = (0..dims.max_len).map(|t| t < len).collect();
        Encoded { ids, mask }
    };
    let mut batch = Batch::default();
    for i in 0..2 {
        batch.source.push(SourceSample {
            input: encoded(&mut rng),
            veracity: i as u8,
            emotion: k.map(|k| rng.below(k)),
        });
    }
    if variant.is_da() {
        for _ in 0..2 {
            batch.target.push(TargetSample {
                input: encoded(&mut rng),
                emotion: k.map(|k| rng.below(k)),
            });
        }
    }
    let w = LossWeights::new(0.1 + 0.3 * rng.next_f64(), 0.1 + 0.3 * rng.next_f64(), 0.5 + rng.next_f64())?;
    Ok((model, batch, w))
}

enum Params<'a> {
    Read(&'a ParamSet),
    Write(&'a mut ParamSet),
}

impl Params<'_> {
    fn view(&self) -> &ParamSet {
        match self {
            Params::Read(p) => p,
            Params::Write(p) => p,
        }
    }

    fn grads(&mut self) -> Option<&mut ParamSet> {
        match self {
            Params::Read(_) => None,
            Params::Write(p) => Some(p),
        }
    }
}

fn features(params: &ParamSet, input: &Encoded) -> Result<Features> {
    if input.ids.len() != input.mask.len() {
        return Err(Error::shape("mask", input.ids.len(), input.mask.len()));
    }
    let mut x = embed_forward(&input.ids, params.get(EMBED)?)?;
    for (t, &id) in input.ids.iter().enumerate() {
        if id == OOV_ID {
            x.row_mut(t).fill(0.0);
        }
    }
    let (h, cache) = lstm_forward(&x, &input.mask, params, LSTM_PREFIX)?;
    Ok(Features {
        embedded_ids: input.ids.clone(),
        h,
        cache,
    })
}

fn head(params: &ParamSet, h: &[f64], w: &str, b: &str) -> Result<Vec<f64>> {
    affine_forward(h, params.get(w)?, params.get(b)?)
}

/// Accumulates the head's parameter gradients and adds its input gradient
/// into `dh`.
fn head_backward(params: &mut ParamSet, h: &[f64], w: &str, b: &str, dout: &[f64], dh: &mut [f64]) -> Result<()> {
    let wi = params.slot(w)?;
    let bi = params.slot(b)?;
    let (values, grads) = (&params.values, &mut params.grads);
    let (gw, gb) = if wi < bi {
        let (lo, hi) = grads.split_at_mut(bi);
        (&mut lo[wi], &mut hi[0])
    } else {
        let (lo, hi) = grads.split_at_mut(wi);
        (&mut hi[0], &mut lo[bi])
    };
    let d = affine_backward(h, &values[wi], dout, gw, gb)?;
    for (a, b) in dh.iter_mut().zip(d) {
        *a += b;
    }
    Ok(())
}

fn run(variant: Variant, mut params: Params<'_>, batch: &Batch, t: TermWeights) -> Result<LossBreakdown> {
    let mtl = variant.is_mtl();
    let da = variant.is_da();
    let grl = Grl::new(GrlConfig::new(t.lambda)?);
    let n_source = batch.source.len() as f64;
    let n_all = (batch.source.len() + batch.target.len()) as f64;

    let mut fnd_sum = 0.0;
    let mut emo_sum = 0.0;
    let mut adv_sum = 0.0;

    let samples = batch
        .source
        .iter()
        .map(|s| (&s.input, Some(s.veracity), s.emotion, 1.0))
        .chain(batch.target.iter().map(|s| (&s.input, None, s.emotion, 0.0)));
    for (input, veracity, emotion, domain) in samples {
        let feats = features(params.view(), input)?;
        let h = &feats.h;
        let mut dh = vec![0.0; h.len()];

        if let Some(y) = veracity {
            let z = head(params.view(), h, FND_W, FND_B)?;
            let (loss, dz) = sigmoid_bce(z[0], f64::from(y));
            fnd_sum += loss;
            if let (Some(p), true) = (params.grads(), t.fnd != 0.0) {
                head_backward(p, h, FND_W, FND_B, &[t.fnd / n_source * dz], &mut dh)?;
            }
        }
        if mtl {
            let label = emotion.expect("checked by check_batch");
            let logits = head(params.view(), h, EMO_W, EMO_B)?;
            let (loss, dlogits) = softmax_ce(&logits, label)?;
            emo_sum += loss;
            if let (Some(p), true) = (params.grads(), t.emo != 0.0) {
                let scale = t.emo / n_all;
                let d: Vec<f64> = dlogits.iter().map(|g| scale * g).collect();
                head_backward(p, h, EMO_W, EMO_B, &d, &mut dh)?;
            }
        }
        if da {
            let reversed = grl.forward(h);
            let z = head(params.view(), &reversed, DOM_W, DOM_B)?;
            let (loss, dz) = sigmoid_bce(z[0], domain);
            adv_sum += loss;
            if let (Some(p), true) = (params.grads(), t.adv != 0.0) {
                let mut d_feat = vec![0.0; h.len()];
                head_backward(p, &reversed, DOM_W, DOM_B, &[t.adv / n_all * dz], &mut d_feat)?;
                // With lambda = 0 the reversed term is skipped outright, so the
                // extractor gradient is bit-identical to a non-adaptive run.
                if t.lambda != 0.0 {
                    for (a, b) in dh.iter_mut().zip(grl.backward(&d_feat)) {
                        *a += b;
                    }
                }
            }
        }

        if let Some(p) = params.grads() {
            if dh.iter().any(|&g| g != 0.0) {
                let mut dx = lstm_backward(&feats.cache, &dh, p)?;
                for (t, &id) in feats.embedded_ids.iter().enumerate() {
                    if id == OOV_ID {
                        dx.row_mut(t).fill(0.0);
                    }
                }
                embed_backward(&feats.embedded_ids, &dx, p.grad_mut(EMBED)?)?;
            }
        }
    }

    let fnd = fnd_sum / n_source;
    let emo = if mtl { emo_sum / n_all } else { 0.0 };
    let adv = if da { adv_sum / n_all } else { 0.0 };
    Ok(LossBreakdown {
        total: t.fnd * fnd + t.adv * adv + t.emo * emo,
        fnd,
        emo,
        adv,
    })
}

#[cfg(test)]
mod tests;
