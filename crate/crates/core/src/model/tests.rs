use super::*;

const DA_MTL_P: Variant = Variant::new(Adaptation::Da, Task::MtlPlutchik);
const DA_STL: Variant = Variant::new(Adaptation::Da, Task::Stl);
const NONDA_STL: Variant = Variant::new(Adaptation::NonDa, Task::Stl);

fn grads_of(model: &MtlModel, group: ParamGroup) -> Vec<(String, Vec<f64>)> {
    model
        .params
        .iter()
        .filter(|(n, _, _)| param_group(n) == group)
        .map(|(n, _, g)| (n.to_string(), g.data().to_vec()))
        .collect()
}

fn bits(v: &[(String, Vec<f64>)]) -> Vec<(String, Vec<u64>)> {
    v.iter()
        .map(|(n, g)| (n.clone(), g.iter().map(|x| x.to_bits()).collect()))
        .collect()
}

fn strip_target(batch: &Batch) -> Batch {
    Batch {
        source: batch.source.clone(),
        target: Vec::new(),
    }
}

/// Rebuilds `variant` with the extractor and veracity head of `from`.
fn with_shared_weights(from: &MtlModel, variant: Variant) -> MtlModel {
    let mut m = MtlModel::new(variant, from.vocab().clone(), from.dims(), 0).unwrap();
    let names: Vec<String> = m.params.names().map(String::from).collect();
    for name in names {
        if let Ok(v) = from.params.get(&name) {
            *m.params.get_mut(&name).unwrap() = v.clone();
        }
    }
    m
}

#[test]
fn init_layout() {
    let vocab = Vocabulary::from_tokens(["x", "y"]);
    let dims = ModelDims { embed_dim: 3, hidden_dim: 4, max_len: 6 };
    let m = MtlModel::new(DA_MTL_P, vocab.clone(), dims, 1).unwrap();
    assert_eq!(m.params.get(EMBED).unwrap().shape(), (4, 3));
    assert_eq!(m.params.get("lstm.W_i").unwrap().shape(), (4, 3));
    assert_eq!(m.params.get("lstm.U_g").unwrap().shape(), (4, 4));
    assert_eq!(m.params.get(EMO_W).unwrap().shape(), (8, 4));
    assert_eq!(m.params.get(DOM_W).unwrap().shape(), (1, 4));
    assert!(m.params.get("lstm.b_f").unwrap().data().iter().all(|&b| b == FORGET_BIAS));
    assert!(m.params.get("lstm.b_i").unwrap().data().iter().all(|&b| b == 0.0));
    assert!(m.params.get(EMBED).unwrap().data().iter().all(|x| x.abs() <= INIT_SCALE));

    let stl = MtlModel::new(NONDA_STL, vocab.clone(), dims, 1).unwrap();
    assert!(!stl.params.contains(EMO_W) && !stl.params.contains(DOM_W));
    for (name, v, _) in stl.params.iter() {
        assert_eq!(v, m.params.get(name).unwrap(), "{name} differs across variants");
    }
    let ekman = MtlModel::new(Variant::new(Adaptation::NonDa, Task::MtlEkman), vocab, dims, 1).unwrap();
    assert_eq!(ekman.num_emotions(), Some(6));
}

#[test]
fn total_is_the_weighted_combination() {
    for seed in 0..10 {
        let (model, batch, w) = gradcheck_instance(DA_MTL_P, seed).unwrap();
        let l = model.forward_loss(&batch, &w).unwrap();
        assert!((l.total - w.combine(l.fnd, l.adv, l.emo)).abs() <= 1e-12);
        assert!(l.fnd > 0.0 && l.emo > 0.0 && l.adv > 0.0);
    }
}

#[test]
fn zero_weights_reduce_to_veracity_loss() {
    let (model, batch, _) = gradcheck_instance(DA_MTL_P, 3).unwrap();
    let l = model
        .forward_loss(&strip_target(&batch), &LossWeights::fnd_only())
        .unwrap();
    assert_eq!(l.total.to_bits(), l.fnd.to_bits());
}

#[test]
fn absent_terms_are_zero() {
    let (model, batch, w) = gradcheck_instance(NONDA_STL, 4).unwrap();
    let l = model.forward_loss(&batch, &w).unwrap();
    assert_eq!((l.emo, l.adv), (0.0, 0.0));
    assert_eq!(l.total.to_bits(), l.fnd.to_bits());
}

#[test]
fn batch_variant_mismatches() {
    let (model, batch, w) = gradcheck_instance(DA_MTL_P, 5).unwrap();
    let mut missing = batch.clone();
    missing.target[0].emotion = None;
    assert!(matches!(model.forward_loss(&missing, &w), Err(Error::VariantMismatch { .. })));
    let mut out_of_range = batch.clone();
    out_of_range.source[0].emotion = Some(8);
    assert!(model.forward_loss(&out_of_range, &w).is_err());
    assert!(model.forward_loss(&batch, &LossWeights { alpha: 0.6, beta: 0.4, lambda: 1.0 }).is_err());
    assert!(model.forward_loss(&Batch::default(), &w).is_err());

    let nonda = with_shared_weights(&model, Variant::new(Adaptation::NonDa, Task::MtlPlutchik));
    assert!(matches!(nonda.forward_loss(&batch, &w), Err(Error::VariantMismatch { .. })));
    assert!(nonda.forward_loss(&strip_target(&batch), &w).is_ok());
}

#[test]
fn composite_gradients_match_finite_differences() {
    for variant in Variant::ALL {
        for seed in 0..5 {
            let (mut model, batch, w) = gradcheck_instance(variant, seed).unwrap();
            let report = model.check_gradients(&batch, &w, 1e-4).unwrap();
            assert!(report.passed(), "{variant} seed {seed}: {:?}", report.failures().collect::<Vec<_>>());
        }
    }
}

#[test]
fn lambda_zero_removes_adversarial_component() {
    let (model, batch, w) = gradcheck_instance(DA_STL, 6).unwrap();

    // With lambda = 0 the discriminator cannot reach the extractor: changing
    // its weights leaves the extractor gradient bit-identical.
    let w0 = LossWeights { lambda: 0.0, ..w };
    let mut a = model.clone();
    a.params.zero_grads();
    a.backward(&batch, &w0).unwrap();
    let mut b = model.clone();
    b.params.get_mut(DOM_W).unwrap().data_mut().iter_mut().for_each(|x| *x *= -3.0);
    b.params.zero_grads();
    b.backward(&batch, &w0).unwrap();
    assert_eq!(bits(&grads_of(&a, ParamGroup::Extractor)), bits(&grads_of(&b, ParamGroup::Extractor)));

    // At alpha = 0 the adaptive model's extractor gradient equals the
    // non-adaptive one bitwise, target samples notwithstanding.
    let wa0 = LossWeights { alpha: 0.0, beta: 0.0, lambda: 1.0 };
    let mut da = model.clone();
    da.params.zero_grads();
    da.backward(&batch, &wa0).unwrap();
    let mut nonda = with_shared_weights(&model, NONDA_STL);
    nonda.params.zero_grads();
    nonda.backward(&strip_target(&batch), &wa0).unwrap();
    assert_eq!(bits(&grads_of(&da, ParamGroup::Extractor)), bits(&grads_of(&nonda, ParamGroup::Extractor)));

    // For alpha > 0, lambda = 0 leaves only the rescaled veracity gradient.
    let mut nonda = with_shared_weights(&model, NONDA_STL);
    nonda.params.zero_grads();
    nonda.backward(&strip_target(&batch), &LossWeights::fnd_only()).unwrap();
    for ((_, g_da), (_, g_non)) in grads_of(&a, ParamGroup::Extractor).iter().zip(grads_of(&nonda, ParamGroup::Extractor)) {
        for (x, y) in g_da.iter().zip(g_non) {
            assert!((x - (1.0 - w.alpha) * y).abs() <= 1e-12 * y.abs().max(1e-300) + 1e-18);
        }
    }
}

#[test]
fn reversal_sign_and_scale() {
    let (model, batch, w) = gradcheck_instance(DA_MTL_P, 7).unwrap();
    let extractor_grad = |lambda: f64| {
        let mut m = model.clone();
        m.params.zero_grads();
        m.backward(&batch, &LossWeights { lambda, ..w }).unwrap();
        grads_of(&m, ParamGroup::Extractor)
    };
    let with_grl = extractor_grad(w.lambda);
    let without_adv = extractor_grad(0.0);
    // The gradient alpha * dL_adv/d(theta_l) that plain backprop would give,
    // from finite differences of alpha * L_adv.
    let adv_only = |m: &MtlModel| m.forward_loss(&batch, &w).unwrap().adv * w.alpha;
    for ((name, g), (_, g0)) in with_grl.iter().zip(&without_adv) {
        for e in 0..g.len() {
            let mut plus = model.clone();
            plus.params.get_mut(name).unwrap().data_mut()[e] += 1e-5;
            let mut minus = model.clone();
            minus.params.get_mut(name).unwrap().data_mut()[e] -= 1e-5;
            let plain = (adv_only(&plus) - adv_only(&minus)) / 2e-5;
            let component = g[e] - g0[e];
            assert!(
                (component + w.lambda * plain).abs() <= 1e-6,
                "{name}[{e}]: {component} vs {}",
                -w.lambda * plain
            );
        }
    }
}

#[test]
fn discriminator_gradient_is_alpha_scaled() {
    let (mut model, batch, w) = gradcheck_instance(DA_MTL_P, 8).unwrap();
    model.params.zero_grads();
    model.backward(&batch, &w).unwrap();
    for name in [DOM_W, DOM_B] {
        let n = model.params.get(name).unwrap().len();
        for e in 0..n {
            let at = |delta: f64| {
                let mut m = model.clone();
                m.params.get_mut(name).unwrap().data_mut()[e] += delta;
                w.alpha * m.forward_loss(&batch, &w).unwrap().adv
            };
            let numeric = (at(1e-5) - at(-1e-5)) / 2e-5;
            let analytic = model.params.grad(name).unwrap().data()[e];
            assert!((analytic - numeric).abs() / numeric.abs().max(1.0) <= 1e-6);
        }
    }
}

#[test]
fn zero_weight_heads_get_no_gradient() {
    let (model, batch, w) = gradcheck_instance(DA_MTL_P, 9).unwrap();
    let mut m = model.clone();
    m.params.zero_grads();
    m.backward(&batch, &LossWeights { beta: 0.0, ..w }).unwrap();
    assert!(grads_of(&m, ParamGroup::Emotion).iter().all(|(_, g)| g.iter().all(|&x| x == 0.0)));
    assert!(grads_of(&m, ParamGroup::Discriminator).iter().any(|(_, g)| g.iter().any(|&x| x != 0.0)));

    let mut m = model.clone();
    m.params.zero_grads();
    m.backward(&batch, &LossWeights { alpha: 0.0, ..w }).unwrap();
    assert!(grads_of(&m, ParamGroup::Discriminator).iter().all(|(_, g)| g.iter().all(|&x| x == 0.0)));
    assert!(grads_of(&m, ParamGroup::Emotion).iter().any(|(_, g)| g.iter().any(|&x| x != 0.0)));
}

#[test]
fn nonda_stl_matches_zero_weight_full_model() {
    let (full, batch, _) = gradcheck_instance(DA_MTL_P, 10).unwrap();
    let source_only = strip_target(&batch);
    let zero = LossWeights::fnd_only();
    let mut a = full.clone();
    a.params.zero_grads();
    let la = a.backward(&source_only, &zero).unwrap();
    let mut b = with_shared_weights(&full, NONDA_STL);
    b.params.zero_grads();
    let lb = b.backward(&source_only, &zero).unwrap();
    assert_eq!(la.total.to_bits(), lb.total.to_bits());
    assert_eq!(la.fnd.to_bits(), lb.fnd.to_bits());
    for group in [ParamGroup::Extractor, ParamGroup::Veracity] {
        assert_eq!(bits(&grads_of(&a, group)), bits(&grads_of(&b, group)));
    }
}

#[test]
fn backward_accumulates() {
    let (mut model, batch, w) = gradcheck_instance(DA_MTL_P, 11).unwrap();
    model.params.zero_grads();
    model.backward(&batch, &w).unwrap();
    let once = model.params.clone();
    model.backward(&batch, &w).unwrap();
    for ((_, _, g1), (_, _, g2)) in once.iter().zip(model.params.iter()) {
        for (a, b) in g1.data().iter().zip(g2.data()) {
            // Accumulation order differs from a single doubled sum.
            assert!((2.0 * a - b).abs() <= 1e-12 * b.abs().max(1e-3));
        }
    }
    model.params.zero_grads();
    assert_eq!(model.params.grad_norm(), 0.0);
}

#[test]
fn forward_loss_leaves_gradients_alone() {
    let (mut model, batch, w) = gradcheck_instance(DA_MTL_P, 12).unwrap();
    model.params.zero_grads();
    let before = model.clone();
    model.forward_loss(&batch, &w).unwrap();
    assert_eq!(model, before);
}

#[test]
fn predictions() {
    let (mut model, batch, _) = gradcheck_instance(DA_MTL_P, 13).unwrap();
    for s in &batch.source {
        let p = model.predict_veracity(&s.input).unwrap();
        assert!(p > 0.0 && p < 1.0);
        assert!(model.predict_emotion(&s.input).unwrap() < 8);
    }
    for name in [FND_W, FND_B, EMO_W, EMO_B] {
        model.params.get_mut(name).unwrap().fill(0.0);
    }
    for s in &batch.source {
        assert_eq!(model.predict_veracity(&s.input).unwrap(), 0.5);
        assert_eq!(model.predict_emotion(&s.input).unwrap(), 0);
    }
    let stl = with_shared_weights(&model, NONDA_STL);
    assert!(matches!(stl.predict_emotion(&batch.source[0].input), Err(Error::VariantMismatch { .. })));
}

#[test]
fn checkpoint_round_trip() {
    for variant in Variant::ALL {
        let (model, _, _) = gradcheck_instance(variant, 14).unwrap();
        let bytes = model.to_bytes().unwrap();
        let back = MtlModel::load(bytes.as_slice()).unwrap();
        assert_eq!(back.variant(), variant);
        assert_eq!(back.vocab(), model.vocab());
        assert_eq!(back.dims(), model.dims());
        assert_eq!(back.to_bytes().unwrap(), bytes);
    }
}

#[test]
fn checkpoint_layout_must_match_header() {
    let (model, _, _) = gradcheck_instance(DA_MTL_P, 15).unwrap();
    let mut wrong = model.clone();
    wrong.variant = NONDA_STL;
    let bytes = wrong.to_bytes().unwrap();
    assert!(MtlModel::load(bytes.as_slice()).is_err());
}
