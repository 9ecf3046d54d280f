use super::Tensor2;
use crate::{Error, Result};

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable softmax (the max logit is subtracted first).
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Row `t` of the output is row `ids[t]` of `table`.
pub fn embed_forward(ids: &[usize], table: &Tensor2) -> Result<Tensor2> {
    let dim = table.cols();
    let mut out = Tensor2::zeros(ids.len(), dim);
    for (t, &id) in ids.iter().enumerate() {
        if id >= table.rows() {
            return Err(Error::OutOfRange {
                context: "embedding",
                index: id,
                limit: table.rows(),
            });
        }
        out.row_mut(t).copy_from_slice(table.row(id));
    }
    Ok(out)
}

/// Scatters `dout` rows back into the embedding gradient.
pub fn embed_backward(ids: &[usize], dout: &Tensor2, grad: &mut Tensor2) -> Result<()> {
    if dout.rows() != ids.len() || dout.cols() != grad.cols() {
        return Err(Error::shape(
            "embed_backward",
            format!("{}x{}", ids.len(), grad.cols()),
            format!("{}x{}", dout.rows(), dout.cols()),
        ));
    }
    for (t, &id) in ids.iter().enumerate() {
        if id >= grad.rows() {
            return Err(Error::OutOfRange {
                context: "embedding",
                index: id,
                limit: grad.rows(),
            });
        }
        for (g, d) in grad.row_mut(id).iter_mut().zip(dout.row(t)) {
            *g += d;
        }
    }
    Ok(())
}

fn check_affine(h: &[f64], w: &Tensor2, b: &Tensor2) -> Result<()> {
    if w.cols() != h.len() {
        return Err(Error::shape("affine input", w.cols(), h.len()));
    }
    if b.shape() != (w.rows(), 1) {
        return Err(Error::shape("affine bias", format!("{}x1", w.rows()), format!("{}x{}", b.rows(), b.cols())));
    }
    Ok(())
}

/// `W h + b`, with `b` stored as a column.
pub fn affine_forward(h: &[f64], w: &Tensor2, b: &Tensor2) -> Result<Vec<f64>> {
    check_affine(h, w, b)?;
    let mut out = b.data().to_vec();
    w.matvec_acc(h, &mut out);
    Ok(out)
}

/// Accumulates `dW += dout h^T`, `db += dout` and returns `dh = W^T dout`.
pub fn affine_backward(
    h: &[f64],
    w: &Tensor2,
    dout: &[f64],
    grad_w: &mut Tensor2,
    grad_b: &mut Tensor2,
) -> Result<Vec<f64>> {
    if dout.len() != w.rows() {
        return Err(Error::shape("affine_backward", w.rows(), dout.len()));
    }
    if grad_w.shape() != w.shape() || grad_b.shape() != (w.rows(), 1) || h.len() != w.cols() {
        return Err(Error::shape("affine_backward", "matching gradient buffers", "mismatch"));
    }
    grad_w.add_outer(dout, h);
    grad_b.add_assign(dout);
    let mut dh = vec![0.0; h.len()];
    w.matvec_t_acc(dout, &mut dh);
    Ok(dh)
}

/// Cross-entropy of `softmax(logits)` against `target`; returns the loss and
/// `p - onehot(target)`.
pub fn softmax_ce(logits: &[f64], target: usize) -> Result<(f64, Vec<f64>)> {
    if target >= logits.len() {
        return Err(Error::OutOfRange {
            context: "softmax target",
            index: target,
            limit: logits.len(),
        });
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_total = logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    let loss = (log_total - (logits[target] - max)).max(0.0);
    let mut grad = softmax(logits);
    grad[target] -= 1.0;
    Ok((loss, grad))
}

/// Binary cross-entropy on a logit, in the overflow-free form
/// `max(z, 0) - z y + ln(1 + e^{-|z|})`. `target` is 0 or 1.
pub fn sigmoid_bce(logit: f64, target: f64) -> (f64, f64) {
    let loss = logit.max(0.0) - logit * target + (-logit.abs()).exp().ln_1p();
    (loss.max(0.0), sigmoid(logit) - target)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrlConfig {
    pub lambda: f64,
}

impl GrlConfig {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Config(format!("GRL lambda must be finite and >= 0, got {lambda}")));
        }
        Ok(Self { lambda })
    }
}

/// Gradient reversal: identity forward, `-lambda * g` backward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grl {
    cfg: GrlConfig,
}

impl Grl {
    pub fn new(cfg: GrlConfig) -> Self {
        Self { cfg }
    }

    pub fn lambda(&self) -> f64 {
        self.cfg.lambda
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }

    pub fn backward(&self, upstream: &[f64]) -> Vec<f64> {
        upstream.iter().map(|g| -(self.cfg.lambda * g)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    const H: f64 = 1e-5;

    fn rel_err(a: f64, n: f64) -> f64 {
        (a - n).abs() / n.abs().max(1.0)
    }

    fn central(mut f: impl FnMut(f64) -> f64, x: f64) -> f64 {
        (f(x + H) - f(x - H)) / (2.0 * H)
    }

    fn random_tensor(rng: &mut SplitMix64, r: usize, c: usize) -> Tensor2 {
        Tensor2::from_vec(r, c, (0..r * c).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap()
    }

    #[test]
    fn embed_rows() {
        let e = Tensor2::identity(2);
        assert_eq!(embed_forward(&[0], &e).unwrap().data(), &[1.0, 0.0]);
        let e = Tensor2::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(embed_forward(&[1, 1], &e).unwrap().data(), &[3.0, 4.0, 3.0, 4.0]);
        assert!(embed_forward(&[2], &e).is_err());
    }

    #[test]
    fn embed_gradient_counts_occurrences() {
        let mut rng = SplitMix64::new(11);
        let table = random_tensor(&mut rng, 5, 3);
        let ids = [4, 1, 4, 0, 4];
        let out = embed_forward(&ids, &table).unwrap();
        let mut ones = out.clone();
        ones.fill(1.0);
        let mut grad = Tensor2::zeros(5, 3);
        embed_backward(&ids, &ones, &mut grad).unwrap();
        for k in 0..5 {
            let count = ids.iter().filter(|&&i| i == k).count() as f64;
            for c in 0..3 {
                assert_eq!(grad.get(k, c), count);
                let numeric = central(
                    |v| {
                        let mut t = table.clone();
                        t.set(k, c, v);
                        embed_forward(&ids, &t).unwrap().data().iter().sum()
                    },
                    table.get(k, c),
                );
                assert!(rel_err(grad.get(k, c), numeric) < 1e-6);
            }
        }
    }

    #[test]
    fn affine_closed_forms() {
        let h = [0.5, -1.5];
        let zero = Tensor2::zeros(2, 1);
        assert_eq!(affine_forward(&h, &Tensor2::identity(2), &zero).unwrap(), h.to_vec());
        let b = Tensor2::column(&[1.0, 2.0, 3.0]).unwrap();
        let w = Tensor2::from_rows(&[&[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]).unwrap();
        assert_eq!(affine_forward(&[0.0, 0.0], &w, &b).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(affine_forward(&[1.0], &w, &b).is_err());
    }

    #[test]
    fn affine_gradient_matches_finite_differences() {
        let mut rng = SplitMix64::new(5);
        let w = random_tensor(&mut rng, 3, 4);
        let b = random_tensor(&mut rng, 3, 1);
        let h: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let coef: Vec<f64> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
        // Scalar objective: coef . (W h + b).
        let objective = |w: &Tensor2, b: &Tensor2, h: &[f64]| -> f64 {
            affine_forward(h, w, b).unwrap().iter().zip(&coef).map(|(y, c)| y * c).sum()
        };
        let mut gw = Tensor2::zeros(3, 4);
        let mut gb = Tensor2::zeros(3, 1);
        let dh = affine_backward(&h, &w, &coef, &mut gw, &mut gb).unwrap();
        for r in 0..3 {
            for c in 0..4 {
                let n = central(|v| { let mut t = w.clone(); t.set(r, c, v); objective(&t, &b, &h) }, w.get(r, c));
                assert!(rel_err(gw.get(r, c), n) < 1e-6);
            }
            let n = central(|v| { let mut t = b.clone(); t.set(r, 0, v); objective(&w, &t, &h) }, b.get(r, 0));
            assert!(rel_err(gb.get(r, 0), n) < 1e-6);
        }
        for i in 0..4 {
            let n = central(|v| { let mut x = h.clone(); x[i] = v; objective(&w, &b, &x) }, h[i]);
            assert!(rel_err(dh[i], n) < 1e-6);
        }
    }

    #[test]
    fn softmax_ce_closed_forms() {
        let (loss, _) = softmax_ce(&[0.3; 6], 2).unwrap();
        assert!((loss - 6f64.ln()).abs() < 1e-12);
        assert!((loss - 1.791759469228055).abs() < 1e-12);
        let (loss, grad) = softmax_ce(&[1000.0, -1000.0], 0).unwrap();
        assert!(loss.is_finite() && loss.abs() < 1e-12);
        assert!(grad.iter().all(|g| g.is_finite()));
        assert!(softmax_ce(&[0.0, 0.0], 2).is_err());
    }

    #[test]
    fn softmax_ce_gradient() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..20 {
            let k = 2 + rng.below(7);
            let logits: Vec<f64> = (0..k).map(|_| rng.uniform(-3.0, 3.0)).collect();
            let target = rng.below(k);
            let (_, grad) = softmax_ce(&logits, target).unwrap();
            for i in 0..k {
                let n = central(|v| { let mut z = logits.clone(); z[i] = v; softmax_ce(&z, target).unwrap().0 }, logits[i]);
                assert!(rel_err(grad[i], n) < 1e-6);
            }
        }
    }

    #[test]
    fn sigmoid_bce_closed_forms() {
        for y in [0.0, 1.0] {
            let (loss, grad) = sigmoid_bce(0.0, y);
            assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
            assert_eq!(grad, 0.5 - y);
        }
        let (loss, grad) = sigmoid_bce(1000.0, 1.0);
        assert!(loss.abs() < 1e-12 && grad.abs() < 1e-12);
        let (loss, _) = sigmoid_bce(-1000.0, 0.0);
        assert!(loss.abs() < 1e-12);
        let (loss, _) = sigmoid_bce(-1000.0, 1.0);
        assert!((loss - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn sigmoid_bce_gradient() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..50 {
            let z = rng.uniform(-8.0, 8.0);
            let y = if rng.bernoulli(0.5) { 1.0 } else { 0.0 };
            let n = central(|v| sigmoid_bce(v, y).0, z);
            assert!(rel_err(sigmoid_bce(z, y).1, n) < 1e-6);
        }
    }

    #[test]
    fn grl_contract() {
        let grl = |l| Grl::new(GrlConfig::new(l).unwrap());
        assert_eq!(grl(1.0).backward(&[1.0, -2.0]), vec![-1.0, 2.0]);
        assert_eq!(grl(0.0).backward(&[3.0, -7.0]), vec![0.0, 0.0]);
        assert_eq!(grl(0.5).backward(&[4.0]), vec![-2.0]);
        let x = [0.1, -0.0, f64::MIN_POSITIVE, 1e300];
        let y = grl(2.0).forward(&x);
        assert!(x.iter().zip(&y).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(GrlConfig::new(-0.1).is_err());
        assert!(GrlConfig::new(f64::NAN).is_err());
    }

    proptest::proptest! {
        #[test]
        fn softmax_is_a_distribution(logits in proptest::collection::vec(-15.0f64..15.0, 2..10)) {
            let p = softmax(&logits);
            let total: f64 = p.iter().sum();
            proptest::prop_assert!((total - 1.0).abs() <= 1e-9);
            proptest::prop_assert!(p.iter().all(|&x| x > 0.0 && x < 1.0));
        }

        #[test]
        fn losses_nonnegative(
            logits in proptest::collection::vec(-1e3f64..1e3, 1..10),
            t in 0usize..10,
            z in -1e3f64..1e3,
            y in proptest::bool::ANY,
        ) {
            let t = t % logits.len();
            let (ce, g) = softmax_ce(&logits, t).unwrap();
            proptest::prop_assert!(ce >= 0.0 && ce.is_finite());
            proptest::prop_assert!(g.iter().all(|v| v.is_finite()));
            let (bce, gz) = sigmoid_bce(z, if y { 1.0 } else { 0.0 });
            proptest::prop_assert!(bce >= 0.0 && bce.is_finite() && gz.is_finite());
        }

        #[test]
        fn grl_backward_is_exact(g in proptest::collection::vec(-1e6f64..1e6, 0..8), lambda in 0.0f64..10.0) {
            let grl = Grl::new(GrlConfig::new(lambda).unwrap());
            let back = grl.backward(&g);
            for (b, x) in back.iter().zip(&g) {
                proptest::prop_assert_eq!(b.to_bits(), (-(lambda * x)).to_bits());
            }
        }
    }
}
