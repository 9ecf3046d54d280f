//! Single-layer LSTM over a masked sequence.
//!
//! ```text
//! i = sigmoid(W_i x + U_i h + b_i)      f = sigmoid(W_f x + U_f h + b_f)
//! o = sigmoid(W_o x + U_o h + b_o)      g = tanh(W_g x + U_g h + b_g)
//! c' = f * c + i * g                    h' = o * tanh(c')
//! ```
//!
//! Steps with `mask = false` carry `(h, c)` through unchanged. The state
//! starts at zero and the final `h` is returned.

use super::{ops::sigmoid, ParamSet, Tensor2};
use crate::{Error, Result};

/// Gate order used for parameter names and internal arrays.
pub const GATES: [char; 4] = ['i', 'f', 'o', 'g'];

/// Parameter names for an LSTM under `prefix`: `W_*` (hidden x input),
/// `U_*` (hidden x hidden) and `b_*` (hidden x 1) for each gate.
pub fn lstm_param_names(prefix: &str) -> Vec<String> {
    let mut names = Vec::with_capacity(12);
    for kind in ["W", "U", "b"] {
        for gate in GATES {
            names.push(format!("{prefix}{kind}_{gate}"));
        }
    }
    names
}

struct Slots {
    w: [usize; 4],
    u: [usize; 4],
    b: [usize; 4],
}

fn slots(params: &ParamSet, prefix: &str) -> Result<(Slots, usize, usize)> {
    let names = lstm_param_names(prefix);
    let mut idx = [0usize; 12];
    for (k, n) in names.iter().enumerate() {
        idx[k] = params.slot(n)?;
    }
    let slots = Slots {
        w: [idx[0], idx[1], idx[2], idx[3]],
        u: [idx[4], idx[5], idx[6], idx[7]],
        b: [idx[8], idx[9], idx[10], idx[11]],
    };
    let (hidden, input) = params.values[slots.w[0]].shape();
    for k in 0..4 {
        let v = &params.values;
        if v[slots.w[k]].shape() != (hidden, input)
            || v[slots.u[k]].shape() != (hidden, hidden)
            || v[slots.b[k]].shape() != (hidden, 1)
        {
            return Err(Error::shape(
                "lstm parameters",
                format!("W {hidden}x{input}, U {hidden}x{hidden}, b {hidden}x1"),
                format!("inconsistent shapes for gate {}", GATES[k]),
            ));
        }
    }
    Ok((slots, hidden, input))
}

struct Step {
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    /// Activated gates in [`GATES`] order.
    gates: [Vec<f64>; 4],
    tanh_c: Vec<f64>,
}

/// Values saved by [`lstm_forward`] for the backward pass.
pub struct LstmCache {
    prefix: String,
    x: Tensor2,
    steps: Vec<Option<Step>>,
}

/// Runs the recurrence over the rows of `x` (sequence x input dim).
pub fn lstm_forward(
    x: &Tensor2,
    mask: &[bool],
    params: &ParamSet,
    prefix: &str,
) -> Result<(Vec<f64>, LstmCache)> {
    let (s, hidden, input) = slots(params, prefix)?;
    if x.cols() != input {
        return Err(Error::shape("lstm input", input, x.cols()));
    }
    if mask.len() != x.rows() {
        return Err(Error::shape("lstm mask", x.rows(), mask.len()));
    }
    let v = &params.values;
    let mut h = vec![0.0; hidden];
    let mut c = vec![0.0; hidden];
    let mut steps = Vec::with_capacity(x.rows());
    for (t, &on) in mask.iter().enumerate() {
        if !on {
            steps.push(None);
            continue;
        }
        let xt = x.row(t);
        let mut gates: [Vec<f64>; 4] = Default::default();
        for k in 0..4 {
            let mut z = v[s.b[k]].data().to_vec();
            v[s.w[k]].matvec_acc(xt, &mut z);
            v[s.u[k]].matvec_acc(&h, &mut z);
            if k == 3 {
                z.iter_mut().for_each(|a| *a = a.tanh());
            } else {
                z.iter_mut().for_each(|a| *a = sigmoid(*a));
            }
            gates[k] = z;
        }
        let [gi, gf, go, gg] = &gates;
        let c_new: Vec<f64> = (0..hidden).map(|j| gf[j] * c[j] + gi[j] * gg[j]).collect();
        let tanh_c: Vec<f64> = c_new.iter().map(|a| a.tanh()).collect();
        let h_new: Vec<f64> = (0..hidden).map(|j| go[j] * tanh_c[j]).collect();
        let h_prev = std::mem::replace(&mut h, h_new);
        let c_prev = std::mem::replace(&mut c, c_new);
        steps.push(Some(Step {
            h_prev,
            c_prev,
            gates,
            tanh_c,
        }));
    }
    Ok((
        h,
        LstmCache {
            prefix: prefix.to_string(),
            x: x.clone(),
            steps,
        },
    ))
}

/// Backpropagates `dh` (gradient of the final hidden state) through time,
/// accumulating into the LSTM gradient buffers. Returns the gradient with
/// respect to the input rows; masked rows get zeros.
pub fn lstm_backward(cache: &LstmCache, dh_final: &[f64], params: &mut ParamSet) -> Result<Tensor2> {
    let (s, hidden, input) = slots(params, &cache.prefix)?;
    if dh_final.len() != hidden {
        return Err(Error::shape("lstm dh", hidden, dh_final.len()));
    }
    let (values, grads) = (&params.values, &mut params.grads);
    let mut dx = Tensor2::zeros(cache.x.rows(), input);
    let mut dh = dh_final.to_vec();
    let mut dc = vec![0.0; hidden];
    let mut dz: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; hidden]);
    for (t, step) in cache.steps.iter().enumerate().rev() {
        let Some(st) = step else { continue };
        let [gi, gf, go, gg] = &st.gates;
        for j in 0..hidden {
            let d_o = dh[j] * st.tanh_c[j];
            dc[j] += dh[j] * go[j] * (1.0 - st.tanh_c[j] * st.tanh_c[j]);
            let d_i = dc[j] * gg[j];
            let d_g = dc[j] * gi[j];
            let d_f = dc[j] * st.c_prev[j];
            dz[0][j] = d_i * gi[j] * (1.0 - gi[j]);
            dz[1][j] = d_f * gf[j] * (1.0 - gf[j]);
            dz[2][j] = d_o * go[j] * (1.0 - go[j]);
            dz[3][j] = d_g * (1.0 - gg[j] * gg[j]);
            dc[j] *= gf[j];
        }
        let xt = cache.x.row(t);
        let mut dh_prev = vec![0.0; hidden];
        for k in 0..4 {
            grads[s.w[k]].add_outer(&dz[k], xt);
            grads[s.u[k]].add_outer(&dz[k], &st.h_prev);
            grads[s.b[k]].add_assign(&dz[k]);
            values[s.w[k]].matvec_t_acc(&dz[k], dx.row_mut(t));
            values[s.u[k]].matvec_t_acc(&dz[k], &mut dh_prev);
        }
        dh = dh_prev;
    }
    Ok(dx)
}
