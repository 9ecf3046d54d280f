use crate::nn::ParamSet;
use crate::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// Adam moment estimates for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    t: u64,
}

impl Adam {
    pub fn new(params: &ParamSet) -> Self {
        let zeros = || params.iter().map(|(_, v, _)| vec![0.0; v.len()]).collect();
        Self {
            m: zeros(),
            v: zeros(),
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One bias-corrected Adam update from the gradients stored in `params`.
    pub fn step(&mut self, params: &mut ParamSet, lr: f64) -> Result<()> {
        if params.len() != self.m.len()
            || params.iter().zip(&self.m).any(|((_, v, _), m)| v.len() != m.len())
        {
            return Err(Error::shape("adam state", self.m.len(), params.len()));
        }
        self.t += 1;
        let bc1 = 1.0 - BETA1.powi(self.t as i32);
        let bc2 = 1.0 - BETA2.powi(self.t as i32);
        for (((_, value, grad), m), v) in params.iter_mut().zip(&mut self.m).zip(&mut self.v) {
            for (((p, &g), m), v) in value.data_mut().iter_mut().zip(grad.data()).zip(m).zip(v) {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                *p -= lr * m_hat / (v_hat.sqrt() + EPSILON);
            }
        }
        Ok(())
    }
}

/// Rescales gradients so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_grad_norm(params: &mut ParamSet, max_norm: f64) -> f64 {
    let norm = params.grad_norm();
    if norm > max_norm {
        params.scale_grads(max_norm / norm);
    }
    norm
}
