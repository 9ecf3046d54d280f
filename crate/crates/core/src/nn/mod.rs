//! Minimal differentiable-computation core.
//!
//! There is no autodiff graph: every op has a hand-written backward that
//! accumulates into the gradient buffers of a [`ParamSet`]. All arithmetic is
//! `f64`, and [`grad_check`] compares each backward against central finite
//! differences.

mod checkpoint;
mod gradcheck;
mod lstm;
mod ops;
mod params;
mod tensor;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use gradcheck::{grad_check, GradCheckReport, ParamCheck, FD_STEP};
pub use lstm::{lstm_backward, lstm_forward, lstm_param_names, LstmCache, GATES};
pub use ops::{
    affine_backward, affine_forward, embed_backward, embed_forward, sigmoid, sigmoid_bce, softmax,
    softmax_ce, Grl, GrlConfig,
};
pub use params::ParamSet;
pub use tensor::Tensor2;
