//! Wiener filtering, Richardson-Lucy, robust and regularized RL (RRRL) and
//! the combined Wiener + RRRL pipeline.

mod iteration;
mod lut;
mod operator;
mod parallel;
mod pipeline;
mod regularizer;

pub use iteration::{rl_step, robust_weight, rrrl_step, SharpeningState, DIVISION_GUARD};
pub use lut::{r1_direct, DivergenceLut, LUT_MAX, LUT_MIN};
pub use operator::{BlurOperator, BoxBlur, Convolver, FourierBlur1D, FourierBlur2D, SpatialBlur};
pub use parallel::rrrl_deblur_parallel;
pub use pipeline::{wiener_1d, wiener_2d, wr3l, Deconvolver, Scenario, StageTimes};
pub use regularizer::{diffusion_term, tv_energy};
