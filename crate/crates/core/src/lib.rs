//! Numerical laboratory for gradient descent at the edge of stability.
//!
//! The crate follows three models of increasing size: the single neuron
//! f(x, y) = ℓ(xy), the two-parameter mean model in (A, b), and a small
//! two-layer ReLU network trained on sparse-coding data. The `harness`
//! module runs parameter sweeps over them and fits scaling laws.

// Guards written as `!(x > 0.0)` also reject NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod losses;
pub mod mean_model;
pub mod numerics;
pub mod relu_net;
pub mod single_neuron;

pub use error::{Error, Result};
pub use harness::{run_experiment, ExperimentKind, GridSpec, ScalingFit, SweepConfig, SweepResult};
pub use losses::{LossKind, LossSpec};
pub use single_neuron::{State2D, StopRule, Trajectory2D};
