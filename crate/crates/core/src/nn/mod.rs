mod adam;
pub mod checkpoint;
mod dense;
mod loss;
mod model;
mod train;

pub use adam::{adam_step, AdamState, Parameters};
pub use dense::{dense_forward, relu, DenseGrad, DenseLayer, Tensor2};
pub use loss::{bce_with_logits_loss, cross_entropy_loss, loss, loss_and_grad, LossKind};
pub use model::{
    model_backward, model_forward, predict, MiddleLayer, ModelKind, ModelParams, ModelSpec, N_OUTPUTS,
};
pub use train::{evaluate, train, EpochRecord, TrainConfig, TrainOutcome};
