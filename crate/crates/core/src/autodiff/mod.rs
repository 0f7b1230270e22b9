//! Minimal dense reverse-mode differentiation engine.
//!
//! Everything the predictor needs — matrix products, the pointwise
//! nonlinearities of the gated graph encoder, softmax attention, and the
//! training loss — is recorded on a [`Tape`] and differentiated by a single
//! reverse sweep. Nothing else in the crate computes gradients.
//!
//! The engine is generic over the scalar type through [`Scalar`]; the
//! pipeline itself runs on `f64` (see the `DTensor`/`DTape` aliases at the
//! crate root).

mod checkpoint;
pub mod gradcheck;
mod params;
mod tape;
mod tensor;

pub use checkpoint::{load_params, save_params, Checkpoint};
pub use params::{BoundParams, Param, ParamStore};
pub use tape::{Tape, ValueId};
pub use tensor::Tensor;

use std::fmt::{Debug, Display};

/// Scalar types the engine can run on.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + Debug + Display + Default + 'static
{
    /// Clamp floor used by the cross-entropy op.
    fn bce_epsilon() -> Self {
        Self::from_f64(1e-9).unwrap()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
