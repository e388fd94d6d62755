//! Convolution structures of Chébli-Trimèche hypergroups.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod kernel;
pub mod measure;
pub mod model;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
pub use model::{SturmLiouvilleModel, TransmutationData};
