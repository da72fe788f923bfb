pub mod classify;
pub mod error;
pub mod factor;
pub mod numeric;
pub mod rational;
pub mod residue;
pub mod sequence;
mod serde_util;
pub mod witness;
pub mod zsigmondy;

pub use error::{Error, Result};
pub use rational::Rational;
