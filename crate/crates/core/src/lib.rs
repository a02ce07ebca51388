pub mod alternatives;
pub mod asymptotic;
pub mod bands;
pub mod divergence;
pub mod error;
pub mod exact;
pub mod montecarlo;
pub mod normal;
pub mod quadrature;
pub mod rng;
pub mod sample;
pub mod statistics;

pub use divergence::{DivergenceOrder, KernelValue};
pub use error::{Error, Result};
pub use sample::Sample;
pub use statistics::{StatKind, StatValue};
