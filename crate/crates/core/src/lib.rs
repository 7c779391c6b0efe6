//! Environment-side dynamical decoupling: Lindblad engine, stationary and
//! Floquet adiabatic elimination, and closed-form rates for a driven
//! two-level environment.

pub mod control;
pub mod error;
pub mod exec;
pub mod floquet;
pub mod linalg;
pub mod lindblad;
pub mod ops;
pub mod qdd;
pub mod random;
pub mod stationary;

pub use error::{Error, Result, Warning};
