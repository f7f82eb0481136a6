//! Construction schemes over ω and its ω-step extensions.
//!
//! The crate computes the unique scheme over ω for a given type, the ordinal
//! metric it induces, capturing, the forcing extension to `γ + ω`, and a
//! collection of derived combinatorial objects, each evaluated exactly on
//! finite fragments.

pub mod capture;
pub mod derived;
pub mod error;
pub mod extension;
pub mod harness;
pub mod metric;
pub mod scheme_core;
pub mod type_system;

pub use error::{Error, Result};
pub use scheme_core::{FinOrdSet, Ordinal, RunSet, SchemeHandle};
pub use type_system::TypeSpec;
