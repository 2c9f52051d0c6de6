//! Entropic bounds on phase-shift estimation error and a Monte Carlo
//! simulator for iterative estimation schemes.
//!
//! Generators are described by their spectra ([`spectra`]), probes by pure
//! amplitudes or density operators ([`states`]). [`asymmetry`] evaluates the
//! G-asymmetry and related entropies, [`bounds`] turns them into error and
//! information bounds, and [`estimator`] simulates schemes that try to
//! reach them.

pub mod asymmetry;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod grammar;
pub mod numerics;
pub mod output;
pub mod spectra;
pub mod states;

pub use error::{Error, Result};
