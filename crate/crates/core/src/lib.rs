//! Outage capacity of incremental decode-and-forward relaying in slow
//! Rayleigh fading at low SNR.
//!
//! The crate is split along the lines of the analysis:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`channel`] | geometry, path-loss variances, reproducible block-fading samples |
//! | [`analytic`] | thresholds, low-SNR outage constants, ε-outage capacities, relay placement, exact finite-SNR outage |
//! | [`simulator`] | trial-level Monte Carlo of the incremental-relaying protocol and the cut-set bound |
//! | [`solver`] | capacity inversion by bisection, placement by golden-section search |
//! | [`cli`] | parameter sweeps, key-value configs and CSV/JSON reports |
//!
//! All rates are in bits per channel use and all SNRs are linear unless a
//! name says `_db`.

pub mod analytic;
pub mod channel;
pub mod cli;
mod error;
pub mod simulator;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
