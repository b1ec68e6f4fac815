//! Desk-scale laboratory for emergent localization of receptive fields.
//!
//! A single nonlinear neuron (and small two-layer networks) trained to
//! discriminate correlation lengthscales of structured, non-Gaussian stimuli
//! develops localized first-layer weights. This crate packages the pieces
//! needed to reproduce and probe that phenomenon end to end:
//!
//! - [`stimulus`] — four generator families (Ising chains, nonlinear
//!   Gaussian processes, Gaussian-copula kurtosis-controlled marginals,
//!   elliptical ensembles) with exact statistical oracles.
//! - [`nets`] — the one- and two-layer architectures and batch gradient
//!   descent on the lengthscale discrimination task.
//! - [`flow`] — the amplifier nonlinearity, its cubic Taylor surrogate, and
//!   explicit-Euler integration of the effective weight dynamics.
//! - [`metrics`] — localization measures: inverse participation ratio,
//!   excess kurtosis, sinusoid fits, peak indices.
//! - [`ica`] — a minimal FastICA baseline for the contrast experiments.
//! - [`harness`] — experiment registry, config files, CSV/SVG reports.
//!
//! Runnable demonstrations of each capability live in `examples/`; the
//! `rf-lab` binary exposes the same pipelines as subcommands.

pub mod dft;
pub mod error;
pub mod flow;
pub mod harness;
pub mod ica;
pub mod io;
pub mod metrics;
pub mod nets;
pub mod quad;
pub mod rng;
pub mod stimulus;
pub mod trajectory;

pub use error::{Error, Result};
