//! Classification and certificates for Lane-Emden systems driven by Hardy
//! operators `L_mu = -Δ + mu |x|^-2` on punctured balls:
//!
//! ```text
//! L_mu1 u >= v^p,   L_mu2 v >= u^q   in B \ {0}
//! ```
//!
//! The crate decides, for `(N, mu1, mu2, p, q)`, whether positive
//! supersolutions are ruled out, constructed, or left open, and produces
//! checkable evidence for each verdict.

pub mod classify;
pub mod cli;
pub mod construction;
pub mod error;
pub mod exponent;
pub mod integrability;
pub mod iteration;
pub mod radial;
pub mod report;

pub use error::{Error, Result};
