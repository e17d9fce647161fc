//! Numerical laboratory for planar Coulomb gases and random zeros.
//!
//! The crate implements, samples, and cross-verifies the machinery around
//! hole events in planar particle systems:
//!
//! * [`measures`] — radial-measure algebra: logarithmic potentials and
//!   energies, large-deviation functionals, closed-form constrained
//!   minimizers, count-fluctuation rate formulas.
//! * [`samplers`] — exact generation of Ginibre eigenvalues, Kostlan radii,
//!   GUE spectra, Weyl-polynomial and truncated-GEF zeros.
//! * [`conditional`] — exact conditional analysis of the round Ginibre hole
//!   (hole probabilities, conditional intensity, annulus counts).
//! * [`gefhole`] — coefficient-suppression events realizing a hole for the
//!   Gaussian entire function, with certified conditional sampling.
//! * [`mcmc`] — constrained Metropolis–Hastings for conditional ensembles.
//! * [`fekete`] — weighted Fekete/Leja configurations and numeric
//!   constrained-energy rates for general holes.
//! * [`oned`] — one-dimensional companions (semicircle, gap density,
//!   log-gas rate functional).
//!
//! Everything is deterministic given a seed; see [`rng_stream`].

pub mod acceptance;
pub mod conditional;
mod error;
pub mod fekete;
pub mod gefhole;
pub mod linalg;
pub mod mcmc;
pub mod measures;
pub mod oned;
pub mod quad;
pub mod samplers;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use samplers::PointConfiguration;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Derive an independent RNG stream for a replica index from a base seed.
///
/// Parallel replicas must not share a stream; each gets the same seed on a
/// distinct ChaCha stream counter.
pub fn rng_stream(seed: u64, replica: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}
