//! Optimal matchings of the one-dimensional assignment problem with linear
//! cost, and the statistics of their number.
//!
//! For `N` white and `N` black points on a segment matched with cost
//! `Σ |w_i - b_π(i)|`, the set of optimal matchings depends only on the color
//! order of the points. That order is a lattice path ([`paths::SignPath`]),
//! and the number of optimal matchings is a product of step heights
//! ([`matching::count_optimal`]). The remaining modules study the entropy
//! `S = log Z` over uniformly random bridges and excursions: exact finite-size
//! moments ([`counting`]), Monte Carlo sampling ([`sampling`]), the limiting
//! constants ([`asymptotics`]), and brute-force cross-checks ([`oracle`]).

pub mod asymptotics;
pub mod counting;
mod error;
pub mod matching;
pub mod oracle;
pub mod paths;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use matching::{Instance, Matching, OptimalFamily};
pub use paths::{Ensemble, SignPath};
