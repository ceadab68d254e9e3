//! Non-backtracking spectra of random graphs with a prescribed degree
//! distribution.
//!
//! The crate samples configuration-model graphs, estimates the Perron
//! eigenvalue of their non-backtracking operator, simulates the unimodular
//! Galton-Watson tree that describes their local limit, and turns a sampled
//! graph into an explicit finitely generated subgroup of a free group whose
//! growth rate equals that eigenvalue.
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`degree_model`] | degree distributions, target-α inversion, degree sequences |
//! | [`graph`] | half-edge multigraphs and the edge-list text format |
//! | [`config_sampler`] | uniform matchings, simple-graph rejection, exploration, tangle-free checks |
//! | [`nb_spectral`] | the non-backtracking operator, power iteration, Ihara-Bass oracle, walk counts |
//! | [`ugw_sim`] | Galton-Watson generation sizes, martingale and tail statistics, the `Q_ℓ` functional |
//! | [`stallings`] | regular completion, 2-factorization, immersion labels, subgroup bases, folding |
//! | [`experiments`] | the seeded experiment drivers behind the `nbgrowth` CLI |

pub mod config_sampler;
pub mod degree_model;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod nb_spectral;
pub mod par;
pub mod seed;
pub mod stallings;
pub mod ugw_sim;

pub use error::{Error, Result};
