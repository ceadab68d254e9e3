//! Configuration-model sampling.
//!
//! A uniform perfect matching of the half-edges of a degree sequence gives the
//! uniform random multigraph with those degrees. Conditioning on simplicity
//! by rejection gives the uniform simple graph with those degrees.

mod explore;
mod tangle;

pub use explore::{explore_neighborhood, Exploration, ExplorationState, Explorer, HalfEdgeStatus, Root};
pub use tangle::{ball_cycle_rank, tangle_free_check};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::degree_model::{erdos_gallai_check, DegreeSequence};
use crate::error::{Error, Result};
use crate::graph::{Graph, MultiGraph};
use crate::seed;

pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

/// Uniform matching of the half-edges of `seq`, seeded.
pub fn sample_matching(seq: &DegreeSequence, seed: u64) -> Result<MultiGraph> {
    sample_matching_with(seq, &mut seed::rng(seed))
}

/// Shuffles the half-edges and pairs consecutive entries; every one of the
/// `(N−1)!!` matchings is equally likely.
pub fn sample_matching_with<R: Rng + ?Sized>(seq: &DegreeSequence, rng: &mut R) -> Result<MultiGraph> {
    let total = seq.half_edges();
    if !total.is_multiple_of(2) {
        return Err(Error::Parity(format!("{total} half-edges cannot be matched")));
    }
    let mut order: Vec<u32> = (0..total as u32).collect();
    order.shuffle(rng);
    let mut partner = vec![0u32; total];
    for pair in order.chunks_exact(2) {
        partner[pair[0] as usize] = pair[1];
        partner[pair[1] as usize] = pair[0];
    }
    MultiGraph::from_matching(seq, partner)
}

pub fn is_simple(g: &MultiGraph) -> bool {
    g.is_simple()
}

#[derive(Debug, Clone, Serialize)]
pub struct SimpleSample {
    #[serde(skip)]
    pub graph: Graph,
    /// Matchings drawn, the accepted one included.
    pub attempts: usize,
}

/// Rejection sampler for the uniform simple graph with degrees `seq`.
pub fn sample_simple(seq: &DegreeSequence, seed: u64, max_attempts: usize) -> Result<SimpleSample> {
    sample_simple_with(seq, &mut seed::rng(seed), max_attempts)
}

pub fn sample_simple_with<R: Rng + ?Sized>(
    seq: &DegreeSequence,
    rng: &mut R,
    max_attempts: usize,
) -> Result<SimpleSample> {
    if !erdos_gallai_check(seq) {
        return Err(Error::Precondition(
            "degree sequence is not graphic".into(),
        ));
    }
    for attempt in 1..=max_attempts {
        let g = sample_matching_with(seq, rng)?;
        if g.is_simple() {
            return Ok(SimpleSample {
                graph: Graph::try_from(g)?,
                attempts: attempt,
            });
        }
    }
    Err(Error::SamplingExhausted {
        attempts: max_attempts,
    })
}
