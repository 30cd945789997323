//! Seeded synthetic workloads: bipartite user-to-identifier graphs with a
//! tunable popularity skew, standing in for sampled production snapshots.
//!
//! Generation is fully deterministic: a fixed spec yields the same edges in
//! the same order on every run and platform (ChaCha8 stream plus explicit
//! inverse-CDF sampling, no platform-dependent hashing in the sampled
//! sequence).

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::etl::{EdgeSnapshot, DEFAULT_EDGE_LABEL, USER_VTYPE};
use crate::graph::{Edge, VertexRef};

/// Shape of a synthetic workload. Identifier popularity follows
/// `weight(rank) = (rank + 1)^-degree_skew`: skew 0 is uniform, larger
/// values concentrate edges on a few hot identifiers the way shared or
/// recycled contact points do in production graphs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n_users: u64,
    pub n_identifiers: u64,
    pub n_edges: u64,
    pub degree_skew: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.degree_skew.is_finite() || self.degree_skew < 0.0 {
            return Err(Error::invalid(format!(
                "degree skew {} must be a finite non-negative number",
                self.degree_skew
            )));
        }
        let max_pairs = self.n_users.checked_mul(self.n_identifiers);
        if let Some(max_pairs) = max_pairs {
            if self.n_edges > max_pairs {
                return Err(Error::invalid(format!(
                    "{} edges requested but only {} distinct user-identifier pairs exist",
                    self.n_edges, max_pairs
                )));
            }
        }
        Ok(())
    }
}

/// Generates the workload as two snapshots, one per identifier type:
/// identifiers alternate between `email` and `phone` by popularity rank, so
/// both types share the skew profile. Edges are distinct pairs; labels are
/// the ingestion default.
pub fn generate(spec: &SyntheticSpec) -> Result<Vec<EdgeSnapshot>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let pairs = sample_pairs(spec, &mut rng);

    let mut email_edges = Vec::new();
    let mut phone_edges = Vec::new();
    for (user, ident) in pairs {
        // Identifier rank -> vertex: even ranks are emails, odd are phones,
        // each type numbered densely from zero.
        let src = VertexRef::new(USER_VTYPE, user);
        if ident % 2 == 0 {
            email_edges.push(Edge::new(
                src,
                VertexRef::new("email", ident / 2),
                DEFAULT_EDGE_LABEL,
            ));
        } else {
            phone_edges.push(Edge::new(
                src,
                VertexRef::new("phone", ident / 2),
                DEFAULT_EDGE_LABEL,
            ));
        }
    }

    let seed = spec.seed;
    Ok(vec![
        EdgeSnapshot::new(format!("synthetic-email-seed{seed}"), "email", email_edges)?,
        EdgeSnapshot::new(format!("synthetic-phone-seed{seed}"), "phone", phone_edges)?,
    ])
}

/// Draws `n_edges` distinct (user, identifier-rank) pairs. Sparse requests
/// use rejection sampling against the skewed popularity distribution; once
/// the request exceeds half of all possible pairs the skew is unattainable
/// anyway and selection falls back to a uniform draw without replacement.
fn sample_pairs(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<(u64, u64)> {
    if spec.n_edges == 0 {
        return Vec::new();
    }
    let max_pairs = spec.n_users.saturating_mul(spec.n_identifiers);
    if spec.n_edges > max_pairs / 2 {
        return dense_sample(spec, rng, max_pairs);
    }

    let popularity = PopularityTable::new(spec.n_identifiers, spec.degree_skew);
    let mut seen: HashSet<(u64, u64)> = HashSet::with_capacity(spec.n_edges as usize);
    let mut pairs = Vec::with_capacity(spec.n_edges as usize);
    while pairs.len() < spec.n_edges as usize {
        let user = rng.random_range(0..spec.n_users);
        let ident = popularity.sample(rng);
        if seen.insert((user, ident)) {
            pairs.push((user, ident));
        }
    }
    pairs
}

fn dense_sample(spec: &SyntheticSpec, rng: &mut ChaCha8Rng, max_pairs: u64) -> Vec<(u64, u64)> {
    let mut all: Vec<(u64, u64)> = (0..max_pairs)
        .map(|i| (i / spec.n_identifiers, i % spec.n_identifiers))
        .collect();
    // Partial Fisher-Yates: after i swaps the prefix is a uniform sample.
    for i in 0..spec.n_edges as usize {
        let j = rng.random_range(i as u64..max_pairs) as usize;
        all.swap(i, j);
    }
    all.truncate(spec.n_edges as usize);
    all
}

/// Inverse-CDF sampler over ranks `0..n` with weight `(rank + 1)^-skew`.
struct PopularityTable {
    cumulative: Vec<f64>,
}

impl PopularityTable {
    fn new(n: u64, skew: f64) -> Self {
        let mut cumulative = Vec::with_capacity(n as usize);
        let mut total = 0.0f64;
        for rank in 0..n {
            total += ((rank + 1) as f64).powf(-skew);
            cumulative.push(total);
        }
        PopularityTable { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        let total = *self.cumulative.last().expect("table is non-empty");
        let needle = rng.random::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= needle) as u64
    }
}
