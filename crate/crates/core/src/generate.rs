//! Seeded random instances and multigraphs for property tests and sweeps.

use std::ops::RangeInclusive;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::MultiGraph;
use crate::model::{Instance, JobSpec};
use crate::rational::int;

#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub nodes: RangeInclusive<usize>,
    pub jobs: RangeInclusive<usize>,
    /// Integer demands drawn from `1..=max_demand`.
    pub max_demand: u64,
    /// Integer capacities drawn from `1..=max_capacity`.
    pub max_capacity: u64,
    /// Releases drawn from `1..=max_release`.
    pub max_release: u64,
}

impl RandomSpec {
    pub fn unit(nodes: RangeInclusive<usize>, jobs: RangeInclusive<usize>, max_release: u64) -> Self {
        RandomSpec {
            nodes,
            jobs,
            max_demand: 1,
            max_capacity: 1,
            max_release,
        }
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Instance {
    let n = rng.gen_range(spec.nodes.clone()).max(2);
    let m = rng.gen_range(spec.jobs.clone());
    let caps = (0..n)
        .map(|_| int(rng.gen_range(1..=spec.max_capacity) as i64))
        .collect();
    let jobs = (0..m)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            let d = rng.gen_range(1..=spec.max_demand) as i64;
            JobSpec::new(u, v, int(d), rng.gen_range(1..=spec.max_release))
        })
        .collect();
    Instance::new(caps, jobs).expect("generated instance is well formed")
}

/// `count` instances from a fixed seed.
pub fn corpus(seed: u64, count: usize, spec: &RandomSpec) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, spec)).collect()
}

/// Multigraph on `2..=max_nodes` nodes with `0..=max_edges` edges, parallel
/// edges allowed.
pub fn random_multigraph<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> MultiGraph {
    let n = rng.gen_range(2..=max_nodes.max(2));
    let m = rng.gen_range(0..=max_edges);
    MultiGraph::new((0..m).map(|id| {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        (id, u, v)
    }))
    .expect("no self-loops by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible() {
        let spec = RandomSpec {
            nodes: 2..=6,
            jobs: 0..=30,
            max_demand: 3,
            max_capacity: 3,
            max_release: 8,
        };
        assert_eq!(corpus(7, 5, &spec), corpus(7, 5, &spec));
        let unit = corpus(1, 20, &RandomSpec::unit(2..=5, 1..=10, 4));
        assert!(unit.iter().all(Instance::is_unit));
    }
}
