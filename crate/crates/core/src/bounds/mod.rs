//! Lower bounds on the optimal maximum response time.
//!
//! [`interval_lower_bound`] is the cheap per-node counting bound; the
//! [`oracle`] submodule computes true optima by exhaustive search on small
//! instances.

pub mod oracle;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::model::{Instance, NodeId, Round};
use crate::rational::{ceil_u64, Rational};

pub use oracle::{oracle_feasible, oracle_optimal, Objective, OracleConfig, OracleError, OracleResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub node: NodeId,
    pub t1: Round,
    pub t2: Round,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalBound {
    /// Reported bound, clamped below at 1.
    pub value: Rational,
    /// Unclamped maximum (may be below 1 for sparse arrivals).
    pub raw: Rational,
    /// Maximizer, first in `(node, t1, t2)` order. `None` when there are no jobs.
    pub witness: Option<Witness>,
}

/// `L = max_{i, t1 <= t2} { (1/c_i) sum_{t1 <= r_j <= t2, j ∋ i} d_j - (t2 - t1 + 1) } + 1`.
///
/// Only rounds with arrivals at `i` can be interval endpoints of a maximizer,
/// so each node costs quadratic time in its number of distinct arrival rounds.
pub fn interval_lower_bound(inst: &Instance) -> IntervalBound {
    let n = inst.node_count();
    let mut per_node: Vec<Vec<(Round, Rational)>> = vec![Vec::new(); n];
    for job in inst.jobs() {
        for node in job.nodes() {
            per_node[node].push((job.release, job.demand.clone()));
        }
    }

    let mut best: Option<(Rational, Witness)> = None;
    for (node, arrivals) in per_node.iter_mut().enumerate() {
        if arrivals.is_empty() {
            continue;
        }
        arrivals.sort_by_key(|(r, _)| *r);
        let mut rounds: Vec<Round> = Vec::new();
        let mut sums: Vec<Rational> = Vec::new();
        for (r, d) in arrivals.drain(..) {
            if rounds.last() == Some(&r) {
                *sums.last_mut().unwrap() += d;
            } else {
                rounds.push(r);
                sums.push(d);
            }
        }
        let cap = inst.capacity(node);
        let mut prefix = vec![Rational::zero()];
        for s in &sums {
            let next = prefix.last().unwrap() + s;
            prefix.push(next);
        }
        for a in 0..rounds.len() {
            for b in a..rounds.len() {
                let load = (&prefix[b + 1] - &prefix[a]) / cap;
                let len = Rational::from_integer(BigInt::from(rounds[b] - rounds[a] + 1));
                let val = load - len;
                if best.as_ref().is_none_or(|(v, _)| val > *v) {
                    best = Some((
                        val,
                        Witness {
                            node,
                            t1: rounds[a],
                            t2: rounds[b],
                        },
                    ));
                }
            }
        }
    }

    match best {
        Some((val, witness)) => {
            let raw = val + Rational::one();
            let value = if raw < Rational::one() {
                Rational::one()
            } else {
                raw.clone()
            };
            IntervalBound {
                value,
                raw,
                witness: Some(witness),
            }
        }
        None => IntervalBound {
            value: Rational::one(),
            raw: Rational::one(),
            witness: None,
        },
    }
}

/// Termination guard `4 * (last release + ceil(L) * m + 1)`.
pub fn default_max_rounds(inst: &Instance) -> Round {
    let l = ceil_u64(&interval_lower_bound(inst).value);
    4 * (inst.last_release() + l * inst.job_count() as u64 + 1)
}
