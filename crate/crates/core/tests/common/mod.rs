//! Reference computations written independently of the library internals.
#![allow(dead_code)]

use std::collections::BTreeMap;

use ecfs::model::{Instance, Schedule};
use ecfs::Rational;
use num_traits::{One, Zero};

/// Interval bound by direct enumeration of every `1 <= t1 <= t2 <= last release`.
pub fn brute_interval_bound(inst: &Instance) -> Rational {
    let last = inst.last_release();
    let mut best: Option<Rational> = None;
    for node in 0..inst.node_count() {
        for t1 in 1..=last {
            for t2 in t1..=last {
                let mut sum = Rational::zero();
                for j in inst.jobs() {
                    if j.touches(node) && (t1..=t2).contains(&j.release) {
                        sum += &j.demand;
                    }
                }
                let v = sum / inst.capacity(node) - Rational::from_integer((t2 - t1 + 1).into())
                    + Rational::one();
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    }
    best.map_or_else(Rational::one, |b| b.max(Rational::one()))
}

/// Executed load at every (round, node).
pub fn executed_loads(inst: &Instance, sched: &Schedule) -> BTreeMap<(u64, usize), Rational> {
    let mut loads = BTreeMap::new();
    for a in sched.assignments() {
        let j = inst.job(a.job);
        for node in [j.endpoints.0, j.endpoints.1] {
            *loads.entry((a.round, node)).or_insert_with(Rational::zero) += &j.demand * &a.fraction;
        }
    }
    loads
}

/// Largest ratio of executed load to capacity over all rounds and nodes.
pub fn max_load_ratio(inst: &Instance, sched: &Schedule) -> Rational {
    executed_loads(inst, sched)
        .into_iter()
        .map(|((_, node), load)| load / inst.capacity(node))
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Response time of every job, `None` if some job never completes.
pub fn responses(inst: &Instance, sched: &Schedule) -> Option<Vec<u64>> {
    let mut done = vec![Rational::zero(); inst.job_count()];
    let mut finish = vec![None; inst.job_count()];
    let mut rows: Vec<_> = sched.assignments().iter().collect();
    rows.sort_by_key(|a| a.round);
    for a in rows {
        done[a.job] += &a.fraction;
        if finish[a.job].is_none() && done[a.job] >= Rational::one() {
            finish[a.job] = Some(a.round);
        }
    }
    finish
        .iter()
        .zip(inst.jobs())
        .map(|(f, j)| f.map(|c| c - j.release + 1))
        .collect()
}

pub fn max_response(inst: &Instance, sched: &Schedule) -> u64 {
    responses(inst, sched)
        .expect("every job completes")
        .into_iter()
        .max()
        .unwrap_or(0)
}

/// Every assignment is a whole job and no job runs twice.
pub fn is_nonsplitting(sched: &Schedule) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    sched
        .assignments()
        .iter()
        .all(|a| a.fraction.is_one() && seen.insert(a.job))
}

pub fn ceil(r: &Rational) -> u64 {
    r.ceil().to_integer().try_into().unwrap()
}
