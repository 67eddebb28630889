//! Fixed hard instances.

use crate::model::{Instance, JobSpec, Round, Schedule};
use crate::rational::{int, ratio};

use super::AdversaryError;

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;

/// `C` blocks of `2C` rounds on unit nodes `a, b, c, d`. Within a block, each
/// of the first `2C - 1` rounds releases a job on `{a, b}`; the first round
/// also releases one on `{b, c}` and round `C` one on `{a, d}`. The last
/// round of each block is empty.
pub fn gap_instance(c_big: u64) -> Result<Instance, AdversaryError> {
    if c_big < 2 {
        return Err(AdversaryError::Parameter {
            name: "C",
            min: 2,
            value: c_big,
        });
    }
    let mut jobs = Vec::new();
    for s in 0..c_big {
        let base = 2 * c_big * s;
        for t in 1..2 * c_big {
            let r = base + t;
            jobs.push(JobSpec::unit(A, B, r));
            if t == 1 {
                jobs.push(JobSpec::unit(B, C, r));
            }
            if t == c_big {
                jobs.push(JobSpec::unit(A, D, r));
            }
        }
    }
    Ok(Instance::unit_nodes(4, jobs).expect("gap instance is well formed"))
}

/// Hub node 0 of capacity 1 carrying `k` unit jobs and one job of demand
/// `k^2`, all released in round 1. Each job's other endpoint is its own
/// dummy node of capacity `k^2`.
pub fn propalloc_avg_instance(k: u64) -> Result<Instance, AdversaryError> {
    if k < 1 {
        return Err(AdversaryError::Parameter {
            name: "k",
            min: 1,
            value: k,
        });
    }
    let big = (k * k) as i64;
    let mut caps = vec![int(1)];
    caps.extend((0..=k).map(|_| int(big)));
    let mut jobs: Vec<JobSpec> = (1..=k as usize).map(|j| JobSpec::unit(0, j, 1)).collect();
    jobs.push(JobSpec::new(0, k as usize + 1, int(big), 1));
    Ok(Instance::new(caps, jobs).expect("instance is well formed"))
}

/// Unit jobs one per round in rounds `1..=k`, then the big job at `1/k^2`
/// per round over the next `k^2` rounds.
pub fn propalloc_avg_reference(k: u64) -> Schedule {
    let mut s = Schedule::new(false);
    for j in 0..k {
        s.push(j as usize, j + 1, int(1));
    }
    let big = k * k;
    for r in k + 1..=k + big {
        s.push(k as usize, r, ratio(1, big as i64));
    }
    s
}

/// Unit nodes `a, b, c, d`. Job 0 (`j*`) on `{b, d}` with demand 2 in round
/// 1; then in every round `t <= T`, two unit jobs on `{a, b}` if `t` is odd
/// and on `{c, d}` if even.
///
/// The reference schedule runs `j*` at `1/2` in rounds 1 and 2, then the
/// unit jobs in release order, one per side per round.
pub fn sjf_max_instance(t_big: u64) -> Result<(Instance, Schedule), AdversaryError> {
    if t_big < 4 || t_big % 2 == 1 {
        return Err(AdversaryError::Invalid(format!(
            "T must be even and at least 4 (got {t_big})"
        )));
    }
    let mut jobs = vec![JobSpec::new(B, D, int(2), 1)];
    for t in 1..=t_big {
        let (u, v) = if t % 2 == 1 { (A, B) } else { (C, D) };
        jobs.push(JobSpec::unit(u, v, t));
        jobs.push(JobSpec::unit(u, v, t));
    }
    let inst = Instance::unit_nodes(4, jobs).expect("instance is well formed");

    let mut sched = Schedule::new(false);
    sched.push(0, 1, ratio(1, 2));
    sched.push(0, 2, ratio(1, 2));
    let mut pending: Vec<usize> = Vec::new();
    let mut round: Round = 0;
    let mut next = 1;
    while next < inst.job_count() || !pending.is_empty() {
        round += 1;
        while next < inst.job_count() && inst.job(next).release == round {
            pending.push(next);
            next += 1;
        }
        if round <= 2 {
            continue;
        }
        let mut busy = [false; 4];
        pending.retain(|&j| {
            let (u, v) = inst.job(j).endpoints;
            if busy[u] || busy[v] {
                return true;
            }
            busy[u] = true;
            busy[v] = true;
            sched.push(j, round, int(1));
            false
        });
    }
    Ok((inst, sched))
}
