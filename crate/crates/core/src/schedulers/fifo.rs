use num_traits::{One, Zero};

use crate::model::JobId;
use crate::rational::Rational;
use crate::sim::{Scheduler, SimState};

use super::ParamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FifoParams {
    pub k: u64,
}

impl FifoParams {
    pub fn new(k: u64) -> Result<Self, ParamError> {
        if k == 0 {
            return Err(ParamError::FifoK);
        }
        Ok(FifoParams { k })
    }
}

/// Greedy maximal matching in release order: a pending job runs whole when
/// both endpoints still have room under `factor · c`. The factor is `2 + k`
/// normally, or 1 for the unaugmented variant.
#[derive(Debug, Clone)]
pub struct FifoMatching {
    factor: Rational,
    label: String,
}

impl FifoMatching {
    pub fn new(params: FifoParams) -> Self {
        FifoMatching {
            factor: Rational::from_integer((2 + params.k).into()),
            label: format!("k={}", params.k),
        }
    }

    /// Plain maximal matching with no augmentation.
    pub fn unaugmented() -> Self {
        FifoMatching {
            factor: Rational::one(),
            label: "gamma=1".into(),
        }
    }

    pub fn factor(&self) -> &Rational {
        &self.factor
    }
}

impl Scheduler for FifoMatching {
    fn name(&self) -> &'static str {
        "fifo"
    }

    fn params(&self) -> String {
        self.label.clone()
    }

    fn augmentation(&self) -> Rational {
        self.factor.clone()
    }

    fn nonsplitting(&self) -> bool {
        true
    }

    fn unit_only(&self) -> bool {
        true
    }

    fn schedule_round(&mut self, state: &SimState, _arrivals: &[JobId]) -> Vec<(JobId, Rational)> {
        let mut order: Vec<JobId> = state.pending().map(|(j, _)| j).collect();
        order.sort_by_key(|&j| (state.job(j).release, j));
        let mut load = vec![Rational::zero(); state.nodes().len()];
        let mut out = Vec::new();
        for j in order {
            let job = state.job(j);
            let fits = job
                .nodes()
                .iter()
                .all(|&i| &load[i] + &job.demand <= &self.factor * state.capacity(i));
            if fits {
                for i in job.nodes() {
                    load[i] += &job.demand;
                }
                out.push((j, Rational::one()));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Instance, JobSpec};
    use crate::rational::int;
    use crate::sim::simulate_instance;

    fn star(count: usize) -> Instance {
        let jobs = (0..count).map(|v| JobSpec::unit(0, v + 1, 1)).collect();
        Instance::unit_nodes(count + 1, jobs).unwrap()
    }

    #[test]
    fn three_jobs_fit_at_k1() {
        let inst = star(3);
        let out = simulate_instance(
            &inst,
            FifoMatching::new(FifoParams::new(1).unwrap()),
            int(3),
            None,
        )
        .unwrap();
        assert_eq!(out.rounds, 1);
    }

    #[test]
    fn fourth_job_deferred() {
        let inst = star(4);
        let out = simulate_instance(
            &inst,
            FifoMatching::new(FifoParams::new(1).unwrap()),
            int(3),
            None,
        )
        .unwrap();
        let rounds: Vec<_> = out
            .schedule
            .assignments()
            .iter()
            .map(|a| (a.job, a.round))
            .collect();
        assert_eq!(rounds, vec![(0, 1), (1, 1), (2, 1), (3, 2)]);
    }

    #[test]
    fn release_order_before_id() {
        // job 1 is older than job 0; with one slot on node 0 it goes first
        let inst = Instance::unit_nodes(3, vec![JobSpec::unit(0, 1, 2), JobSpec::unit(0, 2, 1)]).unwrap();
        let out = simulate_instance(&inst, FifoMatching::unaugmented(), int(1), None).unwrap();
        let rounds: Vec<_> = out
            .schedule
            .assignments()
            .iter()
            .map(|a| (a.job, a.round))
            .collect();
        assert_eq!(rounds, vec![(1, 1), (0, 2)]);
    }

    #[test]
    fn empty_pending_set() {
        let inst = Instance::unit_nodes(2, vec![JobSpec::unit(0, 1, 3)]).unwrap();
        let out = simulate_instance(
            &inst,
            FifoMatching::new(FifoParams::new(2).unwrap()),
            int(4),
            None,
        )
        .unwrap();
        assert!(out.history[0].assignments.is_empty());
        assert!(FifoParams::new(0).is_err());
    }
}
