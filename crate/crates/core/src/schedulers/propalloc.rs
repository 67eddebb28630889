use num_traits::{One, Zero};

use crate::model::JobId;
use crate::rational::{Frac, Rational};
use crate::sim::{Scheduler, SimState};

use super::{check_epsilon, ParamError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropAllocParams {
    pub epsilon: Rational,
}

impl PropAllocParams {
    /// `ε = 0` is accepted for experiments without augmentation; no guarantee
    /// applies to it.
    pub fn new(epsilon: Rational) -> Result<Self, ParamError> {
        check_epsilon(&epsilon)?;
        Ok(PropAllocParams { epsilon })
    }
}

/// Every pending job gets `(1+ε) · min_i c_i / Σ_{j' ∈ J(i,t)} d_{j'}` of
/// itself per round, the sum running over *full* demands of the jobs pending
/// on endpoint `i`.
#[derive(Debug, Clone)]
pub struct ProportionalAllocation {
    params: PropAllocParams,
}

impl ProportionalAllocation {
    pub fn new(params: PropAllocParams) -> Self {
        ProportionalAllocation { params }
    }
}

impl Scheduler for ProportionalAllocation {
    fn name(&self) -> &'static str {
        "propalloc"
    }

    fn params(&self) -> String {
        format!("eps={}", Frac(&self.params.epsilon))
    }

    fn augmentation(&self) -> Rational {
        Rational::one() + &self.params.epsilon
    }

    fn schedule_round(&mut self, state: &SimState, _arrivals: &[JobId]) -> Vec<(JobId, Rational)> {
        let mut demand_on = vec![Rational::zero(); state.nodes().len()];
        for (j, _) in state.pending() {
            let job = state.job(j);
            for i in job.nodes() {
                demand_on[i] += &job.demand;
            }
        }
        let scale = self.augmentation();
        state
            .pending()
            .map(|(j, rem)| {
                let job = state.job(j);
                let share = job
                    .nodes()
                    .iter()
                    .map(|&i| state.capacity(i) / &demand_on[i])
                    .min()
                    .unwrap();
                let x = &scale * share;
                (j, if x > *rem { rem.clone() } else { x })
            })
            .filter(|(_, x)| !x.is_zero())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Instance, JobSpec};
    use crate::rational::{int, ratio};
    use crate::sim::simulate_instance;
    use crate::validate::validate_schedule;

    fn run(inst: &Instance, eps: Rational) -> crate::sim::SimOutcome {
        let s = ProportionalAllocation::new(PropAllocParams::new(eps).unwrap());
        let aug = s.augmentation();
        let out = simulate_instance(inst, s, aug.clone(), None).unwrap();
        assert!(validate_schedule(inst, &out.schedule, &aug).is_valid());
        out
    }

    #[test]
    fn lone_job_completes_immediately() {
        let inst = Instance::unit_nodes(2, vec![JobSpec::unit(0, 1, 1)]).unwrap();
        let out = run(&inst, ratio(1, 2));
        assert_eq!(out.schedule.assignments()[0].fraction, int(1));
        assert_eq!(out.rounds, 1);
    }

    #[test]
    fn shared_node_with_and_without_augmentation() {
        let inst = Instance::unit_nodes(3, vec![JobSpec::unit(0, 1, 1), JobSpec::unit(0, 2, 1)]).unwrap();
        // ε = 1: f = 1/2, (1+ε)f = 1, both done in round 1 with load 2 on node 0
        let out = run(&inst, int(1));
        assert_eq!(out.rounds, 1);
        assert_eq!(out.schedule.round_loads(&inst, 1)[0], int(2));
        // ε = 0: half per round, both done in round 2
        let out = run(&inst, int(0));
        assert_eq!(out.rounds, 2);
        assert!(out
            .schedule
            .assignments()
            .iter()
            .all(|a| a.fraction == ratio(1, 2)));
    }

    #[test]
    fn uses_full_demands_not_remainders() {
        // jobs 0 and 1 are half done when job 2 arrives; node 0 still sums
        // three full unit demands, so each gets 1/3
        let inst = Instance::unit_nodes(
            4,
            vec![
                JobSpec::unit(0, 1, 1),
                JobSpec::unit(0, 2, 1),
                JobSpec::unit(0, 3, 2),
            ],
        )
        .unwrap();
        let out = run(&inst, int(0));
        let round2: Vec<_> = out
            .schedule
            .assignments()
            .iter()
            .filter(|a| a.round == 2)
            .collect();
        assert_eq!(round2.len(), 3);
        assert!(round2.iter().all(|a| a.fraction == ratio(1, 3)));
    }
}
