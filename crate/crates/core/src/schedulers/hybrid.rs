use std::collections::BTreeMap;

use num_traits::Zero;

use crate::model::JobId;
use crate::rational::{Frac, Rational};
use crate::sim::{Scheduler, SimState};

use super::{
    check_epsilon, ParamError, PropAllocParams, ProportionalAllocation, ShortestJobFirst, SjfParams,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridParams {
    pub epsilon1: Rational,
    pub epsilon2: Rational,
}

impl HybridParams {
    pub fn new(epsilon1: Rational, epsilon2: Rational) -> Result<Self, ParamError> {
        check_epsilon(&epsilon1)?;
        check_epsilon(&epsilon2)?;
        Ok(HybridParams { epsilon1, epsilon2 })
    }
}

/// Runs proportional allocation (`1+ε1`) and shortest job first (`2+ε2`)
/// side by side on private copies of the pending set. Each copy advances on
/// its own remainders; the real schedule executes the sum of both shares,
/// capped at the real remainder.
pub struct Hybrid {
    params: HybridParams,
    prop: ProportionalAllocation,
    sjf: ShortestJobFirst,
    virtual_states: Option<(SimState, SimState)>,
    last_shares: BTreeMap<JobId, (Rational, Rational)>,
}

impl Hybrid {
    pub fn new(params: HybridParams) -> Self {
        let prop = ProportionalAllocation::new(PropAllocParams {
            epsilon: params.epsilon1.clone(),
        });
        let sjf = ShortestJobFirst::new(SjfParams {
            epsilon: params.epsilon2.clone(),
        });
        Hybrid {
            params,
            prop,
            sjf,
            virtual_states: None,
            last_shares: BTreeMap::new(),
        }
    }

    /// Private states of the two component rules.
    pub fn virtual_states(&self) -> Option<(&SimState, &SimState)> {
        self.virtual_states.as_ref().map(|(a, b)| (a, b))
    }

    /// Per-job `(proportional, sjf)` executed fractions from the last round.
    pub fn last_shares(&self) -> &BTreeMap<JobId, (Rational, Rational)> {
        &self.last_shares
    }
}

fn advance(
    rule: &mut dyn Scheduler,
    state: &mut SimState,
    round: u64,
    fresh: &[crate::model::Job],
    arrivals: &[JobId],
) -> BTreeMap<JobId, Rational> {
    state.begin_round(round);
    for job in fresh {
        state.admit(job.clone());
    }
    let proposals = rule.schedule_round(state, arrivals);
    proposals
        .into_iter()
        .map(|(j, x)| (j, state.execute(j, &x)))
        .filter(|(_, x)| !x.is_zero())
        .collect()
}

impl Scheduler for Hybrid {
    fn name(&self) -> &'static str {
        "hybrid"
    }

    fn params(&self) -> String {
        format!(
            "eps1={};eps2={}",
            Frac(&self.params.epsilon1),
            Frac(&self.params.epsilon2)
        )
    }

    fn augmentation(&self) -> Rational {
        Rational::from_integer(3.into()) + &self.params.epsilon1 + &self.params.epsilon2
    }

    fn schedule_round(&mut self, state: &SimState, arrivals: &[JobId]) -> Vec<(JobId, Rational)> {
        let (vp, vs) = self.virtual_states.get_or_insert_with(|| {
            (
                SimState::new(state.nodes().to_vec()),
                SimState::new(state.nodes().to_vec()),
            )
        });
        let fresh: Vec<_> = arrivals.iter().map(|&j| state.job(j).clone()).collect();
        let round = state.round();
        let a = advance(&mut self.prop, vp, round, &fresh, arrivals);
        let b = advance(&mut self.sjf, vs, round, &fresh, arrivals);

        let mut shares: BTreeMap<JobId, (Rational, Rational)> = BTreeMap::new();
        for (j, x) in a {
            shares
                .entry(j)
                .or_insert_with(|| (Rational::zero(), Rational::zero()))
                .0 = x;
        }
        for (j, x) in b {
            shares
                .entry(j)
                .or_insert_with(|| (Rational::zero(), Rational::zero()))
                .1 = x;
        }
        let out = shares
            .iter()
            .filter_map(|(&j, (x, y))| {
                let rem = state.remaining(j)?;
                let sum = x + y;
                Some((j, if sum > *rem { rem.clone() } else { sum }))
            })
            .collect();
        self.last_shares = shares;
        out
    }
}
