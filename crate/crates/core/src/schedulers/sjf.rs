use num_traits::Zero;

use crate::model::JobId;
use crate::rational::{Frac, Rational};
use crate::sim::{Scheduler, SimState};

use super::{check_epsilon, ParamError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SjfParams {
    pub epsilon: Rational,
}

impl SjfParams {
    pub fn new(epsilon: Rational) -> Result<Self, ParamError> {
        check_epsilon(&epsilon)?;
        Ok(SjfParams { epsilon })
    }
}

/// Water-filling by remaining demand: pending jobs sorted by
/// `(d_j · remaining, release, id)` each take as much as both endpoints'
/// leftover `(2+ε)·c` allows.
#[derive(Debug, Clone)]
pub struct ShortestJobFirst {
    params: SjfParams,
}

impl ShortestJobFirst {
    pub fn new(params: SjfParams) -> Self {
        ShortestJobFirst { params }
    }
}

impl Scheduler for ShortestJobFirst {
    fn name(&self) -> &'static str {
        "sjf"
    }

    fn params(&self) -> String {
        format!("eps={}", Frac(&self.params.epsilon))
    }

    fn augmentation(&self) -> Rational {
        Rational::from_integer(2.into()) + &self.params.epsilon
    }

    fn schedule_round(&mut self, state: &SimState, _arrivals: &[JobId]) -> Vec<(JobId, Rational)> {
        let scale = self.augmentation();
        let mut left: Vec<Rational> = state.nodes().iter().map(|n| &scale * &n.capacity).collect();
        let mut order: Vec<(Rational, u64, JobId)> = state
            .pending()
            .map(|(j, rem)| {
                let job = state.job(j);
                (&job.demand * rem, job.release, j)
            })
            .collect();
        order.sort();
        let mut out = Vec::new();
        for (_, _, j) in order {
            let job = state.job(j);
            let rem = state.remaining(j).unwrap();
            let room = job.nodes().iter().map(|&i| &left[i] / &job.demand).min().unwrap();
            let x = if room > *rem { rem.clone() } else { room };
            if x.is_zero() {
                continue;
            }
            for i in job.nodes() {
                left[i] -= &job.demand * &x;
            }
            out.push((j, x));
        }
        debug_assert!(left.iter().all(|l| *l >= Rational::zero()));
        out
    }
}
