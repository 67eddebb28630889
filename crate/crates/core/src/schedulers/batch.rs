use std::collections::{BTreeSet, VecDeque};

use num_traits::One;

use crate::graph::{two_factor_decomposition, MultiGraph};
use crate::model::{JobId, Round};
use crate::rational::Rational;
use crate::sim::{Scheduler, SimState};

use super::ParamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchParams {
    pub k: u64,
}

impl BatchParams {
    pub fn new(k: u64) -> Result<Self, ParamError> {
        if !(1..=2).contains(&k) {
            return Err(ParamError::BatchK(k));
        }
        Ok(BatchParams { k })
    }
}

/// `P`: pending jobs not yet decomposed. `H`: 2-factors still to execute.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BatchState {
    pub waiting: BTreeSet<JobId>,
    pub factors: VecDeque<Vec<JobId>>,
}

/// Collects arrivals; whenever the factor queue is empty, decomposes
/// everything collected into 2-factors and then executes up to `k` factors
/// per round in decomposition order.
#[derive(Debug, Clone)]
pub struct BatchDecomposition {
    params: BatchParams,
    state: BatchState,
    decomposed_at: Vec<Round>,
}

impl BatchDecomposition {
    pub fn new(params: BatchParams) -> Self {
        BatchDecomposition {
            params,
            state: BatchState::default(),
            decomposed_at: Vec::new(),
        }
    }

    pub fn state(&self) -> &BatchState {
        &self.state
    }

    /// Rounds in which the queue was found empty and refilled.
    pub fn decomposition_rounds(&self) -> &[Round] {
        &self.decomposed_at
    }
}

impl Scheduler for BatchDecomposition {
    fn name(&self) -> &'static str {
        "batch"
    }

    fn params(&self) -> String {
        format!("k={}", self.params.k)
    }

    fn augmentation(&self) -> Rational {
        Rational::from_integer((2 * self.params.k).into())
    }

    fn nonsplitting(&self) -> bool {
        true
    }

    fn unit_only(&self) -> bool {
        true
    }

    fn schedule_round(&mut self, state: &SimState, arrivals: &[JobId]) -> Vec<(JobId, Rational)> {
        self.state.waiting.extend(arrivals.iter().copied());
        if self.state.factors.is_empty() {
            self.decomposed_at.push(state.round());
            let batch = std::mem::take(&mut self.state.waiting);
            let graph = MultiGraph::from_jobs(batch.iter().map(|&j| state.job(j)))
                .expect("released jobs have distinct endpoints");
            self.state.factors = two_factor_decomposition(&graph).factors.into();
        }
        let mut out = Vec::new();
        for _ in 0..self.params.k {
            let Some(factor) = self.state.factors.pop_front() else {
                break;
            };
            out.extend(factor.into_iter().map(|j| (j, Rational::one())));
        }
        out
    }
}
