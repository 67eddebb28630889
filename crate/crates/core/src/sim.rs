//! Round-driven online simulation.
//!
//! Each round the engine delivers the new arrivals, asks the scheduler for
//! `(job, fraction)` pairs, checks them against the augmented capacities and
//! applies them. Proposals above a job's remaining fraction are capped; any
//! other inconsistency is a protocol error. The engine never repairs a round.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::model::{check_job, Instance, Job, JobId, Node, NodeId, Round, Schedule};
use crate::rational::{Frac, Rational};

/// Engine state visible to schedulers: released jobs, their remaining
/// fractions, and the cached per-node pending demand.
#[derive(Debug, Clone)]
pub struct SimState {
    round: Round,
    nodes: Vec<Node>,
    jobs: Vec<Option<Job>>,
    pending: BTreeMap<JobId, Rational>,
    node_load: Vec<Rational>,
}

impl SimState {
    pub fn new(nodes: Vec<Node>) -> Self {
        let n = nodes.len();
        SimState {
            round: 0,
            nodes,
            jobs: Vec::new(),
            pending: BTreeMap::new(),
            node_load: vec![Rational::zero(); n],
        }
    }

    /// The round being scheduled while a scheduler runs; the last finished
    /// round otherwise.
    pub fn round(&self) -> Round {
        self.round
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn capacity(&self, node: NodeId) -> &Rational {
        &self.nodes[node].capacity
    }

    /// A released job. Panics on ids that have not arrived yet.
    pub fn job(&self, id: JobId) -> &Job {
        self.jobs
            .get(id)
            .and_then(Option::as_ref)
            .unwrap_or_else(|| panic!("job {id} has not been released"))
    }

    pub fn released(&self) -> impl Iterator<Item = &Job> {
        self.jobs.iter().flatten()
    }

    /// Pending jobs in id order with their remaining fraction.
    pub fn pending(&self) -> impl Iterator<Item = (JobId, &Rational)> {
        self.pending.iter().map(|(&j, r)| (j, r))
    }

    pub fn pending_count(&self) -> usize {
        self.pending.len()
    }

    pub fn remaining(&self, job: JobId) -> Option<&Rational> {
        self.pending.get(&job)
    }

    pub fn is_pending(&self, job: JobId) -> bool {
        self.pending.contains_key(&job)
    }

    /// Pending jobs adjacent to `node`, i.e. `J(i, t)`.
    pub fn pending_on(&self, node: NodeId) -> Vec<JobId> {
        self.pending
            .keys()
            .copied()
            .filter(|&j| self.job(j).touches(node))
            .collect()
    }

    /// Sum over pending jobs on `node` of demand times remaining fraction.
    pub fn pending_load(&self, node: NodeId) -> &Rational {
        &self.node_load[node]
    }

    pub fn pending_loads(&self) -> &[Rational] {
        &self.node_load
    }

    /// Pending load recomputed from scratch.
    pub fn recomputed_loads(&self) -> Vec<Rational> {
        let mut loads = vec![Rational::zero(); self.nodes.len()];
        for (&j, rem) in &self.pending {
            let job = self.job(j);
            for node in job.nodes() {
                loads[node] += &job.demand * rem;
            }
        }
        loads
    }

    pub(crate) fn begin_round(&mut self, round: Round) {
        self.round = round;
    }

    pub(crate) fn admit(&mut self, job: Job) {
        let id = job.id;
        for node in job.nodes() {
            self.node_load[node] += &job.demand;
        }
        if self.jobs.len() <= id {
            self.jobs.resize(id + 1, None);
        }
        self.jobs[id] = Some(job);
        self.pending.insert(id, Rational::one());
    }

    pub(crate) fn has_seen(&self, id: JobId) -> bool {
        self.jobs.get(id).is_some_and(Option::is_some)
    }

    /// Executes `fraction` of a pending job, capped at its remainder.
    /// Returns the amount actually executed.
    pub(crate) fn execute(&mut self, job: JobId, fraction: &Rational) -> Rational {
        let Some(rem) = self.pending.get_mut(&job) else {
            return Rational::zero();
        };
        let done = if *fraction >= *rem {
            rem.clone()
        } else {
            fraction.clone()
        };
        *rem -= &done;
        let finished = rem.is_zero();
        if finished {
            self.pending.remove(&job);
        }
        let job = self.jobs[job].as_ref().expect("pending job is released");
        let amount = &job.demand * &done;
        for node in job.nodes() {
            self.node_load[node] -= &amount;
        }
        done
    }
}

/// An online scheduling rule. Implementations see only released jobs.
pub trait Scheduler {
    fn name(&self) -> &'static str;

    /// Parameter string for reports, e.g. `eps=1/2`.
    fn params(&self) -> String;

    /// Load multiplier the rule is designed to respect.
    fn augmentation(&self) -> Rational;

    fn nonsplitting(&self) -> bool {
        false
    }

    /// Rules defined only for unit demands and capacities.
    fn unit_only(&self) -> bool {
        false
    }

    /// Decide this round's fractions. `state.round()` is the current round and
    /// `arrivals` were admitted to the pending set just before the call.
    fn schedule_round(&mut self, state: &SimState, arrivals: &[JobId]) -> Vec<(JobId, Rational)>;
}

impl<S: Scheduler + ?Sized> Scheduler for Box<S> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn params(&self) -> String {
        (**self).params()
    }
    fn augmentation(&self) -> Rational {
        (**self).augmentation()
    }
    fn nonsplitting(&self) -> bool {
        (**self).nonsplitting()
    }
    fn unit_only(&self) -> bool {
        (**self).unit_only()
    }
    fn schedule_round(&mut self, state: &SimState, arrivals: &[JobId]) -> Vec<(JobId, Rational)> {
        (**self).schedule_round(state, arrivals)
    }
}

/// What happened in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: Round,
    pub arrivals: Vec<JobId>,
    /// Executed fractions after capping, by job id.
    pub assignments: Vec<(JobId, Rational)>,
    /// Pending load per node at the end of the round.
    pub loads: Vec<Rational>,
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("horizon exceeded: {pending} job(s) still pending after {max_rounds} rounds")]
    HorizonExceeded {
        max_rounds: Round,
        pending: usize,
        partial: Box<Schedule>,
    },
    #[error("protocol error in round {round}: {message}")]
    Protocol { round: Round, message: String },
    #[error("invalid arrival in round {round}: {message}")]
    InvalidArrival { round: Round, message: String },
    #[error("configuration error: {0}")]
    Config(String),
}

/// A live online simulation that can be stepped one round at a time.
pub struct Simulation<S: Scheduler> {
    state: SimState,
    scheduler: S,
    augmentation: Rational,
    schedule: Schedule,
    history: Vec<RoundRecord>,
}

impl<S: Scheduler> Simulation<S> {
    pub fn new(nodes: Vec<Node>, scheduler: S, augmentation: Rational) -> Self {
        let schedule = Schedule::new(scheduler.nonsplitting());
        Simulation {
            state: SimState::new(nodes),
            scheduler,
            augmentation,
            schedule,
            history: Vec::new(),
        }
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn scheduler(&self) -> &S {
        &self.scheduler
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn history(&self) -> &[RoundRecord] {
        &self.history
    }

    pub fn augmentation(&self) -> &Rational {
        &self.augmentation
    }

    /// Runs the next round with the given arrivals. Arrivals must carry
    /// `release` equal to the new round and unseen ids.
    pub fn step(&mut self, mut arrivals: Vec<Job>) -> Result<&RoundRecord, SimError> {
        let round = self.state.round + 1;
        self.state.begin_round(round);
        arrivals.sort_by_key(|j| j.id);

        let mut arrival_ids = Vec::with_capacity(arrivals.len());
        for job in arrivals {
            let bad = |message: String| SimError::InvalidArrival { round, message };
            if job.release != round {
                return Err(bad(format!("job {} has release {}", job.id, job.release)));
            }
            if self.state.has_seen(job.id) {
                return Err(bad(format!("job {} delivered twice", job.id)));
            }
            check_job(&job, self.state.nodes.len()).map_err(|e| bad(e.to_string()))?;
            if self.scheduler.unit_only()
                && !(job.is_unit() && job.nodes().iter().all(|&i| self.state.capacity(i).is_one()))
            {
                return Err(SimError::Config(format!(
                    "{} requires unit demands and capacities (job {})",
                    self.scheduler.name(),
                    job.id
                )));
            }
            arrival_ids.push(job.id);
            self.state.admit(job);
        }

        let proposals = self.scheduler.schedule_round(&self.state, &arrival_ids);
        let executed = self.check_round(round, proposals)?;

        for (job, fraction) in &executed {
            let done = self.state.execute(*job, fraction);
            debug_assert_eq!(&done, fraction);
            self.schedule.push(*job, round, done);
        }

        self.history.push(RoundRecord {
            round,
            arrivals: arrival_ids,
            assignments: executed,
            loads: self.state.node_load.clone(),
        });
        Ok(self.history.last().unwrap())
    }

    /// Validates a round's proposals and returns them capped and sorted.
    fn check_round(
        &self,
        round: Round,
        proposals: Vec<(JobId, Rational)>,
    ) -> Result<Vec<(JobId, Rational)>, SimError> {
        let protocol = |message: String| SimError::Protocol { round, message };
        let mut seen = BTreeSet::new();
        let mut executed = Vec::with_capacity(proposals.len());
        let mut loads = vec![Rational::zero(); self.state.nodes.len()];
        for (job, fraction) in proposals {
            if !seen.insert(job) {
                return Err(protocol(format!("job {job} assigned twice")));
            }
            let Some(rem) = self.state.remaining(job) else {
                return Err(protocol(format!("job {job} is not pending")));
            };
            if fraction <= Rational::zero() {
                return Err(protocol(format!(
                    "job {job}: non-positive fraction {}",
                    Frac(&fraction)
                )));
            }
            let capped = if fraction > *rem { rem.clone() } else { fraction };
            if self.scheduler.nonsplitting() && !(capped.is_one() && rem.is_one()) {
                return Err(protocol(format!(
                    "job {job}: nonsplitting scheduler executed fraction {}",
                    Frac(&capped)
                )));
            }
            let j = self.state.job(job);
            for node in j.nodes() {
                loads[node] += &j.demand * &capped;
            }
            executed.push((job, capped));
        }
        for (node, load) in loads.iter().enumerate() {
            let cap = &self.augmentation * self.state.capacity(node);
            if *load > cap {
                return Err(protocol(format!(
                    "node {node} load {} exceeds {}",
                    Frac(load),
                    Frac(&cap)
                )));
            }
        }
        executed.sort_by_key(|(j, _)| *j);
        Ok(executed)
    }

    /// Steps with no arrivals until nothing is pending.
    pub fn drain(&mut self, max_rounds: Round) -> Result<(), SimError> {
        while self.state.pending_count() > 0 {
            if self.state.round >= max_rounds {
                return Err(self.horizon_error(max_rounds));
            }
            self.step(Vec::new())?;
        }
        Ok(())
    }

    fn horizon_error(&self, max_rounds: Round) -> SimError {
        SimError::HorizonExceeded {
            max_rounds,
            pending: self.state.pending_count(),
            partial: Box::new(self.schedule.clone()),
        }
    }

    pub fn into_outcome(self) -> SimOutcome {
        SimOutcome {
            schedule: self.schedule,
            history: self.history,
            rounds: self.state.round,
        }
    }
}

/// Source of arrivals for [`simulate`]: a fixed instance or an adaptive
/// generator that inspects the state before emitting each round.
pub trait ArrivalSource {
    fn nodes(&self) -> Vec<Node>;

    /// Jobs released in `round`; `state` reflects the end of the previous round.
    fn arrivals(&mut self, round: Round, state: &SimState) -> Vec<Job>;

    /// True when no job will be released after `round`.
    fn exhausted(&self, round: Round) -> bool;
}

/// Replays a fixed instance, releasing each job in its release round.
pub struct InstanceSource<'a> {
    inst: &'a Instance,
    by_round: BTreeMap<Round, Vec<JobId>>,
}

impl<'a> InstanceSource<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        InstanceSource {
            inst,
            by_round: inst.arrivals_by_round(),
        }
    }
}

impl ArrivalSource for InstanceSource<'_> {
    fn nodes(&self) -> Vec<Node> {
        self.inst.nodes().to_vec()
    }

    fn arrivals(&mut self, round: Round, _state: &SimState) -> Vec<Job> {
        self.by_round
            .get(&round)
            .map(|ids| ids.iter().map(|&j| self.inst.job(j).clone()).collect())
            .unwrap_or_default()
    }

    fn exhausted(&self, round: Round) -> bool {
        self.inst.last_release() <= round
    }
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub schedule: Schedule,
    pub history: Vec<RoundRecord>,
    pub rounds: Round,
}

/// Runs `scheduler` against `source` under `augmentation` until every job
/// completes, or fails with [`SimError::HorizonExceeded`] at `max_rounds`.
pub fn simulate<S: Scheduler>(
    source: &mut dyn ArrivalSource,
    scheduler: S,
    augmentation: Rational,
    max_rounds: Round,
) -> Result<SimOutcome, SimError> {
    let mut sim = Simulation::new(source.nodes(), scheduler, augmentation);
    loop {
        let round = sim.state.round;
        if source.exhausted(round) && sim.state.pending_count() == 0 {
            break;
        }
        if round >= max_rounds {
            return Err(sim.horizon_error(max_rounds));
        }
        let arrivals = source.arrivals(round + 1, &sim.state);
        sim.step(arrivals)?;
    }
    Ok(sim.into_outcome())
}

/// [`simulate`] on a fixed instance, with the default round guard when
/// `max_rounds` is `None`. Rejects non-unit instances for unit-only rules.
pub fn simulate_instance<S: Scheduler>(
    inst: &Instance,
    scheduler: S,
    augmentation: Rational,
    max_rounds: Option<Round>,
) -> Result<SimOutcome, SimError> {
    if scheduler.unit_only() && !inst.is_unit() {
        return Err(SimError::Config(format!(
            "{} requires a unit instance",
            scheduler.name()
        )));
    }
    let max_rounds = max_rounds.unwrap_or_else(|| crate::bounds::default_max_rounds(inst));
    simulate(
        &mut InstanceSource::new(inst),
        scheduler,
        augmentation,
        max_rounds,
    )
}
