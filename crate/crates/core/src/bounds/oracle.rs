//! Exhaustive offline optimum for small instances.
//!
//! Jobs are discretized into integer units: one unit per job when
//! nonsplitting, otherwise a grid of `g` units per job where `g` is the lcm
//! of the demand denominators times a refinement factor. Loads are scaled to
//! integers so the search runs on machine integers.
//!
//! Each round executes a *maximal* feasible allocation (no job could take
//! one more unit). Moving work earlier never delays a completion, so some
//! optimum uses only maximal allocations.
//!
//! * Maximum response: for `R = 1, 2, ...` decide whether every job can
//!   finish by `r_j + R - 1`, depth-first with earliest-deadline-first
//!   branching, a per-node deadline density test, and memoized failures.
//! * Average response: memoized exact cost-to-go over `(round, pending)`.
//!
//! Every search is bounded by a budget on explored states; running out is
//! an error, never a guess.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::model::{Instance, JobId, Round, Schedule};
use crate::rational::{lcm_denominators, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MaxResponse,
    AvgResponse,
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub objective: Objective,
    pub nonsplitting: bool,
    /// Limit on explored search states.
    pub budget: u64,
    /// Last round a job may be executed in. Defaults to last release plus the
    /// total number of units, which no maximal schedule can exceed.
    pub horizon: Option<Round>,
    /// Grid refinement for splittable search.
    pub refinement: u64,
}

impl OracleConfig {
    pub fn new(objective: Objective, nonsplitting: bool) -> Self {
        OracleConfig {
            objective,
            nonsplitting,
            budget: 1_000_000,
            horizon: None,
            refinement: 1,
        }
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn horizon(mut self, horizon: Round) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn refinement(mut self, refinement: u64) -> Self {
        self.refinement = refinement.max(1);
        self
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub objective: Objective,
    /// Optimal maximum response, or optimal average response.
    pub value: Rational,
    pub schedule: Schedule,
    pub explored: u64,
    /// Units per job in the searched class; `None` for nonsplitting search.
    /// A splittable result is optimal only over this grid.
    pub grid: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search budget of {budget} states exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("no schedule completes every job by round {horizon}")]
    NoScheduleWithinHorizon { horizon: Round },
    #[error("unsupported instance: {0}")]
    Unsupported(String),
}

/// Integer model of the instance.
struct Problem {
    release: Vec<Round>,
    ends: Vec<[usize; 2]>,
    /// Scaled load of one unit of each job.
    weight: Vec<i128>,
    /// Units per job.
    units: u64,
    cap: Vec<i128>,
    /// `(round, jobs released in it)` ascending.
    arrivals: Vec<(Round, Vec<JobId>)>,
    horizon: Round,
    nonsplitting: bool,
}

type Pending = Vec<(JobId, u64)>;
type Alloc = Vec<(JobId, u64)>;

fn to_i128(v: &BigInt) -> Result<i128, OracleError> {
    v.to_i128()
        .ok_or_else(|| OracleError::Unsupported("scaled loads overflow i128".into()))
}

impl Problem {
    fn build(inst: &Instance, cfg: &OracleConfig) -> Result<Self, OracleError> {
        let units = if cfg.nonsplitting {
            1
        } else {
            let g = lcm_denominators(inst.jobs().iter().map(|j| &j.demand)) * BigInt::from(cfg.refinement);
            g.to_u64()
                .ok_or_else(|| OracleError::Unsupported("grid too fine".into()))?
        };
        let g = Rational::from_integer(BigInt::from(units));
        let unit_loads: Vec<Rational> = inst.jobs().iter().map(|j| &j.demand / &g).collect();
        let scale = unit_loads
            .iter()
            .map(|r| r.denom().clone())
            .chain(inst.nodes().iter().map(|n| n.capacity.denom().clone()))
            .fold(BigInt::one(), |acc, d| acc.lcm(&d));
        let scale = Rational::from_integer(scale);
        let weight = unit_loads
            .iter()
            .map(|r| to_i128(&(r * &scale).to_integer()))
            .collect::<Result<Vec<_>, _>>()?;
        let cap = inst
            .nodes()
            .iter()
            .map(|n| to_i128(&(&n.capacity * &scale).to_integer()))
            .collect::<Result<Vec<_>, _>>()?;
        for job in inst.jobs() {
            for node in job.nodes() {
                if weight[job.id] > cap[node] {
                    return Err(OracleError::Unsupported(format!(
                        "job {} does not fit node {} in one round at this grid",
                        job.id, node
                    )));
                }
            }
        }
        let arrivals = inst.arrivals_by_round().into_iter().collect();
        let total_units = units * inst.job_count() as u64;
        let horizon = cfg.horizon.unwrap_or(inst.last_release() + total_units);
        Ok(Problem {
            release: inst.jobs().iter().map(|j| j.release).collect(),
            ends: inst.jobs().iter().map(|j| j.nodes()).collect(),
            weight,
            units,
            cap,
            arrivals,
            horizon,
            nonsplitting: cfg.nonsplitting,
        })
    }

    /// Index into `arrivals` of the first round `>= round`.
    fn next_arrival(&self, round: Round) -> usize {
        self.arrivals.partition_point(|(r, _)| *r < round)
    }

    fn fresh(&self, idx: usize) -> impl Iterator<Item = (JobId, u64)> + '_ {
        self.arrivals[idx].1.iter().map(move |&j| (j, self.units))
    }

    /// Maximal allocations for `pending` (ordered by priority). `forced[i]`
    /// marks jobs that must finish this round. Calls `visit` per allocation;
    /// stops early when it returns true.
    fn for_each_maximal(
        &self,
        pending: &[(JobId, u64)],
        forced: &[bool],
        counter: &mut Counter,
        visit: &mut dyn FnMut(&Alloc, &mut Counter) -> Result<bool, OracleError>,
    ) -> Result<bool, OracleError> {
        let mut left = self.cap.clone();
        let mut chosen = vec![0u64; pending.len()];
        self.enumerate(pending, forced, 0, &mut left, &mut chosen, counter, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        pending: &[(JobId, u64)],
        forced: &[bool],
        idx: usize,
        left: &mut Vec<i128>,
        chosen: &mut Vec<u64>,
        counter: &mut Counter,
        visit: &mut dyn FnMut(&Alloc, &mut Counter) -> Result<bool, OracleError>,
    ) -> Result<bool, OracleError> {
        if idx == pending.len() {
            // maximality: no job can take one more unit
            for (k, &(j, rem)) in pending.iter().enumerate() {
                if chosen[k] == rem || (self.nonsplitting && chosen[k] > 0) {
                    continue;
                }
                let need = if self.nonsplitting {
                    self.weight[j] * rem as i128
                } else {
                    self.weight[j]
                };
                if self.ends[j].iter().all(|&i| left[i] >= need) {
                    return Ok(false);
                }
            }
            counter.tick()?;
            let alloc: Alloc = pending
                .iter()
                .zip(chosen.iter())
                .filter(|(_, &c)| c > 0)
                .map(|(&(j, _), &c)| (j, c))
                .collect();
            return visit(&alloc, counter);
        }
        let (j, rem) = pending[idx];
        let w = self.weight[j];
        let fit = self.ends[j]
            .iter()
            .map(|&i| (left[i] / w).max(0) as u64)
            .min()
            .unwrap()
            .min(rem);
        let options: Vec<u64> = if forced[idx] {
            if fit < rem {
                return Ok(false);
            }
            vec![rem]
        } else if self.nonsplitting {
            if fit == rem {
                vec![rem, 0]
            } else {
                vec![0]
            }
        } else {
            (0..=fit).rev().collect()
        };
        for take in options {
            let load = w * take as i128;
            for &i in &self.ends[j] {
                left[i] -= load;
            }
            chosen[idx] = take;
            let stop = self.enumerate(pending, forced, idx + 1, left, chosen, counter, visit)?;
            for &i in &self.ends[j] {
                left[i] += load;
            }
            chosen[idx] = 0;
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Removes executed units; returns the remaining pending set and the jobs
    /// that completed.
    fn apply(pending: &Pending, alloc: &Alloc) -> (Pending, Vec<JobId>) {
        let mut out = Vec::with_capacity(pending.len());
        let mut done = Vec::new();
        let mut a = alloc.iter().peekable();
        for &(j, rem) in pending {
            let take = match a.peek() {
                Some(&&(aj, t)) if aj == j => {
                    a.next();
                    t
                }
                _ => 0,
            };
            if take == rem {
                done.push(j);
            } else {
                out.push((j, rem - take));
            }
        }
        (out, done)
    }

    /// Pending set for the first round after `round`: skips idle stretches.
    fn advance(&self, round: Round, mut pending: Pending) -> (Round, Pending) {
        let mut next = round + 1;
        if pending.is_empty() {
            let idx = self.next_arrival(next);
            if idx < self.arrivals.len() {
                next = self.arrivals[idx].0;
            }
        }
        let idx = self.next_arrival(next);
        if idx < self.arrivals.len() && self.arrivals[idx].0 == next {
            pending.extend(self.fresh(idx));
            pending.sort_unstable();
        }
        (next, pending)
    }

    fn is_done(&self, round: Round, pending: &Pending) -> bool {
        pending.is_empty() && self.next_arrival(round) >= self.arrivals.len()
    }

    fn initial(&self) -> (Round, Pending) {
        if self.arrivals.is_empty() {
            return (1, Vec::new());
        }
        let mut p: Pending = self.fresh(0).collect();
        p.sort_unstable();
        (self.arrivals[0].0, p)
    }

    fn to_schedule(&self, path: &[(Round, Alloc)]) -> Schedule {
        let mut s = Schedule::new(self.nonsplitting);
        let g = BigInt::from(self.units);
        for (round, alloc) in path {
            for &(j, u) in alloc {
                s.push(j, *round, Rational::new(BigInt::from(u), g.clone()));
            }
        }
        s
    }
}

struct Counter {
    explored: u64,
    budget: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.explored += 1;
        if self.explored > self.budget {
            Err(OracleError::BudgetExhausted { budget: self.budget })
        } else {
            Ok(())
        }
    }
}

/// Deadline search for one response bound.
struct Decision<'a> {
    p: &'a Problem,
    bound: u64,
    failed: HashSet<(Round, Pending)>,
}

impl Decision<'_> {
    fn deadline(&self, j: JobId) -> Round {
        (self.p.release[j] + self.bound - 1).min(self.p.horizon)
    }

    /// Per node, the work due by each deadline must fit the rounds left.
    fn dense_ok(&self, round: Round, pending: &Pending) -> bool {
        let mut per_node: HashMap<usize, Vec<(Round, i128)>> = HashMap::new();
        for &(j, rem) in pending {
            let d = self.deadline(j);
            if d < round {
                return false;
            }
            for &i in &self.p.ends[j] {
                per_node
                    .entry(i)
                    .or_default()
                    .push((d, self.p.weight[j] * rem as i128));
            }
        }
        for (i, mut items) in per_node {
            items.sort_unstable();
            let mut acc = 0i128;
            for (d, w) in items {
                acc += w;
                if acc > self.p.cap[i] * (d - round + 1) as i128 {
                    return false;
                }
            }
        }
        true
    }

    fn search(
        &mut self,
        round: Round,
        pending: Pending,
        counter: &mut Counter,
        path: &mut Vec<(Round, Alloc)>,
    ) -> Result<bool, OracleError> {
        if self.p.is_done(round, &pending) {
            return Ok(true);
        }
        if !self.dense_ok(round, &pending) {
            return Ok(false);
        }
        if self.failed.contains(&(round, pending.clone())) {
            return Ok(false);
        }
        counter.tick()?;

        let mut order = pending.clone();
        order.sort_by_key(|&(j, _)| (self.deadline(j), self.p.release[j], j));
        let forced: Vec<bool> = order.iter().map(|&(j, _)| self.deadline(j) == round).collect();

        let mut found = false;
        let p = self.p;
        let mut visit = |alloc: &Alloc, counter: &mut Counter| -> Result<bool, OracleError> {
            let mut sorted = alloc.clone();
            sorted.sort_unstable();
            let (rest, _) = Problem::apply(&pending, &sorted);
            let (next, rest) = p.advance(round, rest);
            path.push((round, sorted));
            if self.search(next, rest, counter, path)? {
                found = true;
                return Ok(true);
            }
            path.pop();
            Ok(false)
        };
        p.for_each_maximal(&order, &forced, counter, &mut visit)?;
        if !found {
            self.failed.insert((round, pending));
        }
        Ok(found)
    }
}

/// Exact cost-to-go search for total response time.
struct TotalResponse<'a> {
    p: &'a Problem,
    /// `None` marks states with no completion inside the horizon.
    memo: HashMap<(Round, Pending), Option<(u64, Alloc)>>,
}

impl TotalResponse<'_> {
    fn cost(
        &mut self,
        round: Round,
        pending: Pending,
        counter: &mut Counter,
    ) -> Result<Option<u64>, OracleError> {
        if self.p.is_done(round, &pending) {
            return Ok(Some(0));
        }
        if round > self.p.horizon {
            return Ok(None);
        }
        if let Some(v) = self.memo.get(&(round, pending.clone())) {
            return Ok(v.as_ref().map(|(c, _)| *c));
        }
        counter.tick()?;
        let forced = vec![false; pending.len()];
        let mut best: Option<(u64, Alloc)> = None;
        let p = self.p;
        let mut visit = |alloc: &Alloc, counter: &mut Counter| -> Result<bool, OracleError> {
            let (rest, done) = Problem::apply(&pending, alloc);
            let here: u64 = done.iter().map(|&j| round + 1 - p.release[j]).sum();
            let (next, rest) = p.advance(round, rest);
            if let Some(tail) = self.cost(next, rest, counter)? {
                let total = here + tail;
                if best.as_ref().is_none_or(|(b, _)| total < *b) {
                    best = Some((total, alloc.clone()));
                }
            }
            Ok(false)
        };
        p.for_each_maximal(&pending, &forced, counter, &mut visit)?;
        let out = best.as_ref().map(|(c, _)| *c);
        self.memo.insert((round, pending), best);
        Ok(out)
    }

    fn witness(&self, mut round: Round, mut pending: Pending) -> Vec<(Round, Alloc)> {
        let mut path = Vec::new();
        while !self.p.is_done(round, &pending) {
            let Some(Some((_, alloc))) = self.memo.get(&(round, pending.clone())) else {
                break;
            };
            path.push((round, alloc.clone()));
            let (rest, _) = Problem::apply(&pending, alloc);
            (round, pending) = self.p.advance(round, rest);
        }
        path
    }
}

/// Runs `f` on a thread with a deep stack: the searches recurse once per round.
fn with_deep_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(256 << 20)
            .spawn_scoped(s, f)
            .expect("spawn oracle thread")
            .join()
            .expect("oracle thread panicked")
    })
}

/// Searches for a schedule with maximum response at most `bound`.
/// Returns `Ok(None)` when the search proves none exists.
pub fn oracle_feasible(
    inst: &Instance,
    bound: u64,
    cfg: &OracleConfig,
) -> Result<(Option<Schedule>, u64), OracleError> {
    let p = Problem::build(inst, cfg)?;
    with_deep_stack(|| {
        let mut counter = Counter {
            explored: 0,
            budget: cfg.budget,
        };
        let found = decide(&p, bound, &mut counter)?;
        Ok((found.map(|path| p.to_schedule(&path)), counter.explored))
    })
}

fn decide(
    p: &Problem,
    bound: u64,
    counter: &mut Counter,
) -> Result<Option<Vec<(Round, Alloc)>>, OracleError> {
    if bound == 0 {
        return Ok(None);
    }
    let mut d = Decision {
        p,
        bound,
        failed: HashSet::new(),
    };
    let (round, pending) = p.initial();
    let mut path = Vec::new();
    Ok(d.search(round, pending, counter, &mut path)?.then_some(path))
}

/// Optimal schedule for the objective, over nonsplitting schedules or the
/// splittable grid. Does not consult the interval lower bound.
pub fn oracle_optimal(inst: &Instance, cfg: &OracleConfig) -> Result<OracleResult, OracleError> {
    let p = Problem::build(inst, cfg)?;
    let grid = (!cfg.nonsplitting).then_some(p.units);
    with_deep_stack(|| {
        let mut counter = Counter {
            explored: 0,
            budget: cfg.budget,
        };
        match cfg.objective {
            Objective::MaxResponse => {
                let max_bound = p.horizon + 1;
                for bound in 1..=max_bound {
                    if let Some(path) = decide(&p, bound, &mut counter)? {
                        let schedule = p.to_schedule(&path);
                        return Ok(OracleResult {
                            objective: cfg.objective,
                            value: Rational::from_integer(BigInt::from(bound)),
                            schedule,
                            explored: counter.explored,
                            grid,
                        });
                    }
                }
                Err(OracleError::NoScheduleWithinHorizon { horizon: p.horizon })
            }
            Objective::AvgResponse => {
                let mut t = TotalResponse {
                    p: &p,
                    memo: HashMap::new(),
                };
                let (round, pending) = p.initial();
                let total = t
                    .cost(round, pending.clone(), &mut counter)?
                    .ok_or(OracleError::NoScheduleWithinHorizon { horizon: p.horizon })?;
                let path = t.witness(round, pending);
                let m = inst.job_count().max(1);
                Ok(OracleResult {
                    objective: cfg.objective,
                    value: Rational::new(BigInt::from(total), BigInt::from(m)),
                    schedule: p.to_schedule(&path),
                    explored: counter.explored,
                    grid,
                })
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::response_summary;
    use crate::model::JobSpec;
    use crate::rational::{int, ratio};
    use crate::validate::validate_schedule;

    fn max_cfg() -> OracleConfig {
        OracleConfig::new(Objective::MaxResponse, true)
    }

    #[test]
    fn single_job() {
        let inst = Instance::unit_nodes(2, vec![JobSpec::unit(0, 1, 3)]).unwrap();
        let r = oracle_optimal(&inst, &max_cfg()).unwrap();
        assert_eq!(r.value, int(1));
        assert_eq!(r.schedule.assignments()[0].round, 3);
    }

    #[test]
    fn ten_jobs_one_node() {
        let jobs = (1..=10).map(|v| JobSpec::unit(0, v, 1)).collect();
        let inst = Instance::unit_nodes(11, jobs).unwrap();
        let r = oracle_optimal(&inst, &max_cfg()).unwrap();
        assert_eq!(r.value, int(10));
        assert!(validate_schedule(&inst, &r.schedule, &int(1)).is_valid());
        let avg = oracle_optimal(&inst, &OracleConfig::new(Objective::AvgResponse, true)).unwrap();
        assert_eq!(avg.value, ratio(55, 10));
    }

    #[test]
    fn triangle_needs_three_rounds() {
        // odd cycle: no two edges fit together at unit capacity
        let jobs = vec![
            JobSpec::unit(0, 1, 1),
            JobSpec::unit(1, 2, 1),
            JobSpec::unit(0, 2, 1),
        ];
        let inst = Instance::unit_nodes(3, jobs).unwrap();
        let r = oracle_optimal(&inst, &max_cfg()).unwrap();
        assert_eq!(r.value, int(3));
        // splitting helps: each edge at 1/2 per round finishes in 2 rounds
        let split = oracle_optimal(
            &inst,
            &OracleConfig::new(Objective::MaxResponse, false).refinement(2),
        )
        .unwrap();
        assert_eq!(split.value, int(2));
        assert_eq!(split.grid, Some(2));
        assert!(validate_schedule(&inst, &split.schedule, &int(1)).is_valid());
    }

    #[test]
    fn witness_achieves_value() {
        let jobs = vec![
            JobSpec::unit(0, 1, 1),
            JobSpec::unit(0, 1, 1),
            JobSpec::unit(1, 2, 2),
            JobSpec::unit(2, 3, 2),
            JobSpec::unit(0, 3, 3),
        ];
        let inst = Instance::unit_nodes(4, jobs).unwrap();
        for objective in [Objective::MaxResponse, Objective::AvgResponse] {
            let r = oracle_optimal(&inst, &OracleConfig::new(objective, true)).unwrap();
            assert!(validate_schedule(&inst, &r.schedule, &int(1)).is_valid());
            let m = response_summary(&inst, &r.schedule, &[1]).unwrap();
            match objective {
                Objective::MaxResponse => assert_eq!(r.value, int(m.max_response as i64)),
                Objective::AvgResponse => assert_eq!(r.value, m.avg_response),
            }
        }
    }

    #[test]
    fn budget_is_an_error() {
        let jobs = (1..=10).map(|v| JobSpec::unit(0, v, 1)).collect();
        let inst = Instance::unit_nodes(11, jobs).unwrap();
        let err = oracle_optimal(&inst, &max_cfg().budget(3)).unwrap_err();
        assert_eq!(err, OracleError::BudgetExhausted { budget: 3 });
    }

    #[test]
    fn horizon_too_short() {
        let jobs = vec![JobSpec::unit(0, 1, 1), JobSpec::unit(0, 1, 1)];
        let inst = Instance::unit_nodes(2, jobs).unwrap();
        let err = oracle_optimal(&inst, &max_cfg().horizon(1)).unwrap_err();
        assert_eq!(err, OracleError::NoScheduleWithinHorizon { horizon: 1 });
    }

    #[test]
    fn oversized_nonsplitting_job_rejected() {
        let inst = Instance::unit_nodes(2, vec![JobSpec::new(0, 1, int(2), 1)]).unwrap();
        assert!(matches!(
            oracle_optimal(&inst, &max_cfg()),
            Err(OracleError::Unsupported(_))
        ));
    }
}
