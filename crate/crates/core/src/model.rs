//! Problem instances and schedules.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::{Frac, Rational};

pub type NodeId = usize;
pub type JobId = usize;
pub type Round = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub capacity: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: JobId,
    /// Unordered endpoint pair, stored with the smaller id first.
    pub endpoints: (NodeId, NodeId),
    pub demand: Rational,
    pub release: Round,
}

impl Job {
    pub fn touches(&self, node: NodeId) -> bool {
        self.endpoints.0 == node || self.endpoints.1 == node
    }

    pub fn nodes(&self) -> [NodeId; 2] {
        [self.endpoints.0, self.endpoints.1]
    }

    pub fn is_unit(&self) -> bool {
        self.demand.is_one()
    }
}

/// A job before it has been given an id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub u: NodeId,
    pub v: NodeId,
    pub demand: Rational,
    pub release: Round,
}

impl JobSpec {
    pub fn new(u: NodeId, v: NodeId, demand: Rational, release: Round) -> Self {
        JobSpec {
            u,
            v,
            demand,
            release,
        }
    }

    pub fn unit(u: NodeId, v: NodeId, release: Round) -> Self {
        JobSpec::new(u, v, Rational::one(), release)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("node {node}: capacity {capacity} is not positive")]
    NonPositiveCapacity { node: NodeId, capacity: String },
    #[error("job {job}: endpoints must be distinct (self-loop on node {node})")]
    SelfLoop { job: JobId, node: NodeId },
    #[error("job {job}: endpoint {node} out of range (n = {n})")]
    EndpointOutOfRange { job: JobId, node: NodeId, n: usize },
    #[error("job {job}: demand {demand} is not positive")]
    NonPositiveDemand { job: JobId, demand: String },
    #[error("job {job}: release must be at least 1")]
    ZeroRelease { job: JobId },
}

pub(crate) fn check_job(job: &Job, n: usize) -> Result<(), ModelError> {
    let (u, v) = job.endpoints;
    if u == v {
        return Err(ModelError::SelfLoop { job: job.id, node: u });
    }
    for node in [u, v] {
        if node >= n {
            return Err(ModelError::EndpointOutOfRange { job: job.id, node, n });
        }
    }
    if job.demand <= Rational::zero() {
        return Err(ModelError::NonPositiveDemand {
            job: job.id,
            demand: Frac(&job.demand).to_string(),
        });
    }
    if job.release == 0 {
        return Err(ModelError::ZeroRelease { job: job.id });
    }
    Ok(())
}

pub(crate) fn check_capacity(id: NodeId, capacity: &Rational) -> Result<(), ModelError> {
    if *capacity <= Rational::zero() {
        return Err(ModelError::NonPositiveCapacity {
            node: id,
            capacity: Frac(capacity).to_string(),
        });
    }
    Ok(())
}

pub(crate) fn make_job(id: JobId, spec: JobSpec) -> Job {
    let endpoints = if spec.u <= spec.v {
        (spec.u, spec.v)
    } else {
        (spec.v, spec.u)
    };
    Job {
        id,
        endpoints,
        demand: spec.demand,
        release: spec.release,
    }
}

/// Capacitated nodes plus jobs. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    nodes: Vec<Node>,
    jobs: Vec<Job>,
    unit: bool,
}

impl Instance {
    /// Node ids are positions in `capacities`, job ids are positions in `jobs`.
    pub fn new(capacities: Vec<Rational>, jobs: Vec<JobSpec>) -> Result<Self, ModelError> {
        let mut nodes = Vec::with_capacity(capacities.len());
        for (id, capacity) in capacities.into_iter().enumerate() {
            check_capacity(id, &capacity)?;
            nodes.push(Node { id, capacity });
        }
        let n = nodes.len();
        let jobs = jobs
            .into_iter()
            .enumerate()
            .map(|(id, spec)| {
                let job = make_job(id, spec);
                check_job(&job, n).map(|_| job)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_parts(nodes, jobs))
    }

    pub(crate) fn from_parts(nodes: Vec<Node>, jobs: Vec<Job>) -> Self {
        let unit = nodes.iter().all(|n| n.capacity.is_one()) && jobs.iter().all(Job::is_unit);
        Instance { nodes, jobs, unit }
    }

    /// All capacities one.
    pub fn unit_nodes(n: usize, jobs: Vec<JobSpec>) -> Result<Self, ModelError> {
        Instance::new(vec![Rational::one(); n], jobs)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: JobId) -> &Job {
        &self.jobs[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn capacity(&self, node: NodeId) -> &Rational {
        &self.nodes[node].capacity
    }

    /// True iff every demand and every capacity equals one.
    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn last_release(&self) -> Round {
        self.jobs.iter().map(|j| j.release).max().unwrap_or(0)
    }

    /// Job ids grouped by release round, ascending within each round.
    pub fn arrivals_by_round(&self) -> BTreeMap<Round, Vec<JobId>> {
        let mut out: BTreeMap<Round, Vec<JobId>> = BTreeMap::new();
        for job in &self.jobs {
            out.entry(job.release).or_default().push(job.id);
        }
        out
    }
}

/// `x_{j,t}`: the fraction of job `job` executed in round `round`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    pub round: Round,
    pub job: JobId,
    pub fraction: Rational,
}

/// Sparse map `(job, round) -> fraction`, kept sorted by `(round, job)`.
///
/// Entries are not deduplicated so that a malformed schedule (e.g. read from
/// a file) can still be handed to the validator and reported on.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    assignments: Vec<Assignment>,
    nonsplitting: bool,
}

impl Schedule {
    pub fn new(nonsplitting: bool) -> Self {
        Schedule {
            assignments: Vec::new(),
            nonsplitting,
        }
    }

    pub fn from_assignments(nonsplitting: bool, mut assignments: Vec<Assignment>) -> Self {
        assignments.sort_by_key(|a| (a.round, a.job));
        Schedule {
            assignments,
            nonsplitting,
        }
    }

    pub fn push(&mut self, job: JobId, round: Round, fraction: Rational) {
        let a = Assignment { round, job, fraction };
        let pos = self
            .assignments
            .partition_point(|x| (x.round, x.job) <= (a.round, a.job));
        self.assignments.insert(pos, a);
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn is_nonsplitting(&self) -> bool {
        self.nonsplitting
    }

    pub fn set_nonsplitting(&mut self, flag: bool) {
        self.nonsplitting = flag;
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn last_round(&self) -> Round {
        self.assignments.last().map(|a| a.round).unwrap_or(0)
    }

    /// Assignments grouped by round.
    pub fn by_round(&self) -> BTreeMap<Round, Vec<&Assignment>> {
        let mut out: BTreeMap<Round, Vec<&Assignment>> = BTreeMap::new();
        for a in &self.assignments {
            out.entry(a.round).or_default().push(a);
        }
        out
    }

    /// Per-job assignments in round order.
    pub fn by_job(&self) -> BTreeMap<JobId, Vec<&Assignment>> {
        let mut out: BTreeMap<JobId, Vec<&Assignment>> = BTreeMap::new();
        for a in &self.assignments {
            out.entry(a.job).or_default().push(a);
        }
        out
    }

    /// Per-node executed load `sum_{j ∋ i} d_j x_{j,t}` for one round.
    pub fn round_loads(&self, inst: &Instance, round: Round) -> Vec<Rational> {
        let mut loads = vec![Rational::zero(); inst.node_count()];
        for a in self.assignments.iter().filter(|a| a.round == round) {
            if let Some(job) = inst.jobs().get(a.job) {
                for node in job.nodes() {
                    loads[node] += &job.demand * &a.fraction;
                }
            }
        }
        loads
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn rejects_self_loop_and_bad_values() {
        assert!(matches!(
            Instance::unit_nodes(2, vec![JobSpec::unit(0, 0, 1)]),
            Err(ModelError::SelfLoop { .. })
        ));
        assert!(matches!(
            Instance::unit_nodes(2, vec![JobSpec::unit(0, 2, 1)]),
            Err(ModelError::EndpointOutOfRange { .. })
        ));
        assert!(matches!(
            Instance::unit_nodes(2, vec![JobSpec::new(0, 1, int(0), 1)]),
            Err(ModelError::NonPositiveDemand { .. })
        ));
        assert!(matches!(
            Instance::unit_nodes(2, vec![JobSpec::unit(0, 1, 0)]),
            Err(ModelError::ZeroRelease { .. })
        ));
        assert!(matches!(
            Instance::new(vec![int(1), int(0)], vec![]),
            Err(ModelError::NonPositiveCapacity { .. })
        ));
    }

    #[test]
    fn unit_flag_tracks_data() {
        let unit = Instance::unit_nodes(2, vec![JobSpec::unit(1, 0, 1)]).unwrap();
        assert!(unit.is_unit());
        assert_eq!(unit.job(0).endpoints, (0, 1));
        let half = Instance::unit_nodes(2, vec![JobSpec::new(0, 1, ratio(1, 2), 1)]).unwrap();
        assert!(!half.is_unit());
        let cap = Instance::new(vec![int(2), int(1)], vec![JobSpec::unit(0, 1, 1)]).unwrap();
        assert!(!cap.is_unit());
    }

    #[test]
    fn schedule_stays_sorted() {
        let mut s = Schedule::new(false);
        s.push(3, 2, int(1));
        s.push(1, 1, ratio(1, 2));
        s.push(0, 2, int(1));
        let keys: Vec<_> = s.assignments().iter().map(|a| (a.round, a.job)).collect();
        assert_eq!(keys, vec![(1, 1), (2, 0), (2, 3)]);
    }
}
