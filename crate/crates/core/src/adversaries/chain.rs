//! The adaptive chain adversary.
//!
//! Nodes `0..4K+5` form a path. The edge between nodes `x` and `x + 1` has
//! label `x - 2K - 2`, so labels run from `-2K-2` to `2K+1`. Black node `v`
//! (for `-K <= v <= K`) is node `2v + 2K + 2`, the shared endpoint of edges
//! `2v - 1` and `2v`. The remaining interior nodes `1, 3, ..., 4K+3` are the
//! unlabelled candidates; each touches one even edge on its left and one odd
//! edge on its right.

use std::fmt;

use num_traits::Zero;

use crate::metrics::response_summary;
use crate::model::{Instance, Job, JobId, Node, NodeId, Round, Schedule};
use crate::rational::{int, ratio, Rational};
use crate::sim::{RoundRecord, Scheduler, SimError, Simulation};

#[derive(Debug, thiserror::Error)]
pub enum AdversaryError {
    #[error("chain parameter K must be at least 1 (got {0})")]
    ChainSize(u64),
    #[error("{name} must be at least {min} (got {value})")]
    Parameter {
        name: &'static str,
        min: u64,
        value: u64,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("scheduler evaded termination: subroutine k={k} c={c} exceeded {cap} rounds")]
    Evaded { k: u64, c: u64, cap: u64 },
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainTopology {
    k: u64,
}

impl ChainTopology {
    pub fn new(k: u64) -> Result<Self, AdversaryError> {
        if k < 1 {
            return Err(AdversaryError::ChainSize(k));
        }
        Ok(ChainTopology { k })
    }

    /// The chain parameter `K`.
    pub fn size(&self) -> u64 {
        self.k
    }

    pub fn node_count(&self) -> usize {
        4 * self.k as usize + 5
    }

    fn offset(&self) -> i64 {
        2 * self.k as i64 + 2
    }

    pub fn edge_labels(&self) -> std::ops::RangeInclusive<i64> {
        -self.offset()..=self.offset() - 1
    }

    pub fn black_labels(&self) -> std::ops::RangeInclusive<i64> {
        -(self.k as i64)..=self.k as i64
    }

    /// Endpoints of the edge with `label`, left node first.
    pub fn edge_nodes(&self, label: i64) -> (NodeId, NodeId) {
        assert!(
            self.edge_labels().contains(&label),
            "edge label {label} out of range"
        );
        let x = (label + self.offset()) as usize;
        (x, x + 1)
    }

    /// Label of the edge whose endpoints are `(u, v)`, if they are adjacent.
    pub fn edge_label(&self, u: NodeId, v: NodeId) -> Option<i64> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        (b == a + 1 && b < self.node_count()).then(|| a as i64 - self.offset())
    }

    pub fn black_node(&self, v: i64) -> NodeId {
        assert!(self.black_labels().contains(&v), "black label {v} out of range");
        (2 * v + self.offset()) as usize
    }

    pub fn black_label(&self, node: NodeId) -> Option<i64> {
        let v = node as i64 - self.offset();
        (v % 2 == 0 && self.black_labels().contains(&(v / 2))).then_some(v / 2)
    }

    /// Unlabelled interior nodes, left to right.
    pub fn candidates(&self) -> impl Iterator<Item = NodeId> {
        (1..self.node_count() - 1).step_by(2)
    }

    /// `(even, odd)` edge labels adjacent to a candidate node.
    pub fn candidate_edges(&self, node: NodeId) -> (i64, i64) {
        assert!(
            node % 2 == 1 && node < self.node_count() - 1,
            "node {node} is not a candidate"
        );
        let right = node as i64 - self.offset();
        (right - 1, right)
    }

    pub fn nodes(&self) -> Vec<Node> {
        (0..self.node_count())
            .map(|id| Node { id, capacity: int(1) })
            .collect()
    }
}

/// Job-free chain instance plus its labelling.
pub fn build_chain(k: u64) -> Result<(Instance, ChainTopology), AdversaryError> {
    let topo = ChainTopology::new(k)?;
    Ok((Instance::from_parts(topo.nodes(), Vec::new()), topo))
}

/// Edge labels receiving a request in subroutine round `t` (1-based).
pub fn subroutine_arrivals(k: u64, c_big: u64, t: u64) -> Vec<i64> {
    let k = k as i64;
    let l = t.div_ceil(c_big) as i64 - 1;
    let mut labels = Vec::new();
    for v in -k..=k {
        if v < -l {
            labels.push(2 * v - 1);
        } else if v > l {
            labels.push(2 * v);
        } else {
            labels.push(2 * v - 1);
            labels.push(2 * v);
        }
    }
    labels
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhaseKind {
    Subroutine,
    Drain,
    Spread,
    Final,
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseKind::Subroutine => "subroutine",
            PhaseKind::Drain => "drain",
            PhaseKind::Spread => "spread",
            PhaseKind::Final => "final",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase {
    pub kind: PhaseKind,
    pub k: u64,
    pub c: u64,
    pub first_round: Round,
    pub last_round: Round,
    /// Subroutine only: the node whose load reached the target.
    pub returned: Option<NodeId>,
    /// Subroutine only: smallest pending load over odd edges when it began,
    /// and whether that met `(Ck + c)/2`.
    pub min_odd_load: Option<Rational>,
    pub precondition_met: Option<bool>,
}

impl Phase {
    pub fn label(&self) -> String {
        format!("{} k={} c={}", self.kind, self.k, self.c)
    }
}

#[derive(Debug, Clone)]
pub struct AdversaryTrace {
    pub topology: ChainTopology,
    pub c_big: u64,
    pub scheduler: String,
    pub params: String,
    pub augmentation: Rational,
    /// Every emitted job, with its release round.
    pub instance: Instance,
    pub schedule: Schedule,
    pub history: Vec<RoundRecord>,
    /// Pending load per edge at the end of each round, indexed by
    /// `label + 2K + 2`.
    pub edge_loads: Vec<Vec<Rational>>,
    pub phases: Vec<Phase>,
    pub max_response: u64,
}

impl AdversaryTrace {
    pub fn returned_nodes(&self) -> Vec<NodeId> {
        self.phases.iter().filter_map(|p| p.returned).collect()
    }

    /// Phase label of every round, aligned with `history`.
    pub fn round_labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.history.len());
        for p in &self.phases {
            for _ in p.first_round..=p.last_round {
                out.push(p.label());
            }
        }
        out
    }
}

/// A live adversary run: a simulation plus the jobs emitted so far.
pub struct ChainSession<S: Scheduler> {
    topo: ChainTopology,
    sim: Simulation<S>,
    jobs: Vec<Job>,
    edge_loads: Vec<Vec<Rational>>,
}

impl<S: Scheduler> ChainSession<S> {
    pub fn new(topo: ChainTopology, scheduler: S, augmentation: Rational) -> Self {
        ChainSession {
            topo,
            sim: Simulation::new(topo.nodes(), scheduler, augmentation),
            jobs: Vec::new(),
            edge_loads: Vec::new(),
        }
    }

    pub fn topology(&self) -> &ChainTopology {
        &self.topo
    }

    pub fn simulation(&self) -> &Simulation<S> {
        &self.sim
    }

    pub fn round(&self) -> Round {
        self.sim.state().round()
    }

    /// Pending load on every edge, indexed by `label + 2K + 2`.
    pub fn current_edge_loads(&self) -> Vec<Rational> {
        let state = self.sim.state();
        let mut loads = vec![Rational::zero(); self.topo.node_count() - 1];
        for (id, rem) in state.pending() {
            let job = state.job(id);
            let (u, _) = job.endpoints;
            loads[u] += &job.demand * rem;
        }
        loads
    }

    pub fn edge_load(&self, label: i64) -> Rational {
        let (u, _) = self.topo.edge_nodes(label);
        self.current_edge_loads().swap_remove(u)
    }

    /// Pending load on a node: the sum over its adjacent edges.
    pub fn node_load(&self, node: NodeId) -> &Rational {
        self.sim.state().pending_load(node)
    }

    /// Runs one round in which one unit request arrives on each listed edge.
    pub fn emit(&mut self, labels: &[i64]) -> Result<&RoundRecord, AdversaryError> {
        let release = self.round() + 1;
        let mut batch = Vec::with_capacity(labels.len());
        for &label in labels {
            let job = Job {
                id: self.jobs.len(),
                endpoints: self.topo.edge_nodes(label),
                demand: int(1),
                release,
            };
            self.jobs.push(job.clone());
            batch.push(job);
        }
        self.sim.step(batch)?;
        self.edge_loads.push(self.current_edge_loads());
        Ok(self.sim.history().last().unwrap())
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }
}

/// One call of the subroutine with parameters `k <= K`, `c <= C`.
///
/// Each round emits the pattern of [`subroutine_arrivals`], lets the
/// scheduler act, and picks the candidate with the largest pending load
/// (leftmost on ties). Stops once that load reaches `(Ck + c + 1)/2` and
/// returns the node with the number of rounds emitted.
pub fn run_subroutine<S: Scheduler>(
    session: &mut ChainSession<S>,
    k: u64,
    c: u64,
    c_big: u64,
) -> Result<(u64, NodeId), AdversaryError> {
    if k > session.topo.size() {
        return Err(AdversaryError::Invalid(format!(
            "k = {k} exceeds K = {}",
            session.topo.size()
        )));
    }
    if c_big < 1 || c > c_big {
        return Err(AdversaryError::Invalid(format!(
            "need 0 <= c <= C and C >= 1 (c = {c}, C = {c_big})"
        )));
    }
    let target = ratio((c_big * k + c + 1) as i64, 2);
    let cap = 4 * (c_big * k + c + 1) * c_big;
    for t in 1..=cap {
        session.emit(&subroutine_arrivals(k, c_big, t))?;
        let mut best: Option<NodeId> = None;
        for node in session.topo.candidates() {
            if best.is_none_or(|b| session.node_load(node) > session.node_load(b)) {
                best = Some(node);
            }
        }
        let i = best.expect("chain has candidates");
        if *session.node_load(i) >= target {
            return Ok((t, i));
        }
    }
    Err(AdversaryError::Evaded { k, c, cap })
}

/// Smallest pending load over all odd edges.
fn min_odd_load<S: Scheduler>(session: &ChainSession<S>) -> Rational {
    let loads = session.current_edge_loads();
    let offset = session.topo.offset();
    session
        .topo
        .edge_labels()
        .filter(|l| l.rem_euclid(2) == 1)
        .map(|l| loads[(l + offset) as usize].clone())
        .min()
        .unwrap_or_else(Rational::zero)
}

/// Full adversarial input against `scheduler`, then runs until every job is
/// done.
///
/// For `k = 0..=K` and `c = 0..=C`: one subroutine call returning node `i`;
/// `C` rounds with one request on `i`, alternating odd and even edges and
/// starting odd; then `2K + 2` repetitions of `Cn` rounds with a request on
/// every even edge followed by `Cn` rounds with a request on every odd edge.
pub fn run_adversary<S: Scheduler>(
    big_k: u64,
    c_big: u64,
    scheduler: S,
    augmentation: Rational,
) -> Result<AdversaryTrace, AdversaryError> {
    let topo = ChainTopology::new(big_k)?;
    if c_big < 1 {
        return Err(AdversaryError::Parameter {
            name: "C",
            min: 1,
            value: c_big,
        });
    }
    let name = scheduler.name().to_string();
    let params = scheduler.params();
    let mut session = ChainSession::new(topo, scheduler, augmentation.clone());
    let mut phases = Vec::new();
    let n = topo.node_count() as u64;
    let evens: Vec<i64> = topo.edge_labels().filter(|l| l.rem_euclid(2) == 0).collect();
    let odds: Vec<i64> = topo.edge_labels().filter(|l| l.rem_euclid(2) == 1).collect();

    for k in 0..=big_k {
        for c in 0..=c_big {
            let start = session.round() + 1;
            let min_odd = min_odd_load(&session);
            let met = min_odd >= ratio((c_big * k + c) as i64, 2);
            let (_, i) = run_subroutine(&mut session, k, c, c_big)?;
            phases.push(Phase {
                kind: PhaseKind::Subroutine,
                k,
                c,
                first_round: start,
                last_round: session.round(),
                returned: Some(i),
                min_odd_load: Some(min_odd),
                precondition_met: Some(met),
            });

            let start = session.round() + 1;
            let (even, odd) = topo.candidate_edges(i);
            for r in 0..c_big {
                session.emit(&[if r % 2 == 0 { odd } else { even }])?;
            }
            phases.push(plain(PhaseKind::Drain, k, c, start, session.round()));

            let start = session.round() + 1;
            for _ in 0..2 * big_k + 2 {
                for edges in [&evens, &odds] {
                    for _ in 0..c_big * n {
                        session.emit(edges)?;
                    }
                }
            }
            phases.push(plain(PhaseKind::Spread, k, c, start, session.round()));
        }
    }

    let start = session.round() + 1;
    let guard = session.round() + 4 * (session.jobs.len() as u64 + 1);
    while session.sim.state().pending_count() > 0 {
        if session.round() >= guard {
            session.sim.drain(guard)?;
        }
        session.emit(&[])?;
    }
    if session.round() >= start {
        phases.push(plain(PhaseKind::Final, big_k, c_big, start, session.round()));
    }

    let ChainSession {
        sim,
        jobs,
        edge_loads,
        ..
    } = session;
    let instance = Instance::from_parts(topo.nodes(), jobs);
    let outcome = sim.into_outcome();
    let max_response = response_summary(&instance, &outcome.schedule, &[])
        .map(|r| r.max_response)
        .map_err(|e| AdversaryError::Invalid(e.to_string()))?;
    Ok(AdversaryTrace {
        topology: topo,
        c_big,
        scheduler: name,
        params,
        augmentation,
        instance,
        schedule: outcome.schedule,
        history: outcome.history,
        edge_loads,
        phases,
        max_response,
    })
}

fn plain(kind: PhaseKind, k: u64, c: u64, first_round: Round, last_round: Round) -> Phase {
    Phase {
        kind,
        k,
        c,
        first_round,
        last_round,
        returned: None,
        min_odd_load: None,
        precondition_met: None,
    }
}

/// Ids of jobs released during `phase`.
pub fn phase_jobs<'a>(trace: &'a AdversaryTrace, phase: &'a Phase) -> impl Iterator<Item = JobId> + 'a {
    trace
        .instance
        .jobs()
        .iter()
        .filter(move |j| (phase.first_round..=phase.last_round).contains(&j.release))
        .map(|j| j.id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedulers::FifoMatching;
    use crate::schedulers::{PropAllocParams, ProportionalAllocation};

    #[test]
    fn chain_labels() {
        let (inst, topo) = build_chain(1).unwrap();
        assert_eq!(inst.node_count(), 9);
        assert_eq!(topo.edge_labels(), -4..=3);
        assert_eq!(topo.black_labels(), -1..=1);
        assert_eq!(build_chain(2).unwrap().1.node_count(), 13);
        let b0 = topo.black_node(0);
        assert_eq!(topo.edge_nodes(-1).1, b0);
        assert_eq!(topo.edge_nodes(0).0, b0);
        assert_eq!(topo.black_label(b0), Some(0));
        assert_eq!(topo.candidates().collect::<Vec<_>>(), vec![1, 3, 5, 7]);
        assert_eq!(topo.candidate_edges(3), (-2, -1));
        assert_eq!(topo.edge_label(4, 3), Some(-1));
        assert!(build_chain(0).is_err());
    }

    #[test]
    fn arrival_pattern() {
        // k = 2, C = 1, t = 1 (l = 0): odd edge of -2 and -1, both of 0, even of 1 and 2
        assert_eq!(subroutine_arrivals(2, 1, 1), vec![-5, -3, -1, 0, 2, 4]);
        assert_eq!(subroutine_arrivals(2, 1, 2), vec![-5, -3, -2, -1, 0, 1, 2, 4]);
        assert_eq!(subroutine_arrivals(0, 3, 7), vec![-1, 0]);
    }

    #[test]
    fn propalloc_subroutine_fixture() {
        let topo = ChainTopology::new(1).unwrap();
        let unaugmented = ProportionalAllocation::new(PropAllocParams::new(int(0)).unwrap());
        let mut s = ChainSession::new(topo, unaugmented, int(1));
        let (rounds, i) = run_subroutine(&mut s, 0, 0, 1).unwrap();
        assert_eq!(rounds, 1);
        assert!(*s.node_load(i) >= ratio(1, 2));

        // with capacity 2 every arrival finishes at once and no load builds up
        let augmented = ProportionalAllocation::new(PropAllocParams::new(int(1)).unwrap());
        let mut s = ChainSession::new(topo, augmented, int(2));
        assert!(matches!(
            run_subroutine(&mut s, 0, 0, 1),
            Err(AdversaryError::Evaded { k: 0, c: 0, cap: 4 })
        ));
    }

    #[test]
    fn small_run_is_replayable() {
        let trace = run_adversary(1, 1, FifoMatching::unaugmented(), int(1)).unwrap();
        assert_eq!(trace.returned_nodes().len(), 4);
        assert_eq!(trace.round_labels().len(), trace.history.len());
        assert!(trace.max_response >= 1);
        let replay =
            crate::sim::simulate_instance(&trace.instance, FifoMatching::unaugmented(), int(1), None)
                .unwrap();
        assert_eq!(replay.schedule, trace.schedule);
    }
}
