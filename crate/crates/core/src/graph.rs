//! Multigraphs of pending unit requests and their 2-factor decomposition.
//!
//! A multigraph with maximum degree `Δ` splits into `⌈Δ/2⌉` spanning
//! subgraphs of maximum degree 2:
//!
//! 1. pair up odd-degree nodes with dummy edges so every degree is even;
//! 2. walk an Eulerian circuit of each component and orient edges along it,
//!    so every node has equal in- and out-degree, at most `⌈Δ/2⌉`;
//! 3. edge-colour the bipartite (out-copy, in-copy) graph with `⌈Δ/2⌉`
//!    colours using alternating-path recolouring;
//! 4. each colour class gives every node at most one outgoing and one
//!    incoming edge, i.e. undirected degree at most 2. Dummies are dropped.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Job, JobId, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {edge} is a self-loop on node {node}")]
    SelfLoop { edge: JobId, node: NodeId },
    #[error("edge id {0} appears twice")]
    DuplicateEdge(JobId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: JobId,
    pub u: NodeId,
    pub v: NodeId,
}

/// Undirected multigraph keyed by job id. Parallel edges allowed.
#[derive(Debug, Clone, Default)]
pub struct MultiGraph {
    edges: Vec<Edge>,
    degree: BTreeMap<NodeId, usize>,
}

impl MultiGraph {
    pub fn new(edges: impl IntoIterator<Item = (JobId, NodeId, NodeId)>) -> Result<Self, GraphError> {
        let mut g = MultiGraph::default();
        let mut ids = BTreeSet::new();
        for (id, u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { edge: id, node: u });
            }
            if !ids.insert(id) {
                return Err(GraphError::DuplicateEdge(id));
            }
            g.edges.push(Edge { id, u, v });
            *g.degree.entry(u).or_insert(0) += 1;
            *g.degree.entry(v).or_insert(0) += 1;
        }
        g.edges.sort_by_key(|e| e.id);
        Ok(g)
    }

    pub fn from_jobs<'a>(jobs: impl IntoIterator<Item = &'a Job>) -> Result<Self, GraphError> {
        MultiGraph::new(jobs.into_iter().map(|j| (j.id, j.endpoints.0, j.endpoints.1)))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.degree.get(&node).copied().unwrap_or(0)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.degree.keys().copied()
    }

    pub fn max_degree(&self) -> usize {
        self.degree.values().copied().max().unwrap_or(0)
    }
}

/// Edge-id sets, each inducing maximum degree at most 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoFactorSet {
    pub factors: Vec<Vec<JobId>>,
}

impl TwoFactorSet {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Working edge: endpoints as dense indices, `job = None` for dummies.
#[derive(Clone, Copy)]
struct WEdge {
    a: usize,
    b: usize,
    job: Option<JobId>,
}

/// Hierholzer walk over every component, starting each at its lowest node
/// and always taking the lowest unused incident edge. Returns each edge
/// oriented `(tail, head)` in traversal order.
fn euler_orient(node_count: usize, edges: &[WEdge]) -> Vec<(usize, usize, usize)> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); node_count];
    for (e, w) in edges.iter().enumerate() {
        adj[w.a].push(e);
        adj[w.b].push(e);
    }
    let mut used = vec![false; edges.len()];
    let mut cursor = vec![0usize; node_count];
    let mut oriented = Vec::with_capacity(edges.len());

    for start in 0..node_count {
        // stack of (node, edge used to arrive)
        let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
        while let Some(&(v, _)) = stack.last() {
            let mut advanced = false;
            while cursor[v] < adj[v].len() {
                let e = adj[v][cursor[v]];
                cursor[v] += 1;
                if used[e] {
                    continue;
                }
                used[e] = true;
                let w = if edges[e].a == v { edges[e].b } else { edges[e].a };
                stack.push((w, Some(e)));
                advanced = true;
                break;
            }
            if !advanced {
                let (head, via) = stack.pop().unwrap();
                if let (Some(e), Some(&(tail, _))) = (via, stack.last()) {
                    oriented.push((tail, head, e));
                }
            }
        }
    }
    oriented.reverse();
    oriented
}

/// Proper edge colouring of a bipartite multigraph with `colors` colours,
/// where `colors` is at least the maximum degree. Left and right vertex sets
/// are both indexed `0..side`.
fn bipartite_edge_coloring(side: usize, colors: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    // at[vertex][colour] = edge index; left vertices first, then right.
    let mut at: Vec<Vec<Option<usize>>> = vec![vec![None; colors]; 2 * side];
    let mut color = vec![usize::MAX; edges.len()];
    let free = |at: &Vec<Vec<Option<usize>>>, v: usize| at[v].iter().position(Option::is_none).unwrap();

    for (e, &(l, r)) in edges.iter().enumerate() {
        let (lv, rv) = (l, side + r);
        let a = free(&at, lv);
        if at[rv][a].is_some() {
            let b = free(&at, rv);
            // Swap colours a/b along the alternating path from rv that starts
            // with colour a. It cannot reach lv, since lv misses a and the
            // graph is bipartite.
            let mut path = Vec::new();
            let mut v = rv;
            let mut c = a;
            while let Some(pe) = at[v][c] {
                path.push(pe);
                let (pl, pr) = edges[pe];
                v = if v == pl { side + pr } else { pl };
                c = if c == a { b } else { a };
            }
            for &pe in &path {
                let (pl, pr) = edges[pe];
                let old = color[pe];
                at[pl][old] = None;
                at[side + pr][old] = None;
            }
            for &pe in &path {
                let (pl, pr) = edges[pe];
                let new = if color[pe] == a { b } else { a };
                color[pe] = new;
                at[pl][new] = Some(pe);
                at[side + pr][new] = Some(pe);
            }
        }
        color[e] = a;
        at[lv][a] = Some(e);
        at[rv][a] = Some(e);
    }
    color
}

/// Splits `g` into at most `⌈Δ/2⌉` edge-disjoint spanning subgraphs of
/// maximum degree 2. Empty classes are dropped; edges inside a factor are in
/// ascending id order. Deterministic for a given graph.
pub fn two_factor_decomposition(g: &MultiGraph) -> TwoFactorSet {
    let delta = g.max_degree();
    if delta == 0 {
        return TwoFactorSet { factors: Vec::new() };
    }
    let colors = delta.div_ceil(2);

    let index: BTreeMap<NodeId, usize> = g.nodes().enumerate().map(|(i, v)| (v, i)).collect();
    let count = index.len();
    let mut work: Vec<WEdge> = g
        .edges()
        .iter()
        .map(|e| WEdge {
            a: index[&e.u],
            b: index[&e.v],
            job: Some(e.id),
        })
        .collect();

    let odd: Vec<usize> = g
        .nodes()
        .filter(|&v| g.degree(v) % 2 == 1)
        .map(|v| index[&v])
        .collect();
    for pair in odd.chunks(2) {
        work.push(WEdge {
            a: pair[0],
            b: pair[1],
            job: None,
        });
    }

    let oriented = euler_orient(count, &work);
    let arcs: Vec<(usize, usize)> = oriented.iter().map(|&(t, h, _)| (t, h)).collect();
    let coloring = bipartite_edge_coloring(count, colors, &arcs);

    let mut factors: Vec<Vec<JobId>> = vec![Vec::new(); colors];
    for (k, &(_, _, e)) in oriented.iter().enumerate() {
        if let Some(job) = work[e].job {
            factors[coloring[k]].push(job);
        }
    }
    let factors = factors
        .into_iter()
        .filter(|f| !f.is_empty())
        .map(|mut f| {
            f.sort_unstable();
            f
        })
        .collect();
    TwoFactorSet { factors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(g: &MultiGraph, set: &TwoFactorSet) {
        let mut seen = BTreeSet::new();
        for f in &set.factors {
            let mut deg: BTreeMap<NodeId, usize> = BTreeMap::new();
            for id in f {
                assert!(seen.insert(*id), "edge {id} in two factors");
                let e = g.edges().iter().find(|e| e.id == *id).unwrap();
                *deg.entry(e.u).or_default() += 1;
                *deg.entry(e.v).or_default() += 1;
            }
            assert!(deg.values().all(|&d| d <= 2));
        }
        assert_eq!(seen.len(), g.edges().len());
        assert!(set.len() <= g.max_degree().div_ceil(2));
    }

    #[test]
    fn triangle_is_one_factor() {
        let g = MultiGraph::new([(0, 0, 1), (1, 1, 2), (2, 0, 2)]).unwrap();
        let set = two_factor_decomposition(&g);
        assert_eq!(set.factors, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn single_edge() {
        let g = MultiGraph::new([(7, 3, 9)]).unwrap();
        assert_eq!(two_factor_decomposition(&g).factors, vec![vec![7]]);
    }

    #[test]
    fn k4_uses_two_factors() {
        let g = MultiGraph::new([(0, 0, 1), (1, 0, 2), (2, 0, 3), (3, 1, 2), (4, 1, 3), (5, 2, 3)]).unwrap();
        let set = two_factor_decomposition(&g);
        check(&g, &set);
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn star_and_parallel_edges() {
        let g = MultiGraph::new((0..7).map(|i| (i, 0, 1 + i % 3))).unwrap();
        let set = two_factor_decomposition(&g);
        check(&g, &set);
        assert_eq!(set.len(), 4);
    }

    #[test]
    fn empty_graph() {
        let g = MultiGraph::new([]).unwrap();
        assert!(two_factor_decomposition(&g).is_empty());
    }

    #[test]
    fn rejects_self_loop() {
        assert_eq!(
            MultiGraph::new([(0, 2, 2)]).unwrap_err(),
            GraphError::SelfLoop { edge: 0, node: 2 }
        );
    }
}
