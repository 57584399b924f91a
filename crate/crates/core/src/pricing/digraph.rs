//! Difference-constraint digraphs and single-source shortest paths with
//! negative-cycle detection.

use crate::error::Error;
use crate::market::{Matching, ValuationMatrix};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub length: Rational,
}

/// Digraph on nodes `0..=n` where node 0 is the source.
///
/// Node `i >= 1` stands for buyer `i - 1` and, after relabeling, for the
/// product that buyer holds in the matching the graph was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintDigraph {
    n: usize,
    edges: Vec<Edge>,
}

impl ConstraintDigraph {
    /// Arbitrary digraph on `0..=n`. Zero-length source edges `0 -> i` are
    /// added for every `i` in `1..=n`; `edges` must not touch node 0.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, Error> {
        for edge in &edges {
            for node in [edge.from, edge.to] {
                if node == 0 || node > n {
                    return Err(Error::IndexOutOfRange { what: "node", index: node, n });
                }
            }
        }
        let mut all: Vec<Edge> = (1..=n)
            .map(|i| Edge { from: 0, to: i, length: Rational::zero() })
            .collect();
        all.extend(edges);
        Ok(Self { n, edges: all })
    }

    /// The constraint graph for `matching`, with products relabeled so the
    /// matching is the diagonal: edge `j -> i` has length
    /// `v[i][M(i)] - v[i][M(j)]` for every `i != j`.
    ///
    /// `matching` must be perfect for the market size.
    pub(crate) fn from_matching(valuations: &ValuationMatrix, assignment: &[usize]) -> Self {
        let n = valuations.n();
        let mut edges = Vec::with_capacity(n * n);
        for (i, &mine) in assignment.iter().enumerate() {
            let own = valuations.get(i, mine);
            for (j, &theirs) in assignment.iter().enumerate() {
                if i != j {
                    edges.push(Edge {
                        from: j + 1,
                        to: i + 1,
                        length: own - valuations.get(i, theirs),
                    });
                }
            }
        }
        Self::new(n, edges).expect("nodes in range")
    }

    pub fn for_matching(valuations: &ValuationMatrix, matching: &Matching) -> Result<Self, Error> {
        let n = valuations.n();
        matching.validate(n)?;
        let assignment = matching.assignment(n).ok_or(Error::NotPerfect {
            size: matching.len(),
            n,
        })?;
        Ok(Self::from_matching(valuations, &assignment))
    }

    /// Number of non-source nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

/// A directed cycle `nodes[0] -> nodes[1] -> ... -> nodes[m-1] -> nodes[0]`
/// of strictly negative total length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeCycle {
    pub nodes: Vec<usize>,
    pub total_length: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShortestPathResult {
    /// `distances[i - 1]` is the shortest distance from 0 to node `i`, and
    /// `predecessors[i - 1]` the node before `i` on one such path.
    Distances {
        distances: Vec<Rational>,
        predecessors: Vec<usize>,
    },
    NegativeCycle(NegativeCycle),
}

/// Bellman-Ford from node 0. After `n` relaxation rounds over the `n + 1`
/// nodes every shortest simple path is final, so an edge that still relaxes
/// in round `n + 1` exposes a negative cycle, recovered from the predecessor
/// edges.
pub fn shortest_paths_or_cycle(graph: &ConstraintDigraph) -> ShortestPathResult {
    let nodes = graph.n + 1;
    let mut dist: Vec<Option<Rational>> = vec![None; nodes];
    let mut pred_edge: Vec<Option<usize>> = vec![None; nodes];
    dist[0] = Some(Rational::zero());

    let relax = |dist: &mut [Option<Rational>], pred_edge: &mut [Option<usize>]| -> Option<usize> {
        let mut last = None;
        for (k, edge) in graph.edges.iter().enumerate() {
            let Some(base) = &dist[edge.from] else { continue };
            let candidate = base + &edge.length;
            if dist[edge.to].as_ref().is_none_or(|d| candidate < *d) {
                dist[edge.to] = Some(candidate);
                pred_edge[edge.to] = Some(k);
                last = Some(edge.to);
            }
        }
        last
    };

    let mut changed = None;
    for _ in 0..nodes {
        changed = relax(&mut dist, &mut pred_edge);
        if changed.is_none() {
            break;
        }
    }

    let Some(mut node) = changed else {
        let distances = dist[1..].iter().map(|d| d.clone().expect("source reaches every node")).collect();
        let predecessors = pred_edge[1..]
            .iter()
            .map(|e| graph.edges[e.expect("every node has a predecessor")].from)
            .collect();
        return ShortestPathResult::Distances { distances, predecessors };
    };

    // Walking back `nodes` predecessor edges from a node relaxed in the last
    // round is guaranteed to land on the cycle.
    for _ in 0..nodes {
        node = graph.edges[pred_edge[node].expect("relaxed node has a predecessor")].from;
    }
    let start = node;
    let mut cycle_edges = Vec::new();
    loop {
        let k = pred_edge[node].expect("cycle node has a predecessor");
        cycle_edges.push(k);
        node = graph.edges[k].from;
        if node == start {
            break;
        }
    }
    cycle_edges.reverse();
    let nodes_in_order: Vec<usize> = cycle_edges.iter().map(|&k| graph.edges[k].from).collect();
    let total_length = cycle_edges.iter().map(|&k| &graph.edges[k].length).sum();
    ShortestPathResult::NegativeCycle(NegativeCycle {
        nodes: nodes_in_order,
        total_length,
    })
}
