//! Directed-graph substrate and the brute-force oracles every other module is
//! checked against.
//!
//! Vertices are `0..n`. Edges carry stable ids equal to their position in the
//! edge list, so weight functions and page assignments can be plain vectors.

mod analysis;
pub(crate) mod enumerate;
mod expand;
mod weights;

pub use analysis::{
    is_min_unique_wrt, min_unique_report, shortest_distances, MinUniqueReport, VertexStatus,
};
pub use enumerate::{count_paths_capped, enumerate_paths, PathCount, PathList};
pub use expand::{expand_weights, Expansion, Provenance};
pub use weights::WeightFn;

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type EdgeId = usize;

/// A value that is either a finite non-negative integer or infinity.
///
/// `Finite` orders below `Infinite`, so `min` over costs behaves as expected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cost {
    Finite(u64),
    Infinite,
}

impl Cost {
    pub fn finite(self) -> Option<u64> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Cost::Infinite)
    }
}

impl std::fmt::Display for Cost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    topo_order: Option<Vec<Vertex>>,
    out: Vec<Vec<(Vertex, EdgeId)>>,
    inc: Vec<Vec<(Vertex, EdgeId)>>,
}

impl DiGraph {
    pub fn new(n: usize, edges: Vec<(Vertex, Vertex)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for &(src, dst) in &edges {
            for v in [src, dst] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if src == dst {
                return Err(Error::SelfLoop { src, dst });
            }
            if !seen.insert((src, dst)) {
                return Err(Error::DuplicateEdge { src, dst });
            }
        }
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (id, &(src, dst)) in edges.iter().enumerate() {
            out[src].push((dst, id));
            inc[dst].push((src, id));
        }
        // Sorted adjacency gives lexicographic enumeration for free.
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_unstable();
        }
        Ok(DiGraph {
            n,
            edges,
            topo_order: None,
            out,
            inc,
        })
    }

    /// Attaches a topological order, checking that every edge goes forward in it.
    pub fn with_topo_order(mut self, order: Vec<Vertex>) -> Result<Self> {
        let pos = position_map(self.n, &order)?;
        for &(src, dst) in &self.edges {
            if pos[src] >= pos[dst] {
                return Err(Error::InvalidTopoOrder(format!(
                    "edge {src}->{dst} goes backward"
                )));
            }
        }
        self.topo_order = Some(order);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (Vertex, Vertex) {
        self.edges[id]
    }

    pub fn topo_order(&self) -> Option<&[Vertex]> {
        self.topo_order.as_deref()
    }

    /// Out-neighbours of `v` with edge ids, ascending by neighbour.
    pub fn out_edges(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.out[v]
    }

    /// In-neighbours of `v` with edge ids, ascending by neighbour.
    pub fn in_edges(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.inc[v]
    }

    pub fn has_edge(&self, src: Vertex, dst: Vertex) -> bool {
        self.out[src]
            .binary_search_by_key(&dst, |&(d, _)| d)
            .is_ok()
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    pub fn reversed(&self) -> DiGraph {
        let edges = self.edges.iter().map(|&(s, d)| (d, s)).collect();
        DiGraph::new(self.n, edges).expect("reversal preserves validity")
    }

    /// Copy of the graph without edge `id`. Remaining edges keep their relative
    /// order, so ids above `id` shift down by one.
    pub fn without_edge(&self, id: EdgeId) -> DiGraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != id)
            .map(|(_, &e)| e)
            .collect();
        DiGraph::new(self.n, edges).expect("edge removal preserves validity")
    }

    /// Kahn's algorithm, always taking the smallest ready vertex. `None` on a cycle.
    pub fn topological_sort(&self) -> Option<Vec<Vertex>> {
        let mut indeg: Vec<usize> = (0..self.n).map(|v| self.inc[v].len()).collect();
        let mut ready: std::collections::BTreeSet<Vertex> =
            (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &(w, _) in &self.out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_sort().is_some()
    }

    /// The attached topological order if present, otherwise a computed one.
    pub fn topo_or_sort(&self) -> Result<Vec<Vertex>> {
        match &self.topo_order {
            Some(order) => Ok(order.clone()),
            None => self.topological_sort().ok_or(Error::Cyclic),
        }
    }

    /// Unit-length BFS distances from `s`.
    pub fn bfs_levels(&self, s: Vertex) -> Vec<Option<usize>> {
        let mut level = vec![None; self.n];
        let mut queue = VecDeque::new();
        level[s] = Some(0);
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            let d = level[v].unwrap();
            for &(w, _) in &self.out[v] {
                if level[w].is_none() {
                    level[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        level
    }
}

/// Inverse of a vertex permutation; errors if `order` is not a permutation of `0..n`.
pub(crate) fn position_map(n: usize, order: &[Vertex]) -> Result<Vec<usize>> {
    if order.len() != n {
        return Err(Error::InvalidTopoOrder(format!(
            "order has {} entries, graph has {n} vertices",
            order.len()
        )));
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(Error::InvalidTopoOrder(format!(
                "vertex {v} missing or repeated"
            )));
        }
        pos[v] = i;
    }
    Ok(pos)
}

/// True iff a directed path `s -> t` exists (a vertex reaches itself).
pub fn reach(g: &DiGraph, s: Vertex, t: Vertex) -> Result<bool> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    Ok(g.bfs_levels(s)[t].is_some())
}

/// Fixtures shared by tests, examples and the CLI.
pub mod fixtures {
    use super::DiGraph;

    /// `s -> t` with s = 0, t = 1.
    pub fn edge() -> DiGraph {
        DiGraph::new(2, vec![(0, 1)])
            .unwrap()
            .with_topo_order(vec![0, 1])
            .unwrap()
    }

    /// `s -> x -> t` with s = 0, x = 1, t = 2.
    pub fn line3() -> DiGraph {
        DiGraph::new(3, vec![(0, 1), (1, 2)])
            .unwrap()
            .with_topo_order(vec![0, 1, 2])
            .unwrap()
    }

    /// s = 0, a = 1, b = 2, t = 3; edges s->a, s->b, a->t, b->t in that id order.
    pub fn diamond() -> DiGraph {
        DiGraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)])
            .unwrap()
            .with_topo_order(vec![0, 1, 2, 3])
            .unwrap()
    }

    /// u1..u4 as 0..3 with edges (u1,u2), (u1,u3), (u2,u3), (u2,u4).
    pub fn fig3() -> DiGraph {
        DiGraph::new(4, vec![(0, 1), (0, 2), (1, 2), (1, 3)])
            .unwrap()
            .with_topo_order(vec![0, 1, 2, 3])
            .unwrap()
    }

    /// `k` diamonds glued end to end: 2^k source-sink paths on 3k+1 vertices.
    pub fn diamond_chain(k: usize) -> DiGraph {
        let n = 3 * k + 1;
        let mut edges = Vec::with_capacity(4 * k);
        for i in 0..k {
            let s = 3 * i;
            edges.extend([(s, s + 1), (s, s + 2), (s + 1, s + 3), (s + 2, s + 3)]);
        }
        DiGraph::new(n, edges)
            .unwrap()
            .with_topo_order((0..n).collect())
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn rejects_malformed_edges() {
        assert_eq!(
            DiGraph::new(2, vec![(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        );
        assert_eq!(
            DiGraph::new(2, vec![(1, 1)]),
            Err(Error::SelfLoop { src: 1, dst: 1 })
        );
        assert_eq!(
            DiGraph::new(2, vec![(0, 1), (0, 1)]),
            Err(Error::DuplicateEdge { src: 0, dst: 1 })
        );
    }

    #[test]
    fn topo_order_must_point_forward() {
        let g = DiGraph::new(2, vec![(0, 1)]).unwrap();
        assert!(g.clone().with_topo_order(vec![1, 0]).is_err());
        assert!(g.clone().with_topo_order(vec![0]).is_err());
        assert!(g.with_topo_order(vec![0, 1]).is_ok());
    }

    #[test]
    fn reach_fixtures() {
        assert!(reach(&edge(), 0, 1).unwrap());
        assert!(!reach(&edge(), 1, 0).unwrap());
        assert!(reach(&fig3(), 0, 3).unwrap());
        assert!(matches!(
            reach(&edge(), 0, 5),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn cycle_detection() {
        let g = DiGraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!g.is_acyclic());
        assert_eq!(fig3().topological_sort(), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn without_edge_shifts_ids() {
        let g = diamond().without_edge(1);
        assert_eq!(g.edges(), &[(0, 1), (1, 3), (2, 3)]);
    }
}
