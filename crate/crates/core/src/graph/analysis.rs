use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{DiGraph, Vertex, WeightFn};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VertexStatus {
    Unreachable,
    UniqueMin { dist: u64 },
    Tied { dist: u64, multiplicity: BigUint },
}

impl VertexStatus {
    pub fn dist(&self) -> Option<u64> {
        match self {
            VertexStatus::Unreachable => None,
            VertexStatus::UniqueMin { dist } | VertexStatus::Tied { dist, .. } => Some(*dist),
        }
    }

    /// Number of minimum-weight paths (0 when unreachable).
    pub fn multiplicity(&self) -> BigUint {
        match self {
            VertexStatus::Unreachable => BigUint::zero(),
            VertexStatus::UniqueMin { .. } => BigUint::one(),
            VertexStatus::Tied { multiplicity, .. } => multiplicity.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinUniqueReport {
    pub source: Vertex,
    pub vertices: Vec<VertexStatus>,
    pub min_unique_wrt_s: bool,
}

impl MinUniqueReport {
    /// First vertex (by index) whose minimum is tied.
    pub fn first_tie(&self) -> Option<Vertex> {
        self.vertices
            .iter()
            .position(|st| matches!(st, VertexStatus::Tied { .. }))
    }
}

/// Weighted shortest distances from `s` (Dijkstra; weights are positive).
pub fn shortest_distances(g: &DiGraph, w: &WeightFn, s: Vertex) -> Result<Vec<Option<u64>>> {
    g.check_vertex(s)?;
    w.check_for(g)?;
    let mut dist: Vec<Option<u64>> = vec![None; g.n()];
    let mut heap = BinaryHeap::new();
    dist[s] = Some(0);
    heap.push(Reverse((0u64, s)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v] != Some(d) {
            continue;
        }
        for &(x, id) in g.out_edges(v) {
            let nd = d
                .checked_add(w.get(id))
                .ok_or(Error::Overflow("path weight"))?;
            if dist[x].is_none_or(|old| nd < old) {
                dist[x] = Some(nd);
                heap.push(Reverse((nd, x)));
            }
        }
    }
    Ok(dist)
}

/// Minimum path weight and exact number of minimum-weight paths for every vertex.
///
/// Works on cyclic graphs too: with positive weights every shortest walk is a
/// simple path, and the tight edges (`dist[u] + w = dist[v]`) form a DAG
/// ordered by distance, so counts accumulate in a single sweep.
pub fn min_unique_report(g: &DiGraph, w: &WeightFn, s: Vertex) -> Result<MinUniqueReport> {
    let dist = shortest_distances(g, w, s)?;
    let mut order: Vec<Vertex> = (0..g.n()).filter(|&v| dist[v].is_some()).collect();
    order.sort_by_key(|&v| (dist[v], v));

    let mut count = vec![BigUint::zero(); g.n()];
    count[s] = BigUint::one();
    for &v in &order {
        if v == s {
            continue;
        }
        let dv = dist[v].unwrap();
        let mut c = BigUint::zero();
        for &(u, id) in g.in_edges(v) {
            if let Some(du) = dist[u] {
                if du + w.get(id) == dv {
                    c += &count[u];
                }
            }
        }
        count[v] = c;
    }

    let vertices: Vec<VertexStatus> = (0..g.n())
        .map(|v| match dist[v] {
            None => VertexStatus::Unreachable,
            Some(d) if count[v].is_one() => VertexStatus::UniqueMin { dist: d },
            Some(d) => VertexStatus::Tied {
                dist: d,
                multiplicity: count[v].clone(),
            },
        })
        .collect();
    let min_unique_wrt_s = !vertices
        .iter()
        .any(|st| matches!(st, VertexStatus::Tied { .. }));
    Ok(MinUniqueReport {
        source: s,
        vertices,
        min_unique_wrt_s,
    })
}

pub fn is_min_unique_wrt(g: &DiGraph, w: &WeightFn, s: Vertex) -> Result<bool> {
    Ok(min_unique_report(g, w, s)?.min_unique_wrt_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn edge_unit() {
        let g = edge();
        let r = min_unique_report(&g, &WeightFn::unit(1), 0).unwrap();
        assert_eq!(r.vertices[1], VertexStatus::UniqueMin { dist: 1 });
        assert!(r.min_unique_wrt_s);
    }

    #[test]
    fn diamond_unit_ties_at_t() {
        let g = diamond();
        let r = min_unique_report(&g, &WeightFn::unit(4), 0).unwrap();
        assert_eq!(
            r.vertices[3],
            VertexStatus::Tied {
                dist: 2,
                multiplicity: BigUint::from(2u32)
            }
        );
        assert!(!r.min_unique_wrt_s);
        assert_eq!(r.first_tie(), Some(3));
    }

    #[test]
    fn diamond_powers_of_two() {
        // s->a->t = 2 + 8, s->b->t = 4 + 16
        let g = diamond();
        let w = WeightFn::from_weights(vec![2, 4, 8, 16]).unwrap();
        let r = min_unique_report(&g, &w, 0).unwrap();
        assert_eq!(r.vertices[3], VertexStatus::UniqueMin { dist: 10 });
        assert!(r.min_unique_wrt_s);
    }

    #[test]
    fn line3_unique() {
        assert!(is_min_unique_wrt(&line3(), &WeightFn::unit(2), 0).unwrap());
        assert!(!is_min_unique_wrt(&diamond(), &WeightFn::unit(4), 0).unwrap());
    }

    #[test]
    fn cycle_through_source() {
        // 0 -> 1 -> 2 -> 0, plus 0 -> 2: two routes to 2 only if weights tie.
        let g = DiGraph::new(3, vec![(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
        let tied = WeightFn::from_weights(vec![1, 1, 1, 2]).unwrap();
        let r = min_unique_report(&g, &tied, 0).unwrap();
        assert_eq!(r.vertices[0], VertexStatus::UniqueMin { dist: 0 });
        assert_eq!(
            r.vertices[2],
            VertexStatus::Tied {
                dist: 2,
                multiplicity: BigUint::from(2u32)
            }
        );
        let split = WeightFn::from_weights(vec![1, 1, 1, 3]).unwrap();
        assert!(is_min_unique_wrt(&g, &split, 0).unwrap());
    }

    #[test]
    fn unreachable_vertices() {
        let g = edge();
        let r = min_unique_report(&g, &WeightFn::unit(1), 1).unwrap();
        assert_eq!(r.vertices[0], VertexStatus::Unreachable);
        assert!(r.min_unique_wrt_s);
    }
}
