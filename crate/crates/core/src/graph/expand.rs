use serde::{Deserialize, Serialize};

use super::{DiGraph, EdgeId, Vertex, WeightFn};
use crate::error::{Error, Result};

/// Where a vertex of an expanded graph came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Original(Vertex),
    /// `step`-th interior vertex (1-based) on the path replacing `edge`.
    Subdivision {
        edge: EdgeId,
        step: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    /// Original vertices keep their ids `0..n`; fresh vertices follow.
    pub graph: DiGraph,
    pub provenance: Vec<Provenance>,
}

/// Replaces every weight-`k` edge by a path of `k` unit edges.
pub fn expand_weights(g: &DiGraph, w: &WeightFn) -> Result<Expansion> {
    w.check_for(g)?;
    let extra: u64 = w.weights().iter().map(|&k| k - 1).sum();
    let total = (g.n() as u64)
        .checked_add(extra)
        .and_then(|t| usize::try_from(t).ok())
        .ok_or(Error::Overflow("weight expansion size"))?;

    let mut provenance: Vec<Provenance> = (0..g.n()).map(Provenance::Original).collect();
    provenance.reserve(total - g.n());
    let mut edges = Vec::with_capacity(total - g.n() + g.m());
    for (id, &(src, dst)) in g.edges().iter().enumerate() {
        let k = w.get(id);
        let mut prev = src;
        for step in 1..k {
            let fresh = provenance.len();
            provenance.push(Provenance::Subdivision { edge: id, step });
            edges.push((prev, fresh));
            prev = fresh;
        }
        edges.push((prev, dst));
    }
    let graph = DiGraph::new(total, edges)?;
    let graph = match g.topo_order() {
        // Fresh vertices sit strictly between their edge's endpoints.
        Some(_) => {
            let order = graph.topological_sort().ok_or(Error::Cyclic)?;
            graph.with_topo_order(order)?
        }
        None => graph,
    };
    Ok(Expansion { graph, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::shortest_distances;

    #[test]
    fn single_edge_weight_three() {
        let x = expand_weights(&edge(), &WeightFn::from_weights(vec![3]).unwrap()).unwrap();
        assert_eq!(x.graph.n(), 4);
        assert_eq!(x.graph.m(), 3);
        assert_eq!(x.graph.bfs_levels(0)[1], Some(3));
        assert_eq!(
            x.provenance[2],
            Provenance::Subdivision { edge: 0, step: 1 }
        );
    }

    #[test]
    fn diamond_distance_preserved() {
        let g = diamond();
        let w = WeightFn::from_weights(vec![2, 4, 8, 16]).unwrap();
        let x = expand_weights(&g, &w).unwrap();
        assert_eq!(x.graph.bfs_levels(0)[3], Some(10));
        let weighted = shortest_distances(&g, &w, 0).unwrap();
        let unit = x.graph.bfs_levels(0);
        for v in 0..g.n() {
            assert_eq!(weighted[v], unit[v].map(|d| d as u64));
        }
    }

    #[test]
    fn unit_weights_are_identity() {
        let g = fig3();
        let x = expand_weights(&g, &WeightFn::unit(g.m())).unwrap();
        assert_eq!(x.graph.edges(), g.edges());
        assert_eq!(x.graph.n(), g.n());
    }

    #[test]
    fn mismatched_weights_rejected() {
        assert!(expand_weights(&diamond(), &WeightFn::unit(3)).is_err());
    }
}
