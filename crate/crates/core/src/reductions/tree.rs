use crate::error::{Error, Result};
use crate::graph::{is_min_unique_wrt, Cost, DiGraph, Vertex, WeightFn};

/// Weights that make `g` min-unique with respect to `s`: edges of the BFS tree
/// get weight 1, every other edge `n^2`. The tree parent of a vertex at level
/// `k` is its least in-neighbour at level `k - 1`.
pub fn bfs_tree_weights(g: &DiGraph, s: Vertex) -> Result<WeightFn> {
    g.check_vertex(s)?;
    let n = g.n() as u64;
    let heavy = n.checked_mul(n).ok_or(Error::Overflow("n^2"))?.max(1);
    let levels = g.bfs_levels(s);
    let mut weights = vec![heavy; g.m()];
    for v in 0..g.n() {
        let Some(k) = levels[v].filter(|&k| k > 0) else {
            continue;
        };
        let parent = g
            .in_edges(v)
            .iter()
            .find(|&&(u, _)| levels[u] == Some(k - 1))
            .expect("a vertex at level k has an in-neighbour at level k - 1");
        weights[parent.1] = 1;
    }
    let w = WeightFn::new(weights, heavy)?;
    if !is_min_unique_wrt(g, &w, s)? {
        return Err(Error::ContractViolation(
            "tree weighting is not min-unique".into(),
        ));
    }
    Ok(w)
}

/// Unweighted distance from `s` to `t`.
pub fn shortest_path_length(g: &DiGraph, s: Vertex, t: Vertex) -> Result<Cost> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    Ok(match g.bfs_levels(s)[t] {
        Some(d) => Cost::Finite(d as u64),
        None => Cost::Infinite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn diamond_tree() {
        let w = bfs_tree_weights(&diamond(), 0).unwrap();
        assert_eq!(w.weights(), &[1, 1, 1, 16]);
    }

    #[test]
    fn line3_tree() {
        assert_eq!(bfs_tree_weights(&line3(), 0).unwrap().weights(), &[1, 1]);
    }

    #[test]
    fn fig3_tree() {
        let w = bfs_tree_weights(&fig3(), 0).unwrap();
        assert_eq!(w.weights(), &[1, 1, 16, 1]);
    }

    #[test]
    fn cyclic_graph_tree() {
        let g = DiGraph::new(4, vec![(0, 1), (1, 2), (2, 0), (0, 2), (2, 3), (1, 3)]).unwrap();
        assert!(bfs_tree_weights(&g, 1).is_ok());
    }

    #[test]
    fn bfs_lengths() {
        assert_eq!(
            shortest_path_length(&edge(), 0, 1).unwrap(),
            Cost::Finite(1)
        );
        assert_eq!(shortest_path_length(&edge(), 1, 0).unwrap(), Cost::Infinite);
        assert_eq!(
            shortest_path_length(&fig3(), 0, 3).unwrap(),
            Cost::Finite(2)
        );
    }
}
