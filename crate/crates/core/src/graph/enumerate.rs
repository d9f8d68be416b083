use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{DiGraph, Vertex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathList {
    pub paths: Vec<Vec<Vertex>>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathCount {
    Exact(BigUint),
    Overflow,
}

impl PathCount {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            PathCount::Exact(c) => Some(c),
            PathCount::Overflow => None,
        }
    }
}

/// All vertex-simple `s -> t` paths in lexicographic order, up to `cap`.
pub fn enumerate_paths(g: &DiGraph, s: Vertex, t: Vertex, cap: usize) -> Result<PathList> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if cap == 0 {
        return Err(Error::InvalidParameter("cap must be at least 1".into()));
    }
    let mut out = PathList {
        paths: Vec::new(),
        truncated: false,
    };
    let mut on_path = vec![false; g.n()];
    let mut path = vec![s];
    on_path[s] = true;
    dfs(g, t, cap, &mut path, &mut on_path, &mut out);
    Ok(out)
}

/// Returns false once the cap has been exceeded.
fn dfs(
    g: &DiGraph,
    t: Vertex,
    cap: usize,
    path: &mut Vec<Vertex>,
    on_path: &mut [bool],
    out: &mut PathList,
) -> bool {
    let v = *path.last().unwrap();
    if v == t {
        if out.paths.len() == cap {
            out.truncated = true;
            return false;
        }
        out.paths.push(path.clone());
        return true;
    }
    for &(w, _) in g.out_edges(v) {
        if on_path[w] {
            continue;
        }
        on_path[w] = true;
        path.push(w);
        let keep_going = dfs(g, t, cap, path, on_path, out);
        path.pop();
        on_path[w] = false;
        if !keep_going {
            return false;
        }
    }
    true
}

/// Number of distinct simple `s -> v` paths, or `Overflow` if it exceeds `cap`.
///
/// DAGs use a linear DP in topological order; cyclic graphs fall back to a
/// DFS that stops as soon as `cap + 1` paths have been seen.
pub fn count_paths_capped(g: &DiGraph, s: Vertex, v: Vertex, cap: u64) -> Result<PathCount> {
    g.check_vertex(s)?;
    g.check_vertex(v)?;
    if cap == 0 {
        return Err(Error::InvalidParameter("cap must be at least 1".into()));
    }
    let count = match g.topo_or_sort() {
        Ok(order) => path_counts_from(g, s, &order)[v].clone(),
        Err(_) => {
            let limit = usize::try_from(cap).unwrap_or(usize::MAX).saturating_add(1);
            let mut on_path = vec![false; g.n()];
            on_path[s] = true;
            BigUint::from(count_dfs(g, s, v, limit, &mut on_path))
        }
    };
    Ok(if count > BigUint::from(cap) {
        PathCount::Overflow
    } else {
        PathCount::Exact(count)
    })
}

/// Exact path counts from `s` to every vertex of a DAG, given a topological order.
pub(crate) fn path_counts_from(g: &DiGraph, s: Vertex, order: &[Vertex]) -> Vec<BigUint> {
    let mut count = vec![BigUint::zero(); g.n()];
    count[s] = BigUint::one();
    for &u in order {
        if count[u].is_zero() {
            continue;
        }
        let cu = count[u].clone();
        for &(w, _) in g.out_edges(u) {
            count[w] += &cu;
        }
    }
    count
}

fn count_dfs(g: &DiGraph, u: Vertex, t: Vertex, limit: usize, on_path: &mut [bool]) -> usize {
    if u == t {
        return 1;
    }
    let mut total = 0usize;
    for &(w, _) in g.out_edges(u) {
        if on_path[w] {
            continue;
        }
        on_path[w] = true;
        total += count_dfs(g, w, t, limit - total, on_path);
        on_path[w] = false;
        if total >= limit {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn enumerate_fixtures() {
        assert_eq!(
            enumerate_paths(&diamond(), 0, 3, 10).unwrap().paths.len(),
            2
        );
        assert_eq!(
            enumerate_paths(&edge(), 0, 1, 10).unwrap().paths,
            vec![vec![0, 1]]
        );
        let fig = enumerate_paths(&fig3(), 0, 2, 10).unwrap();
        assert_eq!(fig.paths, vec![vec![0, 1, 2], vec![0, 2]]);
        assert!(!fig.truncated);
    }

    #[test]
    fn enumerate_truncates() {
        let r = enumerate_paths(&diamond(), 0, 3, 1).unwrap();
        assert_eq!(r.paths, vec![vec![0, 1, 3]]);
        assert!(r.truncated);
        assert!(enumerate_paths(&diamond(), 0, 3, 0).is_err());
    }

    #[test]
    fn trivial_path_to_self() {
        assert_eq!(
            enumerate_paths(&edge(), 1, 1, 3).unwrap().paths,
            vec![vec![1]]
        );
        assert_eq!(
            count_paths_capped(&edge(), 1, 1, 3).unwrap(),
            PathCount::Exact(big(1))
        );
    }

    #[test]
    fn counts_fixtures() {
        assert_eq!(
            count_paths_capped(&fig3(), 0, 2, 100).unwrap(),
            PathCount::Exact(big(2))
        );
        assert_eq!(
            count_paths_capped(&diamond(), 0, 3, 1).unwrap(),
            PathCount::Overflow
        );
    }

    #[test]
    fn diamond_chain_product_rule() {
        for k in 1..=6 {
            let g = diamond_chain(k);
            let t = 3 * k;
            let expected = 1u64 << k;
            assert_eq!(
                count_paths_capped(&g, 0, t, expected).unwrap(),
                PathCount::Exact(big(expected))
            );
            assert_eq!(
                enumerate_paths(&g, 0, t, 1000).unwrap().paths.len() as u64,
                expected
            );
        }
    }

    #[test]
    fn cyclic_counts_simple_paths() {
        // 0 -> 1 -> 2, 1 -> 0, 0 -> 2: simple paths 0->2 are [0,2] and [0,1,2].
        let g = DiGraph::new(3, vec![(0, 1), (1, 2), (1, 0), (0, 2)]).unwrap();
        assert_eq!(
            count_paths_capped(&g, 0, 2, 10).unwrap(),
            PathCount::Exact(big(2))
        );
        assert_eq!(
            count_paths_capped(&g, 0, 2, 1).unwrap(),
            PathCount::Overflow
        );
    }
}
