use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{position_map, DiGraph, EdgeId, Vertex};

/// Edges sorted by the topological position of their target, ties broken by
/// the position of their source. Along any path the ranks strictly increase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeOrder {
    pub order: Vec<EdgeId>,
}

impl EdgeOrder {
    /// Rank of every edge id, inverse of `order`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (r, &e) in self.order.iter().enumerate() {
            rank[e] = r;
        }
        rank
    }
}

pub fn edge_order(g: &DiGraph) -> Result<EdgeOrder> {
    let topo = g.topo_order().ok_or(Error::MissingTopoOrder)?;
    let pos = position_map(g.n(), topo)?;
    let mut order: Vec<EdgeId> = (0..g.m()).collect();
    order.sort_by_key(|&e| {
        let (src, dst) = g.edge(e);
        (pos[dst], pos[src])
    });
    Ok(EdgeOrder { order })
}

/// Spine order (top to bottom) and a page in `1..=3` per edge id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookEmbedding {
    pub spine: Vec<Vertex>,
    pub page: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BookViolation {
    /// Edge runs from bottom to top.
    Upward { edge: EdgeId },
    /// Two edges on one page with spine positions `a < c < b < d`.
    Crossing {
        page: u8,
        first: EdgeId,
        second: EdgeId,
    },
}

impl std::fmt::Display for BookViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BookViolation::Upward { edge } => write!(f, "edge {edge} points upward"),
            BookViolation::Crossing {
                page,
                first,
                second,
            } => {
                write!(f, "edges {first} and {second} cross on page {page}")
            }
        }
    }
}

/// `Ok(None)` when the embedding is valid, otherwise the first violation.
pub fn validate_book_embedding(h: &DiGraph, emb: &BookEmbedding) -> Result<Option<BookViolation>> {
    let pos = position_map(h.n(), &emb.spine)?;
    if emb.page.len() != h.m() {
        return Err(Error::InvalidParameter(format!(
            "{} page assignments for {} edges",
            emb.page.len(),
            h.m()
        )));
    }
    if let Some(p) = emb.page.iter().find(|p| !(1..=3).contains(*p)) {
        return Err(Error::InvalidParameter(format!("page {p} outside 1..=3")));
    }
    let spans: Vec<(usize, usize)> = h.edges().iter().map(|&(a, b)| (pos[a], pos[b])).collect();
    if let Some(edge) = spans.iter().position(|&(a, b)| a >= b) {
        return Ok(Some(BookViolation::Upward { edge }));
    }
    for first in 0..h.m() {
        let (a, b) = spans[first];
        for second in first + 1..h.m() {
            if emb.page[first] != emb.page[second] {
                continue;
            }
            let (c, d) = spans[second];
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                return Ok(Some(BookViolation::Crossing {
                    page: emb.page[first],
                    first,
                    second,
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreePageResult {
    pub h: DiGraph,
    pub embedding: BookEmbedding,
    /// Copies per original vertex (twice the number of edges).
    pub copies: usize,
    /// Topological position of every original vertex.
    positions: Vec<usize>,
    pub source: Vertex,
    pub sink: Vertex,
    pub page3_edges: usize,
}

impl ThreePageResult {
    /// The `j`-th copy (1-based) of original vertex `u`.
    pub fn copy_of(&self, u: Vertex, j: usize) -> Vertex {
        assert!(
            (1..=self.copies).contains(&j),
            "copy index {j} out of range"
        );
        copy_id(self.positions.len(), self.positions[u] + 1, j)
    }
}

/// Id of `v_i^j` (both 1-based) among `n` original vertices.
fn copy_id(n: usize, i: usize, j: usize) -> Vertex {
    (j - 1) * n + (i - 1)
}

/// Embeds a reachability instance from the first to the last vertex of the
/// topological order into three pages.
///
/// Each vertex `u_i` gets copies `v_i^1..v_i^{2m}` joined in a chain. The
/// `k`-th edge `(u_a, u_b)` of the edge order becomes `v_a^{2k-1} -> v_b^{2k}`.
/// Blocks of copies alternate direction along the spine, chain edges leaving
/// odd blocks go on page 1, those leaving even blocks on page 2, and the
/// translated edges on page 3.
pub fn three_page_embed(g: &DiGraph) -> Result<ThreePageResult> {
    let topo = g.topo_order().ok_or(Error::MissingTopoOrder)?;
    let positions = position_map(g.n(), topo)?;
    if g.m() == 0 {
        return Err(Error::InvalidParameter(
            "three-page embedding needs at least one edge".into(),
        ));
    }
    let n = g.n();
    let copies = 2 * g.m();

    let mut edges = Vec::with_capacity(n * (copies - 1) + g.m());
    let mut page = Vec::with_capacity(edges.capacity());
    for j in 1..copies {
        for i in 1..=n {
            edges.push((copy_id(n, i, j), copy_id(n, i, j + 1)));
            page.push(if j % 2 == 1 { 1 } else { 2 });
        }
    }
    for (k, &e) in edge_order(g)?.order.iter().enumerate() {
        let (a, b) = g.edge(e);
        let k = k + 1;
        edges.push((
            copy_id(n, positions[a] + 1, 2 * k - 1),
            copy_id(n, positions[b] + 1, 2 * k),
        ));
        page.push(3);
    }

    let mut spine = Vec::with_capacity(n * copies);
    for j in 1..=copies {
        if j % 2 == 1 {
            spine.extend((1..=n).map(|i| copy_id(n, i, j)));
        } else {
            spine.extend((1..=n).rev().map(|i| copy_id(n, i, j)));
        }
    }
    let h = DiGraph::new(n * copies, edges)?.with_topo_order(spine.clone())?;
    Ok(ThreePageResult {
        h,
        embedding: BookEmbedding { spine, page },
        copies,
        positions,
        source: copy_id(n, 1, 1),
        sink: copy_id(n, n, copies),
        page3_edges: g.m(),
    })
}

/// An `(s, t)` reachability instance rewritten so that `s` is the first and
/// `t`'s stand-in the last vertex of the topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedInstance {
    pub graph: DiGraph,
    /// New id of every original vertex that was kept.
    pub relabel: Vec<Option<Vertex>>,
    pub source: Vertex,
    pub sink: Vertex,
}

/// Drops the vertices that precede `s` in topological order, relabels the
/// rest by position, and appends a fresh sink fed by `t` when `t` is not
/// already last or the graph has no edges.
pub fn normalize_st(g: &DiGraph, s: Vertex, t: Vertex) -> Result<NormalizedInstance> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    let topo = g.topo_or_sort()?;
    let from = topo.iter().position(|&v| v == s).expect("s is a vertex");
    let kept = &topo[from..];
    let mut relabel = vec![None; g.n()];
    for (i, &v) in kept.iter().enumerate() {
        relabel[v] = Some(i);
    }
    let mut edges: Vec<(Vertex, Vertex)> = g
        .edges()
        .iter()
        .filter_map(|&(a, b)| Some((relabel[a]?, relabel[b]?)))
        .collect();
    let mut n = kept.len();
    let sink = match relabel[t] {
        Some(tt) if tt == n - 1 && !edges.is_empty() => tt,
        Some(tt) => {
            edges.push((tt, n));
            n += 1;
            n - 1
        }
        // t precedes s, so it is unreachable: a fresh isolated sink keeps the answer.
        None => {
            if edges.is_empty() {
                edges.push((0, n));
                n += 1;
            }
            n += 1;
            n - 1
        }
    };
    let graph = DiGraph::new(n, edges)?.with_topo_order((0..n).collect())?;
    Ok(NormalizedInstance {
        graph,
        relabel,
        source: 0,
        sink,
    })
}

/// Normalizes `(g, s, t)` and embeds the result.
pub fn three_page_reach_instance(
    g: &DiGraph,
    s: Vertex,
    t: Vertex,
) -> Result<(NormalizedInstance, ThreePageResult)> {
    let norm = normalize_st(g, s, t)?;
    let book = three_page_embed(&norm.graph)?;
    Ok((norm, book))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixtures::*, reach};

    #[test]
    fn fig3_edge_order() {
        assert_eq!(edge_order(&fig3()).unwrap().order, vec![0, 1, 2, 3]);
        assert_eq!(edge_order(&edge()).unwrap().order, vec![0]);
        let g = DiGraph::new(3, vec![(1, 2), (0, 1)])
            .unwrap()
            .with_topo_order(vec![0, 1, 2])
            .unwrap();
        assert_eq!(edge_order(&g).unwrap().order, vec![1, 0]);
        assert_eq!(
            edge_order(&DiGraph::new(2, vec![]).unwrap()),
            Err(Error::MissingTopoOrder)
        );
    }

    #[test]
    fn fig3_embedding() {
        let r = three_page_embed(&fig3()).unwrap();
        assert_eq!(r.h.n(), 32);
        assert_eq!(r.embedding.page.iter().filter(|&&p| p == 3).count(), 4);
        assert_eq!(r.page3_edges, 4);
        assert_eq!((r.source, r.sink), (r.copy_of(0, 1), r.copy_of(3, 8)));
        assert_eq!(validate_book_embedding(&r.h, &r.embedding).unwrap(), None);
        assert!(reach(&r.h, r.source, r.sink).unwrap());
        // spine starts v_1^1..v_4^1 then v_4^2..v_1^2
        assert_eq!(&r.embedding.spine[..8], &[0, 1, 2, 3, 7, 6, 5, 4]);
    }

    #[test]
    fn edge_embedding() {
        let r = three_page_embed(&edge()).unwrap();
        assert_eq!(r.h.n(), 4);
        assert!(reach(&r.h, r.source, r.sink).unwrap());
    }

    #[test]
    fn fig3_without_u2_u4_is_unreachable() {
        let g = fig3()
            .without_edge(3)
            .with_topo_order(vec![0, 1, 2, 3])
            .unwrap();
        let r = three_page_embed(&g).unwrap();
        assert!(!reach(&g, 0, 3).unwrap());
        assert!(!reach(&r.h, r.source, r.sink).unwrap());
    }

    #[test]
    fn validator_finds_crossings() {
        // 4-cycle chords on one page: (0,2) and (1,3) interleave.
        let h = DiGraph::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let emb = BookEmbedding {
            spine: vec![0, 1, 2, 3],
            page: vec![1; 4],
        };
        assert_eq!(
            validate_book_embedding(&h, &emb).unwrap(),
            Some(BookViolation::Crossing {
                page: 1,
                first: 1,
                second: 2
            })
        );
        let single = BookEmbedding {
            spine: vec![0, 1],
            page: vec![1],
        };
        assert_eq!(validate_book_embedding(&edge(), &single).unwrap(), None);
        let upward = BookEmbedding {
            spine: vec![1, 0],
            page: vec![1],
        };
        assert_eq!(
            validate_book_embedding(&edge(), &upward).unwrap(),
            Some(BookViolation::Upward { edge: 0 })
        );
        let short = BookEmbedding {
            spine: vec![0],
            page: vec![1],
        };
        assert!(validate_book_embedding(&edge(), &short).is_err());
    }

    #[test]
    fn normalization_keeps_reachability() {
        let g = DiGraph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        for s in 0..4 {
            for t in 0..4 {
                let (norm, book) = three_page_reach_instance(&g, s, t).unwrap();
                assert_eq!(norm.source, 0);
                assert_eq!(norm.sink, norm.graph.n() - 1);
                assert_eq!(
                    reach(&g, s, t).unwrap(),
                    reach(&book.h, book.source, book.sink).unwrap(),
                    "{s}->{t}"
                );
            }
        }
        let lone = DiGraph::new(1, vec![]).unwrap();
        let (_, book) = three_page_reach_instance(&lone, 0, 0).unwrap();
        assert!(reach(&book.h, book.source, book.sink).unwrap());
    }
}
