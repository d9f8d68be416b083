//! Text and JSON formats for graphs, weights, machines and book embeddings,
//! plus DOT export.
//!
//! Graph text: first line `n m`, then `m` lines `src dst` with 0-based
//! vertices. Weights text: `m` positive integers, one per edge id.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DiGraph, EdgeId, Vertex, WeightFn};
use crate::machines::ConfigMachine;
use crate::reductions::BookEmbedding;

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn numbers(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_fields<const N: usize>(line: usize, text: &str) -> Result<[u64; N]> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != N {
        return Err(parse_err(
            line,
            format!("expected {N} fields, found {}", fields.len()),
        ));
    }
    let mut out = [0u64; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f
            .parse()
            .map_err(|_| parse_err(line, format!("`{f}` is not a non-negative integer")))?;
    }
    Ok(out)
}

fn to_index(line: usize, v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| parse_err(line, "value too large"))
}

pub fn parse_graph_text(text: &str) -> Result<DiGraph> {
    let mut lines = numbers(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty graph file".into()))?;
    let [n, m] = parse_fields::<2>(line, header)?;
    let (n, m) = (to_index(line, n)?, to_index(line, m)?);
    let mut edges = Vec::with_capacity(m);
    for (line, text) in lines.by_ref().take(m) {
        let [a, b] = parse_fields::<2>(line, text)?;
        edges.push((to_index(line, a)?, to_index(line, b)?));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "header announces {m} edges, found {}",
            edges.len()
        )));
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "trailing content after the edge list"));
    }
    DiGraph::new(n, edges)
}

pub fn write_graph_text(g: &DiGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for &(a, b) in g.edges() {
        writeln!(out, "{a} {b}").unwrap();
    }
    out
}

pub fn parse_weights_text(text: &str, g: &DiGraph) -> Result<WeightFn> {
    let weights = numbers(text)
        .map(|(line, t)| parse_fields::<1>(line, t).map(|[w]| w))
        .collect::<Result<Vec<u64>>>()?;
    let w = WeightFn::from_weights(weights)?;
    w.check_for(g)?;
    Ok(w)
}

pub fn write_weights_text(w: &WeightFn) -> String {
    w.weights().iter().map(|x| format!("{x}\n")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topo_order: Option<Vec<Vertex>>,
}

impl GraphJson {
    pub fn from_graph(g: &DiGraph, w: Option<&WeightFn>) -> Self {
        GraphJson {
            n: g.n(),
            edges: g.edges().to_vec(),
            weights: w.map(|w| w.weights().to_vec()),
            topo_order: g.topo_order().map(<[Vertex]>::to_vec),
        }
    }

    pub fn to_graph(&self) -> Result<(DiGraph, Option<WeightFn>)> {
        let mut g = DiGraph::new(self.n, self.edges.clone())?;
        if let Some(order) = &self.topo_order {
            g = g.with_topo_order(order.clone())?;
        }
        let w = match &self.weights {
            Some(ws) => {
                let w = WeightFn::from_weights(ws.clone())?;
                w.check_for(&g)?;
                Some(w)
            }
            None => None,
        };
        Ok((g, w))
    }
}

/// Reads either format, telling them apart by a leading `{`.
pub fn parse_graph_any(text: &str) -> Result<(DiGraph, Option<WeightFn>)> {
    if text.trim_start().starts_with('{') {
        let json: GraphJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        json.to_graph()
    } else {
        Ok((parse_graph_text(text)?, None))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineJson {
    pub graph: GraphJson,
    pub start: Vertex,
    pub accept: Vec<Vertex>,
    pub reject: Vec<Vertex>,
    /// Sparse output increments; absent edges output 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_inc: Option<BTreeMap<EdgeId, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly_bound: Option<u64>,
}

impl MachineJson {
    pub fn from_machine(m: &ConfigMachine) -> Self {
        let output_inc = m.output_inc().map(|inc| {
            inc.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(e, &v)| (e, v))
                .collect()
        });
        MachineJson {
            graph: GraphJson::from_graph(m.graph(), None),
            start: m.start(),
            accept: m.accepts(),
            reject: m.rejects(),
            output_inc,
            poly_bound: Some(m.poly_bound()),
        }
    }

    pub fn to_machine(&self) -> Result<ConfigMachine> {
        let (g, _) = self.graph.to_graph()?;
        match &self.output_inc {
            None => {
                let m = ConfigMachine::new(g, self.start, &self.accept, &self.reject)?;
                match self.poly_bound {
                    Some(p) if p != m.poly_bound() => Err(Error::InvalidMachine(
                        "poly_bound is only meaningful for transducers".into(),
                    )),
                    _ => Ok(m),
                }
            }
            Some(sparse) => {
                let mut inc = vec![0; g.m()];
                for (&e, &v) in sparse {
                    *inc.get_mut(e)
                        .ok_or(Error::EdgeOutOfRange { edge: e, m: g.m() })? = v;
                }
                let bound = self
                    .poly_bound
                    .ok_or_else(|| Error::InvalidMachine("transducer needs a poly_bound".into()))?;
                ConfigMachine::transducer(g, self.start, &self.accept, &self.reject, inc, bound)
            }
        }
    }
}

pub fn parse_machine_json(text: &str) -> Result<ConfigMachine> {
    let json: MachineJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    json.to_machine()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub spine: Vec<Vertex>,
    pub page: BTreeMap<EdgeId, u8>,
}

impl From<&BookEmbedding> for EmbeddingJson {
    fn from(emb: &BookEmbedding) -> Self {
        EmbeddingJson {
            spine: emb.spine.clone(),
            page: emb.page.iter().copied().enumerate().collect(),
        }
    }
}

impl EmbeddingJson {
    pub fn to_embedding(&self) -> Result<BookEmbedding> {
        let page: Vec<u8> = self.page.values().copied().collect();
        if self.page.keys().copied().ne(0..page.len()) {
            return Err(Error::Parse("page map must cover edge ids 0..m".into()));
        }
        Ok(BookEmbedding {
            spine: self.spine.clone(),
            page,
        })
    }
}

const PAGE_COLORS: [&str; 3] = ["red", "blue", "green"];

/// DOT rendering. With an embedding, vertices are ranked along the spine and
/// edges colored by page.
pub fn to_dot(g: &DiGraph, w: Option<&WeightFn>, emb: Option<&BookEmbedding>) -> String {
    let mut out = String::from("digraph G {\n");
    match emb {
        Some(emb) => {
            out.push_str("  rankdir=TB;\n");
            for (i, &v) in emb.spine.iter().enumerate() {
                writeln!(
                    out,
                    "  {v} [label=\"{v}\", pos=\"0,{}!\"];",
                    emb.spine.len() - i
                )
                .unwrap();
            }
        }
        None => {
            for v in 0..g.n() {
                writeln!(out, "  {v};").unwrap();
            }
        }
    }
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let mut attrs = Vec::new();
        if let Some(w) = w {
            attrs.push(format!("label=\"{}\"", w.get(e)));
        }
        if let Some(p) = emb.and_then(|emb| emb.page.get(e)) {
            let color = PAGE_COLORS
                .get(usize::from(*p).wrapping_sub(1))
                .unwrap_or(&"black");
            attrs.push(format!("color={color}"));
        }
        if attrs.is_empty() {
            writeln!(out, "  {a} -> {b};").unwrap();
        } else {
            writeln!(out, "  {a} -> {b} [{}];", attrs.join(", ")).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::machines::fixtures::*;
    use crate::reductions::three_page_embed;

    #[test]
    fn graph_text_round_trip() {
        let g = fig3();
        let text = write_graph_text(&g);
        assert_eq!(text, "4 4\n0 1\n0 2\n1 2\n1 3\n");
        assert_eq!(parse_graph_text(&text).unwrap().edges(), g.edges());
    }

    #[test]
    fn graph_text_errors() {
        assert!(matches!(parse_graph_text(""), Err(Error::Parse(_))));
        assert!(matches!(
            parse_graph_text("2 2\n0 1\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_graph_text("2 1\n0 x\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_graph_text("2 1\n0 1\n1 0\n"),
            Err(Error::Parse(_))
        ));
        assert_eq!(
            parse_graph_text("2 1\n0 5\n"),
            Err(Error::VertexOutOfRange { vertex: 5, n: 2 })
        );
    }

    #[test]
    fn weights_text() {
        let g = diamond();
        let w = parse_weights_text("2\n1\n2\n1\n", &g).unwrap();
        assert_eq!(w.weights(), &[2, 1, 2, 1]);
        assert_eq!(write_weights_text(&w), "2\n1\n2\n1\n");
        assert!(parse_weights_text("1\n1\n", &g).is_err());
        assert!(parse_weights_text("1\n0\n1\n1\n", &g).is_err());
    }

    #[test]
    fn graph_json_round_trip() {
        let g = diamond();
        let w = WeightFn::from_weights(vec![2, 1, 2, 1]).unwrap();
        let text = serde_json::to_string(&GraphJson::from_graph(&g, Some(&w))).unwrap();
        let (g2, w2) = parse_graph_any(&text).unwrap();
        assert_eq!(g2, g);
        assert_eq!(w2.unwrap(), w);
    }

    #[test]
    fn machine_json_round_trip() {
        for m in [diamond_machine(), diamond_transducer(3, 5)] {
            let text = serde_json::to_string(&MachineJson::from_machine(&m)).unwrap();
            assert_eq!(parse_machine_json(&text).unwrap(), m);
        }
    }

    #[test]
    fn embedding_json_and_dot() {
        let r = three_page_embed(&fig3()).unwrap();
        let json = EmbeddingJson::from(&r.embedding);
        let text = serde_json::to_string(&json).unwrap();
        let back: EmbeddingJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_embedding().unwrap(), r.embedding);
        let dot = to_dot(&r.h, None, Some(&r.embedding));
        assert_eq!(dot.matches("color=green").count(), 4);
        assert!(dot.contains("color=red") && dot.contains("color=blue"));
    }
}
