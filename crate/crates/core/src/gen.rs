//! Seeded random instances. Every generator takes the caller's RNG, so one
//! seed reproduces a whole corpus.

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::enumerate::path_counts_from;
use crate::graph::{DiGraph, Vertex, WeightFn};
use crate::machines::{is_min_unique_transducer, ConfigMachine};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edge probability as a ratio `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Density {
    pub num: u32,
    pub den: u32,
}

impl Density {
    pub const fn new(num: u32, den: u32) -> Self {
        Density { num, den }
    }

    fn check(self) -> Result<Self> {
        if self.den == 0 || self.num > self.den {
            return Err(Error::InvalidParameter(format!(
                "density {}/{} not in [0, 1]",
                self.num, self.den
            )));
        }
        Ok(self)
    }
}

/// Subgraph of the transitive tournament on `0..n` selected by the bits of
/// `mask`, pairs `(i, j)` with `i < j` taken in lexicographic order.
pub fn tournament_subset(n: usize, mask: u64) -> DiGraph {
    let edges = forward_pairs(n)
        .enumerate()
        .filter(|(bit, _)| mask >> bit & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    DiGraph::new(n, edges)
        .unwrap()
        .with_topo_order((0..n).collect())
        .unwrap()
}

pub fn tournament_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn forward_pairs(n: usize) -> impl Iterator<Item = (Vertex, Vertex)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Random DAG on `0..n` whose identity order is topological.
pub fn random_dag(rng: &mut GenRng, n: usize, density: Density) -> Result<DiGraph> {
    let density = density.check()?;
    let edges = forward_pairs(n)
        .filter(|_| rng.gen_ratio(density.num, density.den))
        .collect();
    DiGraph::new(n, edges)?.with_topo_order((0..n).collect())
}

/// Random DAG in which every vertex has at most `bound` paths from vertex 0.
/// Forward pairs are proposed in random order with the given density; a
/// proposal is rejected when it would push some path count past `bound`.
pub fn reach_few_dag(rng: &mut GenRng, n: usize, bound: u64, density: Density) -> Result<DiGraph> {
    let density = density.check()?;
    if bound == 0 {
        return Err(Error::InvalidParameter(
            "path bound must be positive".into(),
        ));
    }
    let order: Vec<Vertex> = (0..n).collect();
    let bound = BigUint::from(bound);
    let mut pairs: Vec<_> = forward_pairs(n).collect();
    pairs.shuffle(rng);
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    for pair in pairs {
        if !rng.gen_ratio(density.num, density.den) {
            continue;
        }
        edges.push(pair);
        let g = DiGraph::new(n, edges.clone())?;
        if path_counts_from(&g, 0, &order).iter().any(|c| c > &bound) {
            edges.pop();
        }
    }
    edges.sort_unstable();
    DiGraph::new(n, edges)?.with_topo_order(order)
}

pub fn random_weights(rng: &mut GenRng, m: usize, max: u64) -> Result<WeightFn> {
    if max == 0 {
        return Err(Error::InvalidParameter(
            "weight bound must be positive".into(),
        ));
    }
    WeightFn::new((0..m).map(|_| rng.gen_range(1..=max)).collect(), max)
}

/// Shape of a layered configuration graph: `layers` layers after the start,
/// each holding `1..=width` configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayeredShape {
    pub layers: usize,
    pub width: usize,
}

struct Layered {
    graph: DiGraph,
    sinks: Vec<Vertex>,
}

fn layered_graph(rng: &mut GenRng, shape: LayeredShape) -> Result<Layered> {
    if shape.layers == 0 || shape.width == 0 {
        return Err(Error::InvalidParameter(
            "layers and width must be positive".into(),
        ));
    }
    let mut layers: Vec<Vec<Vertex>> = vec![vec![0]];
    let mut n = 1;
    for _ in 0..shape.layers {
        let w = rng.gen_range(1..=shape.width);
        layers.push((n..n + w).collect());
        n += w;
    }
    let mut edges = Vec::new();
    for pair in layers.windows(2) {
        let (here, next) = (&pair[0], &pair[1]);
        for &u in here {
            // Some configurations halt early.
            if rng.gen_ratio(1, 6) {
                continue;
            }
            let k = rng.gen_range(1..=next.len().min(2));
            edges.extend(next.choose_multiple(rng, k).map(|&v| (u, v)));
        }
        // Every configuration of the next layer keeps at least one predecessor.
        for &v in next {
            if !edges.iter().any(|&(_, d)| d == v) {
                edges.push((*here.choose(rng).unwrap(), v));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let graph = DiGraph::new(n, edges)?.with_topo_order((0..n).collect())?;
    let sinks = (0..n).filter(|&v| graph.out_edges(v).is_empty()).collect();
    Ok(Layered { graph, sinks })
}

/// Random acceptor; each halting configuration accepts with probability 1/2.
pub fn layered_machine(rng: &mut GenRng, shape: LayeredShape) -> Result<ConfigMachine> {
    let Layered { graph, sinks } = layered_graph(rng, shape)?;
    let (accept, reject): (Vec<_>, Vec<_>) = sinks.into_iter().partition(|_| rng.gen_ratio(1, 2));
    ConfigMachine::new(graph, 0, &accept, &reject)
}

/// Random transducer with increments in `0..=max_inc`.
pub fn random_transducer(
    rng: &mut GenRng,
    shape: LayeredShape,
    max_inc: u64,
) -> Result<ConfigMachine> {
    let Layered { graph, sinks } = layered_graph(rng, shape)?;
    let (accept, reject): (Vec<_>, Vec<_>) = sinks.into_iter().partition(|_| rng.gen_ratio(1, 2));
    let inc = (0..graph.m()).map(|_| rng.gen_range(0..=max_inc)).collect();
    let bound = max_inc * shape.layers as u64;
    ConfigMachine::transducer(graph, 0, &accept, &reject, inc, bound)
}

/// Random weakly unambiguous acceptor with at most `max_acc` accepting
/// computations: only sinks reached by a single path may accept.
pub fn weakly_unambiguous_machine(
    rng: &mut GenRng,
    shape: LayeredShape,
    max_acc: u64,
) -> Result<ConfigMachine> {
    let Layered { graph, sinks } = layered_graph(rng, shape)?;
    let order: Vec<Vertex> = (0..graph.n()).collect();
    let counts = path_counts_from(&graph, 0, &order);
    let one = BigUint::from(1u8);
    let target = rng.gen_range(0..=max_acc);
    let mut accept = Vec::new();
    let mut reject = Vec::new();
    for v in sinks {
        if counts[v] == one && (accept.len() as u64) < target && rng.gen_ratio(3, 4) {
            accept.push(v);
        } else {
            reject.push(v);
        }
    }
    ConfigMachine::new(graph, 0, &accept, &reject)
}

/// Random transducer whose optimum is attained by exactly one accepting
/// computation, or which never accepts. Resamples up to `attempts` times.
pub fn min_unique_transducer(
    rng: &mut GenRng,
    shape: LayeredShape,
    max_inc: u64,
    attempts: usize,
) -> Result<ConfigMachine> {
    for _ in 0..attempts {
        let m = random_transducer(rng, shape, max_inc)?;
        if is_min_unique_transducer(&m)? {
            return Ok(m);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no min-unique transducer in {attempts} attempts"
    )))
}
