use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{expand_weights, Cost, DiGraph, Expansion, Vertex, WeightFn};
use crate::machines::{ConfigMachine, Halt};

/// Size parameters of the layered graph: `n` plays the input length,
/// accepted outputs stay below `n^c`, every edge carries a `n^k` offset and
/// the graph has `layers` layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransducerParams {
    pub n: u64,
    pub c: u32,
    pub k: u32,
    pub layers: u64,
}

impl TransducerParams {
    /// Smallest parameters that fit `m`: `n` is the number of configurations
    /// (at least 2), `layers` is one more than the longest computation.
    pub fn fitting(m: &ConfigMachine) -> Result<Self> {
        let n = (m.graph().n() as u64).max(2);
        let layers = m.longest_computation() as u64 + 1;
        let mut c = 1;
        while checked_pow(n, c)? < m.poly_bound() {
            c += 1;
        }
        let floor = checked_pow(n, c)?
            .checked_mul(layers)
            .ok_or(Error::Overflow("p * n^c"))?;
        let mut k = c;
        while checked_pow(n, k)? <= floor {
            k += 1;
        }
        Ok(TransducerParams { n, c, k, layers })
    }

    pub fn offset_unit(&self) -> Result<u64> {
        checked_pow(self.n, self.k)
    }

    /// Total offset `layers * n^k` carried by every source-sink path.
    pub fn offset(&self) -> Result<u64> {
        self.offset_unit()?
            .checked_mul(self.layers)
            .ok_or(Error::Overflow("p * n^k"))
    }

    fn validate(&self, m: &ConfigMachine) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 || self.layers == 0 {
            return bad("need n >= 2 and at least one layer".into());
        }
        let nc = checked_pow(self.n, self.c)?;
        let floor = nc
            .checked_mul(self.layers)
            .ok_or(Error::Overflow("p * n^c"))?;
        if self.offset_unit()? <= floor {
            return bad(format!("n^k must exceed p * n^c = {floor}"));
        }
        if m.poly_bound() > nc {
            return bad(format!(
                "output bound {} exceeds n^c = {nc}",
                m.poly_bound()
            ));
        }
        let longest = m.longest_computation() as u64;
        if longest >= self.layers {
            return bad(format!(
                "computations take up to {longest} steps, {} layers too few",
                self.layers
            ));
        }
        Ok(())
    }
}

fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp).ok_or(Error::Overflow("power"))
}

/// A vertex of the layered graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayeredVertex {
    /// Layer (1-based), configuration of the transducer, output so far.
    Config {
        layer: u64,
        config: Vertex,
        output: u64,
    },
    Sink,
}

#[derive(Debug, Clone)]
pub struct SplInstance {
    pub graph: DiGraph,
    pub weights: WeightFn,
    pub source: Vertex,
    pub sink: Vertex,
    pub params: TransducerParams,
    pub labels: Vec<LayeredVertex>,
}

impl SplInstance {
    /// Recovers the transducer's optimum from a source-sink distance.
    pub fn decode(&self, dist: Cost) -> Result<Cost> {
        Ok(match dist {
            Cost::Infinite => Cost::Infinite,
            Cost::Finite(d) => {
                let offset = self.params.offset()?;
                let opt = d.checked_sub(offset).ok_or_else(|| {
                    Error::ContractViolation(format!("distance {d} below offset {offset}"))
                })?;
                Cost::Finite(opt)
            }
        })
    }

    /// Unweighted version with every edge subdivided into a path of its weight.
    pub fn unit_expansion(&self) -> Result<Expansion> {
        expand_weights(&self.graph, &self.weights)
    }
}

/// Layered graph whose weighted source-sink distance is `opt + layers * n^k`.
///
/// Layer 1 holds only the start configuration with output 0. A transition
/// from output `o` to `o'` costs `(o' - o) + n^k`. Accepting configurations
/// copy themselves to the next layer at cost `n^k`, so every accepted
/// computation reaches the last layer, which is joined to the sink at cost
/// `n^k`.
pub fn transducer_to_shortest_path(
    m: &ConfigMachine,
    params: TransducerParams,
) -> Result<SplInstance> {
    if !m.is_transducer() {
        return Err(Error::InvalidMachine("expected a transducer".into()));
    }
    params.validate(m)?;
    let unit = params.offset_unit()?;
    let mut labels = vec![LayeredVertex::Config {
        layer: 1,
        config: m.start(),
        output: 0,
    }];
    let mut index: HashMap<LayeredVertex, Vertex> = HashMap::from([(labels[0], 0)]);
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut sink = None;
    let mut queue = VecDeque::from([0usize]);

    let mut intern =
        |label: LayeredVertex, labels: &mut Vec<LayeredVertex>, queue: &mut VecDeque<usize>| {
            *index.entry(label).or_insert_with(|| {
                labels.push(label);
                queue.push_back(labels.len() - 1);
                labels.len() - 1
            })
        };

    while let Some(i) = queue.pop_front() {
        let LayeredVertex::Config {
            layer,
            config,
            output,
        } = labels[i]
        else {
            continue;
        };
        let mut link = |j: Vertex, w: u64| {
            edges.push((i, j));
            weights.push(w);
        };
        if m.halt(config) == Halt::Accept {
            if layer == params.layers {
                let j = *sink
                    .get_or_insert_with(|| intern(LayeredVertex::Sink, &mut labels, &mut queue));
                link(j, unit);
            } else {
                let next = LayeredVertex::Config {
                    layer: layer + 1,
                    config,
                    output,
                };
                link(intern(next, &mut labels, &mut queue), unit);
            }
            continue;
        }
        if layer == params.layers {
            continue;
        }
        for &(d, e) in m.graph().out_edges(config) {
            let inc = m.inc(e);
            let out = output.checked_add(inc).ok_or(Error::Overflow("output"))?;
            let w = inc
                .checked_add(unit)
                .ok_or(Error::Overflow("edge weight"))?;
            let next = LayeredVertex::Config {
                layer: layer + 1,
                config: d,
                output: out,
            };
            link(intern(next, &mut labels, &mut queue), w);
        }
    }

    // Keep a sink vertex even when nothing accepts, so the query is well formed.
    let sink = match sink {
        Some(s) => s,
        None => {
            labels.push(LayeredVertex::Sink);
            labels.len() - 1
        }
    };
    let graph = DiGraph::new(labels.len(), edges)?;
    let bound = weights.iter().copied().max().unwrap_or(1);
    let weights = WeightFn::new(weights, bound)?;
    Ok(SplInstance {
        graph,
        weights,
        source: 0,
        sink,
        params,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::shortest_distances;
    use crate::machines::{fixtures::*, opt_value};

    fn distance(inst: &SplInstance) -> Cost {
        match shortest_distances(&inst.graph, &inst.weights, inst.source).unwrap()[inst.sink] {
            Some(d) => Cost::Finite(d),
            None => Cost::Infinite,
        }
    }

    #[test]
    fn single_path_output_five() {
        // s -> x -> t with outputs 2 + 3, four layers, n^k = 1000
        let g = DiGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let m = ConfigMachine::transducer(g, 0, &[2], &[], vec![2, 3], 5).unwrap();
        let params = TransducerParams {
            n: 10,
            c: 1,
            k: 3,
            layers: 4,
        };
        let inst = transducer_to_shortest_path(&m, params).unwrap();
        assert_eq!(distance(&inst), Cost::Finite(4005));
        assert_eq!(inst.decode(distance(&inst)).unwrap(), Cost::Finite(5));
    }

    #[test]
    fn two_outputs_keep_the_smaller() {
        let m = diamond_transducer(10, 20);
        let params = TransducerParams::fitting(&m).unwrap();
        let inst = transducer_to_shortest_path(&m, params).unwrap();
        let offset = params.offset().unwrap();
        assert_eq!(distance(&inst), Cost::Finite(10 + offset));
        assert_eq!(
            inst.decode(distance(&inst)).unwrap(),
            opt_value(&m).unwrap()
        );
    }

    #[test]
    fn all_reject_is_infinite() {
        let g = DiGraph::new(3, vec![(0, 1), (0, 2)]).unwrap();
        let m = ConfigMachine::transducer(g, 0, &[], &[1, 2], vec![1, 1], 1).unwrap();
        let inst = transducer_to_shortest_path(&m, TransducerParams::fitting(&m).unwrap()).unwrap();
        assert_eq!(distance(&inst), Cost::Infinite);
        assert_eq!(opt_value(&m).unwrap(), Cost::Infinite);
    }

    #[test]
    fn parameter_checks() {
        let m = diamond_transducer(1, 2);
        let too_small = TransducerParams {
            n: 4,
            c: 1,
            k: 1,
            layers: 3,
        };
        assert!(matches!(
            transducer_to_shortest_path(&m, too_small),
            Err(Error::InvalidParameter(_))
        ));
        let few_layers = TransducerParams {
            n: 4,
            c: 1,
            k: 3,
            layers: 2,
        };
        assert!(matches!(
            transducer_to_shortest_path(&m, few_layers),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn unit_expansion_keeps_distance() {
        let m = diamond_transducer(1, 2);
        let inst = transducer_to_shortest_path(&m, TransducerParams::fitting(&m).unwrap()).unwrap();
        let exp = inst.unit_expansion().unwrap();
        let d = exp.graph.bfs_levels(inst.source)[inst.sink].map(|d| d as u64);
        assert_eq!(Some(distance(&inst)), d.map(Cost::Finite));
    }
}
