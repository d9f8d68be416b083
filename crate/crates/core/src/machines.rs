//! Nondeterministic machines and transducers, represented extensionally by the
//! configuration DAG they induce on a fixed input.
//!
//! A computation is a maximal path from the start configuration; it ends in a
//! sink marked accept or reject. Transducers carry a non-negative output
//! increment per edge, and a computation's output is the sum along its path.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{enumerate::path_counts_from, Cost, DiGraph, EdgeId, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Halt {
    Running,
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigMachine {
    graph: DiGraph,
    order: Vec<Vertex>,
    start: Vertex,
    halt: Vec<Halt>,
    output_inc: Option<Vec<u64>>,
    poly_bound: u64,
}

impl ConfigMachine {
    /// A plain acceptor. `poly_bound` defaults to the number of configurations.
    pub fn new(
        graph: DiGraph,
        start: Vertex,
        accept: &[Vertex],
        reject: &[Vertex],
    ) -> Result<Self> {
        let poly_bound = graph.n() as u64;
        Self::build(graph, start, accept, reject, None, poly_bound)
    }

    /// A transducer with per-edge output increments and a bound on accepted outputs.
    pub fn transducer(
        graph: DiGraph,
        start: Vertex,
        accept: &[Vertex],
        reject: &[Vertex],
        output_inc: Vec<u64>,
        poly_bound: u64,
    ) -> Result<Self> {
        Self::build(graph, start, accept, reject, Some(output_inc), poly_bound)
    }

    fn build(
        graph: DiGraph,
        start: Vertex,
        accept: &[Vertex],
        reject: &[Vertex],
        output_inc: Option<Vec<u64>>,
        poly_bound: u64,
    ) -> Result<Self> {
        graph.check_vertex(start)?;
        let order = graph.topo_or_sort()?;
        let mut halt = vec![Halt::Running; graph.n()];
        let marks = accept
            .iter()
            .map(|&v| (v, Halt::Accept))
            .chain(reject.iter().map(|&v| (v, Halt::Reject)));
        for (v, kind) in marks {
            graph.check_vertex(v)?;
            if halt[v] != Halt::Running {
                return Err(Error::InvalidMachine(format!(
                    "vertex {v} marked halting twice"
                )));
            }
            if !graph.out_edges(v).is_empty() {
                return Err(Error::InvalidMachine(format!(
                    "halting vertex {v} has successors"
                )));
            }
            halt[v] = kind;
        }
        if let Some(inc) = &output_inc {
            if inc.len() != graph.m() {
                return Err(Error::InvalidMachine(format!(
                    "{} output increments for {} edges",
                    inc.len(),
                    graph.m()
                )));
            }
        }
        let m = ConfigMachine {
            graph,
            order,
            start,
            halt,
            output_inc,
            poly_bound,
        };
        for v in m.reachable() {
            if m.graph.out_edges(v).is_empty() && m.halt[v] == Halt::Running {
                return Err(Error::InvalidMachine(format!(
                    "reachable sink {v} is neither accepting nor rejecting"
                )));
            }
        }
        if m.output_inc.is_some() {
            if let Some(max) = m.max_accepting_output()? {
                if max > poly_bound {
                    return Err(Error::InvalidMachine(format!(
                        "accepting output {max} exceeds output bound {poly_bound}"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn start(&self) -> Vertex {
        self.start
    }

    pub fn halt(&self, v: Vertex) -> Halt {
        self.halt[v]
    }

    pub fn accepts(&self) -> Vec<Vertex> {
        self.sinks_of(Halt::Accept)
    }

    pub fn rejects(&self) -> Vec<Vertex> {
        self.sinks_of(Halt::Reject)
    }

    fn sinks_of(&self, kind: Halt) -> Vec<Vertex> {
        (0..self.graph.n())
            .filter(|&v| self.halt[v] == kind)
            .collect()
    }

    pub fn output_inc(&self) -> Option<&[u64]> {
        self.output_inc.as_deref()
    }

    /// Increment on edge `e`; zero for plain acceptors.
    pub fn inc(&self, e: EdgeId) -> u64 {
        self.output_inc.as_ref().map_or(0, |inc| inc[e])
    }

    pub fn is_transducer(&self) -> bool {
        self.output_inc.is_some()
    }

    pub fn poly_bound(&self) -> u64 {
        self.poly_bound
    }

    /// Topological order of the configuration DAG.
    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    pub fn reachable(&self) -> Vec<Vertex> {
        let levels = self.graph.bfs_levels(self.start);
        (0..self.graph.n())
            .filter(|&v| levels[v].is_some())
            .collect()
    }

    /// Exact number of computation paths from the start to every configuration.
    pub fn path_counts(&self) -> Vec<BigUint> {
        path_counts_from(&self.graph, self.start, &self.order)
    }

    /// Length (in steps) of the longest computation.
    pub fn longest_computation(&self) -> usize {
        let mut best: Vec<Option<usize>> = vec![None; self.graph.n()];
        best[self.start] = Some(0);
        let mut longest = 0;
        for &u in &self.order {
            let Some(d) = best[u] else { continue };
            longest = longest.max(d);
            for &(w, _) in self.graph.out_edges(u) {
                best[w] = Some(best[w].map_or(d + 1, |b| b.max(d + 1)));
            }
        }
        longest
    }

    fn max_accepting_output(&self) -> Result<Option<u64>> {
        let mut best: Vec<Option<u64>> = vec![None; self.graph.n()];
        best[self.start] = Some(0);
        for &u in &self.order {
            let Some(o) = best[u] else { continue };
            for &(w, id) in self.graph.out_edges(u) {
                let no = o
                    .checked_add(self.inc(id))
                    .ok_or(Error::Overflow("output"))?;
                best[w] = Some(best[w].map_or(no, |b| b.max(no)));
            }
        }
        Ok(self.accepts().into_iter().filter_map(|v| best[v]).max())
    }

    /// Same configuration graph with different halting marks and no outputs.
    pub fn with_halting(&self, accept: &[Vertex], reject: &[Vertex]) -> Result<Self> {
        ConfigMachine::new(self.graph.clone(), self.start, accept, reject)
    }
}

/// Number of accepting computations.
pub fn acc(m: &ConfigMachine) -> BigUint {
    count_into(m, Halt::Accept)
}

/// Number of rejecting computations.
pub fn rej(m: &ConfigMachine) -> BigUint {
    count_into(m, Halt::Reject)
}

fn count_into(m: &ConfigMachine, kind: Halt) -> BigUint {
    let counts = m.path_counts();
    (0..m.graph.n())
        .filter(|&v| m.halt[v] == kind)
        .map(|v| &counts[v])
        .sum()
}

/// `acc - rej`.
pub fn gap(m: &ConfigMachine) -> BigInt {
    BigInt::from(acc(m)) - BigInt::from(rej(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFlags {
    pub unambiguous: bool,
    pub reach_unambiguous: bool,
    pub weakly_unambiguous: bool,
    pub few: bool,
    pub reach_few: bool,
    /// The path bound `few` and `reach_few` were checked against.
    pub bound: u64,
}

/// Class membership by exact per-configuration path counting.
pub fn classify(m: &ConfigMachine, p: u64) -> ClassFlags {
    let counts = m.path_counts();
    let p = BigUint::from(p);
    let one = BigUint::one();
    let accepting = || (0..m.graph.n()).filter(|&v| m.halt[v] == Halt::Accept);
    let acc: BigUint = accepting().map(|v| &counts[v]).sum();
    ClassFlags {
        unambiguous: acc <= one,
        reach_unambiguous: counts.iter().all(|c| c <= &one),
        weakly_unambiguous: accepting().all(|v| counts[v] <= one),
        few: acc <= p,
        reach_few: counts.iter().all(|c| c <= &p),
        bound: p.try_into().unwrap_or(u64::MAX),
    }
}

/// Minimum output value over accepting computations, with how many attain it.
fn min_output_with_count(m: &ConfigMachine) -> Result<Option<(u64, BigUint)>> {
    let mut best: Vec<Option<(u64, BigUint)>> = vec![None; m.graph.n()];
    best[m.start] = Some((0, BigUint::one()));
    for &u in &m.order {
        let Some((o, c)) = best[u].clone() else {
            continue;
        };
        for &(w, id) in m.graph.out_edges(u) {
            let no = o.checked_add(m.inc(id)).ok_or(Error::Overflow("output"))?;
            match &mut best[w] {
                Some((bo, bc)) if *bo == no => *bc += &c,
                Some((bo, _)) if *bo < no => {}
                slot => *slot = Some((no, c.clone())),
            }
        }
    }
    let mut result: Option<(u64, BigUint)> = None;
    for v in m.accepts() {
        let Some((o, c)) = &best[v] else { continue };
        match &mut result {
            Some((ro, rc)) if ro == o => *rc += c,
            Some((ro, _)) if *ro < *o => {}
            slot => *slot = Some((*o, c.clone())),
        }
    }
    Ok(result)
}

/// Minimum total output over accepting computations; `Infinite` if none accept.
pub fn opt_value(m: &ConfigMachine) -> Result<Cost> {
    Ok(match min_output_with_count(m)? {
        Some((o, _)) => Cost::Finite(o),
        None => Cost::Infinite,
    })
}

/// True iff no computation accepts, or exactly one accepting computation
/// attains the optimum.
pub fn is_min_unique_transducer(m: &ConfigMachine) -> Result<bool> {
    Ok(match min_output_with_count(m)? {
        Some((_, c)) => c.is_one(),
        None => true,
    })
}

/// Number of accepting computations per output value.
pub fn accepting_output_distribution(m: &ConfigMachine) -> Result<BTreeMap<u64, BigUint>> {
    let mut dist: Vec<BTreeMap<u64, BigUint>> = vec![BTreeMap::new(); m.graph.n()];
    dist[m.start].insert(0, BigUint::one());
    for &u in &m.order {
        if dist[u].is_empty() {
            continue;
        }
        let here = dist[u].clone();
        for &(w, id) in m.graph.out_edges(u) {
            for (&o, c) in &here {
                let no = o.checked_add(m.inc(id)).ok_or(Error::Overflow("output"))?;
                *dist[w].entry(no).or_insert_with(BigUint::zero) += c;
            }
        }
    }
    let mut out = BTreeMap::new();
    for v in m.accepts() {
        for (&o, c) in &dist[v] {
            *out.entry(o).or_insert_with(BigUint::zero) += c;
        }
    }
    Ok(out)
}

/// The machine's configuration graph, start and accepting sinks.
pub fn graph_of(m: &ConfigMachine) -> (DiGraph, Vertex, Vec<Vertex>) {
    (m.graph.clone(), m.start, m.accepts())
}

/// The machine that runs `m` and accepts iff `m` accepts with output at most
/// `bound`. Its configurations are pairs (configuration of `m`, output so
/// far), with outputs above `bound` collapsed to a single overflow value.
pub fn bounded_output_machine(m: &ConfigMachine, bound: u64) -> Result<ConfigMachine> {
    let cap = bound
        .checked_add(1)
        .ok_or(Error::Overflow("output bound"))?;
    let mut index: HashMap<(Vertex, u64), Vertex> = HashMap::new();
    let mut states = vec![(m.start, 0u64)];
    index.insert((m.start, 0), 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (c, o) = states[i];
        for &(d, id) in m.graph.out_edges(c) {
            let next = (d, o.saturating_add(m.inc(id)).min(cap));
            let j = *index.entry(next).or_insert_with(|| {
                states.push(next);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            edges.push((i, j));
        }
    }
    let mut accept = Vec::new();
    let mut reject = Vec::new();
    for (i, &(c, o)) in states.iter().enumerate() {
        match m.halt[c] {
            Halt::Accept if o <= bound => accept.push(i),
            Halt::Accept | Halt::Reject => reject.push(i),
            Halt::Running => {}
        }
    }
    let graph = DiGraph::new(states.len(), edges)?;
    ConfigMachine::new(graph, 0, &accept, &reject)
}

/// Builders for small hand-made machines.
pub mod fixtures {
    use super::ConfigMachine;
    use crate::graph::fixtures;

    pub fn edge_machine() -> ConfigMachine {
        ConfigMachine::new(fixtures::edge(), 0, &[1], &[]).unwrap()
    }

    pub fn line3_machine() -> ConfigMachine {
        ConfigMachine::new(fixtures::line3(), 0, &[2], &[]).unwrap()
    }

    pub fn diamond_machine() -> ConfigMachine {
        ConfigMachine::new(fixtures::diamond(), 0, &[3], &[]).unwrap()
    }

    /// DIAMOND transducer whose two accepting computations output `a` (via the
    /// first branch) and `b` (via the second).
    pub fn diamond_transducer(a: u64, b: u64) -> ConfigMachine {
        ConfigMachine::transducer(
            fixtures::diamond(),
            0,
            &[3],
            &[],
            vec![a, b, 0, 0],
            a.max(b),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::graph::fixtures as gf;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// DIAMOND with the b-branch rerouted to its own reject sink r = 4:
    /// s->a, s->b, a->t, b->r.
    fn diamond_one_reject() -> ConfigMachine {
        let g = DiGraph::new(5, vec![(0, 1), (0, 2), (1, 3), (2, 4)]).unwrap();
        ConfigMachine::new(g, 0, &[3], &[4]).unwrap()
    }

    #[test]
    fn acc_counts() {
        assert_eq!(acc(&edge_machine()), big(1));
        assert_eq!(acc(&diamond_machine()), big(2));
    }

    #[test]
    fn gap_values() {
        assert_eq!(gap(&diamond_machine()), BigInt::from(2));
        assert_eq!(gap(&diamond_one_reject()), BigInt::from(0));
    }

    #[test]
    fn classify_fixtures() {
        let line = classify(&line3_machine(), 1);
        assert!(line.unambiguous && line.reach_unambiguous && line.weakly_unambiguous);
        assert!(line.few && line.reach_few);

        let d = classify(&diamond_machine(), 2);
        assert!(d.reach_few);
        assert!(!d.reach_unambiguous);
        assert!(!d.unambiguous);

        let r = classify(&diamond_one_reject(), 2);
        assert!(r.weakly_unambiguous);
        assert!(r.unambiguous);
        assert_eq!(acc(&diamond_one_reject()), big(1));
    }

    #[test]
    fn opt_and_min_uniqueness() {
        let all_reject =
            ConfigMachine::transducer(gf::diamond(), 0, &[], &[3], vec![1; 4], 10).unwrap();
        assert_eq!(opt_value(&all_reject).unwrap(), Cost::Infinite);
        assert!(is_min_unique_transducer(&all_reject).unwrap());

        let single = ConfigMachine::transducer(gf::line3(), 0, &[2], &[], vec![2, 3], 5).unwrap();
        assert_eq!(opt_value(&single).unwrap(), Cost::Finite(5));

        let split = diamond_transducer(10, 20);
        assert_eq!(opt_value(&split).unwrap(), Cost::Finite(10));
        assert!(is_min_unique_transducer(&split).unwrap());
        assert!(!is_min_unique_transducer(&diamond_transducer(10, 10)).unwrap());
    }

    #[test]
    fn graph_of_is_identity() {
        let (g, s, acc) = graph_of(&diamond_machine());
        assert_eq!(g, gf::diamond());
        assert_eq!((s, acc), (0, vec![3]));
        assert_eq!(graph_of(&edge_machine()).0, gf::edge());
    }

    #[test]
    fn invalid_machines_rejected() {
        // reachable sink t left unmarked
        assert!(ConfigMachine::new(gf::diamond(), 0, &[], &[]).is_err());
        // halting vertex with successors
        assert!(ConfigMachine::new(gf::diamond(), 0, &[1, 3], &[]).is_err());
        // cyclic
        let cyc = DiGraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(ConfigMachine::new(cyc, 0, &[], &[]), Err(Error::Cyclic));
        // output above declared bound
        assert!(ConfigMachine::transducer(gf::line3(), 0, &[2], &[], vec![2, 3], 4).is_err());
    }

    #[test]
    fn bounded_output_filters_by_value() {
        let m = diamond_transducer(10, 20);
        assert_eq!(acc(&bounded_output_machine(&m, 9).unwrap()), big(0));
        assert_eq!(acc(&bounded_output_machine(&m, 10).unwrap()), big(1));
        assert_eq!(acc(&bounded_output_machine(&m, 25).unwrap()), big(2));
    }

    #[test]
    fn output_distribution() {
        let d = accepting_output_distribution(&diamond_transducer(10, 10)).unwrap();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![(10, big(2))]);
    }

    #[test]
    fn longest_computation_steps() {
        assert_eq!(diamond_machine().longest_computation(), 2);
    }
}
