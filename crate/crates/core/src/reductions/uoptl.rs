use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::graph::{Cost, DiGraph, Vertex};
use crate::machines::{acc, classify, ConfigMachine, Halt};

/// Transducer built from a weakly unambiguous machine, with the bound `p`
/// needed to decode its optimum.
#[derive(Debug, Clone)]
pub struct UoptlInstance {
    pub machine: ConfigMachine,
    pub p: u64,
}

impl UoptlInstance {
    /// Number of accepting computations of the original machine: `p - opt`,
    /// or 0 when nothing accepts.
    pub fn decode(&self, opt: Cost) -> Result<u64> {
        match opt {
            Cost::Infinite => Ok(0),
            Cost::Finite(o) => self.p.checked_sub(o).ok_or_else(|| {
                Error::ContractViolation(format!("optimum {o} exceeds p = {}", self.p))
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum State {
    Start,
    /// Guessed `l` paths, now simulating path `i` (1-based); `last` is the
    /// accepting configuration that ended path `i - 1`.
    Run {
        l: u64,
        i: u64,
        last: Option<Vertex>,
        cur: Vertex,
    },
    Accept,
    Reject,
}

/// Transducer whose computations guess `l` in `1..=p` and then `l` accepting
/// computations of `m` ending in strictly increasing accepting
/// configurations. It outputs `p - l`, so its unique optimum sits at
/// `l = acc(m)`.
pub fn logfew_to_uoptl(m: &ConfigMachine, p: u64) -> Result<UoptlInstance> {
    build(m, p, |l| p - l)
}

/// Same computations as [`logfew_to_uoptl`] but outputting `l` itself. Its
/// unique *maximum* is at `l = acc(m)`; its minimum is generally not unique.
pub fn logfew_to_uoptl_literal(m: &ConfigMachine, p: u64) -> Result<UoptlInstance> {
    build(m, p, |l| l)
}

fn build(m: &ConfigMachine, p: u64, output: impl Fn(u64) -> u64) -> Result<UoptlInstance> {
    if !classify(m, p).weakly_unambiguous {
        return Err(Error::ContractViolation(
            "machine is not weakly unambiguous".into(),
        ));
    }
    if acc(m) > BigUint::from(p) {
        return Err(Error::ContractViolation(format!(
            "more than p = {p} accepting computations"
        )));
    }

    let mut states = vec![State::Start];
    let mut index: HashMap<State, Vertex> = HashMap::from([(State::Start, 0)]);
    let mut edges = Vec::new();
    let mut incs = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut intern = |s: State, states: &mut Vec<State>, queue: &mut VecDeque<usize>| {
        *index.entry(s).or_insert_with(|| {
            states.push(s);
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };

    while let Some(x) = queue.pop_front() {
        let mut moves: Vec<(State, u64)> = Vec::new();
        match states[x] {
            State::Start => {
                for l in 1..=p {
                    moves.push((
                        State::Run {
                            l,
                            i: 1,
                            last: None,
                            cur: m.start(),
                        },
                        0,
                    ));
                }
            }
            State::Run { l, i, last, cur } => match m.halt(cur) {
                Halt::Running => {
                    for &(d, _) in m.graph().out_edges(cur) {
                        moves.push((State::Run { l, i, last, cur: d }, 0));
                    }
                }
                Halt::Reject => moves.push((State::Reject, 0)),
                Halt::Accept if last.is_some_and(|b| cur <= b) => moves.push((State::Reject, 0)),
                Halt::Accept if i == l => moves.push((State::Accept, output(l))),
                Halt::Accept => {
                    moves.push((
                        State::Run {
                            l,
                            i: i + 1,
                            last: Some(cur),
                            cur: m.start(),
                        },
                        0,
                    ));
                }
            },
            State::Accept | State::Reject => {}
        }
        for (s, inc) in moves {
            let y = intern(s, &mut states, &mut queue);
            edges.push((x, y));
            incs.push(inc);
        }
    }

    let halting = |want: State| {
        states
            .iter()
            .position(|&s| s == want)
            .into_iter()
            .collect::<Vec<_>>()
    };
    let accept = halting(State::Accept);
    let reject = halting(State::Reject);
    let graph = DiGraph::new(states.len(), edges)?;
    let bound = incs.iter().copied().max().unwrap_or(0);
    let machine = ConfigMachine::transducer(graph, 0, &accept, &reject, incs, bound)?;
    Ok(UoptlInstance { machine, p })
}
