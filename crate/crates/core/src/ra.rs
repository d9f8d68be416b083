//! Audited simulation of the unambiguous min-uniqueness/reachability decider.
//!
//! The decider works on unit-length graphs (weighted inputs are expanded
//! first) by double inductive counting. Stage `k` starts knowing
//! `c_k = |{v : d(v) <= k}|` and `S_k = sum of d(v)` over that set. One
//! *enumeration pass* walks the vertices in index order and, for each, guesses
//! either "d(x) > k" or a distance `l <= k` together with a walk of exactly
//! `l` edges from the source to `x`. The pass survives only if the claimed
//! vertices number `c_k` and their claimed distances sum to `S_k`; when the
//! graph is min-unique up to distance `k`, exactly one guess sequence does.
//!
//! For every probe vertex `v` a pass also tells whether `v` is within `k`
//! and how many of its in-neighbours are. A vertex outside the ball with two
//! such in-neighbours has two shortest paths, and the machine halts with
//! "not min-unique"; otherwise `c_{k+1}` and `S_{k+1}` follow. When a stage
//! adds no vertex, one last pass probes the target.
//!
//! Instead of enumerating guess sequences one by one, the simulator counts
//! them exactly with a DP over the machine's configurations (pass position,
//! running count, running sum, probe flags), which is the same as counting
//! paths in the machine's configuration graph.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{expand_weights, DiGraph, Vertex, WeightFn};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RaAnswer {
    Reached,
    NotReached,
    NotMinUnique,
}

impl std::fmt::Display for RaAnswer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RaAnswer::Reached => "reached",
            RaAnswer::NotReached => "not_reached",
            RaAnswer::NotMinUnique => "not_min_unique",
        })
    }
}

/// One vertex claimed to lie within distance `dist`, with the guessed walk.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Claim {
    pub vertex: Vertex,
    pub dist: usize,
    pub path: Vec<Vertex>,
}

/// Guesses made during one enumeration pass. Unlisted vertices were guessed
/// to lie beyond distance `stage`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassRecord {
    pub stage: usize,
    pub probe: Vertex,
    pub claims: Vec<Claim>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaVerdict {
    pub answer: RaAnswer,
    /// Surviving computations producing `answer`; `None` when not audited.
    pub accepting_computations: Option<BigUint>,
    /// Surviving computations producing any *other* answer (audit only).
    pub conflicting_computations: Option<BigUint>,
    /// Guess transcript of the canonical computation, present when the
    /// canonical run is the only surviving one or the run was not audited.
    pub witness: Option<Vec<PassRecord>>,
    /// `(c_k, S_k)` for each stage the canonical computation entered.
    pub stage_counts: Vec<(usize, u64)>,
    /// Vertices of the unit-length graph the decider ran on.
    pub expanded_vertices: usize,
    pub configurations_explored: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RaConfig {
    pub audit: bool,
    /// Maximum number of pass configurations the simulator may memoize.
    pub budget: usize,
    /// Strategy for evaluating the passes of one stage.
    pub execution: Execution,
}

impl Default for RaConfig {
    fn default() -> Self {
        RaConfig {
            audit: true,
            budget: 5_000_000,
            execution: Execution::Sequential,
        }
    }
}

/// `(c_k, S_k)` for `k = 0..n` by plain BFS on a unit-length graph.
pub fn ra_reference_counts(g: &DiGraph, s: Vertex) -> Result<Vec<(usize, u64)>> {
    g.check_vertex(s)?;
    let levels = g.bfs_levels(s);
    Ok((0..g.n())
        .map(|k| {
            let within = levels.iter().flatten().filter(|&&d| d <= k);
            let (c, sum) = within.fold((0usize, 0u64), |(c, sum), &d| (c + 1, sum + d as u64));
            (c, sum)
        })
        .collect())
}

/// Runs the decider on `expand_weights(g, w)` from `s` towards `t`.
pub fn ra_decide(
    g: &DiGraph,
    w: &WeightFn,
    s: Vertex,
    t: Vertex,
    config: &RaConfig,
) -> Result<RaVerdict> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    let expansion = expand_weights(g, w)?;
    let machine = Machine::new(&expansion.graph, s, t, config.budget);
    let canonical = machine.canonical_run(config.execution)?;
    let (accepting, conflicting) = if config.audit {
        let halts = machine.count_computations(config.execution)?;
        let mine = halts.get(&canonical.answer).cloned().unwrap_or_default();
        let others: BigUint = halts
            .iter()
            .filter(|(a, _)| **a != canonical.answer)
            .map(|(_, c)| c)
            .sum();
        (Some(mine), Some(others))
    } else {
        (None, None)
    };
    let unique = match (&accepting, &conflicting) {
        (Some(a), Some(c)) => a.is_one() && c.is_zero(),
        _ => true,
    };
    Ok(RaVerdict {
        answer: canonical.answer,
        accepting_computations: accepting,
        conflicting_computations: conflicting,
        witness: unique.then_some(canonical.transcript),
        stage_counts: canonical.stage_counts,
        expanded_vertices: expansion.graph.n(),
        configurations_explored: machine.explored.load(Ordering::Relaxed),
    })
}

/// Semiring the pass DP is evaluated in: exact counts for audits, plain
/// feasibility for canonical runs.
trait Tally: Clone + Send + Sync {
    fn empty() -> Self;
    fn unit() -> Self;
    fn from_walks(n: &BigUint) -> Self;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn is_nil(&self) -> bool;
}

impl Tally for BigUint {
    fn empty() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_walks(n: &BigUint) -> Self {
        n.clone()
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_nil(&self) -> bool {
        self.is_zero()
    }
}

impl Tally for bool {
    fn empty() -> Self {
        false
    }
    fn unit() -> Self {
        true
    }
    fn from_walks(n: &BigUint) -> Self {
        !n.is_zero()
    }
    fn add_assign(&mut self, other: &Self) {
        *self |= *other;
    }
    fn mul(&self, other: &Self) -> Self {
        *self && *other
    }
    fn is_nil(&self) -> bool {
        !*self
    }
}

/// Pass outcome: (probe within distance k, in-neighbours within k capped at 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Outcome {
    probe_in: bool,
    neighbours: u8,
}

impl Outcome {
    const ALL: [Outcome; 6] = [
        Outcome {
            probe_in: false,
            neighbours: 0,
        },
        Outcome {
            probe_in: false,
            neighbours: 1,
        },
        Outcome {
            probe_in: false,
            neighbours: 2,
        },
        Outcome {
            probe_in: true,
            neighbours: 0,
        },
        Outcome {
            probe_in: true,
            neighbours: 1,
        },
        Outcome {
            probe_in: true,
            neighbours: 2,
        },
    ];

    fn index(self) -> usize {
        self.probe_in as usize * 3 + self.neighbours as usize
    }
}

type Outcomes<S> = [S; 6];

fn nil<S: Tally>() -> Outcomes<S> {
    std::array::from_fn(|_| S::empty())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct PassKey {
    stage: usize,
    count: usize,
    sum: u64,
    probe: Vertex,
}

/// Memo key inside a pass: (next vertex, claimed so far, distance sum, outcome so far).
type PassState = (u32, u32, u64, u8);

struct PassTable<S> {
    memo: HashMap<PassState, Outcomes<S>>,
    root: Outcomes<S>,
}

struct Machine<'g> {
    g: &'g DiGraph,
    s: Vertex,
    t: Vertex,
    /// `walks[l][x]`: number of walks with exactly `l` edges from `s` to `x`.
    walks: Vec<Vec<BigUint>>,
    budget: usize,
    explored: AtomicUsize,
}

struct CanonicalRun {
    answer: RaAnswer,
    transcript: Vec<PassRecord>,
    stage_counts: Vec<(usize, u64)>,
}

/// Outer configuration between passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Between {
    stage: usize,
    probe: Vertex,
    count: usize,
    sum: u64,
    fresh: usize,
}

enum Step {
    Continue(Between),
    Halt(RaAnswer),
    /// All probes done and nothing new: run the target pass.
    Final,
}

impl<'g> Machine<'g> {
    fn new(g: &'g DiGraph, s: Vertex, t: Vertex, budget: usize) -> Self {
        let n = g.n();
        let mut walks = vec![vec![BigUint::zero(); n]; n.max(1)];
        walks[0][s] = BigUint::one();
        for l in 1..n {
            let (prev, cur) = walks.split_at_mut(l);
            for u in 0..n {
                if prev[l - 1][u].is_zero() {
                    continue;
                }
                for &(x, _) in g.out_edges(u) {
                    cur[0][x] += &prev[l - 1][u];
                }
            }
        }
        Machine {
            g,
            s,
            t,
            walks,
            budget,
            explored: AtomicUsize::new(0),
        }
    }

    fn n(&self) -> usize {
        self.g.n()
    }

    fn start(&self) -> Between {
        Between {
            stage: 0,
            probe: 0,
            count: 1,
            sum: 0,
            fresh: 0,
        }
    }

    fn step(&self, at: Between, outcome: Outcome) -> Step {
        if !outcome.probe_in && outcome.neighbours >= 2 {
            return Step::Halt(RaAnswer::NotMinUnique);
        }
        let fresh = at.fresh + usize::from(!outcome.probe_in && outcome.neighbours == 1);
        if at.probe + 1 < self.n() {
            return Step::Continue(Between {
                probe: at.probe + 1,
                fresh,
                ..at
            });
        }
        if fresh == 0 {
            return Step::Final;
        }
        let stage = at.stage + 1;
        Step::Continue(Between {
            stage,
            probe: 0,
            count: at.count + fresh,
            sum: at.sum + (stage * fresh) as u64,
            fresh: 0,
        })
    }

    fn final_answer(outcome: Outcome) -> RaAnswer {
        if outcome.probe_in {
            RaAnswer::Reached
        } else {
            RaAnswer::NotReached
        }
    }

    fn run_pass<S: Tally>(&self, key: PassKey) -> Result<PassTable<S>> {
        let mut table = PassTable {
            memo: HashMap::new(),
            root: nil(),
        };
        if key.stage >= self.walks.len() {
            return Ok(table);
        }
        table.root = self.complete(&key, &mut table.memo, 0, 0, 0, 0)?;
        Ok(table)
    }

    /// Outcome-indexed number of surviving completions from a pass state.
    fn complete<S: Tally>(
        &self,
        key: &PassKey,
        memo: &mut HashMap<PassState, Outcomes<S>>,
        x: usize,
        claimed: usize,
        sum: u64,
        flags: u8,
    ) -> Result<Outcomes<S>> {
        let n = self.n();
        if claimed > key.count || sum > key.sum || key.count - claimed > n - x {
            return Ok(nil());
        }
        if x == n {
            let mut out = nil();
            if claimed == key.count && sum == key.sum {
                out[flags as usize] = S::unit();
            }
            return Ok(out);
        }
        let state = (x as u32, claimed as u32, sum, flags);
        if let Some(hit) = memo.get(&state) {
            return Ok(hit.clone());
        }
        if self.explored.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }

        let mut out = self.complete(key, memo, x + 1, claimed, sum, flags)?;
        let included = self.claim_flags(key.probe, x, flags);
        for l in 0..=key.stage {
            let walks = &self.walks[l][x];
            if walks.is_zero() {
                continue;
            }
            let rest =
                self.complete::<S>(key, memo, x + 1, claimed + 1, sum + l as u64, included)?;
            let mult = S::from_walks(walks);
            for (acc, r) in out.iter_mut().zip(rest.iter()) {
                if !r.is_nil() {
                    acc.add_assign(&r.mul(&mult));
                }
            }
        }
        memo.insert(state, out.clone());
        Ok(out)
    }

    /// Outcome flags after claiming `x` within the ball.
    fn claim_flags(&self, probe: Vertex, x: Vertex, flags: u8) -> u8 {
        let mut probe_in = flags >= 3;
        let mut neighbours = flags % 3;
        if x == probe {
            probe_in = true;
        }
        if self.g.has_edge(x, probe) {
            neighbours = (neighbours + 1).min(2);
        }
        probe_in as u8 * 3 + neighbours
    }

    /// Pass outcomes for every probe of one stage, evaluated up front.
    fn stage_passes<S: Tally>(
        &self,
        stage: usize,
        count: usize,
        sum: u64,
        exec: Execution,
    ) -> Result<Vec<PassTable<S>>> {
        exec.map_range(self.n(), |probe| {
            self.run_pass::<S>(PassKey {
                stage,
                count,
                sum,
                probe,
            })
        })
        .into_iter()
        .collect()
    }

    /// Exact number of surviving computations per answer.
    fn count_computations(&self, exec: Execution) -> Result<BTreeMap<RaAnswer, BigUint>> {
        let mut halts: BTreeMap<RaAnswer, BigUint> = BTreeMap::new();
        let mut frontier: BTreeMap<Between, BigUint> =
            BTreeMap::from([(self.start(), BigUint::one())]);
        let stage_cache: Mutex<HashMap<(usize, usize, u64), Vec<Outcomes<BigUint>>>> =
            Mutex::new(HashMap::new());
        let outcomes_for = |at: &Between| -> Result<Vec<Outcomes<BigUint>>> {
            let key = (at.stage, at.count, at.sum);
            if let Some(hit) = stage_cache.lock().unwrap().get(&key) {
                return Ok(hit.clone());
            }
            let tables = self.stage_passes::<BigUint>(at.stage, at.count, at.sum, exec)?;
            let roots: Vec<_> = tables.into_iter().map(|t| t.root).collect();
            stage_cache.lock().unwrap().insert(key, roots.clone());
            Ok(roots)
        };

        while let Some((at, mult)) = frontier.pop_first() {
            let passes = outcomes_for(&at)?;
            for outcome in Outcome::ALL {
                let ways = &passes[at.probe][outcome.index()];
                if ways.is_zero() {
                    continue;
                }
                let here = &mult * ways;
                match self.step(at, outcome) {
                    Step::Halt(answer) => *halts.entry(answer).or_default() += here,
                    Step::Continue(next) => *frontier.entry(next).or_default() += here,
                    Step::Final => {
                        let target = &passes[self.t];
                        for last in Outcome::ALL {
                            let w = &target[last.index()];
                            if !w.is_zero() {
                                *halts.entry(Self::final_answer(last)).or_default() += &here * w;
                            }
                        }
                    }
                }
            }
        }
        Ok(halts)
    }

    /// Follows the lexicographically least surviving guess sequence.
    fn canonical_run(&self, exec: Execution) -> Result<CanonicalRun> {
        struct Frame {
            at: Between,
            options: Vec<(Vec<Claim>, Outcome)>,
            next: usize,
        }
        let mut cache: HashMap<(usize, usize, u64), Vec<PassTable<bool>>> = HashMap::new();
        let mut stack: Vec<Frame> = Vec::new();
        let mut pending = Some(self.start());

        loop {
            if let Some(at) = pending.take() {
                let key = (at.stage, at.count, at.sum);
                if !cache.contains_key(&key) {
                    let tables = self.stage_passes::<bool>(at.stage, at.count, at.sum, exec)?;
                    cache.insert(key, tables);
                }
                let table = &cache[&key][at.probe];
                let pass_key = PassKey {
                    stage: at.stage,
                    count: at.count,
                    sum: at.sum,
                    probe: at.probe,
                };
                let options = self.ordered_outcomes(&pass_key, table);
                stack.push(Frame {
                    at,
                    options,
                    next: 0,
                });
            }
            let Some(frame) = stack.last_mut() else {
                return Err(Error::ContractViolation(
                    "no computation of the decider survives".into(),
                ));
            };
            if frame.next == frame.options.len() {
                stack.pop();
                continue;
            }
            let at = frame.at;
            let outcome = frame.options[frame.next].1;
            frame.next += 1;
            let halted = match self.step(at, outcome) {
                Step::Continue(next) => {
                    pending = Some(next);
                    None
                }
                Step::Halt(answer) => Some((answer, None)),
                Step::Final => {
                    let key = (at.stage, at.count, at.sum);
                    let table = &cache[&key][self.t];
                    let pass_key = PassKey {
                        stage: at.stage,
                        count: at.count,
                        sum: at.sum,
                        probe: self.t,
                    };
                    self.ordered_outcomes(&pass_key, table)
                        .into_iter()
                        .next()
                        .map(|(claims, last)| (Self::final_answer(last), Some((pass_key, claims))))
                }
            };
            if let Some((answer, final_pass)) = halted {
                let mut transcript: Vec<PassRecord> = stack
                    .iter()
                    .map(|f| PassRecord {
                        stage: f.at.stage,
                        probe: f.at.probe,
                        claims: f.options[f.next - 1].0.clone(),
                    })
                    .collect();
                if let Some((key, claims)) = final_pass {
                    transcript.push(PassRecord {
                        stage: key.stage,
                        probe: key.probe,
                        claims,
                    });
                }
                let mut stage_counts: Vec<(usize, u64)> = Vec::new();
                for f in &stack {
                    if stage_counts.len() == f.at.stage {
                        stage_counts.push((f.at.count, f.at.sum));
                    }
                }
                return Ok(CanonicalRun {
                    answer,
                    transcript,
                    stage_counts,
                });
            }
        }
    }

    /// Feasible outcomes of a pass, each with its least guess sequence, in
    /// the order of those sequences.
    fn ordered_outcomes(
        &self,
        key: &PassKey,
        table: &PassTable<bool>,
    ) -> Vec<(Vec<Claim>, Outcome)> {
        let mut options: Vec<(Vec<Option<(usize, Vec<Vertex>)>>, Vec<Claim>, Outcome)> =
            Outcome::ALL
                .into_iter()
                .filter(|o| table.root[o.index()])
                .map(|o| {
                    let choices = self.least_choices(key, table, o);
                    let claims = choices
                        .iter()
                        .enumerate()
                        .filter_map(|(x, c)| {
                            c.as_ref().map(|(dist, path)| Claim {
                                vertex: x,
                                dist: *dist,
                                path: path.clone(),
                            })
                        })
                        .collect();
                    (choices, claims, o)
                })
                .collect();
        options.sort();
        options
            .into_iter()
            .map(|(_, claims, o)| (claims, o))
            .collect()
    }

    /// Least surviving choice sequence of a pass that ends in `target`.
    /// `None` = vertex skipped; `Some((l, walk))` = claimed at distance `l`.
    fn least_choices(
        &self,
        key: &PassKey,
        table: &PassTable<bool>,
        target: Outcome,
    ) -> Vec<Option<(usize, Vec<Vertex>)>> {
        let n = self.n();
        let alive = |x: usize, claimed: usize, sum: u64, flags: u8| -> bool {
            if claimed > key.count || sum > key.sum || key.count - claimed > n - x {
                return false;
            }
            if x == n {
                return claimed == key.count && sum == key.sum && flags as usize == target.index();
            }
            table
                .memo
                .get(&(x as u32, claimed as u32, sum, flags))
                .is_some_and(|o| o[target.index()])
        };
        let (mut claimed, mut sum, mut flags) = (0usize, 0u64, 0u8);
        let mut choices = Vec::with_capacity(n);
        for x in 0..n {
            if alive(x + 1, claimed, sum, flags) {
                choices.push(None);
                continue;
            }
            let inc = self.claim_flags(key.probe, x, flags);
            let l = (0..=key.stage)
                .find(|&l| {
                    !self.walks[l][x].is_zero() && alive(x + 1, claimed + 1, sum + l as u64, inc)
                })
                .expect("memo marks this state alive");
            choices.push(Some((l, self.least_walk(x, l))));
            claimed += 1;
            sum += l as u64;
            flags = inc;
        }
        choices
    }

    /// Lexicographically least walk with exactly `l` edges from `s` to `x`.
    fn least_walk(&self, x: Vertex, l: usize) -> Vec<Vertex> {
        let n = self.n();
        // back[r][y]: a walk of exactly r edges leads from y to x
        let mut back = vec![vec![false; n]; l + 1];
        back[0][x] = true;
        for r in 1..=l {
            for y in 0..n {
                back[r][y] = self.g.out_edges(y).iter().any(|&(z, _)| back[r - 1][z]);
            }
        }
        let mut walk = vec![self.s];
        let mut at = self.s;
        for r in (0..l).rev() {
            at = self
                .g
                .out_edges(at)
                .iter()
                .map(|&(z, _)| z)
                .find(|&z| back[r][z])
                .expect("walk exists");
            walk.push(at);
        }
        walk
    }
}
