//! Weight-indexed reachability tables, path counting through weight queries,
//! and the gap-product optimum indicator.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{count_paths_capped, DiGraph, PathCount, Vertex, WeightFn};
use crate::isolation::{find_good_prime, modular_weight_fn, Criterion, PrimeSearch};
use crate::machines::{acc, bounded_output_machine, is_min_unique_transducer, ConfigMachine};

/// Exact number of `s -> v` paths of each total weight `0..=max_weight`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathWeightTable {
    pub source: Vertex,
    pub max_weight: u64,
    /// `counts[v][w]`
    pub counts: Vec<Vec<BigUint>>,
}

impl PathWeightTable {
    pub fn get(&self, v: Vertex, weight: u64) -> &BigUint {
        &self.counts[v][weight as usize]
    }

    /// Sum over all weights for `v`.
    pub fn marginal(&self, v: Vertex) -> BigUint {
        self.counts[v].iter().sum()
    }

    /// Weights at which at least one `s -> v` path exists.
    pub fn realized_weights(&self, v: Vertex) -> Vec<u64> {
        self.counts[v]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(w, _)| w as u64)
            .collect()
    }
}

pub(crate) fn table_width(max_weight: u64) -> Result<usize> {
    usize::try_from(max_weight)
        .ok()
        .and_then(|w| w.checked_add(1))
        .filter(|&w| w <= 1 << 24)
        .ok_or(Error::InvalidParameter(format!(
            "weight horizon {max_weight} too large"
        )))
}

/// Counts paths by total weight with a DP over (vertex, accumulated weight).
/// Paths heavier than `max_weight` are dropped.
pub fn weight_query_table(
    g: &DiGraph,
    w: &WeightFn,
    s: Vertex,
    max_weight: u64,
) -> Result<PathWeightTable> {
    g.check_vertex(s)?;
    w.check_for(g)?;
    let order = g.topo_or_sort()?;
    let width = table_width(max_weight)?;
    let mut counts = vec![vec![BigUint::zero(); width]; g.n()];
    counts[s][0] = BigUint::one();
    for &u in &order {
        for &(x, id) in g.out_edges(u) {
            let step = w.get(id) as usize;
            for a in 0..width.saturating_sub(step) {
                if counts[u][a].is_zero() {
                    continue;
                }
                let c = counts[u][a].clone();
                counts[x][a + step] += c;
            }
        }
    }
    Ok(PathWeightTable {
        source: s,
        max_weight,
        counts,
    })
}

/// Boolean form of the weight-query table: "is there an `s -> v` path of
/// total weight `w`?"
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightQueries {
    width: usize,
    bits: Vec<bool>,
}

impl WeightQueries {
    pub fn build(g: &DiGraph, w: &WeightFn, s: Vertex, max_weight: u64) -> Result<Self> {
        g.check_vertex(s)?;
        w.check_for(g)?;
        let order = g.topo_or_sort()?;
        let width = table_width(max_weight)?;
        let mut bits = vec![false; g.n() * width];
        bits[s * width] = true;
        for &u in &order {
            for &(x, id) in g.out_edges(u) {
                let step = w.get(id) as usize;
                for a in 0..width.saturating_sub(step) {
                    if bits[u * width + a] {
                        bits[x * width + a + step] = true;
                    }
                }
            }
        }
        Ok(WeightQueries { width, bits })
    }

    pub fn query(&self, v: Vertex, weight: u64) -> bool {
        (weight as usize) < self.width && self.bits[v * self.width + weight as usize]
    }
}

/// Largest total weight of any `s -> v` path, over all `v` (DAG only).
pub fn max_path_weight(g: &DiGraph, w: &WeightFn, s: Vertex) -> Result<u64> {
    let order = g.topo_or_sort()?;
    let mut best: Vec<Option<u64>> = vec![None; g.n()];
    best[s] = Some(0);
    let mut top = 0;
    for &u in &order {
        let Some(d) = best[u] else { continue };
        top = top.max(d);
        for &(x, id) in g.out_edges(u) {
            let nd = d
                .checked_add(w.get(id))
                .ok_or(Error::Overflow("path weight"))?;
            best[x] = Some(best[x].map_or(nd, |b| b.max(nd)));
        }
    }
    Ok(top)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachFewCount {
    pub count: BigUint,
    /// Prime whose modular weights separated every `s -> t` path.
    pub prime: u64,
    pub rejected_primes: Vec<u64>,
}

/// Number of distinct `s -> t` paths, computed by isolating all `s -> t`
/// path weights under a good prime and counting the weights that answer
/// "yes" to a weight query.
///
/// `path_bound` is the reach-few promise: every vertex must have at most that
/// many paths from `s`. `budget` caps the number of primes tried.
pub fn reach_lfew_count(
    g: &DiGraph,
    s: Vertex,
    t: Vertex,
    path_bound: u64,
    budget: usize,
) -> Result<ReachFewCount> {
    g.check_vertex(t)?;
    if !g.is_acyclic() {
        return Err(Error::Cyclic);
    }
    for v in 0..g.n() {
        if count_paths_capped(g, s, v, path_bound)? == PathCount::Overflow {
            return Err(Error::InvalidParameter(format!(
                "vertex {v} has more than {path_bound} paths from {s}"
            )));
        }
    }
    let found = match find_good_prime(g, s, Criterion::DistinctStWeights { t }, budget)? {
        PrimeSearch::Found(r) => r,
        PrimeSearch::NotFound { tried } => {
            return Err(Error::ContractViolation(format!(
                "no good prime among the first {} odd primes",
                tried.len()
            )))
        }
    };
    let w = modular_weight_fn(g, found.prime)?;
    let horizon = max_path_weight(g, &w, s)?;
    let queries = WeightQueries::build(g, &w, s, horizon)?;
    let count = (0..=horizon)
        .filter(|&weight| queries.query(t, weight))
        .count();
    Ok(ReachFewCount {
        count: BigUint::from(count),
        prime: found.prime,
        rejected_primes: found.tried.iter().map(|r| r.prime).collect(),
    })
}

/// `g(i)`: accepting computations of `m` whose output is at most `i`.
pub fn bounded_acceptance_count(m: &ConfigMachine, i: u64) -> Result<BigUint> {
    Ok(acc(&bounded_output_machine(m, i)?))
}

/// `h(j) = g(j) * prod_{i<j} (1 - g(i))`, which is 1 exactly when the
/// optimum of the min-unique transducer `m` equals `j`.
///
/// Outputs may be 0, so the product runs over `0 <= i < j`.
pub fn spl_gap_indicator(m: &ConfigMachine, j: u64) -> Result<u8> {
    if !m.is_transducer() {
        return Err(Error::InvalidMachine(
            "indicator needs output increments".into(),
        ));
    }
    if j > m.poly_bound() {
        return Err(Error::InvalidParameter(format!(
            "candidate {j} above value bound {}",
            m.poly_bound()
        )));
    }
    if !is_min_unique_transducer(m)? {
        return Err(Error::ContractViolation(
            "transducer is not min-unique".into(),
        ));
    }
    let mut h = BigInt::from(bounded_acceptance_count(m, j)?);
    for i in 0..j {
        if h.is_zero() {
            break;
        }
        h *= BigInt::one() - BigInt::from(bounded_acceptance_count(m, i)?);
    }
    if h.is_zero() {
        Ok(0)
    } else if h.is_one() {
        Ok(1)
    } else {
        Err(Error::ContractViolation(format!(
            "indicator evaluated to {h}"
        )))
    }
}

/// `h(0..=p)` for the transducer's declared value bound `p`.
pub fn spl_indicator_vector(m: &ConfigMachine) -> Result<Vec<u8>> {
    if !m.is_transducer() {
        return Err(Error::InvalidMachine(
            "indicator needs output increments".into(),
        ));
    }
    if !is_min_unique_transducer(m)? {
        return Err(Error::ContractViolation(
            "transducer is not min-unique".into(),
        ));
    }
    // prefix = prod_{i<j} (1 - g(i))
    let mut out = Vec::new();
    let mut prefix = BigInt::one();
    for j in 0..=m.poly_bound() {
        let g = BigInt::from(bounded_acceptance_count(m, j)?);
        let h = &g * &prefix;
        out.push(match h {
            ref h if h.is_zero() => 0,
            ref h if h.is_one() => 1,
            other => {
                return Err(Error::ContractViolation(format!(
                    "indicator evaluated to {other}"
                )))
            }
        });
        prefix *= BigInt::one() - g;
    }
    Ok(out)
}
