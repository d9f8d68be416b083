//! Prime-hash isolation of path weights.
//!
//! Edge `e` of lexicographic rank `i` (1-based) conceptually gets weight
//! `2^i`, which gives every path a distinct weight but is exponentially large.
//! Reducing modulo small odd primes gives polynomially bounded weight
//! functions; scanning primes in increasing order and testing each one finds
//! a modulus under which the relevant path weights stay distinct.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::counting::{max_path_weight, WeightQueries};
use crate::error::{Error, Result};
use crate::graph::{min_unique_report, DiGraph, EdgeId, Vertex, WeightFn};
use crate::par::Execution;

/// Rank of each edge (1-based) under the (src, dst) lexicographic order.
pub fn lex_edge_ranks(g: &DiGraph) -> Vec<u64> {
    let mut ids: Vec<EdgeId> = (0..g.m()).collect();
    ids.sort_by_key(|&e| g.edge(e));
    let mut rank = vec![0; g.m()];
    for (i, e) in ids.into_iter().enumerate() {
        rank[e] = i as u64 + 1;
    }
    rank
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// 3, 5, 7, 11, ...
pub fn odd_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&p| is_prime(p))
}

/// `w(e) = 2^rank(e) mod p`, every value in `[1, p-1]`.
pub fn modular_weight_fn(g: &DiGraph, p: u64) -> Result<WeightFn> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let weights = lex_edge_ranks(g)
        .into_iter()
        .map(|r| pow_mod(2, r, p))
        .collect();
    WeightFn::new(weights, p - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Every vertex has a unique minimum-weight path from the source.
    MinUniqueWrtS,
    /// All source-to-`t` paths have pairwise distinct weights.
    DistinctStWeights { t: Vertex },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rejection {
    TieAt { vertex: Vertex },
    StCollision { weight: u64 },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::TieAt { vertex } => write!(f, "tie at vertex {vertex}"),
            Rejection::StCollision { weight } => write!(f, "st-collision at weight {weight}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedPrime {
    pub prime: u64,
    pub reason: Rejection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSearchResult {
    pub prime: u64,
    pub weight_fn: WeightFn,
    /// Every prime tried before `prime`, in increasing order.
    pub tried: Vec<RejectedPrime>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeSearch {
    Found(PrimeSearchResult),
    NotFound { tried: Vec<RejectedPrime> },
}

impl PrimeSearch {
    pub fn found(&self) -> Option<&PrimeSearchResult> {
        match self {
            PrimeSearch::Found(r) => Some(r),
            PrimeSearch::NotFound { .. } => None,
        }
    }

    /// Audit trail, one line per prime: `p=<prime> verdict=<good|bad> reason=<...>`.
    pub fn audit_lines(&self) -> Vec<String> {
        let (tried, good) = match self {
            PrimeSearch::Found(r) => (&r.tried, Some(r.prime)),
            PrimeSearch::NotFound { tried } => (tried, None),
        };
        let mut lines: Vec<String> = tried
            .iter()
            .map(|r| format!("p={} verdict=bad reason={}", r.prime, r.reason))
            .collect();
        if let Some(p) = good {
            lines.push(format!("p={p} verdict=good reason=none"));
        }
        lines
    }
}

/// Tests one prime; `None` means good.
fn judge(g: &DiGraph, s: Vertex, criterion: Criterion, p: u64) -> Result<Option<Rejection>> {
    let w = modular_weight_fn(g, p)?;
    Ok(match criterion {
        Criterion::MinUniqueWrtS => min_unique_report(g, &w, s)?
            .first_tie()
            .map(|vertex| Rejection::TieAt { vertex }),
        Criterion::DistinctStWeights { t } => {
            st_collision(g, &w, s, t)?.map(|weight| Rejection::StCollision { weight })
        }
    })
}

/// Scans odd primes in increasing order and returns the first good one, or
/// `NotFound` after `budget` primes.
pub fn find_good_prime(
    g: &DiGraph,
    s: Vertex,
    criterion: Criterion,
    budget: usize,
) -> Result<PrimeSearch> {
    find_good_prime_with(g, s, criterion, budget, Execution::Sequential)
}

/// [`find_good_prime`] that tests batches of primes concurrently. The result
/// is identical to the sequential scan.
pub fn find_good_prime_with(
    g: &DiGraph,
    s: Vertex,
    criterion: Criterion,
    budget: usize,
    exec: Execution,
) -> Result<PrimeSearch> {
    g.check_vertex(s)?;
    if let Criterion::DistinctStWeights { t } = criterion {
        g.check_vertex(t)?;
    }
    if budget == 0 {
        return Err(Error::InvalidParameter(
            "prime budget must be at least 1".into(),
        ));
    }
    let batch = if exec.is_parallel() { 16 } else { 1 };
    let mut primes = odd_primes().take(budget);
    let mut tried = Vec::new();
    loop {
        let chunk: Vec<u64> = primes.by_ref().take(batch).collect();
        if chunk.is_empty() {
            return Ok(PrimeSearch::NotFound { tried });
        }
        let verdicts = exec.map(&chunk, |&p| judge(g, s, criterion, p));
        for (p, verdict) in chunk.into_iter().zip(verdicts) {
            match verdict? {
                Some(reason) => tried.push(RejectedPrime { prime: p, reason }),
                None => {
                    let weight_fn = modular_weight_fn(g, p)?;
                    return Ok(PrimeSearch::Found(PrimeSearchResult {
                        prime: p,
                        weight_fn,
                        tried,
                    }));
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeBudget {
    /// Number of primes guaranteed to contain a good one: `N^5`.
    pub count_bound: BigUint,
    /// Upper bound on the value of the last prime needed: `N^6`.
    pub prime_value_bound: BigUint,
}

/// Search budget for a configuration graph with `n_configs` vertices and at
/// most `path_bound` paths from the start to any vertex.
pub fn prime_budget_bound(n_configs: u64, path_bound: u64) -> Result<PrimeBudget> {
    if n_configs < 2 {
        return Err(Error::InvalidParameter("N must be at least 2".into()));
    }
    if path_bound < 1 {
        return Err(Error::InvalidParameter(
            "path bound must be at least 1".into(),
        ));
    }
    let n = BigUint::from(n_configs);
    Ok(PrimeBudget {
        count_bound: n.pow(5),
        prime_value_bound: n.pow(6),
    })
}

/// Smallest total weight `W` at which two distinct `s -> t` paths collide,
/// found through weight queries: some edge `e = (c, c')` and prefix weight `a`
/// with an `s -> c` path of weight `a`, a `c' -> t` path of weight
/// `W - w(e) - a`, and an `s -> t` path of weight `W` avoiding `e`.
///
/// Requires an acyclic graph.
pub fn st_collision(g: &DiGraph, w: &WeightFn, s: Vertex, t: Vertex) -> Result<Option<u64>> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    w.check_for(g)?;
    if !g.is_acyclic() {
        return Err(Error::Cyclic);
    }
    let horizon = max_path_weight(g, w, s)?;
    let from_s = WeightQueries::build(g, w, s, horizon)?;
    let into_t = WeightQueries::build(&g.reversed(), w, t, horizon)?;

    let mut best: Option<u64> = None;
    for (e, &(c, c2)) in g.edges().iter().enumerate() {
        let we = w.get(e);
        let avoiding = WeightQueries::build(&g.without_edge(e), &w.without_edge(e), s, horizon)?;
        for total in we..=horizon {
            if best.is_some_and(|b| total >= b) {
                break;
            }
            if !avoiding.query(t, total) {
                continue;
            }
            let rest = total - we;
            if (0..=rest).any(|a| from_s.query(c, a) && into_t.query(c2, rest - a)) {
                best = Some(total);
                break;
            }
        }
    }
    Ok(best)
}

/// True iff two distinct `s -> t` paths have equal total weight.
pub fn is_bad_prime_st(g: &DiGraph, w: &WeightFn, s: Vertex, t: Vertex) -> Result<bool> {
    Ok(st_collision(g, w, s, t)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn lex_ranks() {
        assert_eq!(lex_edge_ranks(&diamond()), vec![1, 2, 3, 4]);
        assert_eq!(lex_edge_ranks(&edge()), vec![1]);
        assert_eq!(lex_edge_ranks(&fig3()), vec![1, 2, 3, 4]);
        let shuffled = DiGraph::new(3, vec![(1, 2), (0, 2), (0, 1)]).unwrap();
        assert_eq!(lex_edge_ranks(&shuffled), vec![3, 2, 1]);
    }

    #[test]
    fn collides_mod_3_not_mod_5() {
        // s = 0, t = 3: paths 0->3 and 0->2->3 weigh 2 and 1+1 mod 3, 3 and 4+1 mod 5
        let g = DiGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (2, 3)]).unwrap();
        for criterion in [
            Criterion::DistinctStWeights { t: 3 },
            Criterion::MinUniqueWrtS,
        ] {
            let found = find_good_prime(&g, 0, criterion, 10).unwrap();
            let found = found.found().unwrap();
            assert_eq!(found.prime, 5);
            assert_eq!(
                found.tried.iter().map(|r| r.prime).collect::<Vec<_>>(),
                vec![3]
            );
        }
        let w3 = modular_weight_fn(&g, 3).unwrap();
        assert_eq!(st_collision(&g, &w3, 0, 3).unwrap(), Some(2));
    }

    #[test]
    fn primes() {
        assert_eq!(
            odd_primes().take(6).collect::<Vec<_>>(),
            vec![3, 5, 7, 11, 13, 17]
        );
        assert!(!is_prime(1) && !is_prime(9) && is_prime(2) && is_prime(97));
        assert_eq!(pow_mod(2, 10, 1000), 24);
        assert_eq!(pow_mod(2, 1 << 40, 7), pow_mod(2, (1u64 << 40) % 6, 7));
    }

    #[test]
    fn modular_weights_on_fixtures() {
        assert_eq!(
            modular_weight_fn(&diamond(), 3).unwrap().weights(),
            &[2, 1, 2, 1]
        );
        assert_eq!(modular_weight_fn(&edge(), 3).unwrap().weights(), &[2]);
        assert_eq!(
            modular_weight_fn(&diamond(), 7).unwrap().weights(),
            &[2, 4, 1, 2]
        );
        assert_eq!(modular_weight_fn(&diamond(), 2), Err(Error::NotOddPrime(2)));
        assert_eq!(modular_weight_fn(&diamond(), 9), Err(Error::NotOddPrime(9)));
    }

    #[test]
    fn good_prime_fixtures() {
        let r = find_good_prime(&diamond(), 0, Criterion::MinUniqueWrtS, 10).unwrap();
        assert_eq!(r.found().unwrap().prime, 3);
        assert!(r.found().unwrap().tried.is_empty());
        for criterion in [
            Criterion::MinUniqueWrtS,
            Criterion::DistinctStWeights { t: 2 },
        ] {
            let r = find_good_prime(&line3(), 0, criterion, 10).unwrap();
            assert_eq!(r.found().unwrap().prime, 3);
        }
    }

    #[test]
    fn budget_exhaustion_reports_not_found() {
        // 2^k paths cannot get distinct weights below 2^k, so 3 fails for k = 3.
        let r = find_good_prime(
            &diamond_chain(3),
            0,
            Criterion::DistinctStWeights { t: 9 },
            1,
        )
        .unwrap();
        match r {
            PrimeSearch::NotFound { tried } => assert_eq!(tried[0].prime, 3),
            other => panic!("expected NotFound, got {other:?}"),
        }
    }

    #[test]
    fn budget_bounds() {
        let b = prime_budget_bound(10, 8).unwrap();
        assert_eq!(b.count_bound, BigUint::from(100_000u32));
        assert_eq!(b.prime_value_bound, BigUint::from(1_000_000u32));
        let b = prime_budget_bound(2, 1).unwrap();
        assert_eq!(
            (b.count_bound, b.prime_value_bound),
            (BigUint::from(32u32), BigUint::from(64u32))
        );
        assert!(prime_budget_bound(1, 1).is_err());
    }

    #[test]
    fn bad_prime_fixtures() {
        let g = diamond();
        assert!(is_bad_prime_st(&g, &WeightFn::unit(4), 0, 3).unwrap());
        assert_eq!(st_collision(&g, &WeightFn::unit(4), 0, 3).unwrap(), Some(2));
        let p3 = WeightFn::from_weights(vec![2, 1, 2, 1]).unwrap();
        assert!(!is_bad_prime_st(&g, &p3, 0, 3).unwrap());
        assert!(
            !is_bad_prime_st(&line3(), &WeightFn::from_weights(vec![5, 9]).unwrap(), 0, 2).unwrap()
        );
    }

    #[test]
    fn audit_lines_format() {
        let r = find_good_prime(
            &diamond_chain(2),
            0,
            Criterion::DistinctStWeights { t: 6 },
            10,
        )
        .unwrap();
        let lines = r.audit_lines();
        assert!(lines.last().unwrap().ends_with("verdict=good reason=none"));
        for l in &lines[..lines.len() - 1] {
            assert!(l.contains("verdict=bad reason=st-collision at weight "));
        }
    }

    #[test]
    fn parallel_search_matches_sequential() {
        let g = diamond_chain(4);
        let crit = Criterion::DistinctStWeights { t: 12 };
        let seq = find_good_prime_with(&g, 0, crit, 40, Execution::Sequential).unwrap();
        let par = find_good_prime_with(&g, 0, crit, 40, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
    }
}
