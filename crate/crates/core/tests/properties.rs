use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

use minuniq::counting::{reach_lfew_count, spl_indicator_vector, weight_query_table};
use minuniq::gen::{self, LayeredShape};
use minuniq::graph::{
    count_paths_capped, enumerate_paths, expand_weights, min_unique_report, shortest_distances,
    PathCount,
};
use minuniq::isolation::{
    find_good_prime, find_good_prime_with, is_bad_prime_st, lex_edge_ranks, modular_weight_fn,
    odd_primes, Criterion,
};
use minuniq::machines::{
    acc, classify, is_min_unique_transducer, opt_value, rej, ConfigMachine, Halt,
};
use minuniq::ra::{ra_decide, ra_reference_counts, RaAnswer, RaConfig};
use minuniq::reductions::{
    bfs_tree_weights, edge_order, logfew_to_uoptl, three_page_reach_instance,
    transducer_to_shortest_path, validate_book_embedding, TransducerParams,
};
use minuniq::{reach, Cost, DiGraph, Execution, WeightFn};

const CAP: usize = 100_000;

/// Any simple digraph on up to `max_n` vertices, cycles allowed.
fn digraph(max_n: usize) -> impl Strategy<Value = DiGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let edges = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .zip(bits)
                .filter(|&((a, b), keep)| keep && a != b)
                .map(|(e, _)| e)
                .collect();
            DiGraph::new(n, edges).unwrap()
        })
    })
}

/// DAG on up to `max_n` vertices whose identity order is topological.
fn dag(max_n: usize) -> impl Strategy<Value = DiGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = gen::tournament_edges(n);
        (0..1u64 << pairs).prop_map(move |mask| gen::tournament_subset(n, mask))
    })
}

fn with_weights(g: DiGraph, max: u64) -> impl Strategy<Value = (DiGraph, WeightFn)> {
    let m = g.m();
    proptest::collection::vec(1..=max, m).prop_map(move |ws| {
        let w = WeightFn::new(ws, max).unwrap();
        (g.clone(), w)
    })
}

fn weighted_digraph(max_n: usize, max_w: u64) -> impl Strategy<Value = (DiGraph, WeightFn)> {
    digraph(max_n).prop_flat_map(move |g| with_weights(g, max_w))
}

fn weighted_dag(max_n: usize, max_w: u64) -> impl Strategy<Value = (DiGraph, WeightFn)> {
    dag(max_n).prop_flat_map(move |g| with_weights(g, max_w))
}

fn shape() -> impl Strategy<Value = LayeredShape> {
    (1..=5usize, 1..=4usize).prop_map(|(layers, width)| LayeredShape { layers, width })
}

fn transducer() -> impl Strategy<Value = ConfigMachine> {
    (any::<u64>(), shape(), 0..=5u64).prop_map(|(seed, shape, max_inc)| {
        gen::random_transducer(&mut gen::rng(seed), shape, max_inc).unwrap()
    })
}

fn start_sink_paths(m: &ConfigMachine) -> Vec<Vec<usize>> {
    let g = m.graph();
    (0..g.n())
        .filter(|&v| g.out_edges(v).is_empty())
        .flat_map(|v| enumerate_paths(g, m.start(), v, CAP).unwrap().paths)
        .collect()
}

fn path_output(m: &ConfigMachine, path: &[usize]) -> u64 {
    path.windows(2)
        .map(|p| {
            let e = m
                .graph()
                .out_edges(p[0])
                .iter()
                .find(|&&(d, _)| d == p[1])
                .unwrap()
                .1;
            m.inc(e)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn min_unique_report_matches_enumeration((g, w) in weighted_digraph(8, 4), s in 0usize..8) {
        let s = s % g.n();
        let report = min_unique_report(&g, &w, s).unwrap();
        for v in 0..g.n() {
            let paths = enumerate_paths(&g, s, v, CAP).unwrap();
            prop_assert!(!paths.truncated);
            let weights: Vec<u64> = paths.paths.iter().map(|p| w.path_weight(&g, p).unwrap()).collect();
            let min = weights.iter().min().copied();
            prop_assert_eq!(report.vertices[v].dist(), min);
            if min.is_some() {
                let tight = weights.iter().filter(|&&x| Some(x) == min).count();
                prop_assert_eq!(report.vertices[v].multiplicity(), BigUint::from(tight));
            }
        }
    }

    #[test]
    fn expansion_preserves_distances((g, w) in weighted_digraph(8, 5), s in 0usize..8) {
        let s = s % g.n();
        let exp = expand_weights(&g, &w).unwrap();
        let unit = exp.graph.bfs_levels(s);
        let weighted = shortest_distances(&g, &w, s).unwrap();
        for v in 0..g.n() {
            prop_assert_eq!(unit[v].map(|d| d as u64), weighted[v]);
        }
    }

    #[test]
    fn path_counts_agree(g in digraph(7), s in 0usize..7) {
        let s = s % g.n();
        for v in 0..g.n() {
            let list = enumerate_paths(&g, s, v, CAP).unwrap();
            let count = count_paths_capped(&g, s, v, CAP as u64).unwrap();
            prop_assert_eq!(count, PathCount::Exact(BigUint::from(list.paths.len())));
            prop_assert_eq!(reach(&g, s, v).unwrap(), !list.paths.is_empty());
        }
    }

    #[test]
    fn acc_plus_rej_counts_computations(m in transducer()) {
        let total = start_sink_paths(&m).len();
        prop_assert_eq!(acc(&m) + rej(&m), BigUint::from(total));
    }

    #[test]
    fn class_implications(seed in any::<u64>(), shape in shape(), p in 1u64..6) {
        let m = gen::layered_machine(&mut gen::rng(seed), shape).unwrap();
        let f = classify(&m, p);
        prop_assert!(!f.unambiguous || f.weakly_unambiguous);
        prop_assert!(!f.reach_unambiguous || f.weakly_unambiguous);
        prop_assert!(!f.unambiguous || f.few);
        prop_assert!(!f.reach_unambiguous || f.reach_few);
    }

    #[test]
    fn opt_value_is_min_over_accepting_paths(m in transducer()) {
        let best = start_sink_paths(&m)
            .iter()
            .filter(|p| m.halt(*p.last().unwrap()) == Halt::Accept)
            .map(|p| path_output(&m, p))
            .min();
        let expected = best.map_or(Cost::Infinite, Cost::Finite);
        prop_assert_eq!(opt_value(&m).unwrap(), expected);
    }

    #[test]
    fn modular_weights_are_congruent(g in dag(9), pi in 0usize..8) {
        let p = odd_primes().nth(pi).unwrap();
        let w = modular_weight_fn(&g, p).unwrap();
        let ranks = lex_edge_ranks(&g);
        prop_assert!(w.weights().iter().all(|&x| (1..p).contains(&x)));
        for path in enumerate_paths(&g, 0, g.n() - 1, 1000).unwrap().paths {
            let exact: BigUint = path
                .windows(2)
                .map(|e| {
                    let id = g.out_edges(e[0]).iter().find(|&&(d, _)| d == e[1]).unwrap().1;
                    BigUint::one() << ranks[id]
                })
                .sum();
            let modular = w.path_weight(&g, &path).unwrap();
            prop_assert_eq!(BigUint::from(modular) % p, exact % p);
        }
    }

    #[test]
    fn bad_prime_matches_pairwise((g, w) in weighted_dag(7, 6)) {
        let t = g.n() - 1;
        let mut weights: Vec<u64> = enumerate_paths(&g, 0, t, CAP)
            .unwrap()
            .paths
            .iter()
            .map(|p| w.path_weight(&g, p).unwrap())
            .collect();
        weights.sort_unstable();
        let pairwise = weights.windows(2).any(|x| x[0] == x[1]);
        prop_assert_eq!(is_bad_prime_st(&g, &w, 0, t).unwrap(), pairwise);
    }

    #[test]
    fn prime_search_is_deterministic(g in dag(8)) {
        let t = g.n() - 1;
        for criterion in [Criterion::MinUniqueWrtS, Criterion::DistinctStWeights { t }] {
            let a = find_good_prime(&g, 0, criterion, 64).unwrap();
            let b = find_good_prime(&g, 0, criterion, 64).unwrap();
            let c = find_good_prime_with(&g, 0, criterion, 64, Execution::Parallel).unwrap();
            prop_assert_eq!(a.audit_lines(), b.audit_lines());
            prop_assert_eq!(&a, &c);
        }
    }

    #[test]
    fn weight_table_marginal_counts_paths((g, w) in weighted_dag(8, 3)) {
        let horizon = w.weights().iter().sum();
        let table = weight_query_table(&g, &w, 0, horizon).unwrap();
        for v in 0..g.n() {
            let paths = enumerate_paths(&g, 0, v, CAP).unwrap().paths.len();
            prop_assert_eq!(table.marginal(v), BigUint::from(paths));
        }
    }

    #[test]
    fn reach_lfew_count_is_exact(seed in any::<u64>(), n in 2usize..=12, t in 0usize..12) {
        let g = gen::reach_few_dag(&mut gen::rng(seed), n, 8, gen::Density::new(1, 2)).unwrap();
        let t = t % n;
        let got = reach_lfew_count(&g, 0, t, 8, 1000).unwrap();
        let expected = enumerate_paths(&g, 0, t, CAP).unwrap().paths.len();
        prop_assert_eq!(got.count, BigUint::from(expected));
    }

    #[test]
    fn tree_weights_are_min_unique(g in digraph(14), s in 0usize..14) {
        let s = s % g.n();
        let w = bfs_tree_weights(&g, s).unwrap();
        prop_assert!(min_unique_report(&g, &w, s).unwrap().min_unique_wrt_s);
    }

    #[test]
    fn layered_graph_offsets_the_optimum(m in transducer()) {
        let params = TransducerParams::fitting(&m).unwrap();
        let inst = transducer_to_shortest_path(&m, params).unwrap();
        let d = shortest_distances(&inst.graph, &inst.weights, inst.source).unwrap()[inst.sink];
        let opt = opt_value(&m).unwrap();
        match opt {
            Cost::Infinite => prop_assert_eq!(d, None),
            Cost::Finite(o) => prop_assert_eq!(d, Some(o + params.offset().unwrap())),
        }
    }

    #[test]
    fn indicator_marks_the_optimum(seed in any::<u64>(), shape in shape()) {
        let m = gen::min_unique_transducer(&mut gen::rng(seed), shape, 6, 10_000).unwrap();
        let h = spl_indicator_vector(&m).unwrap();
        let ones: Vec<usize> = h.iter().enumerate().filter(|(_, &x)| x == 1).map(|(j, _)| j).collect();
        match opt_value(&m).unwrap() {
            Cost::Infinite => prop_assert!(ones.is_empty()),
            Cost::Finite(o) => prop_assert_eq!(ones, vec![o as usize]),
        }
        prop_assert!(h.iter().all(|&x| x <= 1));
    }

    #[test]
    fn uoptl_decodes_acc(seed in any::<u64>(), shape in shape()) {
        let m = gen::weakly_unambiguous_machine(&mut gen::rng(seed), shape, 6).unwrap();
        let inst = logfew_to_uoptl(&m, 6).unwrap();
        prop_assert!(is_min_unique_transducer(&inst.machine).unwrap());
        let decoded = inst.decode(opt_value(&inst.machine).unwrap()).unwrap();
        prop_assert_eq!(BigUint::from(decoded), acc(&m));
    }

    #[test]
    fn three_pages_preserve_reachability(g in dag(9), s in 0usize..9, t in 0usize..9) {
        let (s, t) = (s % g.n(), t % g.n());
        let (_, book) = three_page_reach_instance(&g, s, t).unwrap();
        prop_assert_eq!(validate_book_embedding(&book.h, &book.embedding).unwrap(), None);
        prop_assert_eq!(reach(&g, s, t).unwrap(), reach(&book.h, book.source, book.sink).unwrap());
    }

    #[test]
    fn edge_order_increases_along_paths(g in dag(8)) {
        let ranks = edge_order(&g).unwrap().ranks();
        for s in 0..g.n() {
            for t in 0..g.n() {
                for path in enumerate_paths(&g, s, t, CAP).unwrap().paths {
                    let r: Vec<usize> = path
                        .windows(2)
                        .map(|e| ranks[g.out_edges(e[0]).iter().find(|&&(d, _)| d == e[1]).unwrap().1])
                        .collect();
                    prop_assert!(r.windows(2).all(|x| x[0] < x[1]));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ra_audit_contract((g, w) in weighted_digraph(6, 2), s in 0usize..6, t in 0usize..6) {
        let (s, t) = (s % g.n(), t % g.n());
        let audited = ra_decide(&g, &w, s, t, &RaConfig::default()).unwrap();
        prop_assert_eq!(audited.accepting_computations, Some(BigUint::one()));
        prop_assert!(audited.conflicting_computations.unwrap().is_zero());
        let min_unique = min_unique_report(&g, &w, s).unwrap().min_unique_wrt_s;
        let truth = match (min_unique, reach(&g, s, t).unwrap()) {
            (false, _) => RaAnswer::NotMinUnique,
            (true, true) => RaAnswer::Reached,
            (true, false) => RaAnswer::NotReached,
        };
        prop_assert_eq!(audited.answer, truth);
        if min_unique {
            let expanded = expand_weights(&g, &w).unwrap().graph;
            let reference = ra_reference_counts(&expanded, s).unwrap();
            prop_assert!(reference.starts_with(&audited.stage_counts));
            let (last_c, _) = *audited.stage_counts.last().unwrap();
            prop_assert_eq!(last_c, expanded.bfs_levels(s).iter().flatten().count());
        }
        let quick = ra_decide(&g, &w, s, t, &RaConfig { audit: false, ..RaConfig::default() }).unwrap();
        prop_assert_eq!(quick.answer, audited.answer);
    }
}
