use brieskorn_core::arith::{cf_expand, solve_seifert_diophantine};
use brieskorn_core::fast::{center, delta, f_eval, lattice_max_exhaustive, nearest_odd, LatticePoint};
use brieskorn_core::oracle::{
    classify_terminals, enumerate_initial, run_full_path, run_full_path_traced, Verdict,
    VertexOrder, DEFAULT_STEP_BUDGET,
};
use brieskorn_core::{
    build_star_graph, d_invariant, enumerate_triplets, AslGraph,
    PlumbingGraph, Triplet,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn asl(p: u64, q: u64, r: u64) -> AslGraph {
    AslGraph::new(Triplet::new(p, q, r).unwrap()).unwrap()
}

fn odd_triplets(max_p: u64) -> Vec<Triplet> {
    (3..=max_p).step_by(2).flat_map(|p| enumerate_triplets(p).unwrap()).collect()
}

#[test]
fn degree_is_constant_along_full_paths() {
    let g = asl(3, 5, 7);
    for k in enumerate_initial(g.graph(), u64::MAX).unwrap().step_by(7) {
        let k2 = g.graph().k_squared(&k).unwrap();
        let (_, trace) =
            run_full_path_traced(g.graph(), &k, VertexOrder::LowestFirst, DEFAULT_STEP_BUDGET)
                .unwrap();
        for step in &trace {
            assert_eq!(g.graph().k_squared(step).unwrap(), k2);
        }
    }
}

#[test]
fn verdict_does_not_depend_on_vertex_order() {
    for t in 1..=6 {
        let low = classify_terminals(t, VertexOrder::LowestFirst).unwrap();
        let high = classify_terminals(t, VertexOrder::HighestFirst).unwrap();
        for (k, out) in &low {
            assert_eq!(out.verdict, high[k].verdict, "A_{t} from {:?}", k.evals);
        }
    }
    let g = asl(2, 3, 5);
    for k in enumerate_initial(g.graph(), u64::MAX).unwrap() {
        let a = run_full_path(g.graph(), &k, VertexOrder::LowestFirst, DEFAULT_STEP_BUDGET).unwrap();
        let b = run_full_path(g.graph(), &k, VertexOrder::HighestFirst, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(a.verdict, b.verdict, "E8 from {:?}", k.evals);
    }
}

#[test]
fn two_or_more_twos_is_bad_up_to_twelve() {
    for t in 2..=12 {
        for (k, out) in classify_terminals(t, VertexOrder::LowestFirst).unwrap() {
            if k.evals.iter().filter(|&&x| x == 2).count() >= 2 {
                assert_eq!(out.verdict, Verdict::Bad, "A_{t} from {:?}", k.evals);
            }
        }
    }
}

#[test]
fn linear_graph_determinant_is_signed_numerator() {
    for p in 2..=50u64 {
        for pp in 1..p {
            if p.gcd(&pp) != 1 {
                continue;
            }
            let cf = cf_expand(p, pp).unwrap();
            let g = PlumbingGraph::linear(cf.terms().iter().map(|t| -t).collect()).unwrap();
            let sign = if cf.len() % 2 == 0 { 1 } else { -1 };
            assert_eq!(g.determinant(), BigInt::from(sign * p as i64), "{p}/{pp}");
        }
    }
}

#[test]
fn determinant_multiplies_over_components() {
    let g = PlumbingGraph::new(
        vec![-2, -3, -2, -5, -2, -4, -7],
        vec![(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (5, 6)],
    )
    .unwrap();
    for cut in 0..g.len() {
        let keep: Vec<bool> = (0..g.len()).map(|v| v != cut).collect();
        let product: BigInt = g
            .components(&keep)
            .iter()
            .map(|comp| {
                let mut only = vec![false; g.len()];
                comp.iter().for_each(|&v| only[v] = true);
                g.induced_determinant(&only)
            })
            .product();
        assert_eq!(g.induced_determinant(&keep), product, "cut {cut}");
    }
}

#[test]
fn asl_graph_is_the_star_resolution() {
    for p in 2..=30 {
        for t in enumerate_triplets(p).unwrap() {
            let s = solve_seifert_diophantine(t.p(), t.q(), t.r()).unwrap();
            let star = build_star_graph(t.p(), t.q(), t.r(), &s).unwrap();
            let g = AslGraph::new(t).unwrap();
            assert!(star.is_isomorphic(g.graph()), "{t}");
            assert!(star.determinant().magnitude().to_u64() == Some(1), "{t}");
        }
    }
}

#[test]
fn maxima_agree_for_all_odd_p_to_199() {
    for t in odd_triplets(199) {
        let (full, _) = lattice_max_exhaustive(&t);
        assert_eq!(d_invariant(&t).unwrap().max_f, Some(full), "{t}");
    }
}

#[test]
fn d_is_at_least_p_minus_one() {
    for t in odd_triplets(101) {
        let d = d_invariant(&t).unwrap().d;
        assert!(d >= t.p() as i64 - 1, "{t}: d = {d}");
    }
}

#[test]
fn delta_decreases_in_m() {
    for t in odd_triplets(61) {
        for m in 0..t.m_max() as i64 {
            assert!(delta(&t, m) > delta(&t, m + 1), "{t} at m = {m}");
        }
    }
}

#[test]
fn ties_have_equal_neighbours() {
    let mut ties = 0;
    for t in odd_triplets(61) {
        for m in 0..=t.m_max() as i64 {
            let (a, tie) = nearest_odd(&center(&t, m));
            if tie {
                let a = a.to_i64().unwrap();
                assert_eq!(f_eval(&t, a, m), f_eval(&t, a - 2, m), "{t} at m = {m}");
                ties += 1;
            }
        }
    }
    // m = 0 always ties at c = 0
    assert!(ties > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_matches_quadratic_form(idx in 0usize..1000, a_seed in 0i64..1000, m_seed in 0u64..1000) {
        let all = odd_triplets(15);
        let t = all[idx % all.len()];
        let p = t.p() as i64;
        let a = -p + 2 * (a_seed % (p + 1));
        let m = m_seed % (t.m_max() + 1);
        let g = AslGraph::new(t).unwrap();
        let k = g.k_am(a, m).unwrap();
        let k2 = g.graph().k_squared(&k).unwrap();
        prop_assert!(LatticePoint::new(&t, a, m as i64).is_ok());
        prop_assert_eq!(k2.to_integer(), f_eval(&t, a, m as i64));
    }

    #[test]
    fn degree_is_even_in_k(idx in 0usize..10_000) {
        let g = asl(3, 4, 11);
        let k = enumerate_initial(g.graph(), u64::MAX).unwrap().nth(idx % 49_152).unwrap();
        let graph = g.graph();
        prop_assert_eq!(graph.k_squared(&k).unwrap(), graph.k_squared(&k.negated()).unwrap());
    }
}
