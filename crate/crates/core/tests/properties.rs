use proptest::prelude::*;
use spanlab::audit::{check_base_graph_properties, check_composed_properties};
use spanlab::cluster::{decompose, verify_decomposition};
use spanlab::convex::{build_convex_set, check_cis_properties, check_strong_convexity};
use spanlab::distortion::{additive_distortion, AuditOptions};
use spanlab::emulator::build_emulator;
use spanlab::gen;
use spanlab::lower_bound::{
    build_base_graph, build_outer_graph, compose, default_phi, preset_inner, tiny_outer_vectors, BaseGraphSpec,
};
use spanlab::paths::sssp;
use spanlab::preserver::{build_preserver, check_consistency, consistent_shortest_path, PathSystem};
use spanlab::schedule::{exponent_schedule, ratio_to_f64, Kind};
use spanlab::spanner::build_spanner;
use spanlab::sparsify::SparsifierConfig;

fn connected_gnm(n: usize, extra: usize, seed: u64) -> spanlab::Graph {
    let m = (n - 1 + extra).min(n * (n - 1) / 2);
    gen::gnm(n, m, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schedule_decreases_to_fixed_point(iters in 1usize..40) {
        for kind in [Kind::Emulator, Kind::Spanner] {
            let s = exponent_schedule(kind, iters);
            let fixed = kind.fixed_point();
            for w in s.values.windows(2) {
                prop_assert!(w[1] < w[0]);
                prop_assert!(ratio_to_f64(&w[1]) > fixed - 1e-12);
            }
        }
    }

    #[test]
    fn consistent_paths_are_shortest_and_consistent(n in 4usize..30, extra in 0usize..60, seed in 0u64..1000) {
        let g = connected_gnm(n, extra, seed);
        let mut ps = PathSystem::default();
        for s in 0..n.min(6) {
            let d = sssp(&g, s);
            for t in 0..n {
                if s == t || d.get(t).is_none() {
                    continue;
                }
                let p = consistent_shortest_path(&g, s, t).unwrap();
                prop_assert_eq!(p.len() as u32 - 1, d.get(t).unwrap());
                prop_assert_eq!((p[0], *p.last().unwrap()), (s, t));
                ps.push(p);
            }
        }
        prop_assert!(check_consistency(&ps).passed());
    }

    #[test]
    fn preserver_is_exact(n in 6usize..40, extra in 0usize..80, k in 1usize..8, seed in 0u64..1000) {
        let g = connected_gnm(n, extra, seed);
        let pairs: Vec<_> = gen::random_pairs(n, k, seed)
            .unwrap()
            .into_iter()
            .filter(|&(s, t)| sssp(&g, s).get(t).is_some())
            .collect();
        prop_assume!(!pairs.is_empty());
        let p = build_preserver(&g, &pairs).unwrap();
        let opts = AuditOptions { pairs: Some(&pairs), require_subgraph: true, ..Default::default() };
        let rep = additive_distortion(&g, &p.subgraph, &opts).unwrap();
        prop_assert_eq!(rep.max_additive, 0);
        prop_assert!(check_consistency(&p.paths).passed());
    }

    #[test]
    fn decomposition_verifies(n in 10usize..80, extra in 0usize..150, r in 1u32..6, eps in 0.15f64..0.6, seed in 0u64..1000) {
        let g = connected_gnm(n, extra, seed);
        let d = decompose(&g, r, eps).unwrap();
        prop_assert!(verify_decomposition(&g, &d, r, eps).all_ok());
    }

    #[test]
    fn emulator_and_spanner_meet_stop_threshold(n in 8usize..50, extra in 0usize..120, seed in 0u64..1000) {
        let g = connected_gnm(n, extra, seed);
        let mut cfg = SparsifierConfig::emulator();
        cfg.seed = seed;
        let em = build_emulator(&g, &cfg).unwrap();
        let rep = additive_distortion(&g, &em.graph, &AuditOptions::default()).unwrap();
        prop_assert!(rep.max_additive <= 16 * em.r_hat as u64);

        let mut cfg = SparsifierConfig::spanner();
        cfg.seed = seed;
        let sp = build_spanner(&g, &cfg).unwrap();
        let opts = AuditOptions { require_subgraph: true, ..Default::default() };
        let rep = additive_distortion(&g, &sp.subgraph, &opts).unwrap();
        prop_assert!(rep.max_additive <= 32 * sp.r_hat as u64);
        prop_assert!(check_consistency(&sp.path_system).passed());
    }

    #[test]
    fn convex_sets_have_their_properties(r in 8u32..120) {
        let w = build_convex_set(r).unwrap();
        prop_assert!(check_cis_properties(&w, 16).exact_properties_hold());
        prop_assert!(check_strong_convexity(&w.vectors).is_ok());
    }

    #[test]
    fn base_graphs_pass_audit(half_r in 4u32..7, dx in 0u32..12, dy in 0u32..12) {
        let r = 2 * half_r;
        let w = build_convex_set(r).unwrap();
        let vectors: Vec<_> = w
            .vectors
            .into_iter()
            .filter(|&(a, b)| 2 * a >= r as i64 && a <= r as i64 && b <= a)
            .collect();
        prop_assume!(!vectors.is_empty());
        let x = 4 * r + dx;
        let y = 2 * (x + dy);
        let spec = BaseGraphSpec { x, y, r, vectors };
        prop_assume!(spec.validate().is_ok());
        let bg = build_base_graph(&spec).unwrap();
        let rep = check_base_graph_properties(&bg).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.failed());
    }

    #[test]
    fn composition_partitions_edges(dx in 0u32..4, dy in 0u32..8, prune in any::<bool>()) {
        let inner = preset_inner(2, 4).unwrap();
        let w = tiny_outer_vectors();
        let outer = build_outer_graph(8 + dx, 16 + dy, &w).unwrap();
        let phi = default_phi(&w, &inner).unwrap();
        let inst = compose(&outer, &inner, &phi, prune).unwrap();
        let rep = check_composed_properties(&inst).unwrap();
        if prune {
            prop_assert!(rep.passed(), "{:?}", rep.failed());
        } else {
            prop_assert!(rep.check("subdivision_length").unwrap().passed);
            prop_assert!(rep.check("paths_in_graph").unwrap().passed);
        }
    }
}
