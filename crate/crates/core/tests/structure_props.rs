//! Coarsening and solution-space geometry on small random formulas.

mod common;

use proptest::prelude::*;

use solspace::coarsening::{coarsen_assignment, is_free, strip_clauses, OrderPolicy, Symbol, TriAssignment};
use solspace::formula::{gen_planted_negative, gen_uniform, Assignment, Formula, SelectionMode};
use solspace::geometry::{
    census_direct, census_transform, cluster_distances, decompose_clusters, enumerate_solutions, pair_distance_census,
};

fn small_formula() -> impl Strategy<Value = Formula> {
    (6usize..16, 3usize..5, 1.0f64..8.0, any::<u64>(), any::<bool>()).prop_map(|(n, k, r, seed, planted)| {
        let m = (r * n as f64).round() as usize;
        if planted {
            gen_planted_negative(n, k, m, seed, SelectionMode::Distinct).unwrap()
        } else {
            gen_uniform(n, k, m, seed, SelectionMode::Distinct).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn coarsening_properties_hold(f in small_formula()) {
        let a = common::analyse(f);
        let v = common::coarsening_violations(&a, 3);
        prop_assert_eq!(v.total(), 0, "{:?}", v);
    }

    #[test]
    fn decomposition_is_a_valid_partition(f in small_formula(), radius in 1u32..3) {
        let set = enumerate_solutions(&f).unwrap();
        let d = decompose_clusters(&set, radius).unwrap();
        prop_assert!(d.check(&set).is_ok());
        let total: usize = d.clusters.iter().map(Vec::len).sum();
        prop_assert_eq!(total, set.len());
        // Distinct clusters are further apart than the linking radius.
        for (i, row) in cluster_distances(&d).iter().enumerate() {
            for (j, &dist) in row.iter().enumerate() {
                if i != j {
                    prop_assert!(dist > radius);
                }
            }
        }
    }

    #[test]
    fn geometry_properties_hold(f in small_formula()) {
        let g = common::geometry_outcome(&common::analyse(f));
        prop_assert_eq!(g.census_gaps, 0);
        prop_assert_eq!(g.region_violations, 0);
    }

    #[test]
    fn census_methods_agree(n in 1usize..14, words in proptest::collection::btree_set(any::<u64>(), 0..60)) {
        let mask = (1u64 << n) - 1;
        let mut ws: Vec<u64> = words.into_iter().map(|w| w & mask).collect();
        ws.sort_unstable();
        ws.dedup();
        let direct = census_direct(n, &ws);
        prop_assert_eq!(&direct, &census_transform(n, &ws));
        let pairs = ws.len() as u64 * (ws.len() as u64).saturating_sub(1) / 2;
        prop_assert_eq!(direct.total() - direct.get(0), pairs);
    }

    #[test]
    fn fixed_point_is_stable_and_dominates(f in small_formula(), seed: u64) {
        let set = enumerate_solutions(&f).unwrap();
        prop_assume!(!set.is_empty());
        let w = set.members()[(seed % set.len() as u64) as usize];
        let sigma = Assignment::from_word(w, f.n());
        let trace = coarsen_assignment(&f, &sigma, &OrderPolicy::Random { seed }).unwrap();
        prop_assert!(trace.replay(&f).is_ok());
        let fp = &trace.fixed_point;
        prop_assert!(fp.dominates(&TriAssignment::from(&sigma)));
        for i in 0..f.n() {
            if fp.get(i) != Symbol::Star {
                prop_assert!(!is_free(&f, fp, i).unwrap());
            }
        }
        prop_assert_eq!(&strip_clauses(&f, &sigma).unwrap(), fp);
    }
}

#[test]
fn empty_formula_coarsens_to_all_star() {
    let f = gen_uniform(5, 3, 0, 0, SelectionMode::Distinct).unwrap();
    let set = enumerate_solutions(&f).unwrap();
    assert_eq!(set.len(), 32);
    let census = pair_distance_census(&set).unwrap();
    assert_eq!(census.get(5), 16);
    let fp = coarsen_assignment(&f, &Assignment::zeros(5), &OrderPolicy::LowestIndex).unwrap().fixed_point;
    assert_eq!(fp.star_count(), 5);
}
