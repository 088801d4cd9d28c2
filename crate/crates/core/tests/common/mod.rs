//! Formula corpus and structural checks shared by the acceptance run and the
//! property suites.

#![allow(dead_code)]

use solspace::coarsening::{
    coarsen_assignment, core_of_cluster, is_cover, strip_clauses, OrderPolicy, Symbol, TriAssignment,
};
use solspace::formula::{gen_planted_negative, gen_uniform, Assignment, Formula, SelectionMode};
use solspace::geometry::{
    census_of_words, decompose_clusters, enumerate_solutions, pair_distance_census, projection_of, region_partition,
    CensusLimits, ClusterDecomposition, SolutionSet,
};

/// Densities per k, spread across the satisfiable range at small n.
fn densities(k: usize) -> [f64; 3] {
    match k {
        3 => [2.0, 3.0, 4.0],
        4 => [5.0, 7.0, 9.0],
        _ => [10.0, 15.0, 20.0],
    }
}

/// Deterministic corpus entry `i`: n ∈ [6, 24], k ∈ {3, 4, 5}, mixed
/// densities, alternately uniform and planted.
pub fn corpus_formula(i: u64) -> Formula {
    let k = 3 + (i % 3) as usize;
    let n = 6 + ((i * 7) % 19) as usize;
    let r = densities(k)[((i / 3) % 3) as usize];
    let m = (r * n as f64).round() as usize;
    if (i / 9) % 2 == 0 {
        gen_planted_negative(n, k, m, i, SelectionMode::Distinct).unwrap()
    } else {
        gen_uniform(n, k, m, i, SelectionMode::Distinct).unwrap()
    }
}

pub struct Analysed {
    pub formula: Formula,
    pub set: SolutionSet,
    pub clusters: ClusterDecomposition,
}

pub fn analyse(f: Formula) -> Analysed {
    let set = enumerate_solutions(&f).unwrap();
    let clusters = decompose_clusters(&set, 1).unwrap();
    Analysed { formula: f, set, clusters }
}

/// Violations of the coarsening properties, by kind.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CoarseningViolations {
    pub order_dependent: usize,
    pub cluster_inconsistent: usize,
    pub not_cover: usize,
    pub not_frozen: usize,
    pub strip_mismatch: usize,
}

impl CoarseningViolations {
    pub fn total(&self) -> usize {
        self.order_dependent + self.cluster_inconsistent + self.not_cover + self.not_frozen + self.strip_mismatch
    }

    pub fn add(&mut self, o: &Self) {
        self.order_dependent += o.order_dependent;
        self.cluster_inconsistent += o.cluster_inconsistent;
        self.not_cover += o.not_cover;
        self.not_frozen += o.not_frozen;
        self.strip_mismatch += o.strip_mismatch;
    }
}

fn assignment(w: u64, n: usize) -> Assignment {
    Assignment::from_word(w, n)
}

/// Check order independence (on up to `order_samples` members per cluster),
/// the cluster-wide identity of fixed points, the cover property, frozenness
/// of core positions, and agreement of clause stripping with coarsening.
pub fn coarsening_violations(a: &Analysed, order_samples: usize) -> CoarseningViolations {
    let f = &a.formula;
    let n = f.n();
    let mut v = CoarseningViolations::default();
    for (ci, cluster) in a.clusters.clusters.iter().enumerate() {
        let core = core_of_cluster(f, cluster).unwrap();
        let proj = projection_of(n, cluster).unwrap();
        for (j, &w) in cluster.iter().enumerate() {
            let sigma = assignment(w, n);
            let fp = coarsen_assignment(f, &sigma, &OrderPolicy::LowestIndex).unwrap().fixed_point;
            if fp != core {
                v.cluster_inconsistent += 1;
            }
            if strip_clauses(f, &sigma).unwrap() != fp {
                v.strip_mismatch += 1;
            }
            if j < order_samples {
                let reversed: Vec<usize> = (0..n).rev().collect();
                let seed = (ci * 1000 + j) as u64;
                for policy in [OrderPolicy::Random { seed }, OrderPolicy::Supplied(reversed)] {
                    if coarsen_assignment(f, &sigma, &policy).unwrap().fixed_point != fp {
                        v.order_dependent += 1;
                    }
                }
            }
        }
        if !is_cover(f, &core).unwrap() {
            v.not_cover += 1;
        }
        if !frozen_positions_agree(&core, &proj) {
            v.not_frozen += 1;
        }
    }
    v
}

/// Every non-∗ position of `core` carries the same fixed value in `proj`.
pub fn frozen_positions_agree(core: &TriAssignment, proj: &TriAssignment) -> bool {
    (0..core.len()).all(|i| match core.get(i) {
        Symbol::Star => true,
        s => proj.get(i) == s,
    })
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct GeometryOutcome {
    pub census_gaps: usize,
    pub region_violations: usize,
    /// Formulas whose (a, b) gap made the region check non-vacuous.
    pub region_cases: usize,
}

/// Within-cluster distance censuses have no gaps up to the diameter, and
/// regions built for a gap (a, b) in the pair-distance census are at least
/// b away from everything else.
pub fn geometry_outcome(a: &Analysed) -> GeometryOutcome {
    let n = a.formula.n();
    let mut out = GeometryOutcome::default();
    for cluster in &a.clusters.clusters {
        let census = census_of_words(n, cluster, CensusLimits::default()).unwrap();
        if (1..=census.diameter()).any(|t| census.get(t) == 0) {
            out.census_gaps += 1;
        }
    }
    if a.set.len() >= 2 {
        let census = pair_distance_census(&a.set).unwrap();
        let present: Vec<usize> = census.nonzero().into_iter().map(|(d, _)| d).filter(|&d| d > 0).collect();
        if let Some(w) = present.windows(2).find(|w| w[1] - w[0] >= 2) {
            let (ga, gb) = (w[0] as u32, w[1] as u32);
            out.region_cases += 1;
            let regions = region_partition(&a.clusters, ga, gb).unwrap();
            for r in &regions {
                if r.min_external_distance.is_some_and(|d| d < gb) {
                    out.region_violations += 1;
                }
            }
        }
    }
    out
}
