//! Exhaustive solution-space geometry for small n: solution sets, clusters,
//! projections, pair-distance censuses and cluster-regions.
//!
//! Assignments are packed into `u64` words (bit i is variable i).

use rayon::prelude::*;
use serde::Serialize;

use crate::coarsening::{Symbol, TriAssignment};
use crate::error::{Error, Result};
use crate::formula::Formula;

/// Default maximum n for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 26;

/// Projection of a cluster: ∗ where the variable takes both values.
pub type Projection = TriAssignment;

/// The satisfying assignments of a formula, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    n: usize,
    members: Vec<u64>,
}

impl SolutionSet {
    /// Build from arbitrary words; sorts and removes duplicates.
    pub fn from_words(n: usize, mut members: Vec<u64>) -> Self {
        members.sort_unstable();
        members.dedup();
        SolutionSet { n, members }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: u64) -> bool {
        self.members.binary_search(&w).is_ok()
    }
}

/// Clause as (positive mask, negative mask): σ satisfies it iff
/// `σ & pos | !σ & neg` is non-zero.
fn clause_masks(f: &Formula) -> Vec<(u64, u64)> {
    f.clauses()
        .iter()
        .map(|c| {
            c.literals.iter().fold((0u64, 0u64), |(p, q), l| {
                if l.negated {
                    (p, q | 1 << l.var)
                } else {
                    (p | 1 << l.var, q)
                }
            })
        })
        .collect()
}

/// All satisfying assignments, using the default cap.
pub fn enumerate_solutions(f: &Formula) -> Result<SolutionSet> {
    enumerate_solutions_with_cap(f, DEFAULT_ENUMERATION_CAP)
}

/// All satisfying assignments by exhaustive evaluation of the 2^n words,
/// split into parallel chunks.
pub fn enumerate_solutions_with_cap(f: &Formula, cap: usize) -> Result<SolutionSet> {
    let n = f.n();
    if n > cap || n > 40 {
        return Err(Error::ResourceLimit(format!("n = {n} exceeds the enumeration cap {cap}")));
    }
    let masks = clause_masks(f);
    let total: u64 = 1 << n;
    const CHUNK: u64 = 1 << 14;
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(total);
            (lo..hi).filter(|&s| masks.iter().all(|&(p, q)| s & p | !s & q != 0)).collect()
        })
        .collect();
    Ok(SolutionSet { n, members: parts.concat() })
}

/// Partition of a solution set into connected components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterDecomposition {
    pub n: usize,
    pub adjacency_radius: u32,
    /// Each cluster sorted ascending; clusters ordered by smallest member.
    pub clusters: Vec<Vec<u64>>,
}

impl ClusterDecomposition {
    /// Verify the partition and separation invariants by brute force.
    pub fn check(&self, set: &SolutionSet) -> Result<()> {
        let mut all: Vec<u64> = self.clusters.concat();
        all.sort_unstable();
        let len_before = all.len();
        all.dedup();
        if all.len() != len_before || all != set.members {
            return Err(Error::InternalConsistency("clusters do not partition the solution set".into()));
        }
        if self.clusters.iter().any(|c| c.is_empty()) {
            return Err(Error::InternalConsistency("empty cluster".into()));
        }
        for i in 0..self.clusters.len() {
            for j in i + 1..self.clusters.len() {
                if min_cross_distance(&self.clusters[i], &self.clusters[j], 0) <= self.adjacency_radius {
                    return Err(Error::InternalConsistency(format!("clusters {i} and {j} are adjacent")));
                }
            }
        }
        Ok(())
    }
}

/// All words of popcount 1..=r over n bits.
fn flip_masks(n: usize, r: u32, limit: usize) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, left: u32, acc: u64, out: &mut Vec<u64>, limit: usize) -> bool {
        for b in start..n {
            let w = acc | 1 << b;
            out.push(w);
            if out.len() > limit {
                return false;
            }
            if left > 1 && !rec(b + 1, n, left - 1, w, out, limit) {
                return false;
            }
        }
        true
    }
    rec(0, n, r, 0, &mut out, limit).then_some(out)
}

/// Connected components where members within Hamming distance `radius` are
/// adjacent, by breadth-first traversal.
pub fn decompose_clusters(set: &SolutionSet, radius: u32) -> Result<ClusterDecomposition> {
    if radius == 0 {
        return Err(Error::InvalidParameters("adjacency radius must be at least 1".into()));
    }
    let members = &set.members;
    let n = set.n;
    let mut clusters = Vec::new();
    if members.is_empty() {
        return Ok(ClusterDecomposition { n, adjacency_radius: radius, clusters });
    }
    if radius as usize >= n {
        clusters.push(members.clone());
        return Ok(ClusterDecomposition { n, adjacency_radius: radius, clusters });
    }
    let masks = flip_masks(n, radius, members.len());
    let mut seen = vec![false; members.len()];
    // Scan strategy keeps the not-yet-reached indices.
    let mut remaining: Vec<usize> = Vec::new();
    if masks.is_none() {
        remaining = (0..members.len()).collect();
    }
    for start in 0..members.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![members[start]];
        let mut head = 0;
        if masks.is_none() {
            remaining.retain(|&j| j != start);
        }
        while head < comp.len() {
            let x = comp[head];
            head += 1;
            match &masks {
                Some(ms) => {
                    for &m in ms {
                        let y = x ^ m;
                        if let Ok(j) = members.binary_search(&y) {
                            if !seen[j] {
                                seen[j] = true;
                                comp.push(y);
                            }
                        }
                    }
                }
                None => {
                    remaining.retain(|&j| {
                        if (members[j] ^ x).count_ones() <= radius {
                            seen[j] = true;
                            comp.push(members[j]);
                            false
                        } else {
                            true
                        }
                    });
                }
            }
        }
        comp.sort_unstable();
        clusters.push(comp);
    }
    Ok(ClusterDecomposition { n, adjacency_radius: radius, clusters })
}

/// Per-variable union of values over a non-empty cluster.
pub fn projection_of(n: usize, cluster: &[u64]) -> Result<Projection> {
    if cluster.is_empty() {
        return Err(Error::InvalidInput("empty cluster".into()));
    }
    let and = cluster.iter().fold(u64::MAX, |a, &w| a & w);
    let or = cluster.iter().fold(0u64, |a, &w| a | w);
    Ok(TriAssignment::new(
        (0..n)
            .map(|i| match (and >> i & 1, or >> i & 1) {
                (1, _) => Symbol::One,
                (_, 0) => Symbol::Zero,
                _ => Symbol::Star,
            })
            .collect(),
    ))
}

/// Exact counts of unordered distinct pairs at each Hamming distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceCensus {
    /// `counts[d]` for d in 0..=n; `counts[0]` is always 0.
    pub counts: Vec<u64>,
}

impl DistanceCensus {
    pub fn get(&self, d: usize) -> u64 {
        self.counts.get(d).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Non-zero entries as (distance, count).
    pub fn nonzero(&self) -> Vec<(usize, u64)> {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(d, &c)| (d, c)).collect()
    }

    /// Largest distance present, 0 for fewer than two points.
    pub fn diameter(&self) -> usize {
        self.counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }
}

/// Size limits for the two census routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusLimits {
    /// Largest number of unordered pairs handled by direct popcounts.
    pub max_pairs: u64,
    /// Largest n handled by the Walsh–Hadamard route (2^n i64 buffer).
    pub max_transform_bits: usize,
}

impl Default for CensusLimits {
    fn default() -> Self {
        CensusLimits { max_pairs: 200_000_000, max_transform_bits: 24 }
    }
}

/// Census by direct pairwise popcounts.
pub fn census_direct(n: usize, words: &[u64]) -> DistanceCensus {
    let mut counts = vec![0u64; n + 1];
    for (i, &x) in words.iter().enumerate() {
        for &y in &words[i + 1..] {
            counts[(x ^ y).count_ones() as usize] += 1;
        }
    }
    DistanceCensus { counts }
}

fn walsh_hadamard(a: &mut [i64]) {
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
}

/// Census through the autocorrelation of the indicator function, computed
/// with two Walsh–Hadamard transforms in O(n 2^n). Intermediate values are
/// bounded by 2^{2n}, so i64 is exact for n ≤ 30.
pub fn census_transform(n: usize, words: &[u64]) -> DistanceCensus {
    let size = 1usize << n;
    let mut f = vec![0i64; size];
    for &w in words {
        f[w as usize] = 1;
    }
    walsh_hadamard(&mut f);
    for v in f.iter_mut() {
        *v *= *v;
    }
    walsh_hadamard(&mut f);
    let mut counts = vec![0u64; n + 1];
    for (z, &v) in f.iter().enumerate().skip(1) {
        if v != 0 {
            // v / 2^n ordered pairs with x ^ y = z.
            counts[z.count_ones() as usize] += (v >> n) as u64 / 2;
        }
    }
    DistanceCensus { counts }
}

/// Census of an arbitrary word set, picking the cheaper exact route.
pub fn census_of_words(n: usize, words: &[u64], limits: CensusLimits) -> Result<DistanceCensus> {
    let len = words.len() as u64;
    let pairs = len.saturating_mul(len.saturating_sub(1)) / 2;
    let transform_cost = (n as u64) << n.min(62);
    if pairs <= limits.max_pairs && (pairs <= transform_cost || n > limits.max_transform_bits) {
        Ok(census_direct(n, words))
    } else if n <= limits.max_transform_bits {
        Ok(census_transform(n, words))
    } else {
        Err(Error::ResourceLimit(format!(
            "{pairs} pairs over n = {n} exceed both the pair cap and the transform cap"
        )))
    }
}

/// Census of a solution set under the default limits.
pub fn pair_distance_census(set: &SolutionSet) -> Result<DistanceCensus> {
    census_of_words(set.n, &set.members, CensusLimits::default())
}

/// Summary of one cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterStats {
    pub size: usize,
    pub diameter: usize,
    pub projection: Projection,
    pub frozen: usize,
}

pub fn cluster_stats(n: usize, cluster: &[u64]) -> Result<ClusterStats> {
    let projection = projection_of(n, cluster)?;
    let diameter = census_of_words(n, cluster, CensusLimits::default())?.diameter();
    Ok(ClusterStats { size: cluster.len(), diameter, frozen: n - projection.star_count(), projection })
}

/// A group of clusters produced by `region_partition`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterRegion {
    pub cluster_indices: Vec<usize>,
    pub diameter: u32,
    /// Distance to the nearest assignment outside the region; `None` when
    /// the region holds every solution.
    pub min_external_distance: Option<u32>,
}

/// Minimum distance between two word sets, stopping early at `floor`.
fn min_cross_distance(a: &[u64], b: &[u64], floor: u32) -> u32 {
    let mut best = u32::MAX;
    for &x in a {
        for &y in b {
            best = best.min((x ^ y).count_ones());
            if best <= floor {
                return best;
            }
        }
    }
    best
}

/// Hamming distance from every word of {0,1}^n to a source set.
fn hypercube_bfs(n: usize, sources: &[u64]) -> Vec<u8> {
    let mut dist = vec![u8::MAX; 1 << n];
    let mut queue: Vec<u64> = Vec::with_capacity(sources.len());
    for &s in sources {
        dist[s as usize] = 0;
        queue.push(s);
    }
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let d = dist[x as usize] + 1;
        for b in 0..n {
            let y = x ^ 1 << b;
            if dist[y as usize] == u8::MAX {
                dist[y as usize] = d;
                queue.push(y);
            }
        }
    }
    dist
}

/// Matrix of minimum Hamming distances between clusters.
pub fn cluster_distances(d: &ClusterDecomposition) -> Vec<Vec<u32>> {
    let c = d.clusters.len();
    let mut out = vec![vec![0u32; c]; c];
    let sizes: Vec<u64> = d.clusters.iter().map(|x| x.len() as u64).collect();
    let total: u64 = sizes.iter().sum();
    let pair_cost: u64 = sizes.iter().map(|&s| s * (total - s)).sum::<u64>() / 2;
    let bfs_cost = (c as u64).saturating_mul((d.n as u64) << d.n.min(40));
    if bfs_cost < pair_cost && d.n <= 26 {
        for i in 0..c {
            let dist = hypercube_bfs(d.n, &d.clusters[i]);
            for j in i + 1..c {
                let m = d.clusters[j].iter().map(|&w| dist[w as usize] as u32).min().unwrap();
                out[i][j] = m;
                out[j][i] = m;
            }
        }
    } else {
        for i in 0..c {
            for j in i + 1..c {
                let m = min_cross_distance(&d.clusters[i], &d.clusters[j], d.adjacency_radius + 1);
                out[i][j] = m;
                out[j][i] = m;
            }
        }
    }
    out
}

/// Group clusters into regions: connected components of the graph joining
/// clusters at distance ≤ a. The caller's window (a, b) must contain no pair
/// distance; a violation is reported with an offending pair.
pub fn region_partition(d: &ClusterDecomposition, a: u32, b: u32) -> Result<Vec<ClusterRegion>> {
    if a == 0 || a >= b || b as usize > d.n {
        return Err(Error::InvalidParameters(format!("need 0 < a < b <= n, got a = {a}, b = {b}, n = {}", d.n)));
    }
    let mut all: Vec<u64> = d.clusters.concat();
    all.sort_unstable();
    let census = census_of_words(d.n, &all, CensusLimits::default())?;
    if let Some(dist) = (a + 1..b).find(|&z| census.get(z as usize) > 0) {
        let (x, y) = all
            .iter()
            .enumerate()
            .find_map(|(i, &x)| all[i + 1..].iter().find(|&&y| (x ^ y).count_ones() == dist).map(|&y| (x, y)))
            .expect("census reported a pair");
        let w = d.n;
        return Err(Error::Precondition(format!(
            "assignments {} and {} are at distance {dist}, inside the window ({a}, {b})",
            word_string(x, w),
            word_string(y, w)
        )));
    }

    let dm = cluster_distances(d);
    let c = d.clusters.len();
    let mut parent: Vec<usize> = (0..c).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..c {
        for j in i + 1..c {
            if dm[i][j] <= a {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; c];
    for i in 0..c {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
        .into_iter()
        .map(|idx| {
            let mut words: Vec<u64> = idx.iter().flat_map(|&i| d.clusters[i].iter().copied()).collect();
            words.sort_unstable();
            let diameter = census_of_words(d.n, &words, CensusLimits::default())?.diameter() as u32;
            let inside: Vec<bool> = (0..c).map(|j| idx.contains(&j)).collect();
            let min_external_distance =
                idx.iter().flat_map(|&i| (0..c).filter(|&j| !inside[j]).map(move |j| (i, j))).map(|(i, j)| dm[i][j]).min();
            Ok(ClusterRegion { cluster_indices: idx, diameter, min_external_distance })
        })
        .collect()
}

/// Render a packed word as a 0/1 string (variable 0 first).
pub fn word_string(w: u64, n: usize) -> String {
    (0..n).map(|i| if w >> i & 1 == 1 { '1' } else { '0' }).collect()
}
