//! Balls-in-bins simulation of coarsening in the planted model.
//!
//! Each clause of a formula satisfied by 0 in exactly one position becomes
//! one red ball (the satisfied literal) and k − 1 blue balls, dropped into
//! the bins of their variables. A *blue bin* holds blue balls and no red
//! ball. The original process repeatedly takes a blue bin and deletes one
//! clause through it; the bins that are empty when it stops are the ∗
//! positions of the coarsening fixed point of 0.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::coarsening::{Symbol, TriAssignment};
use crate::error::{Error, Result};
use crate::formula::{rng_from_seed, Formula, SeededRng};

/// How a blue bin is picked when several exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BluePolicy {
    #[default]
    Uniform,
    LowestIndex,
}

/// Which stripping process to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    /// Blue bin ball, k − 2 random blue balls, one random red ball; exits
    /// when no blue bin exists.
    Original,
    /// As the original without the k − 2 random blue removals.
    Intermediate,
    /// Blue bin ball if a blue bin exists, then one random red ball; never exits early.
    Modified,
}

/// Snapshot of ball counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinState {
    pub n_bins: usize,
    pub red_count: Vec<u32>,
    pub blue_count: Vec<u32>,
    pub total_red: u64,
    pub total_blue: u64,
}

impl BinState {
    /// Totals agree with the per-bin counts.
    pub fn is_consistent(&self) -> bool {
        self.red_count.len() == self.n_bins
            && self.blue_count.len() == self.n_bins
            && self.red_count.iter().map(|&c| c as u64).sum::<u64>() == self.total_red
            && self.blue_count.iter().map(|&c| c as u64).sum::<u64>() == self.total_blue
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripRunResult {
    /// Realised number of clauses.
    pub m: usize,
    pub steps_executed: usize,
    pub exited_early: bool,
    pub empty_bins_at_exit: usize,
    /// Fraction of bins still holding a ball.
    pub frozen_fraction: f64,
}

/// Outcome of a modified-process run of a fixed number of steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModifiedRunResult {
    pub run: StripRunResult,
    /// A blue bin existed at the start of each of the first i steps.
    pub event8_held: bool,
    /// q: bins without a red ball after the run.
    pub red_free_bins: usize,
    /// b: initial number of blue balls in those bins.
    pub initial_blue_in_red_free: u64,
    /// Red occupancy histogram after the run: bins with 0, 1, 2 and ≥3 red balls.
    pub red_occupancy: [u64; 4],
}

/// Bins with support for O(1) uniform removal of a red ball, of a blue ball,
/// and of a blue ball from a given bin.
struct Bins {
    n: usize,
    red_count: Vec<u32>,
    red_pool: Vec<u32>,
    // Blue balls are ids 0..B. `pool` holds live ids; `seg` groups ids by bin.
    pool: Vec<u32>,
    pool_pos: Vec<u32>,
    bin_of: Vec<u32>,
    seg: Vec<u32>,
    seg_pos: Vec<u32>,
    seg_start: Vec<u32>,
    blue_count: Vec<u32>,
    // Blue-bin index set.
    blue_items: Vec<u32>,
    blue_pos: Vec<u32>,
    heap: BinaryHeap<Reverse<u32>>,
    policy: BluePolicy,
}

const ABSENT: u32 = u32::MAX;

impl Bins {
    fn new(n: usize, red: Vec<u32>, blue: Vec<u32>, policy: BluePolicy) -> Self {
        let mut red_count = vec![0u32; n];
        for &b in &red {
            red_count[b as usize] += 1;
        }
        let mut blue_count = vec![0u32; n];
        for &b in &blue {
            blue_count[b as usize] += 1;
        }
        let mut seg_start = vec![0u32; n + 1];
        for v in 0..n {
            seg_start[v + 1] = seg_start[v] + blue_count[v];
        }
        let mut fill = seg_start.clone();
        let nb = blue.len();
        let mut seg = vec![0u32; nb];
        let mut seg_pos = vec![0u32; nb];
        for (id, &b) in blue.iter().enumerate() {
            let p = fill[b as usize];
            seg[p as usize] = id as u32;
            seg_pos[id] = p;
            fill[b as usize] += 1;
        }
        let mut bins = Bins {
            n,
            red_count,
            red_pool: red,
            pool: (0..nb as u32).collect(),
            pool_pos: (0..nb as u32).collect(),
            bin_of: blue,
            seg,
            seg_pos,
            seg_start,
            blue_count,
            blue_items: Vec::new(),
            blue_pos: vec![ABSENT; n],
            heap: BinaryHeap::new(),
            policy,
        };
        for v in 0..n {
            bins.refresh(v);
        }
        bins
    }

    fn is_blue(&self, v: usize) -> bool {
        self.red_count[v] == 0 && self.blue_count[v] > 0
    }

    /// Re-sync bin `v`'s membership in the blue set.
    fn refresh(&mut self, v: usize) {
        let member = self.blue_pos[v] != ABSENT;
        let blue = self.is_blue(v);
        if blue && !member {
            self.blue_pos[v] = self.blue_items.len() as u32;
            self.blue_items.push(v as u32);
            if self.policy == BluePolicy::LowestIndex {
                self.heap.push(Reverse(v as u32));
            }
        } else if !blue && member {
            let p = self.blue_pos[v] as usize;
            let last = *self.blue_items.last().unwrap();
            self.blue_items.swap_remove(p);
            if last as usize != v {
                self.blue_pos[last as usize] = p as u32;
            }
            self.blue_pos[v] = ABSENT;
        }
    }

    fn pick_blue_bin(&mut self, rng: &mut SeededRng) -> Option<usize> {
        if self.blue_items.is_empty() {
            return None;
        }
        match self.policy {
            BluePolicy::Uniform => Some(self.blue_items[rng.random_range(0..self.blue_items.len())] as usize),
            BluePolicy::LowestIndex => {
                while let Some(&Reverse(v)) = self.heap.peek() {
                    if self.blue_pos[v as usize] != ABSENT {
                        return Some(v as usize);
                    }
                    self.heap.pop();
                }
                None
            }
        }
    }

    fn remove_blue_id(&mut self, id: u32) {
        let v = self.bin_of[id as usize] as usize;
        // Out of the global pool.
        let p = self.pool_pos[id as usize] as usize;
        let last = *self.pool.last().unwrap();
        self.pool.swap_remove(p);
        if last != id {
            self.pool_pos[last as usize] = p as u32;
        }
        // Out of the bin's segment: swap with the segment's last live slot.
        let s = self.seg_pos[id as usize];
        let end = self.seg_start[v] + self.blue_count[v] - 1;
        let other = self.seg[end as usize];
        self.seg.swap(s as usize, end as usize);
        self.seg_pos[other as usize] = s;
        self.seg_pos[id as usize] = end;
        self.blue_count[v] -= 1;
        self.refresh(v);
    }

    fn remove_blue_from(&mut self, v: usize) {
        let end = self.seg_start[v] + self.blue_count[v] - 1;
        let id = self.seg[end as usize];
        self.remove_blue_id(id);
    }

    fn remove_random_blue(&mut self, rng: &mut SeededRng) {
        let id = self.pool[rng.random_range(0..self.pool.len())];
        self.remove_blue_id(id);
    }

    fn remove_random_red(&mut self, rng: &mut SeededRng) {
        let j = rng.random_range(0..self.red_pool.len());
        let v = self.red_pool.swap_remove(j) as usize;
        self.red_count[v] -= 1;
        self.refresh(v);
    }

    fn empty_bins(&self) -> usize {
        (0..self.n).filter(|&v| self.red_count[v] == 0 && self.blue_count[v] == 0).count()
    }

    fn state(&self) -> BinState {
        BinState {
            n_bins: self.n,
            red_count: self.red_count.clone(),
            blue_count: self.blue_count.clone(),
            total_red: self.red_pool.len() as u64,
            total_blue: self.pool.len() as u64,
        }
    }
}

/// Expected number of clauses per variable, λ = rk/(2^k − 1), and the
/// derived constants γ = e^{−λ(1−α)} and β = (k − 1)γλ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluidConstants {
    pub lambda: f64,
    pub gamma: f64,
    pub beta: f64,
}

pub fn fluid_constants(k: u32, r: f64, alpha: f64) -> FluidConstants {
    let lambda = r * k as f64 / (2f64.powi(k as i32) - 1.0);
    let gamma = (-lambda * (1.0 - alpha)).exp();
    FluidConstants { lambda, gamma, beta: (k as f64 - 1.0) * gamma * lambda }
}

/// Parameters of a simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimParams {
    pub n: usize,
    pub k: u32,
    pub r: f64,
    pub policy: BluePolicy,
}

impl SimParams {
    pub fn new(n: usize, k: u32, r: f64) -> Self {
        SimParams { n, k, r, policy: BluePolicy::Uniform }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n >= u32::MAX as usize / 2 {
            return Err(Error::InvalidParameters(format!("bin count {} out of range", self.n)));
        }
        if !(3..=30).contains(&self.k) {
            return Err(Error::InvalidParameters(format!("k = {} outside 3..=30", self.k)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameters(format!("density r = {} must be positive", self.r)));
        }
        Ok(())
    }
}

/// Number of clauses with one satisfied literal: Bin(round(rn), k/(2^k − 1)).
fn sample_m(p: &SimParams, rng: &mut SeededRng) -> usize {
    let trials = (p.r * p.n as f64).round() as u64;
    let prob = p.k as f64 / (2f64.powi(p.k as i32) - 1.0);
    Binomial::new(trials, prob).expect("valid binomial").sample(rng) as usize
}

fn throw(p: &SimParams, rng: &mut SeededRng) -> (usize, Bins) {
    let m = sample_m(p, rng);
    let n = p.n as u32;
    let red: Vec<u32> = (0..m).map(|_| rng.random_range(0..n)).collect();
    let blue: Vec<u32> = (0..m * (p.k as usize - 1)).map(|_| rng.random_range(0..n)).collect();
    (m, Bins::new(p.n, red, blue, p.policy))
}

fn result(m: usize, steps: usize, bins: &Bins) -> StripRunResult {
    let empty = bins.empty_bins();
    StripRunResult {
        m,
        steps_executed: steps,
        exited_early: steps < m,
        empty_bins_at_exit: empty,
        frozen_fraction: 1.0 - empty as f64 / bins.n as f64,
    }
}

/// Run the original or intermediate process until it exits, all clauses are
/// gone, or `max_steps` steps have been taken.
fn run_exiting(p: &SimParams, seed: u64, intermediate: bool, max_steps: Option<usize>) -> Result<StripRunResult> {
    p.validate()?;
    let mut rng = rng_from_seed(seed);
    let (m, mut bins) = throw(p, &mut rng);
    let limit = max_steps.map_or(m, |s| s.min(m));
    let mut steps = 0;
    while steps < limit {
        let Some(v) = bins.pick_blue_bin(&mut rng) else { break };
        bins.remove_blue_from(v);
        if !intermediate {
            for _ in 0..p.k - 2 {
                bins.remove_random_blue(&mut rng);
            }
        }
        bins.remove_random_red(&mut rng);
        steps += 1;
    }
    debug_assert!(bins.state().is_consistent());
    let mut out = result(m, steps, &bins);
    // Stopping at `max_steps` is not an exit.
    if max_steps.is_some_and(|s| steps == s) {
        out.exited_early = false;
    }
    Ok(out)
}

/// Original process run to its fixed point.
pub fn run_original(n: usize, k: u32, r: f64, seed: u64) -> Result<StripRunResult> {
    run_exiting(&SimParams::new(n, k, r), seed, false, None)
}

/// Original process with full parameter control.
pub fn run_original_with(p: &SimParams, seed: u64) -> Result<StripRunResult> {
    run_exiting(p, seed, false, None)
}

/// Modified process for `i_steps` steps. If fewer than `i_steps` clauses are
/// realised the run stops when the red balls run out and the event fails.
pub fn run_modified_with(p: &SimParams, i_steps: usize, seed: u64) -> Result<ModifiedRunResult> {
    p.validate()?;
    let mut rng = rng_from_seed(seed);
    let (m, mut bins) = throw(p, &mut rng);
    let initial_blue = bins.blue_count.clone();
    let steps = i_steps.min(m);
    let mut event = i_steps <= m;
    for _ in 0..steps {
        match bins.pick_blue_bin(&mut rng) {
            Some(v) => bins.remove_blue_from(v),
            None => event = false,
        }
        bins.remove_random_red(&mut rng);
    }
    debug_assert!(bins.state().is_consistent());
    let mut red_occupancy = [0u64; 4];
    let mut q = 0;
    let mut b = 0u64;
    for v in 0..p.n {
        let c = bins.red_count[v];
        red_occupancy[(c as usize).min(3)] += 1;
        if c == 0 {
            q += 1;
            b += initial_blue[v] as u64;
        }
    }
    let mut run = result(m, steps, &bins);
    run.exited_early = false;
    Ok(ModifiedRunResult { run, event8_held: event, red_free_bins: q, initial_blue_in_red_free: b, red_occupancy })
}

/// Modified process with the default blue-bin policy.
pub fn run_modified(n: usize, k: u32, r: f64, i_steps: usize, seed: u64) -> Result<ModifiedRunResult> {
    run_modified_with(&SimParams::new(n, k, r), i_steps, seed)
}

/// Whether the event holds for the first `i_steps` steps of `process`.
pub fn event8(p: &SimParams, process: Process, i_steps: usize, seed: u64) -> Result<bool> {
    if i_steps == 0 {
        return Ok(true);
    }
    match process {
        Process::Modified => Ok(run_modified_with(p, i_steps, seed)?.event8_held),
        Process::Original | Process::Intermediate => {
            let res = run_exiting(p, seed, process == Process::Intermediate, Some(i_steps))?;
            Ok(res.steps_executed >= i_steps)
        }
    }
}

/// Derive an independent per-trial seed (SplitMix64 finaliser).
pub fn trial_seed(base: u64, stream: u64, trial: u64) -> u64 {
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Monte-Carlo frequency with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub p: f64,
    pub se: f64,
    pub trials: usize,
}

impl Estimate {
    pub fn from_hits(hits: usize, trials: usize) -> Self {
        let p = hits as f64 / trials as f64;
        Estimate { p, se: (p * (1.0 - p) / trials as f64).sqrt(), trials }
    }
}

/// Event frequency under several processes, each with its own seed stream.
pub fn event8_frequency(p: &SimParams, process: Process, i_steps: usize, trials: usize, seed: u64) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be at least 1".into()));
    }
    let stream = process as u64 + 1;
    let hits: Result<Vec<bool>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| event8(p, process, i_steps, trial_seed(seed, stream, t)))
        .collect();
    Ok(Estimate::from_hits(hits?.into_iter().filter(|&h| h).count(), trials))
}

/// Original versus modified event frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceReport {
    pub original: Estimate,
    pub modified: Estimate,
}

impl DominanceReport {
    /// p_mod ≥ p_orig − 3 · combined standard error.
    pub fn holds(&self) -> bool {
        let se = (self.original.se.powi(2) + self.modified.se.powi(2)).sqrt();
        self.modified.p >= self.original.p - 3.0 * se
    }
}

pub fn dominance_check(n: usize, k: u32, r: f64, i_steps: usize, trials: usize, seed: u64) -> Result<DominanceReport> {
    let p = SimParams::new(n, k, r);
    Ok(DominanceReport {
        original: event8_frequency(&p, Process::Original, i_steps, trials, seed)?,
        modified: event8_frequency(&p, Process::Modified, i_steps, trials, seed)?,
    })
}

/// Median of the frozen fraction over `trials` original runs at density `r`.
pub fn median_frozen_fraction(n: usize, k: u32, r: f64, trials: usize, seed: u64) -> Result<f64> {
    let p = SimParams::new(n, k, r);
    let mut fr: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_original_with(&p, trial_seed(seed, 0, t)).map(|x| x.frozen_fraction))
        .collect::<Result<_>>()?;
    fr.sort_by(f64::total_cmp);
    let mid = fr.len() / 2;
    Ok(if fr.len() % 2 == 1 { fr[mid] } else { 0.5 * (fr[mid - 1] + fr[mid]) })
}

/// Empirical t_k^α: bisection on r where "frozen" means the median frozen
/// fraction exceeds max(0.005, 1 − α). Trials share seeds across densities.
pub fn estimate_threshold(
    k: u32,
    alpha: f64,
    n: usize,
    trials: usize,
    r_lo: f64,
    r_hi: f64,
    tol: f64,
    seed: u64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) || trials == 0 || !(r_lo < r_hi) || tol <= 0.0 {
        return Err(Error::InvalidParameters("need α ∈ (0,1], trials ≥ 1, r_lo < r_hi, tol > 0".into()));
    }
    let cut = (1.0 - alpha).max(0.005);
    let frozen = |r: f64| median_frozen_fraction(n, k, r, trials, seed).map(|f| f > cut);
    if frozen(r_lo)? || !frozen(r_hi)? {
        return Err(Error::Bracket(format!("[{r_lo}, {r_hi}] does not straddle the freezing transition")));
    }
    let (mut lo, mut hi) = (r_lo, r_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if frozen(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The original process driven by an actual formula rather than thrown
/// balls: clauses with exactly one position satisfied by 0 supply one red
/// ball (that position) and blue balls (the others). Returns the frozen
/// pattern as a word with 0 on bins still holding a ball and ∗ elsewhere.
pub fn strip_formula_original(f: &Formula, policy: BluePolicy, seed: u64) -> Result<TriAssignment> {
    let n = f.n();
    let mut rng = rng_from_seed(seed);
    let mut alive = Vec::new();
    let mut red_count = vec![0u32; n];
    let mut blue_count = vec![0u32; n];
    // blue_occ[v]: alive clauses holding a blue ball of v.
    let mut blue_occ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, c) in f.clauses().iter().enumerate() {
        let sat: Vec<_> = c.literals.iter().filter(|l| l.negated).collect();
        if sat.is_empty() {
            return Err(Error::InvalidInput(format!("clause {ci} is not satisfied by 0")));
        }
        let keep = sat.len() == 1;
        alive.push(keep);
        if keep {
            for l in &c.literals {
                if l.negated {
                    red_count[l.var as usize] += 1;
                } else {
                    blue_count[l.var as usize] += 1;
                    blue_occ[l.var as usize].push(ci);
                }
            }
        }
    }
    let is_blue = |v: usize, red: &[u32], blue: &[u32]| red[v] == 0 && blue[v] > 0;
    loop {
        let blues: Vec<usize> = (0..n).filter(|&v| is_blue(v, &red_count, &blue_count)).collect();
        let Some(&v) = (match policy {
            BluePolicy::LowestIndex => blues.first(),
            BluePolicy::Uniform if blues.is_empty() => None,
            BluePolicy::Uniform => Some(&blues[rng.random_range(0..blues.len())]),
        }) else {
            break;
        };
        let ci = *blue_occ[v].iter().find(|&&ci| alive[ci]).expect("blue bin has a live clause");
        alive[ci] = false;
        for l in &f.clauses()[ci].literals {
            if l.negated {
                red_count[l.var as usize] -= 1;
            } else {
                blue_count[l.var as usize] -= 1;
            }
        }
    }
    Ok(TriAssignment::new(
        (0..n)
            .map(|v| if red_count[v] + blue_count[v] > 0 { Symbol::Zero } else { Symbol::Star })
            .collect(),
    ))
}
