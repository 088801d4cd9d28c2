//! Coarsening (whitening): free variables, coarsening fixed points, cores,
//! covers, and the equivalent clause-stripping view of the planted model.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::formula::{rng_from_seed, Assignment, Formula, Literal, SeededRng};

/// One position of a word over {0, 1, ∗}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Star,
}

impl Symbol {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn is_star(self) -> bool {
        self == Symbol::Star
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Star => '*',
        }
    }
}

/// Three-valued literal status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LitValue {
    True,
    False,
    Star,
}

/// Evaluate a literal under a three-valued symbol.
#[inline]
pub fn eval_literal(l: Literal, s: Symbol) -> LitValue {
    match s {
        Symbol::Star => LitValue::Star,
        Symbol::Zero if l.negated => LitValue::True,
        Symbol::One if !l.negated => LitValue::True,
        _ => LitValue::False,
    }
}

/// A word over {0, 1, ∗}. Serialises as a compact string such as `"10*"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriAssignment {
    symbols: Vec<Symbol>,
}

impl TriAssignment {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        TriAssignment { symbols }
    }

    pub fn all_star(n: usize) -> Self {
        TriAssignment { symbols: vec![Symbol::Star; n] }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Symbol {
        self.symbols[i]
    }

    pub fn set(&mut self, i: usize, s: Symbol) {
        self.symbols[i] = s;
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn star_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_star()).count()
    }

    /// Pointwise `self ⪰ other`: each position equal or ∗ in `self`.
    pub fn dominates(&self, other: &TriAssignment) -> bool {
        self.len() == other.len()
            && self.symbols.iter().zip(&other.symbols).all(|(a, b)| a.is_star() || a == b)
    }
}

impl From<&Assignment> for TriAssignment {
    fn from(a: &Assignment) -> Self {
        TriAssignment { symbols: a.values().iter().map(|&b| Symbol::from_bool(b)).collect() }
    }
}

impl fmt::Display for TriAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.symbols.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

impl FromStr for TriAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Symbol::Zero),
                '1' => Ok(Symbol::One),
                '*' => Ok(Symbol::Star),
                other => Err(Error::InvalidInput(format!("bad symbol `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(TriAssignment::new)
    }
}

impl Serialize for TriAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TriAssignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Clause occurrence lists: for each variable, the (clause, position) pairs
/// where it appears.
#[derive(Debug, Clone)]
pub struct Occurrences {
    lists: Vec<Vec<(u32, u32)>>,
}

impl Occurrences {
    pub fn build(f: &Formula) -> Self {
        let mut lists = vec![Vec::new(); f.n()];
        for (ci, c) in f.clauses().iter().enumerate() {
            for (p, l) in c.literals.iter().enumerate() {
                lists[l.var as usize].push((ci as u32, p as u32));
            }
        }
        Occurrences { lists }
    }

    pub fn of(&self, v: usize) -> &[(u32, u32)] {
        &self.lists[v]
    }
}

fn check_len(f: &Formula, len: usize) -> Result<()> {
    if len != f.n() {
        return Err(Error::InvalidInput(format!("word has length {len} but n = {}", f.n())));
    }
    Ok(())
}

/// Whether variable `i` is free in `tri`: every occurrence of `i` has another
/// position in its clause that evaluates true or ∗.
pub fn is_free(f: &Formula, tri: &TriAssignment, i: usize) -> Result<bool> {
    check_len(f, tri.len())?;
    if i >= f.n() {
        return Err(Error::InvalidInput(format!("variable {i} out of range for n = {}", f.n())));
    }
    Ok(f.clauses().iter().all(|c| {
        c.literals.iter().enumerate().filter(|(_, l)| l.var as usize == i).all(|(p, _)| {
            c.literals
                .iter()
                .enumerate()
                .any(|(q, l)| q != p && eval_literal(*l, tri.get(l.var as usize)) != LitValue::False)
        })
    }))
}

/// Which free variable is coarsened next.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum OrderPolicy {
    #[default]
    LowestIndex,
    Random { seed: u64 },
    /// Priority list: earlier entries go first; unlisted variables follow by index.
    Supplied(Vec<usize>),
}

/// Record of one coarsening run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseningTrace {
    pub initial: TriAssignment,
    pub coarsened_order: Vec<usize>,
    pub fixed_point: TriAssignment,
    pub star_count: usize,
}

impl CoarseningTrace {
    /// Re-apply `coarsened_order` to `initial`, checking that each step starred
    /// a free non-∗ variable and that the result matches `fixed_point`, which
    /// must have no free non-∗ variable left.
    pub fn replay(&self, f: &Formula) -> Result<()> {
        let mut tri = self.initial.clone();
        for &v in &self.coarsened_order {
            if tri.get(v).is_star() || !is_free(f, &tri, v)? {
                return Err(Error::InternalConsistency(format!("step on variable {v} is not a coarsening step")));
            }
            tri.set(v, Symbol::Star);
        }
        if tri != self.fixed_point || self.star_count != tri.star_count() {
            return Err(Error::InternalConsistency("replay does not reproduce the fixed point".into()));
        }
        for v in 0..f.n() {
            if !tri.get(v).is_star() && is_free(f, &tri, v)? {
                return Err(Error::InternalConsistency(format!("variable {v} is still free")));
            }
        }
        Ok(())
    }
}

enum Frontier {
    Ordered { set: BTreeSet<(usize, usize)>, rank: Vec<usize> },
    Random { items: Vec<usize>, rng: SeededRng },
}

impl Frontier {
    fn new(n: usize, policy: &OrderPolicy) -> Self {
        match policy {
            OrderPolicy::LowestIndex => Frontier::Ordered { set: BTreeSet::new(), rank: (0..n).collect() },
            OrderPolicy::Supplied(order) => {
                let mut rank: Vec<usize> = (0..n).map(|v| n + v).collect();
                for (pos, &v) in order.iter().enumerate() {
                    if v < n && rank[v] >= n {
                        rank[v] = pos;
                    }
                }
                Frontier::Ordered { set: BTreeSet::new(), rank }
            }
            OrderPolicy::Random { seed } => Frontier::Random { items: Vec::new(), rng: rng_from_seed(*seed) },
        }
    }

    fn push(&mut self, v: usize) {
        match self {
            Frontier::Ordered { set, rank } => {
                set.insert((rank[v], v));
            }
            Frontier::Random { items, .. } => items.push(v),
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            Frontier::Ordered { set, .. } => set.pop_first().map(|(_, v)| v),
            Frontier::Random { items, rng } => {
                if items.is_empty() {
                    None
                } else {
                    let j = rng.random_range(0..items.len());
                    Some(items.swap_remove(j))
                }
            }
        }
    }
}

/// Incremental coarsening state: per-clause counts of true and ∗ positions.
struct Engine<'a> {
    f: &'a Formula,
    occ: Occurrences,
    tri: TriAssignment,
    true_count: Vec<u32>,
    star_count: Vec<u32>,
}

impl<'a> Engine<'a> {
    fn new(f: &'a Formula, tri: TriAssignment) -> Self {
        let m = f.m();
        let mut true_count = vec![0u32; m];
        let mut star_count = vec![0u32; m];
        for (ci, c) in f.clauses().iter().enumerate() {
            for l in &c.literals {
                match eval_literal(*l, tri.get(l.var as usize)) {
                    LitValue::True => true_count[ci] += 1,
                    LitValue::Star => star_count[ci] += 1,
                    LitValue::False => {}
                }
            }
        }
        Engine { f, occ: Occurrences::build(f), tri, true_count, star_count }
    }

    fn is_free(&self, v: usize) -> bool {
        let s = self.tri.get(v);
        self.occ.of(v).iter().all(|&(ci, p)| {
            let ci = ci as usize;
            let own = eval_literal(self.f.clauses()[ci].literals[p as usize], s);
            let others = self.true_count[ci] + self.star_count[ci] - (own != LitValue::False) as u32;
            others > 0
        })
    }

    fn star(&mut self, v: usize) {
        let s = self.tri.get(v);
        for &(ci, p) in self.occ.of(v) {
            let ci = ci as usize;
            if eval_literal(self.f.clauses()[ci].literals[p as usize], s) == LitValue::True {
                self.true_count[ci] -= 1;
            }
            self.star_count[ci] += 1;
        }
        self.tri.set(v, Symbol::Star);
    }
}

/// Repeatedly star a free non-∗ variable until none remains.
///
/// Freeness is monotone along a run (starring never turns a satisfied or ∗
/// position false), so candidates are only ever added, and only the
/// neighbours of a newly starred variable are re-examined.
pub fn coarsen_fixed_point(f: &Formula, start: &TriAssignment, policy: &OrderPolicy) -> Result<CoarseningTrace> {
    check_len(f, start.len())?;
    let n = f.n();
    let mut eng = Engine::new(f, start.clone());
    let mut frontier = Frontier::new(n, policy);
    let mut queued = vec![false; n];
    for v in 0..n {
        if !eng.tri.get(v).is_star() && eng.is_free(v) {
            queued[v] = true;
            frontier.push(v);
        }
    }
    let mut order = Vec::new();
    while let Some(v) = frontier.pop() {
        eng.star(v);
        order.push(v);
        for &(ci, _) in eng.occ.of(v) {
            for l in &f.clauses()[ci as usize].literals {
                let u = l.var as usize;
                if !queued[u] && !eng.tri.get(u).is_star() && eng.is_free(u) {
                    queued[u] = true;
                    frontier.push(u);
                }
            }
        }
    }
    let fixed_point = eng.tri;
    Ok(CoarseningTrace {
        initial: start.clone(),
        coarsened_order: order,
        star_count: fixed_point.star_count(),
        fixed_point,
    })
}

/// Coarsening fixed point of a boolean assignment.
pub fn coarsen_assignment(f: &Formula, sigma: &Assignment, policy: &OrderPolicy) -> Result<CoarseningTrace> {
    coarsen_fixed_point(f, &TriAssignment::from(sigma), policy)
}

/// The core of a cluster given as packed words: the common coarsening fixed
/// point of its members. Disagreement between members is reported as an
/// internal-consistency failure.
pub fn core_of_cluster(f: &Formula, cluster: &[u64]) -> Result<TriAssignment> {
    let Some(&first) = cluster.first() else {
        return Err(Error::InvalidInput("empty cluster".into()));
    };
    let n = f.n();
    let core = coarsen_assignment(f, &Assignment::from_word(first, n), &OrderPolicy::LowestIndex)?.fixed_point;
    for &w in &cluster[1..] {
        let other = coarsen_assignment(f, &Assignment::from_word(w, n), &OrderPolicy::LowestIndex)?.fixed_point;
        if other != core {
            return Err(Error::InternalConsistency(format!(
                "cluster members {} and {} coarsen to {} and {}",
                Assignment::from_word(first, n),
                Assignment::from_word(w, n),
                core,
                other
            )));
        }
    }
    Ok(core)
}

/// Cover test: (i) every clause has a true position or at least two ∗
/// positions, and (ii) every variable set to 0/1 is the unique satisfier of
/// some clause whose other positions are all false.
pub fn is_cover(f: &Formula, tri: &TriAssignment) -> Result<bool> {
    check_len(f, tri.len())?;
    let mut essential = vec![false; f.n()];
    for c in f.clauses() {
        let vals: Vec<LitValue> = c.literals.iter().map(|l| eval_literal(*l, tri.get(l.var as usize))).collect();
        let trues = vals.iter().filter(|&&v| v == LitValue::True).count();
        let stars = vals.iter().filter(|&&v| v == LitValue::Star).count();
        if trues == 0 && stars < 2 {
            return Ok(false);
        }
        if trues == 1 && stars == 0 {
            let p = vals.iter().position(|&v| v == LitValue::True).unwrap();
            essential[c.literals[p].var as usize] = true;
        }
    }
    Ok((0..f.n()).all(|v| tri.get(v).is_star() || essential[v]))
}

/// Clause-stripping form of coarsening a satisfying assignment: start from
/// the clauses with exactly one satisfied position and repeatedly delete any
/// clause holding a variable that is the unique satisfier of no remaining
/// clause. Variables left in surviving clauses keep their value.
pub fn strip_clauses(f: &Formula, sigma: &Assignment) -> Result<TriAssignment> {
    check_len(f, sigma.len())?;
    let n = f.n();
    let mut alive: Vec<bool> = Vec::with_capacity(f.m());
    let mut satisfier: Vec<u32> = Vec::with_capacity(f.m());
    let mut support = vec![0u32; n];
    for (ci, c) in f.clauses().iter().enumerate() {
        let sat: Vec<&Literal> = c.literals.iter().filter(|l| l.satisfied_by(sigma.get(l.var as usize))).collect();
        if sat.is_empty() {
            return Err(Error::InvalidInput(format!("clause {ci} is not satisfied")));
        }
        alive.push(sat.len() == 1);
        let s = sat[0].var;
        satisfier.push(s);
        if sat.len() == 1 {
            support[s as usize] += 1;
        }
    }
    let occ = Occurrences::build(f);
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| support[v] == 0).collect();
    let mut unfrozen = vec![false; n];
    for &v in &queue {
        unfrozen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &(ci, _) in occ.of(v) {
            let ci = ci as usize;
            if !alive[ci] {
                continue;
            }
            alive[ci] = false;
            let s = satisfier[ci] as usize;
            support[s] -= 1;
            if support[s] == 0 && !unfrozen[s] {
                unfrozen[s] = true;
                queue.push_back(s);
            }
        }
    }
    let mut out = TriAssignment::all_star(n);
    for (ci, c) in f.clauses().iter().enumerate() {
        if alive[ci] {
            for l in &c.literals {
                out.set(l.var as usize, Symbol::from_bool(sigma.get(l.var as usize)));
            }
        }
    }
    Ok(out)
}
