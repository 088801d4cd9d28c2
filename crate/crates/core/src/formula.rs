//! k-CNF formulas: representation, the three random models, evaluation and
//! DIMACS serialisation.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seedable generator used for every random draw in the crate.
pub type SeededRng = ChaCha8Rng;

/// Construct the crate-wide generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A signed occurrence of a variable (0-indexed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: u32) -> Self {
        Literal { var, negated: true }
    }

    /// Whether the literal is true under the boolean value `value` of its variable.
    #[inline]
    pub fn satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }

    /// DIMACS integer: 1-indexed, negative for a negated literal.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

/// A disjunction of literals, kept in the order it was built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Self {
        Clause { literals }
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        self.literals.iter().any(|l| l.satisfied_by(a.get(l.var as usize)))
    }

    /// Number of literal positions satisfied by `a`.
    pub fn satisfied_count(&self, a: &Assignment) -> usize {
        self.literals.iter().filter(|l| l.satisfied_by(a.get(l.var as usize))).count()
    }
}

/// The random model a formula was drawn from; it constrains clause signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Uniform,
    PlantedNegative,
    SingleSatLiteral,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Uniform => "uniform",
            ModelTag::PlantedNegative => "planted_negative",
            ModelTag::SingleSatLiteral => "single_sat_literal",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(ModelTag::Uniform),
            "planted_negative" | "planted" => Ok(ModelTag::PlantedNegative),
            "single_sat_literal" | "single" => Ok(ModelTag::SingleSatLiteral),
            other => Err(Error::InvalidParameters(format!("unknown model tag `{other}`"))),
        }
    }
}

/// How variables are drawn for the k positions of a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// k distinct variables, uniformly among all k-subsets.
    #[default]
    Distinct,
    /// k independent uniform draws; repeats allowed.
    WithReplacement,
}

/// A k-CNF instance over variables `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    n: usize,
    k: usize,
    clauses: Vec<Clause>,
    model: ModelTag,
}

impl Formula {
    /// Build and validate a formula.
    pub fn new(n: usize, k: usize, clauses: Vec<Clause>, model: ModelTag) -> Result<Self> {
        let f = Formula { n, k, clauses, model };
        f.validate()?;
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    /// Check every structural invariant: clause width, index range and the
    /// sign constraint implied by the model tag.
    pub fn validate(&self) -> Result<()> {
        if self.n > u32::MAX as usize {
            return Err(Error::InvalidFormula("too many variables".into()));
        }
        for (ci, c) in self.clauses.iter().enumerate() {
            if c.len() != self.k {
                return Err(Error::InvalidFormula(format!(
                    "clause {ci} has width {} but k = {}",
                    c.len(),
                    self.k
                )));
            }
            if let Some(l) = c.literals.iter().find(|l| l.var as usize >= self.n) {
                return Err(Error::InvalidFormula(format!(
                    "clause {ci} references variable {} but n = {}",
                    l.var, self.n
                )));
            }
            let negatives = c.literals.iter().filter(|l| l.negated).count();
            match self.model {
                ModelTag::Uniform => {}
                ModelTag::PlantedNegative if negatives == 0 => {
                    return Err(Error::InvalidFormula(format!(
                        "clause {ci} has no negative literal in the planted model"
                    )));
                }
                ModelTag::SingleSatLiteral if negatives != 1 => {
                    return Err(Error::InvalidFormula(format!(
                        "clause {ci} has {negatives} negative literals; exactly one required"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// True iff every clause has a literal satisfied by `a`.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        if a.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "assignment has length {} but n = {}",
                a.len(),
                self.n
            )));
        }
        Ok(self.clauses.iter().all(|c| c.satisfied_by(a)))
    }
}

/// A boolean word of length n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn zeros(n: usize) -> Self {
        Assignment { values: vec![false; n] }
    }

    /// Unpack the low `n` bits of `word`; bit i is variable i.
    pub fn from_word(word: u64, n: usize) -> Self {
        Assignment { values: (0..n).map(|i| word >> i & 1 == 1).collect() }
    }

    /// Pack into a word; `None` if n exceeds 64.
    pub fn to_word(&self) -> Option<u64> {
        (self.values.len() <= 64).then(|| {
            self.values.iter().enumerate().fold(0u64, |w, (i, &b)| w | (b as u64) << i)
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.values[i]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.values {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInput(format!("bad assignment symbol `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment::new)
    }
}

fn check_params(n: usize, k: usize, mode: SelectionMode) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameters(format!("k = {k} must be at least 2")));
    }
    if n == 0 {
        return Err(Error::InvalidParameters("n must be positive".into()));
    }
    if mode == SelectionMode::Distinct && n < k {
        return Err(Error::InvalidParameters(format!(
            "distinct-variable mode needs n >= k, got n = {n}, k = {k}"
        )));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameters("n exceeds the 32-bit index range".into()));
    }
    Ok(())
}

fn draw_vars(rng: &mut SeededRng, n: usize, k: usize, mode: SelectionMode) -> Vec<u32> {
    match mode {
        SelectionMode::Distinct => sample(rng, n, k).into_iter().map(|v| v as u32).collect(),
        SelectionMode::WithReplacement => (0..k).map(|_| rng.random_range(0..n as u32)).collect(),
    }
}

/// Uniform random k-CNF: m independent clauses with uniform signs.
pub fn gen_uniform(n: usize, k: usize, m: usize, seed: u64, mode: SelectionMode) -> Result<Formula> {
    check_params(n, k, mode)?;
    let mut rng = rng_from_seed(seed);
    let clauses = (0..m)
        .map(|_| {
            let vars = draw_vars(&mut rng, n, k, mode);
            Clause::new(vars.into_iter().map(|v| Literal { var: v, negated: rng.random() }).collect())
        })
        .collect();
    Formula::new(n, k, clauses, ModelTag::Uniform)
}

/// Random k-CNF conditioned on the all-zero assignment being satisfying:
/// each clause's sign pattern is uniform over the 2^k − 1 patterns with at
/// least one negative literal.
pub fn gen_planted_negative(
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
    mode: SelectionMode,
) -> Result<Formula> {
    check_params(n, k, mode)?;
    if k >= 64 {
        return Err(Error::InvalidParameters("k must be below 64".into()));
    }
    let mut rng = rng_from_seed(seed);
    let all_pos = (1u64 << k) - 1;
    let clauses = (0..m)
        .map(|_| {
            let vars = draw_vars(&mut rng, n, k, mode);
            // Bit j set means position j is positive; rejection removes the
            // single all-positive pattern.
            let pattern = loop {
                let p = rng.random::<u64>() & all_pos;
                if p != all_pos {
                    break p;
                }
            };
            Clause::new(
                vars.into_iter()
                    .enumerate()
                    .map(|(j, v)| Literal { var: v, negated: pattern >> j & 1 == 0 })
                    .collect(),
            )
        })
        .collect();
    Formula::new(n, k, clauses, ModelTag::PlantedNegative)
}

/// Clauses with one negative literal (first position) and k − 1 positive
/// ones, all variables drawn independently with replacement.
pub fn gen_single_sat_literal(n: usize, k: usize, m: usize, seed: u64) -> Result<Formula> {
    check_params(n, k, SelectionMode::WithReplacement)?;
    let mut rng = rng_from_seed(seed);
    let clauses = (0..m)
        .map(|_| {
            let mut lits = Vec::with_capacity(k);
            lits.push(Literal::neg(rng.random_range(0..n as u32)));
            for _ in 1..k {
                lits.push(Literal::pos(rng.random_range(0..n as u32)));
            }
            Clause::new(lits)
        })
        .collect();
    Formula::new(n, k, clauses, ModelTag::SingleSatLiteral)
}

const HEADER_TAG: &str = "c solspace";

/// Serialise to DIMACS CNF. A leading comment records the model tag and k so
/// that parsing the output reproduces the formula exactly.
pub fn emit_dimacs(f: &Formula) -> String {
    let mut out = format!("{HEADER_TAG} model={} k={}\np cnf {} {}\n", f.model, f.k, f.n, f.m());
    for c in &f.clauses {
        for l in &c.literals {
            out.push_str(&l.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Parse DIMACS CNF. Clauses may span lines. Without the tool's own header
/// comment the model is `uniform` and k is the common clause width.
pub fn parse_dimacs(text: &str) -> Result<Formula> {
    let perr = |line: usize, message: String| Error::Parse { line, message };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut model = ModelTag::Uniform;
    let mut k_hint: Option<usize> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_start = 0usize;
    let mut last_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if line.starts_with(HEADER_TAG) {
                for kv in rest.split_whitespace().skip(1) {
                    match kv.split_once('=') {
                        Some(("model", v)) => model = v.parse().map_err(|e: Error| perr(lineno, e.to_string()))?,
                        Some(("k", v)) => {
                            k_hint = Some(v.parse().map_err(|_| perr(lineno, format!("bad k `{v}`")))?)
                        }
                        _ => {}
                    }
                }
            }
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(perr(lineno, "duplicate problem line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(perr(lineno, format!("malformed header `{line}`")));
            }
            let n = parts[2].parse().map_err(|_| perr(lineno, format!("bad variable count `{}`", parts[2])))?;
            let m = parts[3].parse().map_err(|_| perr(lineno, format!("bad clause count `{}`", parts[3])))?;
            header = Some((n, m, lineno));
            continue;
        }
        let Some((n, _, _)) = header else {
            return Err(perr(lineno, "clause before problem line".into()));
        };
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| perr(lineno, format!("bad literal `{tok}`")))?;
            if v == 0 {
                clauses.push(Clause::new(std::mem::take(&mut current)));
                continue;
            }
            if current.is_empty() {
                current_start = lineno;
            }
            let var = v.unsigned_abs();
            if var as usize > n {
                return Err(perr(lineno, format!("variable index {var} out of range 1..={n}")));
            }
            current.push(Literal { var: (var - 1) as u32, negated: v < 0 });
        }
    }

    let Some((n, m, hline)) = header else {
        return Err(perr(last_line.max(1), "missing problem line".into()));
    };
    if !current.is_empty() {
        return Err(perr(current_start, "unterminated clause".into()));
    }
    if clauses.len() != m {
        return Err(perr(hline, format!("header declares {m} clauses but {} were read", clauses.len())));
    }
    let k = match (clauses.first(), k_hint) {
        (Some(c), _) => c.len(),
        (None, Some(k)) => k,
        (None, None) => 0,
    };
    Formula::new(n, k, clauses, model).map_err(|e| perr(hline, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(lits: &[i64]) -> Clause {
        Clause::new(
            lits.iter()
                .map(|&v| Literal { var: (v.unsigned_abs() - 1) as u32, negated: v < 0 })
                .collect(),
        )
    }

    #[test]
    fn empty_uniform_formula_accepts_everything() {
        let f = gen_uniform(5, 3, 0, 1, SelectionMode::Distinct).unwrap();
        assert_eq!(f.m(), 0);
        for w in 0..32 {
            assert!(f.evaluate(&Assignment::from_word(w, 5)).unwrap());
        }
    }

    #[test]
    fn distinct_mode_clauses_have_distinct_vars() {
        let f = gen_uniform(5, 3, 7, 1, SelectionMode::Distinct).unwrap();
        assert_eq!(f.m(), 7);
        for c in f.clauses() {
            let mut vars: Vec<_> = c.literals.iter().map(|l| l.var).collect();
            vars.sort();
            vars.dedup();
            assert_eq!(vars.len(), 3);
            assert!(vars.iter().all(|&v| v < 5));
        }
    }

    #[test]
    fn distinct_mode_rejects_small_n() {
        assert!(matches!(
            gen_uniform(2, 3, 1, 0, SelectionMode::Distinct),
            Err(Error::InvalidParameters(_))
        ));
        assert!(gen_uniform(2, 3, 1, 0, SelectionMode::WithReplacement).is_ok());
    }

    #[test]
    fn planted_formula_is_satisfied_by_zero() {
        let f = gen_planted_negative(5, 3, 100, 7, SelectionMode::Distinct).unwrap();
        assert!(f.evaluate(&Assignment::zeros(5)).unwrap());
        let g = gen_planted_negative(10, 3, 30, 3, SelectionMode::Distinct).unwrap();
        assert_eq!(g.model(), ModelTag::PlantedNegative);
        assert_eq!(g.m(), 30);
    }

    #[test]
    fn single_sat_literal_shapes() {
        let f = gen_single_sat_literal(5, 3, 4, 2).unwrap();
        for c in f.clauses() {
            assert_eq!(c.literals.iter().filter(|l| l.negated).count(), 1);
            assert_eq!(c.satisfied_count(&Assignment::zeros(5)), 1);
        }
        let g = gen_single_sat_literal(1, 3, 1, 0).unwrap();
        assert_eq!(g.clauses()[0], clause(&[-1, 1, 1]));
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_uniform(30, 4, 50, 99, SelectionMode::Distinct).unwrap();
        let b = gen_uniform(30, 4, 50, 99, SelectionMode::Distinct).unwrap();
        let c = gen_uniform(30, 4, 50, 100, SelectionMode::Distinct).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn evaluation_examples() {
        let f = Formula::new(3, 3, vec![clause(&[1, 2, 3])], ModelTag::Uniform).unwrap();
        assert!(!f.evaluate(&Assignment::zeros(3)).unwrap());
        let g = Formula::new(3, 3, vec![clause(&[-1, 2, 3])], ModelTag::Uniform).unwrap();
        assert!(g.evaluate(&Assignment::zeros(3)).unwrap());
        assert!(matches!(g.evaluate(&Assignment::zeros(2)), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn validator_catches_model_violations() {
        let bad = Formula::new(3, 3, vec![clause(&[1, 2, 3])], ModelTag::PlantedNegative);
        assert!(matches!(bad, Err(Error::InvalidFormula(_))));
        let bad = Formula::new(3, 3, vec![clause(&[-1, -2, 3])], ModelTag::SingleSatLiteral);
        assert!(matches!(bad, Err(Error::InvalidFormula(_))));
        let bad = Formula::new(3, 2, vec![clause(&[-1, -2, 3])], ModelTag::Uniform);
        assert!(matches!(bad, Err(Error::InvalidFormula(_))));
    }

    #[test]
    fn parse_plain_dimacs() {
        let f = parse_dimacs("p cnf 3 1\n1 -2 3 0\n").unwrap();
        assert_eq!(f.n(), 3);
        assert_eq!(f.k(), 3);
        assert_eq!(f.clauses(), &[clause(&[1, -2, 3])]);
        assert_eq!(f.model(), ModelTag::Uniform);
    }

    #[test]
    fn parse_accepts_clauses_across_lines_and_comments() {
        let f = parse_dimacs("c hello\np cnf 4 2\n1 -2\n 3 0 -4 1\n2 0\n").unwrap();
        assert_eq!(f.clauses(), &[clause(&[1, -2, 3]), clause(&[-4, 1, 2])]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_dimacs("p cnf 2 1\n3 1 0\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 2, message: "variable index 3 out of range 1..=2".into() });
        assert!(matches!(parse_dimacs("p cnf x 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_dimacs("1 2 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 2 2\n1 2 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dimacs("c only\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_keeps_model_and_order() {
        for f in [
            gen_uniform(12, 3, 20, 5, SelectionMode::Distinct).unwrap(),
            gen_planted_negative(12, 4, 20, 5, SelectionMode::WithReplacement).unwrap(),
            gen_single_sat_literal(6, 5, 9, 5).unwrap(),
            gen_uniform(12, 3, 0, 5, SelectionMode::Distinct).unwrap(),
        ] {
            let text = emit_dimacs(&f);
            let back = parse_dimacs(&text).unwrap();
            assert_eq!(back, f);
            assert_eq!(emit_dimacs(&back), text);
        }
    }

    #[test]
    fn canonical_fixture_round_trips() {
        let t = "c solspace model=planted_negative k=3\np cnf 4 2\n-1 2 3 0\n4 -3 -2 0\n";
        assert_eq!(emit_dimacs(&parse_dimacs(t).unwrap()), t);
    }

    #[test]
    fn assignment_words() {
        let a: Assignment = "1011".parse().unwrap();
        assert_eq!(a.to_word(), Some(0b1101));
        assert_eq!(Assignment::from_word(0b1101, 4), a);
        assert_eq!(a.to_string(), "1011");
    }
}
