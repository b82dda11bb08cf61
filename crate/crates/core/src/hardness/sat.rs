//! Desk-scale r-prover Label Cover built from a 3-CNF formula.
//!
//! A random string picks `r` clauses and one literal slot in each; `x_j` is
//! the variable in slot `j`. Prover `i` gets clause `j` when bit `j` of its
//! Hadamard codeword is 0 and variable `x_j` otherwise. Its answers are the
//! assignments to every variable of its query that satisfy the queried
//! clauses, and an answer projects to the values it gives `x_1..x_r`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::label_cover::{LabelCoverInstance, Labeling};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Cap on the number of enumerated random strings.
pub const ENUMERATION_CAP: u128 = 1_000_000;
/// Cap on the number of distinct variables in one query.
pub const MAX_QUERY_VARS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    /// Zero-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn eval(&self, value: bool) -> bool {
        value != self.negated
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub n_vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl Cnf {
    /// Parses DIMACS CNF. Clauses shorter than three literals are padded by
    /// repeating their literals; longer ones are rejected.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut n_vars = 0usize;
        let mut declared = false;
        let mut clauses = Vec::new();
        let mut current: Vec<Literal> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 4 || fields[1] != "cnf" {
                    return Err(Error::schema(format!("line {}", lineno + 1), "malformed problem line"));
                }
                n_vars = fields[2]
                    .parse()
                    .map_err(|_| Error::schema(format!("line {}", lineno + 1), "bad variable count"))?;
                declared = true;
                continue;
            }
            for tok in line.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| Error::schema(format!("line {}", lineno + 1), format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    clauses.push(Self::pad(&current, lineno)?);
                    current.clear();
                } else {
                    let var = lit.unsigned_abs() as usize - 1;
                    if declared && var >= n_vars {
                        return Err(Error::schema(
                            format!("line {}", lineno + 1),
                            format!("variable {} exceeds declared count {n_vars}", var + 1),
                        ));
                    }
                    current.push(Literal { var, negated: lit < 0 });
                }
            }
        }
        if !current.is_empty() {
            clauses.push(Self::pad(&current, text.lines().count())?);
        }
        if !declared {
            n_vars = clauses.iter().flatten().map(|l| l.var + 1).max().unwrap_or(0);
        }
        Self::new(n_vars, clauses)
    }

    pub fn new(n_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::InvalidInstance("formula has no clauses".into()));
        }
        if let Some(l) = clauses.iter().flatten().find(|l| l.var >= n_vars) {
            return Err(Error::InvalidInstance(format!("variable {} out of range", l.var)));
        }
        Ok(Self { n_vars, clauses })
    }

    fn pad(lits: &[Literal], lineno: usize) -> Result<[Literal; 3]> {
        match lits.len() {
            1 => Ok([lits[0]; 3]),
            2 => Ok([lits[0], lits[1], lits[0]]),
            3 => Ok([lits[0], lits[1], lits[2]]),
            n => Err(Error::schema(
                format!("line {}", lineno + 1),
                format!("clause with {n} literals, expected 1 to 3"),
            )),
        }
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.eval(assignment[l.var])))
    }
}

/// Rows of the order-`r` Hadamard matrix as bits: bit `j` of row `i` is the
/// parity of `i & j`.
pub fn hadamard_codewords(r: usize) -> Vec<Vec<u8>> {
    (0..r)
        .map(|i| (0..r).map(|j| ((i & j).count_ones() % 2) as u8).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatMode {
    Enumerate,
    Sample { count: usize, seed: u64 },
}

/// One position of a prover's query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueryItem {
    Clause(usize),
    Var(usize),
}

/// The Label Cover instance together with the meaning of its vertices and
/// labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatLabelCover {
    pub lc: LabelCoverInstance,
    pub codewords: Vec<Vec<u8>>,
    /// Query of every vertex (global id).
    pub queries: Vec<Vec<QueryItem>>,
    /// Sorted variables answered by every vertex.
    pub query_vars: Vec<Vec<usize>>,
    /// Answers of every vertex as bitmasks over `query_vars`, ascending.
    pub answers: Vec<Vec<u32>>,
}

impl SatLabelCover {
    /// Labeling where every prover answers according to `assignment`.
    /// Vertices whose queried clauses the assignment violates fall back to
    /// their lowest label.
    pub fn labeling_from_assignment(&self, assignment: &[bool]) -> Labeling {
        let sigma = self
            .query_vars
            .iter()
            .zip(&self.answers)
            .map(|(vars, answers)| {
                let mask = vars
                    .iter()
                    .enumerate()
                    .fold(0u32, |m, (b, &x)| m | ((assignment[x] as u32) << b));
                match answers.binary_search(&mask) {
                    Ok(l) => Some(l),
                    Err(_) if !answers.is_empty() => Some(0),
                    Err(_) => None,
                }
            })
            .collect();
        Labeling { sigma }
    }
}

struct Builder<'a> {
    formula: &'a Cnf,
    codewords: Vec<Vec<u8>>,
    vertex_of: Vec<HashMap<Vec<QueryItem>, usize>>,
    parts: Vec<Vec<usize>>,
    queries: Vec<Vec<Vec<QueryItem>>>,
    query_vars: Vec<Vec<Vec<usize>>>,
    answers: Vec<Vec<Vec<u32>>>,
    edges: Vec<Vec<usize>>,
    projections: Vec<Vec<Vec<usize>>>,
}

impl<'a> Builder<'a> {
    fn new(formula: &'a Cnf, r: usize) -> Self {
        Self {
            formula,
            codewords: hadamard_codewords(r),
            vertex_of: vec![HashMap::new(); r],
            parts: vec![Vec::new(); r],
            queries: vec![Vec::new(); r],
            query_vars: vec![Vec::new(); r],
            answers: vec![Vec::new(); r],
            edges: Vec::new(),
            projections: Vec::new(),
        }
    }

    fn vertex(&mut self, part: usize, query: Vec<QueryItem>) -> Result<usize> {
        if let Some(&v) = self.vertex_of[part].get(&query) {
            return Ok(v);
        }
        let mut vars: Vec<usize> = Vec::new();
        let mut clauses: Vec<usize> = Vec::new();
        for item in &query {
            match *item {
                QueryItem::Clause(c) => {
                    clauses.push(c);
                    vars.extend(self.formula.clauses[c].iter().map(|l| l.var));
                }
                QueryItem::Var(x) => vars.push(x),
            }
        }
        vars.sort_unstable();
        vars.dedup();
        if vars.len() > MAX_QUERY_VARS {
            return Err(Error::SizeCap {
                what: "variables in one query".into(),
                size: vars.len() as u128,
                cap: MAX_QUERY_VARS as u128,
            });
        }
        let answers: Vec<u32> = (0..1u32 << vars.len())
            .filter(|&mask| {
                clauses.iter().all(|&c| {
                    self.formula.clauses[c].iter().any(|l| {
                        let b = vars.binary_search(&l.var).unwrap();
                        l.eval(mask >> b & 1 == 1)
                    })
                })
            })
            .collect();
        let v = self.parts[part].len();
        self.parts[part].push(answers.len());
        self.vertex_of[part].insert(query.clone(), v);
        self.queries[part].push(query);
        self.query_vars[part].push(vars);
        self.answers[part].push(answers);
        Ok(v)
    }

    /// Adds the edge of the random string `(clause_j, slot_j)_j`.
    fn add_string(&mut self, choice: &[(usize, usize)]) -> Result<()> {
        let r = choice.len();
        let xs: Vec<usize> = choice
            .iter()
            .map(|&(c, s)| self.formula.clauses[c][s].var)
            .collect();
        let mut edge = Vec::with_capacity(r);
        let mut proj = Vec::with_capacity(r);
        for part in 0..r {
            let query: Vec<QueryItem> = (0..r)
                .map(|j| {
                    if self.codewords[part][j] == 0 {
                        QueryItem::Clause(choice[j].0)
                    } else {
                        QueryItem::Var(xs[j])
                    }
                })
                .collect();
            let v = self.vertex(part, query)?;
            let vars = &self.query_vars[part][v];
            let bits: Vec<usize> = xs.iter().map(|x| vars.binary_search(x).unwrap()).collect();
            let table = self.answers[part][v]
                .iter()
                .map(|&mask| {
                    bits.iter()
                        .enumerate()
                        .fold(0usize, |c, (j, &b)| c | (((mask >> b) & 1) as usize) << j)
                })
                .collect();
            edge.push(v);
            proj.push(table);
        }
        self.edges.push(edge);
        self.projections.push(proj);
        Ok(())
    }

    fn finish(self, r: usize) -> Result<SatLabelCover> {
        let lc = LabelCoverInstance {
            r,
            label_sizes: self.parts,
            n_colors: 1 << r,
            edges: self.edges,
            projections: self.projections,
        };
        lc.validate()?;
        Ok(SatLabelCover {
            lc,
            codewords: self.codewords,
            queries: self.queries.into_iter().flatten().collect(),
            query_vars: self.query_vars.into_iter().flatten().collect(),
            answers: self.answers.into_iter().flatten().collect(),
        })
    }
}

/// Builds the r-prover Label Cover instance of a formula. Enumerate mode
/// creates one edge per random string, `(3 * #clauses)^r` in total; sample
/// mode draws `count` strings.
pub fn sat_to_lc(formula: &Cnf, r: usize, mode: SatMode) -> Result<SatLabelCover> {
    if r < 2 || !r.is_power_of_two() {
        return Err(Error::Parameter(format!("r must be a power of two >= 2, got {r}")));
    }
    if r > 16 {
        return Err(Error::Parameter(format!("r = {r} exceeds the supported maximum 16")));
    }
    let per_slot = 3 * formula.clauses.len();
    let mut b = Builder::new(formula, r);
    match mode {
        SatMode::Enumerate => {
            let total = (per_slot as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
            if total > ENUMERATION_CAP {
                return Err(Error::SizeCap {
                    what: "random strings".into(),
                    size: total,
                    cap: ENUMERATION_CAP,
                });
            }
            let mut digits = vec![0usize; r];
            loop {
                let choice: Vec<(usize, usize)> = digits.iter().map(|&d| (d / 3, d % 3)).collect();
                b.add_string(&choice)?;
                // odometer with the first position most significant
                let mut j = r;
                loop {
                    if j == 0 {
                        return b.finish(r);
                    }
                    j -= 1;
                    digits[j] += 1;
                    if digits[j] < per_slot {
                        break;
                    }
                    digits[j] = 0;
                }
            }
        }
        SatMode::Sample { count, seed } => {
            if count == 0 {
                return Err(Error::Parameter("sample count must be positive".into()));
            }
            let mut rng = SeededRng::new(seed);
            for _ in 0..count {
                let choice: Vec<(usize, usize)> = (0..r)
                    .map(|_| (rng.below(formula.clauses.len()), rng.below(3)))
                    .collect();
                b.add_string(&choice)?;
            }
            b.finish(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardness::label_cover::satisfaction_stats;

    #[test]
    fn hadamard_rows() {
        assert_eq!(hadamard_codewords(2), vec![vec![0, 0], vec![0, 1]]);
        let h = hadamard_codewords(8);
        for a in 0..8 {
            for b in (a + 1)..8 {
                let dist = (0..8).filter(|&j| h[a][j] != h[b][j]).count();
                assert_eq!(dist, 4);
            }
        }
    }

    #[test]
    fn dimacs_padding() {
        let f = Cnf::parse_dimacs("c hi\np cnf 2 2\n1 0\n-1 2 0\n").unwrap();
        assert_eq!(f.n_vars, 2);
        let x = Literal { var: 0, negated: false };
        assert_eq!(f.clauses[0], [x; 3]);
        assert_eq!(f.clauses[1][2], Literal { var: 0, negated: true });
        assert!(Cnf::parse_dimacs("p cnf 1 1\n1 2 0\n").is_err());
        assert!(Cnf::parse_dimacs("p cnf 3 1\n1 2 3 -1 0\n").is_err());
    }

    #[test]
    fn satisfiable_single_clause() {
        let f = Cnf::parse_dimacs("p cnf 1 1\n1 1 1 0\n").unwrap();
        let s = sat_to_lc(&f, 2, SatMode::Enumerate).unwrap();
        assert_eq!(s.lc.n_edges(), 9);
        let lab = s.labeling_from_assignment(&[true]);
        let st = satisfaction_stats(&s.lc, &lab).unwrap();
        assert_eq!((st.strong_fraction, st.weak_fraction), (1.0, 1.0));
    }

    #[test]
    fn rejects_bad_r_and_oversized_enumeration() {
        let f = Cnf::parse_dimacs("p cnf 1 1\n1 0\n").unwrap();
        assert!(matches!(sat_to_lc(&f, 3, SatMode::Enumerate), Err(Error::Parameter(_))));
        let big = Cnf::parse_dimacs(&"1 2 3 0\n".repeat(40)).unwrap();
        assert!(matches!(sat_to_lc(&big, 4, SatMode::Enumerate), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn sampled_is_deterministic() {
        let f = Cnf::parse_dimacs("1 2 3 0\n-1 2 -3 0\n1 -2 3 0\n").unwrap();
        let a = sat_to_lc(&f, 4, SatMode::Sample { count: 50, seed: 7 }).unwrap();
        let b = sat_to_lc(&f, 4, SatMode::Sample { count: 50, seed: 7 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.lc.n_edges(), 50);
    }
}
