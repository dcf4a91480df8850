//! CNF data model with a deterministic registry of semantic variable names.

mod cardinality;
mod dimacs;
mod lex;

use std::collections::HashMap;
use std::fmt;
use std::ops::Not;

pub use cardinality::{
    at_least_k_mtot, at_least_k_seq, at_most_k_mtot, at_most_k_seq, sequential_counter,
    CounterDirection, ModTotalizer, SeqCounter,
};
pub use dimacs::{parse_cubes, parse_dimacs, write_dimacs, write_dimacs_with_cube, write_icnf, write_registry};
pub use lex::{encode_lex_leader, LexLeaderSpec};

use crate::error::{Error, Result};
use crate::hypercube::Color;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variables are 1-based");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }

    pub fn lit(self, positive: bool) -> Lit {
        if positive {
            self.pos()
        } else {
            self.neg()
        }
    }
}

/// A literal in DIMACS convention: `±var`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(x: i32) -> Self {
        assert!(x != 0, "0 is not a literal");
        Lit(x)
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Dense code `2·(var−1) + sign` for indexing watch lists.
    #[inline]
    pub fn code(self) -> usize {
        ((self.0.unsigned_abs() as usize - 1) << 1) | (self.0 < 0) as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Semantic name of a variable. Vertices are raw bit patterns.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum VarKey {
    /// `r_{lo,hi}`: the edge is red.
    Red { lo: u32, hi: u32 },
    /// `p_{u,v}`: a red path (or geodesic) from `u` reaches `v`.
    Path { u: u32, v: u32 },
    /// `p^x_{u,v,i}`: reachable with last edge `x` and at most `i` changes.
    Level { u: u32, v: u32, color: Color, level: u32 },
    /// `p^t_{u,i}`, with `i = −1` only in the refined variant.
    Total { u: u32, level: i32 },
    /// `d_{v,i}`: red degree of `v` is at least `i`.
    Degree { v: u32, i: u32 },
    /// Encoder-internal auxiliary.
    Aux { kind: &'static str, id: u32 },
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarKey::Red { lo, hi } => write!(f, "r({lo},{hi})"),
            VarKey::Path { u, v } => write!(f, "p({u},{v})"),
            VarKey::Level { u, v, color, level } => {
                let c = if color.is_red() { "red" } else { "blue" };
                write!(f, "p_{c}({u},{v},{level})")
            }
            VarKey::Total { u, level } => write!(f, "p_t({u},{level})"),
            VarKey::Degree { v, i } => write!(f, "d({v},{i})"),
            VarKey::Aux { kind, id } => write!(f, "{kind}#{id}"),
        }
    }
}

/// Variables, clauses and the name registry.
///
/// Clause storage is flat; clause order is exactly insertion order.
#[derive(Clone, Default)]
pub struct CnfFormula {
    num_vars: u32,
    lits: Vec<Lit>,
    starts: Vec<u32>,
    registry: HashMap<VarKey, Var>,
    names: Vec<Option<VarKey>>,
    aux_ids: HashMap<&'static str, u32>,
}

impl CnfFormula {
    pub fn new() -> Self {
        CnfFormula {
            names: vec![None],
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.starts.len()
    }

    pub fn num_literals(&self) -> usize {
        self.lits.len()
    }

    /// Returns the variable for `key`, allocating it on first use.
    pub fn var(&mut self, key: VarKey) -> Var {
        if let Some(&v) = self.registry.get(&key) {
            return v;
        }
        let v = self.alloc();
        self.registry.insert(key, v);
        self.names[v.0 as usize] = Some(key);
        v
    }

    pub fn lookup(&self, key: &VarKey) -> Option<Var> {
        self.registry.get(key).copied()
    }

    pub fn key_of(&self, v: Var) -> Option<&VarKey> {
        self.names.get(v.0 as usize).and_then(|k| k.as_ref())
    }

    /// Fresh registered auxiliary named `kind#id`.
    pub fn fresh(&mut self, kind: &'static str) -> Var {
        let id = self.aux_ids.entry(kind).or_insert(0);
        *id += 1;
        let key = VarKey::Aux { kind, id: *id };
        self.var(key)
    }

    /// Unnamed variable (used when parsing DIMACS).
    pub fn new_var(&mut self) -> Var {
        self.alloc()
    }

    fn alloc(&mut self) -> Var {
        self.num_vars += 1;
        self.names.push(None);
        Var(self.num_vars)
    }

    pub(crate) fn ensure_vars(&mut self, n: u32) {
        while self.num_vars < n {
            self.alloc();
        }
    }

    /// Adds a clause after merging duplicate literals; tautologies are
    /// dropped. An empty input adds the empty clause.
    pub fn add_clause<I: IntoIterator<Item = Lit>>(&mut self, clause: I) {
        let start = self.lits.len();
        for l in clause {
            assert!(l.var().0 <= self.num_vars, "literal {l} beyond num_vars");
            let body = &self.lits[start..];
            if body.contains(&l) {
                continue;
            }
            if body.contains(&!l) {
                self.lits.truncate(start);
                return;
            }
            self.lits.push(l);
        }
        self.starts.push(start as u32);
    }

    pub fn add_unit(&mut self, l: Lit) {
        self.add_clause([l]);
    }

    pub fn clause(&self, i: usize) -> &[Lit] {
        let s = self.starts[i] as usize;
        let e = self.starts.get(i + 1).map_or(self.lits.len(), |&e| e as usize);
        &self.lits[s..e]
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = &[Lit]> + '_ {
        (0..self.num_clauses()).map(move |i| self.clause(i))
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses().any(|c| c.is_empty())
    }

    /// Registered names in variable order.
    pub fn registry(&self) -> impl Iterator<Item = (Var, &VarKey)> + '_ {
        self.names
            .iter()
            .enumerate()
            .filter_map(|(i, k)| k.as_ref().map(|k| (Var(i as u32), k)))
    }

    /// Index of the first clause falsified by `model`, if any.
    pub fn first_violated(&self, model: &Model) -> Option<usize> {
        self.clauses().position(|c| !c.iter().any(|&l| model.value(l)))
    }

    pub fn check_model(&self, model: &Model) -> Result<()> {
        if model.num_vars() < self.num_vars {
            return Err(Error::IncompleteModel(model.num_vars() + 1));
        }
        match self.first_violated(model) {
            Some(i) => Err(Error::ModelCheck(i)),
            None => Ok(()),
        }
    }
}

impl fmt::Debug for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CnfFormula(vars={}, clauses={})", self.num_vars, self.num_clauses())
    }
}

/// A total assignment, `values[v]` for variable `v` (index 0 unused).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(num_vars: u32) -> Self {
        Model {
            values: vec![false; num_vars as usize + 1],
        }
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(false);
        v.extend(values);
        Model { values: v }
    }

    /// Builds a model from signed DIMACS literals; unmentioned variables
    /// up to `num_vars` are an error.
    pub fn from_dimacs_lits(num_vars: u32, lits: &[i32]) -> Result<Self> {
        let mut values = vec![None; num_vars as usize + 1];
        for &l in lits {
            let v = l.unsigned_abs() as usize;
            if v == 0 {
                continue;
            }
            if v > num_vars as usize {
                values.resize(v + 1, None);
            }
            values[v] = Some(l > 0);
        }
        let mut out = Vec::with_capacity(values.len());
        out.push(false);
        for (i, v) in values.iter().enumerate().skip(1) {
            match v {
                Some(b) => out.push(*b),
                None if i <= num_vars as usize => return Err(Error::IncompleteModel(i as u32)),
                None => out.push(false),
            }
        }
        Ok(Model { values: out })
    }

    pub fn num_vars(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    #[inline]
    pub fn var_value(&self, v: Var) -> bool {
        self.values[v.0 as usize]
    }

    #[inline]
    pub fn value(&self, l: Lit) -> bool {
        self.values[l.var().0 as usize] == l.is_positive()
    }

    pub fn set(&mut self, v: Var, value: bool) {
        self.values[v.0 as usize] = value;
    }

    /// Signed DIMACS literals for every variable.
    pub fn to_dimacs_lits(&self) -> Vec<i32> {
        (1..self.values.len())
            .map(|v| if self.values[v] { v as i32 } else { -(v as i32) })
            .collect()
    }
}

/// A conjunction of literals with no repeated variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Cube(Vec<Lit>);

impl Cube {
    pub fn new(lits: Vec<Lit>) -> Result<Self> {
        let mut vars: Vec<_> = lits.iter().map(|l| l.var()).collect();
        vars.sort_unstable();
        if vars.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("cube repeats a variable: {lits:?}")));
        }
        Ok(Cube(lits))
    }

    pub fn empty() -> Self {
        Cube(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn satisfied_by(&self, model: &Model) -> bool {
        self.0.iter().all(|&l| model.value(l))
    }
}
