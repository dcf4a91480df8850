//! CNF encodings of the antipodal-path conjectures and their symmetry breaking.

mod levels;
mod symmetry;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use levels::{encode_levels, LevelVars, Reach};
pub use symmetry::{inject_red_degree_minimum, inject_symmetry_breaking, inject_symmetry_breaking_with};

use crate::cnf::{CnfFormula, Lit, Model, VarKey};
use crate::error::{Error, Result};
use crate::hypercube::{
    antipodal_edge_index, check_dim, edge_endpoints, edge_index, full_mask, generating_symmetries, hamming,
    num_edges, num_vertices, Color, Coloring, SymmetrySet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Conjecture {
    /// Every antipodal coloring has a monochromatic antipodal path.
    AntipodalPath,
    /// Every antipodal coloring has a monochromatic antipodal geodesic.
    AntipodalGeodesic,
    /// Every coloring has an antipodal path with at most one color change.
    OneChangePath,
    /// Every coloring has an antipodal geodesic with at most one color change.
    OneChangeGeodesic,
}

impl Conjecture {
    pub fn from_number(k: u32) -> Result<Self> {
        match k {
            1 => Ok(Conjecture::AntipodalPath),
            2 => Ok(Conjecture::AntipodalGeodesic),
            3 => Ok(Conjecture::OneChangePath),
            4 => Ok(Conjecture::OneChangeGeodesic),
            _ => Err(Error::InvalidArgument(format!("conjecture must be 1..=4, got {k}"))),
        }
    }

    pub fn number(self) -> u32 {
        match self {
            Conjecture::AntipodalPath => 1,
            Conjecture::AntipodalGeodesic => 2,
            Conjecture::OneChangePath => 3,
            Conjecture::OneChangeGeodesic => 4,
        }
    }

    /// Conjectures 1 and 2 range over antipodal colorings only.
    pub fn is_antipodal(self) -> bool {
        matches!(self, Conjecture::AntipodalPath | Conjecture::AntipodalGeodesic)
    }

    pub fn geodesic_only(self) -> bool {
        matches!(self, Conjecture::AntipodalGeodesic | Conjecture::OneChangeGeodesic)
    }
}

impl fmt::Display for Conjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "conjecture {}", self.number())
    }
}

/// Which start vertices get path variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathSources {
    /// `u ≺ ū`, i.e. first coordinate 0.
    #[default]
    LexSmallerHalf,
    /// Every vertex.
    All,
}

/// Cardinality encoding for the at-least thresholds of the bound formulas.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum CardinalityEncoding {
    #[default]
    ModuloTotalizer,
    SequentialCounter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingConfig {
    pub n: u32,
    pub target: Conjecture,
    pub symmetry_breaking: bool,
    pub max_comp: usize,
    pub red_degree_constraint: bool,
    pub symmetry_set: SymmetrySet,
    pub path_sources: PathSources,
    pub cardinality: CardinalityEncoding,
}

pub const DEFAULT_MAX_COMP: usize = 30;

impl EncodingConfig {
    /// Defaults: symmetry breaking with `max_comp = 30` and the red-degree constraint.
    pub fn new(n: u32, target: Conjecture) -> Self {
        EncodingConfig {
            n,
            target,
            symmetry_breaking: true,
            max_comp: DEFAULT_MAX_COMP,
            red_degree_constraint: true,
            symmetry_set: SymmetrySet::default(),
            path_sources: PathSources::default(),
            cardinality: CardinalityEncoding::default(),
        }
    }

    /// No symmetry breaking and no red-degree constraint.
    pub fn plain(n: u32, target: Conjecture) -> Self {
        EncodingConfig {
            symmetry_breaking: false,
            red_degree_constraint: false,
            ..EncodingConfig::new(n, target)
        }
    }

    pub fn with_max_comp(mut self, max_comp: usize) -> Self {
        self.max_comp = max_comp;
        self
    }

    pub fn with_symmetry_breaking(mut self, on: bool) -> Self {
        self.symmetry_breaking = on;
        self
    }

    pub fn with_red_degree(mut self, on: bool) -> Self {
        self.red_degree_constraint = on;
        self
    }

    pub fn with_path_sources(mut self, s: PathSources) -> Self {
        self.path_sources = s;
        self
    }

    pub(crate) fn sources(&self) -> Vec<u32> {
        sources(self.n, self.path_sources)
    }
}

pub(crate) fn sources(n: u32, which: PathSources) -> Vec<u32> {
    let all = num_vertices(n) as u32;
    match which {
        PathSources::LexSmallerHalf => (0..all / 2).collect(),
        PathSources::All => (0..all).collect(),
    }
}

/// The literal standing for "edge is red", per canonical edge index.
///
/// In the implicit scheme only one edge of each antipodal pair has a
/// variable and the other edge reads its negation.
#[derive(Clone, Debug)]
pub struct EdgeLits {
    n: u32,
    implicit: bool,
    lits: Vec<Lit>,
}

impl EdgeLits {
    /// Allocates `r` variables in canonical edge-index order.
    pub fn allocate(f: &mut CnfFormula, n: u32, implicit: bool) -> Self {
        let m = num_edges(n);
        let mask = full_mask(n);
        let mut lits: Vec<Option<Lit>> = vec![None; m];
        for (e, slot) in lits.iter_mut().enumerate() {
            let (lo, bit) = edge_endpoints(n, e);
            let hi = lo | 1 << bit;
            if !implicit || lo < (!hi & mask) {
                *slot = Some(f.var(VarKey::Red { lo, hi }).pos());
            }
        }
        let lits = (0..m)
            .map(|e| lits[e].unwrap_or_else(|| !lits[antipodal_edge_index(n, e)].expect("representative exists")))
            .collect();
        EdgeLits { n, implicit, lits }
    }

    /// Reconstructs the edge literals from a formula's registry.
    pub fn from_formula(f: &CnfFormula, n: u32) -> Result<Self> {
        check_dim(n)?;
        let m = num_edges(n);
        let key = |e: usize| {
            let (lo, bit) = edge_endpoints(n, e);
            VarKey::Red { lo, hi: lo | 1 << bit }
        };
        let mut implicit = false;
        let mut lits = Vec::with_capacity(m);
        for e in 0..m {
            let lit = match f.lookup(&key(e)) {
                Some(v) => v.pos(),
                None => {
                    implicit = true;
                    let a = antipodal_edge_index(n, e);
                    let v = f
                        .lookup(&key(a))
                        .ok_or_else(|| Error::InvalidArgument(format!("formula has no variable for edge {e}")))?;
                    v.neg()
                }
            };
            lits.push(lit);
        }
        Ok(EdgeLits { n, implicit, lits })
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn is_implicit(&self) -> bool {
        self.implicit
    }

    #[inline]
    pub fn lit(&self, edge: usize) -> Lit {
        self.lits[edge]
    }

    /// Literal of the edge between adjacent raw vertices.
    #[inline]
    pub fn between(&self, u: u32, v: u32) -> Lit {
        self.lits[edge_index(self.n, u, (u ^ v).trailing_zeros())]
    }

    /// Reads a coloring from a model; a true literal means red.
    pub fn decode(&self, model: &Model) -> Result<Coloring> {
        for l in &self.lits {
            if l.var().index() > model.num_vars() {
                return Err(Error::IncompleteModel(l.var().index()));
            }
        }
        Coloring::from_fn(self.n, |e| Color::from_bit(model.value(self.lits[e])))
    }

    /// Unit clauses fixing the formula's edges to `c`.
    pub fn fix_coloring(&self, f: &mut CnfFormula, c: &Coloring) {
        for e in 0..self.lits.len() {
            let l = self.lits[e];
            f.add_unit(if c.is_red(e) { l } else { !l });
        }
    }

    /// The literals asserting coloring `c`, one per variable.
    pub fn assumptions_for(&self, c: &Coloring) -> Vec<Lit> {
        let mut out: Vec<Lit> = (0..self.lits.len())
            .map(|e| if c.is_red(e) { self.lits[e] } else { !self.lits[e] })
            .collect();
        out.sort_unstable_by_key(|l| l.var());
        out.dedup();
        out
    }
}

/// A built formula together with how to read colorings back from it.
#[derive(Clone, Debug)]
pub struct Encoding {
    pub n: u32,
    pub formula: CnfFormula,
    pub edges: EdgeLits,
    /// Clauses contributed by lex-leader constraints.
    pub sb_clauses: usize,
    /// Clauses contributed by the red-degree constraint.
    pub degree_clauses: usize,
}

impl Encoding {
    pub fn decode_coloring(&self, model: &Model) -> Result<Coloring> {
        self.edges.decode(model)
    }
}

/// Decodes the `r` variables of any encoding built by this crate.
pub fn decode_coloring(f: &CnfFormula, n: u32, model: &Model) -> Result<Coloring> {
    EdgeLits::from_formula(f, n)?.decode(model)
}

pub(crate) fn check_n(n: u32) -> Result<()> {
    check_dim(n)?;
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    Ok(())
}

/// Dense table of `p_{u,v}` variables.
struct PathVars {
    n: u32,
    src_index: Vec<u32>,
    table: Vec<Lit>,
}

impl PathVars {
    fn allocate(f: &mut CnfFormula, n: u32, sources: &[u32]) -> Self {
        let nv = num_vertices(n);
        let mut src_index = vec![u32::MAX; nv];
        let placeholder = Lit::from_dimacs(1);
        let mut table = vec![placeholder; sources.len() * nv];
        for (i, &u) in sources.iter().enumerate() {
            src_index[u as usize] = i as u32;
            for v in 0..nv as u32 {
                if v != u {
                    table[i * nv + v as usize] = f.var(VarKey::Path { u, v }).pos();
                }
            }
        }
        PathVars { n, src_index, table }
    }

    fn get(&self, u: u32, v: u32) -> Lit {
        let i = self.src_index[u as usize] as usize;
        self.table[i * num_vertices(self.n) + v as usize]
    }
}

fn finish(f: &mut CnfFormula, edges: &EdgeLits, cfg: &EncodingConfig) -> (usize, usize) {
    let before = f.num_clauses();
    if cfg.symmetry_breaking && cfg.max_comp > 0 {
        let syms = generating_symmetries(cfg.n, cfg.symmetry_set);
        inject_symmetry_breaking_with(f, edges, &syms, cfg.max_comp);
    }
    let mid = f.num_clauses();
    if cfg.red_degree_constraint {
        inject_red_degree_minimum(f, edges);
    }
    (mid - before, f.num_clauses() - mid)
}

fn build_antipodal(cfg: &EncodingConfig, geodesic: bool) -> Result<Encoding> {
    let n = cfg.n;
    check_n(n)?;
    let mut f = CnfFormula::new();
    let edges = EdgeLits::allocate(&mut f, n, true);
    let sources = cfg.sources();
    let p = PathVars::allocate(&mut f, n, &sources);
    let nv = num_vertices(n) as u32;
    let mask = full_mask(n);
    for &u in &sources {
        for bit in 0..n {
            let v = u ^ 1 << bit;
            f.add_clause([!edges.between(u, v), p.get(u, v)]);
        }
    }
    for &u in &sources {
        for v in (0..nv).filter(|&v| v != u) {
            let d = hamming(u, v);
            for bit in 0..n {
                let w = v ^ 1 << bit;
                let dw = hamming(u, w);
                let ok = if geodesic { dw == d + 1 } else { w != u && dw != 1 };
                if ok {
                    f.add_clause([!p.get(u, v), !edges.between(v, w), p.get(u, w)]);
                }
            }
        }
    }
    for v in 0..nv / 2 {
        f.add_unit(!p.get(v, !v & mask));
    }
    let (sb_clauses, degree_clauses) = finish(&mut f, &edges, cfg);
    Ok(Encoding { n, formula: f, edges, sb_clauses, degree_clauses })
}

/// `Φ_n`: unsatisfiable iff every antipodal coloring of `Q_n` has a
/// monochromatic antipodal path.
pub fn build_phi(cfg: &EncodingConfig) -> Result<Encoding> {
    build_antipodal(cfg, false)
}

/// `Ψ_n`: as [`build_phi`] with paths restricted to geodesics.
pub fn build_psi(cfg: &EncodingConfig) -> Result<Encoding> {
    build_antipodal(cfg, true)
}

fn build_one_change(cfg: &EncodingConfig, reach: Reach) -> Result<Encoding> {
    let n = cfg.n;
    check_n(n)?;
    let mut f = CnfFormula::new();
    let edges = EdgeLits::allocate(&mut f, n, false);
    let sources = cfg.sources();
    let levels = encode_levels(&mut f, &edges, &sources, 1, reach);
    let mask = full_mask(n);
    for &u in &sources {
        for color in [Color::Red, Color::Blue] {
            f.add_unit(!levels.get(u, !u & mask, color, 1));
        }
    }
    let (sb_clauses, degree_clauses) = finish(&mut f, &edges, cfg);
    Ok(Encoding { n, formula: f, edges, sb_clauses, degree_clauses })
}

/// Unsatisfiable iff every coloring has an antipodal path with at most one change.
pub fn build_conj3(cfg: &EncodingConfig) -> Result<Encoding> {
    build_one_change(cfg, Reach::Path)
}

/// Unsatisfiable iff every coloring has an antipodal geodesic with at most one change.
pub fn build_conj4(cfg: &EncodingConfig) -> Result<Encoding> {
    build_one_change(cfg, Reach::Geodesic)
}

/// Dispatches on `cfg.target`.
pub fn build_conjecture(cfg: &EncodingConfig) -> Result<Encoding> {
    match cfg.target {
        Conjecture::AntipodalPath => build_phi(cfg),
        Conjecture::AntipodalGeodesic => build_psi(cfg),
        Conjecture::OneChangePath => build_conj3(cfg),
        Conjecture::OneChangeGeodesic => build_conj4(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::write_dimacs;
    use crate::solver::dpll::{solve, Outcome};

    fn plain(n: u32, c: Conjecture) -> EncodingConfig {
        EncodingConfig::plain(n, c)
    }

    #[test]
    fn implicit_scheme_keeps_one_edge_per_antipodal_pair() {
        for n in 2..=5 {
            let mut f = CnfFormula::new();
            let e = EdgeLits::allocate(&mut f, n, true);
            assert_eq!(f.num_vars() as usize, num_edges(n) / 2);
            for i in 0..num_edges(n) {
                assert_eq!(e.lit(i), !e.lit(antipodal_edge_index(n, i)));
            }
            let back = EdgeLits::from_formula(&f, n).unwrap();
            assert!(back.is_implicit());
            assert_eq!(back.lits, e.lits);
        }
    }

    #[test]
    fn closed_form_sizes_without_symmetry_breaking() {
        for n in 2..=6u64 {
            let v = 1u64 << n;
            let half = v / 2;
            let psi = build_psi(&plain(n as u32, Conjecture::AntipodalGeodesic)).unwrap();
            let phi = build_phi(&plain(n as u32, Conjecture::AntipodalPath)).unwrap();
            let vars = n * v / 4 + half * (v - 1);
            assert_eq!(psi.formula.num_vars() as u64, vars);
            assert_eq!(phi.formula.num_vars() as u64, vars);
            // base clauses + forward extensions + unit clauses
            let psi_clauses = half * n + half * (n * v / 2 - n) + half;
            assert_eq!(psi.formula.num_clauses() as u64, psi_clauses, "psi n={n}");
            // extensions from v ≠ u to w ∉ N(u) ∪ {u}
            let phi_ext = n * (v - 1) - n * (n - 1) - n;
            let phi_clauses = half * n + half * phi_ext + half;
            assert_eq!(phi.formula.num_clauses() as u64, phi_clauses, "phi n={n}");
        }
    }

    #[test]
    fn small_instances_are_unsat() {
        for (n, c) in [
            (2, Conjecture::AntipodalPath),
            (3, Conjecture::AntipodalPath),
            (2, Conjecture::AntipodalGeodesic),
            (3, Conjecture::AntipodalGeodesic),
            (2, Conjecture::OneChangePath),
            (2, Conjecture::OneChangeGeodesic),
            (3, Conjecture::OneChangeGeodesic),
        ] {
            for cfg in [plain(n, c), EncodingConfig::new(n, c)] {
                let enc = build_conjecture(&cfg).unwrap();
                assert_eq!(solve(&enc.formula), Outcome::Unsat, "{c} n={n}");
            }
        }
    }

    #[test]
    fn builds_are_byte_identical() {
        let dump = |cfg: &EncodingConfig| {
            let mut buf = Vec::new();
            write_dimacs(&build_conjecture(cfg).unwrap().formula, &mut buf).unwrap();
            buf
        };
        let cfg = EncodingConfig::new(4, Conjecture::AntipodalPath);
        assert_eq!(dump(&cfg), dump(&cfg));
        let cfg = EncodingConfig::new(3, Conjecture::OneChangePath);
        assert_eq!(dump(&cfg), dump(&cfg));
    }

    #[test]
    fn all_sources_add_path_variables() {
        let cfg = plain(4, Conjecture::AntipodalGeodesic).with_path_sources(PathSources::All);
        let enc = build_psi(&cfg).unwrap();
        assert_eq!(enc.formula.num_vars(), 16 + 16 * 15);
        assert_eq!(solve(&enc.formula), Outcome::Unsat);
    }

    #[test]
    fn all_false_model_decodes_to_all_blue() {
        let enc = build_conj4(&plain(3, Conjecture::OneChangeGeodesic)).unwrap();
        let m = Model::new(enc.formula.num_vars());
        let c = enc.decode_coloring(&m).unwrap();
        assert_eq!(c.red_edges().count(), 0);
        assert!(decode_coloring(&enc.formula, 3, &Model::new(3)).is_err());
    }
}
