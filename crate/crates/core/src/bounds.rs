//! Counting formulas `F(n, α)`, `F̂(n, α)` and the blocking-pair formula,
//! plus a binary search driver for their exact optima.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::cnf::{at_least_k_mtot, at_least_k_seq, CnfFormula, Lit, VarKey};
use crate::encode::{
    check_n, encode_levels, inject_red_degree_minimum, inject_symmetry_breaking_with, sources, CardinalityEncoding,
    EdgeLits, EncodingConfig, LevelVars, PathSources, Reach,
};
use crate::error::{Error, Result};
use crate::hypercube::{full_mask, generating_symmetries, num_vertices, Color, Coloring};
use crate::oracle::coloring_stats;
use crate::solver::dpll::Outcome;

/// A dyadic rational `numerator / denominator`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    numerator: i64,
    denominator: i64,
}

impl Threshold {
    pub fn new(numerator: i64, denominator: i64) -> Result<Self> {
        if denominator <= 0 || denominator & (denominator - 1) != 0 {
            return Err(Error::InvalidArgument(format!("threshold denominator {denominator} is not a power of two")));
        }
        Ok(Threshold { numerator, denominator })
    }

    pub fn integer(k: i64) -> Self {
        Threshold { numerator: k, denominator: 1 }
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn as_ratio(&self) -> Rational64 {
        Rational64::new(self.numerator, self.denominator)
    }

    /// `2^{n−1}·α` if it is an integer.
    pub fn exact_count(&self, n: u32) -> Option<i64> {
        let scaled = self.numerator << (n - 1);
        (scaled % self.denominator == 0).then(|| scaled / self.denominator)
    }

    /// `⌈2^{n−1}·α⌉`. The counted sums are integers, so this is the same
    /// constraint as the fractional one.
    pub fn count(&self, n: u32) -> i64 {
        let scaled = self.numerator << (n - 1);
        scaled.div_euclid(self.denominator) + i64::from(scaled.rem_euclid(self.denominator) != 0)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator == 1 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    /// Accepts `p/q`, an integer, or a finite decimal such as `0.875`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse threshold `{s}`"));
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim().parse().map_err(|_| bad())?;
            return Threshold::new(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            let digits = frac.len() as u32;
            if digits > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
            let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            let scale = 10i64.pow(digits);
            let num = whole.abs() * scale + frac;
            let r = Rational64::new(if neg { -num } else { num }, scale);
            return Threshold::new(*r.numer(), *r.denom());
        }
        Ok(Threshold::integer(s.parse().map_err(|_| bad())?))
    }
}

/// Which quantity a bound formula counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    F,
    #[serde(rename = "fhat")]
    FHat,
    Mu,
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f" => Ok(BoundKind::F),
            "fhat" | "f-hat" | "fprime" => Ok(BoundKind::FHat),
            "mu" => Ok(BoundKind::Mu),
            _ => Err(Error::InvalidArgument(format!("unknown bound kind `{s}`"))),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::F => "f",
            BoundKind::FHat => "fhat",
            BoundKind::Mu => "mu",
        })
    }
}

/// A built bound formula with handles for decoding and inspection.
#[derive(Clone, Debug)]
pub struct BoundEncoding {
    pub kind: BoundKind,
    pub n: u32,
    /// The integer the cardinality constraint compares against (before any shift).
    pub count: i64,
    pub formula: CnfFormula,
    pub edges: EdgeLits,
    pub levels: LevelVars,
    pub sb_clauses: usize,
    pub degree_clauses: usize,
}

impl BoundEncoding {
    pub fn decode_coloring(&self, model: &crate::cnf::Model) -> Result<Coloring> {
        self.edges.decode(model)
    }
}

fn at_least(f: &mut CnfFormula, lits: &[Lit], k: i64, enc: CardinalityEncoding) {
    if k <= 0 {
        return;
    }
    let k = k as usize;
    match enc {
        CardinalityEncoding::ModuloTotalizer => {
            at_least_k_mtot(f, lits, k);
        }
        CardinalityEncoding::SequentialCounter => {
            at_least_k_seq(f, lits, k);
        }
    }
}

struct Core {
    f: CnfFormula,
    edges: EdgeLits,
    levels: LevelVars,
    sources: Vec<u32>,
}

fn core(n: u32, max_level: u32) -> Result<Core> {
    check_n(n)?;
    let mut f = CnfFormula::new();
    let edges = EdgeLits::allocate(&mut f, n, false);
    let sources = sources(n, PathSources::LexSmallerHalf);
    let levels = encode_levels(&mut f, &edges, &sources, max_level, Reach::Geodesic);
    Ok(Core { f, edges, levels, sources })
}

/// Symmetry breaking for statistics invariant under the whole group.
fn finish_invariant(c: &mut Core, cfg: &EncodingConfig) -> (usize, usize) {
    let mut sb = 0;
    if cfg.symmetry_breaking && cfg.max_comp > 0 {
        let syms = generating_symmetries(c.edges.dim(), cfg.symmetry_set);
        sb = inject_symmetry_breaking_with(&mut c.f, &c.edges, &syms, cfg.max_comp);
    }
    let deg = if cfg.red_degree_constraint { inject_red_degree_minimum(&mut c.f, &c.edges) } else { 0 };
    (sb, deg)
}

/// `F(n, α)`: satisfiable iff some coloring has `Σ_{u ≺ ū} s_u ≥ ⌈2^{n−1}α⌉`,
/// i.e. `f(n) ≥ α`.
pub fn build_f(n: u32, alpha: Threshold, cfg: &EncodingConfig) -> Result<BoundEncoding> {
    let count = alpha.count(n.max(1));
    build_f_count(n, count, cfg)
}

pub fn build_f_count(n: u32, count: i64, cfg: &EncodingConfig) -> Result<BoundEncoding> {
    let mut c = core(n, n - 1)?;
    let mask = full_mask(n);
    let mut counted = Vec::new();
    for &u in &c.sources {
        for i in 0..n {
            let t = c.f.var(VarKey::Total { u, level: i as i32 }).pos();
            for color in [Color::Red, Color::Blue] {
                c.f.add_clause([!c.levels.get(u, !u & mask, color, i), t]);
            }
            counted.push(!t);
        }
    }
    at_least(&mut c.f, &counted, count, cfg.cardinality);
    let (sb_clauses, degree_clauses) = finish_invariant(&mut c, cfg);
    Ok(BoundEncoding {
        kind: BoundKind::F,
        n,
        count,
        formula: c.f,
        edges: c.edges,
        levels: c.levels,
        sb_clauses,
        degree_clauses,
    })
}

/// `F̂(n, α)`: satisfiable iff some coloring has
/// `Σ_{u ≺ ū} min(s_u, s'_u − 1) ≥ ⌈2^{n−1}α⌉` where `s'_u` conditions on the
/// color of the edge at `ū`.
///
/// That sum is not invariant under symmetries moving coordinate 1, so only
/// symmetries fixing it are broken and the red-degree constraint is skipped.
pub fn build_fhat(n: u32, alpha: Threshold, cfg: &EncodingConfig) -> Result<BoundEncoding> {
    let count = alpha.count(n.max(1));
    build_fhat_count(n, count, cfg)
}

pub fn build_fhat_count(n: u32, count: i64, cfg: &EncodingConfig) -> Result<BoundEncoding> {
    let mut c = core(n, n - 1)?;
    let mask = full_mask(n);
    let mut counted = Vec::new();
    for &u in &c.sources {
        let t: Vec<Lit> = (-1..n as i32).map(|i| c.f.var(VarKey::Total { u, level: i }).pos()).collect();
        let at = |i: i32| t[(i + 1) as usize];
        for i in 0..n {
            let red = c.levels.get(u, !u & mask, Color::Red, i);
            let blue = c.levels.get(u, !u & mask, Color::Blue, i);
            c.f.add_clause([!red, at(i as i32)]);
            c.f.add_clause([!blue, at(i as i32)]);
            c.f.add_clause([!red, !blue, at(i as i32 - 1)]);
        }
        counted.extend(t.iter().map(|&l| !l));
    }
    let half = 1i64 << (n - 1);
    at_least(&mut c.f, &counted, count + half, cfg.cardinality);
    let mut sb_clauses = 0;
    if cfg.symmetry_breaking && cfg.max_comp > 0 {
        let syms: Vec<_> = generating_symmetries(n, cfg.symmetry_set)
            .into_iter()
            .filter(|s| s.fixes_first_coordinate())
            .collect();
        sb_clauses = inject_symmetry_breaking_with(&mut c.f, &c.edges, &syms, cfg.max_comp);
    }
    Ok(BoundEncoding {
        kind: BoundKind::FHat,
        n,
        count,
        formula: c.f,
        edges: c.edges,
        levels: c.levels,
        sb_clauses,
        degree_clauses: 0,
    })
}

/// Satisfiable iff some coloring has at least `target` blocking pairs.
pub fn build_mu(n: u32, target: u32, cfg: &EncodingConfig) -> Result<BoundEncoding> {
    check_n(n)?;
    if target as usize > num_vertices(n) / 2 {
        return Err(Error::InvalidArgument(format!("target {target} exceeds 2^(n-1) antipodal pairs")));
    }
    let mut c = core(n, 1)?;
    let mask = full_mask(n);
    let mut counted = Vec::new();
    for &u in &c.sources {
        let t = c.f.var(VarKey::Total { u, level: 1 }).pos();
        for color in [Color::Red, Color::Blue] {
            c.f.add_clause([!c.levels.get(u, !u & mask, color, 1), t]);
        }
        counted.push(!t);
    }
    at_least(&mut c.f, &counted, target as i64, cfg.cardinality);
    let (sb_clauses, degree_clauses) = finish_invariant(&mut c, cfg);
    Ok(BoundEncoding {
        kind: BoundKind::Mu,
        n,
        count: target as i64,
        formula: c.f,
        edges: c.edges,
        levels: c.levels,
        sb_clauses,
        degree_clauses,
    })
}

/// Builds the formula of `kind` for an integer count.
pub fn build_bound(kind: BoundKind, n: u32, count: i64, cfg: &EncodingConfig) -> Result<BoundEncoding> {
    match kind {
        BoundKind::F => build_f_count(n, count, cfg),
        BoundKind::FHat => build_fhat_count(n, count, cfg),
        BoundKind::Mu => build_mu(n, u32::try_from(count).map_err(|_| Error::InvalidArgument("negative target".into()))?, cfg),
    }
}

/// The encoded count achieved by a concrete coloring.
pub fn witness_count(kind: BoundKind, c: &Coloring) -> i64 {
    let st = coloring_stats(c);
    match kind {
        BoundKind::F => st.sum_s / 2,
        BoundKind::FHat => st.sum_fhat_directed,
        BoundKind::Mu => st.blocking as i64,
    }
}

/// Converts an integer count to the reported value.
pub fn count_value(kind: BoundKind, n: u32, count: i64) -> Rational64 {
    match kind {
        BoundKind::Mu => Rational64::from_integer(count),
        _ => Rational64::new(count, 1 << (n - 1)),
    }
}

/// Inclusive range of meaningful counts.
pub fn count_range(kind: BoundKind, n: u32) -> (i64, i64) {
    let half = 1i64 << (n - 1);
    match kind {
        BoundKind::F => (0, half * (n as i64 - 1)),
        BoundKind::FHat => (-half, half * (n as i64 - 1)),
        BoundKind::Mu => (0, half),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Probe {
    pub count: i64,
    pub sat: bool,
    pub vars: usize,
    pub clauses: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub n: u32,
    /// Largest satisfiable count.
    pub count: i64,
    #[serde(serialize_with = "crate::oracle::ser_ratio")]
    pub value: Rational64,
    /// Coloring from the last satisfiable probe, if any probe was satisfiable.
    #[serde(skip)]
    pub witness: Option<Coloring>,
    pub probes: Vec<Probe>,
}

/// Binary search for the largest satisfiable count.
///
/// Count 0 is satisfiable for every kind (a monochromatic coloring), so the
/// search starts there without a probe. Each satisfiable model is decoded
/// and checked against the oracle; a shortfall is reported as an error.
pub fn compute_bound<S>(kind: BoundKind, n: u32, cfg: &EncodingConfig, mut solve: S) -> Result<BoundResult>
where
    S: FnMut(&CnfFormula) -> Result<Outcome>,
{
    check_n(n)?;
    let (_, max) = count_range(kind, n);
    let (mut lo, mut hi) = (0i64, max + 1);
    let mut witness = None;
    let mut probes = Vec::new();
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let enc = build_bound(kind, n, mid, cfg)?;
        let start = Instant::now();
        let outcome = solve(&enc.formula)?;
        let seconds = start.elapsed().as_secs_f64();
        let sat = match outcome {
            Outcome::Sat(model) => {
                let c = enc.decode_coloring(&model)?;
                let got = witness_count(kind, &c);
                if got < mid {
                    return Err(Error::Witness { want: mid, got });
                }
                witness = Some(c);
                true
            }
            Outcome::Unsat => false,
            Outcome::Unknown => {
                return Err(Error::InvalidArgument(format!("solver gave no verdict for {kind} count {mid}")));
            }
        };
        probes.push(Probe {
            count: mid,
            sat,
            vars: enc.formula.num_vars() as usize,
            clauses: enc.formula.num_clauses(),
            seconds,
        });
        if sat {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BoundResult { kind, n, count: lo, value: count_value(kind, n, lo), witness, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::Conjecture;
    use crate::hypercube::Vertex;
    use crate::oracle::all_profiles;
    use crate::solver::dpll::{solve, Solver};

    fn cfg(n: u32) -> EncodingConfig {
        EncodingConfig::new(n, Conjecture::OneChangeGeodesic)
    }

    fn sat(e: &BoundEncoding) -> bool {
        matches!(solve(&e.formula), Outcome::Sat(_))
    }

    #[test]
    fn threshold_parsing_and_rounding() {
        let t: Threshold = "21/16".parse().unwrap();
        assert_eq!(t.count(4), 11);
        assert_eq!(t.exact_count(4), None);
        assert_eq!("0.875".parse::<Threshold>().unwrap(), Threshold::new(7, 8).unwrap());
        assert_eq!("1".parse::<Threshold>().unwrap().count(3), 4);
        assert_eq!(Threshold::new(-1, 2).unwrap().count(3), -2);
        assert!(Threshold::new(1, 3).is_err());
        assert!("0.1".parse::<Threshold>().is_err());
    }

    #[test]
    fn f3_is_one() {
        let one = Threshold::integer(1);
        assert!(sat(&build_f(3, one, &cfg(3)).unwrap()));
        assert!(!sat(&build_f(3, Threshold::new(9, 8).unwrap(), &cfg(3)).unwrap()));
        assert!(sat(&build_f(3, Threshold::integer(0), &cfg(3)).unwrap()));
    }

    #[test]
    fn fhat3_is_half() {
        assert!(sat(&build_fhat(3, Threshold::new(1, 2).unwrap(), &cfg(3)).unwrap()));
        assert!(!sat(&build_fhat(3, Threshold::new(5, 8).unwrap(), &cfg(3)).unwrap()));
    }

    #[test]
    fn mu_small() {
        assert!(!sat(&build_mu(2, 1, &cfg(2)).unwrap()));
        assert!(sat(&build_mu(3, 1, &cfg(3)).unwrap()));
        assert!(!sat(&build_mu(3, 2, &cfg(3)).unwrap()));
        assert!(build_mu(3, 5, &cfg(3)).is_err());
    }

    #[test]
    fn search_matches_oracle_at_n3() {
        let s = |f: &CnfFormula| Ok(solve(f));
        let r = compute_bound(BoundKind::F, 3, &cfg(3), s).unwrap();
        assert_eq!(r.value, Rational64::from_integer(1));
        let r = compute_bound(BoundKind::FHat, 3, &cfg(3), s).unwrap();
        assert_eq!(r.value, Rational64::new(1, 2));
        let r = compute_bound(BoundKind::Mu, 3, &cfg(3), s).unwrap();
        assert_eq!(r.count, 1);
        assert!(witness_count(BoundKind::Mu, r.witness.as_ref().unwrap()) >= 1);
    }

    #[test]
    fn symmetry_breaking_does_not_change_optima_at_n3() {
        let s = |f: &CnfFormula| Ok(solve(f));
        for kind in [BoundKind::F, BoundKind::FHat, BoundKind::Mu] {
            let plain = compute_bound(kind, 3, &EncodingConfig::plain(3, Conjecture::OneChangeGeodesic), s).unwrap();
            let full = compute_bound(kind, 3, &cfg(3), s).unwrap();
            assert_eq!(plain.count, full.count, "{kind}");
        }
    }

    /// For each coloring of Q_3, unit propagation from the fixed edges makes
    /// `p^x_{u,ū,i}` true exactly from level `s^x_last` on.
    #[test]
    fn level_variables_match_dp_on_every_q3_coloring() {
        let n = 3;
        let c0 = core(n, n - 1).unwrap();
        let mut solver = Solver::new(&c0.f);
        let mask = full_mask(n);
        for idx in 0..4096u64 {
            let col = Coloring::from_index(n, idx).unwrap();
            let implied = solver.implied(&c0.edges.assumptions_for(&col)).expect("no conflict");
            let truth: std::collections::HashSet<Lit> = implied.into_iter().collect();
            let profiles = all_profiles(&col);
            for &u in &c0.sources {
                let p = profiles[u as usize];
                for (color, want) in [(Color::Red, p.s_last_red), (Color::Blue, p.s_last_blue)] {
                    let first = (0..n).find(|&i| truth.contains(&c0.levels.get(u, !u & mask, color, i))).unwrap_or(n);
                    assert_eq!(first, want, "coloring {idx}, u = {}", Vertex::new(u, n).unwrap());
                }
            }
        }
    }
}
