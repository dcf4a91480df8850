use super::{CnfFormula, Lit};

/// `left ≤_lex right` over the first `max_comp` informative positions.
#[derive(Clone, Debug)]
pub struct LexLeaderSpec {
    pub left: Vec<Lit>,
    pub right: Vec<Lit>,
    pub max_comp: usize,
}

/// Encodes `left ≤_lex right` (false < true) with an equality chain.
///
/// Positions with identical literals carry no information and are dropped
/// before truncation. `m` surviving positions cost `3m − 2` clauses.
/// Returns the number of compared positions.
pub fn encode_lex_leader(f: &mut CnfFormula, spec: &LexLeaderSpec) -> usize {
    assert_eq!(spec.left.len(), spec.right.len(), "lex sequences differ in length");
    let pairs: Vec<(Lit, Lit)> = spec
        .left
        .iter()
        .zip(&spec.right)
        .filter(|(x, y)| x != y)
        .map(|(&x, &y)| (x, y))
        .take(spec.max_comp)
        .collect();
    let m = pairs.len();
    // eq is "all earlier positions equal"; None means the empty prefix
    let mut eq: Option<Lit> = None;
    for (i, &(x, y)) in pairs.iter().enumerate() {
        let guard: Vec<Lit> = eq.map(|e| !e).into_iter().collect();
        f.add_clause(guard.iter().copied().chain([!x, y]));
        if i + 1 < m {
            let next = f.fresh("lex").pos();
            f.add_clause(guard.iter().copied().chain([!x, next]));
            f.add_clause(guard.iter().copied().chain([y, next]));
            eq = Some(next);
        }
    }
    m
}
