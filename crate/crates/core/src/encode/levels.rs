use super::EdgeLits;
use crate::cnf::{CnfFormula, Lit, VarKey};
use crate::hypercube::{hamming, num_vertices, Color};

/// Which walks the level variables follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reach {
    /// Each step moves one further away from the start vertex.
    Geodesic,
    /// Any step that does not return to the start or its neighborhood.
    Path,
}

/// Dense table of `p^x_{u,v,i}`.
#[derive(Clone, Debug)]
pub struct LevelVars {
    n: u32,
    levels: usize,
    src_index: Vec<u32>,
    table: Vec<Lit>,
}

impl LevelVars {
    #[inline]
    fn slot(&self, u: u32, v: u32, color: Color, level: u32) -> usize {
        let i = self.src_index[u as usize];
        assert!(i != u32::MAX, "vertex {u} is not a path source");
        let nv = num_vertices(self.n);
        ((i as usize * nv + v as usize) * 2 + color.index()) * self.levels + level as usize
    }

    /// `p^color_{u,v,level}`; panics if `u` is not a source or `u = v`.
    pub fn get(&self, u: u32, v: u32, color: Color, level: u32) -> Lit {
        assert!(u != v, "no level variable for u = v");
        assert!((level as usize) < self.levels, "level {level} out of range");
        self.table[self.slot(u, v, color, level)]
    }

    pub fn max_level(&self) -> u32 {
        self.levels as u32 - 1
    }
}

/// Allocates `p^x_{u,v,i}` for every source `u`, `v ≠ u`, both colors and
/// `i ∈ [0, max_level]` (in that nesting order) and emits the base,
/// same-color, color-switch and monotonicity clauses.
pub fn encode_levels(f: &mut CnfFormula, edges: &EdgeLits, sources: &[u32], max_level: u32, reach: Reach) -> LevelVars {
    let n = edges.dim();
    let nv = num_vertices(n);
    let levels = max_level as usize + 1;
    let mut src_index = vec![u32::MAX; nv];
    let mut table = vec![Lit::from_dimacs(1); sources.len() * nv * 2 * levels];
    let mut lv = LevelVars { n, levels, src_index: Vec::new(), table: Vec::new() };
    for (i, &u) in sources.iter().enumerate() {
        src_index[u as usize] = i as u32;
    }
    lv.src_index = src_index;
    for &u in sources {
        for v in (0..nv as u32).filter(|&v| v != u) {
            for color in [Color::Red, Color::Blue] {
                for level in 0..=max_level {
                    let slot = lv.slot(u, v, color, level);
                    table[slot] = f.var(VarKey::Level { u, v, color, level }).pos();
                }
            }
        }
    }
    lv.table = table;

    use Color::{Blue, Red};
    for &u in sources {
        for bit in 0..n {
            let v = u ^ 1 << bit;
            let r = edges.between(u, v);
            f.add_clause([!r, lv.get(u, v, Red, 0)]);
            f.add_clause([r, lv.get(u, v, Blue, 0)]);
        }
        for v in (0..nv as u32).filter(|&v| v != u) {
            let d = hamming(u, v);
            for bit in 0..n {
                let w = v ^ 1 << bit;
                let dw = hamming(u, w);
                let ok = match reach {
                    Reach::Geodesic => dw == d + 1,
                    Reach::Path => w != u && dw != 1,
                };
                if !ok {
                    continue;
                }
                let r = edges.between(v, w);
                for i in 0..=max_level {
                    f.add_clause([!lv.get(u, v, Red, i), !r, lv.get(u, w, Red, i)]);
                    f.add_clause([!lv.get(u, v, Blue, i), r, lv.get(u, w, Blue, i)]);
                    if i > 0 {
                        f.add_clause([!lv.get(u, v, Red, i - 1), r, lv.get(u, w, Blue, i)]);
                        f.add_clause([!lv.get(u, v, Blue, i - 1), !r, lv.get(u, w, Red, i)]);
                    }
                }
            }
        }
        for v in (0..nv as u32).filter(|&v| v != u) {
            for color in [Red, Blue] {
                for i in 1..=max_level {
                    f.add_clause([!lv.get(u, v, color, i - 1), lv.get(u, v, color, i)]);
                }
            }
        }
    }
    lv
}
