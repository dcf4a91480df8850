use super::EdgeLits;
use crate::cnf::{encode_lex_leader, sequential_counter, CnfFormula, CounterDirection, Lit, LexLeaderSpec, VarKey};
use crate::error::Result;
use crate::hypercube::{axis_bit, canonical_edge_ordering, generating_symmetries, num_vertices, Symmetry, SymmetrySet};

/// Adds `c ⪯_lex c∘S` for every default generating symmetry `S`, over the
/// canonical edge ordering. Returns the number of clauses added.
pub fn inject_symmetry_breaking(f: &mut CnfFormula, n: u32, max_comp: usize) -> Result<usize> {
    let edges = EdgeLits::from_formula(f, n)?;
    let syms = generating_symmetries(n, SymmetrySet::default());
    Ok(inject_symmetry_breaking_with(f, &edges, &syms, max_comp))
}

/// As [`inject_symmetry_breaking`] with an explicit symmetry list.
pub fn inject_symmetry_breaking_with(f: &mut CnfFormula, edges: &EdgeLits, syms: &[Symmetry], max_comp: usize) -> usize {
    if max_comp == 0 {
        return 0;
    }
    let before = f.num_clauses();
    let order = canonical_edge_ordering(edges.dim()).expect("dimension already validated");
    let left: Vec<Lit> = order.as_slice().iter().map(|&e| edges.lit(e)).collect();
    for s in syms {
        let right: Vec<Lit> = order.as_slice().iter().map(|&e| edges.lit(s.apply_edge_index(e))).collect();
        let spec = LexLeaderSpec { left: left.clone(), right, max_comp };
        encode_lex_leader(f, &spec);
    }
    f.num_clauses() - before
}

/// Forces `0⃗` to have the smallest red degree: a counter per vertex over
/// its incident edges (ascending axis), outputs `d_{v,i}`, and
/// `d_{0⃗,i} → d_{v,i}`. Returns the number of clauses added.
pub fn inject_red_degree_minimum(f: &mut CnfFormula, edges: &EdgeLits) -> usize {
    let before = f.num_clauses();
    let n = edges.dim();
    let width = n as usize;
    let mut zero_outputs = Vec::new();
    for v in 0..num_vertices(n) as u32 {
        let lits: Vec<Lit> = (1..=n).map(|a| edges.between(v, v ^ 1 << axis_bit(n, a))).collect();
        let outs: Vec<Lit> = (1..=n).map(|i| f.var(VarKey::Degree { v, i }).pos()).collect();
        let dir = if v == 0 { CounterDirection::Up } else { CounterDirection::Down };
        sequential_counter(f, &lits, width, dir, Some(&outs));
        if v == 0 {
            zero_outputs = outs;
        } else {
            for (d0, dv) in zero_outputs.iter().zip(&outs) {
                f.add_clause([!*d0, *dv]);
            }
        }
    }
    f.num_clauses() - before
}
