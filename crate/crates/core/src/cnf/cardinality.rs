//! Cardinality encodings: sequential counters and the modulo totalizer.

use super::{CnfFormula, Lit};

/// Registers of a Sinz sequential counter; `registers[i][j]` means "at least
/// `j + 1` of the first `i + 1` inputs are true".
#[derive(Clone, Debug, Default)]
pub struct SeqCounter {
    pub registers: Vec<Vec<Lit>>,
}

/// `Σ lits ≤ k` via the sequential counter.
pub fn at_most_k_seq(f: &mut CnfFormula, lits: &[Lit], k: usize) -> SeqCounter {
    let n = lits.len();
    if k >= n {
        return SeqCounter::default();
    }
    if k == 0 {
        for &x in lits {
            f.add_unit(!x);
        }
        return SeqCounter::default();
    }
    let mut regs: Vec<Vec<Lit>> = Vec::with_capacity(n - 1);
    for (i, &x) in lits.iter().enumerate().take(n - 1) {
        let row: Vec<Lit> = (0..k).map(|_| f.fresh("seq").pos()).collect();
        if i == 0 {
            f.add_clause([!x, row[0]]);
            for &s in &row[1..] {
                f.add_unit(!s);
            }
        } else {
            let prev = &regs[i - 1];
            f.add_clause([!x, row[0]]);
            f.add_clause([!prev[0], row[0]]);
            for j in 1..k {
                f.add_clause([!x, !prev[j - 1], row[j]]);
                f.add_clause([!prev[j], row[j]]);
            }
            f.add_clause([!x, !prev[k - 1]]);
        }
        regs.push(row);
    }
    f.add_clause([!lits[n - 1], !regs[n - 2][k - 1]]);
    SeqCounter { registers: regs }
}

/// `Σ lits ≥ k`, as at-most `N − k` over the negated inputs.
pub fn at_least_k_seq(f: &mut CnfFormula, lits: &[Lit], k: usize) -> SeqCounter {
    if k == 0 {
        return SeqCounter::default();
    }
    if k > lits.len() {
        f.add_clause([]);
        return SeqCounter::default();
    }
    let neg: Vec<Lit> = lits.iter().map(|&l| !l).collect();
    at_most_k_seq(f, &neg, lits.len() - k)
}

/// Which implication direction a [`sequential_counter`] enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterDirection {
    /// Output `i` is forced true whenever at least `i` inputs are true.
    Up,
    /// Output `i` may be true only if at least `i` inputs are true.
    Down,
}

#[derive(Clone, Copy)]
enum Term {
    False,
    L(Lit),
}

/// One-directional unary counter over `lits` with `width` outputs.
///
/// When `outputs` is given its literals become the final row, otherwise
/// fresh ones are allocated. Returns the final row.
pub fn sequential_counter(
    f: &mut CnfFormula,
    lits: &[Lit],
    width: usize,
    dir: CounterDirection,
    outputs: Option<&[Lit]>,
) -> Vec<Lit> {
    let n = lits.len();
    if let Some(o) = outputs {
        assert_eq!(o.len(), width, "output row has wrong width");
    }
    if n == 0 {
        let out: Vec<Lit> = match outputs {
            Some(o) => o.to_vec(),
            None => (0..width).map(|_| f.fresh("cnt").pos()).collect(),
        };
        if dir == CounterDirection::Down {
            for &o in &out {
                f.add_unit(!o);
            }
        }
        return out;
    }
    // prev[i] is the register "at least i+1 among the first j inputs"
    let mut prev: Vec<Term> = vec![Term::False; width];
    let mut last = Vec::new();
    for (j, &x) in lits.iter().enumerate() {
        let row: Vec<Lit> = match outputs {
            Some(o) if j == n - 1 => o.to_vec(),
            _ => (0..width).map(|_| f.fresh("cnt").pos()).collect(),
        };
        for i in 0..width {
            let s = row[i];
            let below = if i == 0 { None } else { Some(prev[i - 1]) };
            match dir {
                CounterDirection::Up => {
                    if let Term::L(p) = prev[i] {
                        f.add_clause([!p, s]);
                    }
                    match below {
                        None => f.add_clause([!x, s]),
                        Some(Term::L(b)) => f.add_clause([!x, !b, s]),
                        Some(Term::False) => {}
                    }
                }
                CounterDirection::Down => {
                    let mut c1 = vec![!s, x];
                    if let Term::L(p) = prev[i] {
                        c1.push(p);
                    }
                    f.add_clause(c1);
                    match below {
                        None => {}
                        Some(Term::L(b)) => {
                            let mut c2 = vec![!s, b];
                            if let Term::L(p) = prev[i] {
                                c2.push(p);
                            }
                            f.add_clause(c2);
                        }
                        Some(Term::False) => match prev[i] {
                            Term::L(p) => f.add_clause([!s, p]),
                            Term::False => f.add_unit(!s),
                        },
                    }
                }
            }
        }
        prev = row.iter().map(|&l| Term::L(l)).collect();
        last = row;
    }
    last
}

/// Root outputs of a modulo totalizer: the represented count is
/// `modulus · q + r` where `q` is the largest true index of `upper` and
/// `r` the largest true index of `lower` (both 1-based, 0 if none).
#[derive(Clone, Debug)]
pub struct ModTotalizer {
    pub modulus: usize,
    pub upper: Vec<Lit>,
    pub lower: Vec<Lit>,
}

struct Node {
    count: usize,
    lower: Vec<Lit>,
    upper: Vec<Lit>,
}

/// Smallest power of two at least `√bound`, and never below 2.
pub(crate) fn modulus_for(bound: usize) -> usize {
    let mut p = 2;
    while p * p < bound {
        p *= 2;
    }
    p
}

fn build(f: &mut CnfFormula, lits: &[Lit], p: usize) -> Node {
    if lits.len() == 1 {
        return Node {
            count: 1,
            lower: vec![lits[0]],
            upper: Vec::new(),
        };
    }
    let mid = lits.len() / 2;
    let a = build(f, &lits[..mid], p);
    let b = build(f, &lits[mid..], p);
    let count = a.count + b.count;
    let lower: Vec<Lit> = (0..(p - 1).min(count)).map(|_| f.fresh("mtot").pos()).collect();
    let upper: Vec<Lit> = (0..count / p).map(|_| f.fresh("mtot").pos()).collect();
    let carry = (a.lower.len() + b.lower.len() >= p).then(|| f.fresh("mtot").pos());

    let ante = |v: &[Lit], i: usize| if i == 0 { None } else { Some(!v[i - 1]) };
    for i in 0..=a.lower.len() {
        for j in 0..=b.lower.len() {
            let s = i + j;
            if s == 0 {
                continue;
            }
            let base: Vec<Lit> = ante(&a.lower, i).into_iter().chain(ante(&b.lower, j)).collect();
            if s < p {
                let mut c = base.clone();
                c.extend(carry);
                c.push(lower[s - 1]);
                f.add_clause(c);
            } else {
                let c = carry.expect("carry exists when remainders overflow");
                let mut c1 = base.clone();
                c1.push(c);
                f.add_clause(c1);
                if s > p {
                    let mut c2 = base;
                    c2.push(!c);
                    c2.push(lower[s - p - 1]);
                    f.add_clause(c2);
                }
            }
        }
    }
    for i in 0..=a.upper.len() {
        for j in 0..=b.upper.len() {
            let base: Vec<Lit> = ante(&a.upper, i).into_iter().chain(ante(&b.upper, j)).collect();
            let t = i + j;
            if t >= 1 {
                let mut c = base.clone();
                c.push(upper[t - 1]);
                f.add_clause(c);
            }
            if let Some(cy) = carry {
                let mut c = base;
                c.push(!cy);
                if let Some(&u) = upper.get(t) {
                    c.push(u);
                }
                f.add_clause(c);
            }
        }
    }
    Node { count, lower, upper }
}

/// `Σ lits ≤ k` via the modulo totalizer. Returns `None` when the bound is
/// trivial or degenerates to unit clauses.
pub fn at_most_k_mtot(f: &mut CnfFormula, lits: &[Lit], k: usize) -> Option<ModTotalizer> {
    if k >= lits.len() {
        return None;
    }
    if k == 0 {
        for &x in lits {
            f.add_unit(!x);
        }
        return None;
    }
    let p = modulus_for(k);
    let root = build(f, lits, p);
    let (qk, rk) = (k / p, k % p);
    for &u in root.upper.iter().skip(qk) {
        f.add_unit(!u);
    }
    let gate = if qk == 0 { None } else { root.upper.get(qk - 1).copied() };
    for &l in root.lower.iter().skip(rk) {
        match gate {
            Some(g) => f.add_clause([!g, !l]),
            None => f.add_unit(!l),
        }
    }
    Some(ModTotalizer {
        modulus: p,
        upper: root.upper,
        lower: root.lower,
    })
}

/// `Σ lits ≥ k` via the modulo totalizer over the negated inputs.
pub fn at_least_k_mtot(f: &mut CnfFormula, lits: &[Lit], k: usize) -> Option<ModTotalizer> {
    if k == 0 {
        return None;
    }
    if k > lits.len() {
        f.add_clause([]);
        return None;
    }
    let neg: Vec<Lit> = lits.iter().map(|&l| !l).collect();
    at_most_k_mtot(f, &neg, lits.len() - k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Var;
    use crate::solver::dpll::{solve_with_assumptions, Outcome};

    /// Is the formula satisfiable once the first `n` variables are fixed to `bits`?
    fn sat_under(f: &CnfFormula, n: usize, bits: u32) -> bool {
        let assumptions: Vec<Lit> = (0..n).map(|i| Var::new(i as u32 + 1).lit(bits >> i & 1 == 1)).collect();
        matches!(solve_with_assumptions(f, &assumptions, None), Outcome::Sat(_))
    }

    fn inputs(f: &mut CnfFormula, n: usize) -> Vec<Lit> {
        (0..n).map(|_| f.new_var().pos()).collect()
    }

    #[test]
    fn sequential_at_most_exhaustive() {
        for n in 1..=6 {
            for k in 0..=n + 1 {
                let mut f = CnfFormula::new();
                let xs = inputs(&mut f, n);
                at_most_k_seq(&mut f, &xs, k);
                for bits in 0..1u32 << n {
                    assert_eq!(sat_under(&f, n, bits), bits.count_ones() as usize <= k, "n={n} k={k} bits={bits:b}");
                }
            }
        }
    }

    #[test]
    fn totalizer_exhaustive() {
        for n in 1..=8 {
            for k in 0..=n + 1 {
                let mut f = CnfFormula::new();
                let xs = inputs(&mut f, n);
                at_least_k_mtot(&mut f, &xs, k);
                let mut g = CnfFormula::new();
                let ys = inputs(&mut g, n);
                at_most_k_mtot(&mut g, &ys, k);
                for bits in 0..1u32 << n {
                    let c = bits.count_ones() as usize;
                    assert_eq!(sat_under(&f, n, bits), c >= k, "≥ n={n} k={k} bits={bits:b}");
                    assert_eq!(sat_under(&g, n, bits), c <= k, "≤ n={n} k={k} bits={bits:b}");
                }
            }
        }
    }

    #[test]
    fn totalizer_edge_cases() {
        let mut f = CnfFormula::new();
        let xs = inputs(&mut f, 4);
        assert!(at_least_k_mtot(&mut f, &xs, 4).is_none());
        assert_eq!(f.num_clauses(), 4);
        assert!(f.clauses().all(|c| c.len() == 1 && c[0].is_positive()));

        let mut g = CnfFormula::new();
        let ys = inputs(&mut g, 4);
        at_least_k_mtot(&mut g, &ys, 5);
        assert!(g.has_empty_clause());

        let mut h = CnfFormula::new();
        let zs = inputs(&mut h, 4);
        at_least_k_mtot(&mut h, &zs, 0);
        assert_eq!(h.num_clauses(), 0);
    }

    #[test]
    fn modulus_choice() {
        assert_eq!(modulus_for(1), 2);
        assert_eq!(modulus_for(4), 2);
        assert_eq!(modulus_for(5), 4);
        assert_eq!(modulus_for(16), 4);
        assert_eq!(modulus_for(17), 8);
    }

    fn counter_semantics(dir: CounterDirection) {
        for n in 1..=5 {
            let mut f = CnfFormula::new();
            let xs = inputs(&mut f, n);
            let out = sequential_counter(&mut f, &xs, n, dir, None);
            for bits in 0..1u32 << n {
                let c = bits.count_ones() as usize;
                for (i, &o) in out.iter().enumerate() {
                    let mut g = f.clone();
                    g.add_unit(match dir {
                        CounterDirection::Up => !o,
                        CounterDirection::Down => o,
                    });
                    let ok = sat_under(&g, n, bits);
                    match dir {
                        CounterDirection::Up => assert_eq!(ok, c < i + 1),
                        CounterDirection::Down => assert_eq!(ok, c > i),
                    }
                }
            }
        }
    }

    #[test]
    fn upward_counter_forces_outputs() {
        counter_semantics(CounterDirection::Up);
    }

    #[test]
    fn downward_counter_bounds_outputs() {
        counter_semantics(CounterDirection::Down);
    }

    #[test]
    fn counter_accepts_given_outputs() {
        let mut f = CnfFormula::new();
        let xs = inputs(&mut f, 3);
        let outs: Vec<Lit> = (0..3).map(|_| f.new_var().pos()).collect();
        let got = sequential_counter(&mut f, &xs, 3, CounterDirection::Down, Some(&outs));
        assert_eq!(got, outs);
        let mut all: Vec<Lit> = xs.clone();
        all.extend(&outs);
        assert!(matches!(solve_with_assumptions(&f, &all, None), Outcome::Sat(_)));
        all[0] = !all[0];
        assert!(matches!(solve_with_assumptions(&f, &all, None), Outcome::Unsat));
    }
}
