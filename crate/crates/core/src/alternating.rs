//! The alternating coloring `c_n` and the closed forms around it.

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercube::{check_dim, edge_endpoints, Color, Coloring, Vertex};

/// The edge flipping bit `i` at `x` is red iff the other bits have odd
/// parity. Every edge at `0⃗` is blue.
pub fn alternating_coloring(n: u32) -> Result<Coloring> {
    check_dim(n)?;
    if n < 2 {
        return Err(Error::InvalidArgument("the alternating coloring needs n ≥ 2".into()));
    }
    Coloring::from_fn(n, |e| {
        let (lo, _) = edge_endpoints(n, e);
        Color::from_bit(lo.count_ones() % 2 == 1)
    })
}

/// `β(v) = 2·|v| − n`.
pub fn beta(v: Vertex) -> i32 {
    2 * v.weight() as i32 - v.dim() as i32
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `g(n) = Σ_{i=0}^{(n−3)/2} C(n, i)` for odd `n ≥ 3`.
pub fn g(n: u32) -> Result<u128> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidArgument(format!("g is defined for odd n ≥ 3, got {n}")));
    }
    Ok((0..=(n as u64 - 3) / 2).map(|i| binomial(n as u64, i)).sum())
}

/// `h(k) = 2^{2k} − C(2k+1, k)`.
pub fn h(k: u32) -> u128 {
    (1u128 << (2 * k)) - binomial(2 * k as u64 + 1, k as u64)
}

/// `g(n)` for odd `n`; for even `n`, `2·g(n−1)` when `even_doubling` is
/// set and an error otherwise.
pub fn blocking_count_formula(n: u32, even_doubling: bool) -> Result<u128> {
    if n % 2 == 1 {
        return g(n);
    }
    if !even_doubling {
        return Err(Error::InvalidArgument(format!("n = {n} is even; enable the doubling convention")));
    }
    Ok(2 * g(n - 1)?)
}

/// `Σ_ℓ |k − 2ℓ|·C(k, ℓ)` summed term by term.
pub fn abs_balance_sum(k: u32) -> u128 {
    (0..=k as u64)
        .map(|l| (k as i64 - 2 * l as i64).unsigned_abs() as u128 * binomial(k as u64, l))
        .sum()
}

/// Closed form `2k·C(k−1, ⌊(k−1)/2⌋)` of [`abs_balance_sum`].
pub fn abs_balance_closed(k: u32) -> u128 {
    if k == 0 {
        return 0;
    }
    2 * k as u128 * binomial(k as u64 - 1, (k as u64 - 1) / 2)
}

/// `L(k) = 2^{−k}·Σ_ℓ |k − 2ℓ|·C(k, ℓ) − 1`, the average of `|β(v)| − 1`.
pub fn f_lower_bound(k: u32) -> Result<Rational64> {
    if !(2..=60).contains(&k) {
        return Err(Error::InvalidArgument(format!("k = {k} outside [2, 60]")));
    }
    let s = abs_balance_closed(k);
    let num = i64::try_from(s).map_err(|_| Error::InvalidArgument("sum overflows".into()))?;
    Ok(Rational64::new(num, 1i64 << k) - 1)
}

/// Side-by-side view of `L(k)` and the closing inequality of the
/// asymptotic argument, `f(k) > √k/√2 − (k+1)/2^k`.
#[derive(Clone, Debug, Serialize)]
pub struct SqrtChainRow {
    pub k: u32,
    pub lower_bound: f64,
    pub claimed: f64,
    /// Known exact `f(k)`, if any.
    pub known_f: Option<f64>,
    /// The claim exceeds the known value, so it cannot be a valid lower bound.
    pub contradicted: bool,
    /// `L(k) ≥ 0.7·√k`.
    pub meets_point_seven: bool,
}

/// Exact `f` values known for small `k`.
pub const KNOWN_F: [(u32, Rational64); 4] = [
    (3, Rational64::new_raw(1, 1)),
    (4, Rational64::new_raw(5, 4)),
    (5, Rational64::new_raw(5, 4)),
    (6, Rational64::new_raw(3, 2)),
];

pub fn sqrt_chain_report(ks: impl IntoIterator<Item = u32>) -> Result<Vec<SqrtChainRow>> {
    ks.into_iter()
        .map(|k| {
            let l = f_lower_bound(k)?;
            let lower_bound = *l.numer() as f64 / *l.denom() as f64;
            let claimed = (k as f64 / 2.0).sqrt() - (k as f64 + 1.0) / 2f64.powi(k as i32);
            let known_f = KNOWN_F
                .iter()
                .find(|(kk, _)| *kk == k)
                .map(|(_, r)| *r.numer() as f64 / *r.denom() as f64);
            Ok(SqrtChainRow {
                k,
                lower_bound,
                claimed,
                known_f,
                contradicted: known_f.is_some_and(|f| claimed > f),
                meets_point_seven: lower_bound >= 0.7 * (k as f64).sqrt(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::{antipodal_edge_index, edge_index, num_edges};
    use crate::oracle::{coloring_stats, min_changes_any_path};

    #[test]
    fn alternating_coloring_layers() {
        let c = alternating_coloring(4).unwrap();
        let zero = Vertex::zero(4).unwrap();
        assert_eq!(c.red_degree(zero), 0);
        let a = Vertex::parse("0001").unwrap().bits();
        let b = Vertex::parse("0011").unwrap().bits();
        assert!(c.between(a, b).is_red());
    }

    #[test]
    fn alternating_is_antipodal_iff_n_even() {
        for n in 2..=6 {
            let c = alternating_coloring(n).unwrap();
            let anti = (0..num_edges(n)).all(|e| c.is_red(e) != c.is_red(antipodal_edge_index(n, e)));
            assert_eq!(anti, n % 2 == 0, "n = {n}");
            assert_eq!(c.is_antipodal(), n % 2 == 0);
        }
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta(Vertex::parse("00000").unwrap()), -5);
        assert_eq!(beta(Vertex::parse("0011").unwrap()), 0);
        assert_eq!(beta(Vertex::parse("1110").unwrap()), 2);
        let v = Vertex::parse("10110").unwrap();
        assert_eq!(beta(v.antipodal()), -beta(v));
    }

    #[test]
    fn g_and_h() {
        assert_eq!(g(3).unwrap(), 1);
        assert_eq!(g(5).unwrap(), 6);
        assert_eq!(h(2), 6);
        for k in 1..=12 {
            assert_eq!(g(2 * k + 1).unwrap(), h(k), "k = {k}");
        }
        assert!(blocking_count_formula(4, false).is_err());
        assert_eq!(blocking_count_formula(4, true).unwrap(), 2);
    }

    #[test]
    fn blocking_pairs_of_alternating_coloring() {
        for n in [3, 5, 7] {
            let st = coloring_stats(&alternating_coloring(n).unwrap());
            assert_eq!(st.blocking as u128, g(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn any_path_lower_bound_on_alternating() {
        for n in 2..=6 {
            let c = alternating_coloring(n).unwrap();
            for v in 0..1u32 << n {
                let v = Vertex::new(v, n).unwrap();
                let k = min_changes_any_path(&c, v).unwrap() as i32;
                assert!(k >= beta(v).abs() - 1, "n = {n}, v = {v}");
            }
        }
        let c5 = alternating_coloring(5).unwrap();
        assert!(min_changes_any_path(&c5, Vertex::zero(5).unwrap()).unwrap() >= 4);
    }

    #[test]
    fn balance_sum_identity() {
        for k in (1..=15).step_by(2) {
            assert_eq!(abs_balance_sum(k), abs_balance_closed(k));
        }
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(f_lower_bound(3).unwrap(), Rational64::new(1, 2));
        assert_eq!(f_lower_bound(5).unwrap(), Rational64::new(7, 8));
        for (k, f) in KNOWN_F {
            assert!(f_lower_bound(k).unwrap() <= f);
        }
    }

    #[test]
    fn edge_color_depends_on_other_bits_only() {
        let n = 5;
        let c = alternating_coloring(n).unwrap();
        for v in 0..1u32 << n {
            for bit in 0..n {
                let others = (v & !(1 << bit)).count_ones() % 2 == 1;
                assert_eq!(c.is_red(edge_index(n, v, bit)), others);
            }
        }
    }
}
