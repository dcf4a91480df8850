//! SAT-free ground truth: color-change dynamic programs and exhaustive sweeps.

use std::collections::VecDeque;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercube::{
    check_dim, edge_index, full_mask, generating_symmetries, num_edges, num_vertices, Coloring, Symmetry, SymmetrySet,
    Vertex,
};

/// Minimum color changes from `u` to `ū` along geodesics.
///
/// `s_red`/`s_blue` condition on the first edge (at `u`), `s_last_red` /
/// `s_last_blue` on the last edge (at `ū`). An impossible condition takes
/// the sentinel value `n`; real values never exceed `n − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChangeProfile {
    pub s: u32,
    pub s_red: u32,
    pub s_blue: u32,
    pub s_last_red: u32,
    pub s_last_blue: u32,
}

impl ChangeProfile {
    /// `s' = max(s_red, s_blue)`.
    pub fn s_prime(&self) -> u32 {
        self.s_red.max(self.s_blue)
    }

    /// `min(s, s' − 1)`.
    pub fn fhat_term(&self) -> i64 {
        (self.s as i64).min(self.s_prime() as i64 - 1)
    }

    /// `min(s, s'_last − 1)` with the choice made at the far end.
    pub fn fhat_term_last(&self) -> i64 {
        (self.s as i64).min(self.s_last_red.max(self.s_last_blue) as i64 - 1)
    }
}

const INF: u8 = u8::MAX;

/// DP over `x = v ⊕ u` in increasing order; state (first color, last color).
fn profile_with(n: u32, u: u32, red: &impl Fn(usize) -> bool, dp: &mut Vec<[[u8; 2]; 2]>) -> ChangeProfile {
    let nv = num_vertices(n);
    dp.clear();
    dp.resize(nv, [[INF; 2]; 2]);
    let color = |a: u32, b: u32| -> usize { usize::from(!red(edge_index(n, a, (a ^ b).trailing_zeros()))) };
    for bit in 0..n {
        let c = color(u, u ^ 1 << bit);
        dp[1 << bit][c][c] = 0;
    }
    for x in 1..nv as u32 {
        let here = dp[x as usize];
        if here == [[INF; 2]; 2] {
            continue;
        }
        let v = u ^ x;
        let mut free = !x & full_mask(n);
        while free != 0 {
            let bit = free.trailing_zeros();
            free &= free - 1;
            let y = x | 1 << bit;
            let c = color(v, v ^ 1 << bit);
            for first in 0..2 {
                for last in 0..2 {
                    let cost = here[first][last];
                    if cost == INF {
                        continue;
                    }
                    let next = cost + u8::from(last != c);
                    let slot = &mut dp[y as usize][first][c];
                    if next < *slot {
                        *slot = next;
                    }
                }
            }
        }
    }
    let end = dp[nv - 1];
    let val = |x: u8| if x == INF { n } else { x as u32 };
    let s_red = val(end[0][0].min(end[0][1]));
    let s_blue = val(end[1][0].min(end[1][1]));
    let s_last_red = val(end[0][0].min(end[1][0]));
    let s_last_blue = val(end[0][1].min(end[1][1]));
    ChangeProfile {
        s: s_red.min(s_blue),
        s_red,
        s_blue,
        s_last_red,
        s_last_blue,
    }
}

pub fn geodesic_change_profile(c: &Coloring, u: Vertex) -> Result<ChangeProfile> {
    if u.dim() != c.dim() {
        return Err(Error::DimensionMismatch(u.dim(), c.dim()));
    }
    let mut dp = Vec::new();
    Ok(profile_with(c.dim(), u.bits(), &|e| c.is_red(e), &mut dp))
}

/// Profiles of every vertex, indexed by raw vertex bits.
pub fn all_profiles(c: &Coloring) -> Vec<ChangeProfile> {
    let mut dp = Vec::new();
    (0..num_vertices(c.dim()) as u32)
        .map(|u| profile_with(c.dim(), u, &|e| c.is_red(e), &mut dp))
        .collect()
}

/// Aggregates of one coloring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ColoringStats {
    pub n: u32,
    /// `Σ_u s_u` over all vertices.
    pub sum_s: i64,
    /// `Σ_u min(s_u, s'_u − 1)` over all vertices.
    pub sum_fhat: i64,
    /// The same terms summed over vertices with first coordinate 1 only.
    /// This is what the refined bound formula counts: for a source `u ≺ ū`
    /// it chooses the color of the last edge, i.e. the first edge at `ū`.
    pub sum_fhat_directed: i64,
    /// Largest such sum over the `2n` half-cubes `{v : v_a = b}`.
    pub best_half_fhat: i64,
    /// Pairs `u ≺ ū` with `s > 1`.
    pub blocking: u32,
}

impl ColoringStats {
    pub fn f_value(&self) -> Rational64 {
        Rational64::new(self.sum_s, 1 << self.n)
    }

    pub fn fhat_value(&self) -> Rational64 {
        Rational64::new(self.sum_fhat, 1 << self.n)
    }

    pub fn fhat_directed_value(&self) -> Rational64 {
        Rational64::new(self.sum_fhat_directed, 1 << (self.n - 1))
    }
}

/// Only sources `u ≺ ū` are solved: reversing a geodesic swaps first and
/// last edges, so the profile of `ū` is the mirror of that of `u`.
fn stats_with(n: u32, red: &impl Fn(usize) -> bool, dp: &mut Vec<[[u8; 2]; 2]>) -> ColoringStats {
    let nv = num_vertices(n) as u32;
    let mask = full_mask(n);
    let mut st = ColoringStats { n, sum_s: 0, sum_fhat: 0, sum_fhat_directed: 0, best_half_fhat: 0, blocking: 0 };
    // half[2 * bit + value] = Σ of terms over {v : v_bit = value}
    let mut half = [0i64; 2 * 32];
    for u in 0..nv / 2 {
        let p = profile_with(n, u, red, dp);
        st.sum_s += 2 * p.s as i64;
        if p.s > 1 {
            st.blocking += 1;
        }
        for (v, t) in [(u, p.fhat_term()), (u ^ mask, p.fhat_term_last())] {
            st.sum_fhat += t;
            for bit in 0..n {
                half[(2 * bit + (v >> bit & 1)) as usize] += t;
            }
        }
    }
    st.sum_fhat_directed = half[(2 * (n - 1) + 1) as usize];
    st.best_half_fhat = half[..2 * n as usize].iter().copied().max().unwrap_or(0);
    st
}

pub fn coloring_stats(c: &Coloring) -> ColoringStats {
    stats_with(c.dim(), &|e| c.is_red(e), &mut Vec::new())
}

/// Minimum color changes over all walks from `u` to `ū` (0-1 BFS over
/// `(vertex, last color)`).
pub fn min_changes_any_path(c: &Coloring, u: Vertex) -> Result<u32> {
    if u.dim() != c.dim() {
        return Err(Error::DimensionMismatch(u.dim(), c.dim()));
    }
    let n = c.dim();
    let nv = num_vertices(n);
    let target = (u.antipodal().bits()) as usize;
    let mut dist = vec![[u32::MAX; 2]; nv];
    let mut queue = VecDeque::new();
    for bit in 0..n {
        let v = u.bits() ^ 1 << bit;
        let col = usize::from(!c.is_red(edge_index(n, u.bits(), bit)));
        if dist[v as usize][col] > 0 {
            dist[v as usize][col] = 0;
            queue.push_front((v, col, 0));
        }
    }
    while let Some((v, col, d)) = queue.pop_front() {
        if d > dist[v as usize][col] {
            continue;
        }
        for bit in 0..n {
            let w = v ^ 1 << bit;
            let c2 = usize::from(!c.is_red(edge_index(n, v, bit)));
            let nd = d + u32::from(c2 != col);
            if nd < dist[w as usize][c2] {
                dist[w as usize][c2] = nd;
                if nd == d {
                    queue.push_front((w, c2, nd));
                } else {
                    queue.push_back((w, c2, nd));
                }
            }
        }
    }
    Ok(dist[target][0].min(dist[target][1]))
}

/// Does some vertex reach its antipode monochromatically?
pub fn has_monochromatic_antipodal(c: &Coloring, geodesic_only: bool) -> bool {
    let n = c.dim();
    (0..num_vertices(n) as u32).any(|u| {
        let v = Vertex::new(u, n).expect("in range");
        if geodesic_only {
            geodesic_change_profile(c, v).expect("same dim").s == 0
        } else {
            min_changes_any_path(c, v).expect("same dim") == 0
        }
    })
}

/// Does some vertex reach its antipode along a path with at most one change?
pub fn has_one_change_antipodal(c: &Coloring, geodesic_only: bool) -> bool {
    let n = c.dim();
    (0..num_vertices(n) as u32).any(|u| {
        let v = Vertex::new(u, n).expect("in range");
        let k = if geodesic_only {
            geodesic_change_profile(c, v).expect("same dim").s
        } else {
            min_changes_any_path(c, v).expect("same dim")
        };
        k <= 1
    })
}

/// All antipodal colorings of `Q_n` (one free bit per antipodal edge pair).
pub fn antipodal_colorings(n: u32) -> Result<impl Iterator<Item = Coloring>> {
    check_dim(n)?;
    if num_edges(n) / 2 > 24 {
        return Err(Error::TooLarge(n));
    }
    let reps: Vec<usize> = (0..num_edges(n))
        .filter(|&e| e < crate::hypercube::antipodal_edge_index(n, e))
        .collect();
    let count = 1u64 << reps.len();
    Ok((0..count).map(move |bits| {
        let mut c = Coloring::uniform(n, crate::hypercube::Color::Blue).expect("valid");
        for (j, &e) in reps.iter().enumerate() {
            let red = bits >> j & 1 == 1;
            c.set(e, crate::hypercube::Color::from_bit(red));
            c.set(crate::hypercube::antipodal_edge_index(n, e), crate::hypercube::Color::from_bit(!red));
        }
        c
    }))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SweepOptions {
    /// Required for `n = 4` (2^32 colorings, quotiented by symmetry).
    pub allow_long: bool,
    /// Quotient even when a plain sweep would be cheap.
    pub force_quotient: bool,
}

/// Maxima over every 2-coloring of `Q_n`, with one maximizer each.
#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub n: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub f: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub fhat: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub fhat_directed: Rational64,
    pub mu: u32,
    /// Maximizer indices (`Coloring::from_index`); under the quotient the
    /// directed maximizer is only optimal up to symmetry.
    pub argmax_f: u64,
    pub argmax_fhat: u64,
    pub argmax_fhat_directed: u64,
    pub argmax_mu: u64,
    /// Colorings whose statistics were evaluated.
    pub evaluated: u64,
}

pub(crate) fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

#[derive(Clone, Copy)]
struct Best {
    sum_s: i64,
    arg_s: u64,
    sum_fhat: i64,
    arg_fhat: u64,
    sum_dir: i64,
    arg_dir: u64,
    mu: u32,
    arg_mu: u64,
    evaluated: u64,
}

impl Best {
    fn empty() -> Self {
        Best {
            sum_s: -1,
            arg_s: 0,
            sum_fhat: i64::MIN,
            arg_fhat: 0,
            sum_dir: i64::MIN,
            arg_dir: 0,
            mu: 0,
            arg_mu: 0,
            evaluated: 0,
        }
    }

    fn add(&mut self, idx: u64, st: &ColoringStats) {
        self.evaluated += 1;
        // ties keep the smallest index
        if st.sum_s > self.sum_s || (st.sum_s == self.sum_s && idx < self.arg_s) {
            self.sum_s = st.sum_s;
            self.arg_s = idx;
        }
        if st.sum_fhat > self.sum_fhat || (st.sum_fhat == self.sum_fhat && idx < self.arg_fhat) {
            self.sum_fhat = st.sum_fhat;
            self.arg_fhat = idx;
        }
        if st.best_half_fhat > self.sum_dir || (st.best_half_fhat == self.sum_dir && idx < self.arg_dir) {
            self.sum_dir = st.best_half_fhat;
            self.arg_dir = idx;
        }
        if st.blocking > self.mu || (st.blocking == self.mu && idx < self.arg_mu) {
            self.mu = st.blocking;
            self.arg_mu = idx;
        }
    }

    fn merge(mut self, o: Best) -> Best {
        let ev = self.evaluated + o.evaluated;
        if o.evaluated > 0 {
            if o.sum_s > self.sum_s || (o.sum_s == self.sum_s && o.arg_s < self.arg_s) {
                self.sum_s = o.sum_s;
                self.arg_s = o.arg_s;
            }
            if o.sum_fhat > self.sum_fhat || (o.sum_fhat == self.sum_fhat && o.arg_fhat < self.arg_fhat) {
                self.sum_fhat = o.sum_fhat;
                self.arg_fhat = o.arg_fhat;
            }
            if o.sum_dir > self.sum_dir || (o.sum_dir == self.sum_dir && o.arg_dir < self.arg_dir) {
                self.sum_dir = o.sum_dir;
                self.arg_dir = o.arg_dir;
            }
            if o.mu > self.mu || (o.mu == self.mu && o.arg_mu < self.arg_mu) {
                self.mu = o.mu;
                self.arg_mu = o.arg_mu;
            }
        }
        self.evaluated = ev;
        self
    }
}

/// Bit-permutation tables realizing `idx ↦ index of c∘S` byte by byte.
struct ImageTables {
    tables: Vec<Vec<[u64; 256]>>,
}

impl ImageTables {
    fn new(n: u32, syms: &[Symmetry]) -> Self {
        let m = num_edges(n);
        let bytes = m.div_ceil(8);
        let tables = syms
            .iter()
            .map(|s| {
                let sigma = s.edge_permutation();
                let mut tau = vec![0usize; m];
                for (e, &img) in sigma.iter().enumerate() {
                    tau[img] = e;
                }
                (0..bytes)
                    .map(|b| {
                        let mut t = [0u64; 256];
                        for (val, slot) in t.iter_mut().enumerate() {
                            for j in 0..8 {
                                let k = 8 * b + j;
                                if k < m && val >> j & 1 == 1 {
                                    *slot |= 1 << tau[k];
                                }
                            }
                        }
                        t
                    })
                    .collect()
            })
            .collect();
        ImageTables { tables }
    }

    /// True iff no image is numerically smaller than `idx`.
    #[inline]
    fn is_minimal(&self, idx: u64) -> bool {
        self.tables.iter().all(|t| {
            let mut img = 0u64;
            for (b, tb) in t.iter().enumerate() {
                img |= tb[(idx >> (8 * b) & 0xff) as usize];
            }
            img >= idx
        })
    }
}

/// The directed statistic is not invariant, but its maximum over an orbit
/// is the best half-cube sum of any member, which is.
fn sweep_symmetries(n: u32) -> Vec<Symmetry> {
    generating_symmetries(n, SymmetrySet::WithPureFlips)
}

fn run_sweep(n: u32, quotient: bool) -> Best {
    let m = num_edges(n);
    let total = 1u64 << m;
    let tables = quotient.then(|| ImageTables::new(n, &sweep_symmetries(n)));
    let chunk = (total / 256).max(1);
    (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|ci| {
            let mut best = Best::empty();
            let mut dp = Vec::new();
            let start = ci * chunk;
            let end = (start + chunk).min(total);
            for idx in start..end {
                if let Some(t) = &tables {
                    if !t.is_minimal(idx) {
                        continue;
                    }
                }
                let st = stats_with(n, &|e| idx >> e & 1 == 1, &mut dp);
                best.add(idx, &st);
            }
            best
        })
        .reduce(Best::empty, Best::merge)
}

/// Exhaustive maximization over all colorings of `Q_n`, `n ≤ 4`.
pub fn exhaustive_sweep(n: u32, opts: SweepOptions) -> Result<SweepResult> {
    check_dim(n)?;
    if n > 4 {
        return Err(Error::TooLarge(n));
    }
    if n == 4 && !opts.allow_long {
        return Err(Error::InvalidArgument(
            "n = 4 sweeps 2^32 colorings; pass the long-run flag to allow it".into(),
        ));
    }
    let quotient = n == 4 || opts.force_quotient;
    let b = run_sweep(n, quotient);
    Ok(SweepResult {
        n,
        f: Rational64::new(b.sum_s, 1 << n),
        fhat: Rational64::new(b.sum_fhat, 1 << n),
        fhat_directed: Rational64::new(b.sum_dir, 1 << (n - 1)),
        mu: b.mu,
        argmax_f: b.arg_s,
        argmax_fhat: b.arg_fhat,
        argmax_fhat_directed: b.arg_dir,
        argmax_mu: b.arg_mu,
        evaluated: b.evaluated,
    })
}

pub fn exact_f(n: u32, allow_long: bool) -> Result<Rational64> {
    Ok(exhaustive_sweep(n, SweepOptions { allow_long, ..Default::default() })?.f)
}

pub fn exact_fhat(n: u32, allow_long: bool) -> Result<Rational64> {
    Ok(exhaustive_sweep(n, SweepOptions { allow_long, ..Default::default() })?.fhat)
}

pub fn exact_mu(n: u32, allow_long: bool) -> Result<u32> {
    Ok(exhaustive_sweep(n, SweepOptions { allow_long, ..Default::default() })?.mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::Color;

    #[test]
    fn monochromatic_cube_profile() {
        let c = Coloring::uniform(4, Color::Red).unwrap();
        let p = geodesic_change_profile(&c, Vertex::zero(4).unwrap()).unwrap();
        assert_eq!((p.s, p.s_red, p.s_blue), (0, 0, 4));
        assert_eq!(p.fhat_term(), 0);
    }

    #[test]
    fn any_path_never_exceeds_geodesic() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 2..=6 {
            for _ in 0..10 {
                let c = Coloring::random(n, &mut rng).unwrap();
                for (u, p) in all_profiles(&c).iter().enumerate() {
                    let v = Vertex::new(u as u32, n).unwrap();
                    assert!(min_changes_any_path(&c, v).unwrap() <= p.s);
                    assert_eq!(p.s, p.s_red.min(p.s_blue));
                    assert_eq!(p.s, p.s_last_red.min(p.s_last_blue));
                    assert!(p.s < n);
                }
            }
        }
    }

    #[test]
    fn mirrored_profiles_match_direct_ones() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for n in 2..=6 {
            for _ in 0..10 {
                let c = Coloring::random(n, &mut rng).unwrap();
                let ps = all_profiles(&c);
                let mask = full_mask(n) as usize;
                let st = coloring_stats(&c);
                assert_eq!(st.sum_s, ps.iter().map(|p| p.s as i64).sum::<i64>());
                assert_eq!(st.sum_fhat, ps.iter().map(|p| p.fhat_term()).sum::<i64>());
                let upper: i64 = ps.iter().skip(ps.len() / 2).map(|p| p.fhat_term()).sum();
                assert_eq!(st.sum_fhat_directed, upper);
                for (u, p) in ps.iter().enumerate() {
                    let q = ps[u ^ mask];
                    assert_eq!((p.s_red, p.s_blue), (q.s_last_red, q.s_last_blue));
                }
            }
        }
    }

    /// Enumerates all `n!` antipodal geodesics from `u` as bit orders.
    fn naive_profile(c: &Coloring, u: u32) -> (u32, u32, u32, u32, u32) {
        fn perms(rest: &mut Vec<u32>, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if rest.is_empty() {
                out.push(acc.clone());
                return;
            }
            for i in 0..rest.len() {
                let b = rest.remove(i);
                acc.push(b);
                perms(rest, acc, out);
                acc.pop();
                rest.insert(i, b);
            }
        }
        let n = c.dim();
        let mut all = Vec::new();
        perms(&mut (0..n).collect(), &mut Vec::new(), &mut all);
        let (mut sr, mut sb, mut lr, mut lb) = (n, n, n, n);
        for order in all {
            let mut v = u;
            let mut cols = Vec::new();
            for b in order {
                cols.push(c.between(v, v ^ 1 << b).is_red());
                v ^= 1 << b;
            }
            let k = cols.windows(2).filter(|w| w[0] != w[1]).count() as u32;
            if cols[0] { sr = sr.min(k) } else { sb = sb.min(k) }
            if cols[cols.len() - 1] { lr = lr.min(k) } else { lb = lb.min(k) }
        }
        (sr.min(sb), sr, sb, lr, lb)
    }

    #[test]
    fn dp_matches_naive_enumeration() {
        for idx in 0..4096u64 {
            let c = Coloring::from_index(3, idx).unwrap();
            for (u, p) in all_profiles(&c).iter().enumerate() {
                assert_eq!((p.s, p.s_red, p.s_blue, p.s_last_red, p.s_last_blue), naive_profile(&c, u as u32));
            }
        }
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let c = Coloring::random(4, &mut rng).unwrap();
            for (u, p) in all_profiles(&c).iter().enumerate() {
                assert_eq!((p.s, p.s_red, p.s_blue, p.s_last_red, p.s_last_blue), naive_profile(&c, u as u32));
            }
        }
    }

    #[test]
    fn all_blue_any_path_is_zero() {
        let c = Coloring::uniform(5, Color::Blue).unwrap();
        for u in 0..32 {
            assert_eq!(min_changes_any_path(&c, Vertex::new(u, 5).unwrap()).unwrap(), 0);
        }
    }

    #[test]
    fn small_sweeps() {
        let s2 = exhaustive_sweep(2, SweepOptions::default()).unwrap();
        assert_eq!(s2.f, Rational64::from_integer(1));
        assert_eq!(s2.mu, 0);
        let s3 = exhaustive_sweep(3, SweepOptions::default()).unwrap();
        assert_eq!(s3.f, Rational64::from_integer(1));
        assert_eq!(s3.fhat, Rational64::new(1, 2));
        assert_eq!(s3.fhat_directed, Rational64::new(1, 2));
        assert_eq!(s3.mu, 1);
        assert_eq!(s3.evaluated, 4096);
    }

    #[test]
    fn quotient_matches_full_sweep_at_n3() {
        let full = exhaustive_sweep(3, SweepOptions::default()).unwrap();
        let quot = exhaustive_sweep(3, SweepOptions { force_quotient: true, ..Default::default() }).unwrap();
        assert!(quot.evaluated < full.evaluated);
        assert_eq!((quot.f, quot.fhat, quot.fhat_directed, quot.mu), (full.f, full.fhat, full.fhat_directed, full.mu));
    }

    #[test]
    fn n4_needs_the_long_run_flag() {
        assert!(exhaustive_sweep(4, SweepOptions::default()).is_err());
        assert!(exhaustive_sweep(5, SweepOptions { allow_long: true, ..Default::default() }).is_err());
    }

    #[test]
    fn every_antipodal_coloring_of_q3_has_a_monochromatic_geodesic() {
        let all: Vec<_> = antipodal_colorings(3).unwrap().collect();
        assert_eq!(all.len(), 64);
        for c in &all {
            assert!(c.is_antipodal());
            assert!(has_monochromatic_antipodal(c, true));
            assert!(has_monochromatic_antipodal(c, false));
        }
    }
}
