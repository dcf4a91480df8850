//! Random antipodal geodesics with chunk-wise color-change optimization.

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercube::{check_dim, full_mask, Color, Coloring, Vertex};

/// A geodesic given by its start and the bit flipped at each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicPath {
    n: u32,
    start: u32,
    steps: Vec<u32>,
}

impl GeodesicPath {
    /// `steps` are bit positions; none may repeat.
    pub fn new(start: Vertex, steps: Vec<u32>) -> Result<Self> {
        let n = start.dim();
        let mut seen = 0u32;
        for &b in &steps {
            if b >= n || seen >> b & 1 == 1 {
                return Err(Error::InvalidArgument(format!("bad geodesic step {b} in dimension {n}")));
            }
            seen |= 1 << b;
        }
        Ok(GeodesicPath { n, start: start.bits(), steps })
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn start(&self) -> Vertex {
        Vertex::new(self.start, self.n).expect("valid start")
    }

    pub fn steps(&self) -> &[u32] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn vertices(&self) -> Vec<u32> {
        let mut v = self.start;
        let mut out = vec![v];
        for &b in &self.steps {
            v ^= 1 << b;
            out.push(v);
        }
        out
    }

    pub fn end(&self) -> u32 {
        self.steps.iter().fold(self.start, |v, &b| v ^ 1 << b)
    }

    pub fn is_antipodal(&self) -> bool {
        self.len() == self.n as usize && self.end() == !self.start & full_mask(self.n)
    }

    pub fn edge_colors(&self, c: &Coloring) -> Vec<Color> {
        let vs = self.vertices();
        vs.windows(2).map(|w| c.between(w[0], w[1])).collect()
    }

    /// `γ(P)`: internal vertices whose two path edges differ in color.
    pub fn color_changes(&self, c: &Coloring) -> u32 {
        self.edge_colors(c).windows(2).filter(|w| w[0] != w[1]).count() as u32
    }
}

/// Uniform over all `2^n · n!` antipodal geodesics.
pub fn random_antipodal_geodesic<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<GeodesicPath> {
    check_dim(n)?;
    let start = rng.gen_range(0..1u64 << n) as u32;
    let mut steps: Vec<u32> = (0..n).collect();
    steps.shuffle(rng);
    Ok(GeodesicPath { n, start, steps })
}

/// Partition of a length-`n` geodesic into `⌊n/k⌋` chunks of length `k`
/// and a remainder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChunkPlan {
    pub n: u32,
    pub k: u32,
    pub m: u32,
    pub remainder: u32,
}

impl ChunkPlan {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k < 2 || k > n {
            return Err(Error::InvalidArgument(format!("chunk length {k} must lie in [2, {n}]")));
        }
        Ok(ChunkPlan { n, k, m: n / k, remainder: n % k })
    }
}

/// Fewest-change geodesic from `a` flipping exactly the bits of `axes`,
/// with the first edge colored `prefer` when that costs nothing extra.
/// Ties go to the lexicographically least bit sequence.
fn best_chunk(c: &Coloring, a: u32, axes: &[u32], prefer: Option<Color>) -> Vec<u32> {
    let k = axes.len();
    let full = (1usize << k) - 1;
    let vertex = |x: usize| (0..k).fold(a, |v, j| if x >> j & 1 == 1 { v ^ 1 << axes[j] } else { v });
    let color = |x: usize, j: usize| c.between(vertex(x), vertex(x) ^ 1 << axes[j]).index();
    // togo[x][l]: fewest further changes from local state x, last color l
    let mut togo = vec![[u32::MAX; 2]; full + 1];
    togo[full] = [0, 0];
    for x in (0..full).rev() {
        for l in 0..2 {
            togo[x][l] = (0..k)
                .filter(|&j| x >> j & 1 == 0)
                .map(|j| {
                    let col = color(x, j);
                    u32::from(col != l) + togo[x | 1 << j][col]
                })
                .min()
                .expect("some free axis");
        }
    }
    // with local axes sorted by bit, index order is bit order
    let first_cost = |j: usize| togo[1 << j][color(0, j)];
    let best = (0..k).map(first_cost).min().expect("k ≥ 1");
    let first = prefer
        .and_then(|p| (0..k).find(|&j| color(0, j) == p.index() && first_cost(j) == best))
        .unwrap_or_else(|| (0..k).find(|&j| first_cost(j) == best).expect("a minimizer"));
    let mut out = vec![axes[first]];
    let mut x = 1usize << first;
    let mut last = color(0, first);
    while x != full {
        let want = togo[x][last];
        let j = (0..k)
            .filter(|&j| x >> j & 1 == 0)
            .find(|&j| {
                let col = color(x, j);
                u32::from(col != last) + togo[x | 1 << j][col] == want
            })
            .expect("optimal successor");
        last = color(x, j);
        x |= 1 << j;
        out.push(axes[j]);
    }
    out
}

/// Replaces each full chunk by an optimal geodesic inside its subcube,
/// preferring to continue the previous chunk's last color. The remainder
/// is optimized too when `optimize_remainder` is set.
pub fn optimize_chunks(p: &GeodesicPath, c: &Coloring, k: u32, optimize_remainder: bool) -> Result<GeodesicPath> {
    if p.dim() != c.dim() {
        return Err(Error::DimensionMismatch(p.dim(), c.dim()));
    }
    if !p.is_antipodal() {
        return Err(Error::InvalidArgument("chunk optimization needs an antipodal geodesic".into()));
    }
    let plan = ChunkPlan::new(p.dim(), k)?;
    let mut steps = Vec::with_capacity(p.len());
    let mut v = p.start;
    let mut prev: Option<Color> = None;
    let mut chunks: Vec<(&[u32], bool)> = p.steps.chunks(k as usize).map(|ch| (ch, true)).collect();
    if plan.remainder > 0 {
        chunks.last_mut().expect("nonempty").1 = optimize_remainder;
    }
    for (chunk, optimize) in chunks {
        let new: Vec<u32> = if optimize {
            let mut axes = chunk.to_vec();
            axes.sort_unstable();
            best_chunk(c, v, &axes, prev)
        } else {
            chunk.to_vec()
        };
        for &b in &new {
            prev = Some(c.between(v, v ^ 1 << b));
            v ^= 1 << b;
        }
        steps.extend(new);
    }
    Ok(GeodesicPath { n: p.n, start: p.start, steps })
}

/// `⌊n/k⌋·f̂(k) + ⌊n/k⌋ + (n mod k)`. For `n < k` there are no full
/// chunks and the value is `n`.
pub fn expected_changes_bound(n: u32, k: u32, fhat_k: Rational64) -> Result<Rational64> {
    if k < 2 || n == 0 {
        return Err(Error::InvalidArgument(format!("need k ≥ 2 and n ≥ 1 (got n = {n}, k = {k})")));
    }
    let m = Rational64::from_integer((n / k) as i64);
    Ok(m * fhat_k + m + Rational64::from_integer((n % k) as i64))
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationResult {
    pub n: u32,
    pub k: u32,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub max: u32,
}

/// Monte Carlo estimate of the mean `γ` after chunk optimization. Trial
/// `t` draws from a ChaCha8 stream `(seed, t)`, so results do not depend
/// on the thread count.
pub fn simulate(c: &Coloring, k: u32, trials: u64, seed: u64, optimize_remainder: bool) -> Result<SimulationResult> {
    let n = c.dim();
    ChunkPlan::new(n, k)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is needed".into()));
    }
    let values: Vec<u32> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let p = random_antipodal_geodesic(n, &mut rng)?;
            Ok(optimize_chunks(&p, c, k, optimize_remainder)?.color_changes(c))
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().map(|&x| x as f64).sum::<f64>() / trials as f64;
    let var = if trials > 1 {
        values.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    Ok(SimulationResult {
        n,
        k,
        trials,
        seed,
        mean,
        stderr: (var / trials as f64).sqrt(),
        max: values.into_iter().max().unwrap_or(0),
    })
}
