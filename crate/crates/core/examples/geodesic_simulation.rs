//! Monte Carlo run of the chunked random geodesic against its expectation bound.

use hypercube_sat::alternating::alternating_coloring;
use hypercube_sat::geodesic::{expected_changes_bound, simulate};
use hypercube_sat::hypercube::Coloring;
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hypercube_sat::Result<()> {
    let (n, k) = (9, 3);
    let bound = expected_changes_bound(n, k, Rational64::new(1, 2))?;
    println!("bound for n = {n}, k = {k}: {bound}");

    let alt = simulate(&alternating_coloring(n)?, k, 10_000, 7, false)?;
    println!("alternating: mean {:.4} ± {:.4}, max {}", alt.mean, alt.stderr, alt.max);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..3 {
        let c = Coloring::random(n, &mut rng)?;
        let r = simulate(&c, k, 10_000, i, false)?;
        let opt = simulate(&c, k, 10_000, i, true)?;
        println!("random #{i}: mean {:.4} ± {:.4} (remainder optimized: {:.4})", r.mean, r.stderr, opt.mean);
    }

    for n in [10, 100, 1000] {
        let b = expected_changes_bound(n, 6, Rational64::new(7, 8))?;
        println!("k = 6, n = {n}: {:.3} vs 0.3125n + 6 = {:.3}", *b.numer() as f64 / *b.denom() as f64, 0.3125 * n as f64 + 6.0);
    }
    Ok(())
}
