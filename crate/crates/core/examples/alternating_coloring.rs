//! Closed forms around the alternating coloring, checked against the oracle.

use hypercube_sat::alternating::{alternating_coloring, beta, f_lower_bound, g, h, sqrt_chain_report};
use hypercube_sat::hypercube::Vertex;
use hypercube_sat::oracle::{coloring_stats, min_changes_any_path};

fn main() -> hypercube_sat::Result<()> {
    for n in [3, 5, 7] {
        let counted = coloring_stats(&alternating_coloring(n)?).blocking;
        println!("n = {n}: g(n) = {}, h((n-1)/2) = {}, counted = {counted}", g(n)?, h((n - 1) / 2));
    }

    let c = alternating_coloring(5)?;
    let tight = (0..32u32)
        .map(|v| Vertex::new(v, 5))
        .collect::<hypercube_sat::Result<Vec<_>>>()?
        .into_iter()
        .filter(|&v| min_changes_any_path(&c, v).map(|m| m as i32 == (beta(v).abs() - 1).max(0)).unwrap_or(false))
        .count();
    println!("vertices of Q_5 where the |beta| - 1 bound is tight: {tight}");

    println!("{:>3} {:>8} {:>8} {:>8}  contradicted", "k", "L(k)", "claimed", "f(k)");
    for row in sqrt_chain_report([3, 4, 5, 6, 10, 20, 40])? {
        println!(
            "{:>3} {:>8.4} {:>8.4} {:>8}  {}",
            row.k,
            row.lower_bound,
            row.claimed,
            row.known_f.map(|f| format!("{f:.4}")).unwrap_or_else(|| "-".into()),
            row.contradicted
        );
    }
    println!("L(5) = {}", f_lower_bound(5)?);
    Ok(())
}
