//! Exact optimum of a counting formula by binary search over SAT calls.
//!
//! Uses the external solver (`$HYPERCUBE_SAT_SOLVER`, default kissat) when it
//! is installed and the built-in one otherwise.
//!
//! `cargo run --release --example bound_search -- mu 4`

use std::time::Duration;

use hypercube_sat::bounds::{compute_bound, witness_count, BoundKind};
use hypercube_sat::encode::{Conjecture, EncodingConfig};
use hypercube_sat::solver::{Backend, SolverSpec};

fn main() -> hypercube_sat::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: BoundKind = args.next().unwrap_or_else(|| "f".into()).parse()?;
    let n: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    let spec = SolverSpec::from_env(Duration::from_secs(3600))?;
    let backend = if spec.is_available() { Backend::External(spec) } else { Backend::Internal { conflicts: None } };
    println!("solver: {}", backend.describe());

    let cfg = EncodingConfig::new(n, Conjecture::OneChangeGeodesic);
    let r = compute_bound(kind, n, &cfg, |f| backend.solve(f))?;
    for p in &r.probes {
        println!("  count {:>3}: {} ({} vars, {} clauses, {:.2}s)", p.count, if p.sat { "SAT" } else { "UNSAT" }, p.vars, p.clauses, p.seconds);
    }
    println!("{kind}({n}) = {}", r.value);
    if let Some(c) = &r.witness {
        println!("witness statistic: {}", witness_count(kind, c));
    }
    Ok(())
}
