//! Runs an external SAT solver on Phi_n and checks the verdict.
//!
//! `HYPERCUBE_SAT_SOLVER="cadical -q {}" cargo run --example external_solver -- 6`

use std::time::{Duration, Instant};

use hypercube_sat::encode::{build_conjecture, Conjecture, EncodingConfig};
use hypercube_sat::solver::{solve_external, Outcome, SolverSpec};

fn main() -> hypercube_sat::Result<()> {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let spec = SolverSpec::from_env(Duration::from_secs(600))?;
    if !spec.is_available() {
        eprintln!("solver `{}` not found; set HYPERCUBE_SAT_SOLVER", spec.command_line());
        return Ok(());
    }
    let enc = build_conjecture(&EncodingConfig::new(n, Conjecture::AntipodalPath))?;
    let t = Instant::now();
    let verdict = match solve_external(&enc.formula, &spec)? {
        Outcome::Sat(_) => "SAT (counterexample!)",
        Outcome::Unsat => "UNSAT",
        Outcome::Unknown => "unknown",
    };
    println!("Phi_{n} with `{}`: {verdict} in {:.2}s", spec.command_line(), t.elapsed().as_secs_f64());
    Ok(())
}
