//! Splits a formula into cubes and solves them with a resumable worker pool.

use hypercube_sat::encode::{build_conjecture, Conjecture, EncodingConfig};
use hypercube_sat::solver::campaign::{run_campaign, CampaignConfig, InternalCubeSolver};
use hypercube_sat::solver::cube::{generate_cubes, Splitter};

fn main() -> hypercube_sat::Result<()> {
    let enc = build_conjecture(&EncodingConfig::new(5, Conjecture::AntipodalGeodesic))?;
    let cubes = generate_cubes(&enc.formula, 4, &Splitter::Builtin)?;
    println!("{} cubes", cubes.len());

    let dir = tempfile::tempdir()?;
    let mut cfg = CampaignConfig::new(dir.path().join("psi5.jsonl"), 4);
    cfg.stop_after = Some(5);
    let first = run_campaign(&enc.formula, &cubes, &InternalCubeSolver::default(), &cfg)?;
    println!("interrupted run: {} solved, verdict {:?}", first.solved_this_run, first.verdict);

    cfg.stop_after = None;
    let second = run_campaign(&enc.formula, &cubes, &InternalCubeSolver::default(), &cfg)?;
    println!(
        "resumed run: {} solved, verdict {:?}, {:.2}s of cube time in total",
        second.solved_this_run, second.verdict, second.total_cube_seconds
    );
    Ok(())
}
