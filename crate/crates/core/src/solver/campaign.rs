//! Cube-and-conquer campaigns with an append-only JSONL journal.
//!
//! Each finished attempt is journaled as one line. On resume the journal
//! is replayed, terminal cubes are skipped and the rest are solved. The
//! verdict is always recomputed from the replayed journal.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::dpll::{self, Limits, Outcome};
use super::external::{solve_external_run, SolverSpec};
use crate::cnf::{write_dimacs, write_icnf, CnfFormula, Cube, Model};
use crate::error::{Error, Result};

/// Work distribution across workers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schedule {
    /// Shared queue; idle workers take the next pending cube.
    #[default]
    Dynamic,
    /// Cube `i` goes to worker `i mod W`.
    Static,
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub workers: usize,
    pub schedule: Schedule,
    pub journal: PathBuf,
    /// Extra attempts for a cube whose solver run errored.
    pub max_retries: u32,
    /// Stop (as if killed) after this many results are journaled in this run.
    pub stop_after: Option<usize>,
}

impl CampaignConfig {
    pub fn new(journal: impl Into<PathBuf>, workers: usize) -> Self {
        CampaignConfig {
            workers,
            schedule: Schedule::Dynamic,
            journal: journal.into(),
            max_retries: 1,
            stop_after: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CubeStatus {
    Pending,
    Sat { model: Vec<i32> },
    Unsat,
    Timeout,
    Error { message: String },
}

impl CubeStatus {
    fn label(&self) -> &'static str {
        match self {
            CubeStatus::Pending => "pending",
            CubeStatus::Sat { .. } => "sat",
            CubeStatus::Unsat => "unsat",
            CubeStatus::Timeout => "timeout",
            CubeStatus::Error { .. } => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Record {
    Header { formula_sha256: String, cubes_sha256: String, num_cubes: usize },
    Result { cube: usize, attempt: u32, wall_seconds: f64, #[serde(flatten)] status: CubeStatus },
}

/// Result of one solver call on `f ∧ cube`.
#[derive(Clone, Debug)]
pub struct CubeRun {
    pub outcome: Outcome,
    /// Budget exhausted (as opposed to cancelled).
    pub timed_out: bool,
}

/// Anything that can decide `f ∧ cube`.
pub trait CubeSolver: Sync {
    fn solve_cube(&self, f: &CnfFormula, cube: &Cube, cancel: &Arc<AtomicBool>) -> Result<CubeRun>;
}

impl CubeSolver for SolverSpec {
    fn solve_cube(&self, f: &CnfFormula, cube: &Cube, cancel: &Arc<AtomicBool>) -> Result<CubeRun> {
        let run = solve_external_run(f, Some(cube), self, Some(cancel))?;
        Ok(CubeRun { outcome: run.outcome, timed_out: run.timed_out })
    }
}

/// The built-in solver, cube literals as assumptions.
#[derive(Clone, Copy, Debug, Default)]
pub struct InternalCubeSolver {
    pub conflicts: Option<u64>,
}

impl CubeSolver for InternalCubeSolver {
    fn solve_cube(&self, f: &CnfFormula, cube: &Cube, cancel: &Arc<AtomicBool>) -> Result<CubeRun> {
        let mut s = dpll::Solver::new(f);
        let outcome = s.solve(cube.lits(), &Limits { conflicts: self.conflicts, cancel: Some(cancel.clone()) });
        let timed_out = outcome == Outcome::Unknown && !cancel.load(Ordering::Relaxed);
        Ok(CubeRun { outcome, timed_out })
    }
}

/// Adapter for closures, mainly stub solvers in tests.
pub struct FnSolver<F>(pub F);

impl<F> CubeSolver for FnSolver<F>
where
    F: Fn(&CnfFormula, &Cube) -> Result<Outcome> + Sync,
{
    fn solve_cube(&self, f: &CnfFormula, cube: &Cube, _cancel: &Arc<AtomicBool>) -> Result<CubeRun> {
        let outcome = (self.0)(f, cube)?;
        Ok(CubeRun { timed_out: outcome == Outcome::Unknown, outcome })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeSummary {
    pub index: usize,
    pub status: &'static str,
    pub attempts: u32,
    /// Wall time of the last attempt.
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignReport {
    pub verdict: Verdict,
    #[serde(skip)]
    pub model: Option<Model>,
    pub num_cubes: usize,
    pub counts: HashMap<&'static str, usize>,
    pub cubes: Vec<CubeSummary>,
    /// Sum of per-attempt wall times over the whole journal.
    pub total_cube_seconds: f64,
    pub wall_seconds: f64,
    pub solved_this_run: usize,
    pub interrupted: bool,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn fingerprints(f: &CnfFormula, cubes: &[Cube]) -> Result<(String, String)> {
    let mut a = Vec::new();
    write_dimacs(f, &mut a)?;
    let mut b = Vec::new();
    write_icnf(&CnfFormula::new(), cubes, &mut b)?;
    Ok((sha256_hex(&a), sha256_hex(&b)))
}

#[derive(Default, Clone)]
struct CubeState {
    status: Option<CubeStatus>,
    attempts: u32,
    wall: f64,
}

struct Replay {
    states: Vec<CubeState>,
    total: f64,
    header_seen: bool,
    /// Bytes up to the end of the last complete record.
    valid_len: u64,
}

/// Reads a journal; a torn final line (from a crash mid-write) is ignored.
fn replay(path: &Path, num_cubes: usize, fp: &(String, String)) -> Result<Replay> {
    let mut r = Replay { states: vec![CubeState::default(); num_cubes], total: 0.0, header_seen: false, valid_len: 0 };
    if !path.exists() {
        return Ok(r);
    }
    let text = std::fs::read_to_string(path)?;
    let mut offset = 0usize;
    let mut lines = text.split_inclusive('\n').enumerate().peekable();
    while let Some((i, raw)) = lines.next() {
        let last = lines.peek().is_none();
        offset += raw.len();
        let line = raw.trim();
        if line.is_empty() {
            r.valid_len = offset as u64;
            continue;
        }
        let rec: Record = match serde_json::from_str(line) {
            Ok(rec) if raw.ends_with('\n') => rec,
            Ok(_) | Err(_) if last => break,
            Ok(_) => unreachable!("only the last chunk can lack a newline"),
            Err(e) => return Err(Error::parse(i + 1, format!("journal: {e}"))),
        };
        match rec {
            Record::Header { formula_sha256, cubes_sha256, num_cubes: k } => {
                if (formula_sha256, cubes_sha256) != *fp || k != num_cubes {
                    return Err(Error::InvalidArgument(format!(
                        "journal {} belongs to a different formula or cube list",
                        path.display()
                    )));
                }
                r.header_seen = true;
            }
            Record::Result { cube, attempt, wall_seconds, status } => {
                let st = r
                    .states
                    .get_mut(cube)
                    .ok_or_else(|| Error::parse(i + 1, format!("journal: cube {cube} out of range")))?;
                st.attempts = st.attempts.max(attempt);
                st.wall = wall_seconds;
                st.status = Some(status);
                r.total += wall_seconds;
            }
        }
        r.valid_len = offset as u64;
    }
    Ok(r)
}

fn needs_run(st: &CubeState, max_retries: u32) -> bool {
    match &st.status {
        None | Some(CubeStatus::Pending) => true,
        Some(CubeStatus::Error { .. }) => st.attempts <= max_retries,
        _ => false,
    }
}

struct Msg {
    cube: usize,
    attempt: u32,
    wall: f64,
    status: CubeStatus,
}

/// Runs (or resumes) a campaign over `cubes`, which must cover the search
/// space. SAT iff some cube is SAT; UNSAT iff every cube is UNSAT.
pub fn run_campaign(f: &CnfFormula, cubes: &[Cube], solver: &dyn CubeSolver, cfg: &CampaignConfig) -> Result<CampaignReport> {
    if cfg.workers == 0 {
        return Err(Error::InvalidArgument("a campaign needs at least one worker".into()));
    }
    let start = Instant::now();
    let fp = fingerprints(f, cubes)?;
    let Replay { mut states, header_seen, valid_len, .. } = replay(&cfg.journal, cubes.len(), &fp)?;
    let mut journal = OpenOptions::new().create(true).append(true).open(&cfg.journal)?;
    journal.set_len(valid_len)?;
    if !header_seen {
        let h = Record::Header { formula_sha256: fp.0.clone(), cubes_sha256: fp.1.clone(), num_cubes: cubes.len() };
        writeln!(journal, "{}", serde_json::to_string(&h)?)?;
        journal.sync_data()?;
    }
    let already_sat = states.iter().any(|s| matches!(s.status, Some(CubeStatus::Sat { .. })));
    let todo: Vec<usize> = if already_sat {
        Vec::new()
    } else {
        (0..cubes.len()).filter(|&i| needs_run(&states[i], cfg.max_retries)).collect()
    };
    let cancel = Arc::new(AtomicBool::new(false));
    let next = AtomicUsize::new(0);
    let mut solved = 0;
    let mut interrupted = false;
    let workers = cfg.workers.min(todo.len().max(1));
    let first_attempts: Vec<u32> = states.iter().map(|s| s.attempts).collect();

    std::thread::scope(|scope| -> Result<()> {
        let (tx, rx) = mpsc::channel::<Msg>();
        for w in 0..workers {
            let tx = tx.clone();
            let (todo, next, cancel, first_attempts) = (&todo, &next, &cancel, &first_attempts);
            scope.spawn(move || {
                let mut static_pos = 0usize;
                loop {
                    if cancel.load(Ordering::Relaxed) {
                        return;
                    }
                    let cube = match cfg.schedule {
                        Schedule::Dynamic => match todo.get(next.fetch_add(1, Ordering::Relaxed)) {
                            Some(&c) => c,
                            None => return,
                        },
                        Schedule::Static => {
                            let found = todo[static_pos..].iter().position(|&c| c % workers == w);
                            match found {
                                Some(off) => {
                                    static_pos += off + 1;
                                    todo[static_pos - 1]
                                }
                                None => return,
                            }
                        }
                    };
                    let mut attempt = first_attempts[cube];
                    loop {
                        attempt += 1;
                        let t = Instant::now();
                        let res = solver.solve_cube(f, &cubes[cube], cancel);
                        let wall = t.elapsed().as_secs_f64();
                        let status = match res {
                            Ok(CubeRun { outcome: Outcome::Sat(m), .. }) => match f.check_model(&m) {
                                Ok(()) if cubes[cube].satisfied_by(&m) => CubeStatus::Sat { model: m.to_dimacs_lits() },
                                Ok(()) => CubeStatus::Error { message: "model violates the cube".into() },
                                Err(e) => CubeStatus::Error { message: e.to_string() },
                            },
                            Ok(CubeRun { outcome: Outcome::Unsat, .. }) => CubeStatus::Unsat,
                            Ok(CubeRun { timed_out: true, .. }) => CubeStatus::Timeout,
                            // cancelled: leave the cube pending
                            Ok(CubeRun { .. }) => return,
                            Err(e) => CubeStatus::Error { message: e.to_string() },
                        };
                        let retry = matches!(status, CubeStatus::Error { .. }) && attempt <= cfg.max_retries;
                        if tx.send(Msg { cube, attempt, wall, status }).is_err() {
                            return;
                        }
                        if !retry || cancel.load(Ordering::Relaxed) {
                            break;
                        }
                    }
                }
            });
        }
        drop(tx);
        for msg in rx {
            if interrupted {
                continue;
            }
            let rec = Record::Result { cube: msg.cube, attempt: msg.attempt, wall_seconds: msg.wall, status: msg.status.clone() };
            writeln!(journal, "{}", serde_json::to_string(&rec)?)?;
            journal.sync_data()?;
            let st = &mut states[msg.cube];
            st.attempts = st.attempts.max(msg.attempt);
            st.wall = msg.wall;
            if matches!(msg.status, CubeStatus::Sat { .. }) {
                cancel.store(true, Ordering::Relaxed);
            }
            st.status = Some(msg.status);
            solved += 1;
            if cfg.stop_after.is_some_and(|k| solved >= k) {
                interrupted = true;
                cancel.store(true, Ordering::Relaxed);
            }
        }
        Ok(())
    })?;

    // the verdict comes from the journal, not from in-memory state
    let Replay { states, total, .. } = replay(&cfg.journal, cubes.len(), &fp)?;
    let mut counts: HashMap<&'static str, usize> = HashMap::new();
    let mut model = None;
    let mut summaries = Vec::with_capacity(cubes.len());
    for (i, st) in states.iter().enumerate() {
        let status = st.status.clone().unwrap_or(CubeStatus::Pending);
        if let CubeStatus::Sat { model: lits } = &status {
            if model.is_none() {
                model = Some(Model::from_dimacs_lits(f.num_vars(), lits)?);
            }
        }
        *counts.entry(status.label()).or_default() += 1;
        summaries.push(CubeSummary { index: i, status: status.label(), attempts: st.attempts, wall_seconds: st.wall });
    }
    let verdict = if model.is_some() {
        Verdict::Sat
    } else if counts.get("unsat").copied().unwrap_or(0) == cubes.len() {
        Verdict::Unsat
    } else {
        Verdict::Unknown
    };
    Ok(CampaignReport {
        verdict,
        model,
        num_cubes: cubes.len(),
        counts,
        cubes: summaries,
        total_cube_seconds: total,
        wall_seconds: start.elapsed().as_secs_f64(),
        solved_this_run: solved,
        interrupted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::{build_psi, Conjecture, EncodingConfig};
    use crate::solver::cube::builtin_cubes;
    use std::sync::atomic::AtomicU32;

    fn psi4() -> CnfFormula {
        build_psi(&EncodingConfig::new(4, Conjecture::AntipodalGeodesic)).unwrap().formula
    }

    #[test]
    fn internal_campaign_is_unsat() {
        let f = psi4();
        let cubes = builtin_cubes(&f, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        for schedule in [Schedule::Dynamic, Schedule::Static] {
            let mut cfg = CampaignConfig::new(dir.path().join(format!("{schedule:?}.jsonl")), 3);
            cfg.schedule = schedule;
            let r = run_campaign(&f, &cubes, &InternalCubeSolver::default(), &cfg).unwrap();
            assert_eq!(r.verdict, Verdict::Unsat);
            assert_eq!(r.counts["unsat"], 8);
        }
    }

    #[test]
    fn one_sat_cube_decides_the_campaign() {
        let mut f = CnfFormula::new();
        let vars: Vec<_> = (0..4).map(|_| f.new_var()).collect();
        // satisfiable only with all variables true
        for v in &vars {
            f.add_unit(v.pos());
        }
        let cubes = builtin_cubes(&f, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cfg = CampaignConfig::new(dir.path().join("j.jsonl"), 2);
        let r = run_campaign(&f, &cubes, &InternalCubeSolver::default(), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Sat);
        f.check_model(r.model.as_ref().unwrap()).unwrap();
    }

    #[test]
    fn errors_are_retried_once() {
        let f = psi4();
        let cubes = builtin_cubes(&f, 2).unwrap();
        let calls = AtomicU32::new(0);
        let flaky = FnSolver(|_: &CnfFormula, c: &Cube| {
            let k = calls.fetch_add(1, Ordering::SeqCst);
            if k == 0 {
                Err(Error::UnknownExit(Some(139)))
            } else {
                let _ = c;
                Ok(Outcome::Unsat)
            }
        });
        let dir = tempfile::tempdir().unwrap();
        let cfg = CampaignConfig::new(dir.path().join("j.jsonl"), 1);
        let r = run_campaign(&f, &cubes, &flaky, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(r.cubes.iter().map(|c| c.attempts).max(), Some(2));

        let broken = FnSolver(|_: &CnfFormula, _: &Cube| -> Result<Outcome> { Err(Error::UnknownExit(None)) });
        let cfg = CampaignConfig::new(dir.path().join("k.jsonl"), 2);
        let r = run_campaign(&f, &cubes, &broken, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Unknown);
        assert!(r.cubes.iter().all(|c| c.attempts == 2));
    }

    #[test]
    fn kill_and_resume_reaches_the_same_verdict() {
        let f = psi4();
        let cubes = builtin_cubes(&f, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.jsonl");
        let stub = FnSolver(|_: &CnfFormula, _: &Cube| -> Result<Outcome> { Ok(Outcome::Unsat) });
        let mut cfg = CampaignConfig::new(&path, 2);
        cfg.stop_after = Some(5);
        let r = run_campaign(&f, &cubes, &stub, &cfg).unwrap();
        assert!(r.interrupted);
        assert_eq!(r.verdict, Verdict::Unknown);
        // a torn line at the end, as left by a crash mid-write
        OpenOptions::new().append(true).open(&path).unwrap().write_all(b"{\"type\":\"res").unwrap();
        cfg.stop_after = None;
        let calls = AtomicU32::new(0);
        let counting = FnSolver(|_: &CnfFormula, _: &Cube| -> Result<Outcome> {
            calls.fetch_add(1, Ordering::SeqCst);
            Ok(Outcome::Unsat)
        });
        let r = run_campaign(&f, &cubes, &counting, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(calls.load(Ordering::SeqCst) as usize, 16 - 5);
        // a third run has nothing left to do
        let r = run_campaign(&f, &cubes, &counting, &cfg).unwrap();
        assert_eq!((r.verdict, r.solved_this_run), (Verdict::Unsat, 0));
    }

    #[test]
    fn journal_of_another_formula_is_rejected() {
        let f = psi4();
        let cubes = builtin_cubes(&f, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cfg = CampaignConfig::new(dir.path().join("j.jsonl"), 1);
        run_campaign(&f, &cubes, &InternalCubeSolver::default(), &cfg).unwrap();
        let other = builtin_cubes(&f, 2).unwrap();
        assert!(run_campaign(&f, &other, &InternalCubeSolver::default(), &cfg).is_err());
    }
}
