//! External SAT solvers run as subprocesses.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::cnf::{write_dimacs, write_dimacs_with_cube, CnfFormula, Cube, Model};
use crate::error::{Error, Result};

/// Overrides the default solver command line.
pub const SOLVER_ENV: &str = "HYPERCUBE_SAT_SOLVER";

/// Placeholder replaced by the formula path in a command template.
pub const PATH_PLACEHOLDER: &str = "{}";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub program: String,
    /// Arguments; one of them should contain `{}`. Otherwise the formula
    /// path is appended.
    pub args: Vec<String>,
    pub sat_exit_code: i32,
    pub unsat_exit_code: i32,
    pub timeout: Duration,
}

impl SolverSpec {
    /// Whitespace-separated command template, e.g. `kissat -q {}`.
    pub fn from_command_line(cmd: &str, timeout: Duration) -> Result<Self> {
        let mut parts = cmd.split_whitespace().map(str::to_string);
        let program = parts
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty solver command".into()))?;
        let spec = SolverSpec {
            program,
            args: parts.collect(),
            sat_exit_code: 10,
            unsat_exit_code: 20,
            timeout,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `$HYPERCUBE_SAT_SOLVER` if set, else `kissat -q {}`.
    pub fn from_env(timeout: Duration) -> Result<Self> {
        match std::env::var(SOLVER_ENV) {
            Ok(cmd) if !cmd.trim().is_empty() => Self::from_command_line(&cmd, timeout),
            _ => Self::from_command_line("kissat -q {}", timeout),
        }
    }

    pub fn with_exit_codes(mut self, sat: i32, unsat: i32) -> Result<Self> {
        self.sat_exit_code = sat;
        self.unsat_exit_code = unsat;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sat_exit_code == self.unsat_exit_code {
            return Err(Error::InvalidArgument("SAT and UNSAT exit codes must differ".into()));
        }
        if self.timeout.is_zero() {
            return Err(Error::InvalidArgument("solver timeout must be positive".into()));
        }
        Ok(())
    }

    pub fn command_line(&self) -> String {
        std::iter::once(self.program.as_str())
            .chain(self.args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn argv(&self, formula: &Path) -> Vec<String> {
        let path = formula.to_string_lossy();
        let mut replaced = false;
        let mut out: Vec<String> = self
            .args
            .iter()
            .map(|a| {
                if a.contains(PATH_PLACEHOLDER) {
                    replaced = true;
                    a.replace(PATH_PLACEHOLDER, &path)
                } else {
                    a.clone()
                }
            })
            .collect();
        if !replaced {
            out.push(path.into_owned());
        }
        out
    }

    /// Is the program runnable (absolute path exists or found on `PATH`)?
    pub fn is_available(&self) -> bool {
        resolve_program(&self.program).is_some()
    }
}

pub(crate) fn resolve_program(program: &str) -> Option<PathBuf> {
    let p = Path::new(program);
    if p.components().count() > 1 {
        return p.is_file().then(|| p.to_path_buf());
    }
    std::env::var_os("PATH").and_then(|paths| {
        std::env::split_paths(&paths)
            .map(|d| d.join(program))
            .find(|c| c.is_file())
    })
}

/// One subprocess invocation.
#[derive(Clone, Debug)]
pub struct ExternalRun {
    pub outcome: Outcome,
    pub exit_code: Option<i32>,
    pub wall: Duration,
    pub timed_out: bool,
}

/// Runs the solver on an existing DIMACS file. `num_vars` sizes the model;
/// the caller checks it against the formula.
pub fn run_on_file(path: &Path, num_vars: u32, spec: &SolverSpec, cancel: Option<&Arc<AtomicBool>>) -> Result<ExternalRun> {
    spec.validate()?;
    let out = tempfile::NamedTempFile::new()?;
    let start = Instant::now();
    let mut child = Command::new(&spec.program)
        .args(spec.argv(path))
        .stdin(Stdio::null())
        .stdout(out.reopen()?)
        .stderr(Stdio::null())
        .spawn()
        .map_err(|source| Error::SolverSpawn { command: spec.command_line(), source })?;
    let mut timed_out = false;
    let status = loop {
        if let Some(st) = child.try_wait()? {
            break Some(st);
        }
        let cancelled = cancel.is_some_and(|c| c.load(Ordering::Relaxed));
        if cancelled || start.elapsed() >= spec.timeout {
            timed_out = !cancelled;
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let wall = start.elapsed();
    let Some(status) = status else {
        return Ok(ExternalRun { outcome: Outcome::Unknown, exit_code: None, wall, timed_out });
    };
    let code = status.code();
    let outcome = if code == Some(spec.sat_exit_code) {
        let lits = parse_model_lines(BufReader::new(File::open(out.path())?))?;
        Outcome::Sat(Model::from_dimacs_lits(num_vars, &lits)?)
    } else if code == Some(spec.unsat_exit_code) {
        Outcome::Unsat
    } else {
        return Err(Error::UnknownExit(code));
    };
    Ok(ExternalRun { outcome, exit_code: code, wall, timed_out })
}

/// Collects the literals of all `v` lines up to the terminating 0.
pub fn parse_model_lines<R: BufRead>(r: R) -> Result<Vec<i32>> {
    let mut lits = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let Some(rest) = line.strip_prefix('v') else { continue };
        for tok in rest.split_whitespace() {
            let x: i32 = tok.parse().map_err(|_| Error::parse(i + 1, format!("bad model literal `{tok}`")))?;
            if x == 0 {
                return Ok(lits);
            }
            lits.push(x);
        }
    }
    if lits.is_empty() {
        return Err(Error::parse(0, "solver reported SAT without a model"));
    }
    Ok(lits)
}

fn write_temp(f: &CnfFormula, cube: Option<&Cube>) -> Result<tempfile::NamedTempFile> {
    let tmp = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        match cube {
            Some(c) => write_dimacs_with_cube(f, c, &mut w)?,
            None => write_dimacs(f, &mut w)?,
        }
        w.flush()?;
    }
    Ok(tmp)
}

/// Solves `f ∧ cube` externally; SAT models are re-checked against every
/// clause and every cube literal.
pub fn solve_external_run(f: &CnfFormula, cube: Option<&Cube>, spec: &SolverSpec, cancel: Option<&Arc<AtomicBool>>) -> Result<ExternalRun> {
    let tmp = write_temp(f, cube)?;
    let run = run_on_file(tmp.path(), f.num_vars(), spec, cancel)?;
    if let Outcome::Sat(m) = &run.outcome {
        f.check_model(m)?;
        if let Some(c) = cube {
            if !c.satisfied_by(m) {
                return Err(Error::InvalidArgument("solver model violates the cube".into()));
            }
        }
    }
    Ok(run)
}

pub fn solve_external(f: &CnfFormula, spec: &SolverSpec) -> Result<Outcome> {
    Ok(solve_external_run(f, None, spec, None)?.outcome)
}

/// CPU seconds (user + system) consumed by waited-for children so far.
pub fn children_cpu_seconds() -> f64 {
    // SAFETY: getrusage only writes into the provided struct.
    unsafe {
        let mut ru: libc::rusage = std::mem::zeroed();
        if libc::getrusage(libc::RUSAGE_CHILDREN, &mut ru) != 0 {
            return 0.0;
        }
        let t = |tv: libc::timeval| tv.tv_sec as f64 + tv.tv_usec as f64 * 1e-6;
        t(ru.ru_utime) + t(ru.ru_stime)
    }
}

/// CPU seconds of this process.
pub fn self_cpu_seconds() -> f64 {
    // SAFETY: as above.
    unsafe {
        let mut ru: libc::rusage = std::mem::zeroed();
        if libc::getrusage(libc::RUSAGE_SELF, &mut ru) != 0 {
            return 0.0;
        }
        let t = |tv: libc::timeval| tv.tv_sec as f64 + tv.tv_usec as f64 * 1e-6;
        t(ru.ru_utime) + t(ru.ru_stime)
    }
}
