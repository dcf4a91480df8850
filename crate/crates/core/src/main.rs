use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hypercube_sat::alternating::alternating_coloring;
use hypercube_sat::bounds::{build_fhat, build_f, build_mu, compute_bound, count_value, BoundEncoding, BoundKind, Threshold};
use hypercube_sat::cnf::{parse_cubes, parse_dimacs, write_dimacs, write_icnf, write_registry, CnfFormula};
use hypercube_sat::encode::{build_conjecture, CardinalityEncoding, Conjecture, EncodingConfig, PathSources};
use hypercube_sat::geodesic::{expected_changes_bound, simulate};
use hypercube_sat::hypercube::{Coloring, SymmetrySet, Vertex};
use hypercube_sat::oracle::{all_profiles, coloring_stats, exhaustive_sweep, SweepOptions};
use hypercube_sat::report::{
    load_bound_records, measured_sizes, published_fhat, size_table, value_table, BoundRecord, FileHash, RunManifest,
};
use hypercube_sat::solver::campaign::{run_campaign, CampaignConfig, FnSolver, Schedule, Verdict};
use hypercube_sat::solver::cube::{generate_cubes, Splitter};
use hypercube_sat::solver::external::{children_cpu_seconds, self_cpu_seconds};
use hypercube_sat::solver::{Backend, Outcome, SolverSpec};
use hypercube_sat::verify::{verify, Mode};

#[derive(Parser)]
#[command(name = "hypercube-sat", version, about = "Encodings, oracles and solver campaigns for hypercube edge colorings")]
struct Cli {
    /// Where to write the run manifest (default: next to the main output, else stderr).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the CNF for one of the four conjectures.
    Encode(EncodeArgs),
    /// Write a counting formula F, F-hat or the blocking-pair formula.
    Bound(BoundArgs),
    /// Binary-search the exact optimum of a counting formula.
    BoundSearch(BoundSearchArgs),
    /// Exact values by exhaustive enumeration, or the profile of one coloring.
    Oracle(OracleArgs),
    /// Monte Carlo run of the chunked random geodesic.
    Simulate(SimulateArgs),
    /// Solve a DIMACS file.
    Solve(SolveArgs),
    /// Split a DIMACS file into cubes.
    Cube(CubeArgs),
    /// Solve every cube of a formula with a worker pool.
    Campaign(CampaignArgs),
    /// Build, solve and oracle-check one conjecture instance.
    Verify(VerifyArgs),
    /// Compare measured values with the published tables.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    #[arg(long)]
    n: u32,
    /// Disable lex-leader symmetry breaking.
    #[arg(long)]
    no_symmetry_breaking: bool,
    #[arg(long, default_value_t = 30)]
    max_comp: usize,
    /// Disable the minimum red-degree constraint.
    #[arg(long)]
    no_red_degree: bool,
    #[arg(long, value_enum, default_value_t = SymSet::Transpositions)]
    symmetry_set: SymSet,
    #[arg(long, value_enum, default_value_t = Sources::Half)]
    sources: Sources,
    #[arg(long, value_enum, default_value_t = Card::Mtot)]
    cardinality: Card,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymSet {
    Transpositions,
    WithFlips,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sources {
    Half,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Card {
    Mtot,
    Seq,
}

impl ConfigArgs {
    fn config(&self, target: Conjecture) -> EncodingConfig {
        let mut cfg = EncodingConfig::new(self.n, target)
            .with_symmetry_breaking(!self.no_symmetry_breaking)
            .with_max_comp(self.max_comp)
            .with_red_degree(!self.no_red_degree)
            .with_path_sources(match self.sources {
                Sources::Half => PathSources::LexSmallerHalf,
                Sources::All => PathSources::All,
            });
        cfg.symmetry_set = match self.symmetry_set {
            SymSet::Transpositions => SymmetrySet::TranspositionsWithFlip,
            SymSet::WithFlips => SymmetrySet::WithPureFlips,
        };
        cfg.cardinality = match self.cardinality {
            Card::Mtot => CardinalityEncoding::ModuloTotalizer,
            Card::Seq => CardinalityEncoding::SequentialCounter,
        };
        cfg
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverKind::External)]
    solver: SolverKind,
    /// Solver command template (`{}` is the formula path); overrides $HYPERCUBE_SAT_SOLVER.
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Per-call timeout in seconds.
    #[arg(long, default_value_t = 7200)]
    timeout: u64,
    /// Conflict budget for the internal solver.
    #[arg(long)]
    conflicts: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Internal,
    External,
}

impl SolverArgs {
    fn backend(&self) -> anyhow::Result<Backend> {
        Ok(match self.solver {
            SolverKind::Internal => Backend::Internal { conflicts: self.conflicts },
            SolverKind::External => {
                let t = Duration::from_secs(self.timeout.max(1));
                let spec = match &self.solver_cmd {
                    Some(cmd) => SolverSpec::from_command_line(cmd, t)?,
                    None => SolverSpec::from_env(t)?,
                };
                Backend::External(spec)
            }
        })
    }
}

#[derive(Args)]
struct EncodeArgs {
    /// Conjecture number, 1 to 4.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
    conjecture: u32,
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write `name index` lines for every named variable.
    #[arg(long)]
    registry: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    kind: BoundKind,
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Threshold for f and fhat, e.g. 21/16 or 0.875.
    #[arg(long)]
    alpha: Option<Threshold>,
    /// Number of blocking pairs for mu.
    #[arg(long)]
    target: Option<u32>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct BoundSearchArgs {
    #[arg(long)]
    kind: BoundKind,
    #[command(flatten)]
    cfg: ConfigArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Directory for the JSON record and the witness coloring.
    #[arg(long, default_value = "runs")]
    records: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    kind: OracleKind,
    #[arg(long)]
    n: Option<u32>,
    /// Coloring file for `profile`.
    #[arg(long)]
    coloring: Option<PathBuf>,
    /// Allow the 2^32-coloring sweep at n = 4.
    #[arg(long)]
    long_run: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    F,
    Fhat,
    Mu,
    Profile,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// `alternating`, `random`, or a coloring file.
    #[arg(long, default_value = "alternating")]
    coloring: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// f-hat(k) used in the bound (default: the known value for k).
    #[arg(long)]
    fhat: Option<Threshold>,
    /// Also optimize the final partial chunk.
    #[arg(long)]
    optimize_remainder: bool,
}

#[derive(Args)]
struct SolveArgs {
    formula: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the model as DIMACS literals.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CubeArgs {
    formula: PathBuf,
    #[arg(long, default_value_t = 10)]
    depth: u32,
    /// External cubing tool template using {in}, {out} and {depth}.
    #[arg(long)]
    tool: Option<String>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct CampaignArgs {
    formula: PathBuf,
    /// Cube file (`a … 0` lines).
    #[arg(long)]
    cubes: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Journal for a new campaign.
    #[arg(long, conflicts_with = "resume")]
    journal: Option<PathBuf>,
    /// Continue the campaign recorded in this journal.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Assign cube i to worker i mod W instead of a shared queue.
    #[arg(long)]
    static_schedule: bool,
    /// Structural check only: every cube is reported UNSAT without solving.
    #[arg(long)]
    dry_run: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
    conjecture: u32,
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long, value_enum, default_value_t = VerifyMode::Direct)]
    mode: VerifyMode,
    #[arg(long, default_value_t = 8)]
    depth: u32,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    journal: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Direct,
    Campaign,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, value_enum)]
    kind: ReportKind,
    #[arg(long, default_value = "runs")]
    records: PathBuf,
    /// Largest n for the encoding-size table.
    #[arg(long, default_value_t = 8)]
    max_n: u32,
    /// Relative tolerance for flagging deviations.
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    EncodingSizes,
    Bounds,
    Mu,
}

/// Exit status of a completed run.
enum Status {
    Done,
    Unknown,
}

struct Ctx {
    manifest: RunManifest,
    /// Output the manifest is named after, if not the first one.
    primary: Option<PathBuf>,
    start: Instant,
    cpu0: f64,
}

impl Ctx {
    fn output(&mut self, p: &Path) -> anyhow::Result<()> {
        self.manifest.outputs.push(FileHash::of(p)?);
        Ok(())
    }

    fn input(&mut self, p: &Path) -> anyhow::Result<()> {
        self.manifest.inputs.push(FileHash::of(p)?);
        Ok(())
    }
}

fn write_formula(f: &CnfFormula, path: &Path) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_dimacs(f, &mut w)?;
    w.flush()?;
    Ok(())
}

fn read_formula(path: &Path) -> anyhow::Result<CnfFormula> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(parse_dimacs(BufReader::new(file))?)
}

fn read_coloring(path: &Path) -> anyhow::Result<Coloring> {
    Ok(Coloring::parse_text(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?)
}

/// Bad invocation detected after parsing; exits with status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn print_json(v: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(v)?) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn ratio_json(r: num_rational::Rational64) -> serde_json::Value {
    json!({ "fraction": format!("{}/{}", r.numer(), r.denom()), "decimal": *r.numer() as f64 / *r.denom() as f64 })
}

fn tool_version(backend: &Backend) -> Option<(String, String)> {
    let Backend::External(spec) = backend else { return None };
    let out = std::process::Command::new(&spec.program).arg("--version").output().ok()?;
    let v = String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or("").trim().to_string();
    Some((spec.program.clone(), v))
}

fn outcome_status(v: Verdict) -> Status {
    if v == Verdict::Unknown {
        Status::Unknown
    } else {
        Status::Done
    }
}

fn verdict_of(o: &Outcome) -> Verdict {
    match o {
        Outcome::Sat(_) => Verdict::Sat,
        Outcome::Unsat => Verdict::Unsat,
        Outcome::Unknown => Verdict::Unknown,
    }
}

fn cmd_encode(a: &EncodeArgs, ctx: &mut Ctx) -> anyhow::Result<Status> {
    let cfg = a.cfg.config(Conjecture::from_number(a.conjecture)?);
    let enc = build_conjecture(&cfg)?;
    write_formula(&enc.formula, &a.output)?;
    ctx.output(&a.output)?;
    if let Some(r) = &a.registry {
        let mut w = BufWriter::new(File::create(r)?);
        write_registry(&enc.formula, &mut w)?;
        w.flush()?;
        drop(w);
        ctx.output(r)?;
    }
    print_json(&json!({
        "conjecture": a.conjecture,
        "n": a.cfg.n,
        "vars": enc.formula.num_vars(),
        "clauses": enc.formula.num_clauses(),
        "symmetry_breaking_clauses": enc.sb_clauses,
        "red_degree_clauses": enc.degree_clauses,
        "output": a.output,
    }))?;
    Ok(Status::Done)
}

fn cmd_bound(a: &BoundArgs, ctx: &mut Ctx) -> anyhow::Result<Status> {
    let cfg = a.cfg.config(Conjecture::OneChangeGeodesic);
    let n = a.cfg.n;
    let enc: BoundEncoding = match a.kind {
        BoundKind::Mu => {
            let Some(t) = a.target else { return Err(usage("--target is required for mu")) };
            build_mu(n, t, &cfg)?
        }
        kind => {
            let Some(alpha) = a.alpha else { return Err(usage(format!("--alpha is required for {kind}"))) };
            if kind == BoundKind::F {
                build_f(n, alpha, &cfg)?
            } else {
                build_fhat(n, alpha, &cfg)?
            }
        }
    };
    write_formula(&enc.formula, &a.output)?;
    ctx.output(&a.output)?;
    print_json(&json!({
        "kind": a.kind,
        "n": n,
        "count": enc.count,
        "vars": enc.formula.num_vars(),
        "clauses": enc.formula.num_clauses(),
        "output": a.output,
    }))?;
    Ok(Status::Done)
}

fn cmd_bound_search(a: &BoundSearchArgs, ctx: &mut Ctx) -> anyhow::Result<Status> {
    let cfg = a.cfg.config(Conjecture::OneChangeGeodesic);
    let backend = a.solver.backend()?;
    ctx.manifest.tool_versions.extend(tool_version(&backend));
    let n = a.cfg.n;
    let result = compute_bound(a.kind, n, &cfg, |f| backend.solve(f));
    let r = match result {
        Ok(r) => r,
        Err(hypercube_sat::Error::InvalidArgument(msg)) if msg.contains("no verdict") => {
            eprintln!("{msg}");
            return Ok(Status::Unknown);
        }
        Err(e) => return Err(e.into()),
    };
    std::fs::create_dir_all(&a.records)?;
    let stem = format!("{}-n{}", a.kind, n);
    let witness_path = match &r.witness {
        Some(c) => {
            let p = a.records.join(format!("{stem}.coloring"));
            std::fs::write(&p, c.to_text())?;
            ctx.output(&p)?;
            Some(p)
        }
        None => None,
    };
    let unsat = r.probes.iter().find(|p| !p.sat && p.count == r.count + 1);
    let record = BoundRecord {
        kind: a.kind,
        n,
        count: r.count,
        value: format!("{}/{}", r.value.numer(), r.value.denom()),
        sat_witness_path: witness_path,
        unsat_evidence: json!({
            "count": r.count + 1,
            "value": unsat.map(|_| {
                let v = count_value(a.kind, n, r.count + 1);
                format!("{}/{}", v.numer(), v.denom())
            }),
            "solver": backend.describe(),
            "verdict": if unsat.is_some() { "unsat" } else { "above range" },
            "seconds": unsat.map(|p| p.seconds),
        }),
    };
    let path = a.records.join(format!("{stem}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&record)?)?;
    ctx.output(&path)?;
    ctx.primary = Some(path.clone());
    print_json(&json!({
        "kind": a.kind,
        "n": n,
        "count": r.count,
        "value": ratio_json(r.value),
        "sat_witness_path": record.sat_witness_path,
        "unsat_evidence": record.unsat_evidence,
        "probes": r.probes,
        "record": path,
    }))?;
    Ok(Status::Done)
}

fn cmd_oracle(a: &OracleArgs, ctx: &mut Ctx) -> anyhow::Result<Status> {
    let start = Instant::now();
    if let OracleKind::Profile = a.kind {
        let Some(path) = &a.coloring else { return Err(usage("--coloring is required for profile")) };
        ctx.input(path)?;
        let c = read_coloring(path)?;
        let st = coloring_stats(&c);
        let profiles: Vec<_> = all_profiles(&c)
            .into_iter()
            .enumerate()
            .map(|(u, p)| json!({ "u": Vertex::new(u as u32, c.dim()).map(|v| v.to_string()).unwrap_or_default(), "profile": p }))
            .collect();
        print_json(&json!({
            "n": c.dim(),
            "f_value": ratio_json(st.f_value()),
            "fhat_value": ratio_json(st.fhat_value()),
            "fhat_directed_value": ratio_json(st.fhat_directed_value()),
            "blocking_pairs": st.blocking,
            "profiles": profiles,
            "runtime_seconds": start.elapsed().as_secs_f64(),
        }))?;
        return Ok(Status::Done);
    }
    let Some(n) = a.n else { return Err(usage("--n is required")) };
    let sweep = exhaustive_sweep(n, SweepOptions { allow_long: a.long_run, force_quotient: false })?;
    let (value, arg) = match a.kind {
        OracleKind::F => (ratio_json(sweep.f), sweep.argmax_f),
        OracleKind::Fhat => (ratio_json(sweep.fhat), sweep.argmax_fhat),
        OracleKind::Mu => (json!(sweep.mu), sweep.argmax_mu),
        OracleKind::Profile => unreachable!(),
    };
    print_json(&json!({
        "kind": match a.kind { OracleKind::F => "f", OracleKind::Fhat => "fhat", _ => "mu" },
        "n": n,
        "value": value,
        "fhat_directed": ratio_json(sweep.fhat_directed),
        "argmax_coloring": Coloring::from_index(n, arg)?.to_text(),
        "colorings_evaluated": sweep.evaluated,
        "runtime_seconds": start.elapsed().as_secs_f64(),
    }))?;
    Ok(Status::Done)
}

fn cmd_simulate(a: &SimulateArgs, ctx: &mut Ctx) -> anyhow::Result<Status> {
    ctx.manifest.seed = Some(a.seed);
    let c = match a.coloring.as_str() {
        "alternating" => alternating_coloring(a.n)?,
        "random" => {
            use rand::SeedableRng;
            Coloring::random(a.n, &mut rand_chacha::ChaCha8Rng::seed_from_u64(a.seed))?
        }
        path => {
            ctx.input(Path::new(path))?;
            read_coloring(Path::new(path))?
        }
    };
    let r = simulate(&c, a.k, a.trials, a.seed, a.optimize_remainder)?;
    let fhat = a.fhat.map(|t| t.as_ratio()).or_else(|| published_fhat(a.k));
    let bound = match fhat {
        Some(fh) => Some(expected_changes_bound(a.n, a.k, fh)?),
        None => None,
    };
    let bound_f = bound.map(|b| *b.numer() as f64 / *b.denom() as f64);
    let pass = bound_f.map(|b| r.mean <= b + 3.0 * r.stderr);
    print_json(&json!({
        "n": a.n,
        "k": a.k,
        "coloring": a.coloring,
        "trials": r.trials,
        "seed": r.seed,
        "mean": r.mean,
        "stderr": r.stderr,
        "max": r.max,
        "bound": bound_f,
        "pass": pass,
    }))?;
    Ok(Status::Done)
}

fn cmd_solve(a: &SolveArgs, ctx: &mut Ctx) -> anyhow::Result<Status> {
    ctx.input(&a.formula)?;
    let f = read_formula(&a.formula)?;
    let backend = a.solver.backend()?;
    ctx.manifest.tool_versions.extend(tool_version(&backend));
    let start = Instant::now();
    let o = backend.solve(&f)?;
    if let (Outcome::Sat(m), Some(p)) = (&o, &a.output) {
        let lits: Vec<String> = m.to_dimacs_lits().iter().map(i32::to_string).collect();
        std::fs::write(p, format!("v {} 0\n", lits.join(" ")))?;
        ctx.output(p)?;
    }
    let v = verdict_of(&o);
    print_json(&json!({
        "formula": a.formula,
        "solver": backend.describe(),
        "verdict": v,
        "seconds": start.elapsed().as_secs_f64(),
    }))?;
    Ok(outcome_status(v))
}

fn cmd_cube(a: &CubeArgs, ctx: &mut Ctx) -> anyhow::Result<Status> {
    ctx.input(&a.formula)?;
    let f = read_formula(&a.formula)?;
    let splitter = match &a.tool {
        Some(t) => Splitter::External { template: t.clone() },
        None => Splitter::Builtin,
    };
    let cubes = generate_cubes(&f, a.depth, &splitter)?;
    let mut w = BufWriter::new(File::create(&a.output)?);
    write_icnf(&CnfFormula::new(), &cubes, &mut w)?;
    w.flush()?;
    drop(w);
    ctx.output(&a.output)?;
    print_json(&json!({ "formula": a.formula, "depth": a.depth, "cubes": cubes.len(), "output": a.output }))?;
    Ok(Status::Done)
}

fn cmd_campaign(a: &CampaignArgs, ctx: &mut Ctx) -> anyhow::Result<Status> {
    ctx.input(&a.formula)?;
    ctx.input(&a.cubes)?;
    let f = read_formula(&a.formula)?;
    let cubes = parse_cubes(&std::fs::read_to_string(&a.cubes)?)?;
    let journal = match (&a.journal, &a.resume) {
        (_, Some(r)) => {
            if !r.exists() {
                return Err(usage(format!("journal {} does not exist", r.display())));
            }
            r.clone()
        }
        (Some(j), None) => {
            if j.exists() {
                return Err(usage(format!("journal {} exists; use --resume to continue it", j.display())));
            }
            j.clone()
        }
        (None, None) => a.formula.with_extension("journal.jsonl"),
    };
    let mut cfg = CampaignConfig::new(&journal, a.workers);
    if a.static_schedule {
        cfg.schedule = Schedule::Static;
    }
    let backend = a.solver.backend()?;
    let report = if a.dry_run {
        let stub = FnSolver(|_: &CnfFormula, _: &hypercube_sat::cnf::Cube| Ok(Outcome::Unsat));
        run_campaign(&f, &cubes, &stub, &cfg)?
    } else {
        ctx.manifest.tool_versions.extend(tool_version(&backend));
        run_campaign(&f, &cubes, backend.cube_solver().as_ref(), &cfg)?
    };
    ctx.output(&journal)?;
    print_json(&json!({
        "journal": journal,
        "dry_run": a.dry_run,
        "report": report,
    }))?;
    Ok(outcome_status(report.verdict))
}

fn cmd_verify(a: &VerifyArgs, ctx: &mut Ctx) -> anyhow::Result<Status> {
    let cfg = a.cfg.config(Conjecture::from_number(a.conjecture)?);
    let backend = a.solver.backend()?;
    ctx.manifest.tool_versions.extend(tool_version(&backend));
    let mode = match a.mode {
        VerifyMode::Direct => Mode::Direct,
        VerifyMode::Campaign => Mode::Campaign {
            depth: a.depth,
            workers: a.workers,
            journal: a
                .journal
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("verify-c{}-n{}.journal.jsonl", a.conjecture, a.cfg.n))),
            schedule: Schedule::Dynamic,
            splitter: Splitter::Builtin,
        },
    };
    let r = verify(&cfg, &mode, &backend)?;
    if let Mode::Campaign { journal, .. } = &mode {
        ctx.output(journal)?;
    }
    print_json(&serde_json::to_value(&r)?)?;
    Ok(outcome_status(r.verdict))
}

fn cmd_report(a: &ReportArgs) -> anyhow::Result<Status> {
    match a.kind {
        ReportKind::EncodingSizes => {
            let rows = (4..=a.max_n.min(9))
                .map(|n| measured_sizes(n, PathSources::LexSmallerHalf))
                .collect::<hypercube_sat::Result<Vec<_>>>()?;
            println!("measured / published, no symmetry breaking ('*' = beyond tolerance)");
            print!("{}", size_table(&rows, a.tolerance));
        }
        ReportKind::Bounds => {
            let recs = load_bound_records(&a.records)?;
            print!("{}", value_table(&recs, &[BoundKind::F, BoundKind::FHat], &[3, 4, 5, 6]));
        }
        ReportKind::Mu => {
            let recs = load_bound_records(&a.records)?;
            print!("{}", value_table(&recs, &[BoundKind::Mu], &[2, 3, 4, 5, 6, 7]));
        }
    }
    Ok(Status::Done)
}

fn run(cli: &Cli) -> anyhow::Result<Status> {
    let (name, params) = match &cli.cmd {
        Cmd::Encode(_) => ("encode", json!(std::env::args().skip(1).collect::<Vec<_>>())),
        Cmd::Bound(_) => ("bound", json!(std::env::args().skip(1).collect::<Vec<_>>())),
        Cmd::BoundSearch(_) => ("bound-search", json!(std::env::args().skip(1).collect::<Vec<_>>())),
        Cmd::Oracle(_) => ("oracle", json!(std::env::args().skip(1).collect::<Vec<_>>())),
        Cmd::Simulate(_) => ("simulate", json!(std::env::args().skip(1).collect::<Vec<_>>())),
        Cmd::Solve(_) => ("solve", json!(std::env::args().skip(1).collect::<Vec<_>>())),
        Cmd::Cube(_) => ("cube", json!(std::env::args().skip(1).collect::<Vec<_>>())),
        Cmd::Campaign(_) => ("campaign", json!(std::env::args().skip(1).collect::<Vec<_>>())),
        Cmd::Verify(_) => ("verify", json!(std::env::args().skip(1).collect::<Vec<_>>())),
        Cmd::Report(_) => ("report", json!(std::env::args().skip(1).collect::<Vec<_>>())),
    };
    let mut ctx = Ctx { manifest: RunManifest::new(name, params), primary: None, start: Instant::now(), cpu0: self_cpu_seconds() + children_cpu_seconds() };
    let status = match &cli.cmd {
        Cmd::Encode(a) => cmd_encode(a, &mut ctx)?,
        Cmd::Bound(a) => cmd_bound(a, &mut ctx)?,
        Cmd::BoundSearch(a) => cmd_bound_search(a, &mut ctx)?,
        Cmd::Oracle(a) => cmd_oracle(a, &mut ctx)?,
        Cmd::Simulate(a) => cmd_simulate(a, &mut ctx)?,
        Cmd::Solve(a) => cmd_solve(a, &mut ctx)?,
        Cmd::Cube(a) => cmd_cube(a, &mut ctx)?,
        Cmd::Campaign(a) => cmd_campaign(a, &mut ctx)?,
        Cmd::Verify(a) => cmd_verify(a, &mut ctx)?,
        Cmd::Report(a) => cmd_report(a)?,
    };
    ctx.manifest.wall_seconds = ctx.start.elapsed().as_secs_f64();
    ctx.manifest.cpu_seconds = self_cpu_seconds() + children_cpu_seconds() - ctx.cpu0;
    let text = serde_json::to_string_pretty(&ctx.manifest)?;
    let primary = ctx.primary.clone().or_else(|| ctx.manifest.outputs.first().map(|o| o.path.clone()));
    let target = cli.manifest.clone().or_else(|| {
        primary.map(|o| {
            let mut p = o.into_os_string();
            p.push(".manifest.json");
            PathBuf::from(p)
        })
    });
    match target {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing manifest {}", p.display()))?,
        None => eprintln!("{}", serde_json::to_string(&ctx.manifest)?),
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Unknown) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<Usage>().is_some()
                || e.downcast_ref::<hypercube_sat::Error>().is_some_and(|e| {
                    matches!(e, hypercube_sat::Error::InvalidArgument(_) | hypercube_sat::Error::Dimension(_) | hypercube_sat::Error::TooLarge(_))
                });
            ExitCode::from(if usage { 2 } else { 3 })
        }
    }
}
