//! Splitting a formula into cubes, and an optional external preprocessing pass.

use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::process::{Command, Stdio};

use super::dpll::Solver;
use crate::cnf::{parse_cubes, parse_dimacs, write_dimacs, CnfFormula, Cube, Lit, Var};
use crate::error::{Error, Result};

/// How cubes are produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splitter {
    /// Branch on the most frequent variable not fixed by propagation.
    Builtin,
    /// A cubing tool. The template may use `{in}`, `{out}` and `{depth}`;
    /// the tool must write `a … 0` lines to `{out}`.
    External { template: String },
}

pub fn generate_cubes(f: &CnfFormula, depth: u32, splitter: &Splitter) -> Result<Vec<Cube>> {
    match splitter {
        Splitter::Builtin => builtin_cubes(f, depth),
        Splitter::External { template } => external_cubes(f, depth, template),
    }
}

fn occurrences(f: &CnfFormula) -> Vec<u64> {
    let mut occ = vec![0u64; f.num_vars() as usize + 1];
    for c in f.clauses() {
        for l in c {
            occ[l.var().index() as usize] += 1;
        }
    }
    occ
}

/// Exactly `2^depth` cubes (fewer only if the formula has fewer variables)
/// forming a complete binary branching tree, hence a cover.
pub fn builtin_cubes(f: &CnfFormula, depth: u32) -> Result<Vec<Cube>> {
    if depth > 24 {
        return Err(Error::InvalidArgument(format!("cube depth {depth} is too large")));
    }
    let occ = occurrences(f);
    // most frequent first, ties by index
    let mut ranked: Vec<u32> = (1..=f.num_vars()).filter(|&v| occ[v as usize] > 0).collect();
    ranked.sort_by_key(|&v| (std::cmp::Reverse(occ[v as usize]), v));
    let mut solver = Solver::new(f);
    let mut out = Vec::new();
    let mut stack = vec![Vec::<Lit>::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() as u32 == depth {
            out.push(Cube::new(prefix)?);
            continue;
        }
        let mut fixed = vec![false; f.num_vars() as usize + 1];
        for l in &prefix {
            fixed[l.var().index() as usize] = true;
        }
        if let Some(implied) = solver.implied(&prefix) {
            for l in implied {
                fixed[l.var().index() as usize] = true;
            }
        }
        let pick = ranked.iter().copied().find(|&v| !fixed[v as usize]).or_else(|| {
            // everything is forced; branch on any variable not yet in the cube
            (1..=f.num_vars()).find(|&v| !prefix.iter().any(|l| l.var().index() == v))
        });
        let Some(v) = pick else {
            out.push(Cube::new(prefix)?);
            continue;
        };
        let var = Var::new(v);
        // pushed in reverse so the negative branch comes out first
        for positive in [true, false] {
            let mut next = prefix.clone();
            next.push(var.lit(positive));
            stack.push(next);
        }
    }
    Ok(out)
}

fn fill_template(template: &str, input: &Path, output: &Path, depth: u32) -> Result<(String, Vec<String>)> {
    let mut parts = template.split_whitespace().map(|a| {
        a.replace("{in}", &input.to_string_lossy())
            .replace("{out}", &output.to_string_lossy())
            .replace("{depth}", &depth.to_string())
    });
    let program = parts
        .next()
        .ok_or_else(|| Error::InvalidArgument("empty tool command".into()))?;
    Ok((program, parts.collect()))
}

fn run_tool(template: &str, input: &Path, output: &Path, depth: u32) -> Result<()> {
    let (program, args) = fill_template(template, input, output, depth)?;
    let status = Command::new(&program)
        .args(&args)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .map_err(|source| Error::SolverSpawn { command: template.to_string(), source })?;
    if !output.exists() || std::fs::metadata(output)?.len() == 0 {
        return Err(Error::UnknownExit(status.code()));
    }
    Ok(())
}

fn write_temp(f: &CnfFormula) -> Result<tempfile::NamedTempFile> {
    let tmp = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    let mut w = BufWriter::new(tmp.as_file());
    write_dimacs(f, &mut w)?;
    w.flush()?;
    drop(w);
    Ok(tmp)
}

pub fn external_cubes(f: &CnfFormula, depth: u32, template: &str) -> Result<Vec<Cube>> {
    let input = write_temp(f)?;
    let dir = tempfile::tempdir()?;
    let output = dir.path().join("cubes.icnf");
    run_tool(template, input.path(), &output, depth)?;
    parse_cubes(&std::fs::read_to_string(&output)?)
}

/// Runs a simplification tool (`{in}`/`{out}` template) and reads back
/// its output formula. Variable numbering of the result is opaque, so
/// models of the output are not decoded into colorings.
pub fn preprocess(f: &CnfFormula, template: &str) -> Result<CnfFormula> {
    let input = write_temp(f)?;
    let dir = tempfile::tempdir()?;
    let output = dir.path().join("simplified.cnf");
    run_tool(template, input.path(), &output, 0)?;
    parse_dimacs(BufReader::new(std::fs::File::open(&output)?))
}
