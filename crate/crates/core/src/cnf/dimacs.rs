use std::io::{BufRead, Write};

use super::{CnfFormula, Cube, Lit};
use crate::error::{Error, Result};

fn write_clause<W: Write>(w: &mut W, c: &[Lit]) -> std::io::Result<()> {
    for l in c {
        write!(w, "{} ", l.dimacs())?;
    }
    writeln!(w, "0")
}

/// Plain DIMACS; clauses in insertion order.
pub fn write_dimacs<W: Write>(f: &CnfFormula, w: &mut W) -> Result<()> {
    write_dimacs_with_cube(f, &Cube::empty(), w)
}

/// DIMACS with the cube's literals appended as unit clauses.
pub fn write_dimacs_with_cube<W: Write>(f: &CnfFormula, cube: &Cube, w: &mut W) -> Result<()> {
    writeln!(w, "p cnf {} {}", f.num_vars(), f.num_clauses() + cube.len())?;
    for c in f.clauses() {
        write_clause(w, c)?;
    }
    for &l in cube.lits() {
        write_clause(w, &[l])?;
    }
    Ok(())
}

/// Incremental CNF: the formula followed by one `a … 0` line per cube.
pub fn write_icnf<W: Write>(f: &CnfFormula, cubes: &[Cube], w: &mut W) -> Result<()> {
    writeln!(w, "p inccnf")?;
    for c in f.clauses() {
        write_clause(w, c)?;
    }
    for cube in cubes {
        write!(w, "a ")?;
        write_clause(w, cube.lits())?;
    }
    Ok(())
}

/// One `<name> <index>` line per registered variable.
pub fn write_registry<W: Write>(f: &CnfFormula, w: &mut W) -> Result<()> {
    for (v, key) in f.registry() {
        writeln!(w, "{key} {}", v.index())?;
    }
    Ok(())
}

fn parse_lits(tokens: &[&str], lineno: usize) -> Result<Vec<i32>> {
    tokens
        .iter()
        .map(|t| t.parse::<i32>().map_err(|_| Error::parse(lineno, format!("bad literal {t:?}"))))
        .collect()
}

/// Parses DIMACS CNF. Clauses may span lines.
pub fn parse_dimacs<R: BufRead>(r: R) -> Result<CnfFormula> {
    let mut f = CnfFormula::new();
    let mut header: Option<(u32, usize)> = None;
    let mut pending: Vec<Lit> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            let parts: Vec<&str> = t.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" || header.is_some() {
                return Err(Error::parse(lineno, format!("bad header {t:?}")));
            }
            let v = parts[2].parse().map_err(|_| Error::parse(lineno, "bad variable count"))?;
            let c = parts[3].parse().map_err(|_| Error::parse(lineno, "bad clause count"))?;
            f.ensure_vars(v);
            header = Some((v, c));
            continue;
        }
        let (nv, _) = header.ok_or_else(|| Error::parse(lineno, "clause before header"))?;
        let tokens: Vec<&str> = t.split_whitespace().collect();
        for x in parse_lits(&tokens, lineno)? {
            if x == 0 {
                f.add_clause(pending.drain(..));
            } else {
                if x.unsigned_abs() > nv {
                    return Err(Error::parse(lineno, format!("literal {x} exceeds {nv} variables")));
                }
                pending.push(Lit::from_dimacs(x));
            }
        }
    }
    let (_, nc) = header.ok_or_else(|| Error::parse(1, "missing header"))?;
    if !pending.is_empty() {
        return Err(Error::parse(0, "unterminated clause"));
    }
    if f.num_clauses() > nc {
        return Err(Error::parse(0, format!("header declares {nc} clauses, found {}", f.num_clauses())));
    }
    Ok(f)
}

/// Extracts cubes from `a … 0` lines (iCNF or a cube generator's output).
pub fn parse_cubes(text: &str) -> Result<Vec<Cube>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        let Some(rest) = t.strip_prefix('a') else { continue };
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        let mut lits = parse_lits(&tokens, i + 1)?;
        if lits.pop() != Some(0) || lits.contains(&0) {
            return Err(Error::parse(i + 1, "cube line must end with a single 0"));
        }
        out.push(Cube::new(lits.into_iter().map(Lit::from_dimacs).collect())?);
    }
    Ok(out)
}
