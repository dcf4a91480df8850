//! Run manifests, published reference values and comparison tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::BoundKind;
use crate::encode::{build_phi, build_psi, Conjecture, EncodingConfig, PathSources};
use crate::error::Result;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FileHash {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileHash {
    pub fn of(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Ok(FileHash { path: path.to_path_buf(), sha256: sha256_file(path)? })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

/// Everything needed to reproduce one CLI invocation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub tool_versions: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub wall_seconds: f64,
    pub cpu_seconds: f64,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            parameters,
            tool_versions: vec![(env!("CARGO_PKG_NAME").to_string(), env!("CARGO_PKG_VERSION").to_string())],
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_seconds: 0.0,
            cpu_seconds: 0.0,
        }
    }
}

/// One row of the encoding-size table: `(n, vars, clauses)` of `Φ_n` then `Ψ_n`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct SizeRow {
    pub n: u32,
    pub phi_vars: f64,
    pub phi_clauses: f64,
    pub psi_vars: f64,
    pub psi_clauses: f64,
}

/// Published sizes of `Φ_n` and `Ψ_n`, as printed (rounded).
pub const PUBLISHED_SIZES: [SizeRow; 6] = [
    SizeRow { n: 4, phi_vars: 776.0, phi_clauses: 2.4e3, psi_vars: 760.0, psi_clauses: 2.1e3 },
    SizeRow { n: 5, phi_vars: 2.2e3, phi_clauses: 8.1e3, psi_vars: 2.2e3, psi_clauses: 6.2e3 },
    SizeRow { n: 6, phi_vars: 6.5e3, phi_clauses: 30.4e3, psi_vars: 6.5e3, psi_clauses: 20.0e3 },
    SizeRow { n: 7, phi_vars: 21.4e3, phi_clauses: 125.5e3, psi_vars: 21.3e3, psi_clauses: 73.5e3 },
    SizeRow { n: 8, phi_vars: 76.2e3, phi_clauses: 544.7e3, psi_vars: 76.0e3, psi_clauses: 296.9e3 },
    SizeRow { n: 9, phi_vars: 285.6e3, phi_clauses: 2.4e6, psi_vars: 285.1e3, psi_clauses: 1.3e6 },
];

/// Published `μ(n)`; `None` where only a lower bound is known.
pub const PUBLISHED_MU: [(u32, Option<u32>); 6] =
    [(2, Some(0)), (3, Some(1)), (4, Some(2)), (5, Some(6)), (6, Some(14)), (7, None)];

/// Published `(k, f(k), f̂(k))`.
pub const PUBLISHED_BOUNDS: [(u32, Rational64, Rational64); 4] = [
    (3, Rational64::new_raw(1, 1), Rational64::new_raw(1, 2)),
    (4, Rational64::new_raw(5, 4), Rational64::new_raw(1, 2)),
    (5, Rational64::new_raw(5, 4), Rational64::new_raw(7, 8)),
    (6, Rational64::new_raw(3, 2), Rational64::new_raw(7, 8)),
];

pub fn published_fhat(k: u32) -> Option<Rational64> {
    PUBLISHED_BOUNDS.iter().find(|r| r.0 == k).map(|r| r.2)
}

pub fn published_value(kind: BoundKind, n: u32) -> Option<Rational64> {
    match kind {
        BoundKind::F => PUBLISHED_BOUNDS.iter().find(|r| r.0 == n).map(|r| r.1),
        BoundKind::FHat => published_fhat(n),
        BoundKind::Mu => PUBLISHED_MU
            .iter()
            .find(|r| r.0 == n)
            .and_then(|r| r.1)
            .map(|m| Rational64::from_integer(m as i64)),
    }
}

/// Measured sizes without symmetry breaking or the red-degree constraint.
pub fn measured_sizes(n: u32, sources: PathSources) -> Result<SizeRow> {
    let phi = build_phi(&EncodingConfig::plain(n, Conjecture::AntipodalPath).with_path_sources(sources))?;
    let psi = build_psi(&EncodingConfig::plain(n, Conjecture::AntipodalGeodesic).with_path_sources(sources))?;
    Ok(SizeRow {
        n,
        phi_vars: phi.formula.num_vars() as f64,
        phi_clauses: phi.formula.num_clauses() as f64,
        psi_vars: psi.formula.num_vars() as f64,
        psi_clauses: psi.formula.num_clauses() as f64,
    })
}

/// Relative deviation `|measured − published| / published`.
pub fn deviation(measured: f64, published: f64) -> f64 {
    (measured - published).abs() / published
}

fn human(x: f64) -> String {
    if x >= 1e6 {
        format!("{:.1}M", x / 1e6)
    } else if x >= 2e3 {
        format!("{:.1}K", x / 1e3)
    } else {
        format!("{x:.0}")
    }
}

/// Encoding sizes side by side with the published ones; `*` marks cells
/// outside `tolerance`.
pub fn size_table(rows: &[SizeRow], tolerance: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>3} | {:>17} {:>17} | {:>17} {:>17}", "n", "Phi vars", "Phi clauses", "Psi vars", "Psi clauses");
    for r in rows {
        let Some(p) = PUBLISHED_SIZES.iter().find(|p| p.n == r.n) else { continue };
        let cell = |m: f64, q: f64| {
            let flag = if deviation(m, q) > tolerance { "*" } else { " " };
            format!("{:>7} / {:>6}{}", human(m), human(q), flag)
        };
        let _ = writeln!(
            out,
            "{:>3} | {:>17} {:>17} | {:>17} {:>17}",
            r.n,
            cell(r.phi_vars, p.phi_vars),
            cell(r.phi_clauses, p.phi_clauses),
            cell(r.psi_vars, p.psi_vars),
            cell(r.psi_clauses, p.psi_clauses)
        );
    }
    out
}

/// A `bound-search` result as stored on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundRecord {
    pub kind: BoundKind,
    pub n: u32,
    pub count: i64,
    /// `p/q`.
    pub value: String,
    pub sat_witness_path: Option<PathBuf>,
    pub unsat_evidence: serde_json::Value,
}

impl BoundRecord {
    pub fn ratio(&self) -> Option<Rational64> {
        let (p, q) = self.value.split_once('/').unwrap_or((&self.value, "1"));
        Some(Rational64::new(p.trim().parse().ok()?, q.trim().parse().ok()?))
    }
}

/// Reads every `*.json` file in `dir` that parses as a [`BoundRecord`].
pub fn load_bound_records(dir: &Path) -> Result<Vec<BoundRecord>> {
    let mut out = Vec::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for p in paths {
        if let Ok(rec) = serde_json::from_str::<BoundRecord>(&std::fs::read_to_string(&p)?) {
            out.push(rec);
        }
    }
    Ok(out)
}

fn ratio_str(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{} ({:.4})", r.numer(), r.denom(), *r.numer() as f64 / *r.denom() as f64)
    }
}

/// Measured vs published values for `kinds`, listing missing records.
pub fn value_table(records: &[BoundRecord], kinds: &[BoundKind], ns: &[u32]) -> String {
    let mut out = String::new();
    let mut missing = Vec::new();
    let _ = writeln!(out, "{:>5} {:>3} | {:>18} | {:>18} | status", "kind", "n", "measured", "published");
    for &kind in kinds {
        for &n in ns {
            let published = published_value(kind, n);
            let measured = records.iter().rev().find(|r| r.kind == kind && r.n == n).and_then(BoundRecord::ratio);
            if measured.is_none() {
                missing.push(format!("{kind}({n})"));
                if published.is_none() {
                    continue;
                }
            }
            let status = match (measured, published) {
                (Some(m), Some(p)) if m == p => "match",
                (Some(_), Some(_)) => "DEVIATES",
                (Some(_), None) => "new",
                (None, _) => "missing",
            };
            let _ = writeln!(
                out,
                "{:>5} {:>3} | {:>18} | {:>18} | {}",
                kind.to_string(),
                n,
                measured.map(ratio_str).unwrap_or_else(|| "-".into()),
                published.map(ratio_str).unwrap_or_else(|| "-".into()),
                status
            );
        }
    }
    if !missing.is_empty() {
        let _ = writeln!(out, "missing records: {}", missing.join(", "));
    }
    out
}
