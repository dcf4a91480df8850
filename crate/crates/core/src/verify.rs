//! End-to-end checks of the four conjectures for one dimension.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use crate::encode::{build_conjecture, Conjecture, EncodingConfig};
use crate::error::{Error, Result};
use crate::hypercube::Coloring;
use crate::oracle::{has_monochromatic_antipodal, has_one_change_antipodal};
use crate::solver::campaign::{run_campaign, CampaignConfig, CampaignReport, Schedule, Verdict};
use crate::solver::cube::{generate_cubes, Splitter};
use crate::solver::{Backend, Outcome};

#[derive(Clone, Debug)]
pub enum Mode {
    Direct,
    Campaign {
        depth: u32,
        workers: usize,
        journal: PathBuf,
        schedule: Schedule,
        splitter: Splitter,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub conjecture: u32,
    pub n: u32,
    pub verdict: Verdict,
    pub vars: u32,
    pub clauses: usize,
    pub solver: String,
    /// Text form of an oracle-confirmed counterexample.
    pub counterexample: Option<String>,
    pub seconds: f64,
    pub campaign: Option<CampaignReport>,
}

/// Does `c` violate the conjecture? Antipodality is required for the
/// first two.
pub fn is_counterexample(target: Conjecture, c: &Coloring) -> bool {
    match target {
        Conjecture::AntipodalPath => c.is_antipodal() && !has_monochromatic_antipodal(c, false),
        Conjecture::AntipodalGeodesic => c.is_antipodal() && !has_monochromatic_antipodal(c, true),
        Conjecture::OneChangePath => !has_one_change_antipodal(c, false),
        Conjecture::OneChangeGeodesic => !has_one_change_antipodal(c, true),
    }
}

/// Builds the formula for `cfg`, solves it and confirms any model with the
/// oracle before reporting it.
pub fn verify(cfg: &EncodingConfig, mode: &Mode, backend: &Backend) -> Result<VerifyReport> {
    let start = Instant::now();
    let enc = build_conjecture(cfg)?;
    let f = &enc.formula;
    let (verdict, model, campaign) = match mode {
        Mode::Direct => match backend.solve(f)? {
            Outcome::Sat(m) => (Verdict::Sat, Some(m), None),
            Outcome::Unsat => (Verdict::Unsat, None, None),
            Outcome::Unknown => (Verdict::Unknown, None, None),
        },
        Mode::Campaign { depth, workers, journal, schedule, splitter } => {
            let cubes = generate_cubes(f, *depth, splitter)?;
            let mut cc = CampaignConfig::new(journal.clone(), *workers);
            cc.schedule = *schedule;
            let solver = backend.cube_solver();
            let r = run_campaign(f, &cubes, solver.as_ref(), &cc)?;
            (r.verdict, r.model.clone(), Some(r))
        }
    };
    let counterexample = match model {
        Some(m) => {
            let c = enc.decode_coloring(&m)?;
            if !is_counterexample(cfg.target, &c) {
                return Err(Error::InvalidArgument(format!(
                    "solver model decodes to a coloring the oracle does not confirm as a counterexample to {}",
                    cfg.target
                )));
            }
            Some(c.to_text())
        }
        None => None,
    };
    Ok(VerifyReport {
        conjecture: cfg.target.number(),
        n: cfg.n,
        verdict,
        vars: f.num_vars(),
        clauses: f.num_clauses(),
        solver: backend.describe(),
        counterexample,
        seconds: start.elapsed().as_secs_f64(),
        campaign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_dimensions_hold() {
        let internal = Backend::Internal { conflicts: None };
        for (k, n) in [(1, 3), (2, 3), (2, 4), (3, 2), (4, 3)] {
            let cfg = EncodingConfig::new(n, Conjecture::from_number(k).unwrap());
            let r = verify(&cfg, &Mode::Direct, &internal).unwrap();
            assert_eq!(r.verdict, Verdict::Unsat, "conjecture {k}, n = {n}");
        }
    }

    #[test]
    fn campaign_mode_agrees() {
        let dir = tempfile::tempdir().unwrap();
        let mode = Mode::Campaign {
            depth: 3,
            workers: 2,
            journal: dir.path().join("j.jsonl"),
            schedule: Schedule::Dynamic,
            splitter: Splitter::Builtin,
        };
        let cfg = EncodingConfig::new(4, Conjecture::AntipodalGeodesic);
        let r = verify(&cfg, &mode, &Backend::Internal { conflicts: None }).unwrap();
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(r.campaign.unwrap().num_cubes, 8);
    }
}
