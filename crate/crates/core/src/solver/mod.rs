//! Solving: the built-in solver, external solver processes, cubes and campaigns.

pub mod dpll;
pub mod campaign;
pub mod cube;
pub mod external;

pub use dpll::{Limits, Outcome};
pub use external::{solve_external, SolverSpec};

use crate::cnf::CnfFormula;

/// The built-in solver with an optional conflict budget.
pub fn solve_internal(f: &CnfFormula, conflicts: Option<u64>) -> Outcome {
    dpll::solve_with_assumptions(f, &[], conflicts)
}

/// Where satisfiability questions go.
#[derive(Clone, Debug)]
pub enum Backend {
    Internal { conflicts: Option<u64> },
    External(SolverSpec),
}

impl Backend {
    pub fn solve(&self, f: &CnfFormula) -> crate::Result<Outcome> {
        match self {
            Backend::Internal { conflicts } => Ok(solve_internal(f, *conflicts)),
            Backend::External(spec) => solve_external(f, spec),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Backend::Internal { .. } => "internal".into(),
            Backend::External(spec) => spec.command_line(),
        }
    }

    pub fn cube_solver(&self) -> Box<dyn campaign::CubeSolver + '_> {
        match self {
            Backend::Internal { conflicts } => Box::new(campaign::InternalCubeSolver { conflicts: *conflicts }),
            Backend::External(spec) => Box::new(spec.clone()),
        }
    }
}
