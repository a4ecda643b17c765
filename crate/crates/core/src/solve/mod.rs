//! Solution of component systems: expansion over a Grassmann basis into
//! triangular real layers, RK4 integration, Picard iteration, supersymmetry
//! transformations of seed solutions and drift monitoring of first integrals.

mod export;
mod layers;
mod monitor;
mod picard;
mod rk4;
mod transform;

pub use export::{write_csv, TrajectoryRecord};
pub use layers::{expand_to_layers, LayerSystem, Unknown};
pub use monitor::{evaluate_integral, monitor_invariants};
pub use picard::{integrate_in_t, picard_iterate, time_symbol, PicardPolynomial};
pub use rk4::{integrate, Trajectory};
pub use transform::{
    solution_residuals, transform_solution, transform_trajectory, SymbolicSolution, TransformedTrajectory,
};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::coeff::Rational;
use crate::grassmann::{AlgebraCtx, GrassmannError, Multivector};
use crate::superspace::SuperspaceError;
use crate::symcore::{GradedPoly, SymError, Symbol};

/// Pass threshold for residuals and drift in numeric checks.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("no value assigned to constant `{0}`")]
    Unassigned(String),
    #[error("value of `{0}` has the wrong parity")]
    ParityMismatch(String),
    #[error("{needed} generators needed but the algebra has L={generators}")]
    TooFewGenerators { needed: usize, generators: u8 },
    #[error("layer system is not triangular: `{unknown}` depends on `{depends}`")]
    NotTriangular { unknown: String, depends: String },
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("missing initial value for `{0}`")]
    MissingInitial(String),
    #[error("solution blew up after t = {t_last}")]
    BlowUp { t_last: f64, trajectory: Box<Trajectory> },
    #[error("seed does not solve the system: {0}")]
    SeedResidual(String),
    #[error("cannot integrate `{0}` in t")]
    NotPolynomialInT(String),
    #[error("denominator body vanishes at t = {0}")]
    SingularDenominator(f64),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Superspace(#[from] SuperspaceError),
}

/// Values of constants in Λ_L.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub ctx: AlgebraCtx,
    pub values: BTreeMap<Symbol, Multivector<Rational>>,
}

impl Assignment {
    pub fn new(ctx: AlgebraCtx) -> Self {
        Assignment {
            ctx,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, symbol: Symbol, value: Multivector<Rational>) -> Result<Self, SolveError> {
        self.insert(symbol, value)?;
        Ok(self)
    }

    pub fn insert(&mut self, symbol: Symbol, value: Multivector<Rational>) -> Result<(), SolveError> {
        if !value.is_zero() && value.parity() != Some(symbol.parity()) {
            return Err(SolveError::ParityMismatch(symbol.to_string()));
        }
        self.values.insert(symbol, value.embed(self.ctx)?);
        Ok(())
    }

    /// Map each odd constant without a value to its own generator `e1, e2, ..`,
    /// skipping generators already used by explicit values.
    pub fn complete_defaults(&mut self, constants: &BTreeSet<Symbol>) -> Result<(), SolveError> {
        let used: BTreeSet<u32> = self
            .values
            .values()
            .flat_map(|v| v.terms().flat_map(|(w, _)| w.indices()).collect::<Vec<_>>())
            .collect();
        let mut free = (1..=self.ctx.generators() as u32).filter(|g| !used.contains(g));
        let pending: Vec<Symbol> = constants
            .iter()
            .filter(|c| c.is_odd() && !self.values.contains_key(*c))
            .cloned()
            .collect();
        let needed = used.len() + pending.len();
        for c in pending {
            let g = free.next().ok_or(SolveError::TooFewGenerators {
                needed,
                generators: self.ctx.generators(),
            })?;
            self.values.insert(c, Multivector::generator(self.ctx, g)?);
        }
        Ok(())
    }

    pub fn get(&self, s: &Symbol) -> Option<&Multivector<Rational>> {
        self.values.get(s)
    }

    /// Evaluate a polynomial in constants only.
    pub fn eval_constant_poly(&self, p: &GradedPoly) -> Result<Multivector<Rational>, SolveError> {
        let lookup = |s: &Symbol| self.values.get(s).cloned();
        p.eval(self.ctx, &lookup).map_err(|e| match e {
            SymError::Unbound(n) => SolveError::Unassigned(n),
            other => other.into(),
        })
    }
}
