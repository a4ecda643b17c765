//! N-extended superfields, the operators `Q_i`, `D_i`, `Q`, `D`, θ-expansion
//! into component equations, and supersymmetry-invariance checks.
//!
//! θ coordinates are ordinary odd symbols of the graded polynomial ring that
//! sort before every other symbol, so `D_i` is `∂/∂θ^i - θ^i ∂_t` with the
//! left odd derivative and the formal t-derivative.

mod expr;
mod families;
mod power;
mod susy;
mod system;
mod theta;

pub use expr::{
    apply_operator, theta_monomial, theta_subsets, Operator, SuperExpr, SuperfieldDecl, Superspace, ThetaSet,
};
pub use families::{euler_arnold_superspace, euler_arnold_system, AntisymmetricFamily, EulerArnold};
pub use power::{expand_power, falling_factorial};
pub use susy::{
    check_susy_invariance, field_variation, fresh_epsilon, operator_algebra_check, EquationResidual,
    OperatorAlgebraReport, RelationCheck, SusyGenerator, SusyReport,
};
pub use system::{build_component_system, ComponentSystem, Equation, CLOSURE_PASSES};
pub use theta::ThetaPoly;

use thiserror::Error;

use crate::parity::Parity;
use crate::symcore::SymError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuperspaceError {
    #[error("superspace dimension N={0} outside 1..=8")]
    BadN(u8),
    #[error("superfield `{field}` has N={n}, expected N={expected}")]
    MixedN { field: String, n: u8, expected: u8 },
    #[error("superfield `{field}` needs {expected} component names, got {found}")]
    ComponentCount {
        field: String,
        expected: usize,
        found: usize,
    },
    #[error("operator {op} index out of range for N={n}")]
    IndexOutOfRange { op: String, n: u8 },
    #[error("unknown identifier `{0}`")]
    Unknown(String),
    #[error("left-hand side `{0}` is not dt^k applied to a superfield or component")]
    BadLhs(String),
    #[error("right-hand side of the `{equation}` equation is not {lhs}")]
    ParityMismatch { equation: String, lhs: Parity },
    #[error("`{0}` is defined twice")]
    DuplicateDefinition(String),
    #[error("component equation for `{0}` has θ-dependent right-hand side")]
    ThetaInComponentEquation(String),
    #[error("derivative symbols remain after {CLOSURE_PASSES} substitution passes: {0:?}")]
    ClosureFailure(Vec<String>),
    #[error("no equation determines `{0}`")]
    Undetermined(String),
    #[error("system has no superfield structure")]
    NoSuperfields,
    #[error(transparent)]
    Sym(#[from] SymError),
}
