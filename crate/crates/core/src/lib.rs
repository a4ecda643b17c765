//! Supersymmetric (Grassmann-valued) extensions of polynomial ODE systems.
//!
//! The crate builds component equations from superfield definitions, certifies
//! Darboux polynomials and first integrals, checks supersymmetry invariance,
//! and solves the resulting systems by layer decomposition, Picard iteration
//! and series in a commutative non-associative product.

pub mod coeff;
pub mod darboux;
pub mod dsl;
pub mod grassmann;
pub mod linsolve;
pub mod nonassoc;
pub mod parity;
pub mod scalar_poly;
pub mod solve;
pub mod superspace;
pub mod symcore;

pub use coeff::{Coeff, Rational};
pub use grassmann::{AlgebraCtx, GrassmannError, Multivector, Word};
pub use parity::Parity;
pub use superspace::{ComponentSystem, SuperExpr, SuperfieldDecl, ThetaPoly};
pub use symcore::{GradedPoly, Monomial, SymError, Symbol, SymbolKind};
