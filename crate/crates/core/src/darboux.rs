//! Lie derivatives along polynomial vector fields, Grassmann Darboux
//! polynomials and first integrals of the form `(f/g)·exp(h)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::coeff::Rational;
use crate::linsolve;
use crate::parity::Parity;
use crate::superspace::ComponentSystem;
use crate::symcore::{GradedPoly, Monomial, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DarbouxError {
    #[error("`{0}` is not a variable of the vector field")]
    NotInField(String),
    #[error("vector field coefficient of `{0}` has the wrong parity")]
    ParityMismatch(String),
    #[error("system has equations of order {0}; lower it to first order first")]
    NotFirstOrder(u32),
    #[error("denominator `{0}` is not even")]
    OddDenominator(String),
    #[error("exponent `{0}` is not even")]
    OddExponent(String),
}

/// `𝒳 = Σ P_i ∂/∂v_i`, with left derivatives for odd `v_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    components: Vec<(Symbol, GradedPoly)>,
}

impl PolyVectorField {
    pub fn new(components: Vec<(Symbol, GradedPoly)>) -> Result<Self, DarbouxError> {
        for (v, p) in &components {
            if !p.has_parity(v.parity()) {
                return Err(DarbouxError::ParityMismatch(v.to_string()));
            }
        }
        Ok(PolyVectorField { components })
    }

    pub fn from_system(sys: &ComponentSystem) -> Result<Self, DarbouxError> {
        if sys.max_order() > 1 {
            return Err(DarbouxError::NotFirstOrder(sys.max_order()));
        }
        Self::new(
            sys.equations
                .iter()
                .map(|e| (e.symbol.clone(), e.rhs.clone()))
                .collect(),
        )
    }

    pub fn components(&self) -> &[(Symbol, GradedPoly)] {
        &self.components
    }

    pub fn variables(&self) -> Vec<Symbol> {
        self.components.iter().map(|(v, _)| v.clone()).collect()
    }

    /// Constants occurring in the coefficients.
    pub fn constants(&self) -> BTreeSet<Symbol> {
        self.components
            .iter()
            .flat_map(|(_, p)| p.symbols())
            .filter(|s| s.is_constant())
            .collect()
    }

    /// `𝒳(p) = Σ P_i ∂p/∂v_i`.
    pub fn lie_derivative(&self, p: &GradedPoly) -> Result<GradedPoly, DarbouxError> {
        let vars: BTreeSet<&Symbol> = self.components.iter().map(|(v, _)| v).collect();
        if let Some(s) = p.symbols().into_iter().find(|s| !s.is_constant() && !vars.contains(s)) {
            return Err(DarbouxError::NotInField(s.to_string()));
        }
        let mut out = GradedPoly::zero();
        for (v, coeff) in &self.components {
            let d = p.partial(v);
            if !d.is_zero() {
                out = out.add(&coeff.mul(&d));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|(v, p)| format!("{v}' = {p}")).collect();
        f.write_str(&parts.join("; "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Darboux,
    FirstIntegral,
}

/// Outcome of a Darboux or first-integral check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub field: String,
    pub object: String,
    #[serde(rename = "type")]
    pub kind: CertificateKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cofactor: Option<String>,
    pub residual: String,
    /// Zero locus label of the certified polynomial.
    pub locus: String,
    pub holds: bool,
    #[serde(skip)]
    pub residual_poly: GradedPoly,
}

/// `𝒳f - κf`.
pub fn verify_darboux(
    field: &PolyVectorField,
    f: &GradedPoly,
    kappa: &GradedPoly,
) -> Result<Certificate, DarbouxError> {
    let residual = field.lie_derivative(f)?.sub(&kappa.mul(f));
    Ok(Certificate {
        field: field.to_string(),
        object: f.to_string(),
        kind: CertificateKind::Darboux,
        cofactor: Some(kappa.to_string()),
        residual: residual.to_string(),
        locus: format!("{f} = 0"),
        holds: residual.is_zero(),
        residual_poly: residual,
    })
}

/// Even monomials of degree at most `bound` over the given symbols.
fn ansatz_monomials(symbols: &[Symbol], bound: u32) -> Vec<Monomial> {
    fn walk(
        symbols: &[Symbol],
        idx: usize,
        left: u32,
        even: &mut Vec<(Symbol, i32)>,
        odd: &mut Vec<Symbol>,
        out: &mut Vec<Monomial>,
    ) {
        if idx == symbols.len() {
            if odd.len().is_multiple_of(2) {
                if let Some((m, _)) = Monomial::canonical(even.clone(), odd.clone()) {
                    out.push(m);
                }
            }
            return;
        }
        walk(symbols, idx + 1, left, even, odd, out);
        let s = &symbols[idx];
        if s.is_odd() {
            if left >= 1 {
                odd.push(s.clone());
                walk(symbols, idx + 1, left - 1, even, odd, out);
                odd.pop();
            }
        } else {
            for e in 1..=left {
                even.push((s.clone(), e as i32));
                walk(symbols, idx + 1, left - e, even, odd, out);
                even.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(symbols, 0, bound, &mut Vec::new(), &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Find an even cofactor `κ` with `𝒳f = κf`, trying degree bounds
/// `0, 1, .., bound` in turn. Free coefficients are set to zero.
pub fn search_cofactor(
    field: &PolyVectorField,
    f: &GradedPoly,
    bound: u32,
) -> Result<Option<GradedPoly>, DarbouxError> {
    let target = field.lie_derivative(f)?;
    let mut symbols: Vec<Symbol> = field.variables();
    let consts: BTreeSet<Symbol> = field
        .constants()
        .into_iter()
        .chain(f.symbols().into_iter().filter(|s| s.is_constant()))
        .collect();
    symbols.extend(consts);
    for degree in 0..=bound {
        let basis = ansatz_monomials(&symbols, degree);
        let products: Vec<GradedPoly> = basis
            .iter()
            .map(|m| GradedPoly::from_monomial(m.clone(), Rational::from_integer(1.into())).mul(f))
            .collect();
        let mut rows_index: BTreeMap<Monomial, usize> = BTreeMap::new();
        for p in products.iter().chain(std::iter::once(&target)) {
            for (m, _) in p.terms() {
                let next = rows_index.len();
                rows_index.entry(m.clone()).or_insert(next);
            }
        }
        let mut rows = vec![vec![Rational::zero(); basis.len()]; rows_index.len()];
        let mut rhs = vec![Rational::zero(); rows_index.len()];
        for (j, p) in products.iter().enumerate() {
            for (m, c) in p.terms() {
                rows[rows_index[m]][j] = c.clone();
            }
        }
        for (m, c) in target.terms() {
            rhs[rows_index[m]] = c.clone();
        }
        if let Some(x) = linsolve::solve(rows, rhs, basis.len()) {
            let mut kappa = GradedPoly::zero();
            for (m, c) in basis.into_iter().zip(x) {
                if !c.is_zero() {
                    kappa.add_term(m, c);
                }
            }
            return Ok(Some(kappa));
        }
    }
    Ok(None)
}

/// `(f/g)·exp(h)` with `g`, `h` even.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegralExpr {
    pub numerator: GradedPoly,
    pub denominator: GradedPoly,
    pub exponent: GradedPoly,
}

impl FirstIntegralExpr {
    pub fn new(numerator: GradedPoly, denominator: GradedPoly, exponent: GradedPoly) -> Result<Self, DarbouxError> {
        if !denominator.has_parity(Parity::Even) {
            return Err(DarbouxError::OddDenominator(denominator.to_string()));
        }
        if !exponent.has_parity(Parity::Even) {
            return Err(DarbouxError::OddExponent(exponent.to_string()));
        }
        Ok(FirstIntegralExpr {
            numerator,
            denominator,
            exponent,
        })
    }

    pub fn polynomial(f: GradedPoly) -> Self {
        FirstIntegralExpr {
            numerator: f,
            denominator: GradedPoly::one(),
            exponent: GradedPoly::zero(),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut s = self.numerator.symbols();
        s.extend(self.denominator.symbols());
        s.extend(self.exponent.symbols());
        s
    }
}

impl fmt::Display for FirstIntegralExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.numerator)?;
        if self.denominator != GradedPoly::one() {
            write!(f, " / ({})", self.denominator)?;
        }
        if !self.exponent.is_zero() {
            write!(f, " * exp({})", self.exponent)?;
        }
        Ok(())
    }
}

/// `g·𝒳f - f·𝒳g + f·g·𝒳h`, which vanishes iff `𝒳((f/g)e^h) = 0`.
pub fn verify_first_integral(
    field: &PolyVectorField,
    integral: &FirstIntegralExpr,
) -> Result<Certificate, DarbouxError> {
    let FirstIntegralExpr {
        numerator: f,
        denominator: g,
        exponent: h,
    } = integral;
    let xf = field.lie_derivative(f)?;
    let xg = field.lie_derivative(g)?;
    let xh = field.lie_derivative(h)?;
    let residual = g.mul(&xf).sub(&f.mul(&xg)).add(&f.mul(g).mul(&xh));
    Ok(Certificate {
        field: field.to_string(),
        object: integral.to_string(),
        kind: CertificateKind::FirstIntegral,
        cofactor: None,
        residual: residual.to_string(),
        locus: format!("{f} = 0"),
        holds: residual.is_zero(),
        residual_poly: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;

    fn sym(name: &str, p: Parity) -> GradedPoly {
        GradedPoly::symbol(&Symbol::dynamic(name, p))
    }

    fn planar() -> PolyVectorField {
        let x = sym("x", Parity::Even);
        let xi = sym("xi", Parity::Odd);
        PolyVectorField::new(vec![
            (Symbol::dynamic("x", Parity::Even), x.pow(2)),
            (Symbol::dynamic("xi", Parity::Odd), x.scale(&int(2)).mul(&xi)),
        ])
        .unwrap()
    }

    #[test]
    fn lie_derivative_examples() {
        let field = planar();
        let x = sym("x", Parity::Even);
        let xi = sym("xi", Parity::Odd);
        assert_eq!(field.lie_derivative(&xi).unwrap(), x.scale(&int(2)).mul(&xi));
        assert_eq!(field.lie_derivative(&x.pow(2)).unwrap(), x.pow(3).scale(&int(2)));
    }

    #[test]
    fn darboux_examples() {
        let field = planar();
        let x = sym("x", Parity::Even);
        let xi = sym("xi", Parity::Odd);
        assert!(verify_darboux(&field, &xi, &x.scale(&int(2))).unwrap().holds);
        let wrong = verify_darboux(&field, &xi, &GradedPoly::zero()).unwrap();
        assert!(!wrong.holds);
        assert_eq!(wrong.residual, "2*x*xi");
        assert_eq!(search_cofactor(&field, &xi, 1).unwrap(), Some(x.scale(&int(2))));
        assert!(
            verify_first_integral(
                &field,
                &FirstIntegralExpr::new(xi, x.pow(2), GradedPoly::zero()).unwrap()
            )
            .unwrap()
            .holds
        );
    }

    #[test]
    fn constant_field_has_no_cofactor() {
        let field = PolyVectorField::new(vec![(Symbol::dynamic("x", Parity::Even), GradedPoly::one())]).unwrap();
        assert_eq!(search_cofactor(&field, &sym("x", Parity::Even), 4).unwrap(), None);
    }

    #[test]
    fn unknown_variable_rejected() {
        let field = planar();
        assert!(field.lie_derivative(&sym("y", Parity::Even)).is_err());
    }
}
