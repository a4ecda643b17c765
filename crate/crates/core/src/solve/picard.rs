use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::SolveError;
use crate::coeff::int;
use crate::parity::Parity;
use crate::superspace::ComponentSystem;
use crate::symcore::{GradedPoly, Monomial, Symbol};

/// The independent variable, an even constant as far as the formal
/// t-derivative is concerned.
pub fn time_symbol() -> Symbol {
    Symbol::constant("t", Parity::Even)
}

/// `∫_0^t p dt'` for `p` polynomial in `t`.
pub fn integrate_in_t(p: &GradedPoly) -> Result<GradedPoly, SolveError> {
    let t = time_symbol();
    let mut out = GradedPoly::zero();
    for (m, c) in p.terms() {
        let k = m.exponent(&t);
        if k < 0 {
            return Err(SolveError::NotPolynomialInT(p.to_string()));
        }
        let mut even: Vec<(Symbol, i32)> = m.even().iter().filter(|(s, _)| *s != t).cloned().collect();
        even.push((t.clone(), k + 1));
        let (mono, negative) = Monomial::canonical(even, m.odd().to_vec()).expect("odd part unchanged");
        let v = c.clone() / int(k as i64 + 1);
        out.add_term(mono, if negative { -v } else { v });
    }
    Ok(out)
}

/// Iterate `a` of `X_a(t) = X(0) + ∫_0^t F(X_{a-1})`, one polynomial in `t`
/// and the system constants per component.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardPolynomial {
    pub iterations: u32,
    pub components: Vec<(Symbol, GradedPoly)>,
}

impl PicardPolynomial {
    pub fn component(&self, name: &str) -> Option<&GradedPoly> {
        self.components.iter().find(|(s, _)| s.name() == name).map(|(_, p)| p)
    }

    /// Coefficient polynomials in `t` grouped by the monomial in constants.
    pub fn grouped(&self, name: &str) -> Option<Vec<(String, GradedPoly)>> {
        let p = self.component(name)?;
        let t = time_symbol();
        let mut groups: BTreeMap<Monomial, GradedPoly> = BTreeMap::new();
        for (m, c) in p.terms() {
            let k = m.exponent(&t);
            let rest: Vec<(Symbol, i32)> = m.even().iter().filter(|(s, _)| *s != t).cloned().collect();
            let (key, _) = Monomial::canonical(rest, m.odd().to_vec()).expect("already canonical");
            let tpart = if k == 0 {
                Monomial::one()
            } else {
                Monomial::canonical(vec![(t.clone(), k)], vec![]).expect("even").0
            };
            groups.entry(key).or_default().add_term(tpart, c.clone());
        }
        Some(groups.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

/// Serializable view of a Picard result.
#[derive(Debug, Serialize)]
pub struct PicardRecord {
    pub iterations: u32,
    pub components: BTreeMap<String, String>,
}

impl PicardPolynomial {
    pub fn record(&self) -> PicardRecord {
        PicardRecord {
            iterations: self.iterations,
            components: self
                .components
                .iter()
                .map(|(s, p)| (s.name().to_string(), p.to_string()))
                .collect(),
        }
    }
}

impl fmt::Display for PicardPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, p) in &self.components {
            writeln!(f, "{s}(t) = {p}")?;
        }
        Ok(())
    }
}

/// Symbolic Picard iteration for a first-order system. `init` gives each
/// component's value at `t = 0` as a polynomial in the system constants.
pub fn picard_iterate(
    sys: &ComponentSystem,
    init: &BTreeMap<Symbol, GradedPoly>,
    iterations: u32,
) -> Result<PicardPolynomial, SolveError> {
    let sys = sys.to_first_order();
    let vars = sys.variables();
    let mut state: BTreeMap<Symbol, GradedPoly> = BTreeMap::new();
    for v in &vars {
        let x0 = init.get(v).ok_or_else(|| SolveError::MissingInitial(v.to_string()))?;
        if !x0.has_parity(v.parity()) {
            return Err(SolveError::ParityMismatch(v.to_string()));
        }
        state.insert(v.clone(), x0.clone());
    }
    for _ in 0..iterations {
        let mut next = BTreeMap::new();
        for eq in &sys.equations {
            let f = eq.rhs.substitute(&state)?;
            next.insert(eq.symbol.clone(), init[&eq.symbol].add(&integrate_in_t(&f)?));
        }
        state = next;
    }
    Ok(PicardPolynomial {
        iterations,
        components: vars
            .into_iter()
            .map(|v| {
                let p = state.remove(&v).expect("every variable");
                (v, p)
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superspace::{build_component_system, SuperExpr, SuperfieldDecl, Superspace};

    #[test]
    fn square_to_two_iterations() {
        let decl = SuperfieldDecl::new("X", Parity::Even, 1, Some(vec!["x".into(), "xi".into()])).unwrap();
        let sp = Superspace::new(1).with_field(decl).with_constant("alpha", Parity::Odd);
        let eq = (SuperExpr::dt(1, SuperExpr::field("X")), SuperExpr::field("X").pow(2));
        let sys = build_component_system(&sp, &[eq]).unwrap();
        let x = Symbol::dynamic("x", Parity::Even);
        let xi = Symbol::dynamic("xi", Parity::Odd);
        let alpha = Symbol::constant("alpha", Parity::Odd);
        let init = BTreeMap::from([(x, GradedPoly::one()), (xi, GradedPoly::symbol(&alpha))]);
        let p0 = picard_iterate(&sys, &init, 0).unwrap();
        assert_eq!(p0.component("x").unwrap().to_string(), "1");
        let p2 = picard_iterate(&sys, &init, 2).unwrap();
        assert_eq!(p2.component("x").unwrap().to_string(), "1 + t + t^2 + 1/3*t^3");
        let grouped = p2.grouped("xi").unwrap();
        assert_eq!(grouped.len(), 1);
        assert_eq!(grouped[0].0, "alpha");
        assert_eq!(grouped[0].1.to_string(), "1 + 2*t + 3*t^2 + 4/3*t^3");
    }
}
