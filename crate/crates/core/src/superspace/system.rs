use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::expr::{SuperExpr, Superspace};
use super::SuperspaceError;
use crate::symcore::{GradedPoly, Symbol};

/// Number of substitution passes allowed when eliminating derivative symbols.
pub const CLOSURE_PASSES: usize = 10;

/// `d^order(symbol)/dt^order = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub symbol: Symbol,
    pub order: u32,
    pub rhs: GradedPoly,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.symbol.derivative(self.order), self.rhs)
    }
}

/// Closed system of component ODEs together with the superspace it came from.
#[derive(Debug, Clone)]
pub struct ComponentSystem {
    pub space: Superspace,
    pub equations: Vec<Equation>,
}

impl ComponentSystem {
    /// Assemble from explicit component equations and close them on-shell.
    pub fn from_equations(space: Superspace, equations: Vec<Equation>) -> Result<Self, SuperspaceError> {
        let mut seen = BTreeSet::new();
        for eq in &equations {
            if !seen.insert(eq.symbol.clone()) {
                return Err(SuperspaceError::DuplicateDefinition(eq.symbol.to_string()));
            }
            if !eq.rhs.has_parity(eq.symbol.parity()) {
                return Err(SuperspaceError::ParityMismatch {
                    equation: eq.symbol.to_string(),
                    lhs: eq.symbol.parity(),
                });
            }
        }
        let mut sys = ComponentSystem { space, equations };
        sys.close()?;
        Ok(sys)
    }

    pub fn equation(&self, symbol: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.symbol.name() == symbol)
    }

    pub fn rhs(&self, symbol: &str) -> Option<&GradedPoly> {
        self.equation(symbol).map(|e| &e.rhs)
    }

    pub fn max_order(&self) -> u32 {
        self.equations.iter().map(|e| e.order).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<Symbol> {
        self.equations.iter().map(|e| e.symbol.clone()).collect()
    }

    pub fn constants(&self) -> BTreeSet<Symbol> {
        self.equations
            .iter()
            .flat_map(|e| e.rhs.symbols())
            .filter(|s| s.is_constant())
            .collect()
    }

    /// Replace every derivative symbol at or above a variable's defining order
    /// by the corresponding derivative of its right-hand side, repeatedly.
    pub fn reduce_on_shell(&self, p: &GradedPoly) -> Result<GradedPoly, SuperspaceError> {
        let defs: BTreeMap<Symbol, &Equation> = self.equations.iter().map(|e| (e.symbol.clone(), e)).collect();
        reduce_with(&defs, p)
    }

    fn close(&mut self) -> Result<(), SuperspaceError> {
        let snapshot = self.equations.clone();
        let defs: BTreeMap<Symbol, &Equation> = snapshot.iter().map(|e| (e.symbol.clone(), e)).collect();
        let mut closed = Vec::with_capacity(self.equations.len());
        for eq in &self.equations {
            // all passes substitute from the original (unclosed) definitions
            let rhs = reduce_with(&defs, &eq.rhs)?;
            closed.push(Equation { rhs, ..eq.clone() });
        }
        self.equations = closed;
        self.check_closed()
    }

    fn check_closed(&self) -> Result<(), SuperspaceError> {
        let orders: BTreeMap<Symbol, u32> = self.equations.iter().map(|e| (e.symbol.clone(), e.order)).collect();
        for eq in &self.equations {
            for s in eq.rhs.symbols() {
                if !s.is_dynamic() {
                    continue;
                }
                match orders.get(&s.base()) {
                    Some(k) if s.order() < *k => {}
                    Some(_) => return Err(SuperspaceError::ClosureFailure(vec![s.to_string()])),
                    None => return Err(SuperspaceError::Undetermined(s.base().to_string())),
                }
            }
        }
        Ok(())
    }

    /// Lower to first order by introducing velocity components
    /// `<name>_d1, .., <name>_d(k-1)`.
    pub fn to_first_order(&self) -> ComponentSystem {
        if self.max_order() <= 1 {
            return self.clone();
        }
        let mut bindings = BTreeMap::new();
        let mut velocities: BTreeMap<Symbol, Vec<Symbol>> = BTreeMap::new();
        for eq in &self.equations {
            let vs: Vec<Symbol> = (1..eq.order)
                .map(|j| Symbol::dynamic(&format!("{}_d{j}", eq.symbol.name()), eq.symbol.parity()))
                .collect();
            for (j, v) in vs.iter().enumerate() {
                bindings.insert(eq.symbol.derivative(j as u32 + 1), GradedPoly::symbol(v));
            }
            velocities.insert(eq.symbol.clone(), vs);
        }
        let mut equations = Vec::new();
        let mut extra = Vec::new();
        for eq in &self.equations {
            let rhs = eq.rhs.substitute(&bindings).expect("velocities share parity");
            let vs = &velocities[&eq.symbol];
            if vs.is_empty() {
                equations.push(Equation { rhs, ..eq.clone() });
                continue;
            }
            equations.push(Equation {
                symbol: eq.symbol.clone(),
                order: 1,
                rhs: GradedPoly::symbol(&vs[0]),
            });
            for (j, v) in vs.iter().enumerate() {
                let next = match vs.get(j + 1) {
                    Some(w) => GradedPoly::symbol(w),
                    None => rhs.clone(),
                };
                extra.push(Equation {
                    symbol: v.clone(),
                    order: 1,
                    rhs: next,
                });
            }
        }
        equations.extend(extra);
        let mut space = self.space.clone();
        space.variables.extend(velocities.into_values().flatten());
        ComponentSystem { space, equations }
    }

    /// Replace constants by values (typically numbers) in every equation.
    pub fn substitute_constants(&self, values: &BTreeMap<Symbol, GradedPoly>) -> Result<Self, SuperspaceError> {
        let equations = self
            .equations
            .iter()
            .map(|e| {
                Ok(Equation {
                    rhs: e.rhs.substitute(values)?,
                    ..e.clone()
                })
            })
            .collect::<Result<Vec<_>, SuperspaceError>>()?;
        Ok(ComponentSystem {
            space: self.space.clone(),
            equations,
        })
    }

    /// Set the given symbols to zero and drop their equations.
    pub fn restrict_to_zero(&self, zero: &BTreeSet<Symbol>) -> ComponentSystem {
        let mut bindings = BTreeMap::new();
        for eq in &self.equations {
            if zero.contains(&eq.symbol) {
                for k in 0..=eq.order {
                    bindings.insert(eq.symbol.derivative(k), GradedPoly::zero());
                }
            }
        }
        let equations = self
            .equations
            .iter()
            .filter(|e| !zero.contains(&e.symbol))
            .map(|e| Equation {
                rhs: e.rhs.substitute(&bindings).expect("zero has every parity"),
                ..e.clone()
            })
            .collect();
        ComponentSystem {
            space: self.space.clone(),
            equations,
        }
    }
}

impl fmt::Display for ComponentSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(f, "{eq}")?;
        }
        Ok(())
    }
}

fn reduce_with(defs: &BTreeMap<Symbol, &Equation>, p: &GradedPoly) -> Result<GradedPoly, SuperspaceError> {
    let mut current = p.clone();
    for _ in 0..CLOSURE_PASSES {
        let mut bindings = BTreeMap::new();
        for s in current.symbols() {
            if !s.is_dynamic() || s.order() == 0 {
                continue;
            }
            if let Some(eq) = defs.get(&s.base()) {
                if s.order() >= eq.order {
                    bindings.insert(s.clone(), eq.rhs.nth_time_derivative(s.order() - eq.order));
                }
            }
        }
        if bindings.is_empty() {
            return Ok(current);
        }
        current = current.substitute(&bindings)?;
    }
    let pending: Vec<String> = current
        .symbols()
        .into_iter()
        .filter(|s| s.is_dynamic() && defs.get(&s.base()).is_some_and(|e| s.order() >= e.order))
        .map(|s| s.to_string())
        .collect();
    if pending.is_empty() {
        Ok(current)
    } else {
        Err(SuperspaceError::ClosureFailure(pending))
    }
}

/// Expand superfield (or component) equations `dt^k(target) = rhs` into a
/// closed component system ordered by superfield declaration and θ-subset.
pub fn build_component_system(
    space: &Superspace,
    equations: &[(SuperExpr, SuperExpr)],
) -> Result<ComponentSystem, SuperspaceError> {
    let mut by_field: BTreeMap<usize, Vec<Equation>> = BTreeMap::new();
    let mut free: Vec<Equation> = Vec::new();
    for (lhs, rhs) in equations {
        let (order, target) = lhs.peel_dt();
        if order == 0 {
            return Err(SuperspaceError::BadLhs(lhs.to_string()));
        }
        let expanded = space.theta_expand(rhs)?;
        match target {
            SuperExpr::Field(name) => {
                let idx = space
                    .fields
                    .iter()
                    .position(|f| &f.name == name)
                    .ok_or_else(|| SuperspaceError::Unknown(name.clone()))?;
                let decl = &space.fields[idx];
                if let Some(p) = space.parity_of(rhs)? {
                    if p != decl.parity && !expanded.is_zero() {
                        return Err(SuperspaceError::ParityMismatch {
                            equation: name.clone(),
                            lhs: decl.parity,
                        });
                    }
                } else {
                    return Err(SuperspaceError::ParityMismatch {
                        equation: name.clone(),
                        lhs: decl.parity,
                    });
                }
                let eqs = decl
                    .components()
                    .iter()
                    .map(|(s, c)| Equation {
                        symbol: c.clone(),
                        order,
                        rhs: expanded.get(*s),
                    })
                    .collect();
                if by_field.insert(idx, eqs).is_some() {
                    return Err(SuperspaceError::DuplicateDefinition(name.clone()));
                }
            }
            SuperExpr::Component(name) => {
                let sym = space
                    .component(name)
                    .ok_or_else(|| SuperspaceError::Unknown(name.clone()))?;
                if expanded.parts().any(|(s, _)| !s.is_empty()) {
                    return Err(SuperspaceError::ThetaInComponentEquation(name.clone()));
                }
                free.push(Equation {
                    symbol: sym.clone(),
                    order,
                    rhs: expanded.get(crate::grassmann::Word::EMPTY),
                });
            }
            other => return Err(SuperspaceError::BadLhs(other.to_string())),
        }
    }
    // component equations follow the superfield order of their owners
    let owner = |s: &Symbol| {
        space
            .fields
            .iter()
            .position(|f| f.components().iter().any(|(_, c)| c == s))
            .unwrap_or(usize::MAX)
    };
    let mut ordered: Vec<(usize, usize, Equation)> = Vec::new();
    for (idx, eqs) in by_field {
        for (k, eq) in eqs.into_iter().enumerate() {
            ordered.push((idx, k, eq));
        }
    }
    for eq in free {
        let idx = owner(&eq.symbol);
        let k = if idx == usize::MAX {
            space.variables.iter().position(|v| *v == eq.symbol).unwrap_or(0)
        } else {
            space.fields[idx]
                .components()
                .iter()
                .position(|(_, c)| *c == eq.symbol)
                .unwrap_or(0)
        };
        ordered.push((idx, k, eq));
    }
    ordered.sort_by_key(|(i, k, _)| (*i, *k));
    ComponentSystem::from_equations(space.clone(), ordered.into_iter().map(|(_, _, e)| e).collect())
}
