use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{integrate, time_symbol, Assignment, LayerSystem, SolveError, Trajectory};
use crate::grassmann::Multivector;
use crate::superspace::{field_variation, ComponentSystem, SusyGenerator};
use crate::symcore::{GradedPoly, Symbol};

/// Closed-form solution: each component as a Laurent polynomial in `t` and
/// the constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSolution {
    pub components: Vec<(Symbol, GradedPoly)>,
}

impl SymbolicSolution {
    pub fn get(&self, s: &Symbol) -> Option<&GradedPoly> {
        self.components.iter().find(|(c, _)| c == s).map(|(_, p)| p)
    }

    pub fn component(&self, name: &str) -> Option<&GradedPoly> {
        self.components.iter().find(|(c, _)| c.name() == name).map(|(_, p)| p)
    }

    pub fn record(&self) -> BTreeMap<String, String> {
        self.components
            .iter()
            .map(|(s, p)| (s.name().to_string(), p.to_string()))
            .collect()
    }
}

impl fmt::Display for SymbolicSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, p) in &self.components {
            writeln!(f, "{s} = {p}")?;
        }
        Ok(())
    }
}

fn dt(p: &GradedPoly) -> GradedPoly {
    p.partial(&time_symbol())
}

/// `d^k c/dt^k - rhs` for every equation, with the solution substituted.
pub fn solution_residuals(
    sys: &ComponentSystem,
    sol: &SymbolicSolution,
) -> Result<Vec<(String, GradedPoly)>, SolveError> {
    let mut bindings = BTreeMap::new();
    for eq in &sys.equations {
        let mut value = sol
            .get(&eq.symbol)
            .ok_or_else(|| SolveError::MissingInitial(eq.symbol.to_string()))?
            .clone();
        for k in 0..eq.order {
            bindings.insert(eq.symbol.derivative(k), value.clone());
            value = dt(&value);
        }
    }
    sys.equations
        .iter()
        .map(|eq| {
            let lhs = (0..eq.order).fold(sol.get(&eq.symbol).expect("checked").clone(), |p, _| dt(&p));
            let rhs = eq.rhs.substitute(&bindings)?;
            Ok((eq.symbol.derivative(eq.order).to_string(), lhs.sub(&rhs)))
        })
        .collect()
}

fn check_solution(sys: &ComponentSystem, sol: &SymbolicSolution) -> Result<(), SolveError> {
    for (name, r) in solution_residuals(sys, sol)? {
        if !r.is_zero() {
            return Err(SolveError::SeedResidual(format!("{name}: {r}")));
        }
    }
    Ok(())
}

/// Apply `X -> X + ε G X` to a closed-form solution. Both the seed and the
/// result are checked against the system exactly.
pub fn transform_solution(
    sys: &ComponentSystem,
    seed: &SymbolicSolution,
    epsilon: &Symbol,
    generator: SusyGenerator,
) -> Result<SymbolicSolution, SolveError> {
    check_solution(sys, seed)?;
    let mut out: BTreeMap<Symbol, GradedPoly> = seed.components.iter().cloned().collect();
    for decl in &sys.space.fields {
        let mut field = GradedPoly::zero();
        for (s, c) in decl.components() {
            let value = seed.get(c).ok_or_else(|| SolveError::MissingInitial(c.to_string()))?;
            field = field.add(&crate::superspace::theta_monomial(*s).mul(value));
        }
        for (c, delta) in field_variation(decl, &field, epsilon, generator, &dt)? {
            let entry = out.get_mut(&c).expect("seed covers every component");
            *entry = entry.add(&delta);
        }
    }
    let result = SymbolicSolution {
        components: seed
            .components
            .iter()
            .map(|(s, _)| (s.clone(), out[s].clone()))
            .collect(),
    };
    check_solution(sys, &result)?;
    Ok(result)
}

/// A transformed numeric trajectory and its deviation from a fresh
/// integration started at the transformed initial state.
#[derive(Debug, Clone, Serialize)]
pub struct TransformedTrajectory {
    pub trajectory: Trajectory,
    pub max_deviation: f64,
}

/// Variation of every first-order variable in terms of first-order
/// variables and constants.
fn first_order_variations(
    sys: &ComponentSystem,
    epsilon: &Symbol,
    generator: SusyGenerator,
) -> Result<BTreeMap<Symbol, GradedPoly>, SolveError> {
    let mut velocity = BTreeMap::new();
    for eq in &sys.equations {
        for j in 1..eq.order {
            let v = Symbol::dynamic(&format!("{}_d{j}", eq.symbol.name()), eq.symbol.parity());
            velocity.insert(eq.symbol.derivative(j), GradedPoly::symbol(&v));
        }
    }
    let mut out = BTreeMap::new();
    for decl in &sys.space.fields {
        for (c, delta) in field_variation(decl, &decl.as_poly(), epsilon, generator, &GradedPoly::time_derivative)? {
            let order = sys.equation(c.name()).map_or(1, |e| e.order);
            let mut d = sys.reduce_on_shell(&delta)?;
            out.insert(c.clone(), d.substitute(&velocity)?);
            for j in 1..order {
                d = sys.reduce_on_shell(&d.time_derivative())?;
                let v = Symbol::dynamic(&format!("{}_d{j}", c.name()), c.parity());
                out.insert(v, d.substitute(&velocity)?);
            }
        }
    }
    Ok(out)
}

/// Apply `X -> X + ε G X` pointwise to a trajectory of the layer system,
/// with `ε` the generator `e<eps_generator>`, then integrate from the
/// transformed initial state and report the largest deviation.
pub fn transform_trajectory(
    sys: &ComponentSystem,
    layer: &LayerSystem,
    assignment: &Assignment,
    traj: &Trajectory,
    generator: SusyGenerator,
    eps_generator: u32,
) -> Result<TransformedTrajectory, SolveError> {
    let epsilon = crate::superspace::fresh_epsilon(&sys.space, "eps");
    let variations = first_order_variations(sys, &epsilon, generator)?;
    let eps_value: Multivector<f64> = Multivector::generator(layer.ctx, eps_generator)?;
    let constants: BTreeMap<Symbol, Multivector<f64>> =
        assignment.values.iter().map(|(s, v)| (s.clone(), v.to_f64())).collect();
    let mut states = Vec::with_capacity(traj.len());
    for state in &traj.states {
        let values = layer.values_at(state);
        let lookup = |s: &Symbol| {
            if s == &epsilon {
                return Some(eps_value.clone());
            }
            values.get(s).or_else(|| constants.get(s)).cloned()
        };
        let mut moved = values.clone();
        for (v, delta) in &variations {
            let d = delta.eval(layer.ctx, &lookup)?;
            let entry = moved.get_mut(v).expect("layer variable");
            *entry = entry.add(&d)?;
        }
        states.push(layer.state_from(&moved)?);
    }
    let t_end = traj.time(traj.len() - 1);
    let fresh = integrate(layer, &states[0], traj.t0, t_end, traj.h)?;
    let max_deviation = fresh
        .states
        .iter()
        .zip(&states)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    Ok(TransformedTrajectory {
        trajectory: Trajectory {
            t0: traj.t0,
            h: traj.h,
            labels: traj.labels.clone(),
            states,
        },
        max_deviation,
    })
}
