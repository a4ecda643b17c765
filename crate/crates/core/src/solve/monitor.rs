use std::collections::BTreeMap;

use super::{Assignment, LayerSystem, SolveError, Trajectory};
use crate::darboux::FirstIntegralExpr;
use crate::grassmann::{AlgebraCtx, Multivector};
use crate::symcore::{SymError, Symbol};

/// `(f/g)·exp(h)` in Λ_L for the given symbol values.
pub fn evaluate_integral(
    ctx: AlgebraCtx,
    integral: &FirstIntegralExpr,
    values: &dyn Fn(&Symbol) -> Option<Multivector<f64>>,
) -> Result<Multivector<f64>, SolveError> {
    let unbound = |e: SymError| match e {
        SymError::Unbound(n) => SolveError::Unassigned(n),
        other => other.into(),
    };
    let f = integral.numerator.eval(ctx, values).map_err(unbound)?;
    let g = integral.denominator.eval(ctx, values).map_err(unbound)?;
    let h = integral.exponent.eval(ctx, values).map_err(unbound)?;
    let g_inv = g.inverse()?;
    Ok(f.product(&g_inv)?.product(&h.exponential()?)?)
}

/// Largest change `|I(t) - I(t0)|` over grid points and basis words.
pub fn monitor_invariants(
    layer: &LayerSystem,
    traj: &Trajectory,
    integral: &FirstIntegralExpr,
    assignment: &Assignment,
) -> Result<f64, SolveError> {
    let constants: BTreeMap<Symbol, Multivector<f64>> =
        assignment.values.iter().map(|(s, v)| (s.clone(), v.to_f64())).collect();
    let mut reference: Option<Multivector<f64>> = None;
    let mut drift: f64 = 0.0;
    for (i, state) in traj.states.iter().enumerate() {
        let values = layer.values_at(state);
        let lookup = |s: &Symbol| values.get(s).or_else(|| constants.get(s)).cloned();
        let value = evaluate_integral(layer.ctx, integral, &lookup).map_err(|e| match e {
            SolveError::Grassmann(crate::grassmann::GrassmannError::NotInvertible) => {
                SolveError::SingularDenominator(traj.time(i))
            }
            other => other,
        })?;
        match &reference {
            None => reference = Some(value),
            Some(r) => drift = drift.max(value.max_abs_diff(r)),
        }
    }
    Ok(drift)
}
