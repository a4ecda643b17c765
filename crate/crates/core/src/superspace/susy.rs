use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::expr::{apply_operator, Operator, SuperfieldDecl, Superspace};
use super::system::ComponentSystem;
use super::{SuperspaceError, ThetaPoly};
use crate::coeff::int;
use crate::parity::Parity;
use crate::symcore::{GradedPoly, Symbol};

/// Supersymmetry generator used in `δX = ε G X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SusyGenerator {
    /// `Q = Σ_i Q_i`
    Q,
    /// `Q_i`
    Qi(u8),
}

impl SusyGenerator {
    pub fn operator(self) -> Operator {
        match self {
            SusyGenerator::Q => Operator::Q(None),
            SusyGenerator::Qi(i) => Operator::Q(Some(i)),
        }
    }
}

impl fmt::Display for SusyGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.operator())
    }
}

/// Fresh odd constant for the transformation parameter.
pub fn fresh_epsilon(space: &Superspace, preferred: &str) -> Symbol {
    let taken = |n: &str| space.constants.contains_key(n) || space.component(n).is_some();
    let mut name = preferred.to_string();
    let mut k = 1;
    while taken(&name) {
        name = format!("{preferred}{k}");
        k += 1;
    }
    Symbol::constant(&name, Parity::Odd)
}

/// Component variations `δc_S` of `δX = ε G X` for one superfield, with `∂_t`
/// realized by `time_derivative`.
pub fn field_variation(
    decl: &SuperfieldDecl,
    field_poly: &GradedPoly,
    epsilon: &Symbol,
    generator: SusyGenerator,
    time_derivative: &dyn Fn(&GradedPoly) -> GradedPoly,
) -> Result<Vec<(Symbol, GradedPoly)>, SuperspaceError> {
    let gx = apply_operator(generator.operator(), field_poly, decl.n, time_derivative)?;
    let delta = GradedPoly::symbol(epsilon).mul(&gx);
    let split = ThetaPoly::split(&delta);
    Ok(decl
        .components()
        .iter()
        .map(|(s, c)| (c.clone(), split.get(*s)))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct EquationResidual {
    pub equation: String,
    pub residual: String,
    #[serde(skip)]
    pub poly: GradedPoly,
}

#[derive(Debug, Clone, Serialize)]
pub struct SusyReport {
    pub generator: String,
    pub epsilon: String,
    pub residuals: Vec<EquationResidual>,
    pub invariant: bool,
}

/// Substitute `c -> c + δc` (and the matching derivatives) into every
/// equation, reduce on-shell, and report what is left.
pub fn check_susy_invariance(sys: &ComponentSystem, generator: SusyGenerator) -> Result<SusyReport, SuperspaceError> {
    if sys.space.fields.is_empty() {
        return Err(SuperspaceError::NoSuperfields);
    }
    if let SusyGenerator::Qi(i) = generator {
        if i == 0 || i > sys.space.n {
            return Err(SuperspaceError::IndexOutOfRange {
                op: generator.to_string(),
                n: sys.space.n,
            });
        }
    }
    let epsilon = fresh_epsilon(&sys.space, "eps");
    let mut variation: BTreeMap<Symbol, GradedPoly> = BTreeMap::new();
    for decl in &sys.space.fields {
        for (c, d) in field_variation(decl, &decl.as_poly(), &epsilon, generator, &GradedPoly::time_derivative)? {
            variation.insert(c, d);
        }
    }
    let max_order = sys.max_order();
    let mut bindings = BTreeMap::new();
    for (c, d) in &variation {
        let mut dk = d.clone();
        for k in 0..=max_order {
            bindings.insert(c.derivative(k), GradedPoly::symbol(&c.derivative(k)).add(&dk));
            dk = dk.time_derivative();
        }
    }
    let mut residuals = Vec::new();
    for eq in &sys.equations {
        let lhs_var = variation
            .get(&eq.symbol)
            .map(|d| d.nth_time_derivative(eq.order))
            .unwrap_or_default();
        let lhs = GradedPoly::symbol(&eq.symbol.derivative(eq.order)).add(&lhs_var);
        let rhs = eq.rhs.substitute(&bindings)?;
        let residual = sys.reduce_on_shell(&lhs.sub(&rhs))?;
        residuals.push(EquationResidual {
            equation: eq.symbol.derivative(eq.order).to_string(),
            residual: residual.to_string(),
            poly: residual,
        });
    }
    let invariant = residuals.iter().all(|r| r.poly.is_zero());
    Ok(SusyReport {
        generator: generator.to_string(),
        epsilon: epsilon.to_string(),
        residuals,
        invariant,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub field_parity: Parity,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorAlgebraReport {
    pub n: u8,
    pub checks: Vec<RelationCheck>,
}

impl OperatorAlgebraReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Verify the (anti)commutation relations of `Q_i`, `D_i`, `Q`, `D` on
/// generic even and odd superfields.
pub fn operator_algebra_check(n: u8) -> Result<OperatorAlgebraReport, SuperspaceError> {
    let mut checks = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let decl = SuperfieldDecl::new("Z", parity, n, None)?;
        let x = decl.as_poly();
        let dt_x = x.time_derivative();
        let op = |o: Operator, p: &GradedPoly| apply_operator(o, p, n, &GradedPoly::time_derivative);
        let anti = |a: Operator, b: Operator| -> Result<GradedPoly, SuperspaceError> {
            Ok(op(a, &op(b, &x)?)?.add(&op(b, &op(a, &x)?)?))
        };
        let mut push = |relation: String, value: GradedPoly, expected: GradedPoly| {
            checks.push(RelationCheck {
                relation,
                field_parity: parity,
                holds: value == expected,
            });
        };
        for i in 1..=n {
            for j in 1..=n {
                let delta = if i == j { 2 } else { 0 };
                push(
                    format!("{{Q{i},Q{j}}} = {delta} dt"),
                    anti(Operator::Q(Some(i)), Operator::Q(Some(j)))?,
                    dt_x.scale(&int(delta)),
                );
                push(
                    format!("{{D{i},D{j}}} = {} dt", -delta),
                    anti(Operator::D(Some(i)), Operator::D(Some(j)))?,
                    dt_x.scale(&int(-delta)),
                );
                push(
                    format!("{{Q{i},D{j}}} = 0"),
                    anti(Operator::Q(Some(i)), Operator::D(Some(j)))?,
                    GradedPoly::zero(),
                );
            }
        }
        let two_n = 2 * n as i64;
        push(
            format!("{{Q,Q}} = {two_n} dt"),
            anti(Operator::Q(None), Operator::Q(None))?,
            dt_x.scale(&int(two_n)),
        );
        push(
            format!("{{D,D}} = {} dt", -two_n),
            anti(Operator::D(None), Operator::D(None))?,
            dt_x.scale(&int(-two_n)),
        );
        push(
            "{Q,D} = 0".to_string(),
            anti(Operator::Q(None), Operator::D(None))?,
            GradedPoly::zero(),
        );
        if n == 1 {
            push(
                "D^2 = -dt".to_string(),
                op(Operator::D(None), &op(Operator::D(None), &x)?)?,
                dt_x.neg(),
            );
            push(
                "Q^2 = dt".to_string(),
                op(Operator::Q(None), &op(Operator::Q(None), &x)?)?,
                dt_x.clone(),
            );
        }
    }
    Ok(OperatorAlgebraReport { n, checks })
}
