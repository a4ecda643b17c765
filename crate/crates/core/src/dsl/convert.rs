use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::expr::{parse_expr, BinOp, Expr, Func};
use super::file::{IntegralLine, SystemFile};
use super::{DslError, ErrorKind, Pos};
use crate::coeff::Rational;
use crate::darboux::FirstIntegralExpr;
use crate::grassmann::{AlgebraCtx, Multivector};
use crate::parity::Parity;
use crate::solve::{time_symbol, Assignment, SymbolicSolution};
use crate::superspace::{
    build_component_system, ComponentSystem, Operator, SuperExpr, SuperfieldDecl, Superspace, SuperspaceError,
};
use crate::symcore::{GradedPoly, Symbol};

/// What bare identifiers may refer to inside a polynomial expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Numbers and constants.
    Constants,
    /// Components, free variables and constants.
    Components,
    /// As `Components`, plus the independent variable `t`.
    WithTime,
    /// Numbers, constants and generators `e<k>`, the latter as odd constants.
    Grassmann,
}

/// A system file turned into algebra.
#[derive(Debug, Clone)]
pub struct BuiltSystem {
    pub space: Superspace,
    pub equations: Vec<(SuperExpr, SuperExpr)>,
    /// Constants declared with a value.
    pub values: BTreeMap<Symbol, GradedPoly>,
    /// Closed component system, constants left symbolic.
    pub raw: ComponentSystem,
    /// `raw` with the valued constants substituted.
    pub system: ComponentSystem,
}

fn pos_of(e: &Expr, fallback: Pos) -> Pos {
    e.pos().unwrap_or(fallback)
}

fn invalid(pos: Pos, msg: impl Into<String>) -> DslError {
    DslError::invalid(pos, msg)
}

/// A component, or a velocity `<component>_d<j>` of a lowered system.
fn init_symbol(space: &Superspace, name: &str) -> Option<Symbol> {
    if let Some(c) = space.component(name) {
        return Some(c.clone());
    }
    let (base, j) = name.rsplit_once("_d")?;
    j.parse::<u32>().ok().filter(|j| *j >= 1)?;
    space.component(base).map(|c| Symbol::dynamic(name, c.parity()))
}

/// `k` for a generator name `e<k>`.
pub fn generator_index(name: &str) -> Option<u32> {
    name.strip_prefix('e')
        .filter(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit()))?
        .parse()
        .ok()
}

fn theta_index(name: &str) -> Option<u8> {
    name.strip_prefix("theta")
        .filter(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit()))?
        .parse()
        .ok()
}

/// Integer value of a (possibly negated) integer literal.
fn integer_literal(e: &Expr) -> Option<i64> {
    match e {
        Expr::Neg(inner) => integer_literal(inner).map(|n| -n),
        _ => e.integer().map(i64::from),
    }
}

/// Value of an expression built from numbers only.
fn numeric(e: &Expr) -> Option<Rational> {
    match e {
        Expr::Num { value, .. } => Some(value.clone()),
        Expr::Neg(a) => numeric(a).map(|v| -v),
        Expr::Binary { op, lhs, rhs } => {
            let (a, b) = (numeric(lhs)?, numeric(rhs)?);
            match op {
                BinOp::Add => Some(a + b),
                BinOp::Sub => Some(a - b),
                BinOp::Mul | BinOp::Dot => Some(a * b),
                BinOp::Div => (!b.is_zero()).then(|| a / b),
            }
        }
        Expr::Pow { base, exp } => {
            let b = numeric(base)?;
            let k = integer_literal(exp)?;
            if k < 0 && b.is_zero() {
                return None;
            }
            let p = (0..k.unsigned_abs()).fold(Rational::one(), |acc, _| acc * b.clone());
            Some(if k < 0 { p.recip() } else { p })
        }
        _ => None,
    }
}

fn map_superspace(err: SuperspaceError, pos: Pos) -> DslError {
    match err {
        SuperspaceError::ParityMismatch { .. } => DslError::new(pos, ErrorKind::Parity(err.to_string())),
        SuperspaceError::Unknown(n) => DslError::new(pos, ErrorKind::UndeclaredIdentifier(n)),
        other => invalid(pos, other.to_string()),
    }
}

impl SystemFile {
    /// Declarations as a superspace. Systems without superfields use N=1.
    pub fn superspace(&self) -> Result<Superspace, DslError> {
        let n = self.superfields.first().map_or(1, |s| s.n);
        let mut space = Superspace::new(n);
        for s in &self.superfields {
            if s.n != n {
                return Err(invalid(
                    s.at.0,
                    format!("superfield `{}` has N={}, expected N={n}", s.name, s.n),
                ));
            }
            let decl = SuperfieldDecl::new(&s.name, s.parity, s.n, s.components.clone())
                .map_err(|e| map_superspace(e, s.at.0))?;
            for (_, c) in decl.components() {
                if self.constants.iter().any(|k| k.name == c.name())
                    || self.variables.iter().any(|v| v.name == c.name())
                {
                    return Err(DslError::new(s.at.0, ErrorKind::Duplicate(c.name().to_string())));
                }
            }
            space.add_field(decl).map_err(|e| map_superspace(e, s.at.0))?;
        }
        for v in &self.variables {
            space = space.with_variable(&v.name, v.parity);
        }
        for c in &self.constants {
            space = space.with_constant(&c.name, c.parity);
        }
        Ok(space)
    }

    /// Superfield expression; division only by numbers.
    pub fn super_expr(&self, space: &Superspace, e: &Expr) -> Result<SuperExpr, DslError> {
        Ok(match e {
            Expr::Num { value, .. } => SuperExpr::num(value.clone()),
            Expr::Ident { name, at } => {
                if space.field(name).is_some() {
                    SuperExpr::field(name)
                } else if space.component(name).is_some() {
                    SuperExpr::Component(name.clone())
                } else if space.constants.contains_key(name) {
                    SuperExpr::constant(name)
                } else if let Some(i) = theta_index(name).filter(|i| (1..=space.n).contains(i)) {
                    SuperExpr::Theta(i)
                } else {
                    return Err(DslError::new(at.0, ErrorKind::UndeclaredIdentifier(name.clone())));
                }
            }
            Expr::Neg(a) => -self.super_expr(space, a)?,
            Expr::Binary { op, lhs, rhs } => {
                let a = self.super_expr(space, lhs)?;
                match op {
                    BinOp::Add => SuperExpr::sum(vec![a, self.super_expr(space, rhs)?]),
                    BinOp::Sub => SuperExpr::sum(vec![a, -self.super_expr(space, rhs)?]),
                    BinOp::Mul | BinOp::Dot => SuperExpr::product(vec![a, self.super_expr(space, rhs)?]),
                    BinOp::Div => {
                        let d = numeric(rhs)
                            .filter(|d| !d.is_zero())
                            .ok_or_else(|| invalid(pos_of(rhs, Pos::default()), "division only by a nonzero number"))?;
                        SuperExpr::product(vec![SuperExpr::num(d.recip()), a])
                    }
                }
            }
            Expr::Pow { base, exp } => {
                let k = exp.integer().ok_or_else(|| {
                    invalid(
                        pos_of(exp, pos_of(base, Pos::default())),
                        "exponent must be a non-negative integer",
                    )
                })?;
                self.super_expr(space, base)?.pow(k)
            }
            Expr::Call { func, arg, at } => {
                let inner = self.super_expr(space, arg)?;
                let check = |i: &Option<u8>| match i {
                    Some(i) if *i > space.n => Err(invalid(
                        at.0,
                        format!("operator index {i} out of range for N={}", space.n),
                    )),
                    _ => Ok(()),
                };
                match func {
                    Func::D(i) => {
                        check(i)?;
                        SuperExpr::apply(Operator::D(*i), inner)
                    }
                    Func::Q(i) => {
                        check(i)?;
                        SuperExpr::apply(Operator::Q(*i), inner)
                    }
                    Func::Dt(k) => SuperExpr::dt(*k, inner),
                    Func::Exp => return Err(invalid(at.0, "exp is only allowed in integrals")),
                }
            }
        })
    }

    /// Polynomial in components, constants and (for [`Scope::WithTime`]) `t`.
    /// Division is allowed by a single even monomial.
    pub fn poly(&self, space: &Superspace, e: &Expr, scope: Scope) -> Result<GradedPoly, DslError> {
        self.poly_in(space, e, scope, &BTreeMap::new())
    }

    /// As [`SystemFile::poly`], with `known` symbols replaced by their values
    /// before any division.
    fn poly_in(
        &self,
        space: &Superspace,
        e: &Expr,
        scope: Scope,
        known: &BTreeMap<Symbol, GradedPoly>,
    ) -> Result<GradedPoly, DslError> {
        Ok(match e {
            Expr::Num { value, .. } => GradedPoly::constant(value.clone()),
            Expr::Ident { name, at } => {
                let sym = if let Some(c) = space.constants.get(name) {
                    c.clone()
                } else if name == "t" && scope == Scope::WithTime {
                    time_symbol()
                } else if let (Some(_), Scope::Grassmann) = (generator_index(name), scope) {
                    Symbol::constant(name, Parity::Odd)
                } else if let (Some(c), Scope::Components | Scope::WithTime) = (space.component(name), scope) {
                    c.clone()
                } else if space.field(name).is_some() {
                    return Err(invalid(at.0, format!("superfield `{name}` is not allowed here")));
                } else {
                    return Err(DslError::new(at.0, ErrorKind::UndeclaredIdentifier(name.clone())));
                };
                known.get(&sym).cloned().unwrap_or_else(|| GradedPoly::symbol(&sym))
            }
            Expr::Neg(a) => self.poly_in(space, a, scope, known)?.neg(),
            Expr::Binary { op, lhs, rhs } => {
                let a = self.poly_in(space, lhs, scope, known)?;
                let b = self.poly_in(space, rhs, scope, known)?;
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul | BinOp::Dot => a.mul(&b),
                    BinOp::Div => {
                        let inv = b.laurent_inverse().ok_or_else(|| {
                            invalid(
                                pos_of(rhs, pos_of(lhs, Pos::default())),
                                "division only by a single even monomial",
                            )
                        })?;
                        a.mul(&inv)
                    }
                }
            }
            Expr::Pow { base, exp } => {
                let b = self.poly_in(space, base, scope, known)?;
                if scope == Scope::Grassmann && integer_literal(exp).is_none() {
                    // wedge of Grassmann values
                    return Ok(b.mul(&self.poly_in(space, exp, scope, known)?));
                }
                let k = integer_literal(exp)
                    .ok_or_else(|| invalid(pos_of(exp, pos_of(base, Pos::default())), "exponent must be an integer"))?;
                if k >= 0 {
                    b.pow(k as u32)
                } else {
                    b.laurent_inverse()
                        .ok_or_else(|| invalid(pos_of(base, Pos::default()), "negative power of a non-monomial"))?
                        .pow(k.unsigned_abs() as u32)
                }
            }
            Expr::Call { at, func, .. } => return Err(invalid(at.0, format!("`{func}` is not allowed here"))),
        })
    }

    /// Values of the constants declared with one, each reduced to numbers
    /// and constants without a value.
    pub fn constant_values(&self, space: &Superspace) -> Result<BTreeMap<Symbol, GradedPoly>, DslError> {
        let mut values = BTreeMap::new();
        for c in &self.constants {
            if let Some(v) = &c.value {
                let p = self.poly_in(space, v, Scope::Constants, &values)?;
                if !p.is_zero() && !p.has_parity(c.parity) {
                    return Err(DslError::new(
                        c.at.0,
                        ErrorKind::Parity(format!("value of `{}` is not {}", c.name, c.parity)),
                    ));
                }
                values.insert(space.constants[&c.name].clone(), p);
            }
        }
        Ok(values)
    }

    /// Superspace, equations and the closed component system.
    pub fn build(&self) -> Result<BuiltSystem, DslError> {
        let space = self.superspace()?;
        let values = self.constant_values(&space)?;
        let mut equations = Vec::new();
        for eq in &self.equations {
            let target = if space.field(&eq.target).is_some() {
                SuperExpr::field(&eq.target)
            } else if space.component(&eq.target).is_some() {
                SuperExpr::Component(eq.target.clone())
            } else {
                return Err(DslError::new(
                    eq.at.0,
                    ErrorKind::UndeclaredIdentifier(eq.target.clone()),
                ));
            };
            equations.push((SuperExpr::dt(eq.order, target), self.super_expr(&space, &eq.rhs)?));
        }
        let first = self.equations.first().map_or(Pos::default(), |e| e.at.0);
        let raw = build_component_system(&space, &equations).map_err(|e| {
            let pos = match &e {
                SuperspaceError::ParityMismatch { equation, .. } | SuperspaceError::DuplicateDefinition(equation) => {
                    self.equations
                        .iter()
                        .rev()
                        .find(|l| &l.target == equation)
                        .map_or(first, |l| l.at.0)
                }
                _ => first,
            };
            map_superspace(e, pos)
        })?;
        let system = raw
            .substitute_constants(&values)
            .map_err(|e| map_superspace(e, first))?;
        Ok(BuiltSystem {
            space,
            equations,
            values,
            raw,
            system,
        })
    }

    /// Resolve every expression in the file, reporting the first problem.
    pub fn check(&self) -> Result<(), DslError> {
        let built = self.build()?;
        for i in &self.integrals {
            self.integral(&built.space, i)?;
            for c in &i.when {
                if !built.space.constants.contains_key(c) && built.space.component(c).is_none() {
                    return Err(DslError::new(i.at.0, ErrorKind::UndeclaredIdentifier(c.clone())));
                }
            }
        }
        let ctx =
            AlgebraCtx::new(self.generators.unwrap_or(8).max(8)).map_err(|e| invalid(Pos::default(), e.to_string()))?;
        let lookup = |name: &str| built.space.constants.contains_key(name).then(|| Multivector::zero(ctx));
        for s in self.solve.assign.iter().chain(&self.solve.init) {
            eval_multivector(&s.value, ctx, &lookup)?;
        }
        for s in &self.solve.seed {
            self.poly(&built.space, &s.value, Scope::WithTime)?;
        }
        for s in &self.solve.init {
            if init_symbol(&built.space, &s.name).is_none() {
                return Err(DslError::new(s.at.0, ErrorKind::UndeclaredIdentifier(s.name.clone())));
            }
        }
        for s in &self.solve.seed {
            if built.space.component(&s.name).is_none() {
                return Err(DslError::new(s.at.0, ErrorKind::UndeclaredIdentifier(s.name.clone())));
            }
        }
        for s in &self.solve.assign {
            if !built.space.constants.contains_key(&s.name) {
                return Err(DslError::new(s.at.0, ErrorKind::UndeclaredIdentifier(s.name.clone())));
            }
        }
        Ok(())
    }

    /// Decompose an integral line into `(f/g)·exp(h)`.
    pub fn integral(&self, space: &Superspace, line: &IntegralLine) -> Result<FirstIntegralExpr, DslError> {
        let (f, g, h) = self.decompose(space, &line.expr)?;
        FirstIntegralExpr::new(f, g, h).map_err(|e| DslError::new(line.at.0, ErrorKind::Parity(e.to_string())))
    }

    fn decompose(&self, space: &Superspace, e: &Expr) -> Result<(GradedPoly, GradedPoly, GradedPoly), DslError> {
        let one = GradedPoly::one;
        Ok(match e {
            Expr::Call {
                func: Func::Exp, arg, ..
            } => (one(), one(), self.poly(space, arg, Scope::Components)?),
            Expr::Neg(a) => {
                let (f, g, h) = self.decompose(space, a)?;
                (f.neg(), g, h)
            }
            Expr::Binary {
                op: BinOp::Mul | BinOp::Dot,
                lhs,
                rhs,
            } => {
                let (f1, g1, h1) = self.decompose(space, lhs)?;
                let (f2, g2, h2) = self.decompose(space, rhs)?;
                (f1.mul(&f2), g1.mul(&g2), h1.add(&h2))
            }
            Expr::Binary {
                op: BinOp::Div,
                lhs,
                rhs,
            } => {
                let (f1, g1, h1) = self.decompose(space, lhs)?;
                let (f2, g2, h2) = self.decompose(space, rhs)?;
                if !f2.has_parity(Parity::Even) {
                    return Err(DslError::new(
                        pos_of(rhs, Pos::default()),
                        ErrorKind::Parity("odd denominator".into()),
                    ));
                }
                (f1.mul(&g2), g1.mul(&f2), h1.sub(&h2))
            }
            Expr::Binary {
                op: op @ (BinOp::Add | BinOp::Sub),
                lhs,
                rhs,
            } => {
                let (f1, g1, h1) = self.decompose(space, lhs)?;
                let (f2, g2, h2) = self.decompose(space, rhs)?;
                if !h1.is_zero() || !h2.is_zero() {
                    return Err(invalid(pos_of(e, Pos::default()), "exp may not appear inside a sum"));
                }
                let f2 = if *op == BinOp::Sub { f2.neg() } else { f2 };
                if g1 == g2 {
                    (f1.add(&f2), g1, GradedPoly::zero())
                } else {
                    (f1.mul(&g2).add(&f2.mul(&g1)), g1.mul(&g2), GradedPoly::zero())
                }
            }
            Expr::Pow { base, exp } if contains_exp_or_div(base) => {
                let k = exp
                    .integer()
                    .ok_or_else(|| invalid(pos_of(exp, Pos::default()), "exponent must be a non-negative integer"))?;
                let (f, g, h) = self.decompose(space, base)?;
                (f.pow(k), g.pow(k), h.scale(&Rational::from_integer(k.into())))
            }
            _ => (self.poly(space, e, Scope::Components)?, one(), GradedPoly::zero()),
        })
    }

    /// Constant values in Λ_L: explicit `assign` lines, then fresh generators
    /// for the remaining odd constants, then declared values.
    pub fn assignment(&self, built: &BuiltSystem, ctx: AlgebraCtx) -> Result<Assignment, DslError> {
        let mut out = Assignment::new(ctx);
        for s in &self.solve.assign {
            let sym = built
                .space
                .constants
                .get(&s.name)
                .ok_or_else(|| DslError::new(s.at.0, ErrorKind::UndeclaredIdentifier(s.name.clone())))?;
            let v = eval_multivector(&s.value, ctx, &|_| None)?;
            out.insert(sym.clone(), v)
                .map_err(|e| DslError::new(s.at.0, ErrorKind::Parity(e.to_string())))?;
        }
        let pending: BTreeSet<Symbol> = built
            .space
            .constants
            .values()
            .filter(|c| !built.values.contains_key(*c))
            .cloned()
            .collect();
        out.complete_defaults(&pending)
            .map_err(|e| invalid(Pos::default(), e.to_string()))?;
        for (sym, p) in &built.values {
            if out.get(sym).is_none() {
                let v = out
                    .eval_constant_poly(p)
                    .map_err(|e| invalid(Pos::default(), e.to_string()))?;
                out.insert(sym.clone(), v)
                    .map_err(|e| invalid(Pos::default(), e.to_string()))?;
            }
        }
        Ok(out)
    }

    /// Initial values of components in Λ_L; constants take their assigned values.
    pub fn initial_values(
        &self,
        built: &BuiltSystem,
        assignment: &Assignment,
    ) -> Result<BTreeMap<Symbol, Multivector<Rational>>, DslError> {
        let lookup = |name: &str| built.space.constants.get(name).and_then(|s| assignment.get(s)).cloned();
        let mut out = BTreeMap::new();
        for s in &self.solve.init {
            let sym = init_symbol(&built.space, &s.name)
                .ok_or_else(|| DslError::new(s.at.0, ErrorKind::UndeclaredIdentifier(s.name.clone())))?;
            let v = eval_multivector(&s.value, assignment.ctx, &lookup)?;
            if !v.is_zero() && v.parity() != Some(sym.parity()) {
                return Err(DslError::new(
                    s.at.0,
                    ErrorKind::Parity(format!("initial value of `{}` is not {}", s.name, sym.parity())),
                ));
            }
            out.insert(sym, v);
        }
        Ok(out)
    }

    /// Initial values as polynomials in the constants and the generators
    /// `e<k>` (odd constants of that name), for symbolic work.
    pub fn initial_polys(&self, built: &BuiltSystem) -> Result<BTreeMap<Symbol, GradedPoly>, DslError> {
        let mut out = BTreeMap::new();
        for s in &self.solve.init {
            let sym = init_symbol(&built.space, &s.name)
                .ok_or_else(|| DslError::new(s.at.0, ErrorKind::UndeclaredIdentifier(s.name.clone())))?;
            let p = self.poly_in(&built.space, &s.value, Scope::Grassmann, &built.values)?;
            out.insert(sym, p);
        }
        Ok(out)
    }

    /// Closed-form seed solution from the `seed` lines.
    pub fn seed_solution(&self, built: &BuiltSystem) -> Result<SymbolicSolution, DslError> {
        let mut components = Vec::new();
        for s in &self.solve.seed {
            let sym = built
                .space
                .component(&s.name)
                .ok_or_else(|| DslError::new(s.at.0, ErrorKind::UndeclaredIdentifier(s.name.clone())))?;
            let p = self.poly_in(&built.space, &s.value, Scope::WithTime, &built.values)?;
            components.push((sym.clone(), p));
        }
        Ok(SymbolicSolution { components })
    }

    /// Numeric solver setting, if present.
    pub fn setting(&self, key: &str) -> Result<Option<f64>, DslError> {
        let e = match key {
            "t0" => &self.solve.t0,
            "t_end" => &self.solve.t_end,
            "h" => &self.solve.h,
            _ => return Ok(None),
        };
        e.as_ref()
            .map(|e| {
                numeric(e)
                    .map(|r| crate::coeff::rational_to_f64(&r))
                    .ok_or_else(|| invalid(pos_of(e, Pos::default()), format!("`{key}` must be a number")))
            })
            .transpose()
    }
}

fn contains_exp_or_div(e: &Expr) -> bool {
    match e {
        Expr::Call { func: Func::Exp, .. } | Expr::Binary { op: BinOp::Div, .. } => true,
        Expr::Neg(a) => contains_exp_or_div(a),
        Expr::Binary { lhs, rhs, .. } => contains_exp_or_div(lhs) || contains_exp_or_div(rhs),
        Expr::Pow { base, .. } => contains_exp_or_div(base),
        _ => false,
    }
}

/// Evaluate an expression in Λ_L. `e<k>` names generators, `a^b` between
/// non-integer operands is the wedge (here: the product) and other names go
/// through `lookup`.
pub fn eval_multivector(
    e: &Expr,
    ctx: AlgebraCtx,
    lookup: &dyn Fn(&str) -> Option<Multivector<Rational>>,
) -> Result<Multivector<Rational>, DslError> {
    let here = pos_of(e, Pos::default());
    let grass = |err: crate::grassmann::GrassmannError| invalid(here, err.to_string());
    Ok(match e {
        Expr::Num { value, .. } => Multivector::scalar(ctx, value.clone()),
        Expr::Ident { name, at } => match generator_index(name) {
            Some(k) => Multivector::generator(ctx, k).map_err(|err| invalid(at.0, err.to_string()))?,
            None => lookup(name).ok_or_else(|| DslError::new(at.0, ErrorKind::UndeclaredIdentifier(name.clone())))?,
        },
        Expr::Neg(a) => eval_multivector(a, ctx, lookup)?.neg(),
        Expr::Binary { op, lhs, rhs } => {
            let a = eval_multivector(lhs, ctx, lookup)?;
            match op {
                BinOp::Add => a.add(&eval_multivector(rhs, ctx, lookup)?).map_err(grass)?,
                BinOp::Sub => a.sub(&eval_multivector(rhs, ctx, lookup)?).map_err(grass)?,
                BinOp::Mul | BinOp::Dot => a.product(&eval_multivector(rhs, ctx, lookup)?).map_err(grass)?,
                BinOp::Div => {
                    let d = numeric(rhs)
                        .filter(|d| !d.is_zero())
                        .ok_or_else(|| invalid(here, "division only by a nonzero number"))?;
                    a.scale(&d.recip())
                }
            }
        }
        Expr::Pow { base, exp } => {
            let a = eval_multivector(base, ctx, lookup)?;
            match exp.integer() {
                Some(k) => {
                    let mut acc = Multivector::one(ctx);
                    for _ in 0..k {
                        acc = acc.product(&a).map_err(grass)?;
                    }
                    acc
                }
                None => a.product(&eval_multivector(exp, ctx, lookup)?).map_err(grass)?,
            }
        }
        Expr::Call { func, at, .. } => {
            return Err(invalid(at.0, format!("`{func}` is not allowed in a Grassmann value")))
        }
    })
}

/// Parse a multivector such as `3 + 2*e1^e2 - e1^e3^e4`.
pub fn parse_multivector(text: &str, ctx: AlgebraCtx) -> Result<Multivector<Rational>, DslError> {
    eval_multivector(&parse_expr(text)?, ctx, &|_| None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;
    use crate::dsl::parse_system;

    #[test]
    fn undeclared_identifier_position() {
        let text = "[superfields]\nX : even N=1\n\n[equations]\ndt(X) = X + Z\n";
        let err = parse_system(text).unwrap_err();
        assert_eq!(err.kind, ErrorKind::UndeclaredIdentifier("Z".into()));
        assert_eq!((err.pos.line, err.pos.col), (5, 13));
    }

    #[test]
    fn parity_inconsistency_is_reported() {
        let text = "[superfields]\nX : even N=1 (x, xi)\nY : odd N=1 (eta, y)\n\n[equations]\ndt(X) = Y\n";
        let err = parse_system(text).unwrap_err();
        assert!(matches!(err.kind, ErrorKind::Parity(_)), "{err}");
        assert_eq!(err.pos.line, 6);
        let mixed = "[superfields]\nX : even N=1\nY : odd N=2\n";
        assert!(parse_system(mixed).is_err());
    }

    #[test]
    fn builds_fermionic_pair() {
        let text = "[superfields]\nY1 : odd N=1 (xi1, x1)\nY2 : odd N=1 (xi2, x2)\n\n[equations]\ndt(Y1) = Y1*D(Y2)\ndt(Y2) = Y2*D(Y2)\n";
        let f = parse_system(text).unwrap();
        let b = f.build().unwrap();
        assert_eq!(b.system.rhs("xi1").unwrap().to_string(), "x2*xi1");
        assert_eq!(b.system.equations.len(), 4);
    }

    #[test]
    fn integral_decomposition() {
        let text = "[constants]\nalpha : odd\n\n[superfields]\nX : even N=1 (x, xi)\n\n[equations]\ndt(X) = X^2\n\n[integrals]\nI = xi*exp(x^2/2)/x^2\nJ = (x - xi.alpha)/x\n";
        let f = parse_system(text).unwrap();
        let b = f.build().unwrap();
        let i = f.integral(&b.space, &f.integrals[0]).unwrap();
        assert_eq!(i.numerator.to_string(), "xi");
        assert_eq!(i.denominator.to_string(), "x^2");
        assert_eq!(i.exponent.to_string(), "1/2*x^2");
        let j = f.integral(&b.space, &f.integrals[1]).unwrap();
        assert_eq!(j.denominator.to_string(), "x");
    }

    #[test]
    fn multivector_text() {
        let ctx = AlgebraCtx::new(4).unwrap();
        let m = parse_multivector("3 + 2*e1^e2 - e1^e3^e4", ctx).unwrap();
        assert_eq!(m.body(), int(3));
        assert_eq!(m.to_string(), "3 + 2*e1^e2 - e1^e3^e4");
        assert!(parse_multivector("e5", ctx).is_err());
    }

    #[test]
    fn seeds_and_settings() {
        let text = "[superfields]\nX : even N=1 (x, xi)\n\n[equations]\ndt(X) = X^2\n\n[solve]\nh = 1/1000\nseed x = -1/t\nseed xi = 0\n";
        let f = parse_system(text).unwrap();
        let b = f.build().unwrap();
        let s = f.seed_solution(&b).unwrap();
        assert_eq!(s.component("x").unwrap().to_string(), "-t^-1");
        assert_eq!(f.setting("h").unwrap(), Some(0.001));
    }
}
