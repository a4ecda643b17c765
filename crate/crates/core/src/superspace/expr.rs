use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::Serialize;

use super::{SuperspaceError, ThetaPoly};
use crate::coeff::{fmt_rational, Rational};
use crate::grassmann::Word;
use crate::parity::Parity;
use crate::symcore::{GradedPoly, Symbol};

/// θ-subset `S ⊆ {1..N}`, ordered graded-lexicographically.
pub type ThetaSet = Word;

/// Declaration of an N-extended superfield `X = Σ_S θ^S c_S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperfieldDecl {
    pub name: String,
    pub parity: Parity,
    pub n: u8,
    /// One component per θ-subset, in graded-lex order of the subsets.
    #[serde(skip)]
    components: Vec<(ThetaSet, Symbol)>,
}

impl SuperfieldDecl {
    /// Declare a superfield; `names` lists component names in graded-lex order
    /// of θ-subsets (`∅, {1}, {2}, .., {1,2}, ..`). Without names, components
    /// are called `<lowercase name>` and `<lowercase name>_<subset digits>`.
    pub fn new(name: &str, parity: Parity, n: u8, names: Option<Vec<String>>) -> Result<Self, SuperspaceError> {
        if n == 0 || n > 8 {
            return Err(SuperspaceError::BadN(n));
        }
        let subsets = theta_subsets(n);
        let names = match names {
            Some(v) => {
                if v.len() != subsets.len() {
                    return Err(SuperspaceError::ComponentCount {
                        field: name.to_string(),
                        expected: subsets.len(),
                        found: v.len(),
                    });
                }
                v
            }
            None => {
                let base = name.to_lowercase();
                subsets
                    .iter()
                    .map(|s| {
                        if s.is_empty() {
                            base.clone()
                        } else {
                            let digits: String = s.indices().iter().map(|i| i.to_string()).collect();
                            format!("{base}_{digits}")
                        }
                    })
                    .collect()
            }
        };
        let components = subsets
            .into_iter()
            .zip(names)
            .map(|(s, nm)| {
                let p = parity + s.parity();
                (s, Symbol::dynamic(&nm, p))
            })
            .collect();
        Ok(SuperfieldDecl {
            name: name.to_string(),
            parity,
            n,
            components,
        })
    }

    pub fn components(&self) -> &[(ThetaSet, Symbol)] {
        &self.components
    }

    pub fn component(&self, s: ThetaSet) -> &Symbol {
        &self
            .components
            .iter()
            .find(|(t, _)| *t == s)
            .expect("subset within N")
            .1
    }

    /// `Σ_S θ^S c_S` as a graded polynomial.
    pub fn as_poly(&self) -> GradedPoly {
        self.components
            .iter()
            .map(|(s, c)| theta_monomial(*s).mul(&GradedPoly::symbol(c)))
            .fold(GradedPoly::zero(), |a, b| a.add(&b))
    }
}

/// All θ-subsets of `{1..n}` in graded-lex order.
pub fn theta_subsets(n: u8) -> Vec<ThetaSet> {
    let mut v: Vec<ThetaSet> = (0..1u32 << n).map(Word).collect();
    v.sort();
    v
}

/// `θ^{i1} θ^{i2} ..` for an ascending subset.
pub fn theta_monomial(s: ThetaSet) -> GradedPoly {
    s.indices().iter().fold(GradedPoly::one(), |acc, &i| {
        acc.mul(&GradedPoly::symbol(&Symbol::theta(i as u8)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Operator {
    /// `D_i` or, with `None`, `D = Σ D_i`.
    D(Option<u8>),
    /// `Q_i` or, with `None`, `Q = Σ Q_i`.
    Q(Option<u8>),
    /// `d/dt`.
    Dt,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::D(None) => f.write_str("D"),
            Operator::D(Some(i)) => write!(f, "D{i}"),
            Operator::Q(None) => f.write_str("Q"),
            Operator::Q(Some(i)) => write!(f, "Q{i}"),
            Operator::Dt => f.write_str("dt"),
        }
    }
}

/// Expression over superfields, component symbols and constants.
#[derive(Debug, Clone, PartialEq)]
pub enum SuperExpr {
    Num(Rational),
    Const(String),
    Field(String),
    Component(String),
    Theta(u8),
    Add(Vec<SuperExpr>),
    Mul(Vec<SuperExpr>),
    Neg(Box<SuperExpr>),
    Pow(Box<SuperExpr>, u32),
    Apply(Operator, Box<SuperExpr>),
}

impl SuperExpr {
    pub fn field(name: &str) -> Self {
        SuperExpr::Field(name.to_string())
    }

    pub fn constant(name: &str) -> Self {
        SuperExpr::Const(name.to_string())
    }

    pub fn num(r: Rational) -> Self {
        SuperExpr::Num(r)
    }

    pub fn int(n: i64) -> Self {
        SuperExpr::Num(crate::coeff::int(n))
    }

    pub fn apply(op: Operator, e: SuperExpr) -> Self {
        SuperExpr::Apply(op, Box::new(e))
    }

    pub fn d(i: Option<u8>, e: SuperExpr) -> Self {
        Self::apply(Operator::D(i), e)
    }

    pub fn q(i: Option<u8>, e: SuperExpr) -> Self {
        Self::apply(Operator::Q(i), e)
    }

    pub fn dt(k: u32, e: SuperExpr) -> Self {
        (0..k).fold(e, |acc, _| Self::apply(Operator::Dt, acc))
    }

    pub fn pow(self, n: u32) -> Self {
        SuperExpr::Pow(Box::new(self), n)
    }

    pub fn sum(items: Vec<SuperExpr>) -> Self {
        SuperExpr::Add(items)
    }

    pub fn product(items: Vec<SuperExpr>) -> Self {
        SuperExpr::Mul(items)
    }

    /// Strip leading `dt` applications: `(k, inner)`.
    pub fn peel_dt(&self) -> (u32, &SuperExpr) {
        let mut k = 0;
        let mut e = self;
        while let SuperExpr::Apply(Operator::Dt, inner) = e {
            k += 1;
            e = inner;
        }
        (k, e)
    }
}

impl std::ops::Add for SuperExpr {
    type Output = SuperExpr;
    fn add(self, rhs: SuperExpr) -> SuperExpr {
        SuperExpr::Add(vec![self, rhs])
    }
}

impl std::ops::Sub for SuperExpr {
    type Output = SuperExpr;
    fn sub(self, rhs: SuperExpr) -> SuperExpr {
        SuperExpr::Add(vec![self, -rhs])
    }
}

impl std::ops::Mul for SuperExpr {
    type Output = SuperExpr;
    fn mul(self, rhs: SuperExpr) -> SuperExpr {
        SuperExpr::Mul(vec![self, rhs])
    }
}

impl fmt::Display for SuperExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuperExpr::Num(r) => f.write_str(&fmt_rational(r)),
            SuperExpr::Const(n) | SuperExpr::Field(n) | SuperExpr::Component(n) => f.write_str(n),
            SuperExpr::Theta(i) => write!(f, "theta{i}"),
            SuperExpr::Add(v) => {
                let parts: Vec<String> = v.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", parts.join(" + "))
            }
            SuperExpr::Mul(v) => {
                let parts: Vec<String> = v.iter().map(|e| e.to_string()).collect();
                f.write_str(&parts.join("*"))
            }
            SuperExpr::Neg(e) => write!(f, "-({e})"),
            SuperExpr::Pow(e, n) => write!(f, "({e})^{n}"),
            SuperExpr::Apply(op, e) => write!(f, "{op}({e})"),
        }
    }
}

/// Apply an operator to a θ-dependent polynomial, using `time_derivative` for
/// `∂_t` (the formal derivative for component symbols, or `∂/∂t` for explicit
/// solutions in `t`).
pub fn apply_operator(
    op: Operator,
    p: &GradedPoly,
    n: u8,
    time_derivative: &dyn Fn(&GradedPoly) -> GradedPoly,
) -> Result<GradedPoly, SuperspaceError> {
    let check = |i: u8| {
        if i == 0 || i > n {
            Err(SuperspaceError::IndexOutOfRange { op: op.to_string(), n })
        } else {
            Ok(i)
        }
    };
    let indexed = |i: u8, sign: i64| -> GradedPoly {
        let th = Symbol::theta(i);
        let d_theta = p.odd_partial(&th).expect("theta is odd");
        let shift = GradedPoly::symbol(&th).mul(&time_derivative(p));
        d_theta.add(&shift.scale(&crate::coeff::int(sign)))
    };
    Ok(match op {
        Operator::Dt => time_derivative(p),
        Operator::Q(Some(i)) => indexed(check(i)?, 1),
        Operator::D(Some(i)) => indexed(check(i)?, -1),
        Operator::Q(None) => {
            let parts: Vec<GradedPoly> = (1..=n).map(|i| indexed(i, 1)).collect();
            GradedPoly::sum(&parts)
        }
        Operator::D(None) => {
            let parts: Vec<GradedPoly> = (1..=n).map(|i| indexed(i, -1)).collect();
            GradedPoly::sum(&parts)
        }
    })
}

/// Declarations against which superfield expressions are expanded.
#[derive(Debug, Clone, Default)]
pub struct Superspace {
    pub n: u8,
    pub fields: Vec<SuperfieldDecl>,
    /// Dynamic variables that are not components of any superfield.
    pub variables: Vec<Symbol>,
    pub constants: BTreeMap<String, Symbol>,
}

impl Superspace {
    pub fn new(n: u8) -> Self {
        Superspace {
            n,
            ..Default::default()
        }
    }

    pub fn with_field(mut self, decl: SuperfieldDecl) -> Self {
        self.add_field(decl).expect("consistent N");
        self
    }

    pub fn with_constant(mut self, name: &str, parity: Parity) -> Self {
        self.constants.insert(name.to_string(), Symbol::constant(name, parity));
        self
    }

    pub fn with_variable(mut self, name: &str, parity: Parity) -> Self {
        self.variables.push(Symbol::dynamic(name, parity));
        self
    }

    pub fn add_field(&mut self, decl: SuperfieldDecl) -> Result<(), SuperspaceError> {
        if decl.n != self.n {
            return Err(SuperspaceError::MixedN {
                field: decl.name.clone(),
                n: decl.n,
                expected: self.n,
            });
        }
        self.fields.push(decl);
        Ok(())
    }

    pub fn field(&self, name: &str) -> Option<&SuperfieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// Resolve a component or free variable by name.
    pub fn component(&self, name: &str) -> Option<&Symbol> {
        self.fields
            .iter()
            .flat_map(|f| f.components.iter().map(|(_, s)| s))
            .chain(self.variables.iter())
            .find(|s| s.name() == name)
    }

    /// All dynamic symbols, superfield components first in declaration order.
    pub fn dynamic_symbols(&self) -> Vec<Symbol> {
        self.fields
            .iter()
            .flat_map(|f| f.components.iter().map(|(_, s)| s.clone()))
            .chain(self.variables.iter().cloned())
            .collect()
    }

    /// Parity of an expression, `None` if it mixes parities.
    pub fn parity_of(&self, e: &SuperExpr) -> Result<Option<Parity>, SuperspaceError> {
        Ok(match e {
            SuperExpr::Num(_) => Some(Parity::Even),
            SuperExpr::Const(n) => Some(
                self.constants
                    .get(n)
                    .ok_or_else(|| SuperspaceError::Unknown(n.clone()))?
                    .parity(),
            ),
            SuperExpr::Field(n) => Some(self.field(n).ok_or_else(|| SuperspaceError::Unknown(n.clone()))?.parity),
            SuperExpr::Component(n) => Some(
                self.component(n)
                    .ok_or_else(|| SuperspaceError::Unknown(n.clone()))?
                    .parity(),
            ),
            SuperExpr::Theta(_) => Some(Parity::Odd),
            SuperExpr::Add(v) => {
                let mut out: Option<Option<Parity>> = None;
                for item in v {
                    let p = self.parity_of(item)?;
                    out = match out {
                        None => Some(p),
                        Some(q) if q == p => Some(q),
                        Some(_) => Some(None),
                    };
                }
                out.unwrap_or(Some(Parity::Even))
            }
            SuperExpr::Mul(v) => {
                let mut acc = Some(Parity::Even);
                for item in v {
                    acc = match (acc, self.parity_of(item)?) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    };
                }
                acc
            }
            SuperExpr::Neg(e) => self.parity_of(e)?,
            SuperExpr::Pow(e, k) => self.parity_of(e)?.map(|p| if k % 2 == 0 { Parity::Even } else { p }),
            SuperExpr::Apply(Operator::Dt, e) => self.parity_of(e)?,
            SuperExpr::Apply(_, e) => self.parity_of(e)?.map(Parity::flip),
        })
    }

    /// θ-expansion as a single polynomial in θ and component symbols.
    pub fn expand(&self, e: &SuperExpr) -> Result<GradedPoly, SuperspaceError> {
        Ok(match e {
            SuperExpr::Num(r) => GradedPoly::constant(r.clone()),
            SuperExpr::Const(n) => GradedPoly::symbol(
                self.constants
                    .get(n)
                    .ok_or_else(|| SuperspaceError::Unknown(n.clone()))?,
            ),
            SuperExpr::Field(n) => self
                .field(n)
                .ok_or_else(|| SuperspaceError::Unknown(n.clone()))?
                .as_poly(),
            SuperExpr::Component(n) => {
                GradedPoly::symbol(self.component(n).ok_or_else(|| SuperspaceError::Unknown(n.clone()))?)
            }
            SuperExpr::Theta(i) => {
                if *i == 0 || *i > self.n {
                    return Err(SuperspaceError::IndexOutOfRange {
                        op: format!("theta{i}"),
                        n: self.n,
                    });
                }
                GradedPoly::symbol(&Symbol::theta(*i))
            }
            SuperExpr::Add(v) => {
                let parts = v.iter().map(|x| self.expand(x)).collect::<Result<Vec<_>, _>>()?;
                GradedPoly::sum(&parts)
            }
            SuperExpr::Mul(v) => {
                let mut acc = GradedPoly::constant(Rational::one());
                for x in v {
                    acc = acc.mul(&self.expand(x)?);
                }
                acc
            }
            SuperExpr::Neg(x) => self.expand(x)?.neg(),
            SuperExpr::Pow(x, k) => self.expand(x)?.pow(*k),
            SuperExpr::Apply(op, x) => {
                let inner = self.expand(x)?;
                apply_operator(*op, &inner, self.n, &GradedPoly::time_derivative)?
            }
        })
    }

    /// θ-expansion split per θ-subset.
    pub fn theta_expand(&self, e: &SuperExpr) -> Result<ThetaPoly, SuperspaceError> {
        Ok(ThetaPoly::split(&self.expand(e)?))
    }
}

impl std::ops::Neg for SuperExpr {
    type Output = SuperExpr;

    fn neg(self) -> SuperExpr {
        SuperExpr::Neg(Box::new(self))
    }
}
