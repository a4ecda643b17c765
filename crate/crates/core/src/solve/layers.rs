use std::collections::BTreeMap;

use super::{Assignment, SolveError};
use crate::coeff::Rational;
use crate::grassmann::{AlgebraCtx, Multivector, Word};
use crate::scalar_poly::{CompiledPoly, ScalarPoly};
use crate::superspace::ComponentSystem;
use crate::symcore::{SymError, Symbol};

/// Real coefficient of `symbol` on the basis word `word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    pub symbol: Symbol,
    pub word: Word,
}

impl Unknown {
    pub fn level(&self) -> usize {
        self.word.len()
    }

    /// `x@e1e2`, `x@1` for the body.
    pub fn label(&self) -> String {
        format!("{}@{}", self.symbol, self.word.compact())
    }
}

/// Real first-order system obtained by expanding every component over the
/// basis of Λ_L. The right-hand side of an unknown of level `k` only involves
/// unknowns of level at most `k`.
#[derive(Debug, Clone)]
pub struct LayerSystem {
    pub ctx: AlgebraCtx,
    pub variables: Vec<Symbol>,
    pub unknowns: Vec<Unknown>,
    pub rhs: Vec<ScalarPoly>,
    compiled: Vec<CompiledPoly>,
}

impl LayerSystem {
    pub fn len(&self) -> usize {
        self.unknowns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknowns.is_empty()
    }

    pub fn index_of(&self, symbol: &Symbol, word: Word) -> Option<usize> {
        self.unknowns.iter().position(|u| &u.symbol == symbol && u.word == word)
    }

    pub fn labels(&self) -> Vec<String> {
        self.unknowns.iter().map(Unknown::label).collect()
    }

    pub fn max_level(&self) -> usize {
        self.unknowns.iter().map(Unknown::level).max().unwrap_or(0)
    }

    /// Restriction to the unknowns of level at most `level`; closed by
    /// triangularity.
    pub fn truncate(&self, level: usize) -> LayerSystem {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.unknowns[i].level() <= level).collect();
        let remap: BTreeMap<u32, u32> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old as u32, new as u32))
            .collect();
        let rhs: Vec<ScalarPoly> = keep.iter().map(|&i| renumber(&self.rhs[i], &remap)).collect();
        LayerSystem {
            ctx: self.ctx,
            variables: self.variables.clone(),
            unknowns: keep.iter().map(|&i| self.unknowns[i].clone()).collect(),
            compiled: rhs.iter().map(ScalarPoly::compile).collect(),
            rhs,
        }
    }

    pub fn eval_rhs(&self, state: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.compiled) {
            *o = p.eval(state);
        }
    }

    /// State vector from Grassmann values of the variables; missing words are 0.
    pub fn state_from(&self, values: &BTreeMap<Symbol, Multivector<f64>>) -> Result<Vec<f64>, SolveError> {
        for v in &self.variables {
            if !values.contains_key(v) {
                return Err(SolveError::MissingInitial(v.to_string()));
            }
        }
        Ok(self.unknowns.iter().map(|u| values[&u.symbol].coeff(u.word)).collect())
    }

    /// Grassmann value of every variable at a state.
    pub fn values_at(&self, state: &[f64]) -> BTreeMap<Symbol, Multivector<f64>> {
        let mut out: BTreeMap<Symbol, Vec<(Word, f64)>> =
            self.variables.iter().map(|v| (v.clone(), Vec::new())).collect();
        for (u, x) in self.unknowns.iter().zip(state) {
            out.get_mut(&u.symbol).expect("declared").push((u.word, *x));
        }
        out.into_iter()
            .map(|(s, t)| (s, Multivector::from_terms(self.ctx, t)))
            .collect()
    }

    /// For each unknown, the highest level among the unknowns its right-hand
    /// side reads.
    pub fn dependency_levels(&self) -> Vec<Option<usize>> {
        self.rhs
            .iter()
            .map(|p| p.unknowns().iter().map(|&j| self.unknowns[j as usize].level()).max())
            .collect()
    }
}

fn renumber(p: &ScalarPoly, remap: &BTreeMap<u32, u32>) -> ScalarPoly {
    let mut out = ScalarPoly::default();
    for (m, c) in p.terms() {
        let mut term = ScalarPoly::constant(c.clone());
        for &(i, e) in m {
            for _ in 0..e {
                term = term * ScalarPoly::var(remap[&i]);
            }
        }
        out = out + term;
    }
    out
}

/// Expand a component system over Λ_L. Higher-order systems are first
/// lowered with velocity components. Every constant must have a value.
pub fn expand_to_layers(sys: &ComponentSystem, assignment: &Assignment) -> Result<LayerSystem, SolveError> {
    let sys = sys.to_first_order();
    let ctx = assignment.ctx;
    for c in sys.constants() {
        if assignment.get(&c).is_none() {
            return Err(SolveError::Unassigned(c.to_string()));
        }
    }
    let variables = sys.variables();
    let mut unknowns = Vec::new();
    let mut values: BTreeMap<Symbol, Multivector<ScalarPoly>> = BTreeMap::new();
    for v in &variables {
        let mut terms = Vec::new();
        for w in ctx.words_of_parity(v.parity()) {
            terms.push((w, ScalarPoly::var(unknowns.len() as u32)));
            unknowns.push(Unknown {
                symbol: v.clone(),
                word: w,
            });
        }
        values.insert(v.clone(), Multivector::from_terms(ctx, terms));
    }
    let constant_value = |s: &Symbol| -> Option<Multivector<ScalarPoly>> {
        assignment
            .get(s)
            .map(|m| m.map_coeffs(|c: &Rational| ScalarPoly::constant(c.clone())))
    };
    let lookup = |s: &Symbol| values.get(s).cloned().or_else(|| constant_value(s));
    let mut rhs = vec![ScalarPoly::default(); unknowns.len()];
    for eq in &sys.equations {
        let value = eq.rhs.eval(ctx, &lookup).map_err(|e| match e {
            SymError::Unbound(n) => SolveError::Unassigned(n),
            other => other.into(),
        })?;
        for (w, c) in value.terms() {
            let idx = unknowns
                .iter()
                .position(|u| u.symbol == eq.symbol && u.word == *w)
                .ok_or_else(|| SolveError::ParityMismatch(eq.symbol.to_string()))?;
            rhs[idx] = c.clone();
        }
    }
    let layer = LayerSystem {
        ctx,
        variables,
        compiled: rhs.iter().map(ScalarPoly::compile).collect(),
        unknowns,
        rhs,
    };
    for (i, dep) in layer.dependency_levels().into_iter().enumerate() {
        if let Some(d) = dep {
            if d > layer.unknowns[i].level() {
                let culprit = layer.rhs[i]
                    .unknowns()
                    .into_iter()
                    .find(|&j| layer.unknowns[j as usize].level() == d)
                    .expect("level attained");
                return Err(SolveError::NotTriangular {
                    unknown: layer.unknowns[i].label(),
                    depends: layer.unknowns[culprit as usize].label(),
                });
            }
        }
    }
    Ok(layer)
}
