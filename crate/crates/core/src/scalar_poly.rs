//! Commutative polynomials over the rationals in indexed real unknowns.
//!
//! Used as the coefficient ring of a [`Multivector`](crate::grassmann::Multivector)
//! when expanding Grassmann-valued systems over a basis (each basis coefficient
//! becomes a real unknown) and for polynomials in `t` during Picard iteration.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::coeff::{rational_to_f64, Coeff, Rational};

/// Sorted `(unknown, exponent)` pairs with positive exponents.
pub type ScalarMonomial = Vec<(u32, u32)>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarPoly {
    terms: BTreeMap<ScalarMonomial, Rational>,
}

impl ScalarPoly {
    pub fn constant(c: Rational) -> Self {
        let mut p = ScalarPoly::default();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(index: u32) -> Self {
        let mut p = ScalarPoly::default();
        p.add_term(vec![(index, 1)], Rational::one());
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ScalarMonomial, &Rational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: ScalarMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Unknown indices that occur.
    pub fn unknowns(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().flat_map(|m| m.iter().map(|(i, _)| *i)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Degree in one unknown.
    pub fn degree_in(&self, index: u32) -> u32 {
        self.terms
            .keys()
            .filter_map(|m| m.iter().find(|(i, _)| *i == index).map(|(_, e)| *e))
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of `var^k` (as a polynomial in the remaining unknowns).
    pub fn coeff_of_power(&self, index: u32, k: u32) -> ScalarPoly {
        let mut out = ScalarPoly::default();
        for (m, c) in &self.terms {
            let e = m.iter().find(|(i, _)| *i == index).map(|(_, e)| *e).unwrap_or(0);
            if e == k {
                out.add_term(m.iter().filter(|(i, _)| *i != index).copied().collect(), c.clone());
            }
        }
        out
    }

    /// Antiderivative in one unknown, with zero constant of integration.
    pub fn integrate(&self, index: u32) -> ScalarPoly {
        let mut out = ScalarPoly::default();
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = match m2.iter_mut().find(|(i, _)| *i == index) {
                Some(slot) => {
                    slot.1 += 1;
                    slot.1
                }
                None => {
                    m2.push((index, 1));
                    m2.sort_unstable();
                    1
                }
            };
            out.add_term(m2, c.clone() / Rational::from_integer(e.into()));
        }
        out
    }

    /// Substitute a rational value for one unknown.
    pub fn eval_at(&self, index: u32, value: &Rational) -> ScalarPoly {
        let mut out = ScalarPoly::default();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::with_capacity(m.len());
            for &(i, e) in m {
                if i == index {
                    coef *= num_traits::pow(value.clone(), e as usize);
                } else {
                    rest.push((i, e));
                }
            }
            out.add_term(rest, coef);
        }
        out
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter().fold(rational_to_f64(c), |acc, &(i, e)| {
                    acc * values[i as usize].powi(e as i32)
                })
            })
            .sum()
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (rational_to_f64(c), m.clone()))
                .collect(),
        }
    }
}

/// Float evaluation form of a [`ScalarPoly`].
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<(f64, ScalarMonomial)>,
}

impl CompiledPoly {
    pub fn eval(&self, values: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, m) in &self.terms {
            let mut v = *c;
            for &(i, e) in m {
                let x = values[i as usize];
                v *= if e == 1 { x } else { x.powi(e as i32) };
            }
            total += v;
        }
        total
    }
}

impl Zero for ScalarPoly {
    fn zero() -> Self {
        ScalarPoly::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ScalarPoly {
    fn one() -> Self {
        ScalarPoly::constant(Rational::one())
    }
}

impl Add for ScalarPoly {
    type Output = ScalarPoly;

    fn add(mut self, rhs: ScalarPoly) -> ScalarPoly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Neg for ScalarPoly {
    type Output = ScalarPoly;

    fn neg(self) -> ScalarPoly {
        ScalarPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Sub for ScalarPoly {
    type Output = ScalarPoly;

    fn sub(self, rhs: ScalarPoly) -> ScalarPoly {
        self + (-rhs)
    }
}

impl Mul for ScalarPoly {
    type Output = ScalarPoly;

    fn mul(self, rhs: ScalarPoly) -> ScalarPoly {
        let mut out = ScalarPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(merge_monomials(ma, mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

fn merge_monomials(a: &ScalarMonomial, b: &ScalarMonomial) -> ScalarMonomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Coeff for ScalarPoly {
    fn from_rational(r: &Rational) -> Self {
        ScalarPoly::constant(r.clone())
    }

    fn try_inv(&self) -> Option<Self> {
        let c = self.as_constant()?;
        c.try_inv().map(ScalarPoly::constant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{int, rat};

    #[test]
    fn arithmetic_and_integration() {
        let t = ScalarPoly::var(0);
        let one = ScalarPoly::one();
        let p = (one.clone() + t.clone()) * (one.clone() + t.clone());
        assert_eq!(p.coeff_of_power(0, 1).as_constant(), Some(int(2)));
        let q = p.integrate(0);
        assert_eq!(q.coeff_of_power(0, 3).as_constant(), Some(rat(1, 3)));
        assert_eq!(q.eval_at(0, &int(1)).as_constant(), Some(rat(7, 3)));
        assert!((p.compile().eval(&[0.5]) - 2.25).abs() < 1e-15);
    }

    #[test]
    fn cancellation_leaves_no_terms() {
        let x = ScalarPoly::var(3);
        assert!((x.clone() - x).is_zero());
    }
}
