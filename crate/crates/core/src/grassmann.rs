//! Finite real Grassmann algebra Λ_L.
//!
//! Basis words are subsets of the generators `e1..eL`, stored as bitmasks
//! (bit `k-1` for `ek`) with the generators in ascending order. Elements are
//! sparse maps from words to coefficients with no stored zeros.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::coeff::{fmt_rational, is_negative, Coeff, Rational};
use crate::parity::Parity;

pub const MAX_GENERATORS: u8 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrassmannError {
    #[error("generator count {0} outside 1..={MAX_GENERATORS}")]
    BadGeneratorCount(u32),
    #[error("generator e{index} does not exist in an algebra with {generators} generators")]
    NoSuchGenerator { index: u32, generators: u8 },
    #[error("algebra context mismatch: L={left} vs L={right}")]
    ContextMismatch { left: u8, right: u8 },
    #[error("element with zero body is not invertible")]
    NotInvertible,
    #[error("exponential requires an even element")]
    NotEven,
}

/// The algebra Λ_L. Fixed after construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraCtx {
    generators: u8,
}

impl AlgebraCtx {
    pub fn new(generators: u32) -> Result<Self, GrassmannError> {
        if generators == 0 || generators > MAX_GENERATORS as u32 {
            return Err(GrassmannError::BadGeneratorCount(generators));
        }
        Ok(AlgebraCtx {
            generators: generators as u8,
        })
    }

    pub fn generators(&self) -> u8 {
        self.generators
    }

    /// All basis words, in graded-lex order.
    pub fn words(&self) -> Vec<Word> {
        let mut words: Vec<Word> = (0..1u32 << self.generators).map(Word).collect();
        words.sort();
        words
    }

    pub fn words_of_parity(&self, parity: Parity) -> Vec<Word> {
        self.words().into_iter().filter(|w| w.parity() == parity).collect()
    }
}

/// A basis word `e_{i1} e_{i2} ... e_{ik}` with `i1 < i2 < ... < ik`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word(pub u32);

impl Word {
    pub const EMPTY: Word = Word(0);

    pub fn generator(index: u32) -> Word {
        Word(1 << (index - 1))
    }

    pub fn from_generators(indices: &[u32]) -> Option<Word> {
        let mut mask = 0u32;
        for &i in indices {
            let bit = 1u32 << (i - 1);
            if mask & bit != 0 {
                return None;
            }
            mask |= bit;
        }
        Some(Word(mask))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn parity(self) -> Parity {
        Parity::from_count(self.len())
    }

    /// Generator indices (1-based), ascending.
    pub fn indices(self) -> Vec<u32> {
        (0..32).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    /// Product of two basis words: `None` if they share a generator,
    /// otherwise the merged word and whether the reordering sign is negative.
    pub fn merge(self, other: Word) -> Option<(Word, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count pairs (i in self, j in other) with i > j
        let mut swaps = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let j = rest.trailing_zeros();
            swaps += (self.0 >> (j + 1)).count_ones();
            rest &= rest - 1;
        }
        Some((Word(self.0 | other.0), swaps % 2 == 1))
    }

    /// Rendering used in CSV headers: `e1e2`, empty word as `1`.
    pub fn compact(self) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        self.indices().iter().map(|i| format!("e{i}")).collect()
    }

    /// Rendering used in algebra text: `e1^e2`.
    pub fn wedge(self) -> String {
        self.indices()
            .iter()
            .map(|i| format!("e{i}"))
            .collect::<Vec<_>>()
            .join("^")
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Element of Λ_L with coefficients in `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector<C: Coeff = Rational> {
    ctx: AlgebraCtx,
    terms: BTreeMap<Word, C>,
}

/// Parity classification of a multivector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradeParity {
    Even,
    Odd,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradeParts<C: Coeff> {
    pub body: C,
    pub soul: Multivector<C>,
    pub parity: GradeParity,
}

impl<C: Coeff> Multivector<C> {
    pub fn zero(ctx: AlgebraCtx) -> Self {
        Multivector {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(ctx: AlgebraCtx, value: C) -> Self {
        Self::from_terms(ctx, [(Word::EMPTY, value)])
    }

    pub fn one(ctx: AlgebraCtx) -> Self {
        Self::scalar(ctx, C::one())
    }

    pub fn generator(ctx: AlgebraCtx, index: u32) -> Result<Self, GrassmannError> {
        if index == 0 || index > ctx.generators as u32 {
            return Err(GrassmannError::NoSuchGenerator {
                index,
                generators: ctx.generators,
            });
        }
        Ok(Self::from_terms(ctx, [(Word::generator(index), C::one())]))
    }

    /// Build from (word, coefficient) pairs, summing duplicates and dropping zeros.
    /// Words must only use generators of `ctx`.
    pub fn from_terms(ctx: AlgebraCtx, terms: impl IntoIterator<Item = (Word, C)>) -> Self {
        let mut out = Multivector::zero(ctx);
        for (w, c) in terms {
            debug_assert!(w.0 >> ctx.generators == 0, "word outside algebra");
            out.add_term(w, c);
        }
        out
    }

    fn add_term(&mut self, word: Word, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn ctx(&self) -> AlgebraCtx {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: Word) -> C {
        self.terms.get(&word).cloned().unwrap_or_else(C::zero)
    }

    pub fn body(&self) -> C {
        self.coeff(Word::EMPTY)
    }

    pub fn soul(&self) -> Self {
        let mut s = self.clone();
        s.terms.remove(&Word::EMPTY);
        s
    }

    pub fn grade_parity(&self) -> GradeParity {
        let mut even = false;
        let mut odd = false;
        for w in self.terms.keys() {
            match w.parity() {
                Parity::Even => even = true,
                Parity::Odd => odd = true,
            }
        }
        match (even, odd) {
            (_, false) => GradeParity::Even,
            (false, true) => GradeParity::Odd,
            (true, true) => GradeParity::Mixed,
        }
    }

    /// Parity if homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        match self.grade_parity() {
            GradeParity::Even => Some(Parity::Even),
            GradeParity::Odd => Some(Parity::Odd),
            GradeParity::Mixed => None,
        }
    }

    pub fn grade_parts(&self) -> GradeParts<C> {
        GradeParts {
            body: self.body(),
            soul: self.soul(),
            parity: self.grade_parity(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.ctx, self.terms.iter().map(|(w, v)| (*w, v.clone() * c.clone())))
    }

    pub fn neg(&self) -> Self {
        Multivector {
            ctx: self.ctx,
            terms: self.terms.iter().map(|(w, v)| (*w, -v.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.add(&other.neg())
    }

    fn check_ctx(&self, other: &Self) -> Result<(), GrassmannError> {
        if self.ctx != other.ctx {
            return Err(GrassmannError::ContextMismatch {
                left: self.ctx.generators,
                right: other.ctx.generators,
            });
        }
        Ok(())
    }

    /// Exterior product.
    pub fn product(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.check_ctx(other)?;
        let mut out = Multivector::zero(self.ctx);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                if let Some((w, negative)) = wa.merge(*wb) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(w, if negative { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Multivector::one(self.ctx);
        for _ in 0..n {
            acc = acc.product(self).expect("same context");
        }
        acc
    }

    /// `(1/body) Σ_k (-soul/body)^k`, finite by nilpotency of the soul.
    pub fn inverse(&self) -> Result<Self, GrassmannError> {
        let inv_body = self.body().try_inv().ok_or(GrassmannError::NotInvertible)?;
        let step = self.soul().scale(&-inv_body.clone());
        let mut term = Multivector::one(self.ctx);
        let mut sum = term.clone();
        for _ in 0..self.ctx.generators {
            term = term.product(&step)?;
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        Ok(sum.scale(&inv_body))
    }

    /// `exp(body) Σ_k soul^k / k!`; `exp_body` maps the body to its exponential
    /// in the coefficient ring.
    pub fn exponential_with(&self, exp_body: impl FnOnce(&C) -> C) -> Result<Self, GrassmannError> {
        if self.grade_parity() != GradeParity::Even {
            return Err(GrassmannError::NotEven);
        }
        let soul = self.soul();
        let mut term = Multivector::one(self.ctx);
        let mut sum = term.clone();
        for k in 1..=self.ctx.generators as i64 {
            term = term
                .product(&soul)?
                .scale(&C::from_rational(&Rational::new(1.into(), k.into())));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        Ok(sum.scale(&exp_body(&self.body())))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Multivector<D> {
        Multivector::from_terms(self.ctx, self.terms.iter().map(|(w, c)| (*w, f(c))))
    }

    /// Same element viewed in a larger algebra.
    pub fn embed(&self, ctx: AlgebraCtx) -> Result<Self, GrassmannError> {
        if let Some(w) = self.terms.keys().find(|w| w.0 >> ctx.generators != 0) {
            return Err(GrassmannError::NoSuchGenerator {
                index: 32 - w.0.leading_zeros(),
                generators: ctx.generators,
            });
        }
        Ok(Multivector {
            ctx,
            terms: self.terms.clone(),
        })
    }
}

impl Multivector<f64> {
    pub fn exponential(&self) -> Result<Self, GrassmannError> {
        self.exponential_with(|b| b.exp())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut words: Vec<Word> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        words.sort();
        words.dedup();
        words
            .into_iter()
            .map(|w| (self.coeff(w) - other.coeff(w)).abs())
            .fold(0.0, f64::max)
    }
}

impl Multivector<Rational> {
    /// Exponential of an element with zero body (the exact case).
    pub fn exponential_nilpotent(&self) -> Result<Self, GrassmannError> {
        if !self.body().is_zero() {
            return Err(GrassmannError::NotInvertible);
        }
        self.exponential_with(|_| Rational::one())
    }

    pub fn to_f64(&self) -> Multivector<f64> {
        self.map_coeffs(<f64 as Coeff>::from_rational)
    }
}

/// Text form `3 + 2*e1^e2 - e1^e3^e4`, words in graded-lex order.
impl fmt::Display for Multivector<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let negative = is_negative(c);
            let mag = if negative { -c.clone() } else { c.clone() };
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            if w.is_empty() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(&w.wedge())?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), w.wedge())?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Multivector<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                if w.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", w.wedge())
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{int, rat};

    fn ctx(l: u32) -> AlgebraCtx {
        AlgebraCtx::new(l).unwrap()
    }

    fn e(ctx: AlgebraCtx, gens: &[u32]) -> Multivector {
        Multivector::from_terms(
            ctx,
            [(
                Word::from_generators(&{
                    let mut g = gens.to_vec();
                    g.sort();
                    g
                })
                .unwrap(),
                int(1),
            )],
        )
        .scale(&int(if brute_sign(gens) { -1 } else { 1 }))
    }

    /// Sign of the permutation sorting `gens`, by explicit bubble sort.
    fn brute_sign(gens: &[u32]) -> bool {
        let mut v = gens.to_vec();
        let mut negative = false;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    negative = !negative;
                }
            }
        }
        negative
    }

    #[test]
    fn basis_products() {
        let c = ctx(4);
        let e1 = Multivector::<Rational>::generator(c, 1).unwrap();
        let e2 = Multivector::<Rational>::generator(c, 2).unwrap();
        let e3 = Multivector::<Rational>::generator(c, 3).unwrap();
        assert_eq!(e1.product(&e2).unwrap(), e(c, &[1, 2]));
        assert_eq!(e2.product(&e1).unwrap(), e(c, &[1, 2]).neg());
        // (e1e3)e2: brute-force sign of [1,3,2] is one transposition
        assert!(brute_sign(&[1, 3, 2]));
        let lhs = e1.product(&e3).unwrap().product(&e2).unwrap();
        assert_eq!(lhs, e(c, &[1, 2, 3]).neg());
        assert!(e1.product(&e1).unwrap().is_zero());
    }

    #[test]
    fn context_mismatch_rejected() {
        let a = Multivector::<Rational>::one(ctx(2));
        let b = Multivector::<Rational>::one(ctx(3));
        assert!(matches!(a.product(&b), Err(GrassmannError::ContextMismatch { .. })));
    }

    #[test]
    fn inverse_examples() {
        let c = ctx(4);
        let one = Multivector::<Rational>::one(c);
        assert_eq!(one.inverse().unwrap(), one);

        let e12 = e(c, &[1, 2]);
        let e34 = e(c, &[3, 4]);
        let a = one.add(&e12).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(inv, one.sub(&e12).unwrap());
        assert_eq!(a.product(&inv).unwrap(), one);

        let b = Multivector::scalar(c, int(2)).add(&e12).unwrap().add(&e34).unwrap();
        let expected = Multivector::from_terms(
            c,
            [
                (Word::EMPTY, rat(1, 2)),
                (Word::from_generators(&[1, 2]).unwrap(), rat(-1, 4)),
                (Word::from_generators(&[3, 4]).unwrap(), rat(-1, 4)),
                (Word::from_generators(&[1, 2, 3, 4]).unwrap(), rat(1, 4)),
            ],
        );
        let inv = b.inverse().unwrap();
        assert_eq!(inv, expected);
        assert_eq!(b.product(&inv).unwrap(), one);

        assert_eq!(e12.inverse(), Err(GrassmannError::NotInvertible));
    }

    #[test]
    fn exponential_examples() {
        let c = ctx(4);
        let zero = Multivector::<f64>::zero(c);
        assert_eq!(zero.exponential().unwrap(), Multivector::one(c));
        let e12 = e(c, &[1, 2]).to_f64();
        let one = Multivector::<f64>::one(c);
        assert_eq!(e12.exponential().unwrap(), one.add(&e12).unwrap());
        let a = one.add(&e12).unwrap();
        let got = a.exponential().unwrap();
        let expected = one.add(&e12).unwrap().scale(&std::f64::consts::E);
        assert!(got.max_abs_diff(&expected) < 1e-15);
        let odd = Multivector::<f64>::generator(c, 1).unwrap();
        assert_eq!(odd.exponential(), Err(GrassmannError::NotEven));
    }

    #[test]
    fn grade_parts_examples() {
        let c = ctx(4);
        let e1 = Multivector::<Rational>::generator(c, 1).unwrap();
        let e2 = Multivector::<Rational>::generator(c, 2).unwrap();
        let three = Multivector::scalar(c, int(3));
        let p = three.add(&e(c, &[1, 2])).unwrap().grade_parts();
        assert_eq!((p.body, p.parity), (int(3), GradeParity::Even));
        assert_eq!(p.soul, e(c, &[1, 2]));
        let p = e1.add(&e2).unwrap().grade_parts();
        assert_eq!((p.body, p.parity), (int(0), GradeParity::Odd));
        let p = Multivector::one(c).add(&e1).unwrap().grade_parts();
        assert_eq!((p.body, p.parity), (int(1), GradeParity::Mixed));
    }

    #[test]
    fn renders_text_form() {
        let c = ctx(4);
        let m = Multivector::scalar(c, int(3))
            .add(&e(c, &[1, 2]).scale(&int(2)))
            .unwrap()
            .sub(&e(c, &[1, 3, 4]))
            .unwrap();
        assert_eq!(m.to_string(), "3 + 2*e1^e2 - e1^e3^e4");
        assert_eq!(Word::from_generators(&[1, 2]).unwrap().compact(), "e1e2");
        assert_eq!(Word::EMPTY.compact(), "1");
    }

    #[test]
    fn merge_matches_brute_force() {
        for a in 0u32..64 {
            for b in 0u32..64 {
                let (wa, wb) = (Word(a), Word(b));
                let mut gens = wa.indices();
                gens.extend(wb.indices());
                let got = wa.merge(wb);
                if a & b != 0 {
                    assert!(got.is_none());
                } else {
                    assert_eq!(got, Some((Word(a | b), brute_sign(&gens))));
                }
            }
        }
    }
}
