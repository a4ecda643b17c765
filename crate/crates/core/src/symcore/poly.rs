use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{SymError, Symbol};
use crate::coeff::{fmt_rational, int, Coeff, Rational};
use crate::grassmann::{AlgebraCtx, Multivector};
use crate::parity::{sort_with_sign, Parity};

/// Even factors with nonzero (possibly negative) exponents, sorted by symbol;
/// odd factors strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    even: Vec<(Symbol, i32)>,
    odd: Vec<Symbol>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    /// Canonicalize an arbitrary factor list. Returns `None` if an odd factor
    /// repeats, otherwise the monomial and whether reordering flipped the sign.
    pub fn canonical(even: impl IntoIterator<Item = (Symbol, i32)>, mut odd: Vec<Symbol>) -> Option<(Monomial, bool)> {
        let negative = sort_with_sign(&mut odd)?;
        let mut acc: BTreeMap<Symbol, i32> = BTreeMap::new();
        for (s, e) in even {
            *acc.entry(s).or_insert(0) += e;
        }
        let even = acc.into_iter().filter(|(_, e)| *e != 0).collect();
        Some((Monomial { even, odd }, negative))
    }

    pub fn even(&self) -> &[(Symbol, i32)] {
        &self.even
    }

    pub fn odd(&self) -> &[Symbol] {
        &self.odd
    }

    pub fn parity(&self) -> Parity {
        Parity::from_count(self.odd.len())
    }

    /// Total degree counting every factor (constants included).
    pub fn degree(&self) -> i32 {
        self.even.iter().map(|(_, e)| *e).sum::<i32>() + self.odd.len() as i32
    }

    /// Degree counting only factors accepted by `pred`.
    pub fn degree_in(&self, pred: impl Fn(&Symbol) -> bool) -> i32 {
        self.even.iter().filter(|(s, _)| pred(s)).map(|(_, e)| *e).sum::<i32>()
            + self.odd.iter().filter(|s| pred(s)).count() as i32
    }

    pub fn exponent(&self, s: &Symbol) -> i32 {
        if s.is_odd() {
            self.odd.contains(s) as i32
        } else {
            self.even.iter().find(|(t, _)| t == s).map(|(_, e)| *e).unwrap_or(0)
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.even.iter().map(|(s, _)| s).chain(self.odd.iter())
    }

    /// Product with sign; `None` if the product vanishes.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let mut odd = self.odd.clone();
        odd.extend(other.odd.iter().cloned());
        Monomial::canonical(self.even.iter().chain(other.even.iter()).cloned(), odd)
    }

    /// Ordering key: total degree, then factors.
    fn key(&self) -> (i32, &[(Symbol, i32)], &[Symbol]) {
        (self.degree(), &self.even, &self.odd)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let even: Vec<String> = self
            .even
            .iter()
            .map(|(s, e)| if *e == 1 { s.to_string() } else { format!("{s}^{e}") })
            .collect();
        let odd: Vec<String> = self.odd.iter().map(|s| s.to_string()).collect();
        match (even.is_empty(), odd.is_empty()) {
            (true, true) => f.write_str("1"),
            (false, true) => f.write_str(&even.join("*")),
            (true, false) => f.write_str(&odd.join(".")),
            (false, false) => write!(f, "{}*{}", even.join("*"), odd.join(".")),
        }
    }
}

/// Polynomial over graded symbols with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl GradedPoly {
    pub fn zero() -> Self {
        GradedPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_monomial(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn symbol(s: &Symbol) -> Self {
        let m = if s.is_odd() {
            Monomial {
                even: vec![],
                odd: vec![s.clone()],
            }
        } else {
            Monomial {
                even: vec![(s.clone(), 1)],
                odd: vec![],
            }
        };
        Self::from_monomial(m, Rational::one())
    }

    pub fn from_monomial(m: Monomial, c: Rational) -> Self {
        let mut p = GradedPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant value if the polynomial has no symbols.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Parity if homogeneous (zero reports even), `None` if mixed.
    pub fn parity(&self) -> Option<Parity> {
        let mut parities = self.terms.keys().map(Monomial::parity);
        let first = parities.next().unwrap_or(Parity::Even);
        parities.all(|p| p == first).then_some(first)
    }

    /// True when zero or homogeneous of the given parity.
    pub fn has_parity(&self, p: Parity) -> bool {
        self.terms.keys().all(|m| m.parity() == p)
    }

    pub fn max_degree(&self) -> i32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.symbols().cloned()).collect()
    }

    pub fn neg(&self) -> Self {
        GradedPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = GradedPoly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Graded product with canonical reordering of odd factors.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = GradedPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, negative)) = ma.mul(mb) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = GradedPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a GradedPoly>) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for p in items {
            for (m, c) in &p.terms {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Keep only the terms accepted by `pred`.
    pub fn filter(&self, pred: impl Fn(&Monomial) -> bool) -> Self {
        GradedPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Simultaneous substitution. Unbound symbols stay as they are.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, GradedPoly>) -> Result<Self, SymError> {
        for (s, p) in bindings {
            if !p.has_parity(s.parity()) {
                return Err(SymError::ParityMismatch {
                    symbol: s.to_string(),
                    expected: s.parity(),
                });
            }
        }
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = GradedPoly::constant(c.clone());
            for (s, e) in &m.even {
                let image = match bindings.get(s) {
                    Some(p) => p,
                    None => {
                        acc = acc.mul(&GradedPoly::from_monomial(
                            Monomial {
                                even: vec![(s.clone(), *e)],
                                odd: vec![],
                            },
                            Rational::one(),
                        ));
                        continue;
                    }
                };
                let factor = if *e >= 0 {
                    image.pow(*e as u32)
                } else {
                    image
                        .laurent_inverse()
                        .ok_or_else(|| SymError::NotInvertible(s.to_string()))?
                        .pow((-e) as u32)
                };
                acc = acc.mul(&factor);
                if acc.is_zero() {
                    break;
                }
            }
            for s in &m.odd {
                let factor = bindings.get(s).cloned().unwrap_or_else(|| GradedPoly::symbol(s));
                acc = acc.mul(&factor);
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Inverse of a single even monomial or nonzero constant.
    pub fn laurent_inverse(&self) -> Option<GradedPoly> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if !m.odd.is_empty() || c.is_zero() {
            return None;
        }
        let inv = Monomial {
            even: m.even.iter().map(|(s, e)| (s.clone(), -e)).collect(),
            odd: vec![],
        };
        Some(GradedPoly::from_monomial(inv, c.recip()))
    }

    /// Left derivative with respect to an odd symbol: move the symbol to the
    /// front of each monomial (collecting the sign) and delete it.
    pub fn odd_partial(&self, s: &Symbol) -> Result<Self, SymError> {
        if !s.is_odd() {
            return Err(SymError::NotOdd(s.to_string()));
        }
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            if let Some(pos) = m.odd.iter().position(|t| t == s) {
                let mut odd = m.odd.clone();
                odd.remove(pos);
                let mono = Monomial {
                    even: m.even.clone(),
                    odd,
                };
                out.add_term(mono, if pos % 2 == 1 { -c.clone() } else { c.clone() });
            }
        }
        Ok(out)
    }

    /// Ordinary derivative with respect to an even symbol.
    pub fn even_partial(&self, s: &Symbol) -> Result<Self, SymError> {
        if s.is_odd() {
            return Err(SymError::NotEven(s.to_string()));
        }
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            if let Some(idx) = m.even.iter().position(|(t, _)| t == s) {
                let e = m.even[idx].1;
                let mut even = m.even.clone();
                if e == 1 {
                    even.remove(idx);
                } else {
                    even[idx].1 -= 1;
                }
                out.add_term(
                    Monomial {
                        even,
                        odd: m.odd.clone(),
                    },
                    c.clone() * int(e as i64),
                );
            }
        }
        Ok(out)
    }

    /// Derivative with respect to a symbol of either parity (left convention
    /// for odd symbols).
    pub fn partial(&self, s: &Symbol) -> Self {
        if s.is_odd() {
            self.odd_partial(s).expect("odd symbol")
        } else {
            self.even_partial(s).expect("even symbol")
        }
    }

    /// Formal t-derivative: dynamic symbols advance their derivative order,
    /// constants and θ are annihilated.
    pub fn time_derivative(&self) -> Self {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            for (idx, (s, e)) in m.even.iter().enumerate() {
                if !s.is_dynamic() {
                    continue;
                }
                let mut even = m.even.clone();
                if *e == 1 {
                    even.remove(idx);
                } else {
                    even[idx].1 -= 1;
                }
                even.push((s.derivative(1), 1));
                if let Some((mono, negative)) = Monomial::canonical(even, m.odd.clone()) {
                    let v = c.clone() * int(*e as i64);
                    out.add_term(mono, if negative { -v } else { v });
                }
            }
            for (idx, s) in m.odd.iter().enumerate() {
                if !s.is_dynamic() {
                    continue;
                }
                let mut odd = m.odd.clone();
                odd[idx] = s.derivative(1);
                if let Some((mono, negative)) = Monomial::canonical(m.even.clone(), odd) {
                    out.add_term(mono, if negative { -c.clone() } else { c.clone() });
                }
            }
        }
        out
    }

    pub fn nth_time_derivative(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |p, _| p.time_derivative())
    }

    /// Evaluate in Λ_L given a value for every symbol that occurs.
    pub fn eval<C: Coeff>(
        &self,
        ctx: AlgebraCtx,
        value: &dyn Fn(&Symbol) -> Option<Multivector<C>>,
    ) -> Result<Multivector<C>, SymError> {
        let mut total = Multivector::zero(ctx);
        let mut cache: BTreeMap<Symbol, Multivector<C>> = BTreeMap::new();
        let mut lookup = |s: &Symbol| -> Result<Multivector<C>, SymError> {
            if let Some(v) = cache.get(s) {
                return Ok(v.clone());
            }
            let v = value(s).ok_or_else(|| SymError::Unbound(s.to_string()))?;
            cache.insert(s.clone(), v.clone());
            Ok(v)
        };
        for (m, c) in &self.terms {
            let mut acc = Multivector::scalar(ctx, C::from_rational(c));
            for (s, e) in &m.even {
                let v = lookup(s)?;
                let v = if *e < 0 {
                    v.inverse().map_err(|_| SymError::NotInvertible(s.to_string()))?
                } else {
                    v
                };
                acc = acc.product(&v.pow(e.unsigned_abs())).map_err(SymError::Algebra)?;
            }
            for s in &m.odd {
                acc = acc.product(&lookup(s)?).map_err(SymError::Algebra)?;
            }
            total = total.add(&acc).map_err(SymError::Algebra)?;
        }
        Ok(total)
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let is_unit = m.even.is_empty() && m.odd.is_empty();
            if is_unit {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl From<&Symbol> for GradedPoly {
    fn from(s: &Symbol) -> Self {
        GradedPoly::symbol(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn even(n: &str) -> Symbol {
        Symbol::dynamic(n, Parity::Even)
    }
    fn odd(n: &str) -> Symbol {
        Symbol::dynamic(n, Parity::Odd)
    }
    fn p(s: &Symbol) -> GradedPoly {
        GradedPoly::symbol(s)
    }

    #[test]
    fn odd_nilpotent_and_reordering() {
        let (xi1, xi2) = (odd("xi1"), odd("xi2"));
        assert!(p(&xi1).mul(&p(&xi1)).is_zero());
        assert_eq!(p(&xi2).mul(&p(&xi1)), p(&xi1).mul(&p(&xi2)).neg());
        assert_eq!(p(&xi2).mul(&p(&xi1)).to_string(), "-xi1.xi2");
    }

    #[test]
    fn difference_of_squares_with_nilpotent_part() {
        let x = even("x");
        let n = p(&odd("xi1")).mul(&p(&odd("xi2")));
        let a = p(&x).add(&n);
        let b = p(&x).sub(&n);
        assert_eq!(a.mul(&b), p(&x).pow(2));
    }

    #[test]
    fn substitute_examples() {
        let (x, xi) = (even("x"), odd("xi"));
        let poly = p(&x).mul(&p(&xi)).scale(&int(2));
        let b = BTreeMap::from([(x.clone(), p(&x).pow(2))]);
        assert_eq!(poly.substitute(&b).unwrap(), p(&x).pow(2).mul(&p(&xi)).scale(&int(2)));

        let (xi1, xi2, x2) = (odd("xi1"), odd("xi2"), even("x2"));
        let poly = p(&xi1).mul(&p(&xi2.derivative(1)));
        let b = BTreeMap::from([(xi2.derivative(1), p(&xi2).mul(&p(&x2)))]);
        assert_eq!(poly.substitute(&b).unwrap(), p(&xi1).mul(&p(&xi2)).mul(&p(&x2)));

        let b = BTreeMap::from([(xi.clone(), p(&x))]);
        assert!(matches!(p(&xi).substitute(&b), Err(SymError::ParityMismatch { .. })));
    }

    #[test]
    fn odd_partial_examples() {
        let (xi1, xi2, x) = (odd("xi1"), odd("xi2"), even("x"));
        let prod = p(&xi1).mul(&p(&xi2));
        assert_eq!(prod.odd_partial(&xi1).unwrap(), p(&xi2));
        assert_eq!(prod.odd_partial(&xi2).unwrap(), p(&xi1).neg());
        assert!(p(&x).pow(2).odd_partial(&xi1).unwrap().is_zero());
        assert!(matches!(prod.odd_partial(&x), Err(SymError::NotOdd(_))));
    }

    #[test]
    fn time_derivative_examples() {
        let (x, xi1, xi2) = (even("x"), odd("xi1"), odd("xi2"));
        let d = p(&x).pow(2).time_derivative();
        assert_eq!(d, p(&x).mul(&p(&x.derivative(1))).scale(&int(2)));
        let d = p(&xi1).mul(&p(&xi2)).time_derivative();
        let expected = p(&xi1.derivative(1))
            .mul(&p(&xi2))
            .add(&p(&xi1).mul(&p(&xi2.derivative(1))));
        assert_eq!(d, expected);
        let alpha = Symbol::constant("alpha", Parity::Odd);
        assert!(p(&alpha).time_derivative().is_zero());
    }

    #[test]
    fn canonical_text() {
        let (x1, xi1, xi2) = (even("x1"), odd("xi1"), odd("xi2"));
        let poly = p(&x1).mul(&p(&xi1)).mul(&p(&xi2)).scale(&int(-2));
        assert_eq!(poly.to_string(), "-2*x1*xi1.xi2");
        let t = Symbol::constant("t", Parity::Even);
        let poly = GradedPoly::one().add(&p(&t)).add(&p(&t).pow(3).scale(&rat(1, 3)));
        assert_eq!(poly.to_string(), "1 + t + 1/3*t^3");
    }

    #[test]
    fn laurent_substitution() {
        let t = Symbol::constant("t", Parity::Even);
        let x = even("x");
        let tinv = GradedPoly::from_monomial(Monomial::canonical([(t.clone(), -1)], vec![]).unwrap().0, int(-1));
        let b = BTreeMap::from([(x.clone(), tinv)]);
        let got = p(&x).pow(2).substitute(&b).unwrap();
        assert_eq!(got.to_string(), "t^-2");
        assert_eq!(got.even_partial(&t).unwrap().to_string(), "-2*t^-3");
    }
}
