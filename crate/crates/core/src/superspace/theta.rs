use std::collections::BTreeMap;
use std::fmt;

use super::expr::{theta_monomial, ThetaSet};
use crate::grassmann::Word;
use crate::symcore::{GradedPoly, Monomial};

/// θ-expansion `Σ_S θ^S p_S` with the θ factors written on the left.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThetaPoly {
    parts: BTreeMap<ThetaSet, GradedPoly>,
}

impl ThetaPoly {
    /// Split a polynomial containing θ symbols. θ sorts before every other
    /// symbol, so the leading odd factors of each monomial are its θs.
    pub fn split(p: &GradedPoly) -> ThetaPoly {
        let mut parts: BTreeMap<ThetaSet, GradedPoly> = BTreeMap::new();
        for (m, c) in p.terms() {
            let mut mask = 0u32;
            let mut rest = Vec::new();
            for s in m.odd() {
                match s.theta_index() {
                    Some(i) => mask |= 1 << (i - 1),
                    None => rest.push(s.clone()),
                }
            }
            let (mono, negative) =
                Monomial::canonical(m.even().iter().cloned(), rest).expect("distinct factors stay distinct");
            debug_assert!(!negative);
            parts.entry(Word(mask)).or_default().add_term(mono, c.clone());
        }
        parts.retain(|_, p| !p.is_zero());
        ThetaPoly { parts }
    }

    pub fn from_parts(parts: impl IntoIterator<Item = (ThetaSet, GradedPoly)>) -> Self {
        let mut out = ThetaPoly::default();
        for (s, p) in parts {
            let slot = out.parts.entry(s).or_default();
            *slot = slot.add(&p);
        }
        out.parts.retain(|_, p| !p.is_zero());
        out
    }

    pub fn get(&self, s: ThetaSet) -> GradedPoly {
        self.parts.get(&s).cloned().unwrap_or_default()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&ThetaSet, &GradedPoly)> {
        self.parts.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Recombine into one polynomial `Σ θ^S p_S`.
    pub fn to_poly(&self) -> GradedPoly {
        let parts: Vec<GradedPoly> = self.parts.iter().map(|(s, p)| theta_monomial(*s).mul(p)).collect();
        GradedPoly::sum(&parts)
    }

    /// θ-graded product: `(θ^S a)(θ^T b) = (-1)^{|a||T|} θ^S θ^T a b`, applied
    /// per monomial of `a`.
    pub fn mul(&self, other: &ThetaPoly) -> ThetaPoly {
        let mut out: BTreeMap<ThetaSet, GradedPoly> = BTreeMap::new();
        for (s, a) in &self.parts {
            for (t, b) in &other.parts {
                let Some((st, negative)) = s.merge(*t) else { continue };
                for (m, c) in a.terms() {
                    let flip = (m.odd().len() * t.len()) % 2 == 1;
                    let sign = if negative != flip { -c.clone() } else { c.clone() };
                    let term = GradedPoly::from_monomial(m.clone(), sign).mul(b);
                    let slot = out.entry(st).or_default();
                    *slot = slot.add(&term);
                }
            }
        }
        out.retain(|_, p| !p.is_zero());
        ThetaPoly { parts: out }
    }
}

impl fmt::Display for ThetaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("{}");
        }
        let items: Vec<String> = self
            .parts
            .iter()
            .map(|(s, p)| {
                let key = if s.is_empty() {
                    "{}".to_string()
                } else {
                    format!(
                        "{{{}}}",
                        s.indices().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
                    )
                };
                format!("{key}: {p}")
            })
            .collect();
        write!(f, "{{ {} }}", items.join(", "))
    }
}
