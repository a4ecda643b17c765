use num_traits::One;

use super::expr::{theta_monomial, SuperfieldDecl};
use super::ThetaPoly;
use crate::coeff::Rational;
use crate::grassmann::Word;
use crate::parity::Parity;
use crate::symcore::GradedPoly;

/// `X^n` by the multinomial series over the `2^N` terms `z_S = θ^S c_S`.
///
/// For an even superfield every `z_S` with `S ≠ ∅` is even and squares to zero,
/// so a surviving multinomial index has `k_S ∈ {0,1}` for `S ≠ ∅` and the
/// coefficient reduces to `n!/k_∅!`. For an odd superfield `X^n = 0` when `n ≥ 2`.
pub fn expand_power(decl: &SuperfieldDecl, n: u32) -> ThetaPoly {
    if n == 0 {
        return ThetaPoly::from_parts([(Word::EMPTY, GradedPoly::one())]);
    }
    if decl.parity == Parity::Odd {
        return if n == 1 {
            ThetaPoly::split(&decl.as_poly())
        } else {
            ThetaPoly::default()
        };
    }
    let body = GradedPoly::symbol(decl.component(Word::EMPTY));
    let souls: Vec<GradedPoly> = decl
        .components()
        .iter()
        .filter(|(s, _)| !s.is_empty())
        .map(|(s, c)| theta_monomial(*s).mul(&GradedPoly::symbol(c)))
        .collect();
    let mut total = GradedPoly::zero();
    for chosen in 0u64..(1u64 << souls.len()) {
        let count = chosen.count_ones();
        if count > n {
            continue;
        }
        let k_body = n - count;
        // n! / k_body!
        let coeff = ((k_body + 1)..=n).fold(Rational::one(), |acc, v| acc * Rational::from_integer(v.into()));
        let mut term = body.pow(k_body).scale(&coeff);
        for (i, z) in souls.iter().enumerate() {
            if chosen >> i & 1 == 1 {
                term = term.mul(z);
                if term.is_zero() {
                    break;
                }
            }
        }
        total = total.add(&term);
    }
    ThetaPoly::split(&total)
}

/// `n!/(n-k)!`, the coefficient of `x^{n-k}` in the k-th derivative of `x^n`.
pub fn falling_factorial(n: u32, k: u32) -> Rational {
    if k > n {
        return Rational::from_integer(0.into());
    }
    let v: u64 = ((n - k + 1)..=n).map(u64::from).product();
    Rational::from_integer(v.into())
}
