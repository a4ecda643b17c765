use std::collections::BTreeMap;

use super::expr::{SuperExpr, SuperfieldDecl, Superspace};
use super::SuperspaceError;
use crate::coeff::Rational;
use crate::parity::Parity;
use crate::symcore::{GradedPoly, Symbol};

/// Superfields `X^{ij} = -X^{ji}` stored for `i < j` only.
#[derive(Debug, Clone)]
pub struct AntisymmetricFamily {
    pub prefix: String,
    pub size: usize,
}

impl AntisymmetricFamily {
    pub fn new(prefix: &str, size: usize) -> Self {
        AntisymmetricFamily {
            prefix: prefix.to_string(),
            size,
        }
    }

    /// Stored name for `i < j`.
    pub fn name(&self, i: usize, j: usize) -> String {
        debug_assert!(i < j);
        format!("{}{i}{j}", self.prefix)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.size)
            .flat_map(|i| ((i + 1)..=self.size).map(move |j| (i, j)))
            .collect()
    }

    /// Sign-resolved accessor: `Some((sign, name))`, `None` on the diagonal.
    pub fn resolve(&self, i: usize, j: usize) -> Option<(i64, String)> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Some((1, self.name(i, j))),
            std::cmp::Ordering::Greater => Some((-1, self.name(j, i))),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// `X^{ij}` as an expression (`-X^{ji}` when `i > j`, zero on the diagonal).
    pub fn get(&self, i: usize, j: usize) -> SuperExpr {
        match self.resolve(i, j) {
            Some((1, n)) => SuperExpr::Field(n),
            Some((_, n)) => -SuperExpr::Field(n),
            None => SuperExpr::int(0),
        }
    }
}

fn lambda_name(i: usize, j: usize) -> String {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    format!("lam{a}{b}")
}

/// Component names for `X^{ij}` in N=3 superspace.
fn euler_arnold_components(i: usize, j: usize) -> Vec<String> {
    let tag = format!("{i}{j}");
    vec![
        format!("x{tag}"),
        format!("xi1_{tag}"),
        format!("xi2_{tag}"),
        format!("xi3_{tag}"),
        format!("chi12_{tag}"),
        format!("chi13_{tag}"),
        format!("chi23_{tag}"),
        format!("chi_{tag}"),
    ]
}

/// Superspace for the N=3 extension of the Euler-Arnold equations on so(n):
/// superfields `X{i}{j}` (i<j), constants `b{i}` and symmetric `lam{i}{j}`.
pub fn euler_arnold_superspace(n: usize) -> Result<Superspace, SuperspaceError> {
    let family = AntisymmetricFamily::new("X", n);
    let mut space = Superspace::new(3);
    for (i, j) in family.pairs() {
        space.add_field(SuperfieldDecl::new(
            &family.name(i, j),
            Parity::Even,
            3,
            Some(euler_arnold_components(i, j)),
        )?)?;
    }
    for i in 1..=n {
        space = space.with_constant(&format!("b{i}"), Parity::Even);
        for j in i..=n {
            space = space.with_constant(&lambda_name(i, j), Parity::Even);
        }
    }
    Ok(space)
}

/// Superspace, superfield equations and constant values of an Euler–Arnold system.
pub type EulerArnold = (Superspace, Vec<(SuperExpr, SuperExpr)>, BTreeMap<Symbol, GradedPoly>);

/// `dt(X^{ij}) = Σ_k A^{ki}_{kj} (D1 X^{ik})(D2 X^{kj})` with
/// `A^{kl}_{ij} = lam_{ij} - lam_{kl}`, and the values `lam_{ij} = 1/(b_i+b_j)`
/// for the given `b`.
pub fn euler_arnold_system(b: &[Rational]) -> Result<EulerArnold, SuperspaceError> {
    let n = b.len();
    let space = euler_arnold_superspace(n)?;
    let family = AntisymmetricFamily::new("X", n);
    let mut equations = Vec::new();
    for (i, j) in family.pairs() {
        let mut terms = Vec::new();
        for k in 1..=n {
            if k == i || k == j {
                continue;
            }
            let coeff = SuperExpr::constant(&lambda_name(k, j)) - SuperExpr::constant(&lambda_name(k, i));
            let left = SuperExpr::d(Some(1), family.get(i, k));
            let right = SuperExpr::d(Some(2), family.get(k, j));
            terms.push(SuperExpr::product(vec![coeff, left, right]));
        }
        let rhs = if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            SuperExpr::sum(terms)
        };
        equations.push((SuperExpr::dt(1, SuperExpr::Field(family.name(i, j))), rhs));
    }
    let mut values = BTreeMap::new();
    for (idx, bi) in b.iter().enumerate() {
        values.insert(
            Symbol::constant(&format!("b{}", idx + 1), Parity::Even),
            GradedPoly::constant(bi.clone()),
        );
        for (jdx, bj) in b.iter().enumerate().skip(idx) {
            let lam = (bi.clone() + bj.clone()).recip();
            values.insert(
                Symbol::constant(&lambda_name(idx + 1, jdx + 1), Parity::Even),
                GradedPoly::constant(lam),
            );
        }
    }
    Ok((space, equations, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antisymmetric_accessor() {
        let f = AntisymmetricFamily::new("X", 3);
        assert_eq!(f.resolve(2, 1), Some((-1, "X12".to_string())));
        assert_eq!(f.resolve(3, 3), None);
        assert_eq!(f.pairs(), vec![(1, 2), (1, 3), (2, 3)]);
    }
}
