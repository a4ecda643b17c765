//! Homogenization of quadratic systems, the symmetric bilinear product
//! obtained by polarization, and Taylor series in that product.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::coeff::{int, rat, Rational};
use crate::parity::Parity;
use crate::superspace::ComponentSystem;
use crate::symcore::{GradedPoly, SymError, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonassocError {
    #[error("equation for `{equation}` has a term of degree {degree}; only degree <= 2 is supported")]
    UnsupportedDegree { equation: String, degree: i32 },
    #[error("equation for `{0}` is not homogeneous of degree 2")]
    NotHomogeneous(String),
    #[error("expected {expected} coordinates, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("`{0}` is already used")]
    NameTaken(String),
    #[error(transparent)]
    Sym(#[from] SymError),
}

fn dynamic_degree(m: &crate::symcore::Monomial) -> i32 {
    m.degree_in(|s| s.is_dynamic())
}

/// `ẋ = Q(x)` with every right-hand side homogeneous of degree 2 in the
/// coordinates (constants do not count).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticMap {
    pub coords: Vec<Symbol>,
    pub rhs: Vec<GradedPoly>,
}

impl QuadraticMap {
    pub fn new(coords: Vec<Symbol>, rhs: Vec<GradedPoly>) -> Result<Self, NonassocError> {
        if coords.len() != rhs.len() {
            return Err(NonassocError::Dimension {
                expected: coords.len(),
                found: rhs.len(),
            });
        }
        for (c, p) in coords.iter().zip(&rhs) {
            if p.terms().any(|(m, _)| dynamic_degree(m) != 2) {
                return Err(NonassocError::NotHomogeneous(c.to_string()));
            }
        }
        Ok(QuadraticMap { coords, rhs })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `Q` applied to a point given by one polynomial per coordinate.
    pub fn apply(&self, point: &[GradedPoly]) -> Result<Vec<GradedPoly>, NonassocError> {
        let bindings = bind(&self.coords, point)?;
        Ok(self
            .rhs
            .iter()
            .map(|p| p.substitute(&bindings))
            .collect::<Result<_, _>>()?)
    }

    pub fn record(&self) -> Vec<(String, String)> {
        self.coords
            .iter()
            .zip(&self.rhs)
            .map(|(c, p)| (c.to_string(), p.to_string()))
            .collect()
    }
}

impl fmt::Display for QuadraticMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rhs.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn bind(coords: &[Symbol], point: &[GradedPoly]) -> Result<BTreeMap<Symbol, GradedPoly>, NonassocError> {
    if coords.len() != point.len() {
        return Err(NonassocError::Dimension {
            expected: coords.len(),
            found: point.len(),
        });
    }
    Ok(coords.iter().cloned().zip(point.iter().cloned()).collect())
}

/// Multiply each degree-`d` term by `u^(2-d)` and append `u̇ = 0`.
pub fn homogenize(sys: &ComponentSystem, u: &str) -> Result<QuadraticMap, NonassocError> {
    let sys = sys.to_first_order();
    if sys.variables().iter().any(|v| v.name() == u) || sys.constants().iter().any(|c| c.name() == u) {
        return Err(NonassocError::NameTaken(u.to_string()));
    }
    let u_sym = Symbol::dynamic(u, Parity::Even);
    let u_poly = GradedPoly::symbol(&u_sym);
    let mut coords = Vec::new();
    let mut rhs = Vec::new();
    for eq in &sys.equations {
        let mut out = GradedPoly::zero();
        for (m, c) in eq.rhs.terms() {
            let d = dynamic_degree(m);
            if d > 2 {
                return Err(NonassocError::UnsupportedDegree {
                    equation: eq.symbol.to_string(),
                    degree: d,
                });
            }
            let term = GradedPoly::from_monomial(m.clone(), c.clone());
            out = out.add(&u_poly.pow((2 - d) as u32).mul(&term));
        }
        coords.push(eq.symbol.clone());
        rhs.push(out);
    }
    coords.push(u_sym);
    rhs.push(GradedPoly::zero());
    QuadraticMap::new(coords, rhs)
}

/// Name of the second-argument copy of a coordinate: `x -> y`, `xi -> chi`,
/// `u -> v`, `X -> Y`, keeping any suffix; otherwise `<name>_y`.
pub fn copy_name(name: &str) -> String {
    for (from, to) in [("xi", "chi"), ("x", "y"), ("X", "Y"), ("u", "v")] {
        if let Some(rest) = name.strip_prefix(from) {
            if rest.is_empty() || !rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
                return format!("{to}{rest}");
            }
        }
    }
    format!("{name}_y")
}

/// `B(X;Y) = ½[Q(X+Y) - Q(X) - Q(Y)]`, stored as one polynomial per
/// coordinate in the coordinates (for `X`) and their copies (for `Y`).
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearProduct {
    pub coords: Vec<Symbol>,
    pub copies: Vec<Symbol>,
    pub components: Vec<GradedPoly>,
}

pub fn polarize(q: &QuadraticMap) -> Result<BilinearProduct, NonassocError> {
    let taken: BTreeSet<&str> = q.coords.iter().map(|s| s.name()).collect();
    let mut copies = Vec::new();
    for c in &q.coords {
        let mut name = copy_name(c.name());
        while taken.contains(name.as_str()) {
            name.push_str("_y");
        }
        copies.push(Symbol::dynamic(&name, c.parity()));
    }
    let x: Vec<GradedPoly> = q.coords.iter().map(GradedPoly::symbol).collect();
    let y: Vec<GradedPoly> = copies.iter().map(GradedPoly::symbol).collect();
    let xy: Vec<GradedPoly> = x.iter().zip(&y).map(|(a, b)| a.add(b)).collect();
    let q_xy = q.apply(&xy)?;
    let q_y = q.apply(&y)?;
    let half = rat(1, 2);
    let components = q_xy
        .iter()
        .zip(&q.rhs)
        .zip(&q_y)
        .map(|((s, qx), qy)| s.sub(qx).sub(qy).scale(&half))
        .collect();
    Ok(BilinearProduct {
        coords: q.coords.clone(),
        copies,
        components,
    })
}

impl BilinearProduct {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn apply(&self, x: &[GradedPoly], y: &[GradedPoly]) -> Result<Vec<GradedPoly>, NonassocError> {
        let mut bindings = bind(&self.coords, x)?;
        bindings.extend(bind(&self.copies, y)?);
        Ok(self
            .components
            .iter()
            .map(|p| p.substitute(&bindings))
            .collect::<Result<_, _>>()?)
    }

    /// `B(X;Y) = B(Y;X)` as polynomials.
    pub fn is_symmetric(&self) -> Result<bool, NonassocError> {
        let x: Vec<GradedPoly> = self.coords.iter().map(GradedPoly::symbol).collect();
        let y: Vec<GradedPoly> = self.copies.iter().map(GradedPoly::symbol).collect();
        Ok(self.apply(&y, &x)? == self.components)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(GradedPoly::is_zero)
    }
}

impl fmt::Display for BilinearProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn render_point(p: &[GradedPoly]) -> String {
    let parts: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// Triple with `B(B(X,Y),Z) ≠ B(X,B(Y,Z))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub x: String,
    pub y: String,
    pub z: String,
    pub left: String,
    pub right: String,
    pub trial: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub commutative: bool,
    /// `B(e_i, e_j)` for `i <= j`.
    pub table: Vec<(String, String)>,
    pub witness: Option<Witness>,
    pub trials: usize,
}

impl fmt::Display for AlgebraReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "commutative: {}", self.commutative)?;
        for (k, v) in &self.table {
            writeln!(f, "{k} = {v}")?;
        }
        match &self.witness {
            Some(w) => {
                writeln!(f, "non-associative witness (trial {}):", w.trial)?;
                writeln!(f, "  X = {}", w.x)?;
                writeln!(f, "  Y = {}", w.y)?;
                writeln!(f, "  Z = {}", w.z)?;
                writeln!(f, "  B(B(X,Y),Z) = {}", w.left)?;
                writeln!(f, "  B(X,B(Y,Z)) = {}", w.right)
            }
            None => writeln!(f, "no witness found in {} trials", self.trials),
        }
    }
}

const ODD_SLOTS: usize = 3;

fn odd_constants() -> Vec<Symbol> {
    (1..=ODD_SLOTS)
        .map(|k| Symbol::constant(&format!("o{k}"), Parity::Odd))
        .collect()
}

/// Basis point: 1 in an even slot, the odd constant `o1` in an odd slot.
fn basis_point(b: &BilinearProduct, i: usize) -> Vec<GradedPoly> {
    let o = odd_constants();
    (0..b.dim())
        .map(|j| match (i == j, b.coords[j].is_odd()) {
            (false, _) => GradedPoly::zero(),
            (true, false) => GradedPoly::one(),
            (true, true) => GradedPoly::symbol(&o[0]),
        })
        .collect()
}

fn random_point(b: &BilinearProduct, rng: &mut StdRng) -> Vec<GradedPoly> {
    let o = odd_constants();
    b.coords
        .iter()
        .map(|c| {
            if c.is_odd() {
                let mut p = GradedPoly::zero();
                for s in &o {
                    p = p.add(&GradedPoly::symbol(s).scale(&int(rng.random_range(-3..=3))));
                }
                p
            } else {
                GradedPoly::int(rng.random_range(-3..=3))
            }
        })
        .collect()
}

/// Commutativity check, product table on basis points, and a seeded search
/// for a non-associativity witness: all basis triples first, then random
/// integer points in `[-3, 3]` (odd slots get integer combinations of odd
/// constants), up to `trials` triples in total.
pub fn algebra_report(b: &BilinearProduct, trials: usize, seed: u64) -> Result<AlgebraReport, NonassocError> {
    let commutative = b.is_symmetric()?;
    assert!(commutative, "polarization is symmetric by construction");
    let n = b.dim();
    let basis: Vec<Vec<GradedPoly>> = (0..n).map(|i| basis_point(b, i)).collect();
    let mut table = Vec::new();
    for i in 0..n {
        for j in i..n {
            let v = b.apply(&basis[i], &basis[j])?;
            table.push((format!("B(e{},e{})", i + 1, j + 1), render_point(&v)));
        }
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut structured = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                structured.push((i, j, k));
            }
        }
    }
    let mut witness = None;
    let mut used = 0;
    for trial in 0..trials {
        used = trial + 1;
        let (x, y, z) = match structured.get(trial) {
            Some(&(i, j, k)) => (basis[i].clone(), basis[j].clone(), basis[k].clone()),
            None => (
                random_point(b, &mut rng),
                random_point(b, &mut rng),
                random_point(b, &mut rng),
            ),
        };
        let left = b.apply(&b.apply(&x, &y)?, &z)?;
        let right = b.apply(&x, &b.apply(&y, &z)?)?;
        if left != right {
            witness = Some(Witness {
                x: render_point(&x),
                y: render_point(&y),
                z: render_point(&z),
                left: render_point(&left),
                right: render_point(&right),
                trial,
            });
            break;
        }
    }
    Ok(AlgebraReport {
        commutative,
        table,
        witness,
        trials: used,
    })
}

/// Taylor coefficients of `ẋ = B(x, x)` around `x0`:
/// `c_{k+1} = (1/(k+1)) Σ_{i+j=k} B(c_i, c_j)`.
pub fn taylor_series(
    b: &BilinearProduct,
    x0: &[GradedPoly],
    order: usize,
) -> Result<Vec<Vec<GradedPoly>>, NonassocError> {
    if x0.len() != b.dim() {
        return Err(NonassocError::Dimension {
            expected: b.dim(),
            found: x0.len(),
        });
    }
    let mut coeffs: Vec<Vec<GradedPoly>> = vec![x0.to_vec()];
    for k in 0..order {
        let mut next = vec![GradedPoly::zero(); b.dim()];
        for i in 0..=k {
            let term = b.apply(&coeffs[i], &coeffs[k - i])?;
            for (acc, t) in next.iter_mut().zip(term) {
                *acc = acc.add(&t);
            }
        }
        let scale = Rational::new(1.into(), ((k + 1) as i64).into());
        coeffs.push(next.into_iter().map(|p| p.scale(&scale)).collect());
    }
    Ok(coeffs)
}

/// Left powers `X^1 = X`, `X^n = B(X, X^{n-1})`.
pub fn left_powers(b: &BilinearProduct, x: &[GradedPoly], max: usize) -> Result<Vec<Vec<GradedPoly>>, NonassocError> {
    let mut out = vec![x.to_vec()];
    for _ in 1..max {
        let next = b.apply(x, out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Evaluate series coefficients with numeric coordinates at `t`.
pub fn partial_sum_f64(coeffs: &[Vec<f64>], t: f64) -> Vec<f64> {
    let dim = coeffs.first().map_or(0, Vec::len);
    let mut out = vec![0.0; dim];
    let mut tk = 1.0;
    for c in coeffs {
        for (o, v) in out.iter_mut().zip(c) {
            *o += v * tk;
        }
        tk *= t;
    }
    out
}

/// Numeric value of a constant polynomial.
pub fn as_f64(p: &GradedPoly) -> Option<f64> {
    if p.is_zero() {
        return Some(0.0);
    }
    p.as_constant().map(|c| crate::coeff::rational_to_f64(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superspace::{build_component_system, SuperExpr, SuperfieldDecl, Superspace};

    fn simple() -> ComponentSystem {
        let decl = SuperfieldDecl::new("X", Parity::Even, 1, Some(vec!["x".into(), "xi".into()])).unwrap();
        let sp = Superspace::new(1).with_field(decl);
        let x = SuperExpr::field("X");
        build_component_system(&sp, &[(SuperExpr::dt(1, x.clone()), x.clone() + x.pow(2))]).unwrap()
    }

    #[test]
    fn homogenize_and_polarize_simple() {
        let q = homogenize(&simple(), "u").unwrap();
        assert_eq!(q.to_string(), "[u*x + x^2, u*xi + 2*x*xi, 0]");
        let b = polarize(&q).unwrap();
        let doubled: Vec<String> = b.components.iter().map(|p| p.scale(&int(2)).to_string()).collect();
        assert_eq!(doubled, ["u*y + v*x + 2*x*y", "u*chi + v*xi + 2*x*chi + 2*y*xi", "0"]);
        assert!(b.is_symmetric().unwrap());
        let x: Vec<GradedPoly> = q.coords.iter().map(GradedPoly::symbol).collect();
        assert_eq!(b.apply(&x, &x).unwrap(), q.rhs);
    }

    #[test]
    fn copy_names() {
        assert_eq!(copy_name("xi"), "chi");
        assert_eq!(copy_name("X1"), "Y1");
        assert_eq!(copy_name("x_2"), "y_2");
        assert_eq!(copy_name("u"), "v");
        assert_eq!(copy_name("w"), "w_y");
    }

    #[test]
    fn zero_product_is_associative() {
        let a = Symbol::dynamic("a", Parity::Even);
        let q = QuadraticMap::new(vec![a], vec![GradedPoly::zero()]).unwrap();
        let b = polarize(&q).unwrap();
        let report = algebra_report(&b, 50, 1).unwrap();
        assert!(report.witness.is_none());
        assert_eq!(report.trials, 50);
    }

    #[test]
    fn cubic_terms_rejected() {
        let decl = SuperfieldDecl::new("X", Parity::Even, 1, None).unwrap();
        let sp = Superspace::new(1).with_field(decl);
        let x = SuperExpr::field("X");
        let sys = build_component_system(&sp, &[(SuperExpr::dt(1, x.clone()), x.pow(3))]).unwrap();
        assert!(matches!(
            homogenize(&sys, "u"),
            Err(NonassocError::UnsupportedDegree { degree: 3, .. })
        ));
    }

    #[test]
    fn zero_initial_point_stays_zero() {
        let b = polarize(&homogenize(&simple(), "u").unwrap()).unwrap();
        let c = taylor_series(&b, &vec![GradedPoly::zero(); 3], 4).unwrap();
        assert!(c.iter().flatten().all(GradedPoly::is_zero));
    }
}
