//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::coeff::Rational;

/// Solve `A x = b`. Pivots are taken at the first nonzero entry in column
/// order; free unknowns are set to zero. `None` if the system is inconsistent.
pub fn solve(mut rows: Vec<Vec<Rational>>, mut rhs: Vec<Rational>, unknowns: usize) -> Option<Vec<Rational>> {
    assert_eq!(rows.len(), rhs.len());
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = Rational::one() / rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        rhs[r] = rhs[r].clone() * inv;
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let factor = rows[i][col].clone();
            let pivot = rows[r].clone();
            for (x, p) in rows[i][col..unknowns].iter_mut().zip(&pivot[col..unknowns]) {
                *x = x.clone() - factor.clone() * p.clone();
            }
            rhs[i] = rhs[i].clone() - factor * rhs[r].clone();
        }
        pivots.push((r, col));
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rhs[r..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); unknowns];
    for (row, col) in pivots {
        x[col] = rhs[row].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{int, rat};

    #[test]
    fn unique_solution() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve(a, vec![int(3), int(5)], 2).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
    }

    #[test]
    fn inconsistent_and_free() {
        let a = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert!(solve(a.clone(), vec![int(1), int(3)], 2).is_none());
        assert_eq!(solve(a, vec![int(1), int(2)], 2).unwrap(), vec![int(1), int(0)]);
        assert_eq!(solve(vec![], vec![], 2).unwrap(), vec![int(0), int(0)]);
    }
}
