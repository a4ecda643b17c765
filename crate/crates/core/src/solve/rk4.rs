use serde::Serialize;

use super::{LayerSystem, SolveError};

/// Values of every unknown on the uniform grid `t0 + i·h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t0: f64,
    pub h: f64,
    pub labels: Vec<String>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let idx = self.labels.iter().position(|l| l == label)?;
        Some(self.states.iter().map(|s| s[idx]).collect())
    }
}

fn axpy(base: &[f64], k: &[f64], scale: f64, out: &mut [f64]) {
    for ((o, b), d) in out.iter_mut().zip(base).zip(k) {
        *o = b + scale * d;
    }
}

/// Classical fixed-step RK4 from `t0` to `t_end`. The number of steps is
/// `round((t_end - t0)/h)`. A non-finite state stops the integration with
/// [`SolveError::BlowUp`], which carries the finite part of the trajectory.
pub fn integrate(sys: &LayerSystem, init: &[f64], t0: f64, t_end: f64, h: f64) -> Result<Trajectory, SolveError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(SolveError::BadStep(h));
    }
    assert_eq!(init.len(), sys.len(), "initial state size");
    let steps = ((t_end - t0) / h).round().max(0.0) as usize;
    let n = sys.len();
    let mut traj = Trajectory {
        t0,
        h,
        labels: sys.labels(),
        states: Vec::with_capacity(steps + 1),
    };
    traj.states.push(init.to_vec());
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut y = init.to_vec();
    for i in 0..steps {
        sys.eval_rhs(&y, &mut k1);
        axpy(&y, &k1, h / 2.0, &mut tmp);
        sys.eval_rhs(&tmp, &mut k2);
        axpy(&y, &k2, h / 2.0, &mut tmp);
        sys.eval_rhs(&tmp, &mut k3);
        axpy(&y, &k3, h, &mut tmp);
        sys.eval_rhs(&tmp, &mut k4);
        for j in 0..n {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            let t_last = traj.time(i);
            return Err(SolveError::BlowUp {
                t_last,
                trajectory: Box::new(traj),
            });
        }
        traj.states.push(y.clone());
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::AlgebraCtx;
    use crate::parity::Parity;
    use crate::solve::{expand_to_layers, Assignment};
    use crate::superspace::{ComponentSystem, Equation, Superspace};
    use crate::symcore::{GradedPoly, Symbol};

    fn body_system() -> LayerSystem {
        let x = Symbol::dynamic("x", Parity::Even);
        let sp = Superspace::new(1).with_variable("x", Parity::Even);
        let sys = ComponentSystem::from_equations(
            sp,
            vec![Equation {
                symbol: x.clone(),
                order: 1,
                rhs: GradedPoly::symbol(&x).pow(2),
            }],
        )
        .unwrap();
        expand_to_layers(&sys, &Assignment::new(AlgebraCtx::new(1).unwrap())).unwrap()
    }

    #[test]
    fn body_equation_matches_closed_form() {
        let sys = body_system();
        let traj = integrate(&sys, &[-1.0], 0.0, 1.0, 1e-3).unwrap();
        assert_eq!(traj.len(), 1001);
        assert!((traj.last()[0] + 0.5).abs() <= 1e-8);
    }

    #[test]
    fn blow_up_reports_last_time() {
        let sys = body_system();
        match integrate(&sys, &[1.0], 0.0, 2.0, 1e-2) {
            Err(SolveError::BlowUp { t_last, trajectory }) => {
                assert!(t_last > 0.9 && t_last < 2.0);
                assert!(trajectory.states.iter().all(|s| s[0].is_finite()));
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_step() {
        assert!(matches!(
            integrate(&body_system(), &[1.0], 0.0, 1.0, 0.0),
            Err(SolveError::BadStep(_))
        ));
    }
}
