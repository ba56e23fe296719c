//! Numerical integration of the pendulum and Lax flows with drift
//! diagnostics.
//!
//! Trajectories are parametrized by a real ray parameter; complex end times
//! are handled as straight rays `t = direction * sigma`. No projection is
//! ever applied during integration: constraint and invariant drift are
//! recorded per sample instead.

use crate::error::{Error, Result};
use crate::matpoly::{self, MatrixPolynomial};
use crate::pendulum::{self, PendulumState};
use crate::rk;
use nalgebra::Vector3;
use num_complex::Complex64;

type C = Complex64;
type CVec3 = Vector3<Complex64>;

#[derive(Debug, Clone, Copy, Default)]
pub struct SampleDiagnostics {
    /// Constraint drift: manifold residual for pendulum states, leading-term
    /// drift for Lax matrices.
    pub constraint_residual: f64,
    /// Invariant drift relative to the initial sample: max of |H - H0|,
    /// |K - K0| for the pendulum, spectral-coefficient drift for Lax flows.
    pub invariant_drift: f64,
}

/// Dense-output trajectory. `times` is the strictly increasing ray
/// parameter; the complex time of sample `i` is `direction * times[i]`
/// (`direction = 1` for plain real-time integration).
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub direction: C,
    pub states: Vec<S>,
    pub integrator_tol: f64,
    pub diagnostics: Vec<SampleDiagnostics>,
    /// Accepted/rejected step counts of the adaptive integrator (zero for
    /// synthetic trajectories).
    pub steps: (usize, usize),
}

impl<S> Trajectory<S> {
    pub fn max_constraint_drift(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.constraint_residual)
            .fold(0.0, f64::max)
    }

    pub fn max_invariant_drift(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.invariant_drift)
            .fold(0.0, f64::max)
    }
}

fn sample_grid(length: f64, n_samples: usize) -> Vec<f64> {
    let n = n_samples.max(2);
    (0..n).map(|i| length * i as f64 / (n - 1) as f64).collect()
}

fn state_to_flat(s: &PendulumState) -> Vec<f64> {
    let mut v = Vec::with_capacity(12);
    for z in s.x.iter().chain(s.v.iter()) {
        v.push(z.re);
        v.push(z.im);
    }
    v
}

fn flat_to_state(f: &[f64]) -> PendulumState {
    let g = |k: usize| C::new(f[2 * k], f[2 * k + 1]);
    PendulumState::new_unchecked(
        CVec3::new(g(0), g(1), g(2)),
        CVec3::new(g(3), g(4), g(5)),
    )
}

/// Integrates the pendulum flow over real time `[0, t_end]` (or backwards for
/// negative `t_end`), sampling `n_samples` equally spaced states.
pub fn integrate_pendulum(
    state0: &PendulumState,
    t_end: f64,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory<PendulumState>> {
    let res = state0.constraint_residual();
    if res > pendulum::CONSTRAINT_TOL {
        return Err(Error::ConstraintViolation { residual: res, tol: pendulum::CONSTRAINT_TOL });
    }
    let direction = if t_end >= 0.0 { C::new(1.0, 0.0) } else { C::new(-1.0, 0.0) };
    let length = t_end.abs();
    let dir = direction;
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let s = flat_to_state(y);
        let (xd, vd) = pendulum::pendulum_rhs_unchecked(&s);
        for (k, z) in xd.iter().chain(vd.iter()).enumerate() {
            let w = dir * z;
            dy[2 * k] = w.re;
            dy[2 * k + 1] = w.im;
        }
    };
    let times = sample_grid(length, n_samples);
    let out = rk::dopri5(rhs, &state_to_flat(state0), length, tol, &times)?;
    let states: Vec<PendulumState> = out.samples.iter().map(|f| flat_to_state(f)).collect();
    let (h0, k0) = pendulum::integrals(state0);
    let diagnostics = states
        .iter()
        .map(|s| {
            let (h, k) = pendulum::integrals(s);
            SampleDiagnostics {
                constraint_residual: s.constraint_residual(),
                invariant_drift: (h - h0).norm().max((k - k0).norm()),
            }
        })
        .collect();
    Ok(Trajectory {
        times,
        direction,
        states,
        integrator_tol: tol,
        diagnostics,
        steps: (out.n_accepted, out.n_rejected),
    })
}

/// Integrates the Lax flow `dA/ds = [A^k(a), A(x)]/(x - a)` coefficientwise,
/// along the straight ray from 0 to the (possibly complex) `t_end`.
pub fn integrate_lax(
    a0: &MatrixPolynomial,
    k: u32,
    a: C,
    t_end: C,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory<MatrixPolynomial>> {
    let length = t_end.norm();
    let direction = if length > 0.0 { t_end / length } else { C::new(1.0, 0.0) };
    let (r, d) = (a0.r(), a0.d());
    let dir = direction;
    let failed = std::cell::Cell::new(false);
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let ap = match MatrixPolynomial::from_flat(r, d, y) {
            Ok(ap) => ap,
            Err(_) => {
                failed.set(true);
                dy.fill(0.0);
                return;
            }
        };
        match matpoly::lax_vector_field(&ap, k, a) {
            Ok(f) => {
                let scaled = f.scale(dir);
                dy.copy_from_slice(&scaled.to_flat());
            }
            Err(_) => {
                failed.set(true);
                dy.fill(f64::NAN);
            }
        }
    };
    let times = sample_grid(length, n_samples);
    let out = rk::dopri5(rhs, &a0.to_flat(), length, tol, &times)?;
    if failed.get() {
        return Err(Error::StepFailure { t: length });
    }
    let states: Vec<MatrixPolynomial> = out
        .samples
        .iter()
        .map(|f| MatrixPolynomial::from_flat(r, d, f))
        .collect::<Result<_>>()?;
    let p0 = matpoly::char_poly(a0);
    let lead0 = a0.leading().clone();
    let diagnostics = states
        .iter()
        .map(|s| SampleDiagnostics {
            constraint_residual: (s.leading() - &lead0).iter().map(|z| z.norm()).fold(0.0, f64::max),
            invariant_drift: matpoly::char_poly(s).coeff_distance(&p0),
        })
        .collect();
    Ok(Trajectory {
        times,
        direction,
        states,
        integrator_tol: tol,
        diagnostics,
        steps: (out.n_accepted, out.n_rejected),
    })
}

/// Max spectral-coefficient drift along a Lax trajectory relative to the
/// initial sample.
pub fn isospectral_deviation(traj: &Trajectory<MatrixPolynomial>) -> f64 {
    if traj.states.is_empty() {
        return 0.0;
    }
    let p0 = matpoly::char_poly(&traj.states[0]);
    traj.states
        .iter()
        .map(|s| matpoly::char_poly(s).coeff_distance(&p0))
        .fold(0.0, f64::max)
}

/// Commutator defect of the energy flow and the rotation flow:
/// `|| Phi^H_t Phi^K_s - Phi^K_s Phi^H_t ||` at `state0` (max-abs over the
/// twelve real components). The rotation flow is `rotate_about_e3` with
/// angle `s`.
pub fn commuting_flows_deviation(state0: &PendulumState, t: f64, s: f64, tol: f64) -> Result<f64> {
    let rot_first = pendulum::rotate_about_e3(state0, C::new(s, 0.0));
    let a = integrate_pendulum(&rot_first, t, tol, 2)?.states.pop().unwrap();
    let flow_first = integrate_pendulum(state0, t, tol, 2)?.states.pop().unwrap();
    let b = pendulum::rotate_about_e3(&flow_first, C::new(s, 0.0));
    let diff = (a.x - b.x)
        .iter()
        .chain((a.v - b.v).iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use nalgebra::DMatrix;
    use rand::SeedableRng;

    fn s0() -> PendulumState {
        PendulumState::from_real([0.6, 0.0, 0.8], [0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn equilibrium_is_constant() {
        let down = PendulumState::from_real([0.0, 0.0, -1.0], [0.0; 3]).unwrap();
        let traj = integrate_pendulum(&down, 5.0, 1e-10, 11).unwrap();
        for s in &traj.states {
            assert!((s.x[2] + c64(1.0, 0.0)).norm() < 1e-12);
            assert!(s.v.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn conservation_and_reversal_for_s0() {
        let traj = integrate_pendulum(&s0(), 10.0, 1e-12, 101).unwrap();
        assert!(traj.max_invariant_drift() < 1e-9, "drift {}", traj.max_invariant_drift());
        assert!(traj.max_constraint_drift() < 1e-8);
        // reverse from the endpoint
        let end = traj.states.last().unwrap().clone();
        let back = integrate_pendulum(&end, -10.0, 1e-12, 2).unwrap();
        let fin = back.states.last().unwrap();
        let d = (fin.x - s0().x)
            .iter()
            .chain((fin.v - s0().v).iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(d < 1e-8, "reversal error {d}");
    }

    #[test]
    fn diagonal_lax_flow_is_constant() {
        let one = c64(1.0, 0.0);
        let a0 = MatrixPolynomial::new(vec![
            DMatrix::from_row_slice(2, 2, &[c64(0.4, 0.2), c64(0.0, 0.0), c64(0.0, 0.0), c64(-0.3, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[one, c64(0.0, 0.0), c64(0.0, 0.0), c64(2.0, 0.0)]),
        ])
        .unwrap();
        let traj = integrate_lax(&a0, 1, c64(0.3, 0.0), c64(3.0, 0.0), 1e-10, 7).unwrap();
        assert!(isospectral_deviation(&traj) < 1e-12);
        for s in &traj.states {
            assert!(s.sub(&a0).unwrap().norm() < 1e-11);
        }
    }

    #[test]
    fn pendulum_lax_flow_matches_pushforward() {
        // Lax time s relates to pendulum time t by t = 2i s.
        let t_end = 3.0f64;
        let n = 31;
        let ptraj = integrate_pendulum(&s0(), t_end, 1e-12, n).unwrap();
        let lv0 = pendulum::LaxVariables::from_state(&s0());
        let (a0, _) = pendulum::lax_matrices(&lv0);
        let s_end = c64(0.0, -0.5) * t_end; // t/(2i)
        let ltraj = integrate_lax(&a0, 1, c64(0.0, 0.0), s_end, 1e-12, n).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let lv = pendulum::LaxVariables::from_state(&ptraj.states[i]);
            let (ai, _) = pendulum::lax_matrices(&lv);
            worst = worst.max(ai.sub(&ltraj.states[i]).unwrap().norm());
        }
        assert!(worst < 1e-7, "pushforward mismatch {worst}");
        // leading coefficient constant along the flow
        assert!(ltraj.max_constraint_drift() < 1e-12);
    }

    #[test]
    fn isospectral_deviation_detects_corruption() {
        let lv0 = pendulum::LaxVariables::from_state(&s0());
        let (a0, _) = pendulum::lax_matrices(&lv0);
        let mut traj = integrate_lax(&a0, 1, c64(0.0, 0.0), c64(0.0, -1.0), 1e-12, 5).unwrap();
        let clean = isospectral_deviation(&traj);
        assert!(clean < 1e-10);
        traj.states[2].coeff_mut(0)[(0, 1)] += c64(1e-3, 0.0);
        assert!(isospectral_deviation(&traj) >= 1e-4);
    }

    #[test]
    fn commuting_flows() {
        assert!(commuting_flows_deviation(&s0(), 0.0, 1.0, 1e-12).unwrap() < 1e-12);
        let d = commuting_flows_deviation(&s0(), 1.0, 1.0, 1e-12).unwrap();
        assert!(d < 1e-8, "commutator defect {d}");
        let down = PendulumState::from_real([0.0, 0.0, -1.0], [0.0; 3]).unwrap();
        assert!(commuting_flows_deviation(&down, 2.0, 0.7, 1e-12).unwrap() < 1e-10);
    }

    #[test]
    fn tolerance_ladder_monotone_drift() {
        let mut prev = f64::INFINITY;
        for tol in [1e-6, 1e-8, 1e-10] {
            let traj = integrate_pendulum(&s0(), 10.0, tol, 21).unwrap();
            let d = traj.max_invariant_drift();
            assert!(d < prev, "tol {tol}: drift {d} vs {prev}");
            prev = d;
        }
    }

    #[test]
    fn random_real_states_conserve() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let s = pendulum::random_real_state(&mut rng);
            let traj = integrate_pendulum(&s, 20.0, 1e-12, 21).unwrap();
            assert!(traj.max_invariant_drift() < 1e-9);
            assert!(traj.max_constraint_drift() < 1e-8);
        }
    }
}
