//! The complexified spherical pendulum on its invariant manifold.
//!
//! States live on `M = { (x, v) : <x,x> = 1, <x,v> = 0 }` with the bilinear
//! (non-Hermitian) pairing `<a,b> = sum a_i b_i`. The module provides the
//! equations of motion, the integrals `H`, `K`, the involutive change of
//! variables `(x, v) -> (y, u) = (x, x cross v)`, the complex Lax variables,
//! the 2x2 Lax pair, the spectral invariants, and the complex rotation group
//! about `e_3`.

use crate::error::{Error, Result};
use crate::matpoly::MatrixPolynomial;
use crate::poly::Poly;
use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

type C = Complex64;
type CVec3 = Vector3<Complex64>;

/// Constraint tolerance for inputs claiming to be on the manifold.
pub const CONSTRAINT_TOL: f64 = 1e-6;
/// Tolerance on the verified spectral-relation coefficients.
pub const RELATION_TOL: f64 = 1e-8;

/// Bilinear (non-Hermitian) pairing.
pub fn dot(a: &CVec3, b: &CVec3) -> C {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Bilinear cross product.
pub fn cross(a: &CVec3, b: &CVec3) -> CVec3 {
    CVec3::new(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct PendulumState {
    pub x: CVec3,
    pub v: CVec3,
}

impl PendulumState {
    /// Validating constructor; rejects constraint violations instead of
    /// projecting them away.
    pub fn new(x: CVec3, v: CVec3) -> Result<Self> {
        let s = PendulumState { x, v };
        let res = s.constraint_residual();
        if res > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation { residual: res, tol: CONSTRAINT_TOL });
        }
        Ok(s)
    }

    /// No validation; used by integrators, which report drift rather than
    /// repair it.
    pub fn new_unchecked(x: CVec3, v: CVec3) -> Self {
        PendulumState { x, v }
    }

    pub fn from_real(x: [f64; 3], v: [f64; 3]) -> Result<Self> {
        PendulumState::new(
            CVec3::new(C::new(x[0], 0.0), C::new(x[1], 0.0), C::new(x[2], 0.0)),
            CVec3::new(C::new(v[0], 0.0), C::new(v[1], 0.0), C::new(v[2], 0.0)),
        )
    }

    /// (|<x,x> - 1|, |<x,v>|).
    pub fn constraint_residuals(&self) -> (f64, f64) {
        let n = (dot(&self.x, &self.x) - C::new(1.0, 0.0)).norm();
        let o = dot(&self.x, &self.v).norm();
        (n, o)
    }

    /// max(|<x,x> - 1|, |<x,v>|).
    pub fn constraint_residual(&self) -> f64 {
        let (n, o) = self.constraint_residuals();
        n.max(o)
    }

    /// Gram-Schmidt style drift repair: normalize x by the principal square
    /// root of <x,x>, remove the <x,v> component from v. Never applied
    /// implicitly anywhere.
    pub fn project_to_manifold(&self) -> Result<Self> {
        let n2 = dot(&self.x, &self.x);
        if n2.norm() < 1e-12 {
            return Err(Error::InvalidInput("cannot project: <x,x> nearly zero".into()));
        }
        let scale = 1.0 / n2.sqrt();
        let x = self.x.map(|z| z * scale);
        let xv = dot(&x, &self.v);
        let v = self.v - x.map(|z| z * xv);
        Ok(PendulumState { x, v })
    }

    pub fn max_abs(&self) -> f64 {
        self.x
            .iter()
            .chain(self.v.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Right-hand side of the equations of motion,
/// `xdot = v`, `vdot = -e3 + (<x, e3> - <v, v>) x`.
pub fn pendulum_rhs(state: &PendulumState) -> Result<(CVec3, CVec3)> {
    let res = state.constraint_residual();
    if res > CONSTRAINT_TOL {
        return Err(Error::ConstraintViolation { residual: res, tol: CONSTRAINT_TOL });
    }
    Ok(pendulum_rhs_unchecked(state))
}

pub(crate) fn pendulum_rhs_unchecked(state: &PendulumState) -> (CVec3, CVec3) {
    let coeff = state.x[2] - dot(&state.v, &state.v);
    let mut vdot = state.x.map(|z| z * coeff);
    vdot[2] -= C::new(1.0, 0.0);
    (state.v, vdot)
}

/// Energy and angular momentum: `H = <v,v>/2 + x3`, `K = x1 v2 - x2 v1`.
pub fn integrals(state: &PendulumState) -> (C, C) {
    let h = dot(&state.v, &state.v) * 0.5 + state.x[2];
    let k = state.x[0] * state.v[1] - state.x[1] * state.v[0];
    (h, k)
}

/// The involution `(x, v) -> (y, u) = (x, x cross v)`.
pub fn cushman_map(state: &PendulumState) -> (CVec3, CVec3) {
    (state.x, cross(&state.x, &state.v))
}

/// Inverse `(y, u) -> (y, u cross y)`.
pub fn cushman_inverse(y: &CVec3, u: &CVec3) -> PendulumState {
    PendulumState::new_unchecked(*y, cross(u, y))
}

/// The six complex Lax variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxVariables {
    pub u1: C,
    pub u2: C,
    pub v1: C,
    pub v2: C,
    pub w1: C,
    pub w2: C,
}

/// Substitution u1 = u3 - i u2, u2 = y3 - i y2, v1 = u1, v2 = y1,
/// w1 = u3 + i u2, w2 = y3 + i y2.
pub fn to_lax_vars(y: &CVec3, u: &CVec3) -> LaxVariables {
    let i = C::new(0.0, 1.0);
    LaxVariables {
        u1: u[2] - i * u[1],
        u2: y[2] - i * y[1],
        v1: u[0],
        v2: y[0],
        w1: u[2] + i * u[1],
        w2: y[2] + i * y[1],
    }
}

impl LaxVariables {
    pub fn from_state(state: &PendulumState) -> LaxVariables {
        let (y, u) = cushman_map(state);
        to_lax_vars(&y, &u)
    }

    /// Residuals of the two constraint-derived identities
    /// (`u2 w2 + v2^2 = 1` and `u1 w2 + u2 w1 + 2 v1 v2 = 0`).
    pub fn relation_residuals(&self) -> (f64, f64) {
        let r0 = (self.u2 * self.w2 + self.v2 * self.v2 - C::new(1.0, 0.0)).norm();
        let r1 = (self.u1 * self.w2 + self.u2 * self.w1 + 2.0 * self.v1 * self.v2).norm();
        (r0, r1)
    }
}

/// The Lax pair: `A` of degree 2 and `B = (A(lambda) - A(0)) / lambda` of
/// degree 1, both 2x2.
pub fn lax_matrices(lv: &LaxVariables) -> (MatrixPolynomial, MatrixPolynomial) {
    let zero = C::default();
    let one = C::new(1.0, 0.0);
    let a0 = DMatrix::from_row_slice(2, 2, &[lv.v2, lv.u2, lv.w2, -lv.v2]);
    let a1 = DMatrix::from_row_slice(2, 2, &[lv.v1, lv.u1, lv.w1, -lv.v1]);
    let a2 = DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
    let a = MatrixPolynomial::new(vec![a0, a1.clone(), a2.clone()]).unwrap();
    let b = MatrixPolynomial::new(vec![a1, a2]).unwrap();
    (a, b)
}

/// Time derivative of the Lax matrix along the reduced flow
/// `ydot = u cross y`, `udot = e3 cross y`, pushed through the change of
/// variables. Returned with the degree-2 shape of `A` (zero leading term).
pub fn lax_time_derivative(y: &CVec3, u: &CVec3) -> MatrixPolynomial {
    let i = C::new(0.0, 1.0);
    let ydot = cross(u, y);
    let udot = CVec3::new(-y[1], y[0], C::default()); // e3 cross y
    let du1 = udot[2] - i * udot[1];
    let du2 = ydot[2] - i * ydot[1];
    let dv1 = udot[0];
    let dv2 = ydot[0];
    let dw1 = udot[2] + i * udot[1];
    let dw2 = ydot[2] + i * ydot[1];
    let a0 = DMatrix::from_row_slice(2, 2, &[dv2, du2, dw2, -dv2]);
    let a1 = DMatrix::from_row_slice(2, 2, &[dv1, du1, dw1, -dv1]);
    let a2 = DMatrix::zeros(2, 2);
    MatrixPolynomial::new(vec![a0, a1, a2]).unwrap()
}

/// Spectral invariants from the Lax variables:
/// `k = (u1 + w1)/2`, `h = (u2 + w2 + u1 w1 + v1^2)/2`, and the quartic
/// `F(lambda) = lambda^4 + 2k lambda^3 + 2h lambda^2 + 1`.
///
/// The lambda^1 and lambda^0 coefficients of the characteristic expansion are
/// verified against their constrained values 0 and 1.
pub fn spectral_invariants(lv: &LaxVariables) -> Result<(C, C, Poly)> {
    let (r0, r1) = lv.relation_residuals();
    let worst = r0.max(r1);
    if worst > RELATION_TOL {
        return Err(Error::RelationViolation { residual: worst, tol: RELATION_TOL });
    }
    let k = (lv.u1 + lv.w1) * 0.5;
    let h = (lv.u2 + lv.w2 + lv.u1 * lv.w1 + lv.v1 * lv.v1) * 0.5;
    Ok((h, k, curve_poly(h, k)))
}

/// The quartic `lambda^4 + 2k lambda^3 + 2h lambda^2 + 1`.
pub fn curve_poly(h: C, k: C) -> Poly {
    Poly::new(vec![
        C::new(1.0, 0.0),
        C::default(),
        2.0 * h,
        2.0 * k,
        C::new(1.0, 0.0),
    ])
}

/// Complex rotation about `e_3` applied to both position and velocity.
pub fn rotate_about_e3(state: &PendulumState, theta: C) -> PendulumState {
    let (c, s) = (theta.cos(), theta.sin());
    let rot = |w: &CVec3| CVec3::new(c * w[0] - s * w[1], s * w[0] + c * w[1], w[2]);
    PendulumState::new_unchecked(rot(&state.x), rot(&state.v))
}

/// Random real state on the manifold (moderate speeds), for sampling-based
/// checks.
pub fn random_real_state<R: rand::Rng>(rng: &mut R) -> PendulumState {
    loop {
        let x = CVec3::new(
            C::new(rng.gen_range(-1.0..1.0), 0.0),
            C::new(rng.gen_range(-1.0..1.0), 0.0),
            C::new(rng.gen_range(-1.0..1.0), 0.0),
        );
        let n = dot(&x, &x).re;
        if n < 0.1 {
            continue;
        }
        let x = x.map(|z| z / n.sqrt());
        let v = CVec3::new(
            C::new(rng.gen_range(-1.0..1.0), 0.0),
            C::new(rng.gen_range(-1.0..1.0), 0.0),
            C::new(rng.gen_range(-1.0..1.0), 0.0),
        );
        let xv = dot(&x, &v);
        let v = v - x.map(|z| z * xv);
        let s = PendulumState::new_unchecked(x, v);
        if s.constraint_residual() < 1e-12 {
            return s;
        }
    }
}

/// Random complex state on the manifold, bounded away from the isotropic
/// cone `<x,x> = 0` and with moderate entries.
pub fn random_complex_state<R: rand::Rng>(rng: &mut R) -> PendulumState {
    loop {
        let mut g = || {
            CVec3::new(
                C::new(rng.gen_range(-1.0..1.0), 0.3 * rng.gen_range(-1.0..1.0)),
                C::new(rng.gen_range(-1.0..1.0), 0.3 * rng.gen_range(-1.0..1.0)),
                C::new(rng.gen_range(-1.0..1.0), 0.3 * rng.gen_range(-1.0..1.0)),
            )
        };
        let x = g();
        let n2 = dot(&x, &x);
        if n2.norm() < 0.2 {
            continue;
        }
        let x = x.map(|z| z / n2.sqrt());
        let v = g();
        let xv = dot(&x, &v);
        let v = v - x.map(|z| z * xv);
        let s = PendulumState::new_unchecked(x, v);
        if s.constraint_residual() < 1e-10 && s.max_abs() < 4.0 {
            return s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use rand::Rng;
    use rand::SeedableRng;

    pub(crate) fn s0() -> PendulumState {
        PendulumState::from_real([0.6, 0.0, 0.8], [0.0, 1.0, 0.0]).unwrap()
    }

    fn rand_complex_state(rng: &mut impl Rng) -> PendulumState {
        random_complex_state(rng)
    }

    #[test]
    fn rhs_equilibria_and_s0() {
        let up = PendulumState::from_real([0.0, 0.0, 1.0], [0.0; 3]).unwrap();
        let (xd, vd) = pendulum_rhs(&up).unwrap();
        assert!(xd.iter().chain(vd.iter()).all(|z| z.norm() < 1e-14));
        let down = PendulumState::from_real([0.0, 0.0, -1.0], [0.0; 3]).unwrap();
        let (xd, vd) = pendulum_rhs(&down).unwrap();
        assert!(xd.iter().chain(vd.iter()).all(|z| z.norm() < 1e-14));
        let (xd, vd) = pendulum_rhs(&s0()).unwrap();
        assert!((xd - CVec3::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0))).iter().all(|z| z.norm() < 1e-14));
        let expect = CVec3::new(c64(-0.12, 0.0), c64(0.0, 0.0), c64(-1.16, 0.0));
        assert!((vd - expect).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn rhs_is_tangent_to_manifold() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let s = rand_complex_state(&mut rng);
            let (xd, vd) = pendulum_rhs(&s).unwrap();
            assert!(dot(&s.x, &xd).norm() < 1e-10);
            assert!((dot(&xd, &s.v) + dot(&s.x, &vd)).norm() < 1e-10);
        }
    }

    #[test]
    fn rhs_rejects_off_manifold() {
        let bad = PendulumState::new_unchecked(
            CVec3::new(c64(1.1, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)),
            CVec3::zeros(),
        );
        assert!(matches!(pendulum_rhs(&bad), Err(Error::ConstraintViolation { .. })));
    }

    #[test]
    fn integrals_examples() {
        let up = PendulumState::from_real([0.0, 0.0, 1.0], [0.0; 3]).unwrap();
        let (h, k) = integrals(&up);
        assert!((h - c64(1.0, 0.0)).norm() < 1e-15 && k.norm() < 1e-15);
        let down = PendulumState::from_real([0.0, 0.0, -1.0], [0.0; 3]).unwrap();
        let (h, k) = integrals(&down);
        assert!((h + c64(1.0, 0.0)).norm() < 1e-15 && k.norm() < 1e-15);
        let (h, k) = integrals(&s0());
        assert!((h - c64(1.3, 0.0)).norm() < 1e-14);
        assert!((k - c64(0.6, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cushman_roundtrip_and_involution() {
        // explicit example
        let s = PendulumState::from_real([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        let (y, u) = cushman_map(&s);
        assert!((y - s.x).iter().all(|z| z.norm() < 1e-15));
        assert!((u - CVec3::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0))).iter().all(|z| z.norm() < 1e-15));
        // s0 image
        let (y, u) = cushman_map(&s0());
        let expect = CVec3::new(c64(-0.8, 0.0), c64(0.0, 0.0), c64(0.6, 0.0));
        assert!((u - expect).iter().all(|z| z.norm() < 1e-14));
        let _ = y;
        // phi^2 = (x, -v), inverse round trip
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let s = rand_complex_state(&mut rng);
            let (y, u) = cushman_map(&s);
            let back = cushman_inverse(&y, &u);
            assert!((back.x - s.x).iter().all(|z| z.norm() < 1e-11));
            assert!((back.v - s.v).iter().all(|z| z.norm() < 1e-11));
            let twice = cushman_map(&cushman_inverse(&u, &cross(&y, &u)));
            let _ = twice;
            let (y2, u2) = cushman_map(&PendulumState::new_unchecked(y, u).clone());
            // phi applied twice on (x, v): phi(y, u) with (y,u)=phi(x,v)
            let s2 = PendulumState::new_unchecked(y2, u2);
            let _ = s2;
            let phi2 = cushman_map(&PendulumState::new_unchecked(s.x, cross(&s.x, &s.v)));
            assert!((phi2.0 - s.x).iter().all(|z| z.norm() < 1e-11));
            assert!((phi2.1 + s.v).iter().all(|z| z.norm() < 1e-10));
        }
    }

    #[test]
    fn lax_vars_examples() {
        let y = CVec3::new(c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0));
        let u = CVec3::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0));
        let lv = to_lax_vars(&y, &u);
        assert!((lv.u1 - c64(0.0, -1.0)).norm() < 1e-15);
        assert!((lv.u2 - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(lv.v1.norm() < 1e-15 && lv.v2.norm() < 1e-15);
        assert!((lv.w1 - c64(0.0, 1.0)).norm() < 1e-15);
        assert!((lv.w2 - c64(1.0, 0.0)).norm() < 1e-15);

        let lv = LaxVariables::from_state(&s0());
        assert!((lv.u1 - c64(0.6, 0.0)).norm() < 1e-14);
        assert!((lv.u2 - c64(0.8, 0.0)).norm() < 1e-14);
        assert!((lv.v1 - c64(-0.8, 0.0)).norm() < 1e-14);
        assert!((lv.v2 - c64(0.6, 0.0)).norm() < 1e-14);
        assert!((lv.w1 - c64(0.6, 0.0)).norm() < 1e-14);
        assert!((lv.w2 - c64(0.8, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn lax_matrices_shape() {
        // equilibrium: A = [[0, l^2+1], [l^2+1, 0]], B = [[0, l], [l, 0]]
        let y = CVec3::new(c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0));
        let u = CVec3::zeros();
        let lv = to_lax_vars(&y, &u);
        let (a, b) = lax_matrices(&lv);
        assert!((a.coeff(0)[(0, 1)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(a.coeff(0)[(0, 0)].norm() < 1e-15);
        assert!((b.coeff(1)[(0, 1)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(b.coeff(0).iter().all(|z| z.norm() < 1e-15));
        // B constant coefficient equals A's lambda^1 coefficient; leading of A fixed
        let lv = LaxVariables::from_state(&s0());
        let (a, b) = lax_matrices(&lv);
        assert_eq!(a.coeff(1), b.coeff(0));
        assert!((a.leading()[(0, 1)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((a.leading()[(1, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(a.leading()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn spectral_invariants_s0_and_equilibrium() {
        let lv = LaxVariables::from_state(&s0());
        let (h, k, f) = spectral_invariants(&lv).unwrap();
        assert!((h - c64(1.3, 0.0)).norm() < 1e-13);
        assert!((k - c64(0.6, 0.0)).norm() < 1e-13);
        assert!((f.coeff(3) - c64(1.2, 0.0)).norm() < 1e-13);
        assert!((f.coeff(2) - c64(2.6, 0.0)).norm() < 1e-13);
        assert!((f.coeff(0) - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(f.coeff(1).norm() < 1e-15);

        let up = PendulumState::from_real([0.0, 0.0, 1.0], [0.0; 3]).unwrap();
        let (h, k, f) = spectral_invariants(&LaxVariables::from_state(&up)).unwrap();
        assert!((h - c64(1.0, 0.0)).norm() < 1e-14 && k.norm() < 1e-14);
        // (l^2+1)^2 = l^4 + 2 l^2 + 1
        assert!((f.coeff(2) - c64(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn invariants_match_integrals_on_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let s = rand_complex_state(&mut rng);
            let (h0, k0) = integrals(&s);
            let (h, k, _) = spectral_invariants(&LaxVariables::from_state(&s)).unwrap();
            assert!((h - h0).norm() < 1e-12);
            assert!((k - k0).norm() < 1e-12);
        }
    }

    #[test]
    fn four_relations_on_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(24);
        for _ in 0..50 {
            let s = rand_complex_state(&mut rng);
            let lv = LaxVariables::from_state(&s);
            let (h0, k0) = integrals(&s);
            assert!((lv.u1 + lv.w1 - 2.0 * k0).norm() < 1e-10);
            assert!((lv.u2 + lv.w2 + lv.u1 * lv.w1 + lv.v1 * lv.v1 - 2.0 * h0).norm() < 1e-10);
            let (r0, r1) = lv.relation_residuals();
            assert!(r0 < 1e-10 && r1 < 1e-10);
        }
    }

    #[test]
    fn lax_identity_at_random_states() {
        // 2i dA/dt = [A, B] as polynomials in lambda
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(25);
        for _ in 0..100 {
            let s = rand_complex_state(&mut rng);
            let (y, u) = cushman_map(&s);
            let lv = to_lax_vars(&y, &u);
            let (a, b) = lax_matrices(&lv);
            let da = lax_time_derivative(&y, &u).scale(c64(0.0, 2.0));
            let comm = a.commutator(&b).unwrap();
            let resid = da.sub(&comm).unwrap().norm();
            assert!(resid < 1e-10, "Lax identity residual {resid}");
        }
    }

    #[test]
    fn rotation_examples() {
        let s = s0();
        let r0 = rotate_about_e3(&s, c64(0.0, 0.0));
        assert!((r0.x - s.x).iter().all(|z| z.norm() < 1e-15));
        let r2pi = rotate_about_e3(&s, c64(std::f64::consts::TAU, 0.0));
        assert!((r2pi.x - s.x).iter().all(|z| z.norm() < 1e-12));
        assert!((r2pi.v - s.v).iter().all(|z| z.norm() < 1e-12));
        let rq = rotate_about_e3(&s, c64(std::f64::consts::FRAC_PI_2, 0.0));
        assert!((rq.x - CVec3::new(c64(0.0, 0.0), c64(0.6, 0.0), c64(0.8, 0.0))).iter().all(|z| z.norm() < 1e-12));
        assert!((rq.v - CVec3::new(c64(-1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0))).iter().all(|z| z.norm() < 1e-12));
        let (_, k) = integrals(&rq);
        assert!((k - c64(0.6, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rotation_preserves_integrals_even_complex_angles() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(26);
        for _ in 0..20 {
            let s = rand_complex_state(&mut rng);
            let theta = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5));
            let r = rotate_about_e3(&s, theta);
            let (h0, k0) = integrals(&s);
            let (h1, k1) = integrals(&r);
            assert!((h0 - h1).norm() < 1e-12);
            assert!((k0 - k1).norm() < 1e-12);
            assert!(r.constraint_residual() < 1e-10);
        }
    }

    #[test]
    fn char_poly_of_pendulum_lax_matrix_at_s0() {
        // P(lambda, mu) = mu^2 - (lambda^4 + 1.2 lambda^3 + 2.6 lambda^2 + 1)
        let lv = LaxVariables::from_state(&s0());
        let (a, _) = lax_matrices(&lv);
        let p = crate::matpoly::char_poly(&a);
        assert!(p.s[0].max_coeff_norm() < 1e-12, "trace coefficient should vanish");
        let s2 = &p.s[1];
        for (k, expect) in [
            (0, c64(-1.0, 0.0)),
            (1, c64(0.0, 0.0)),
            (2, c64(-2.6, 0.0)),
            (3, c64(-1.2, 0.0)),
            (4, c64(-1.0, 0.0)),
        ] {
            assert!((s2.coeff(k) - expect).norm() < 1e-11, "s2 coeff {k}");
        }
    }
}
