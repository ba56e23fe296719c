//! Cross-module geometric checks that exercise the public surface end to
//! end: functoriality of the monodromy continuation, base-point independence
//! of flow fits, and the transvection picture over complex loops.

use laxjac::c64;
use laxjac::curves::{periods, CycleSpec, QuarticCurve};
use laxjac::jacobian;
use laxjac::monodromy::{continue_periods, continue_periods_path_complex, LoopSpec};
use laxjac::pendulum::PendulumState;
use num_complex::Complex64;

fn s0() -> PendulumState {
    PendulumState::from_real([0.6, 0.0, 0.8], [0.0, 1.0, 0.0]).unwrap()
}

#[test]
fn monodromy_reversal_gives_the_inverse() {
    let fwd = continue_periods(&LoopSpec::new((1.0, 0.0), 0.3, 64, 1).unwrap()).unwrap();
    let rev = continue_periods(&LoopSpec::new((1.0, 0.0), 0.3, 64, -1).unwrap()).unwrap();
    let prod = fwd.compose_after(&rev);
    assert_eq!(prod.m_ext, [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "M_rev * M_fwd != I");
}

#[test]
fn monodromy_concatenation_composes() {
    // the doubled loop equals the square of the single loop
    let single = continue_periods(&LoopSpec::new((1.0, 0.0), 0.3, 64, 1).unwrap()).unwrap();
    let mut doubled_path = LoopSpec::new((1.0, 0.0), 0.3, 64, 1).unwrap().path();
    let second = LoopSpec::new((1.0, 0.0), 0.3, 64, 1).unwrap().path();
    doubled_path.extend_from_slice(&second[1..]);
    let doubled = laxjac::monodromy::continue_periods_path(&doubled_path).unwrap();
    assert_eq!(doubled.m_ext, single.compose_after(&single).m_ext);
}

#[test]
fn complex_loop_around_simple_zero_is_a_transvection() {
    // a simple discriminant zero at fixed k (double root of the quartic at
    // s = 1.2), encircled in the complex h-plane
    let s = 1.2f64;
    let kd = (1.0 - s.powi(4)) / s.powi(3);
    let hd = -s * s - 1.5 * kd * s;
    let n = 64;
    let pts: Vec<(Complex64, Complex64)> = (0..=n)
        .map(|i| {
            let ang = std::f64::consts::TAU * i as f64 / n as f64;
            (c64(hd, 0.0) + Complex64::from_polar(0.05, ang), c64(kd, 0.0))
        })
        .collect();
    let m = continue_periods_path_complex(&pts).unwrap();
    assert_eq!(m.det2(), 1);
    assert_eq!(m.trace2(), 2);
    assert!(!m.is_identity2(), "a simple zero must twist the ordinary lattice");
    assert_eq!(m.unipotency_defect(), [[0, 0], [0, 0]]);
    assert!(m.continuation_residual < 1e-6);
}

#[test]
fn abel_fit_velocity_is_base_point_independent() {
    let traj = laxjac::flows::integrate_pendulum(&s0(), 4.0, 1e-12, 120).unwrap();
    let curve = QuarticCurve::from_hk(c64(1.3, 0.0), c64(0.6, 0.0)).unwrap();
    let pd = periods(&curve, CycleSpec::default()).unwrap();
    let b = curve.branch_points();
    let centroid = (b[0] + b[1] + b[2] + b[3]) / 4.0;
    let mk = |z: Complex64| {
        laxjac::curves::DivisorPoint::new(&curve, z, laxjac::curves::canonical_sqrt(curve.f().eval(z)))
    };
    let base1 = mk(centroid + c64(3.0, 1.0));
    let base2 = mk(centroid + c64(-2.0, -2.5));
    let f1 = jacobian::abel_flow_fit_with_base(&traj, &curve, &pd, &base1).unwrap();
    let f2 = jacobian::abel_flow_fit_with_base(&traj, &curve, &pd, &base2).unwrap();
    let dv = (f1.velocity[0] - f2.velocity[0])
        .norm()
        .max((f1.velocity[1] - f2.velocity[1]).norm());
    assert!(dv < 1e-7, "velocities differ across base points by {dv}");
    let dz = (f1.intercept[0] - f2.intercept[0]).norm();
    assert!(dz > 1e-3, "intercepts should differ across base points");
}

#[test]
fn rotation_only_trajectory_moves_the_fiber() {
    let curve = QuarticCurve::from_hk(c64(1.3, 0.0), c64(0.6, 0.0)).unwrap();
    let pd = periods(&curve, CycleSpec::default()).unwrap();
    let fit = jacobian::rotation_flow_fit(&s0(), &curve, &pd, 1.0, 32).unwrap();
    assert!(fit.velocity[0].norm() < 1e-7);
    assert!(fit.velocity[1].norm() > 1e-3);
    assert!(fit.residual < 1e-6);
}

#[test]
fn equivariance_vanishes_at_zero_angle() {
    let curve = QuarticCurve::from_hk(c64(1.3, 0.0), c64(0.6, 0.0)).unwrap();
    let pd = periods(&curve, CycleSpec::default()).unwrap();
    let (dz1, dz2) = jacobian::symmetry_equivariance(&s0(), 0.0, &curve, &pd).unwrap();
    assert!(dz1 < 1e-12);
    assert!(dz2.norm() < 1e-12);
}
