//! The acceptance checks, runnable as a library call (and surfaced by the
//! CLI `selftest` command).
//!
//! Every tolerance below is pinned to the contract it verifies; the checks
//! print one pass/fail line each through [`format_table`].

use crate::curves::{
    extended_lattice, periods, periods_agm, reciprocity_residual, CycleSpec, ExtendedLattice,
    QuarticCurve,
};
use crate::error::Error;
use crate::flows;
use crate::jacobian::{
    self, extension_projection, group_action_shift, lattices_equal, model_lattice,
    reduce_mod_lattice, ExtendedAbelPoint,
};
use crate::matpoly::MatrixPolynomial;
use crate::monodromy::{self, LoopSpec};
use crate::pendulum::{self, LaxVariables, PendulumState};
use crate::{c64, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

type C = Complex64;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub elapsed_s: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} ({:24}): {} [{:7.2}s] {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed_s,
            self.details
        )
    }
}

pub fn format_table(reports: &[CriterionReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&r.line());
        out.push('\n');
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", reports.len()));
    out
}

fn s0() -> PendulumState {
    PendulumState::from_real([0.6, 0.0, 0.8], [0.0, 1.0, 0.0]).unwrap()
}

fn finish(
    id: usize,
    name: &'static str,
    start: Instant,
    outcome: Result<(bool, String)>,
) -> CriterionReport {
    let elapsed_s = start.elapsed().as_secs_f64();
    match outcome {
        Ok((passed, details)) => CriterionReport { id, name, passed, details, elapsed_s },
        Err(e) => CriterionReport {
            id,
            name,
            passed: false,
            details: format!("error: {e}"),
            elapsed_s,
        },
    }
}

/// Criterion 1: conservation of H and K along 20 random real trajectories
/// over t in [0, 20] at tol 1e-12, drift below 1e-9, under 30 s.
pub fn criterion_1(seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0_01);
        let mut worst: f64 = 0.0;
        let mut worst_constraint: f64 = 0.0;
        for _ in 0..20 {
            let state = pendulum::random_real_state(&mut rng);
            let traj = flows::integrate_pendulum(&state, 20.0, 1e-12, 41)?;
            worst = worst.max(traj.max_invariant_drift());
            worst_constraint = worst_constraint.max(traj.max_constraint_drift());
        }
        let in_time = start.elapsed().as_secs_f64() < 30.0;
        let ok = worst < 1e-9 && worst_constraint < 1e-8 && in_time;
        Ok((
            ok,
            format!("max |H,K| drift {worst:.2e} (< 1e-9), constraint drift {worst_constraint:.2e} (< 1e-8)"),
        ))
    };
    finish(1, "conservation", start, run())
}

/// Criterion 2: the Lax identity 2i dA/dt = [A, B] at 100 random constrained
/// states, residual below 1e-10.
pub fn criterion_2(seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0_02);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let state = pendulum::random_complex_state(&mut rng);
            let (y, u) = pendulum::cushman_map(&state);
            let lv = pendulum::to_lax_vars(&y, &u);
            let (a, b) = pendulum::lax_matrices(&lv);
            let da = pendulum::lax_time_derivative(&y, &u).scale(c64(0.0, 2.0));
            let resid = da.sub(&a.commutator(&b)?)?.norm();
            worst = worst.max(resid);
        }
        let in_time = start.elapsed().as_secs_f64() < 1.0;
        Ok((worst < 1e-10 && in_time, format!("max residual {worst:.2e} (< 1e-10)")))
    };
    finish(2, "lax identity", start, run())
}

/// Criterion 3: the four invariant relations at 1000 random constrained
/// states below 1e-10, and (h, k) from the Lax variables matching (H, K)
/// below 1e-12.
pub fn criterion_3(seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0_03);
        let mut worst_rel: f64 = 0.0;
        let mut worst_hk: f64 = 0.0;
        for _ in 0..1000 {
            let state = pendulum::random_complex_state(&mut rng);
            let (h0, k0) = pendulum::integrals(&state);
            let lv = LaxVariables::from_state(&state);
            let r1 = (lv.u1 + lv.w1 - 2.0 * k0).norm();
            let r2 = (lv.u2 + lv.w2 + lv.u1 * lv.w1 + lv.v1 * lv.v1 - 2.0 * h0).norm();
            let (r4, r3) = lv.relation_residuals();
            worst_rel = worst_rel.max(r1).max(r2).max(r3).max(r4);
            let (h, k, _) = pendulum::spectral_invariants(&lv)?;
            worst_hk = worst_hk.max((h - h0).norm()).max((k - k0).norm());
        }
        Ok((
            worst_rel < 1e-10 && worst_hk < 1e-12,
            format!("relations {worst_rel:.2e} (< 1e-10), h/k match {worst_hk:.2e} (< 1e-12)"),
        ))
    };
    finish(3, "invariant relations", start, run())
}

/// Criterion 4: spectral-coefficient drift along Lax trajectories of length
/// 10 below 1e-9.
pub fn criterion_4(seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0_04);
        let mut worst: f64 = 0.0;
        // pendulum Lax matrices along the ray equivalent to real pendulum
        // time in [0, 20]
        for state in [s0(), pendulum::random_real_state(&mut rng)] {
            let (a0, _) = pendulum::lax_matrices(&LaxVariables::from_state(&state));
            let traj = flows::integrate_lax(&a0, 1, C::default(), c64(0.0, -10.0), 1e-12, 21)?;
            worst = worst.max(flows::isospectral_deviation(&traj));
        }
        // generic bounded flow: leading term with imaginary spectrum
        let one = c64(1.0, 0.0);
        let j = DMatrix::from_row_slice(2, 2, &[c64(0.0, 1.0), C::default(), C::default(), c64(0.0, -1.0)]);
        let a0 = MatrixPolynomial::new(vec![
            DMatrix::from_fn(2, 2, |_, _| c64(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))),
            j,
        ])?;
        let traj = flows::integrate_lax(&a0, 1, c64(0.2, 0.0), c64(10.0, 0.0), 1e-12, 21)?;
        worst = worst.max(flows::isospectral_deviation(&traj));
        // diagonal family stays exactly put
        let diag = MatrixPolynomial::new(vec![
            DMatrix::from_row_slice(2, 2, &[c64(0.3, 0.1), C::default(), C::default(), c64(-0.2, 0.4)]),
            DMatrix::from_row_slice(2, 2, &[one, C::default(), C::default(), c64(2.0, 0.0)]),
        ])?;
        let traj = flows::integrate_lax(&diag, 2, c64(0.5, 0.0), c64(10.0, 0.0), 1e-12, 21)?;
        worst = worst.max(flows::isospectral_deviation(&traj));
        Ok((worst < 1e-9, format!("max coefficient drift {worst:.2e} (< 1e-9)")))
    };
    finish(4, "isospectrality", start, run())
}

/// Criterion 5: contour periods against the AGM oracle (relative 1e-9) and
/// the third-kind reciprocity identity (1e-7) on 50 random smooth curves
/// with branch separation above 0.05.
pub fn criterion_5(seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0_05);
        let mut done = 0usize;
        let mut attempts = 0usize;
        let mut worst_agm: f64 = 0.0;
        let mut worst_rec: f64 = 0.0;
        while done < 50 {
            attempts += 1;
            if attempts > 1000 {
                return Ok((false, "could not collect 50 admissible random curves".into()));
            }
            let h = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let k = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let curve = match QuarticCurve::from_hk(h, k) {
                Ok(c) if !c.is_singular() && c.min_branch_separation() > 0.05 => c,
                _ => continue,
            };
            let pd = match periods(&curve, CycleSpec::default()) {
                Ok(pd) => pd,
                Err(Error::ContourTooClose(_)) => continue,
                Err(e) => return Err(e),
            };
            let (agm_a, agm_b) = periods_agm(&curve)?;
            let ea = (pd.omega_a - agm_a).norm().min((pd.omega_a + agm_a).norm()) / agm_a.norm();
            let eb = (pd.omega_b - agm_b).norm().min((pd.omega_b + agm_b).norm()) / agm_b.norm();
            worst_agm = worst_agm.max(ea).max(eb);
            worst_rec = worst_rec.max(reciprocity_residual(&curve, &pd)?);
            done += 1;
        }
        Ok((
            worst_agm < 1e-9 && worst_rec < 1e-7,
            format!("AGM rel err {worst_agm:.2e} (< 1e-9), reciprocity {worst_rec:.2e} (< 1e-7), {attempts} draws"),
        ))
    };
    finish(5, "period oracle", start, run())
}

/// Criterion 6: rank-3 extended lattice with the exact residue generator,
/// and the model lattice with its projection structure.
pub fn criterion_6(_seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let curve = QuarticCurve::from_hk(c64(1.3, 0.0), c64(0.6, 0.0))?;
        let lat = extended_lattice(&curve)?;
        let sv = lat.min_singular_value();
        let g3_exact = lat.g[2] == ExtendedLattice::residue_generator();
        // model example: rank 3 at (tau1, tau2) = (i, 1 + i)
        let ml = model_lattice(c64(0.0, 1.0), c64(1.0, 1.0))?;
        let model_rank = ml.min_singular_value() > 1e-8;
        // projection image lattice = 2 pi i Z + tau1 Z at generic tau
        let tau1 = c64(0.8, 1.1);
        let tau2 = c64(-0.4, 0.7);
        let ml2 = model_lattice(tau1, tau2)?;
        let tau = c64(0.0, std::f64::consts::TAU);
        let proj_ok = lattices_equal(ml2.sublattice(), (tau, tau1), 1e-10).is_some();
        // swap: the second projection of (tau1, tau2) matches the first of
        // (tau2, tau1)
        let ml_swapped = model_lattice(tau2, tau1)?;
        let swap_ok =
            lattices_equal((ml2.g[1][1], ml2.g[2][1]), ml_swapped.sublattice(), 1e-10).is_some();
        // projection is invariant under the group action
        let p = ExtendedAbelPoint::new([c64(0.31, -0.7), c64(1.4, 0.2)], ml2.clone());
        let shifted = group_action_shift(&p, c64(0.123, 4.56));
        let inv = (extension_projection(&p) - extension_projection(&shifted)).norm();
        // reduction is idempotent
        let (r1, _) = reduce_mod_lattice(p.z, &ml2)?;
        let (r2, m2) = reduce_mod_lattice(r1, &ml2)?;
        let idem = m2 == [0, 0, 0] && (r1[0] - r2[0]).norm() + (r1[1] - r2[1]).norm() < 1e-12;
        let ok = sv > 1e-8 && g3_exact && model_rank && proj_ok && swap_ok && inv < 1e-12 && idem;
        Ok((
            ok,
            format!(
                "min sv {sv:.2e} (> 1e-8), g3 exact: {g3_exact}, model rank-3: {model_rank}, projection: {proj_ok}, swap: {swap_ok}, action-invariance {inv:.1e}"
            ),
        ))
    };
    finish(6, "extended lattice", start, run())
}

/// Criterion 7: linearization of the S0 trajectory on the generalized
/// Jacobian (residual < 1e-6 over 200 samples on [0, 5]) and the rotation
/// flow moving only the fiber coordinate (< 1e-7), under 60 s.
pub fn criterion_7(_seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let (fit, curve, pd) = jacobian::abel_flow_linearity(&s0(), 5.0, 1e-12, 200)?;
        let rot = jacobian::rotation_flow_fit(&s0(), &curve, &pd, 1.0, 40)?;
        let v1 = rot.velocity[0].norm();
        // the two flows span independent directions: smallest singular value
        // of the real 4x2 velocity matrix
        let a = nalgebra::DMatrix::<f64>::from_columns(&[
            nalgebra::DVector::from_vec(vec![
                fit.velocity[0].re,
                fit.velocity[0].im,
                fit.velocity[1].re,
                fit.velocity[1].im,
            ]),
            nalgebra::DVector::from_vec(vec![
                rot.velocity[0].re,
                rot.velocity[0].im,
                rot.velocity[1].re,
                rot.velocity[1].im,
            ]),
        ]);
        let sv = a.svd(false, false).singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let in_time = start.elapsed().as_secs_f64() < 60.0;
        let ok = fit.residual < 1e-6 && v1 < 1e-7 && sv > 1e-6 && in_time;
        Ok((
            ok,
            format!(
                "fit residual {:.2e} (< 1e-6), rotation |V_1| {v1:.2e} (< 1e-7), velocity rank sv {sv:.2e} (> 1e-6)",
                fit.residual
            ),
        ))
    };
    finish(7, "linearization", start, run())
}

/// Criterion 8: bundle equivariance under rotation: base-point invariance
/// below 1e-6 and fiber shift linear in theta to 1e-6.
pub fn criterion_8(_seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let state = s0();
        let lv = LaxVariables::from_state(&state);
        let (h, k, _) = pendulum::spectral_invariants(&lv)?;
        let curve = QuarticCurve::from_hk(h, k)?;
        let pd = periods(&curve, CycleSpec::default())?;
        let mut worst_z1: f64 = 0.0;
        let mut shifts = Vec::new();
        for theta in [0.3, 0.7, 1.1] {
            let (dz1, dz2) = jacobian::symmetry_equivariance(&state, theta, &curve, &pd)?;
            worst_z1 = worst_z1.max(dz1);
            shifts.push((theta, dz2));
        }
        // theta = 0 gives (0, 0)
        let (z1_0, z2_0) = jacobian::symmetry_equivariance(&state, 0.0, &curve, &pd)?;
        // linearity: dz2(2 theta) - 2 dz2(theta) = 0 mod 2 pi i
        let (_, dz2_a) = jacobian::symmetry_equivariance(&state, 0.3, &curve, &pd)?;
        let (_, dz2_b) = jacobian::symmetry_equivariance(&state, 0.6, &curve, &pd)?;
        let tau = std::f64::consts::TAU;
        let mut lin = dz2_b - dz2_a * 2.0;
        lin -= c64(0.0, tau) * (lin.im / tau).round();
        let ok = worst_z1 < 1e-6
            && z1_0 < 1e-9
            && z2_0.norm() < 1e-9
            && lin.norm() < 1e-6;
        Ok((
            ok,
            format!(
                "max |dz1| {worst_z1:.2e} (< 1e-6), identity at 0: {:.1e}, fiber linearity {:.2e} (< 1e-6)",
                z1_0.max(z2_0.norm()),
                lin.norm()
            ),
        ))
    };
    finish(8, "bundle equivariance", start, run())
}

/// Criterion 9: monodromy of the homology bundle around (1, 0).
///
/// The continuation yields an integer matrix stable under step doubling and
/// radius change, with det 1, trace 2, (M - I)^2 = 0, M_ext fixing g3 and
/// block-compatible with M. The criterion additionally demands M != I for
/// the action on the ordinary period lattice; the measured action there is
/// the identity — the twist sits in the extension row (g2 -> g2 +- g3),
/// which is the classical monodromy matrix on the real-torus homology — so
/// that single clause fails and is reported honestly.
pub fn criterion_9(_seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let base = monodromy::continue_periods(&LoopSpec::new((1.0, 0.0), 0.3, 64, 1)?)?;
        let doubled = monodromy::continue_periods(&LoopSpec::new((1.0, 0.0), 0.3, 128, 1)?)?;
        let smaller = monodromy::continue_periods(&LoopSpec::new((1.0, 0.0), 0.2, 64, 1)?)?;
        let stable = base.m_ext == doubled.m_ext && base.m_ext == smaller.m_ext;
        let det_ok = base.det2() == 1;
        let trace_ok = base.trace2() == 2;
        let unipotent = base.unipotency_defect() == [[0, 0], [0, 0]];
        let fixes_g3 = (0..3).all(|i| base.m_ext[i][2] == i64::from(i == 2));
        let block_ok = base.m == [[base.m_ext[0][0], base.m_ext[0][1]], [base.m_ext[1][0], base.m_ext[1][1]]];
        let resid_ok = base.continuation_residual < 1e-6;
        let not_identity = !base.is_identity2();
        let ext_twist = base.m_ext[2][1].abs() == 1;
        let in_time = start.elapsed().as_secs_f64() < 120.0;
        let ok = stable && det_ok && trace_ok && unipotent && fixes_g3 && block_ok && resid_ok && not_identity && in_time;
        Ok((
            ok,
            format!(
                "M = {:?}, M_ext = {:?}, residual {:.1e}; stable: {stable}, det 1: {det_ok}, trace 2: {trace_ok}, (M-I)^2 = 0: {unipotent}, fixes g3: {fixes_g3}, block-compatible: {block_ok}, M != I: {not_identity} (extension twist g2 -> g2 + ({})g3 carries the unit monodromy: {ext_twist})",
                base.m, base.m_ext, base.continuation_residual, base.m_ext[2][1]
            ),
        ))
    };
    finish(9, "monodromy", start, run())
}

/// Criterion 10: nondegeneracy of the frequency map at (1.3, 0.6) and on a
/// surrounding 3x3 grid, plus the rotation-number cross-check against the
/// direct dynamical measurement (1e-4).
pub fn criterion_10(_seed: u64) -> CriterionReport {
    let start = Instant::now();
    let run = || {
        let mut min_det = f64::INFINITY;
        for dh in [-0.06, 0.0, 0.06] {
            for dk in [-0.06, 0.0, 0.06] {
                let (_, det) = monodromy::frequency_jacobian(1.3 + dh, 0.6 + dk, 0.02)?;
                min_det = min_det.min(det.abs());
            }
        }
        let fd = monodromy::frequency_data(1.3, 0.6)?;
        let (t_rad, dphi) = monodromy::poincare_rotation_number(1.3, 0.6)?;
        let tau = std::f64::consts::TAU;
        let mut angle_err = (dphi - fd.delta_phi).rem_euclid(tau);
        angle_err = angle_err.min(tau - angle_err);
        let t_err = (t_rad - fd.t_radial).abs();
        let ok = min_det > 1e-6 && angle_err < 1e-4 && t_err < 1e-4;
        Ok((
            ok,
            format!(
                "min |det J| on grid {min_det:.2e} (> 1e-6), rotation-number mismatch {angle_err:.2e} (< 1e-4), radial-period mismatch {t_err:.2e}"
            ),
        ))
    };
    finish(10, "frequency map", start, run())
}

/// Runs all ten acceptance checks.
pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    vec![
        criterion_1(seed),
        criterion_2(seed),
        criterion_3(seed),
        criterion_4(seed),
        criterion_5(seed),
        criterion_6(seed),
        criterion_7(seed),
        criterion_8(seed),
        criterion_9(seed),
        criterion_10(seed),
    ]
}
