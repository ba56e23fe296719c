//! Lattice-quotient arithmetic on the generalized Jacobian and the
//! linearization experiments on top of it.
//!
//! Points live in C^2 modulo the rank-3 extended lattice. The extension
//! structure is the projection to the first coordinate modulo the ordinary
//! rank-2 lattice; the group action shifts the second coordinate only. Flow
//! fits pull trajectories through the eigenvector divisor and the extended
//! Abel map and check that time evolution is a straight line.

use crate::curves::{
    abel_map_extended, eigenvector_divisor, periods, CycleSpec, DivisorPoint, ExtendedLattice,
    PeriodData, QuarticCurve,
};
use crate::error::{Error, Result};
use crate::flows::Trajectory;
use crate::pendulum::{self, LaxVariables, PendulumState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

type C = Complex64;

/// Minimal acceptable smallest singular value of the 4x3 real generator
/// matrix for rank-3 lattices.
pub const LATTICE_RANK_TOL: f64 = 1e-8;

/// Unwrap jumps larger than this fraction of the shortest lattice vector
/// trigger resampling.
pub const UNWRAP_JUMP_FRACTION: f64 = 0.4;

/// A point of C^2 together with the lattice it is reduced against.
#[derive(Debug, Clone)]
pub struct ExtendedAbelPoint {
    pub z: [C; 2],
    pub lattice: ExtendedLattice,
}

impl ExtendedAbelPoint {
    pub fn new(z: [C; 2], lattice: ExtendedLattice) -> Self {
        ExtendedAbelPoint { z, lattice }
    }
}

fn as_real4(z: [C; 2]) -> DVector<f64> {
    DVector::from_vec(vec![z[0].re, z[0].im, z[1].re, z[1].im])
}

/// The real 4x4 system [g1 g2 g3 n] with n a unit vector completing the
/// span, LU-factored; errors on rank deficiency.
fn lattice_solver(l: &ExtendedLattice) -> Result<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    let b3 = l.basis_matrix();
    let svd = b3.clone().svd(true, false);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin < LATTICE_RANK_TOL {
        return Err(Error::RankDeficientLattice { sv: smin });
    }
    // complete the basis with the unit normal of the generator span: pick the
    // coordinate vector with the largest residual after projecting out the
    // (thin) left singular directions
    let u = svd.u.as_ref().unwrap();
    let mut best = DVector::<f64>::zeros(4);
    let mut best_norm = -1.0;
    for i in 0..4 {
        let mut e = DVector::<f64>::zeros(4);
        e[i] = 1.0;
        for j in 0..3 {
            let col = u.column(j);
            let dot = col.dot(&e);
            e -= col * dot;
        }
        let n = e.norm();
        if n > best_norm {
            best_norm = n;
            best = e;
        }
    }
    best /= best_norm;
    let mut b4 = DMatrix::<f64>::zeros(4, 4);
    for i in 0..4 {
        for j in 0..3 {
            b4[(i, j)] = b3[(i, j)];
        }
        b4[(i, 3)] = best[i];
    }
    Ok(b4.lu())
}

/// Real coefficients of z along (g1, g2, g3, n).
fn lattice_coefficients(z: [C; 2], l: &ExtendedLattice) -> Result<[f64; 4]> {
    let lu = lattice_solver(l)?;
    let c = lu
        .solve(&as_real4(z))
        .ok_or(Error::RankDeficientLattice { sv: 0.0 })?;
    Ok([c[0], c[1], c[2], c[3]])
}

fn combine(l: &ExtendedLattice, m: [i64; 3]) -> [C; 2] {
    let mut out = [C::default(); 2];
    for c in 0..2 {
        out[c] = l.g[0][c] * m[0] as f64 + l.g[1][c] * m[1] as f64 + l.g[2][c] * m[2] as f64;
    }
    out
}

/// Round so the remaining coefficient lies in (-1/2, 1/2]; exact halves stay.
fn round_half_down(c: f64) -> i64 {
    (c - 0.5).ceil() as i64
}

/// Reduces `z` to the nearest-cell representative: lattice coefficients in
/// (-1/2, 1/2], the fourth real direction untouched. Returns the subtracted
/// integer coefficients.
pub fn reduce_mod_lattice(z: [C; 2], l: &ExtendedLattice) -> Result<([C; 2], [i64; 3])> {
    let c = lattice_coefficients(z, l)?;
    let m = [round_half_down(c[0]), round_half_down(c[1]), round_half_down(c[2])];
    let sub = combine(l, m);
    Ok(([z[0] - sub[0], z[1] - sub[1]], m))
}

/// Reduces `z` to the fundamental cell: coefficients in [0, 1).
pub fn reduce_to_cell(z: [C; 2], l: &ExtendedLattice) -> Result<([C; 2], [i64; 3])> {
    let c = lattice_coefficients(z, l)?;
    let m = [c[0].floor() as i64, c[1].floor() as i64, c[2].floor() as i64];
    let sub = combine(l, m);
    Ok(([z[0] - sub[0], z[1] - sub[1]], m))
}

/// Nearest lattice point to `z`: the point, its coefficients, the snap
/// distance and the off-span component magnitude.
pub fn nearest_lattice_point(z: [C; 2], l: &ExtendedLattice) -> Result<([C; 2], [i64; 3], f64, f64)> {
    let c = lattice_coefficients(z, l)?;
    let m = [c[0].round() as i64, c[1].round() as i64, c[2].round() as i64];
    let p = combine(l, m);
    let snap = ((z[0] - p[0]).norm_sqr() + (z[1] - p[1]).norm_sqr()).sqrt();
    Ok((p, m, snap, c[3].abs()))
}

/// Reduce a complex number modulo the rank-2 lattice spanned by (g1, g2),
/// nearest representative; also returns the subtracted integers.
pub fn reduce_mod_rank2(w: C, g1: C, g2: C) -> (C, [i64; 2]) {
    let det = g1.re * g2.im - g1.im * g2.re;
    if det.abs() < 1e-14 {
        return (w, [0, 0]);
    }
    let c1 = (w.re * g2.im - w.im * g2.re) / det;
    let c2 = (g1.re * w.im - g1.im * w.re) / det;
    let m = [round_half_down(c1), round_half_down(c2)];
    (w - g1 * m[0] as f64 - g2 * m[1] as f64, m)
}

/// Projection of an extended point to the first coordinate modulo the
/// ordinary lattice (the quotient by the group direction).
pub fn extension_projection(p: &ExtendedAbelPoint) -> C {
    let (oa, ob) = p.lattice.sublattice();
    reduce_mod_rank2(p.z[0], oa, ob).0
}

/// The group action: shift of the second coordinate.
pub fn group_action_shift(p: &ExtendedAbelPoint, g: C) -> ExtendedAbelPoint {
    ExtendedAbelPoint {
        z: [p.z[0], p.z[1] + g],
        lattice: p.lattice.clone(),
    }
}

/// The model rank-3 lattice generated by (2 pi i, 0), (tau1, tau2) and
/// (0, 2 pi i); the first components of g1, g2 span the projection-image
/// lattice 2 pi i Z + tau1 Z.
pub fn model_lattice(tau1: C, tau2: C) -> Result<ExtendedLattice> {
    if tau1.im.abs() < 1e-12 {
        return Err(Error::DegenerateTau);
    }
    let tau = C::new(0.0, std::f64::consts::TAU);
    let l = ExtendedLattice {
        g: [[tau, C::default()], [tau1, tau2], [C::default(), tau]],
    };
    if l.min_singular_value() < LATTICE_RANK_TOL {
        return Err(Error::DegenerateTau);
    }
    Ok(l)
}

/// GL(2, Z) comparison of two rank-2 lattices in C: returns the integer
/// change of basis (columns express the second basis in the first) when the
/// lattices agree to `tol`.
pub fn lattices_equal(b1: (C, C), b2: (C, C), tol: f64) -> Option<[[i64; 2]; 2]> {
    let mut m = [[0i64; 2]; 2];
    for (j, w) in [b2.0, b2.1].into_iter().enumerate() {
        let det = b1.0.re * b1.1.im - b1.0.im * b1.1.re;
        if det.abs() < 1e-14 {
            return None;
        }
        let c1 = (w.re * b1.1.im - w.im * b1.1.re) / det;
        let c2 = (b1.0.re * w.im - b1.0.im * w.re) / det;
        let scale = c1.abs().max(c2.abs()).max(1.0);
        if (c1 - c1.round()).abs() > tol * scale || (c2 - c2.round()).abs() > tol * scale {
            return None;
        }
        m[0][j] = c1.round() as i64;
        m[1][j] = c2.round() as i64;
    }
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() != 1 {
        return None;
    }
    Some(m)
}

/// Report of a linear fit of the extended Abel image of a trajectory.
#[derive(Debug, Clone)]
pub struct FitReport {
    /// Fitted velocity in C^2 per unit trajectory time.
    pub velocity: [C; 2],
    /// Fitted image at t = 0.
    pub intercept: [C; 2],
    /// Max-norm residual of the linear fit over the used samples.
    pub residual: f64,
    /// Number of contiguous segments fitted (1 without divisor crossings).
    pub segments: usize,
    /// Trajectory times of skipped samples (divisor degeneracies and
    /// branch-point collisions).
    pub theta_crossings: Vec<f64>,
    pub samples_used: usize,
}

/// Deterministic base point well away from the branch points.
fn default_base_point(curve: &QuarticCurve) -> DivisorPoint {
    let b = curve.branch_points();
    let centroid = (b[0] + b[1] + b[2] + b[3]) / 4.0;
    let spread = b.iter().map(|&x| (x - centroid).norm()).fold(0.0, f64::max);
    let rho = 1.5 * (1.0 + spread);
    let mut best = centroid + rho;
    let mut best_clear = -1.0;
    for i in 0..16 {
        let th = std::f64::consts::TAU * (i as f64 + 0.37) / 16.0;
        let cand = centroid + C::from_polar(rho, th);
        let clear = curve.branch_distance(cand);
        if clear > best_clear {
            best_clear = clear;
            best = cand;
        }
    }
    DivisorPoint::new(curve, best, crate::curves::canonical_sqrt(curve.f().eval(best)))
}

/// Extended Abel sum of the eigenvector divisor relative to `base`.
fn abel_sum(
    curve: &QuarticCurve,
    pd: &PeriodData,
    lv: &LaxVariables,
    base: &DivisorPoint,
) -> Result<[C; 2]> {
    let div = eigenvector_divisor(lv)?;
    let minsep = curve.min_branch_separation();
    for p in &div {
        if curve.branch_distance(p.lambda) < (5e-3 * minsep).max(crate::curves::BRANCH_PROXIMITY_TOL) {
            return Err(Error::DegenerateDivisor { sep: curve.branch_distance(p.lambda) });
        }
    }
    let z0 = abel_map_extended(curve, pd, &div[0], base, None)?;
    let z1 = abel_map_extended(curve, pd, &div[1], base, None)?;
    Ok([z0[0] + z1[0], z0[1] + z1[1]])
}

/// Least-squares line fit z(t) = z0 + v t jointly over the four real
/// coordinates; returns (v, z0, max residual).
fn line_fit(times: &[f64], zs: &[[C; 2]]) -> ([C; 2], [C; 2], f64) {
    let n = times.len() as f64;
    let tbar = times.iter().sum::<f64>() / n;
    let tt: f64 = times.iter().map(|t| (t - tbar) * (t - tbar)).sum();
    let mut v = [C::default(); 2];
    let mut z0 = [C::default(); 2];
    for c in 0..2 {
        let zbar: C = zs.iter().map(|z| z[c]).sum::<C>() / n;
        let cov: C = times
            .iter()
            .zip(zs.iter())
            .map(|(&t, z)| (z[c] - zbar) * (t - tbar))
            .sum();
        v[c] = cov / tt;
        z0[c] = zbar - v[c] * tbar;
    }
    let mut resid: f64 = 0.0;
    for (&t, z) in times.iter().zip(zs.iter()) {
        for c in 0..2 {
            resid = resid.max((z[c] - z0[c] - v[c] * t).norm());
        }
    }
    (v, z0, resid)
}

/// Fits the extended Abel image of a pendulum trajectory to a straight line.
///
/// Lattice jumps between consecutive samples are unwrapped by
/// nearest-translate matching; samples with degenerate or branch-colliding
/// divisors are skipped with a +-2 sample window, and the resulting segments
/// must agree in velocity.
pub fn abel_flow_fit(
    traj: &Trajectory<PendulumState>,
    curve: &QuarticCurve,
    pd: &PeriodData,
) -> Result<FitReport> {
    let base = default_base_point(curve);
    abel_flow_fit_with_base(traj, curve, pd, &base)
}

/// [`abel_flow_fit`] with an explicit Abel base point; the fitted velocity is
/// base-independent, the intercept is not.
pub fn abel_flow_fit_with_base(
    traj: &Trajectory<PendulumState>,
    curve: &QuarticCurve,
    pd: &PeriodData,
    base: &DivisorPoint,
) -> Result<FitReport> {
    if traj.states.len() < 8 {
        return Err(Error::InvalidInput("need at least 8 samples for a flow fit".into()));
    }
    let lattice = pd.lattice();
    let shortest = lattice.shortest_vector_norm();
    let n = traj.states.len();
    let mut raw: Vec<Option<[C; 2]>> = Vec::with_capacity(n);
    let mut bad_core: Vec<usize> = Vec::new();
    for (i, s) in traj.states.iter().enumerate() {
        let lv = LaxVariables::from_state(s);
        match abel_sum(curve, pd, &lv, base) {
            Ok(z) => raw.push(Some(z)),
            // divisor collisions and near-branch-point passes are the
            // theta-divisor-proximal samples the skip window exists for
            Err(
                Error::DegenerateDivisor { .. }
                | Error::PathThroughBranchPoint(_)
                | Error::QuadratureNonconvergence { .. },
            ) => {
                raw.push(None);
                bad_core.push(i);
            }
            Err(e) => return Err(e),
        }
    }
    if bad_core.len() * 3 > n {
        return Err(Error::DivisorDegeneracy(format!(
            "{} of {} samples sit too close to the theta divisor",
            bad_core.len(),
            n
        )));
    }
    // widen each bad sample by a window of +-2
    let mut good = vec![true; n];
    for &i in &bad_core {
        let lo = i.saturating_sub(2);
        let hi = (i + 2).min(n - 1);
        for item in good.iter_mut().take(hi + 1).skip(lo) {
            *item = false;
        }
    }
    for (i, r) in raw.iter().enumerate() {
        if r.is_none() {
            good[i] = false;
        }
    }
    let theta_crossings: Vec<f64> = (0..n).filter(|&i| !good[i]).map(|i| traj.times[i]).collect();

    // unwrap by nearest lattice translate of the increments
    let mut times: Vec<f64> = Vec::new();
    let mut zs: Vec<[C; 2]> = Vec::new();
    let mut seg_bounds: Vec<usize> = vec![0];
    let mut prev_index: Option<usize> = None;
    for i in 0..n {
        if !good[i] {
            continue;
        }
        let z = raw[i].unwrap();
        match prev_index {
            None => {
                times.push(traj.times[i]);
                zs.push(z);
            }
            Some(pi) => {
                let zp = *zs.last().unwrap();
                let delta = [z[0] - zp[0], z[1] - zp[1]];
                let (red, _m) = reduce_mod_lattice(delta, &lattice)?;
                let step_norm = (red[0].norm_sqr() + red[1].norm_sqr()).sqrt();
                if step_norm > UNWRAP_JUMP_FRACTION * shortest {
                    return Err(Error::SamplingTooCoarse { fraction: step_norm / shortest });
                }
                if i > pi + 1 {
                    seg_bounds.push(zs.len());
                }
                times.push(traj.times[i]);
                zs.push([zp[0] + red[0], zp[1] + red[1]]);
            }
        }
        prev_index = Some(i);
    }
    seg_bounds.push(zs.len());
    if zs.len() < 8 {
        return Err(Error::DivisorDegeneracy("too few usable samples after skipping".into()));
    }

    // per-segment velocity agreement
    let mut seg_velocities: Vec<[C; 2]> = Vec::new();
    let mut segments = 0usize;
    for w in seg_bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo >= 8 {
            let (v, _, _) = line_fit(&times[lo..hi], &zs[lo..hi]);
            seg_velocities.push(v);
            segments += 1;
        }
    }
    let (velocity, intercept, residual) = line_fit(&times, &zs);
    for v in &seg_velocities {
        let d = (v[0] - velocity[0]).norm().max((v[1] - velocity[1]).norm());
        let tol = 1e-5 * (1.0 + velocity[0].norm().max(velocity[1].norm()));
        if d > tol {
            return Err(Error::DivisorDegeneracy(format!(
                "segment velocities disagree by {d:.3e}"
            )));
        }
    }
    Ok(FitReport {
        velocity,
        intercept,
        residual,
        segments: segments.max(1),
        theta_crossings,
        samples_used: zs.len(),
    })
}

/// End-to-end linearization experiment: integrate, build periods, fit. The
/// sample count is doubled (up to three times) when unwrapping detects jumps
/// larger than the safe fraction of a cell.
pub fn abel_flow_linearity(
    state0: &PendulumState,
    t_end: f64,
    tol: f64,
    n_samples: usize,
) -> Result<(FitReport, QuarticCurve, PeriodData)> {
    let lv = LaxVariables::from_state(state0);
    let (h, k, _) = pendulum::spectral_invariants(&lv)?;
    let curve = QuarticCurve::from_hk(h, k)?;
    let pd = periods(&curve, CycleSpec::default())?;
    let mut n = n_samples.max(16);
    let mut last_err = None;
    for _ in 0..3 {
        let traj = crate::flows::integrate_pendulum(state0, t_end, tol, n)?;
        match abel_flow_fit(&traj, &curve, &pd) {
            Ok(fit) => return Ok((fit, curve, pd)),
            Err(Error::SamplingTooCoarse { fraction }) => {
                n *= 2;
                last_err = Some(Error::SamplingTooCoarse { fraction });
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::InvalidInput("flow fit failed".into())))
}

/// Fit of the rotation flow `theta -> rotate_about_e3(state, theta)`.
pub fn rotation_flow_fit(
    state: &PendulumState,
    curve: &QuarticCurve,
    pd: &PeriodData,
    theta_end: f64,
    n_samples: usize,
) -> Result<FitReport> {
    let n = n_samples.max(16);
    let times: Vec<f64> = (0..n).map(|i| theta_end * i as f64 / (n - 1) as f64).collect();
    let states: Vec<PendulumState> = times
        .iter()
        .map(|&t| pendulum::rotate_about_e3(state, C::new(t, 0.0)))
        .collect();
    let traj = Trajectory {
        times,
        direction: C::new(1.0, 0.0),
        states,
        integrator_tol: 0.0,
        diagnostics: vec![Default::default(); n],
        steps: (0, 0),
    };
    abel_flow_fit(&traj, curve, pd)
}

/// Equivariance of the Abel image under rotation: the projection to the
/// ordinary Jacobian must be fixed (residual reported) while the fiber
/// coordinate shifts; returns (|Delta z1| mod Lambda, Delta z2 mod 2 pi i Z).
pub fn symmetry_equivariance(
    state: &PendulumState,
    theta: f64,
    curve: &QuarticCurve,
    pd: &PeriodData,
) -> Result<(f64, C)> {
    let base = default_base_point(curve);
    let z = abel_sum(curve, pd, &LaxVariables::from_state(state), &base)?;
    let rotated = pendulum::rotate_about_e3(state, C::new(theta, 0.0));
    let zr = abel_sum(curve, pd, &LaxVariables::from_state(&rotated), &base)?;
    let dz = [zr[0] - z[0], zr[1] - z[1]];
    let (red1, m) = reduce_mod_rank2(dz[0], pd.omega_a, pd.omega_b);
    // pin the path-class ambiguity in the fiber coordinate by the same integers
    let dz2 = dz[1] - pd.eta_a * m[0] as f64 - pd.eta_b * m[1] as f64;
    let two_pi = std::f64::consts::TAU;
    let dz2 = dz2 - C::new(0.0, two_pi) * (dz2.im / two_pi).round();
    Ok((red1.norm(), dz2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn model() -> ExtendedLattice {
        model_lattice(c64(0.8, 1.1), c64(-0.4, 0.7)).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let l = model();
        // z = g1 -> ~0 with coeffs (1, 0, 0)
        let (red, m) = reduce_mod_lattice(l.g[0], &l).unwrap();
        assert_eq!(m, [1, 0, 0]);
        assert!(red[0].norm() < 1e-12 && red[1].norm() < 1e-12);
        // z = 0 -> (0, (0,0,0))
        let (red, m) = reduce_mod_lattice([C::default(), C::default()], &l).unwrap();
        assert_eq!(m, [0, 0, 0]);
        assert!(red[0].norm() < 1e-15);
        // z = 0.5 g1 + 0.5 g2 -> itself with coeffs (0,0,0)
        let z = [
            (l.g[0][0] + l.g[1][0]) * 0.5,
            (l.g[0][1] + l.g[1][1]) * 0.5,
        ];
        let (red, m) = reduce_mod_lattice(z, &l).unwrap();
        assert_eq!(m, [0, 0, 0]);
        assert!((red[0] - z[0]).norm() < 1e-12);
        // idempotence
        let z = [c64(3.7, -2.2), c64(-5.1, 9.9)];
        let (r1, _) = reduce_mod_lattice(z, &l).unwrap();
        let (r2, m2) = reduce_mod_lattice(r1, &l).unwrap();
        assert_eq!(m2, [0, 0, 0]);
        assert!((r1[0] - r2[0]).norm() < 1e-12 && (r1[1] - r2[1]).norm() < 1e-12);
    }

    #[test]
    fn cell_reduction_has_unit_coefficients() {
        let l = model();
        let z = [c64(3.7, -2.2), c64(-5.1, 9.9)];
        let (red, _) = reduce_to_cell(z, &l).unwrap();
        let c = lattice_coefficients(red, &l).unwrap();
        for v in &c[..3] {
            assert!(*v >= -1e-10 && *v < 1.0 + 1e-10, "cell coefficient {v}");
        }
    }

    #[test]
    fn projection_and_group_action() {
        let l = model();
        // z = (0, w): in the kernel of the projection
        let p = ExtendedAbelPoint::new([C::default(), c64(123.4, -5.0)], l.clone());
        assert!(extension_projection(&p).norm() < 1e-12);
        // g3-translate does not move the projection
        let q = ExtendedAbelPoint::new([c64(0.3, 0.4), c64(-1.0, 2.0)], l.clone());
        let q3 = ExtendedAbelPoint::new([q.z[0] + l.g[2][0], q.z[1] + l.g[2][1]], l.clone());
        assert!((extension_projection(&q) - extension_projection(&q3)).norm() < 1e-12);
        // projection of g1 is 0 mod Lambda
        let pg1 = ExtendedAbelPoint::new(l.g[0], l.clone());
        assert!(extension_projection(&pg1).norm() < 1e-12);
        // shift: identity at g = 0, z1 untouched, full period returns
        let s0 = group_action_shift(&q, C::default());
        assert_eq!(s0.z, q.z);
        let s = group_action_shift(&q, c64(0.0, std::f64::consts::TAU));
        assert_eq!(s.z[0], q.z[0]);
        let (_, m) = reduce_mod_lattice([s.z[0] - q.z[0], s.z[1] - q.z[1]], &l).unwrap();
        assert_eq!(m, [0, 0, 1]);
        assert!((extension_projection(&s) - extension_projection(&q)).norm() < 1e-12);
    }

    #[test]
    fn model_lattice_shape_and_swap() {
        let tau = std::f64::consts::TAU;
        let l = model_lattice(c64(1.0, 1.0), c64(0.5, -0.3)).unwrap();
        assert!(l.min_singular_value() > 1e-8);
        assert_eq!(l.g[2], [C::default(), c64(0.0, tau)]);
        // projection image lattice = 2 pi i Z + tau1 Z
        let (a, b) = l.sublattice();
        assert!(lattices_equal((a, b), (c64(0.0, tau), c64(1.0, 1.0)), 1e-10).is_some());
        // swapping tau1, tau2 swaps the two projections' image lattices:
        // the second-coordinate lattice of l is spanned by (tau2, 2 pi i)
        let ls = model_lattice(c64(0.5, -0.3), c64(1.0, 1.0)).unwrap();
        let second_l = (l.g[1][1], l.g[2][1]);
        let first_ls = ls.sublattice();
        assert!(
            lattices_equal(second_l, first_ls, 1e-10).is_some(),
            "swapped tau: second projection should equal the first of the swapped lattice"
        );
        // purely imaginary tau1 keeps rank 3; real tau1 is degenerate
        assert!(model_lattice(c64(0.0, 1.0), c64(1.0, 1.0)).is_ok());
        assert!(matches!(model_lattice(c64(0.7, 0.0), c64(1.0, 1.0)), Err(Error::DegenerateTau)));
    }

    #[test]
    fn model_rank3_example() {
        let l = model_lattice(c64(0.0, 1.0), c64(1.0, 1.0)).unwrap();
        assert!(l.min_singular_value() > 1e-8);
    }

    #[test]
    fn lattices_equal_detects_gl2z() {
        let b1 = (c64(1.0, 0.2), c64(0.3, 1.5));
        // unimodular recombination
        let b2 = (b1.0 * 2.0 + b1.1, b1.0 + b1.1);
        assert!(lattices_equal(b1, b2, 1e-10).is_some());
        // non-unimodular (index 2 sublattice) must fail
        let b3 = (b1.0 * 2.0, b1.1);
        assert!(lattices_equal(b1, b3, 1e-10).is_none());
    }

    #[test]
    fn line_fit_recovers_exact_lines() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let v = [c64(0.3, -0.2), c64(1.1, 0.05)];
        let z0 = [c64(-1.0, 0.4), c64(0.0, 2.0)];
        let zs: Vec<[C; 2]> = times
            .iter()
            .map(|&t| [z0[0] + v[0] * t, z0[1] + v[1] * t])
            .collect();
        let (vf, z0f, r) = line_fit(&times, &zs);
        assert!(r < 1e-12);
        assert!((vf[0] - v[0]).norm() < 1e-12 && (vf[1] - v[1]).norm() < 1e-12);
        assert!((z0f[0] - z0[0]).norm() < 1e-12);
    }
}
