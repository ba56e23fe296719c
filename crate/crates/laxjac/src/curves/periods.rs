//! Cycle contours and period integrals of the first and third kind.
//!
//! Cycles are polygonal ellipses around a pair of branch points; since the
//! integrands are holomorphic away from the branch locus, only the homotopy
//! class matters and polygons are exact. The third-kind differential
//! `eta = c lambda dlambda / mu` is normalized numerically so its residue at
//! the `mu ~ +lambda^2` point at infinity is -1 (and +1 at the other), which
//! pins the residue generator of the extended lattice to (0, 2 pi i).

use super::quad::{self, canonical_sqrt, integrate_path};
use super::{ExtendedLattice, QuarticCurve};
use crate::error::{Error, Result};
use crate::poly::Poly;
use num_complex::Complex64;

type C = Complex64;

/// Contours must clear every branch point by this fraction of the minimal
/// branch separation.
pub const CONTOUR_CLEARANCE: f64 = 0.1;
/// Residues at the two infinite points must be opposite to this tolerance.
pub const RESIDUE_TOL: f64 = 1e-8;

/// Cycle basis: index pairs into the ordered branch points. The a-cycle
/// encircles the first pair, the b-cycle the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleSpec {
    pub a: (usize, usize),
    pub b: (usize, usize),
}

impl Default for CycleSpec {
    fn default() -> Self {
        CycleSpec { a: (0, 1), b: (1, 2) }
    }
}

/// First- and third-kind periods over an a/b cycle basis.
#[derive(Debug, Clone)]
pub struct PeriodData {
    pub omega_a: C,
    pub omega_b: C,
    pub eta_a: C,
    pub eta_b: C,
    /// 2 pi i, the period of eta around the glued point at infinity.
    pub residue_gen: C,
    pub cycle_spec: CycleSpec,
    /// Normalization constant c of eta = c lambda dlambda / mu.
    pub third_kind_scale: C,
    /// Numerically measured residues of the normalized eta at the two
    /// infinite points (target (-1, +1)).
    pub residue_check: (C, C),
}

impl PeriodData {
    pub fn lattice(&self) -> ExtendedLattice {
        ExtendedLattice {
            g: [
                [self.omega_a, self.eta_a],
                [self.omega_b, self.eta_b],
                ExtendedLattice::residue_generator(),
            ],
        }
    }
}

/// Closed counterclockwise polygon around exactly the two branch points of
/// `pair`, clearing every branch point by at least `CONTOUR_CLEARANCE` of
/// the minimal separation. Tries a ladder of ellipse margins.
pub(crate) fn cycle_contour(curve: &QuarticCurve, pair: (usize, usize)) -> Result<Vec<C>> {
    let b = curve.branch_points();
    if pair.0 >= 4 || pair.1 >= 4 || pair.0 == pair.1 {
        return Err(Error::InvalidInput("cycle pair indices out of range".into()));
    }
    let (p, q) = (b[pair.0], b[pair.1]);
    let minsep = curve.min_branch_separation();
    let center = (p + q) * 0.5;
    let len = (q - p).norm();
    let u = (q - p) / len;
    const SIDES: usize = 48;
    for margin_factor in [0.45, 0.3, 0.2, 0.12] {
        // inscribed-polygon sagitta compensation
        let m = margin_factor * minsep / (std::f64::consts::PI / SIDES as f64).cos();
        let semi_major = 0.5 * len + m;
        let mut pts: Vec<C> = (0..=SIDES)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / SIDES as f64;
                center + u * (semi_major * th.cos()) + u * C::new(0.0, 1.0) * (m * th.sin())
            })
            .collect();
        pts[SIDES] = pts[0];
        if contour_admissible(&pts, b, pair, minsep) {
            return Ok(pts);
        }
    }
    Err(Error::ContourTooClose(format!(
        "no admissible ellipse around branch pair ({}, {})",
        pair.0, pair.1
    )))
}

fn contour_admissible(pts: &[C], branch: &[C; 4], pair: (usize, usize), minsep: f64) -> bool {
    for (i, &w) in branch.iter().enumerate() {
        let wind = quad::winding_number(pts, w);
        let inside = i == pair.0 || i == pair.1;
        if inside && (wind - 1.0).abs() > 0.1 {
            return false;
        }
        if !inside && wind.abs() > 0.1 {
            return false;
        }
        if quad::dist_point_polyline(w, pts) < CONTOUR_CLEARANCE * minsep {
            return false;
        }
    }
    true
}

/// Raw cycle integrals (omega, eta before normalization) over the
/// counterclockwise contour around `pair`, with the branch fixed by the
/// canonical square root at the contour start.
pub(crate) fn raw_cycle_integrals(curve: &QuarticCurve, pair: (usize, usize)) -> Result<(C, C)> {
    let pts = cycle_contour(curve, pair)?;
    let mu0 = canonical_sqrt(curve.f().eval(pts[0]));
    let out = integrate_path(curve.f(), &pts, mu0)?;
    if (out.mu_end - mu0).norm() > 1e-6 * mu0.norm().max(1e-6) {
        return Err(Error::InvalidInput(
            "cycle contour did not close on the curve (branch mismatch)".into(),
        ));
    }
    Ok((out.omega, out.eta_raw))
}

/// Raw residue of `lambda dlambda / mu` at the point at infinity on the given
/// sheet (+1 for `mu ~ +lambda^2`), measured counterclockwise in the local
/// coordinate `tau = 1/lambda`.
fn residue_at_infinity_raw(curve: &QuarticCurve, sheet: i8) -> Result<C> {
    let radius = 3.0 * (1.0 + curve.branch_points().iter().map(|z| z.norm()).fold(0.0, f64::max));
    const SIDES: usize = 64;
    let mut pts: Vec<C> = (0..=SIDES)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / SIDES as f64;
            C::from_polar(radius, th)
        })
        .collect();
    pts[SIDES] = pts[0];
    let target = pts[0] * pts[0] * sheet as f64;
    let cand = canonical_sqrt(curve.f().eval(pts[0]));
    let mu0 = if (cand - target).norm() <= (cand + target).norm() { cand } else { -cand };
    let out = integrate_path(curve.f(), &pts, mu0)?;
    if (out.mu_end - mu0).norm() > 1e-6 * mu0.norm() {
        return Err(Error::InvalidInput("residue contour did not close".into()));
    }
    // counterclockwise in lambda is clockwise in tau
    Ok(-out.eta_raw / C::new(0.0, std::f64::consts::TAU))
}

/// Full period computation: first and third kind over the given cycle basis,
/// with the third-kind normalization fixed by the residue at infinity.
pub fn periods(curve: &QuarticCurve, spec: CycleSpec) -> Result<PeriodData> {
    curve.require_smooth()?;
    let (omega_a, eta_raw_a) = raw_cycle_integrals(curve, spec.a)?;
    let (omega_b, eta_raw_b) = raw_cycle_integrals(curve, spec.b)?;
    let res_plus = residue_at_infinity_raw(curve, 1)?;
    let res_minus = residue_at_infinity_raw(curve, -1)?;
    if (res_plus + res_minus).norm() > RESIDUE_TOL * res_plus.norm().max(1.0) {
        return Err(Error::NormalizationFailure(res_plus.norm(), res_minus.norm()));
    }
    let scale = -1.0 / res_plus;
    Ok(PeriodData {
        omega_a,
        omega_b,
        eta_a: scale * eta_raw_a,
        eta_b: scale * eta_raw_b,
        residue_gen: C::new(0.0, std::f64::consts::TAU),
        cycle_spec: spec,
        third_kind_scale: scale,
        residue_check: (scale * res_plus, scale * res_minus),
    })
}

/// First-kind periods (dlambda/mu) over the cycle basis.
pub fn periods_first_kind(curve: &QuarticCurve, spec: CycleSpec) -> Result<(C, C)> {
    curve.require_smooth()?;
    let (omega_a, _) = raw_cycle_integrals(curve, spec.a)?;
    let (omega_b, _) = raw_cycle_integrals(curve, spec.b)?;
    Ok((omega_a, omega_b))
}

/// Third-kind periods of the normalized eta, plus the measured residues.
pub fn periods_third_kind(curve: &QuarticCurve, spec: CycleSpec) -> Result<(C, C, (C, C))> {
    let pd = periods(curve, spec)?;
    Ok((pd.eta_a, pd.eta_b, pd.residue_check))
}

/// Extended lattice over the default cycle basis.
pub fn extended_lattice(curve: &QuarticCurve) -> Result<ExtendedLattice> {
    Ok(periods(curve, CycleSpec::default())?.lattice())
}

/// Periods over the first admissible cycle pairing (pairs sharing one branch
/// point form a homology basis); used by continuation, where the default
/// pairing can become geometrically unrealizable.
pub fn periods_any_basis(curve: &QuarticCurve) -> Result<PeriodData> {
    const PAIRINGS: [((usize, usize), (usize, usize)); 12] = [
        ((0, 1), (1, 2)),
        ((0, 1), (0, 2)),
        ((1, 2), (2, 3)),
        ((0, 2), (2, 3)),
        ((0, 1), (1, 3)),
        ((0, 3), (1, 3)),
        ((0, 2), (1, 2)),
        ((1, 3), (2, 3)),
        ((0, 3), (2, 3)),
        ((0, 1), (0, 3)),
        ((0, 2), (0, 3)),
        ((1, 2), (1, 3)),
    ];
    curve.require_smooth()?;
    let mut last_err = None;
    for (a, b) in PAIRINGS {
        let spec = CycleSpec { a, b };
        if cycle_contour(curve, a).is_err() || cycle_contour(curve, b).is_err() {
            continue;
        }
        match periods(curve, spec) {
            Ok(pd) => return Ok(pd),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::ContourTooClose("no admissible cycle basis".into())))
}

/// Independent bilinear-relation check: `omega_a eta_b - omega_b eta_a`
/// must equal `+- 2 pi i * int_{inf-}^{inf+} dlambda/mu` modulo `2 pi i`
/// times the ordinary lattice. Returns the distance to the nearest such
/// value.
pub fn reciprocity_residual(curve: &QuarticCurve, pd: &PeriodData) -> Result<f64> {
    curve.require_smooth()?;
    let path_integral = infinity_to_infinity_integral(curve)?;
    let tau = C::new(0.0, std::f64::consts::TAU);
    let bilinear = pd.omega_a * pd.eta_b - pd.omega_b * pd.eta_a;
    let mut best = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let w = bilinear - tau * path_integral * sign;
        best = best.min(dist_mod_rank2(w, tau * pd.omega_a, tau * pd.omega_b));
    }
    Ok(best)
}

/// Distance from w to the nearest integer combination of (g1, g2) in C.
fn dist_mod_rank2(w: C, g1: C, g2: C) -> f64 {
    let det = g1.re * g2.im - g1.im * g2.re;
    if det.abs() < 1e-14 {
        return w.norm();
    }
    let c1 = (w.re * g2.im - w.im * g2.re) / det;
    let c2 = (g1.re * w.im - g1.im * w.re) / det;
    let reduced = w - g1 * c1.round() - g2 * c2.round();
    reduced.norm()
}

/// `int_{inf-}^{inf+} dlambda/mu` along a recorded concrete path: a straight
/// tail from each infinity in the `tau = 1/lambda` chart, plus a finite loop
/// around one branch point that switches sheets.
fn infinity_to_infinity_integral(curve: &QuarticCurve) -> Result<C> {
    let b = curve.branch_points();
    let minsep = curve.min_branch_separation();
    let maxabs = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let radius = 4.0 * (1.0 + maxabs);

    // direction from b[0] maximizing clearance from the other branch points
    let mut best_dir = C::new(1.0, 0.0);
    let mut best_clear = -1.0;
    for i in 0..64 {
        let th = std::f64::consts::TAU * i as f64 / 64.0;
        let dir = C::from_polar(1.0, th);
        let far = b[0] + dir * radius;
        let clear = b[1..]
            .iter()
            .map(|&w| quad::dist_point_segment(w, b[0], far))
            .fold(f64::INFINITY, f64::min);
        if clear > best_clear {
            best_clear = clear;
            best_dir = dir;
        }
    }
    if best_clear < CONTOUR_CLEARANCE * minsep {
        return Err(Error::ContourTooClose("no clear ray to infinity from a branch point".into()));
    }

    let far = b[0] + best_dir * radius;
    // tail in the tau chart: g = sqrt of the reversed quartic, g(0) = 1
    let f = curve.f();
    let f_rev = Poly::new(vec![f.coeff(4), f.coeff(3), f.coeff(2), f.coeff(1), f.coeff(0)]);
    let tau_end = 1.0 / far;
    let tail = integrate_path(&f_rev, &[C::default(), tau_end], C::new(1.0, 0.0))?;
    let g_end = tail.mu_end;

    // middle: from `far` in to a small circle around b[0] and back, starting
    // on the `mu ~ -lambda^2` sheet consistent with the tail
    let rho = 0.3 * minsep;
    let entry = b[0] + best_dir * rho;
    let mut pts = vec![far, entry];
    const SIDES: usize = 16;
    for i in 1..=SIDES {
        let th = std::f64::consts::TAU * i as f64 / SIDES as f64;
        pts.push(b[0] + best_dir * C::from_polar(rho, th));
    }
    pts.push(entry);
    pts.push(far);
    let mu_start = -far * far * g_end;
    let middle = integrate_path(f, &pts, mu_start)?;
    let expect_end = far * far * g_end;
    if (middle.mu_end - expect_end).norm() > 1e-6 * expect_end.norm() {
        return Err(Error::InvalidInput(
            "sheet-switching loop did not change branch as expected".into(),
        ));
    }
    Ok(tail.omega * 2.0 + middle.omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::jacobian::lattices_equal;
    use rand::{Rng, SeedableRng};

    fn curve_s0() -> QuarticCurve {
        QuarticCurve::from_hk(c64(1.3, 0.0), c64(0.6, 0.0)).unwrap()
    }

    #[test]
    fn lemniscatic_period_constant() {
        // mu^2 = lambda^4 - 1: the cycle around (-1, 1) carries the
        // lemniscate period 5.244115108584240 (computed from the AGM of
        // (1, 1/sqrt(2)) as sqrt(2) pi / agm), rotated by i on this branch
        // normalization.
        let f = Poly::new(vec![c64(-1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let curve = QuarticCurve::from_poly(f).unwrap();
        // branch points sorted: -1, -i, i, 1 -> pair (-1, 1) is (0, 3)
        let b = curve.branch_points();
        assert!((b[0] - c64(-1.0, 0.0)).norm() < 1e-12);
        assert!((b[3] - c64(1.0, 0.0)).norm() < 1e-12);
        let (omega, _) = raw_cycle_integrals(&curve, (0, 3)).unwrap();
        let expected = 5.244115108584240_f64;
        assert!(
            (omega.norm() - expected).abs() < 1e-9,
            "lemniscatic period {} vs {}",
            omega.norm(),
            expected
        );
        assert!(omega.re.abs() < 1e-9, "period should be purely imaginary here");
    }

    #[test]
    fn rescaling_lambda_rescales_periods() {
        // lambda -> c lambda maps mu^2 = f(lambda) to mu'^2 = f(c lambda)/c^4
        // (monic again), with dlambda/mu scaling by c.
        let base = curve_s0();
        let c = 1.7_f64;
        let f = base.f();
        let scaled = Poly::new(vec![
            f.coeff(0) / c.powi(4),
            f.coeff(1) / c.powi(3),
            f.coeff(2) / c.powi(2),
            f.coeff(3) / c,
            c64(1.0, 0.0),
        ]);
        let curve2 = QuarticCurve::from_poly(scaled).unwrap();
        let (oa1, ob1) = periods_first_kind(&base, CycleSpec::default()).unwrap();
        let (oa2, ob2) = periods_first_kind(&curve2, CycleSpec::default()).unwrap();
        // lambda' = lambda / c: roots scale by 1/c (order preserved for real
        // positive c), mu by 1/c^2, so each period scales by c in magnitude;
        // signs are free per cycle through the start-branch convention.
        assert!((oa2.norm() - c * oa1.norm()).abs() < 1e-8 * oa2.norm());
        assert!((ob2.norm() - c * ob1.norm()).abs() < 1e-8 * ob2.norm());
        let ra = oa2 / oa1;
        assert!((ra - c64(c, 0.0)).norm().min((ra + c64(c, 0.0)).norm()) < 1e-8);
    }

    #[test]
    fn residues_are_normalized_opposite() {
        let pd = periods(&curve_s0(), CycleSpec::default()).unwrap();
        assert!((pd.residue_check.0 + c64(1.0, 0.0)).norm() < 1e-8);
        assert!((pd.residue_check.1 - c64(1.0, 0.0)).norm() < 1e-8);
        assert!((pd.third_kind_scale - c64(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn residues_opposite_on_random_curves() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(51);
        let mut done = 0;
        while done < 8 {
            let h = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let k = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let curve = match QuarticCurve::from_hk(h, k) {
                Ok(c) if !c.is_singular() && c.min_branch_separation() > 0.05 => c,
                _ => continue,
            };
            let pd = match periods(&curve, CycleSpec::default()) {
                Ok(pd) => pd,
                Err(Error::ContourTooClose(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!((pd.residue_check.0 + c64(1.0, 0.0)).norm() < 1e-8);
            assert!((pd.residue_check.1 - c64(1.0, 0.0)).norm() < 1e-8);
            done += 1;
        }
    }

    #[test]
    fn symmetric_curve_eta_vanishes_on_symmetric_cycle() {
        // k = 0 makes f even; the cycle around the inner branch pair is
        // invariant under lambda -> -lambda, the tracked branch is even along
        // the collapsed cut, and the odd integrand lambda/mu integrates to 0.
        let curve = QuarticCurve::from_hk(c64(1.3, 0.0), c64(0.0, 0.0)).unwrap();
        let (_, eta_raw_inner) = raw_cycle_integrals(&curve, (1, 2)).unwrap();
        assert!(eta_raw_inner.norm() < 1e-9, "eta over symmetric cycle = {eta_raw_inner}");
    }

    #[test]
    fn reciprocity_on_s0_curve() {
        let curve = curve_s0();
        let pd = periods(&curve, CycleSpec::default()).unwrap();
        let resid = reciprocity_residual(&curve, &pd).unwrap();
        assert!(resid < 1e-7, "reciprocity residual {resid}");
    }

    #[test]
    fn lattice_rank_three_and_residue_generator() {
        let lat = extended_lattice(&curve_s0()).unwrap();
        assert!(lat.min_singular_value() > 1e-8);
        assert_eq!(lat.g[2], ExtendedLattice::residue_generator());
        // degeneration trend towards (1, 0): the ordinary lattice becomes
        // ill-conditioned (one period stays bounded, the dual one diverges)
        let cond = |h: f64| {
            let c = QuarticCurve::from_hk(c64(h, 0.0), c64(0.0, 0.0)).unwrap();
            let pd = periods(&c, CycleSpec::default()).unwrap();
            let m = nalgebra::Matrix2::new(
                pd.omega_a.re,
                pd.omega_b.re,
                pd.omega_a.im,
                pd.omega_b.im,
            );
            let sv = m.svd(false, false).singular_values;
            sv.min() / sv.max()
        };
        let mut prev = f64::INFINITY;
        for h in [1.3, 1.1, 1.02] {
            let r = cond(h);
            assert!(r < prev, "conditioning should degrade towards (1,0): {r} vs {prev}");
            prev = r;
        }
    }

    #[test]
    fn permuted_cycle_basis_spans_the_same_lattice() {
        let curve = curve_s0();
        let (oa, ob) = periods_first_kind(&curve, CycleSpec::default()).unwrap();
        let (oa2, ob2) = periods_first_kind(&curve, CycleSpec { a: (1, 2), b: (2, 3) }).unwrap();
        assert!(
            lattices_equal((oa, ob), (oa2, ob2), 1e-8).is_some(),
            "permuted basis should span the same rank-2 lattice"
        );
    }
}
