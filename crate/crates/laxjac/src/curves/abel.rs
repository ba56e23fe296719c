//! The extended Abel map: integrals of (dlambda/mu, eta) between points of
//! the curve along branch-avoiding paths.
//!
//! Paths are piecewise linear in the lambda plane with automatic detours
//! around branch points; when the tracked branch arrives on the wrong sheet a
//! loop around a single branch point is appended, which flips it. The result
//! is well defined modulo the extended lattice.

use super::periods::PeriodData;
use super::quad::{self, integrate_path};
use super::{DivisorPoint, QuarticCurve, BRANCH_PROXIMITY_TOL};
use crate::error::{Error, Result};
use num_complex::Complex64;

type C = Complex64;

/// Fraction of the minimal branch separation below which a path segment gets
/// a detour waypoint.
const SOFT_CLEARANCE: f64 = 0.08;

fn fix_segment(curve: &QuarticCurve, a: C, b: C, out: &mut Vec<C>, depth: usize) -> Result<()> {
    let minsep = curve.min_branch_separation();
    let soft = SOFT_CLEARANCE * minsep;
    let mut offender: Option<(C, f64)> = None;
    for &w in curve.branch_points() {
        // endpoint proximity is legitimate (divisor points can sit close to a
        // branch point); only interior passes get detours
        if (w - a).norm() < soft || (w - b).norm() < soft {
            continue;
        }
        let d = quad::dist_point_segment(w, a, b);
        if d < soft && offender.map(|(_, od)| d < od).unwrap_or(true) {
            offender = Some((w, d));
        }
    }
    match offender {
        None => {
            out.push(b);
            Ok(())
        }
        Some((w, _)) => {
            if depth == 0 {
                return Err(Error::PathThroughBranchPoint(
                    "could not route path around branch points".into(),
                ));
            }
            let ab = b - a;
            let dir = ab / ab.norm();
            let normal = C::new(0.0, 1.0) * dir;
            // foot of w on the segment line
            let t = ((w - a).re * dir.re + (w - a).im * dir.im).clamp(0.0, ab.norm());
            let foot = a + dir * t;
            let bump = 0.35 * minsep;
            // pick the side with more room from the other branch points
            let cand1 = foot + normal * bump;
            let cand2 = foot - normal * bump;
            let clear = |p: C| {
                curve
                    .branch_points()
                    .iter()
                    .map(|&x| (x - p).norm())
                    .fold(f64::INFINITY, f64::min)
            };
            let wp = if clear(cand1) >= clear(cand2) { cand1 } else { cand2 };
            fix_segment(curve, a, wp, out, depth - 1)?;
            fix_segment(curve, wp, b, out, depth - 1)?;
            Ok(())
        }
    }
}

/// Piecewise-linear path from `from` to `to` through the optional hint
/// waypoints, detoured away from branch points.
fn plan_path(curve: &QuarticCurve, from: C, to: C, hint: Option<&[C]>) -> Result<Vec<C>> {
    let mut anchors = vec![from];
    if let Some(h) = hint {
        anchors.extend_from_slice(h);
    }
    anchors.push(to);
    let mut out = vec![from];
    for w in anchors.windows(2) {
        fix_segment(curve, w[0], w[1], &mut out, 10)?;
    }
    Ok(out)
}

/// Loop waypoints from `start` around the branch point `w` and back
/// (counterclockwise), used to flip the tracked sheet.
fn sheet_flip_loop(curve: &QuarticCurve, start: C, w: C) -> Vec<C> {
    let minsep = curve.min_branch_separation();
    let rho = 0.3 * minsep.min(2.0 * (start - w).norm());
    let dir = {
        let d = start - w;
        if d.norm() < 1e-12 {
            C::new(1.0, 0.0)
        } else {
            d / d.norm()
        }
    };
    let mut pts = vec![start];
    const SIDES: usize = 12;
    for i in 0..=SIDES {
        let th = std::f64::consts::TAU * i as f64 / SIDES as f64;
        pts.push(w + dir * C::from_polar(rho, th));
    }
    pts.push(start);
    pts
}

/// Extended Abel map increment from `base` to `p`:
/// `(int dlambda/mu, int eta)` along a concrete path on the curve, well
/// defined modulo the extended lattice.
pub fn abel_map_extended(
    curve: &QuarticCurve,
    pd: &PeriodData,
    p: &DivisorPoint,
    base: &DivisorPoint,
    path_hint: Option<&[C]>,
) -> Result<[C; 2]> {
    for (who, pt) in [("base", base), ("target", p)] {
        if curve.branch_distance(pt.lambda) < BRANCH_PROXIMITY_TOL {
            return Err(Error::PathThroughBranchPoint(format!(
                "{who} point is within {BRANCH_PROXIMITY_TOL} of a branch point"
            )));
        }
        let res = pt.on_curve_residual(curve);
        let scale = curve.f().max_coeff_norm().max(1.0);
        if res > 1e-7 * scale {
            return Err(Error::InvalidInput(format!("{who} point is off the curve ({res:.2e})")));
        }
    }
    let path = plan_path(curve, base.lambda, p.lambda, path_hint)?;
    let main = integrate_path(curve.f(), &path, base.mu)?;
    let mut omega = main.omega;
    let mut eta_raw = main.eta_raw;
    let mut mu_end = main.mu_end;
    if (mu_end - p.mu).norm() > (mu_end + p.mu).norm() {
        // arrived on the opposite sheet: append a loop around the branch
        // point nearest to the target
        let w = *curve
            .branch_points()
            .iter()
            .min_by(|x, y| {
                (**x - p.lambda)
                    .norm()
                    .partial_cmp(&(**y - p.lambda).norm())
                    .unwrap()
            })
            .unwrap();
        let loop_pts = sheet_flip_loop(curve, p.lambda, w);
        let extra = integrate_path(curve.f(), &loop_pts, mu_end)?;
        omega += extra.omega;
        eta_raw += extra.eta_raw;
        mu_end = extra.mu_end;
    }
    let tol = 1e-6 * p.mu.norm().max(1e-3);
    if (mu_end - p.mu).norm() > tol {
        return Err(Error::PathThroughBranchPoint(format!(
            "sheet tracking did not reach the target branch (|diff| = {:.2e})",
            (mu_end - p.mu).norm()
        )));
    }
    Ok([omega, pd.third_kind_scale * eta_raw])
}
