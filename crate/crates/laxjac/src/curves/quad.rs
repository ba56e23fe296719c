//! Gauss-Legendre path integration on the two-sheeted cover `mu^2 = f(lambda)`.
//!
//! Every integral here is a pair (int dl/mu, int l dl/mu) along a polyline in
//! the lambda plane, with the square-root branch tracked continuously from a
//! caller-supplied starting value. Refinement doubles the subdivision of each
//! leg until two successive levels agree to `AGREE_TOL`; each level re-tracks
//! the branch from the path start, so the branch choice is level-independent.

use crate::error::{Error, Result};
use crate::poly::Poly;
use num_complex::Complex64;
use std::sync::OnceLock;

type C = Complex64;

/// Agreement target for successive quadrature refinements.
pub const AGREE_TOL: f64 = 1e-11;
const GL_N: usize = 64;
const MAX_LEVEL: usize = 10;

/// 64-point Gauss-Legendre nodes and weights on [0, 1].
fn gl64() -> &'static ([f64; GL_N], [f64; GL_N]) {
    static CELL: OnceLock<([f64; GL_N], [f64; GL_N])> = OnceLock::new();
    CELL.get_or_init(|| {
        let n = GL_N;
        let mut nodes = [0.0; GL_N];
        let mut weights = [0.0; GL_N];
        for i in 0..n {
            // initial guess on [-1, 1], Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            // map to [0, 1]
            nodes[i] = 0.5 * (1.0 - x); // descending cos guess -> ascending node order
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// Legendre polynomial value and derivative by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0_f64;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Principal-with-tiebreak square root: Re > 0, or Re = 0 and Im >= 0.
pub fn canonical_sqrt(z: C) -> C {
    let s = z.sqrt();
    if s.re > 0.0 || (s.re == 0.0 && s.im >= 0.0) {
        s
    } else {
        -s
    }
}

/// Continuously tracked branch of sqrt(f) along stepping points.
pub struct SheetTracker<'a> {
    f: &'a Poly,
    pub lambda: C,
    pub mu: C,
}

impl<'a> SheetTracker<'a> {
    pub fn start(f: &'a Poly, lambda: C, mu: C) -> Self {
        SheetTracker { f, lambda, mu }
    }

    /// Advances to `target`, halving the step whenever the branch moves more
    /// than half of its magnitude.
    pub fn advance(&mut self, target: C) -> Result<C> {
        self.advance_depth(target, 0)?;
        Ok(self.mu)
    }

    fn advance_depth(&mut self, target: C, depth: usize) -> Result<()> {
        if depth > 48 {
            return Err(Error::PathThroughBranchPoint(
                "sheet tracking failed (step halving exhausted)".into(),
            ));
        }
        let cand = canonical_sqrt(self.f.eval(target));
        let pick = if (cand - self.mu).norm() <= (cand + self.mu).norm() {
            cand
        } else {
            -cand
        };
        if (pick - self.mu).norm() > 0.5 * self.mu.norm() {
            let mid = 0.5 * (self.lambda + target);
            self.advance_depth(mid, depth + 1)?;
            self.advance_depth(target, depth + 1)?;
            return Ok(());
        }
        self.lambda = target;
        self.mu = pick;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PathIntegrals {
    /// int dl/mu along the path.
    pub omega: C,
    /// int l dl/mu along the path (third kind, pre-normalization).
    pub eta_raw: C,
    /// Tracked branch value at the path end.
    pub mu_end: C,
}

/// Integrates along the polyline `pts` with starting branch `mu_start` at
/// `pts[0]`. For closed contours pass `pts` with `pts[last] == pts[0]`.
pub fn integrate_path(f: &Poly, pts: &[C], mu_start: C) -> Result<PathIntegrals> {
    if pts.len() < 2 {
        return Err(Error::InvalidInput("path needs at least two points".into()));
    }
    let (nodes, weights) = gl64();
    let mut prev: Option<(C, C)> = None;
    for level in 0..=MAX_LEVEL {
        let pieces = 1usize << level;
        let mut omega = C::default();
        let mut eta = C::default();
        let mut tracker = SheetTracker::start(f, pts[0], mu_start);
        for seg in pts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let dir = b - a;
            for p in 0..pieces {
                let t0 = p as f64 / pieces as f64;
                let dt = 1.0 / pieces as f64;
                for i in 0..GL_N {
                    let t = t0 + dt * nodes[i];
                    let lam = a + dir * t;
                    let mu = tracker.advance(lam)?;
                    let w = dir * (dt * weights[i]);
                    omega += w / mu;
                    eta += w * lam / mu;
                }
            }
            // land exactly on the waypoint to keep corner tracking tight
            tracker.advance(b)?;
        }
        if let Some((po, pe)) = prev {
            let d_omega = (omega - po).norm();
            let d_eta = (eta - pe).norm();
            if d_omega <= AGREE_TOL * omega.norm().max(1.0) && d_eta <= AGREE_TOL * eta.norm().max(1.0) {
                return Ok(PathIntegrals { omega, eta_raw: eta, mu_end: tracker.mu });
            }
            if level == MAX_LEVEL {
                return Err(Error::QuadratureNonconvergence { delta: d_omega.max(d_eta) });
            }
        }
        prev = Some((omega, eta));
    }
    unreachable!()
}

/// Distance from a point to the segment [a, b].
pub fn dist_point_segment(p: C, a: C, b: C) -> f64 {
    let ab = b - a;
    let den = ab.norm_sqr();
    if den == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / den;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Minimum distance from any of `pts`' polyline edges to the point `w`.
pub fn dist_point_polyline(w: C, pts: &[C]) -> f64 {
    pts.windows(2)
        .map(|s| dist_point_segment(w, s[0], s[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Winding number of the closed polygon `pts` (last == first) around `w`.
pub fn winding_number(pts: &[C], w: C) -> f64 {
    let mut total = 0.0;
    for s in pts.windows(2) {
        let a = s[0] - w;
        let b = s[1] - w;
        total += (b / a).arg();
    }
    total / std::f64::consts::TAU
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn gl_nodes_integrate_polynomials() {
        let (nodes, weights) = gl64();
        // int_0^1 x^k dx = 1/(k+1)
        for k in [0usize, 1, 5, 20] {
            let s: f64 = nodes
                .iter()
                .zip(weights.iter())
                .map(|(&x, &w)| w * x.powi(k as i32))
                .sum();
            assert!((s - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k={k}: {s}");
        }
    }

    #[test]
    fn closed_contour_residue() {
        // f = 1 (mu = 1): closed integral of l dl = 0, dl = 0; with
        // mu = 1 and integrand 1/(l) style checks use the big-circle
        // machinery in periods.rs; here check exactness on a square.
        let f = Poly::constant(c64(1.0, 0.0));
        let square = [
            c64(1.0, 1.0),
            c64(-1.0, 1.0),
            c64(-1.0, -1.0),
            c64(1.0, -1.0),
            c64(1.0, 1.0),
        ];
        let out = integrate_path(&f, &square, c64(1.0, 0.0)).unwrap();
        assert!(out.omega.norm() < 1e-13);
        assert!(out.eta_raw.norm() < 1e-13);
    }

    #[test]
    fn sqrt_tracking_around_two_branch_points_closes() {
        // f = l^2 - 1: loop of radius 2 encloses both branch points; the
        // tracked branch returns to its start and the omega integral equals
        // the full period 2 * int_{-1}^{1} dl/sqrt(1-l^2) * (+-i) = +-2 pi i... for
        // mu^2 = l^2 - 1 the cycle integral around both equals the residue of
        // 1/sqrt(1 - 1/l^2)/l ~ 1/l at infinity: 2 pi i (up to sign/branch).
        let f = Poly::new(vec![c64(-1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let n = 16;
        let pts: Vec<C> = (0..=n)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / n as f64;
                c64(2.0 * th.cos(), 2.0 * th.sin())
            })
            .collect();
        let mu0 = canonical_sqrt(f.eval(pts[0]));
        let out = integrate_path(&f, &pts, mu0).unwrap();
        assert!((out.mu_end - mu0).norm() < 1e-9, "branch did not close");
        let tau = std::f64::consts::TAU;
        assert!(
            ((out.omega.norm() - tau).abs()) < 1e-9,
            "omega = {:?}",
            out.omega
        );
    }

    #[test]
    fn geometry_helpers() {
        assert!((dist_point_segment(c64(0.0, 1.0), c64(-1.0, 0.0), c64(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((dist_point_segment(c64(3.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0)) - 2.0).abs() < 1e-15);
        let square = [
            c64(1.0, 1.0),
            c64(-1.0, 1.0),
            c64(-1.0, -1.0),
            c64(1.0, -1.0),
            c64(1.0, 1.0),
        ];
        assert!((winding_number(&square, c64(0.0, 0.0)) - 1.0).abs() < 1e-12);
        assert!(winding_number(&square, c64(3.0, 0.0)).abs() < 1e-12);
    }
}
