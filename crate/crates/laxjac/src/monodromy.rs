//! Picard-Lefschetz monodromy of the period lattice over the (h, k)-plane,
//! the discriminant locus, and the frequency map of the real flows.
//!
//! Monodromy is computed on the de Rham side: at each continuation step the
//! full rank-3 period lattice is recomputed from any admissible cycle basis,
//! and the three tracked generator vectors are matched to their nearest
//! lattice translates. This avoids explicit cycle bookkeeping entirely; the
//! integer change of basis falls out at the end by solving against the
//! initial generators.

use crate::curves::{periods_any_basis, ExtendedLattice, QuarticCurve};
use crate::error::{Error, Result};
use crate::flows;
use crate::jacobian::{self, nearest_lattice_point, rotation_flow_fit};
use crate::pendulum::{self, PendulumState};
use crate::poly::Poly;
use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;

type C = Complex64;

/// A circular loop in the real (h, k)-plane.
#[derive(Debug, Clone)]
pub struct LoopSpec {
    pub center: (f64, f64),
    pub radius: f64,
    pub n_steps: usize,
    pub orientation: i8,
}

impl LoopSpec {
    pub fn new(center: (f64, f64), radius: f64, n_steps: usize, orientation: i8) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::InvalidInput("loop radius must be positive".into()));
        }
        if n_steps < 32 {
            return Err(Error::InvalidInput("loops need at least 32 steps".into()));
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::InvalidInput("orientation must be +1 or -1".into()));
        }
        Ok(LoopSpec { center, radius, n_steps, orientation })
    }

    /// Discretized closed path, starting and ending at angle 0.
    pub fn path(&self) -> Vec<(f64, f64)> {
        let (h0, k0) = self.center;
        (0..=self.n_steps)
            .map(|i| {
                let ang = std::f64::consts::TAU * i as f64 / self.n_steps as f64 * self.orientation as f64;
                (h0 + self.radius * ang.cos(), k0 + self.radius * ang.sin())
            })
            .collect()
    }
}

/// Integer monodromy matrices in the initial generator basis (columns are the
/// transported generators).
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyResult {
    /// Action on the ordinary period lattice.
    pub m: [[i64; 2]; 2],
    /// Action on the three extended generators.
    pub m_ext: [[i64; 3]; 3],
    /// Worst rounding residual of the final integer solve (must be < 1e-6).
    pub continuation_residual: f64,
}

impl MonodromyResult {
    pub fn det2(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace2(&self) -> i64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn is_identity2(&self) -> bool {
        self.m == [[1, 0], [0, 1]]
    }

    /// (M - I)^2 of the 2x2 block.
    pub fn unipotency_defect(&self) -> [[i64; 2]; 2] {
        let d = [
            [self.m[0][0] - 1, self.m[0][1]],
            [self.m[1][0], self.m[1][1] - 1],
        ];
        let mut out = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = d[i][0] * d[0][j] + d[i][1] * d[1][j];
            }
        }
        out
    }

    /// 3x3 matrix product in the column convention (loop A then B gives
    /// `b.compose_after(a)` = M_B * M_A).
    pub fn compose_after(&self, first: &MonodromyResult) -> MonodromyResult {
        let mut m_ext = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m_ext[i][j] += self.m_ext[i][k] * first.m_ext[k][j];
                }
            }
        }
        let m = [[m_ext[0][0], m_ext[0][1]], [m_ext[1][0], m_ext[1][1]]];
        MonodromyResult {
            m,
            m_ext,
            continuation_residual: self.continuation_residual.max(first.continuation_residual),
        }
    }
}

/// Rounding-residual gate for the integer change of basis.
pub const MONODROMY_ROUNDING_TOL: f64 = 1e-6;
/// Branch points may move at most this fraction of their minimal separation
/// per accepted continuation step.
const MAX_ROOT_MOVE_FRACTION: f64 = 0.25;
/// Tracked period vectors may move at most this fraction of the shortest
/// lattice vector per accepted continuation step.
const MAX_TRACK_FRACTION: f64 = 0.2;

fn curve_at(h: C, k: C) -> Result<QuarticCurve> {
    QuarticCurve::from_hk(h, k)
}

fn match_roots(prev: &[C; 4], new_unordered: &[C; 4]) -> ([C; 4], f64) {
    let mut used = [false; 4];
    let mut out = [C::default(); 4];
    let mut max_move: f64 = 0.0;
    for i in 0..4 {
        let mut best = f64::INFINITY;
        let mut bi = 0;
        for (j, &cand) in new_unordered.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (cand - prev[i]).norm();
            if d < best {
                best = d;
                bi = j;
            }
        }
        used[bi] = true;
        out[i] = new_unordered[bi];
        max_move = max_move.max(best);
    }
    (out, max_move)
}

fn min_sep(roots: &[C; 4]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..4 {
        for j in (i + 1)..4 {
            m = m.min((roots[i] - roots[j]).norm());
        }
    }
    m
}

/// Continues the period lattice along a closed polyline in the real
/// (h, k)-plane and expresses the transported generators in the initial
/// basis.
pub fn continue_periods_path(points: &[(f64, f64)]) -> Result<MonodromyResult> {
    let complex_points: Vec<(C, C)> = points
        .iter()
        .map(|&(h, k)| (C::new(h, 0.0), C::new(k, 0.0)))
        .collect();
    continue_periods_path_complex(&complex_points)
}

/// Continuation along a closed polyline with complex (h, k); real loops are
/// the physically relevant case, complex ones isolate single discriminant
/// zeros that no real loop can encircle without crossing the locus.
pub fn continue_periods_path_complex(points: &[(C, C)]) -> Result<MonodromyResult> {
    if points.len() < 3 {
        return Err(Error::InvalidInput("continuation path needs at least 3 points".into()));
    }
    let (h0, k0) = points[0];
    let (hn, kn) = points[points.len() - 1];
    if (h0 - hn).norm() > 1e-12 || (k0 - kn).norm() > 1e-12 {
        return Err(Error::InvalidInput("continuation path must be closed".into()));
    }
    let curve0 = curve_at(h0, k0)?;
    let lat0 = periods_any_basis(&curve0)?.lattice();
    let mut tracked: Vec<[C; 2]> = lat0.g.to_vec();
    let mut roots_prev = *curve0.branch_points();

    // parameter positions of the polyline vertices
    let mut t_cur = 0.0f64;
    let n_seg = points.len() - 1;
    let hk_at = |t: f64| {
        let scaled = t * n_seg as f64;
        let i = (scaled.floor() as usize).min(n_seg - 1);
        let frac = scaled - i as f64;
        let (ha, ka) = points[i];
        let (hb, kb) = points[i + 1];
        (ha + (hb - ha) * frac, ka + (kb - ka) * frac)
    };
    let mut stack: Vec<f64> = (1..=n_seg).rev().map(|i| i as f64 / n_seg as f64).collect();
    while let Some(&t_next) = stack.last() {
        let (h, k) = hk_at(t_next);
        let curve = curve_at(h, k)?;
        curve.require_smooth()?;
        let mut unordered = [C::default(); 4];
        unordered.copy_from_slice(curve.branch_points());
        let (matched, movement) = match_roots(&roots_prev, &unordered);
        let sep = min_sep(&matched);
        let mut accept = movement <= MAX_ROOT_MOVE_FRACTION * sep;
        let mut new_tracked = Vec::with_capacity(3);
        if accept {
            match periods_any_basis(&curve) {
                Ok(pd) => {
                    let lat = pd.lattice();
                    let shortest = lat.shortest_vector_norm();
                    for v in &tracked {
                        // the snap distance is O(step) by holomorphy of the
                        // periods; keeping it well under the shortest lattice
                        // vector makes nearest-translate matching unambiguous
                        let (p, _m, snap, _off) = nearest_lattice_point(*v, &lat)?;
                        if snap > MAX_TRACK_FRACTION * shortest {
                            accept = false;
                            break;
                        }
                        new_tracked.push(p);
                    }
                }
                Err(_) => accept = false,
            }
        }
        if accept {
            tracked = new_tracked;
            roots_prev = matched;
            t_cur = t_next;
            stack.pop();
        } else {
            let mid = 0.5 * (t_cur + t_next);
            if t_next - t_cur < 1e-9 {
                return Err(Error::BranchCollision);
            }
            stack.push(mid);
        }
    }

    // integer change of basis in the initial generators
    let mut m_ext = [[0i64; 3]; 3];
    let mut worst = 0.0f64;
    for (j, v) in tracked.iter().enumerate() {
        let (p, m, snap, off) = nearest_lattice_point(*v, &lat0)?;
        let _ = p;
        let resid = snap.max(off);
        worst = worst.max(resid);
        if resid > MONODROMY_ROUNDING_TOL * lat0.shortest_vector_norm().max(1.0) {
            return Err(Error::NonIntegerMonodromy { residual: resid });
        }
        for i in 0..3 {
            m_ext[i][j] = m[i];
        }
    }
    Ok(MonodromyResult {
        m: [[m_ext[0][0], m_ext[0][1]], [m_ext[1][0], m_ext[1][1]]],
        m_ext,
        continuation_residual: worst,
    })
}

/// Monodromy around a circular loop; validates that the loop keeps a margin
/// of a tenth of its radius from the discriminant locus by sampling an
/// annulus around it.
pub fn continue_periods(spec: &LoopSpec) -> Result<MonodromyResult> {
    let (h0, k0) = spec.center;
    for ring in [0.9, 1.0, 1.1] {
        for i in 0..256 {
            let ang = std::f64::consts::TAU * i as f64 / 256.0;
            let h = h0 + spec.radius * ring * ang.cos();
            let k = k0 + spec.radius * ring * ang.sin();
            let d = discriminant_value(h, k);
            if d.abs() < 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "loop comes within a tenth of its radius of the discriminant locus near ({h:.4}, {k:.4})"
                )));
            }
        }
    }
    continue_periods_path(&spec.path())
}

/// Real discriminant of the quartic family at real (h, k).
pub fn discriminant_value(h: f64, k: f64) -> f64 {
    let f = pendulum::curve_poly(C::new(h, 0.0), C::new(k, 0.0));
    match f.roots() {
        Ok(roots) => Poly::discriminant_from_roots(&roots).re,
        Err(_) => f64::NAN,
    }
}

/// Polyline segments and isolated zeros of the discriminant locus on a real
/// (h, k) grid.
#[derive(Debug, Clone, Default)]
pub struct LocusResult {
    /// Line segments (h1, k1) -- (h2, k2) approximating sign-change contours.
    pub segments: Vec<((f64, f64), (f64, f64))>,
    /// Isolated zeros (local minima of |disc| that refine to zero without a
    /// sign change).
    pub isolated: Vec<(f64, f64)>,
}

/// Sign-change contour extraction (marching squares) plus isolated-zero
/// detection by quadratic refinement of strict local minima of |disc|.
pub fn discriminant_locus(
    h_range: (f64, f64),
    k_range: (f64, f64),
    grid: (usize, usize),
) -> LocusResult {
    let (nh, nk) = (grid.0.max(4), grid.1.max(4));
    let hs: Vec<f64> = (0..nh)
        .map(|i| h_range.0 + (h_range.1 - h_range.0) * i as f64 / (nh - 1) as f64)
        .collect();
    let ks: Vec<f64> = (0..nk)
        .map(|j| k_range.0 + (k_range.1 - k_range.0) * j as f64 / (nk - 1) as f64)
        .collect();
    let mut vals = vec![vec![0.0f64; nk]; nh];
    for i in 0..nh {
        for j in 0..nk {
            vals[i][j] = discriminant_value(hs[i], ks[j]);
        }
    }
    let mut segments = Vec::new();
    let zero_on = |a: f64, b: f64| -> Option<f64> {
        if a == 0.0 {
            return Some(0.0);
        }
        if a * b < 0.0 {
            Some(a / (a - b))
        } else {
            None
        }
    };
    for i in 0..nh - 1 {
        for j in 0..nk - 1 {
            let (v00, v10, v01, v11) = (vals[i][j], vals[i + 1][j], vals[i][j + 1], vals[i + 1][j + 1]);
            let mut pts: Vec<(f64, f64)> = Vec::new();
            if let Some(t) = zero_on(v00, v10) {
                pts.push((hs[i] + t * (hs[i + 1] - hs[i]), ks[j]));
            }
            if let Some(t) = zero_on(v01, v11) {
                pts.push((hs[i] + t * (hs[i + 1] - hs[i]), ks[j + 1]));
            }
            if let Some(t) = zero_on(v00, v01) {
                pts.push((hs[i], ks[j] + t * (ks[j + 1] - ks[j])));
            }
            if let Some(t) = zero_on(v10, v11) {
                pts.push((hs[i + 1], ks[j] + t * (ks[j + 1] - ks[j])));
            }
            if pts.len() >= 2 {
                segments.push((pts[0], pts[1]));
                if pts.len() == 4 {
                    segments.push((pts[2], pts[3]));
                }
            }
        }
    }
    // isolated zeros: strict local minima of |disc| whose quadratic model
    // dips to (near) zero without a neighboring sign change
    let mut isolated = Vec::new();
    for i in 1..nh - 1 {
        for j in 1..nk - 1 {
            let v = vals[i][j].abs();
            let mut strict_min = true;
            let mut stencil_max = 0.0f64;
            let mut sign_change = false;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let w = vals[(i as i64 + di) as usize][(j as i64 + dj) as usize];
                    stencil_max = stencil_max.max(w.abs());
                    if w.abs() <= v && w != vals[i][j] {
                        strict_min = false;
                    }
                    if w * vals[i][j] < 0.0 {
                        sign_change = true;
                    }
                }
            }
            // a roundoff-scale center value carries no meaningful sign
            if v <= 1e-12 * stencil_max {
                sign_change = false;
            }
            if strict_min && !sign_change && v <= 1e-2 * stencil_max.max(1e-300) {
                isolated.push((hs[i], ks[j]));
            }
        }
    }
    LocusResult { segments, isolated }
}

/// The real state used for frequency measurements at (h, k): position in the
/// (e1, e3) plane, velocity split between the azimuthal direction (fixing K)
/// and the meridian direction (fixing H).
pub fn real_state_for(h: f64, k: f64) -> Result<PendulumState> {
    let mut best: Option<(f64, f64)> = None;
    for i in 1..720 {
        let psi = std::f64::consts::PI * i as f64 / 720.0;
        let s = psi.sin();
        let g = 2.0 * (h - psi.cos()) - (k * k) / (s * s);
        if best.map(|(_, gb)| g > gb).unwrap_or(true) {
            best = Some((psi, g));
        }
    }
    let (psi, g) = best.unwrap();
    if g <= 1e-9 {
        return Err(Error::NoRealTorus(h, k));
    }
    let s = psi.sin();
    let cpsi = psi.cos();
    let w = g.sqrt();
    let v2 = if k.abs() < 1e-14 { 0.0 } else { k / s };
    let x = Vector3::new(C::new(s, 0.0), C::default(), C::new(cpsi, 0.0));
    let v = Vector3::new(
        C::new(w * cpsi, 0.0),
        C::new(v2, 0.0),
        C::new(-w * s, 0.0),
    );
    PendulumState::new(x, v)
}

/// Frequencies of the real flows, with the return-time lattice data behind
/// them.
#[derive(Debug, Clone)]
pub struct FrequencyData {
    /// Frequencies (dual basis coordinates of the unit time direction).
    pub omega: (f64, f64),
    /// Radial return time (minimal positive-time return generator).
    pub t_radial: f64,
    /// Azimuthal advance per radial period predicted by the return lattice,
    /// canonicalized to (-pi, pi].
    pub delta_phi: f64,
    /// Pure-rotation return angle (expected 2 pi).
    pub rotation_return: f64,
    pub v_h: [C; 2],
    pub v_k: [C; 2],
}

/// Bounded integer-relation search for the return lattice
/// `{(T, Theta) : T V_H + Theta V_K in Lambda'}` with coefficients up to 64.
pub const INTEGER_SEARCH_BOUND: i64 = 64;

pub fn frequency_data(h: f64, k: f64) -> Result<FrequencyData> {
    let state = real_state_for(h, k)?;
    let (fit_h, curve, pd) = jacobian::abel_flow_linearity(&state, 6.0, 1e-12, 160)?;
    let fit_k = rotation_flow_fit(&state, &curve, &pd, 1.0, 24)?;
    let v_h = fit_h.velocity;
    let v_k = fit_k.velocity;
    let lattice = pd.lattice();
    let hits = return_lattice_hits(v_h, v_k, &lattice)?;
    let (w1, w2) = canonical_return_basis(&hits)?;
    let (t1, th1) = w1;
    let (_, th2) = w2;
    // frequencies: coordinates of the unit time direction e1 in the (w1, w2)
    // basis
    let det = t1 * th2;
    if det.abs() < 1e-12 {
        return Err(Error::IntegerRelationFailure("degenerate return basis".into()));
    }
    let omega1 = 1.0 / t1;
    let omega2 = -th1 / (t1 * th2);
    let mut delta = -th1;
    // canonicalize to (-pi, pi] against the rotation return
    delta -= th2 * (delta / th2).round();
    Ok(FrequencyData {
        omega: (omega1, omega2),
        t_radial: t1,
        delta_phi: delta,
        rotation_return: th2,
        v_h,
        v_k,
    })
}

/// Frequencies of the real flows at (h, k).
pub fn frequency_map(h: f64, k: f64) -> Result<(f64, f64)> {
    Ok(frequency_data(h, k)?.omega)
}

fn return_lattice_hits(v_h: [C; 2], v_k: [C; 2], lattice: &ExtendedLattice) -> Result<Vec<(f64, f64)>> {
    // 4x2 real matrix of the two flow directions
    let a = DMatrix::<f64>::from_columns(&[
        DVector::from_vec(vec![v_h[0].re, v_h[0].im, v_h[1].re, v_h[1].im]),
        DVector::from_vec(vec![v_k[0].re, v_k[0].im, v_k[1].re, v_k[1].im]),
    ]);
    let svd = a.clone().svd(false, false);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin < 1e-6 {
        return Err(Error::IntegerRelationFailure(
            "flow velocities are not independent".into(),
        ));
    }
    let ata = a.transpose() * &a;
    let proj = ata.try_inverse().unwrap() * a.transpose(); // 2x4
    let q = DMatrix::<f64>::identity(4, 4) - &a * &proj; // residual projector
    let g_real: Vec<DVector<f64>> = lattice
        .g
        .iter()
        .map(|g| DVector::from_vec(vec![g[0].re, g[0].im, g[1].re, g[1].im]))
        .collect();
    let qg: Vec<DVector<f64>> = g_real.iter().map(|g| &q * g).collect();
    let pg: Vec<DVector<f64>> = g_real.iter().map(|g| &proj * g).collect();
    let gnorm: Vec<f64> = g_real.iter().map(|g| g.norm()).collect();
    let mut hits = Vec::new();
    let bound = INTEGER_SEARCH_BOUND;
    for m1 in -bound..=bound {
        let q1 = &qg[0] * m1 as f64;
        let p1 = &pg[0] * m1 as f64;
        for m2 in -bound..=bound {
            let q12 = &q1 + &qg[1] * m2 as f64;
            let p12 = &p1 + &pg[1] * m2 as f64;
            for m3 in -bound..=bound {
                if m1 == 0 && m2 == 0 && m3 == 0 {
                    continue;
                }
                let mut r2 = 0.0;
                for i in 0..4 {
                    let v = q12[i] + qg[2][i] * m3 as f64;
                    r2 += v * v;
                }
                let scale = (m1.abs() as f64 * gnorm[0]
                    + m2.abs() as f64 * gnorm[1]
                    + m3.abs() as f64 * gnorm[2])
                    .max(1.0);
                if r2.sqrt() < 1e-6 * scale {
                    let t = p12[0] + pg[2][0] * m3 as f64;
                    let th = p12[1] + pg[2][1] * m3 as f64;
                    hits.push((t, th));
                }
            }
        }
    }
    if hits.is_empty() {
        return Err(Error::IntegerRelationFailure("no return relations found".into()));
    }
    Ok(hits)
}

/// Canonical basis of the 2D return lattice: w2 = the pure-rotation return
/// (T = 0, smallest positive angle), w1 = the smallest positive radial
/// return, with the angle reduced modulo w2.
fn canonical_return_basis(hits: &[(f64, f64)]) -> Result<((f64, f64), (f64, f64))> {
    let t_scale = hits.iter().map(|h| h.0.abs()).fold(0.0, f64::max).max(1.0);
    let mut th2_best: Option<f64> = None;
    for &(t, th) in hits {
        if t.abs() < 1e-7 * t_scale && th.abs() > 1e-6 {
            let cand = th.abs();
            if th2_best.map(|b| cand < b).unwrap_or(true) {
                th2_best = Some(cand);
            }
        }
    }
    let th2 = th2_best.ok_or_else(|| {
        Error::IntegerRelationFailure("no pure-rotation return found".into())
    })?;
    let mut w1_best: Option<(f64, f64)> = None;
    for &(t, th) in hits {
        if t > 1e-6 * t_scale {
            if w1_best.map(|(bt, _)| t < bt - 1e-9 * t_scale).unwrap_or(true) {
                w1_best = Some((t, th));
            }
        }
    }
    let (t1, th1_raw) = w1_best.ok_or_else(|| {
        Error::IntegerRelationFailure("no radial return found".into())
    })?;
    let th1 = th1_raw - th2 * (th1_raw / th2).round();
    // validate: every hit is an integer combination of w1 and w2
    for &(t, th) in hits {
        let c1 = t / t1;
        let r = th - c1.round() * th1;
        let c2 = r / th2;
        if (c1 - c1.round()).abs() > 1e-4 || (c2 - c2.round()).abs() > 1e-4 {
            return Err(Error::IntegerRelationFailure(format!(
                "return relation ({t:.6}, {th:.6}) not generated by the basis"
            )));
        }
    }
    Ok(((t1, th1), (0.0, th2)))
}

/// Central-difference Jacobian of the frequency map and its determinant.
pub fn frequency_jacobian(h: f64, k: f64, step: f64) -> Result<([[f64; 2]; 2], f64)> {
    let op = frequency_map(h + step, k)?;
    let om = frequency_map(h - step, k)?;
    let kp = frequency_map(h, k + step)?;
    let km = frequency_map(h, k - step)?;
    let j = [
        [(op.0 - om.0) / (2.0 * step), (kp.0 - km.0) / (2.0 * step)],
        [(op.1 - om.1) / (2.0 * step), (kp.1 - km.1) / (2.0 * step)],
    ];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    Ok((j, det))
}

/// Direct dynamical measurement of the radial period and azimuthal advance:
/// integrate the pendulum, detect minima of x3 (v3 upcrossings), and read the
/// unwrapped azimuth of (x1, x2) at the crossings.
pub fn poincare_rotation_number(h: f64, k: f64) -> Result<(f64, f64)> {
    let state = real_state_for(h, k)?;
    let t_end = 60.0;
    let n = 12_001usize;
    let traj = flows::integrate_pendulum(&state, t_end, 1e-12, n)?;
    let dt = t_end / (n - 1) as f64;
    // per-sample azimuth (unwrapped) and v3
    let mut phi = Vec::with_capacity(n);
    let mut v3 = Vec::with_capacity(n);
    let mut dv3 = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    let mut acc = 0.0f64;
    let mut prev_arg: Option<f64> = None;
    for s in &traj.states {
        let (x1, x2) = (s.x[0].re, s.x[1].re);
        let r2 = x1 * x1 + x2 * x2;
        if r2 < 1e-12 {
            return Err(Error::IntegerRelationFailure(
                "trajectory passes through the rotation axis; azimuth undefined".into(),
            ));
        }
        let arg = x2.atan2(x1);
        if let Some(p) = prev_arg {
            let mut d = arg - p;
            while d > std::f64::consts::PI {
                d -= std::f64::consts::TAU;
            }
            while d < -std::f64::consts::PI {
                d += std::f64::consts::TAU;
            }
            acc += d;
        }
        prev_arg = Some(arg);
        phi.push(acc);
        v3.push(s.v[2].re);
        let (_, vd) = pendulum::pendulum_rhs_unchecked(s);
        dv3.push(vd[2].re);
        dphi.push((x1 * s.v[1].re - x2 * s.v[0].re) / r2);
    }
    // cubic-Hermite refinement of v3 = 0 upcrossings
    let mut crossings: Vec<(f64, f64)> = Vec::new(); // (t*, phi(t*))
    for i in 0..n - 1 {
        if !(v3[i] <= 0.0 && v3[i + 1] > 0.0) {
            continue;
        }
        if dv3[i] <= 0.0 && dv3[i + 1] <= 0.0 {
            continue;
        }
        let hermite = |f0: f64, f1: f64, d0: f64, d1: f64, s: f64| {
            let s2 = s * s;
            let s3 = s2 * s;
            f0 * (2.0 * s3 - 3.0 * s2 + 1.0)
                + f1 * (-2.0 * s3 + 3.0 * s2)
                + d0 * dt * (s3 - 2.0 * s2 + s)
                + d1 * dt * (s3 - s2)
        };
        // bisection on the cubic
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if hermite(v3[i], v3[i + 1], dv3[i], dv3[i + 1], mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        let t_star = traj.times[i] + s * dt;
        let phi_star = hermite(phi[i], phi[i + 1], dphi[i], dphi[i + 1], s);
        crossings.push((t_star, phi_star));
    }
    if crossings.len() < 4 {
        return Err(Error::IntegerRelationFailure(format!(
            "only {} radial-minimum crossings detected",
            crossings.len()
        )));
    }
    let m = crossings.len() - 1;
    let t_rad = (crossings[m].0 - crossings[0].0) / m as f64;
    let dphi_avg = (crossings[m].1 - crossings[0].1) / m as f64;
    Ok((t_rad, dphi_avg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_spec_validation() {
        assert!(LoopSpec::new((1.0, 0.0), 0.3, 16, 1).is_err());
        assert!(LoopSpec::new((1.0, 0.0), -0.3, 64, 1).is_err());
        assert!(LoopSpec::new((1.0, 0.0), 0.3, 64, 1).is_ok());
    }

    #[test]
    fn discriminant_examples() {
        assert!(discriminant_value(1.0, 0.0).abs() < 1e-10);
        assert!(discriminant_value(1.3, 0.6).abs() > 1e-3);
        // symmetry under k -> -k
        for (h, k) in [(0.5, 0.3), (1.2, 0.8), (-0.4, 1.1)] {
            let d1 = discriminant_value(h, k);
            let d2 = discriminant_value(h, -k);
            assert!((d1 - d2).abs() < 1e-9 * d1.abs().max(1.0));
        }
    }

    #[test]
    fn locus_contains_isolated_point_and_misses_regular_values() {
        // grid aligned so (1, 0) is a node
        let locus = discriminant_locus((0.5, 1.5), (-0.5, 0.5), (21, 21));
        let has_iso = locus
            .isolated
            .iter()
            .any(|&(h, k)| (h - 1.0).abs() < 1e-9 && k.abs() < 1e-9);
        assert!(has_iso, "isolated zero at (1,0) not found: {:?}", locus.isolated);
        // (1.3, 0.6) is not near any reported feature
        for &((h1, k1), (h2, k2)) in &locus.segments {
            for (h, k) in [(h1, k1), (h2, k2)] {
                assert!(
                    ((h - 1.3f64).powi(2) + (k - 0.6f64).powi(2)).sqrt() > 0.05,
                    "segment endpoint too close to the regular value"
                );
            }
        }
    }

    #[test]
    fn trivial_loop_gives_identity() {
        let spec = LoopSpec::new((1.5, 0.8), 0.05, 32, 1).unwrap();
        let m = continue_periods(&spec).unwrap();
        assert!(m.is_identity2());
        assert_eq!(m.m_ext, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        assert!(m.continuation_residual < 1e-6);
    }

    #[test]
    fn real_state_construction() {
        let s = real_state_for(1.3, 0.6).unwrap();
        let (h, k) = pendulum::integrals(&s);
        assert!((h.re - 1.3).abs() < 1e-12 && h.im.abs() < 1e-15);
        assert!((k.re - 0.6).abs() < 1e-12 && k.im.abs() < 1e-15);
        assert!(matches!(real_state_for(-2.0, 0.0), Err(Error::NoRealTorus(_, _))));
    }
}
