//! Dense complex eigenvalues via Hessenberg reduction and shifted QR.
//!
//! Matrices here are small (leading terms of Lax matrices, companion matrices
//! of quartics), so a straightforward explicit-shift QR with Givens rotations
//! is sufficient. Polynomial roots go through the companion matrix, polished
//! by two Newton steps.

use crate::error::{Error, Result};
use crate::poly::Poly;
use nalgebra::DMatrix;
use num_complex::Complex64;

type C = Complex64;

/// Householder reduction to upper Hessenberg form (in place, similarity).
fn hessenberg(h: &mut DMatrix<C>) {
    let n = h.nrows();
    for j in 0..n.saturating_sub(2) {
        // column j, rows j+1..n
        let mut norm = 0.0;
        for i in (j + 1)..n {
            norm += h[(i, j)].norm_sqr();
        }
        let norm = norm.sqrt();
        if norm < 1e-300 {
            continue;
        }
        let x0 = h[(j + 1, j)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C::new(1.0, 0.0) };
        let alpha = -phase * norm;
        // v = x - alpha e1, normalized
        let mut v = vec![C::default(); n - j - 1];
        for i in (j + 1)..n {
            v[i - j - 1] = h[(i, j)];
        }
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H := (I - 2 v v^*) H  on rows j+1..n
        for col in 0..n {
            let mut dot = C::default();
            for i in (j + 1)..n {
                dot += v[i - j - 1].conj() * h[(i, col)];
            }
            for i in (j + 1)..n {
                let upd = 2.0 * v[i - j - 1] * dot;
                h[(i, col)] -= upd;
            }
        }
        // H := H (I - 2 v v^*) on cols j+1..n
        for row in 0..n {
            let mut dot = C::default();
            for i in (j + 1)..n {
                dot += h[(row, i)] * v[i - j - 1];
            }
            for i in (j + 1)..n {
                let upd = 2.0 * dot * v[i - j - 1].conj();
                h[(row, i)] -= upd;
            }
        }
    }
}

/// Eigenvalues of the 2x2 block [[a, b], [c, d]].
fn eig2(a: C, b: C, c: C, d: C) -> (C, C) {
    let tr = a + d;
    let half = tr * 0.5;
    let disc = (half * half - (a * d - b * c)).sqrt();
    (half + disc, half - disc)
}

/// Givens rotation G = [[c, s], [-conj(s), conj(c)]] with G [a, b]^T = [r, 0]^T.
fn givens(a: C, b: C) -> (C, C) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r < 1e-300 {
        return (C::new(1.0, 0.0), C::default());
    }
    (a.conj() / r, b.conj() / r)
}

/// Eigenvalues of a general complex square matrix.
pub fn eigenvalues(m: &DMatrix<C>) -> Result<Vec<C>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidInput("eigenvalues of non-square matrix".into()));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let eps = f64::EPSILON;
    let mut eigs: Vec<C> = Vec::with_capacity(n);
    let mut hi = n; // active block is rows/cols 0..hi
    let mut iters_this_block = 0usize;
    let max_iters = 60 * n;
    let mut total = 0usize;
    while hi > 0 {
        total += 1;
        if total > max_iters * 4 {
            return Err(Error::InvalidInput("QR eigenvalue iteration stalled".into()));
        }
        // zero out negligible subdiagonals
        for i in 1..hi {
            let s = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
            if h[(i, i - 1)].norm() <= eps * s.max(eps * scale) {
                h[(i, i - 1)] = C::default();
            }
        }
        if hi == 1 || h[(hi - 1, hi - 2)].norm() == 0.0 {
            eigs.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            iters_this_block = 0;
            continue;
        }
        if hi == 2 || h[(hi - 2, hi - 3)].norm() == 0.0 {
            let (l1, l2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            iters_this_block = 0;
            continue;
        }
        // active sub-block [lo, hi)
        let mut lo = hi - 1;
        while lo > 0 && h[(lo, lo - 1)].norm() != 0.0 {
            lo -= 1;
        }
        iters_this_block += 1;
        if iters_this_block > max_iters {
            return Err(Error::InvalidInput("QR eigenvalue iteration did not converge".into()));
        }
        // Wilkinson shift: trailing 2x2 eigenvalue closest to the corner.
        let corner = h[(hi - 1, hi - 1)];
        let mu = if iters_this_block % 16 == 0 {
            // exceptional shift to break symmetry stalls
            corner + C::new(h[(hi - 1, hi - 2)].norm(), h[(hi - 2, hi - 2)].norm() * 0.5)
        } else {
            let (l1, l2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            if (l1 - corner).norm() <= (l2 - corner).norm() {
                l1
            } else {
                l2
            }
        };
        for i in lo..hi {
            h[(i, i)] -= mu;
        }
        // QR by Givens on the Hessenberg band, then RQ.
        let mut rots: Vec<(C, C)> = Vec::with_capacity(hi - lo - 1);
        for i in lo..(hi - 1) {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            for col in i..hi {
                let x = h[(i, col)];
                let y = h[(i + 1, col)];
                h[(i, col)] = c * x + s * y;
                h[(i + 1, col)] = -s.conj() * x + c.conj() * y;
            }
            rots.push((c, s));
        }
        for (idx, (c, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            for row in lo..(i + 2).min(hi) {
                let x = h[(row, i)];
                let y = h[(row, i + 1)];
                h[(row, i)] = x * c.conj() + y * s.conj();
                h[(row, i + 1)] = -x * *s + y * *c;
            }
        }
        for i in lo..hi {
            h[(i, i)] += mu;
        }
    }
    eigs.reverse();
    Ok(eigs)
}

/// Roots of a polynomial via companion-matrix eigenvalues, each polished by
/// two Newton steps.
pub fn poly_roots(p: &Poly) -> Result<Vec<C>> {
    let scale = p.max_coeff_norm();
    if scale == 0.0 {
        return Err(Error::InvalidInput("roots of the zero polynomial".into()));
    }
    let deg = p.degree_with_tol(scale * 1e-14);
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = p.coeff(deg);
    if deg == 1 {
        return Ok(vec![-p.coeff(0) / lead]);
    }
    if deg == 2 {
        return Ok(quadratic_roots(p.coeff(2), p.coeff(1), p.coeff(0)).to_vec());
    }
    let mut companion = DMatrix::<C>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = C::new(1.0, 0.0);
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -p.coeff(i) / lead;
    }
    let mut roots = eigenvalues(&companion)?;
    let dp = p.derivative();
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let d = dp.eval(*r);
            if d.norm() > 1e-300 {
                let step = p.eval(*r) / d;
                if step.norm() < 1.0 {
                    *r -= step;
                }
            }
        }
    }
    Ok(roots)
}

/// Numerically stable roots of a x^2 + b x + c.
pub fn quadratic_roots(a: C, b: C, c: C) -> [C; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // pick the sign avoiding cancellation in b +/- disc
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q.norm() < 1e-300 {
        // b ~ disc ~ 0: both roots at the double point
        let r = -b / (2.0 * a);
        return [r, r];
    }
    [q / a, c / q]
}

/// Groups values into clusters of mutual distance <= tol (transitively).
///
/// Returns (representative mean, multiplicity) pairs sorted lexicographically
/// by (re, im) of the representative, plus the smallest inter-cluster gap.
pub fn cluster(values: &[C], tol: f64) -> (Vec<(C, usize)>, f64) {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(C, usize)> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match reps.iter().position(|&x| x == r) {
            Some(k) => members[k].push(i),
            None => {
                reps.push(r);
                members.push(vec![i]);
            }
        }
    }
    for m in &members {
        let mut mean = C::default();
        for &i in m {
            mean += values[i];
        }
        mean /= m.len() as f64;
        groups.push((mean, m.len()));
    }
    groups.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut gap = f64::INFINITY;
    for i in 0..groups.len() {
        for j in (i + 1)..groups.len() {
            gap = gap.min((groups[i].0 - groups[j].0).norm());
        }
    }
    (groups, gap)
}
