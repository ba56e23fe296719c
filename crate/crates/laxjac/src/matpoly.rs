//! Complex matrix polynomials, their spectral data and Lax vector fields.
//!
//! A matrix polynomial `A(x) = A_d x^d + ... + A_0` with fixed leading term
//! `J = A_d` generates the isospectral flows `dA/dt = [A^k(a), A(x)] / (x - a)`;
//! everything here is the structural linear algebra around those flows:
//! characteristic polynomials made monic in `y`, regularity of the leading
//! term, eigenspace restrictions, and stabilizer dimensions.

use crate::eig;
use crate::error::{Error, Result};
use crate::poly::Poly;
use nalgebra::DMatrix;
use num_complex::Complex64;

type C = Complex64;
type CMat = DMatrix<Complex64>;

/// Default relative tolerance for eigenvalue clustering.
pub const CLUSTER_TOL: f64 = 1e-9;
/// Relative tolerance on the remainder of the exact division in the Lax field.
pub const DIVISION_TOL: f64 = 1e-12;

/// A degree-`d` polynomial with `r x r` complex matrix coefficients, stored
/// ascending: `coeffs[k]` multiplies `x^k` and `coeffs[d]` is the leading
/// term `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    r: usize,
    d: usize,
    coeffs: Vec<CMat>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<CMat>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("matrix polynomial needs at least one coefficient".into()));
        }
        let r = coeffs[0].nrows();
        if r == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        for c in &coeffs {
            if c.nrows() != r || c.ncols() != r {
                return Err(Error::InvalidInput("coefficient matrices must all be r x r".into()));
            }
        }
        let d = coeffs.len() - 1;
        Ok(MatrixPolynomial { r, d, coeffs })
    }

    pub fn zero(r: usize, d: usize) -> Self {
        MatrixPolynomial {
            r,
            d,
            coeffs: (0..=d).map(|_| CMat::zeros(r, r)).collect(),
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &CMat {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut CMat {
        &mut self.coeffs[k]
    }

    pub fn leading(&self) -> &CMat {
        &self.coeffs[self.d]
    }

    /// Max absolute entry over all coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|m| m.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let d = self.d.max(other.d);
        let mut out = MatrixPolynomial::zero(self.r, d);
        for k in 0..=d {
            let mut m = CMat::zeros(self.r, self.r);
            if k <= self.d {
                m += &self.coeffs[k];
            }
            if k <= other.d {
                m += &other.coeffs[k];
            }
            out.coeffs[k] = m;
        }
        Ok(out)
    }

    pub fn scale(&self, c: C) -> Self {
        MatrixPolynomial {
            r: self.r,
            d: self.d,
            coeffs: self.coeffs.iter().map(|m| m.map(|z| z * c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    /// Commutator with a constant matrix: `[m, A(x)]` coefficientwise.
    pub fn commutator_with_constant(&self, m: &CMat) -> Self {
        MatrixPolynomial {
            r: self.r,
            d: self.d,
            coeffs: self.coeffs.iter().map(|a| m * a - a * m).collect(),
        }
    }

    /// Commutator of two matrix polynomials `[self, other]` by convolution.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let d = self.d + other.d;
        let mut out = MatrixPolynomial::zero(self.r, d);
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out.coeffs[i + j] += a * b - b * a;
            }
        }
        Ok(out)
    }

    /// Flat interleaved real representation (for integrators): entries in
    /// coefficient order, row-major, re then im.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.r * self.r * (self.d + 1));
        for c in &self.coeffs {
            for i in 0..self.r {
                for j in 0..self.r {
                    v.push(c[(i, j)].re);
                    v.push(c[(i, j)].im);
                }
            }
        }
        v
    }

    pub fn from_flat(r: usize, d: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != 2 * r * r * (d + 1) {
            return Err(Error::InvalidInput("flat length mismatch".into()));
        }
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut idx = 0;
        for _ in 0..=d {
            let mut m = CMat::zeros(r, r);
            for i in 0..r {
                for j in 0..r {
                    m[(i, j)] = C::new(flat[idx], flat[idx + 1]);
                    idx += 2;
                }
            }
            coeffs.push(m);
        }
        MatrixPolynomial::new(coeffs)
    }
}

/// Horner evaluation of `A(x0)`.
pub fn evaluate(a: &MatrixPolynomial, x0: C) -> CMat {
    let mut acc = a.coeffs[a.d].clone();
    for k in (0..a.d).rev() {
        acc = acc.map(|z| z * x0) + &a.coeffs[k];
    }
    acc
}

/// The spectral polynomial `P(x, y) = y^r + s_1(x) y^{r-1} + ... + s_r(x)`,
/// monic in `y` with coefficient polynomials in `x` of degree at most `i * d`.
#[derive(Debug, Clone)]
pub struct PlaneSpectralPolynomial {
    pub r: usize,
    pub d: usize,
    /// `s[0]` is `s_1`, ..., `s[r-1]` is `s_r`.
    pub s: Vec<Poly>,
}

impl PlaneSpectralPolynomial {
    pub fn eval(&self, x: C, y: C) -> C {
        let mut acc = C::new(1.0, 0.0);
        for si in &self.s {
            acc = acc * y + si.eval(x);
        }
        acc
    }

    /// Max coefficientwise distance to another spectral polynomial.
    pub fn coeff_distance(&self, other: &PlaneSpectralPolynomial) -> f64 {
        let mut worst: f64 = 0.0;
        let n = self.s.len().max(other.s.len());
        for i in 0..n {
            let a = self.s.get(i).cloned().unwrap_or_else(Poly::zero);
            let b = other.s.get(i).cloned().unwrap_or_else(Poly::zero);
            let deg = a.degree().max(b.degree());
            for k in 0..=deg {
                worst = worst.max((a.coeff(k) - b.coeff(k)).norm());
            }
        }
        worst
    }
}

/// Monic characteristic coefficients of a constant matrix by
/// Faddeev-LeVerrier: `det(yI - N) = y^r + c_1 y^{r-1} + ... + c_r`.
fn char_coeffs(n: &CMat) -> Vec<C> {
    let r = n.nrows();
    let mut coeffs = Vec::with_capacity(r);
    let mut m = n.clone();
    for k in 1..=r {
        let tr: C = (0..r).map(|i| m[(i, i)]).sum();
        let c = -tr / k as f64;
        coeffs.push(c);
        if k < r {
            let mut shifted = m.clone();
            for i in 0..r {
                shifted[(i, i)] += c;
            }
            m = n * shifted;
        }
    }
    coeffs
}

/// Characteristic polynomial `P(x, y) = det(y I - A(x))`, monic in `y`.
///
/// Coefficient polynomials are recovered by evaluating at `r*d + 1` roots of
/// unity and inverting the discrete Fourier transform; degrees are trimmed to
/// the structural bound `deg(s_i) <= i*d`.
pub fn char_poly(a: &MatrixPolynomial) -> PlaneSpectralPolynomial {
    let r = a.r();
    let d = a.d();
    let m = r * d + 1;
    let tau = std::f64::consts::TAU;
    // sample values of each s_i at the m-th roots of unity
    let mut samples: Vec<Vec<C>> = vec![Vec::with_capacity(m); r];
    for j in 0..m {
        let x = C::from_polar(1.0, tau * j as f64 / m as f64);
        let coeffs = char_coeffs(&evaluate(a, x));
        for i in 0..r {
            samples[i].push(coeffs[i]);
        }
    }
    let scale = samples
        .iter()
        .flat_map(|v| v.iter())
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    let mut s = Vec::with_capacity(r);
    for (i, vals) in samples.iter().enumerate() {
        let bound = (i + 1) * d;
        let mut cs = vec![C::default(); bound + 1];
        for (k, ck) in cs.iter_mut().enumerate() {
            let mut acc = C::default();
            for (j, &v) in vals.iter().enumerate() {
                let w = C::from_polar(1.0, -tau * (j * k) as f64 / m as f64);
                acc += v * w;
            }
            let v = acc / m as f64;
            // snap interpolation noise to zero
            *ck = if v.norm() < 1e-13 * scale { C::default() } else { v };
        }
        s.push(Poly::new(cs));
    }
    PlaneSpectralPolynomial { r, d, s }
}

/// The Lax vector field `[A^k(a), A(x)] / (x - a)`.
///
/// The commutator vanishes at `x = a`, so the division is exact; the result is
/// returned with the same degree-`d` shape as `A` and a zero `x^d` coefficient
/// (the flow fixes the leading term).
pub fn lax_vector_field(a: &MatrixPolynomial, k: u32, at: C) -> Result<MatrixPolynomial> {
    if k == 0 {
        return Err(Error::InvalidInput("Lax flow index k must be positive".into()));
    }
    let base = evaluate(a, at);
    let mut pw = CMat::identity(a.r(), a.r());
    for _ in 0..k {
        pw = &pw * &base;
    }
    let comm = a.commutator_with_constant(&pw);
    // synthetic division of the coefficient sequence by (x - at)
    let n = comm.d;
    let mut quot = MatrixPolynomial::zero(a.r(), a.d());
    let mut carry = comm.coeffs[n].clone();
    for kk in (1..=n).rev() {
        if kk - 1 < quot.coeffs.len() {
            quot.coeffs[kk - 1] = carry.clone();
        }
        carry = &comm.coeffs[kk - 1] + carry.map(|z| z * at);
    }
    let rem_norm = carry.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = comm.norm().max(a.norm()).max(1.0);
    if rem_norm > DIVISION_TOL * scale {
        return Err(Error::NonzeroRemainder { residual: rem_norm / scale });
    }
    Ok(quot)
}

/// Spectral shape of a constant matrix: clustered eigenvalues with
/// multiplicities, the count `s` of distinct eigenvalues, and regularity
/// (minimal polynomial equals characteristic polynomial, i.e. every
/// eigenvalue has geometric multiplicity one).
#[derive(Debug, Clone)]
pub struct EigenStructure {
    /// Clustered eigenvalues with algebraic multiplicities, sorted
    /// lexicographically by (re, im).
    pub eigenvalues: Vec<(C, usize)>,
    pub s: usize,
    pub regular: bool,
}

pub fn eigen_structure(j: &CMat) -> Result<EigenStructure> {
    eigen_structure_with_tol(j, CLUSTER_TOL)
}

/// Defective eigenvalues beyond 2x2 blocks are only resolved to roughly
/// eps^(1/m) by dense QR; raise `tol` accordingly when such inputs matter.
pub fn eigen_structure_with_tol(j: &CMat, tol: f64) -> Result<EigenStructure> {
    let r = j.nrows();
    let scale = j.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let abs_tol = tol * scale;
    let eigs = eig::eigenvalues(j)?;
    let (clusters, gap) = eig::cluster(&eigs, abs_tol);
    if gap < 10.0 * abs_tol {
        return Err(Error::IllConditioned { gap, tol: abs_tol });
    }
    let mut regular = true;
    for &(lambda, _) in &clusters {
        let shifted = j.clone() - CMat::identity(r, r) * lambda;
        let geo = r - numeric_rank(&shifted);
        if geo != 1 {
            regular = false;
        }
    }
    Ok(EigenStructure {
        s: clusters.len(),
        eigenvalues: clusters,
        regular,
    })
}

fn numeric_rank(m: &CMat) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-8 * smax).count()
}

/// Canonical nullspace basis of `m` by row echelon with partial pivoting:
/// free columns receive unit entries, so for diagonal matrices the basis is
/// the corresponding coordinate vectors.
fn canonical_nullspace(m: &CMat) -> Vec<nalgebra::DVector<C>> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = m.clone();
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = 1e-10 * scale;
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        // find pivot
        let mut best = row;
        for i in row..rows {
            if a[(i, col)].norm() > a[(best, col)].norm() {
                best = i;
            }
        }
        if row >= rows || a[(best, col)].norm() <= tol {
            continue;
        }
        a.swap_rows(row, best);
        let piv = a[(row, col)];
        for i in 0..rows {
            if i == row {
                continue;
            }
            let f = a[(i, col)] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for jj in col..cols {
                let upd = f * a[(row, jj)];
                a[(i, jj)] -= upd;
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = nalgebra::DVector::<C>::zeros(cols);
        v[fc] = C::new(1.0, 0.0);
        for (prow, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[(prow, fc)] / a[(prow, pc)];
        }
        basis.push(v);
    }
    basis
}

/// Full eigenbasis, cluster by cluster (clusters in lexicographic order),
/// together with the cluster sizes. Errors when the geometric multiplicities
/// do not sum to `r`.
fn eigenbasis(j: &CMat) -> Result<(CMat, Vec<usize>, Vec<C>)> {
    let r = j.nrows();
    let es = eigen_structure(j)?;
    let mut cols: Vec<nalgebra::DVector<C>> = Vec::new();
    let mut sizes = Vec::new();
    let mut lambdas = Vec::new();
    for &(lambda, _mult) in &es.eigenvalues {
        let shifted = j.clone() - CMat::identity(r, r) * lambda;
        let ns = canonical_nullspace(&shifted);
        sizes.push(ns.len());
        lambdas.push(lambda);
        cols.extend(ns);
    }
    if cols.len() != r {
        return Err(Error::NotDiagonalizable);
    }
    let mut s = CMat::zeros(r, r);
    for (k, v) in cols.iter().enumerate() {
        s.set_column(k, v);
    }
    Ok((s, sizes, lambdas))
}

/// Restriction of `u` to the eigenspace `E_i = Ker(J - lambda_i I)`:
/// the (i, i) diagonal block of `S^{-1} u S` in the canonical eigenbasis.
/// For diagonal `J` this is the literal diagonal minor of `u`.
pub fn restrict_to_eigenspace(u: &CMat, j: &CMat, i: usize) -> Result<CMat> {
    let (s, sizes, _) = eigenbasis(j)?;
    if i >= sizes.len() {
        return Err(Error::InvalidInput(format!(
            "eigenvalue index {i} out of range (s = {})",
            sizes.len()
        )));
    }
    let lu = s.clone().lu();
    let us = u * &s;
    let transformed = lu
        .solve(&us)
        .ok_or(Error::NotDiagonalizable)?;
    let offset: usize = sizes[..i].iter().sum();
    let mi = sizes[i];
    Ok(transformed.view((offset, offset), (mi, mi)).into_owned())
}

/// Dimension data (torus rank, additive rank) of the projective stabilizer of
/// `J`, optionally with subleading restriction constraints `K`.
///
/// For regular `J` this is `(s - 1, r - s)`. With constraints (`J` non-regular
/// diagonalizable, one regular diagonalizable `K_i` per eigenspace of
/// dimension > 1, in cluster order) the dimension is the kernel of the
/// linearized commutation + restriction conditions, which is a torus.
pub fn stabilizer_dimension(j: &CMat, k: Option<&[CMat]>) -> Result<(usize, usize)> {
    let r = j.nrows();
    let es = eigen_structure(j)?;
    match k {
        None => {
            if !es.regular {
                return Err(Error::InvalidInput(
                    "leading term is not regular; supply restriction matrices K".into(),
                ));
            }
            Ok((es.s - 1, r - es.s))
        }
        Some(ks) => {
            let (_, sizes, _) = eigenbasis(j)?; // errors if not diagonalizable
            let big: Vec<usize> = sizes.iter().cloned().filter(|&m| m > 1).collect();
            if big.len() != ks.len() {
                return Err(Error::InvalidInput(format!(
                    "expected {} restriction matrices, got {}",
                    big.len(),
                    ks.len()
                )));
            }
            // kernel of [ . , J] is block diagonal in the eigenbasis; on each
            // block of size > 1 impose commutation with K_i.
            let mut dim = 0usize;
            let mut ki = 0usize;
            for &mi in &sizes {
                if mi == 1 {
                    dim += 1;
                    continue;
                }
                let kmat = &ks[ki];
                ki += 1;
                if kmat.nrows() != mi || kmat.ncols() != mi {
                    return Err(Error::InvalidInput("restriction matrix size mismatch".into()));
                }
                let kes = eigen_structure(kmat)?;
                if kes.s != mi {
                    return Err(Error::NotDiagonalizable);
                }
                // ad_K on gl_mi: kernel dimension via SVD of K^T (x) I - I (x) K
                let n2 = mi * mi;
                let mut ad = CMat::zeros(n2, n2);
                for a in 0..mi {
                    for b in 0..mi {
                        for c in 0..mi {
                            for dd in 0..mi {
                                // entry ((a,b),(c,d)) of X -> K X - X K
                                let mut v = C::default();
                                if b == dd {
                                    v += kmat[(a, c)];
                                }
                                if a == c {
                                    v -= kmat[(dd, b)];
                                }
                                ad[(a * mi + b, c * mi + dd)] = v;
                            }
                        }
                    }
                }
                dim += n2 - numeric_rank(&ad);
            }
            Ok((dim - 1, 0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use rand::Rng;
    use rand::SeedableRng;

    fn cm(r: usize, vals: &[C]) -> CMat {
        CMat::from_row_slice(r, r, vals)
    }

    fn rand_matpoly(rng: &mut impl Rng, r: usize, d: usize) -> MatrixPolynomial {
        let coeffs = (0..=d)
            .map(|_| CMat::from_fn(r, r, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        MatrixPolynomial::new(coeffs).unwrap()
    }

    #[test]
    fn evaluate_identity_and_constant_cases() {
        // A = J x + 0 with J = diag(1, 2) at x = 1
        let j = cm(2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(2.0, 0.0)]);
        let a = MatrixPolynomial::new(vec![CMat::zeros(2, 2), j.clone()]).unwrap();
        assert_eq!(evaluate(&a, c64(1.0, 0.0)), j);
        // any A at 0 gives A_0
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let a = rand_matpoly(&mut rng, 3, 2);
        let diff = (evaluate(&a, C::default()) - a.coeff(0)).map(|z| z.norm()).max();
        assert!(diff < 1e-15);
    }

    #[test]
    fn evaluate_horner_matches_direct_sum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let a = rand_matpoly(&mut rng, 3, 3);
            let x = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let mut direct = CMat::zeros(3, 3);
            let mut xp = C::new(1.0, 0.0);
            for k in 0..=3 {
                direct += a.coeff(k).map(|z| z * xp);
                xp *= x;
            }
            let diff = (evaluate(&a, x) - direct).map(|z| z.norm()).max();
            assert!(diff < 1e-13);
        }
    }

    #[test]
    fn char_poly_diagonal_case() {
        // A = diag(x, -x): P = y^2 - x^2
        let one = c64(1.0, 0.0);
        let a = MatrixPolynomial::new(vec![
            CMat::zeros(2, 2),
            cm(2, &[one, C::default(), C::default(), -one]),
        ])
        .unwrap();
        let p = char_poly(&a);
        // s1 = 0, s2 = -x^2
        assert!(p.s[0].max_coeff_norm() < 1e-12);
        assert!((p.s[1].coeff(2) + one).norm() < 1e-12);
        assert!(p.s[1].coeff(0).norm() < 1e-12);
        assert!(p.s[1].coeff(1).norm() < 1e-12);
    }

    #[test]
    fn char_poly_degree_bounds_and_leading() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut a = rand_matpoly(&mut rng, 3, 2);
        // leading term with distinct eigenvalues and nonzero determinant
        *a.coeff_mut(2) = cm(
            3,
            &[
                c64(1.0, 0.0), C::default(), C::default(),
                C::default(), c64(2.0, 0.0), C::default(),
                C::default(), C::default(), c64(-1.5, 0.0),
            ],
        );
        let p = char_poly(&a);
        for (i, s) in p.s.iter().enumerate() {
            assert!(s.degree() <= (i + 1) * a.d());
        }
        // s_r has degree exactly r*d since det(J) != 0
        let sr = &p.s[2];
        assert!(sr.coeff(3 * 2).norm() > 1e-8);
    }

    #[test]
    fn char_poly_conjugation_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let a = rand_matpoly(&mut rng, 3, 2);
            let rmat = CMat::from_fn(3, 3, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            if rmat.determinant().norm() < 0.05 {
                continue;
            }
            let rinv = rmat.clone().try_inverse().unwrap();
            let conj = MatrixPolynomial::new(a.coeffs().iter().map(|cc| &rmat * cc * &rinv).collect()).unwrap();
            let d = char_poly(&a).coeff_distance(&char_poly(&conj));
            assert!(d < 1e-10, "conjugation invariance broke: {d}");
        }
    }

    #[test]
    fn lax_field_one_step_expansion() {
        // A = J x + A0, k = 1, a = 0 -> constant [A0, J]
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a = rand_matpoly(&mut rng, 3, 1);
        let f = lax_vector_field(&a, 1, C::default()).unwrap();
        let expect = a.coeff(0) * a.coeff(1) - a.coeff(1) * a.coeff(0);
        let diff = (&f.coeffs()[0] - expect).map(|z| z.norm()).max();
        assert!(diff < 1e-12);
        assert!(f.coeff(1).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-14);
    }

    #[test]
    fn lax_field_diagonal_family_is_zero() {
        let one = c64(1.0, 0.0);
        let coeffs = vec![
            cm(2, &[c64(0.3, 0.1), C::default(), C::default(), c64(-0.2, 0.4)]),
            cm(2, &[one, C::default(), C::default(), c64(2.0, 0.0)]),
        ];
        let a = MatrixPolynomial::new(coeffs).unwrap();
        let f = lax_vector_field(&a, 2, c64(0.7, 0.2)).unwrap();
        assert!(f.norm() < 1e-13);
    }

    #[test]
    fn lax_field_division_trace_and_leading() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let a = rand_matpoly(&mut rng, 3, 2);
            let at = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let f = lax_vector_field(&a, 2, at).unwrap();
            // top coefficient zero
            assert!(f.leading().iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
            // traceless as a polynomial
            for c in f.coeffs() {
                let tr: C = (0..3).map(|i| c[(i, i)]).sum();
                assert!(tr.norm() < 1e-11);
            }
        }
    }

    #[test]
    fn eigen_structure_examples() {
        let one = c64(1.0, 0.0);
        let j = cm(2, &[one, C::default(), C::default(), c64(2.0, 0.0)]);
        let es = eigen_structure(&j).unwrap();
        assert_eq!(es.s, 2);
        assert!(es.regular);

        let id = CMat::identity(2, 2);
        let es = eigen_structure(&id).unwrap();
        assert_eq!(es.s, 1);
        assert!(!es.regular);

        let nil = cm(2, &[C::default(), one, C::default(), C::default()]);
        let es = eigen_structure(&nil).unwrap();
        assert_eq!(es.s, 1);
        assert!(es.regular);
    }

    #[test]
    fn restrict_examples() {
        let one = c64(1.0, 0.0);
        // J = diag(1,1,2): restriction to E(1) is the top-left 2x2 block
        let j = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![one, one, c64(2.0, 0.0)]));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let u = CMat::from_fn(3, 3, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let b = restrict_to_eigenspace(&u, &j, 0).unwrap();
        for i in 0..2 {
            for jj in 0..2 {
                assert!((b[(i, jj)] - u[(i, jj)]).norm() < 1e-10);
            }
        }
        // u = I restricts to identity
        let b = restrict_to_eigenspace(&CMat::identity(3, 3), &j, 0).unwrap();
        assert!((b.clone() - CMat::identity(2, 2)).map(|z| z.norm()).max() < 1e-12);
        // J = diag(1,2), i for lambda=2: the (2,2) entry
        let j2 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![one, c64(2.0, 0.0)]));
        let u2 = cm(2, &[c64(1.0, 2.0), c64(3.0, 0.0), c64(0.0, -1.0), c64(5.0, 5.0)]);
        let b = restrict_to_eigenspace(&u2, &j2, 1).unwrap();
        assert_eq!(b.nrows(), 1);
        assert!((b[(0, 0)] - c64(5.0, 5.0)).norm() < 1e-12);
    }

    #[test]
    fn stabilizer_examples() {
        let one = c64(1.0, 0.0);
        let j = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![one, c64(2.0, 0.0)]));
        assert_eq!(stabilizer_dimension(&j, None).unwrap(), (1, 0));
        // regular with s = r = 4
        let j4 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            one, c64(2.0, 0.0), c64(3.0, 0.0), c64(-1.0, 1.0),
        ]));
        assert_eq!(stabilizer_dimension(&j4, None).unwrap(), (3, 0));
        // J = diag(1,1,2) with K = diag(3,4) on the 2-dim eigenspace
        let j = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![one, one, c64(2.0, 0.0)]));
        let kmat = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(3.0, 0.0), c64(4.0, 0.0)]));
        assert_eq!(stabilizer_dimension(&j, Some(&[kmat])).unwrap(), (2, 0));
    }

    #[test]
    fn division_residual_small_for_random_inputs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let a = rand_matpoly(&mut rng, 2, 2);
            let at = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            // would error if the remainder exceeded DIVISION_TOL * scale
            lax_vector_field(&a, 3, at).unwrap();
        }
    }
}
