//! The quartic spectral curve `mu^2 = f(lambda)` and its period geometry.
//!
//! A smooth quartic branch locus gives an elliptic curve with two points at
//! infinity (the branches `mu ~ +-lambda^2`). Singularizing by gluing the two
//! infinite points produces a rank-3 period lattice in C^2, spanned by the
//! (first kind, third kind) period pairs over an a/b cycle basis plus the
//! residue generator `(0, 2 pi i)`.

mod abel;
mod agm;
pub(crate) mod periods;
pub(crate) mod quad;

pub use abel::abel_map_extended;
pub use agm::{agm_optimal, periods_agm};
pub use periods::{
    extended_lattice, periods, periods_any_basis, periods_first_kind, periods_third_kind,
    reciprocity_residual, CycleSpec, PeriodData,
};
pub use quad::canonical_sqrt;

use crate::error::{Error, Result};
use crate::pendulum::{self, LaxVariables};
use crate::poly::Poly;
use num_complex::Complex64;

type C = Complex64;

/// Number of points at infinity on the smooth model (the two branches of
/// `mu ~ +-lambda^2`), equal to the degree of the modulus.
pub const POINTS_AT_INFINITY: usize = 2;

/// Absolute discriminant threshold below which a curve is flagged singular.
pub const SINGULAR_DISC_TOL: f64 = 1e-10;

/// Minimal distance of any path operation from a branch point.
pub const BRANCH_PROXIMITY_TOL: f64 = 1e-6;

/// Smooth-model hyperelliptic curve `mu^2 = f(lambda)` with monic quartic `f`.
#[derive(Debug, Clone)]
pub struct QuarticCurve {
    f: Poly,
    branch_points: [C; 4],
    disc: C,
    singular: bool,
}

impl QuarticCurve {
    /// Pendulum family `f = lambda^4 + 2k lambda^3 + 2h lambda^2 + 1`.
    pub fn from_hk(h: C, k: C) -> Result<Self> {
        Self::from_poly(pendulum::curve_poly(h, k))
    }

    /// Any monic quartic. Roots come from companion-matrix eigenvalues with
    /// Newton polish and are ordered lexicographically by (re, im) with a
    /// fuzzy tie on the real part.
    pub fn from_poly(f: Poly) -> Result<Self> {
        if f.degree() != 4 {
            return Err(Error::InvalidInput("spectral curve polynomial must have degree 4".into()));
        }
        if (f.coeff(4) - C::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidInput("spectral curve polynomial must be monic".into()));
        }
        let mut roots = f.roots()?;
        lex_sort_fuzzy(&mut roots);
        let branch_points = [roots[0], roots[1], roots[2], roots[3]];
        let disc = Poly::discriminant_from_roots(&branch_points);
        let singular = disc.norm() < SINGULAR_DISC_TOL;
        Ok(QuarticCurve { f, branch_points, disc, singular })
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn branch_points(&self) -> &[C; 4] {
        &self.branch_points
    }

    pub fn disc(&self) -> C {
        self.disc
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Geometric genus of the smooth model (only meaningful off the
    /// discriminant locus).
    pub fn genus(&self) -> usize {
        1
    }

    /// Minimal pairwise branch-point separation.
    pub fn min_branch_separation(&self) -> f64 {
        let b = &self.branch_points;
        let mut m = f64::INFINITY;
        for i in 0..4 {
            for j in (i + 1)..4 {
                m = m.min((b[i] - b[j]).norm());
            }
        }
        m
    }

    /// Distance from `z` to the nearest branch point.
    pub fn branch_distance(&self, z: C) -> f64 {
        self.branch_points
            .iter()
            .map(|&b| (z - b).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Ensures the curve is smooth for period operations.
    pub fn require_smooth(&self) -> Result<()> {
        if self.singular {
            return Err(Error::SingularCurve { disc_abs: self.disc.norm() });
        }
        Ok(())
    }
}

/// Lexicographic root ordering with a fuzzy tie on the real part, so that
/// symmetric configurations (roots on a common vertical line up to roundoff)
/// order deterministically by imaginary part.
pub(crate) fn lex_sort_fuzzy(roots: &mut [C]) {
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    roots.sort_by(|a, b| {
        let qa = (a.re / tol).round();
        let qb = (b.re / tol).round();
        (qa, a.im)
            .partial_cmp(&(qb, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// A point of the curve: `mu^2 = f(lambda)` with a branch label relative to
/// the canonical square root (+1 when `mu` matches it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorPoint {
    pub lambda: C,
    pub mu: C,
    pub sheet: i8,
}

impl DivisorPoint {
    pub fn new(curve: &QuarticCurve, lambda: C, mu: C) -> Self {
        let canon = canonical_sqrt(curve.f().eval(lambda));
        let sheet = if (mu - canon).norm() <= (mu + canon).norm() { 1 } else { -1 };
        DivisorPoint { lambda, mu, sheet }
    }

    /// |mu^2 - f(lambda)|.
    pub fn on_curve_residual(&self, curve: &QuarticCurve) -> f64 {
        (self.mu * self.mu - curve.f().eval(self.lambda)).norm()
    }
}

/// Which Lax-matrix entry supplies the divisor quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DivisorEntry {
    /// Zeros of the (1,2) entry, `mu = v1 lambda + v2`.
    #[default]
    UpperRight,
    /// Zeros of the (2,1) entry, `mu = -(v1 lambda + v2)` (the hyperelliptic
    /// involution of the other choice, up to a lattice translation).
    LowerLeft,
}

/// Minimal root separation below which the divisor is declared degenerate.
pub const DIVISOR_SEPARATION_TOL: f64 = 1e-8;

/// The degree-2 eigenvector divisor of the pendulum Lax matrix.
pub fn eigenvector_divisor(lv: &LaxVariables) -> Result<[DivisorPoint; 2]> {
    eigenvector_divisor_entry(lv, DivisorEntry::UpperRight)
}

pub fn eigenvector_divisor_entry(lv: &LaxVariables, entry: DivisorEntry) -> Result<[DivisorPoint; 2]> {
    let (_, _, f) = pendulum::spectral_invariants(lv)?;
    let (b, c, sign) = match entry {
        DivisorEntry::UpperRight => (lv.u1, lv.u2, C::new(1.0, 0.0)),
        DivisorEntry::LowerLeft => (lv.w1, lv.w2, C::new(-1.0, 0.0)),
    };
    let roots = crate::eig::quadratic_roots(C::new(1.0, 0.0), b, c);
    let sep = (roots[0] - roots[1]).norm();
    if sep <= DIVISOR_SEPARATION_TOL {
        return Err(Error::DegenerateDivisor { sep });
    }
    let mk = |lambda: C| {
        let mu = sign * (lv.v1 * lambda + lv.v2);
        let canon = canonical_sqrt(f.eval(lambda));
        let sheet = if (mu - canon).norm() <= (mu + canon).norm() { 1i8 } else { -1 };
        DivisorPoint { lambda, mu, sheet }
    };
    Ok([mk(roots[0]), mk(roots[1])])
}

/// Rank-3 lattice in C^2 spanned by the two cycle period pairs and the
/// residue generator; the first components of g1, g2 span the ordinary
/// period lattice and g3 = (0, 2 pi i) exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedLattice {
    pub g: [[C; 2]; 3],
}

impl ExtendedLattice {
    pub fn residue_generator() -> [C; 2] {
        [C::default(), C::new(0.0, std::f64::consts::TAU)]
    }

    /// First components of (g1, g2): the rank-2 sublattice in C.
    pub fn sublattice(&self) -> (C, C) {
        (self.g[0][0], self.g[1][0])
    }

    /// Real 4x3 generator matrix (rows: re z1, im z1, re z2, im z2).
    pub fn basis_matrix(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::<f64>::zeros(4, 3);
        for (j, g) in self.g.iter().enumerate() {
            m[(0, j)] = g[0].re;
            m[(1, j)] = g[0].im;
            m[(2, j)] = g[1].re;
            m[(3, j)] = g[1].im;
        }
        m
    }

    /// Smallest singular value of the real generator matrix; the lattice has
    /// rank 3 when this is bounded away from zero.
    pub fn min_singular_value(&self) -> f64 {
        let sv = self.basis_matrix().svd(false, false).singular_values;
        sv.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Norm of the shortest nonzero lattice vector among small integer
    /// combinations (enough for tracking and reduction safety margins).
    pub fn shortest_vector_norm(&self) -> f64 {
        let mut best = f64::INFINITY;
        for m1 in -3i64..=3 {
            for m2 in -3i64..=3 {
                for m3 in -3i64..=3 {
                    if m1 == 0 && m2 == 0 && m3 == 0 {
                        continue;
                    }
                    let mut n2 = 0.0;
                    for c in 0..2 {
                        let z = self.g[0][c] * m1 as f64 + self.g[1][c] * m2 as f64 + self.g[2][c] * m3 as f64;
                        n2 += z.norm_sqr();
                    }
                    best = best.min(n2.sqrt());
                }
            }
        }
        best
    }
}
