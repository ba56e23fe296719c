//! Univariate complex polynomials with dense coefficient storage.
//!
//! Coefficients are stored in ascending order (`coeffs[k]` multiplies `x^k`).
//! The zero polynomial is represented by a single zero coefficient.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients, trimming exact-zero
    /// leading terms.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(|c| c.norm() == 0.0).unwrap_or(false) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::default());
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly::new(vec![])
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// Monomial c * x^k.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut v = vec![Complex64::default(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of x^k (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Largest coefficient magnitude; 0 for the zero polynomial.
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Degree after discarding leading coefficients below `tol` in magnitude.
    pub fn degree_with_tol(&self, tol: f64) -> usize {
        for k in (0..self.coeffs.len()).rev() {
            if self.coeffs[k].norm() > tol {
                return k;
            }
        }
        0
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Poly::new(v)
    }

    pub fn scale(&self, c: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Poly::new(v)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut v = vec![Complex64::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }

    /// Synthetic (Horner) division by the linear factor (x - a).
    ///
    /// Returns the quotient and the scalar remainder p(a).
    pub fn divide_by_linear(&self, a: Complex64) -> (Poly, Complex64) {
        let n = self.coeffs.len();
        if n == 1 {
            return (Poly::zero(), self.coeffs[0]);
        }
        let mut q = vec![Complex64::default(); n - 1];
        let mut carry = self.coeffs[n - 1];
        for k in (1..n).rev() {
            q[k - 1] = carry;
            carry = self.coeffs[k - 1] + a * carry;
        }
        (Poly::new(q), carry)
    }

    /// Monic rescaling. Errors when the leading coefficient underflows.
    pub fn monic(&self) -> Result<Poly> {
        let lead = *self.coeffs.last().unwrap();
        if lead.norm() < 1e-300 {
            return Err(Error::InvalidInput(
                "cannot make polynomial with vanishing leading coefficient monic".into(),
            ));
        }
        Ok(self.scale(1.0 / lead))
    }

    /// All complex roots (companion-matrix eigenvalues polished by two Newton
    /// steps); see [`crate::matpoly::eigen_structure`] for the eigensolver.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        crate::eig::poly_roots(self)
    }

    /// Discriminant of a monic polynomial from its roots:
    /// product of (r_i - r_j)^2 over i < j.
    pub fn discriminant_from_roots(roots: &[Complex64]) -> Complex64 {
        let mut d = Complex64::new(1.0, 0.0);
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                let diff = roots[i] - roots[j];
                d *= diff * diff;
            }
        }
        d
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Poly {
        let mut p = Poly::constant(Complex64::new(1.0, 0.0));
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, Complex64::new(1.0, 0.0)]));
        }
        p
    }
}
