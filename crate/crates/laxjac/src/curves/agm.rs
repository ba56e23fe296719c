//! Arithmetic-geometric mean periods: the independent oracle for the contour
//! integrals.
//!
//! The complete integral between two branch points reduces to
//! `pi / AGM(U13, U23)` with the Carlson-style arguments built from the four
//! pairwise square roots; the optimal AGM takes the square-root sign keeping
//! `|a - b| <= |a + b|` at every step, and the two arguments are put in a
//! common half-plane first (the relative sign that selects the cycle
//! collapsing onto the chosen branch pair).

use super::QuarticCurve;
use crate::error::{Error, Result};
use num_complex::Complex64;

type C = Complex64;

const AGM_MAX_ITER: usize = 80;

/// Optimal complex AGM: the square-root sign is chosen at every step so that
/// `|a - b| <= |a + b|` (ties broken towards `Im(b/a) > 0`).
pub fn agm_optimal(mut a: C, mut b: C) -> Result<C> {
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::AgmNonconvergence);
    }
    for _ in 0..AGM_MAX_ITER {
        if (a - b).norm() <= 1e-15 * a.norm() {
            return Ok(a);
        }
        let a1 = (a + b) * 0.5;
        let mut b1 = (a * b).sqrt();
        let d_minus = (a1 - b1).norm();
        let d_plus = (a1 + b1).norm();
        if d_minus > d_plus {
            b1 = -b1;
        } else if (d_minus - d_plus).abs() < 1e-14 * a1.norm() && (b1 / a1).im <= 0.0 {
            b1 = -b1;
        }
        a = a1;
        b = b1;
        if a.norm() < 1e-280 {
            return Err(Error::AgmNonconvergence);
        }
    }
    Err(Error::AgmNonconvergence)
}

/// Cycle period around the pair (e1, e2) with complement (e3, e4):
/// `2 pi / AGM(U13, U23)`.
fn pair_period(e1: C, e2: C, e3: C, e4: C) -> Result<C> {
    let x = e2;
    let y = e1;
    let x1 = (x - e1).sqrt();
    let x3 = (x - e3).sqrt();
    let x4 = (x - e4).sqrt();
    let y2 = (y - e2).sqrt();
    let y3 = (y - e3).sqrt();
    let y4 = (y - e4).sqrt();
    let u13 = x1 * x3 * y2 * y4 / (x - y);
    let mut u23 = y2 * y3 * x1 * x4 / (x - y);
    // common half-plane: this relative sign selects the vanishing cycle of
    // the (e1, e2) collision rather than a companion period
    if (u23 / u13).re < 0.0 {
        u23 = -u23;
    }
    let m = agm_optimal(u13, u23)?;
    Ok(C::new(2.0 * std::f64::consts::PI, 0.0) / m)
}

/// AGM periods over the default cycle pairing ((0,1), (1,2)) of the ordered
/// branch points. Signs are only determined up to the hyperelliptic
/// involution, matching the contour periods up to a per-cycle sign.
pub fn periods_agm(curve: &QuarticCurve) -> Result<(C, C)> {
    curve.require_smooth()?;
    let b = curve.branch_points();
    let omega_a = pair_period(b[0], b[1], b[2], b[3])?;
    let omega_b = pair_period(b[1], b[2], b[0], b[3])?;
    Ok((omega_a, omega_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn agm_classical_values() {
        // AGM(1, 1/sqrt(2)) = 0.8472130847939792 (Gauss's lemniscatic value)
        let m = agm_optimal(c64(1.0, 0.0), c64(1.0 / 2.0_f64.sqrt(), 0.0)).unwrap();
        assert!((m.re - 0.8472130847939792).abs() < 1e-15);
        assert!(m.im.abs() < 1e-15);
        // scaling: AGM(c a, c b) = c AGM(a, b)
        let c = c64(0.3, 1.1);
        let m2 = agm_optimal(c * c64(1.0, 0.0), c * c64(1.0 / 2.0_f64.sqrt(), 0.0)).unwrap();
        assert!((m2 - c * m).norm() < 1e-13);
    }

    #[test]
    fn real_root_chain_period() {
        // (lambda^2 - 1)(lambda^2 - 4): cycle around (-1, 1) has period
        // 2 * int_{-1}^{1} dt / sqrt((t^2-1)(t^2-4)) = 2 * K(1/4) = 3.37150...
        let roots = [c64(-2.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0), c64(2.0, 0.0)];
        let p = pair_period(roots[1], roots[2], roots[0], roots[3]).unwrap();
        let expected = 2.0 * 1.6857503548125960; // 2 K(m = 1/4)
        assert!((p.norm() - expected).abs() < 1e-12, "{}", p.norm());
    }

    #[test]
    fn degenerate_pair_diverges_logarithmically() {
        // as the complement pair collides the (0,1)-cycle period diverges;
        // as (e1, e2) collide it stays bounded. Monotone growth check along
        // the ray h -> 1 of |omega| for the vanishing-dual cycle.
        let mut prev = 0.0;
        for h in [1.5, 1.2, 1.05, 1.005] {
            let curve = QuarticCurve::from_hk(c64(h, 0.0), c64(0.0, 0.0)).unwrap();
            let (_, ob) = periods_agm(&curve).unwrap();
            // the b-cycle couples the two collision pairs: diverges
            assert!(ob.norm() > prev, "h={h}: {} vs {prev}", ob.norm());
            prev = ob.norm();
        }
    }
}
