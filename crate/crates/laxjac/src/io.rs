//! JSON and CSV serialization of the domain objects.
//!
//! Complex numbers serialize as `[re, im]` pairs. Matrices are row-major.
//! CSV output carries a header row and RFC-4180 quoting.

use crate::curves::{ExtendedLattice, PeriodData, QuarticCurve};
use crate::error::{Error, Result};
use crate::flows::Trajectory;
use crate::jacobian::FitReport;
use crate::matpoly::MatrixPolynomial;
use crate::monodromy::{LocusResult, MonodromyResult};
use crate::pendulum::{self, PendulumState};
use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use serde_json::{json, Value};

type C = Complex64;

pub fn complex_json(z: C) -> Value {
    json!([z.re, z.im])
}

pub fn parse_complex(v: &Value) -> Result<C> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput("expected [re, im] pair".into()))?;
    if arr.len() != 2 {
        return Err(Error::InvalidInput("expected [re, im] pair".into()));
    }
    let re = arr[0].as_f64().ok_or_else(|| Error::InvalidInput("re must be a number".into()))?;
    let im = arr[1].as_f64().ok_or_else(|| Error::InvalidInput("im must be a number".into()))?;
    Ok(C::new(re, im))
}

/// `{"r": .., "d": .., "coeffs": [[[re, im], ..], ..]}` with row-major
/// matrices and ascending coefficient index.
pub fn matrix_polynomial_to_json(a: &MatrixPolynomial) -> Value {
    let coeffs: Vec<Value> = a
        .coeffs()
        .iter()
        .map(|m| {
            let entries: Vec<Value> = (0..a.r())
                .flat_map(|i| (0..a.r()).map(move |j| (i, j)))
                .map(|(i, j)| complex_json(m[(i, j)]))
                .collect();
            Value::Array(entries)
        })
        .collect();
    json!({ "r": a.r(), "d": a.d(), "coeffs": coeffs })
}

pub fn matrix_polynomial_from_json(v: &Value) -> Result<MatrixPolynomial> {
    let r = v["r"].as_u64().ok_or_else(|| Error::InvalidInput("missing r".into()))? as usize;
    let d = v["d"].as_u64().ok_or_else(|| Error::InvalidInput("missing d".into()))? as usize;
    let coeffs = v["coeffs"]
        .as_array()
        .ok_or_else(|| Error::InvalidInput("missing coeffs".into()))?;
    if coeffs.len() != d + 1 {
        return Err(Error::InvalidInput(format!("expected {} coefficients, got {}", d + 1, coeffs.len())));
    }
    let mut out = Vec::with_capacity(d + 1);
    for cv in coeffs {
        let entries = cv
            .as_array()
            .ok_or_else(|| Error::InvalidInput("coefficient must be an array".into()))?;
        if entries.len() != r * r {
            return Err(Error::InvalidInput(format!("coefficient must have {} entries", r * r)));
        }
        let mut m = DMatrix::<C>::zeros(r, r);
        for (idx, e) in entries.iter().enumerate() {
            m[(idx / r, idx % r)] = parse_complex(e)?;
        }
        out.push(m);
    }
    MatrixPolynomial::new(out)
}

/// `{"x": [[re, im]; 3], "v": [[re, im]; 3]}`.
pub fn pendulum_state_to_json(s: &PendulumState) -> Value {
    json!({
        "x": s.x.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
        "v": s.v.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
    })
}

pub fn pendulum_state_from_json(v: &Value) -> Result<PendulumState> {
    let get = |key: &str| -> Result<Vector3<C>> {
        let arr = v[key]
            .as_array()
            .ok_or_else(|| Error::InvalidInput(format!("missing {key}")))?;
        if arr.len() != 3 {
            return Err(Error::InvalidInput(format!("{key} must have 3 components")));
        }
        Ok(Vector3::new(
            parse_complex(&arr[0])?,
            parse_complex(&arr[1])?,
            parse_complex(&arr[2])?,
        ))
    };
    Ok(PendulumState::new_unchecked(get("x")?, get("v")?))
}

/// RFC-4180 field quoting (applied to every textual field).
pub fn rfc4180_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const TRAJECTORY_COLUMNS: [&str; 20] = [
    "t", "x1_re", "x1_im", "x2_re", "x2_im", "x3_re", "x3_im", "v1_re", "v1_im", "v2_re",
    "v2_im", "v3_re", "v3_im", "H_re", "H_im", "K_re", "K_im", "res_norm", "res_orth",
    "invariant_drift",
];

fn trajectory_row(t: f64, s: &PendulumState, drift: f64) -> Vec<f64> {
    let (h, k) = pendulum::integrals(s);
    let (rn, ro) = s.constraint_residuals();
    let mut row = vec![t];
    for z in s.x.iter().chain(s.v.iter()) {
        row.push(z.re);
        row.push(z.im);
    }
    row.extend_from_slice(&[h.re, h.im, k.re, k.im, rn, ro, drift]);
    row
}

/// Trajectory table as JSON: column names plus one row per sample.
pub fn trajectory_to_json(traj: &Trajectory<PendulumState>) -> Value {
    let rows: Vec<Value> = traj
        .states
        .iter()
        .zip(traj.times.iter())
        .zip(traj.diagnostics.iter())
        .map(|((s, &t), d)| {
            Value::Array(
                trajectory_row(t, s, d.invariant_drift)
                    .into_iter()
                    .map(|x| json!(x))
                    .collect(),
            )
        })
        .collect();
    json!({
        "columns": TRAJECTORY_COLUMNS,
        "direction": complex_json(traj.direction),
        "integrator_tol": traj.integrator_tol,
        "rows": rows,
    })
}

pub fn trajectory_to_csv(traj: &Trajectory<PendulumState>) -> String {
    let mut out = String::new();
    out.push_str(&TRAJECTORY_COLUMNS.map(rfc4180_field).join(","));
    out.push('\n');
    for ((s, &t), d) in traj.states.iter().zip(traj.times.iter()).zip(traj.diagnostics.iter()) {
        let row = trajectory_row(t, s, d.invariant_drift);
        let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `{"f": ..., "branch_points": ..., "disc": ..., "singular": ...}`.
pub fn curve_to_json(curve: &QuarticCurve) -> Value {
    json!({
        "f": curve.f().coeffs().iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
        "branch_points": curve.branch_points().iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
        "disc": complex_json(curve.disc()),
        "singular": curve.is_singular(),
        "genus": curve.genus(),
        "points_at_infinity": crate::curves::POINTS_AT_INFINITY,
        "min_branch_separation": curve.min_branch_separation(),
    })
}

/// Period data plus lattice generators and measured residues.
pub fn periods_to_json(pd: &PeriodData, lattice: &ExtendedLattice) -> Value {
    json!({
        "omega_a": complex_json(pd.omega_a),
        "omega_b": complex_json(pd.omega_b),
        "eta_a": complex_json(pd.eta_a),
        "eta_b": complex_json(pd.eta_b),
        "residue_gen": complex_json(pd.residue_gen),
        "third_kind_scale": complex_json(pd.third_kind_scale),
        "cycle_spec": {"a": [pd.cycle_spec.a.0, pd.cycle_spec.a.1], "b": [pd.cycle_spec.b.0, pd.cycle_spec.b.1]},
        "generators": lattice.g.iter()
            .map(|g| json!([complex_json(g[0]), complex_json(g[1])]))
            .collect::<Vec<_>>(),
        "residues": [complex_json(pd.residue_check.0), complex_json(pd.residue_check.1)],
        "lattice_min_singular_value": lattice.min_singular_value(),
    })
}

/// `{"velocity": [[re, im], [re, im]], "residual": .., "segments": ..,
/// "theta_crossings": [t, ..]}`.
pub fn fit_report_to_json(fit: &FitReport) -> Value {
    json!({
        "velocity": [complex_json(fit.velocity[0]), complex_json(fit.velocity[1])],
        "intercept": [complex_json(fit.intercept[0]), complex_json(fit.intercept[1])],
        "residual": fit.residual,
        "segments": fit.segments,
        "theta_crossings": fit.theta_crossings,
        "samples_used": fit.samples_used,
    })
}

pub fn monodromy_to_json(m: &MonodromyResult) -> Value {
    json!({
        "m": m.m,
        "m_ext": m.m_ext,
        "continuation_residual": m.continuation_residual,
    })
}

/// Discriminant locus as CSV: segment rows carry both endpoints, isolated
/// zeros leave the second endpoint empty.
pub fn locus_to_csv(locus: &LocusResult) -> String {
    let mut out = String::from("kind,h1,k1,h2,k2\n");
    for &((h1, k1), (h2, k2)) in &locus.segments {
        out.push_str(&format!("segment,{h1},{k1},{h2},{k2}\n"));
    }
    for &(h, k) in &locus.isolated {
        out.push_str(&format!("isolated,{h},{k},,\n"));
    }
    out
}

/// Frequency grid CSV: `h,k,omega1,omega2`.
pub fn frequency_grid_to_csv(rows: &[(f64, f64, f64, f64)]) -> String {
    let mut out = String::from("h,k,omega1,omega2\n");
    for &(h, k, o1, o2) in rows {
        out.push_str(&format!("{h},{k},{o1},{o2}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::pendulum::LaxVariables;

    #[test]
    fn matrix_polynomial_roundtrip() {
        let s = PendulumState::from_real([0.6, 0.0, 0.8], [0.0, 1.0, 0.0]).unwrap();
        let (a, _) = pendulum::lax_matrices(&LaxVariables::from_state(&s));
        let v = matrix_polynomial_to_json(&a);
        assert_eq!(v["r"], 2);
        assert_eq!(v["d"], 2);
        // constant term row-major: [V2, U2, W2, -V2]
        assert_eq!(v["coeffs"][0][0][0], 0.6);
        assert_eq!(v["coeffs"][0][1][0], 0.8);
        let back = matrix_polynomial_from_json(&v).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn pendulum_state_roundtrip() {
        let s = PendulumState::new_unchecked(
            Vector3::new(c64(0.6, 0.1), c64(0.0, -0.2), c64(0.8, 0.0)),
            Vector3::new(c64(0.0, 0.0), c64(1.0, 0.3), c64(0.0, 0.0)),
        );
        let v = pendulum_state_to_json(&s);
        let back = pendulum_state_from_json(&v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = PendulumState::from_real([0.6, 0.0, 0.8], [0.0, 1.0, 0.0]).unwrap();
        let traj = crate::flows::integrate_pendulum(&s, 1.0, 1e-10, 5).unwrap();
        let csv = trajectory_to_csv(&traj);
        let lines: Vec<&str> = csv.trim().lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[0].starts_with("t,x1_re"));
        assert_eq!(lines[1].split(',').count(), TRAJECTORY_COLUMNS.len());
    }

    #[test]
    fn quoting_rule() {
        assert_eq!(rfc4180_field("plain"), "plain");
        assert_eq!(rfc4180_field("a,b"), "\"a,b\"");
        assert_eq!(rfc4180_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
