//! Command-line front end: reproducible experiments with JSON/CSV artifacts.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on numerical failures
//! (the error is still written to the artifact).

use clap::{Parser, Subcommand, ValueEnum};
use laxjac::curves::{periods, periods_agm, reciprocity_residual, CycleSpec, QuarticCurve};
use laxjac::io;
use laxjac::jacobian;
use laxjac::monodromy::{self, LoopSpec};
use laxjac::pendulum::{self, LaxVariables, PendulumState};
use laxjac::{c64, flows, selftest};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "laxjac",
    version,
    about = "Lax flows, spectral curves, extended period lattices and their straight-line dynamics"
)]
struct Cli {
    /// Integrator / quadrature accuracy target (within [1e-14, 1e-3]).
    #[arg(long, global = true, env = "LAXJAC_TOL", default_value_t = 1e-12)]
    tol: f64,

    /// Seed for random-state sampling (selftest); same seed, same output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Artifact format; tabular commands honor csv, the rest emit JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the pendulum from a real state and export the trajectory.
    Simulate {
        /// Position, comma-separated reals x1,x2,x3 on the unit sphere.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        /// Velocity, comma-separated reals v1,v2,v3 with <x,v> = 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<f64>,
        /// Integration horizon.
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        /// Number of equally spaced samples (including both endpoints).
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Integrals, Lax variables, relation residuals and the Lax identity at
    /// a state.
    Invariants {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<f64>,
    },
    /// The spectral curve at (h, k): branch points, discriminant, smoothness.
    Curve {
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
    },
    /// Period integrals, the extended lattice, residues and consistency
    /// oracles at (h, k).
    Periods {
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
    },
    /// Straight-line fit of the Abel image of a trajectory.
    AbelFit {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<f64>,
        #[arg(long, default_value_t = 5.0)]
        t: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Rotation equivariance of the Abel image at a state.
    Equivariance {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<f64>,
        #[arg(long, default_value_t = 0.7)]
        theta: f64,
    },
    /// Monodromy of the period lattice around a loop, or the discriminant
    /// locus on a grid (--locus).
    Monodromy {
        /// Loop center h,k.
        #[arg(long, value_delimiter = ',', default_value = "1,0", allow_hyphen_values = true)]
        center: Vec<f64>,
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        orientation: i8,
        /// Emit the discriminant locus on a grid instead of a loop result.
        #[arg(long, default_value_t = false)]
        locus: bool,
        #[arg(long, value_delimiter = ',', default_value = "-2,2", allow_hyphen_values = true)]
        h_range: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "-2,2", allow_hyphen_values = true)]
        k_range: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "81,81")]
        grid: Vec<usize>,
    },
    /// Frequencies of the real flows, their Jacobian, and the direct
    /// rotation-number measurement; optionally a frequency grid (--grid-n).
    Frequency {
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// Central-difference step for the Jacobian.
        #[arg(long, default_value_t = 0.02)]
        step: f64,
        /// Emit an n x n frequency grid around (h, k) instead.
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        grid_span: f64,
    },
    /// Run the full acceptance table.
    Selftest {},
}

fn state_from_args(x: &[f64], v: &[f64]) -> laxjac::Result<PendulumState> {
    if x.len() != 3 || v.len() != 3 {
        return Err(laxjac::Error::InvalidInput(
            "--x and --v need exactly 3 comma-separated reals".into(),
        ));
    }
    PendulumState::from_real([x[0], x[1], x[2]], [v[0], v[1], v[2]])
}

fn config_json(cli: &Cli) -> Value {
    let command = format!("{:?}", cli.command);
    json!({
        "tol": cli.tol,
        "seed": cli.seed,
        "format": format!("{:?}", cli.format).to_lowercase(),
        "command": command,
    })
}

enum Artifact {
    Json(Value),
    /// CSV artifact plus a JSON summary printed alongside in JSON mode.
    Table { json: Value, csv: String },
}

fn run(cli: &Cli) -> laxjac::Result<Artifact> {
    let tol = cli.tol;
    match &cli.command {
        Command::Simulate { x, v, t, samples } => {
            let state = state_from_args(x, v)?;
            let traj = flows::integrate_pendulum(&state, *t, tol, (*samples).max(2))?;
            let summary = json!({
                "h_drift": traj.max_invariant_drift(),
                "constraint_drift": traj.max_constraint_drift(),
                "steps_accepted": traj.steps.0,
                "steps_rejected": traj.steps.1,
            });
            Ok(Artifact::Table {
                json: json!({ "summary": summary, "trajectory": io::trajectory_to_json(&traj) }),
                csv: io::trajectory_to_csv(&traj),
            })
        }
        Command::Invariants { x, v } => {
            let state = state_from_args(x, v)?;
            let (h, k) = pendulum::integrals(&state);
            let (y, u) = pendulum::cushman_map(&state);
            let lv = pendulum::to_lax_vars(&y, &u);
            let (a, b) = pendulum::lax_matrices(&lv);
            let da = pendulum::lax_time_derivative(&y, &u).scale(c64(0.0, 2.0));
            let lax_residual = da.sub(&a.commutator(&b)?)?.norm();
            let (r_const, r_orth) = lv.relation_residuals();
            let (h_lax, k_lax, f) = pendulum::spectral_invariants(&lv)?;
            Ok(Artifact::Json(json!({
                "h": io::complex_json(h),
                "k": io::complex_json(k),
                "h_from_lax": io::complex_json(h_lax),
                "k_from_lax": io::complex_json(k_lax),
                "relation_residuals": [r_const, r_orth],
                "lax_identity_residual": lax_residual,
                "spectral_polynomial": f.coeffs().iter().map(|&z| io::complex_json(z)).collect::<Vec<_>>(),
                "lax_matrix": io::matrix_polynomial_to_json(&a),
            })))
        }
        Command::Curve { h, k } => {
            let curve = QuarticCurve::from_hk(c64(*h, 0.0), c64(*k, 0.0))?;
            Ok(Artifact::Json(io::curve_to_json(&curve)))
        }
        Command::Periods { h, k } => {
            let curve = QuarticCurve::from_hk(c64(*h, 0.0), c64(*k, 0.0))?;
            let pd = periods(&curve, CycleSpec::default())?;
            let lattice = pd.lattice();
            let (agm_a, agm_b) = periods_agm(&curve)?;
            let rec = reciprocity_residual(&curve, &pd)?;
            let agm_err = |c: Complex64, a: Complex64| {
                (c - a).norm().min((c + a).norm()) / a.norm()
            };
            let mut out = io::periods_to_json(&pd, &lattice);
            out["oracles"] = json!({
                "agm_omega_a": io::complex_json(agm_a),
                "agm_omega_b": io::complex_json(agm_b),
                "agm_relative_error": agm_err(pd.omega_a, agm_a).max(agm_err(pd.omega_b, agm_b)),
                "reciprocity_residual": rec,
            });
            Ok(Artifact::Json(out))
        }
        Command::AbelFit { x, v, t, samples } => {
            let state = state_from_args(x, v)?;
            let (fit, curve, _) = jacobian::abel_flow_linearity(&state, *t, tol, *samples)?;
            let mut out = io::fit_report_to_json(&fit);
            out["curve"] = io::curve_to_json(&curve);
            Ok(Artifact::Json(out))
        }
        Command::Equivariance { x, v, theta } => {
            let state = state_from_args(x, v)?;
            let lv = LaxVariables::from_state(&state);
            let (h, k, _) = pendulum::spectral_invariants(&lv)?;
            let curve = QuarticCurve::from_hk(h, k)?;
            let pd = periods(&curve, CycleSpec::default())?;
            let (dz1, dz2) = jacobian::symmetry_equivariance(&state, *theta, &curve, &pd)?;
            let (_, dz2_double) = jacobian::symmetry_equivariance(&state, 2.0 * theta, &curve, &pd)?;
            let tau = std::f64::consts::TAU;
            let mut lin = dz2_double - dz2 * 2.0;
            lin -= c64(0.0, tau) * (lin.im / tau).round();
            Ok(Artifact::Json(json!({
                "theta": theta,
                "dz1_mod_lattice": dz1,
                "dz2_mod_2pii": io::complex_json(dz2),
                "fiber_linearity_residual": lin.norm(),
            })))
        }
        Command::Monodromy {
            center,
            radius,
            steps,
            orientation,
            locus,
            h_range,
            k_range,
            grid,
        } => {
            if center.len() != 2 || h_range.len() != 2 || k_range.len() != 2 || grid.len() != 2 {
                return Err(laxjac::Error::InvalidInput(
                    "--center, --h-range, --k-range and --grid need exactly 2 comma-separated values".into(),
                ));
            }
            if *locus {
                let result = monodromy::discriminant_locus(
                    (h_range[0], h_range[1]),
                    (k_range[0], k_range[1]),
                    (grid[0], grid[1]),
                );
                return Ok(Artifact::Table {
                    json: json!({
                        "segments": result.segments.len(),
                        "isolated": result.isolated,
                    }),
                    csv: io::locus_to_csv(&result),
                });
            }
            let spec = LoopSpec::new((center[0], center[1]), *radius, *steps, *orientation)?;
            let m = monodromy::continue_periods(&spec)?;
            Ok(Artifact::Json(io::monodromy_to_json(&m)))
        }
        Command::Frequency { h, k, step, grid_n, grid_span } => {
            if let Some(n) = grid_n {
                let n = (*n).max(2);
                let mut rows = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        let hh = h - grid_span / 2.0 + grid_span * i as f64 / (n - 1) as f64;
                        let kk = k - grid_span / 2.0 + grid_span * j as f64 / (n - 1) as f64;
                        let (o1, o2) = monodromy::frequency_map(hh, kk)?;
                        rows.push((hh, kk, o1, o2));
                    }
                }
                return Ok(Artifact::Table {
                    json: json!({ "rows": rows.len() }),
                    csv: io::frequency_grid_to_csv(&rows),
                });
            }
            let fd = monodromy::frequency_data(*h, *k)?;
            let (jac, det) = monodromy::frequency_jacobian(*h, *k, *step)?;
            let (t_rad, dphi) = monodromy::poincare_rotation_number(*h, *k)?;
            Ok(Artifact::Json(json!({
                "omega": [fd.omega.0, fd.omega.1],
                "radial_period": fd.t_radial,
                "rotation_number": fd.delta_phi,
                "rotation_return": fd.rotation_return,
                "jacobian": jac,
                "jacobian_det": det,
                "poincare": { "radial_period": t_rad, "rotation_number": dphi },
                "v_h": [io::complex_json(fd.v_h[0]), io::complex_json(fd.v_h[1])],
                "v_k": [io::complex_json(fd.v_k[0]), io::complex_json(fd.v_k[1])],
            })))
        }
        Command::Selftest {} => {
            let reports = selftest::run_all(cli.seed);
            print!("{}", selftest::format_table(&reports));
            let all = reports.iter().all(|r| r.passed);
            let arr: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "id": r.id,
                        "name": r.name,
                        "passed": r.passed,
                        "details": r.details,
                        "elapsed_s": r.elapsed_s,
                    })
                })
                .collect();
            if all {
                Ok(Artifact::Json(json!({ "criteria": arr, "all_passed": true })))
            } else {
                // surfaced as a numerical failure through the exit code, with
                // the full table in the artifact
                Err(laxjac::Error::InvalidInput(
                    serde_json::to_string(&json!({ "criteria": arr, "all_passed": false }))
                        .unwrap_or_default(),
                ))
            }
        }
    }
}

fn emit(cli: &Cli, body: Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&body).unwrap_or_default() + "\n";
    write_out(cli, &text)
}

fn write_out(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(1e-14..=1e-3).contains(&cli.tol) {
        eprintln!("error: --tol must lie in [1e-14, 1e-3] (got {})", cli.tol);
        return ExitCode::from(1);
    }
    let config = config_json(&cli);
    match run(&cli) {
        Ok(Artifact::Json(result)) => {
            let body = json!({ "config": config, "result": result });
            if emit(&cli, body).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Ok(Artifact::Table { json: summary, csv }) => {
            let ok = match cli.format {
                Format::Csv => write_out(&cli, &csv),
                Format::Json => emit(&cli, json!({ "config": config, "result": summary, "csv": csv })),
            };
            if ok.is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            // every failure lands in the artifact; exit code 2 signals it
            let body = json!({
                "config": config,
                "error": { "kind": e.kind(), "message": e.to_string() },
            });
            let _ = emit(&cli, body);
            ExitCode::from(2)
        }
    }
}
