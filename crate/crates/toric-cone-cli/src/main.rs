//! Command-line front end: cone-file ingestion, the correspondence and
//! certificate computations, and the bundled fixture library.
//!
//! Exit codes: 0 success, 1 mathematical negative (for example angles
//! outside the angles' cone), 2 input error, 3 solver failure. Results are
//! JSON on stdout; human-readable errors go to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use toric_cone::angles::{angles_cone_membership, cartier_klt, AngleVector, ReebVector};
use toric_cone::cone::GoodCone;
use toric_cone::correspond::{angles_to_reeb, reeb_to_angles, SolveOptions};
use toric_cone::error::Error;
use toric_cone::exact::{self, Int, Rat};
use toric_cone::fixtures;
use toric_cone::futaki::{integrated_scalar_identity, log_futaki, total_transversal_scalar};
use toric_cone::potential::SymplecticPotential;
use toric_cone::report;
use toric_cone::volume::VolumeFunction;

#[derive(Parser)]
#[command(
    name = "toric-cone",
    about = "Reeb vector / cone angle correspondence on good toric Kähler cones",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a cone description: strict convexity, facets, goodness.
    CheckGood { file: PathBuf },
    /// Extreme rays of the dual cone, with the double-duality cross-check.
    Dual { file: PathBuf },
    /// Decide membership of an angle vector in the angles' cone.
    AnglesCone {
        file: PathBuf,
        /// Comma-separated angles, e.g. 13/12,7/6,13/12,5/6.
        #[arg(long)]
        beta: String,
        /// Render rationals as "p/q" strings.
        #[arg(long)]
        exact: bool,
    },
    /// The angles cut by a Reeb vector: β_a = 2(n+1)·ℓ_a(bar P_ξ).
    ReebToAngles {
        file: PathBuf,
        /// Comma-separated Reeb components, e.g. 0,0,3.
        #[arg(long)]
        xi: String,
        #[arg(long)]
        exact: bool,
    },
    /// The Reeb vector carrying prescribed angles, by Newton minimization
    /// of the truncated-cone volume on the normalized Reeb slice.
    AnglesToReeb {
        file: PathBuf,
        #[arg(long)]
        beta: String,
        /// Projected-gradient stopping tolerance (default 1e-12, or
        /// TORIC_CY_TOL).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Recompute residuals exactly at the rounded minimizer.
        #[arg(long)]
        certify: bool,
        /// Starting Reeb vector (comma-separated floats); rescaled onto the
        /// slice.
        #[arg(long)]
        initial: Option<String>,
        #[arg(long)]
        exact: bool,
    },
    /// Evaluate the exact volume function of the truncated cone.
    Volume {
        file: PathBuf,
        #[arg(long)]
        xi: String,
        #[arg(long)]
        exact: bool,
    },
    /// Log Futaki invariant of (ξ, β) on the transversal polytope.
    Futaki {
        file: PathBuf,
        #[arg(long)]
        xi: String,
        #[arg(long)]
        beta: String,
        /// Vanishing threshold (default 1e-10 on exact input).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        exact: bool,
    },
    /// Scalar curvature data: pointwise Abreu estimate for the Reeb-adapted
    /// potential, total transversal scalar curvature, and the integrated
    /// identity.
    Scalar {
        file: PathBuf,
        #[arg(long)]
        xi: String,
        #[arg(long)]
        beta: String,
        /// Interior evaluation point (default: scaled sum of the rays).
        #[arg(long)]
        point: Option<String>,
        /// Finite-difference step (default 1e-3).
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        exact: bool,
    },
    /// ℝ-Cartier / klt certificate with discrepancies along queried rays.
    Klt {
        file: PathBuf,
        #[arg(long)]
        beta: String,
        /// Interior ray to query (repeatable), e.g. --ray 1,1,2.
        #[arg(long = "ray")]
        rays: Vec<String>,
        #[arg(long)]
        exact: bool,
    },
    /// Bundled example cones and their reference-value checks.
    Fixtures {
        #[command(subcommand)]
        action: FixturesCommand,
    },
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// List the bundled cones.
    List,
    /// Run the reference checks of one fixture.
    Run { name: String },
    /// Run every bundled check.
    RunAll,
}

/// A failure with its process exit code; `payload` still goes to stdout
/// (e.g. the kernel certificate of a membership failure).
struct Failure {
    code: u8,
    message: String,
    payload: Option<Value>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
            payload: None,
        }
    }
}

fn classify(e: &Error) -> u8 {
    match e {
        Error::NotInAnglesCone { .. }
        | Error::NotStrictlyConvex { .. }
        | Error::NotFullDimensional
        | Error::RedundantNormal { .. }
        | Error::NotPrimitive { .. }
        | Error::NotGood { .. }
        | Error::NotAConeOverPolytope
        | Error::FixtureCheckFailed(_) => 1,
        Error::DimensionMismatch { .. }
        | Error::NonPositiveAngle { .. }
        | Error::ReebNotInterior { .. }
        | Error::RayOutsideCone { .. }
        | Error::OutsideCone { .. }
        | Error::StepTooLarge { .. } => 2,
        Error::DegeneratePolytope
        | Error::SingularHessian { .. }
        | Error::LineSearchFailure { .. }
        | Error::MaxIterations { .. }
        | Error::SingularMomentMatrix => 3,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let payload = match &e {
            Error::NotInAnglesCone { certificate } => Some(json!({
                "member": false,
                "eta": report::int_vec_json(certificate),
            })),
            Error::LineSearchFailure { xi, .. } | Error::MaxIterations { xi, .. } => {
                Some(json!({ "last_iterate": report::f64_vec_json(xi) }))
            }
            _ => None,
        };
        Failure {
            code: classify(&e),
            message: e.to_string(),
            payload,
        }
    }
}

fn load_cone(path: &Path) -> Result<GoodCone, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("invalid JSON in {}: {e}", path.display())))?;
    let normals = value
        .get("normals")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::input("cone file must contain a \"normals\" array"))?;
    let mut rows: Vec<Vec<Int>> = Vec::with_capacity(normals.len());
    for row in normals {
        let entries = row
            .as_array()
            .ok_or_else(|| Failure::input("normals must be arrays of integers"))?;
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            let n = e
                .as_i64()
                .ok_or_else(|| Failure::input("normals must contain integers only"))?;
            out.push(Int::from(n));
        }
        rows.push(out);
    }
    if let Some(dim) = value.get("dim").and_then(Value::as_u64) {
        for row in &rows {
            if row.len() != dim as usize {
                return Err(Failure::input(format!(
                    "normal length {} does not match dim {dim}",
                    row.len()
                )));
            }
        }
    }
    let cone = GoodCone::from_int_normals(rows).map_err(Failure::from)?;
    Ok(match value.get("name").and_then(Value::as_str) {
        Some(name) => cone.with_name(name),
        None => cone,
    })
}

fn parse_rat_vec(text: &str, what: &str) -> Result<Vec<Rat>, Failure> {
    text.split(',')
        .map(|s| {
            exact::parse_rat(s)
                .ok_or_else(|| Failure::input(format!("cannot parse {what} entry {s:?}")))
        })
        .collect()
}

fn parse_int_vec(text: &str, what: &str) -> Result<Vec<Int>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<Int>()
                .map_err(|_| Failure::input(format!("cannot parse {what} entry {s:?}")))
        })
        .collect()
}

fn parse_f64_vec(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("cannot parse {what} entry {s:?}")))
        })
        .collect()
}

fn angle_vector(text: &str) -> Result<AngleVector, Failure> {
    AngleVector::new(parse_rat_vec(text, "beta")?).map_err(Failure::from)
}

fn default_tol() -> f64 {
    std::env::var("TORIC_CY_TOL")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1e-12)
}

fn run(command: Command) -> Result<(Value, u8), Failure> {
    match command {
        Command::CheckGood { file } => match load_cone(&file) {
            Ok(cone) => Ok((json!({ "good": true, "cone": report::cone_json(&cone) }), 0)),
            Err(failure) => {
                if failure.code == 1 {
                    Ok((json!({ "good": false, "reason": failure.message }), 1))
                } else {
                    Err(failure)
                }
            }
        },
        Command::Dual { file } => {
            let cone = load_cone(&file)?;
            let dual = cone.dual_rays();
            let mut sorted_normals = cone.normals().to_vec();
            sorted_normals.sort();
            let consistent = dual == sorted_normals;
            Ok((
                json!({
                    "rays": dual.iter().map(|v| report::int_vec_json(v)).collect::<Vec<_>>(),
                    "double_dual_consistent": consistent,
                }),
                0,
            ))
        }
        Command::AnglesCone { file, beta, exact } => {
            let cone = load_cone(&file)?;
            let beta = angle_vector(&beta)?;
            let membership = angles_cone_membership(&cone, &beta).map_err(Failure::from)?;
            let code = u8::from(!membership.is_member());
            Ok((report::membership_json(&membership, exact), code))
        }
        Command::ReebToAngles { file, xi, exact } => {
            let cone = load_cone(&file)?;
            let xi = ReebVector::new(parse_rat_vec(&xi, "xi")?);
            let result = reeb_to_angles(&cone, &xi).map_err(Failure::from)?;
            Ok((report::correspondence_json(&result, exact), 0))
        }
        Command::AnglesToReeb {
            file,
            beta,
            tol,
            max_iter,
            certify,
            initial,
            exact,
        } => {
            let cone = load_cone(&file)?;
            let beta = angle_vector(&beta)?;
            let initial = match initial {
                Some(text) => Some(parse_f64_vec(&text, "initial")?),
                None => None,
            };
            let opts = SolveOptions {
                tol: tol.unwrap_or_else(default_tol),
                max_iter: max_iter.unwrap_or(200),
                certify,
                initial,
            };
            let result = angles_to_reeb(&cone, &beta, &opts).map_err(Failure::from)?;
            Ok((report::correspondence_json(&result, exact), 0))
        }
        Command::Volume { file, xi, exact } => {
            let cone = load_cone(&file)?;
            let xi = ReebVector::new(parse_rat_vec(&xi, "xi")?);
            cone.check_reeb(xi.entries()).map_err(Failure::from)?;
            let vf = VolumeFunction::new(&cone);
            let value = vf.eval_reeb(&xi);
            let mut out = serde_json::Map::new();
            out.insert("terms".into(), json!(vf.terms().len()));
            out.insert(
                "volume".into(),
                if exact {
                    report::rat_json(&value)
                } else {
                    report::f64_json(exact::rat_to_f64(&value))
                },
            );
            out.insert("xi".into(), report::number_vec_json(xi.entries(), exact));
            Ok((Value::Object(out), 0))
        }
        Command::Futaki {
            file,
            xi,
            beta,
            tol,
            exact,
        } => {
            let cone = load_cone(&file)?;
            let xi = ReebVector::new(parse_rat_vec(&xi, "xi")?);
            let beta = angle_vector(&beta)?;
            let report_out =
                log_futaki(&cone, &xi, &beta, tol.unwrap_or(1e-10)).map_err(Failure::from)?;
            Ok((report::futaki_json(&report_out, exact), 0))
        }
        Command::Scalar {
            file,
            xi,
            beta,
            point,
            step,
            exact,
        } => {
            let cone = load_cone(&file)?;
            let xi = ReebVector::new(parse_rat_vec(&xi, "xi")?);
            let beta = angle_vector(&beta)?;
            cone.check_reeb(xi.entries()).map_err(Failure::from)?;
            let point = match point {
                Some(text) => parse_f64_vec(&text, "point")?,
                None => {
                    // Sum of rays, scaled onto the slicing hyperplane.
                    let s = cone.sum_of_rays();
                    let pairing = exact::dot(xi.entries(), &s);
                    let t = (exact::rat_int(2) * pairing).recip();
                    s.iter().map(|c| exact::rat_to_f64(&(c * &t))).collect()
                }
            };
            let step = step.unwrap_or(1e-3);
            let pot =
                SymplecticPotential::canonical_xi(&cone, &beta, &xi).map_err(Failure::from)?;
            let curvature = pot
                .abreu_scalar_curvature(&point, step)
                .map_err(Failure::from)?;
            let total = total_transversal_scalar(&cone, &xi, &beta).map_err(Failure::from)?;
            let identity = integrated_scalar_identity(&cone, &xi, &beta).map_err(Failure::from)?;
            Ok((
                json!({
                    "point": report::f64_vec_json(&point),
                    "step": report::f64_json(step),
                    "abreu": report::scalar_curvature_json(&curvature),
                    "total_transversal": report::total_scalar_json(&total, exact),
                    "integrated_identity": report::scalar_identity_json(&identity, exact),
                }),
                0,
            ))
        }
        Command::Klt {
            file,
            beta,
            rays,
            exact,
        } => {
            let cone = load_cone(&file)?;
            let beta = angle_vector(&beta)?;
            let rays: Vec<Vec<Int>> = rays
                .iter()
                .map(|r| parse_int_vec(r, "ray"))
                .collect::<Result<_, _>>()?;
            let cert = cartier_klt(&cone, &beta, &rays).map_err(Failure::from)?;
            let code = u8::from(!cert.is_r_cartier);
            Ok((report::klt_json(&cert, exact), code))
        }
        Command::Fixtures { action } => match action {
            FixturesCommand::List => {
                let list: Vec<Value> = fixtures::all()
                    .iter()
                    .map(|f| {
                        json!({
                            "name": f.name,
                            "description": f.description,
                            "normals": f.normals,
                        })
                    })
                    .collect();
                Ok((Value::Array(list), 0))
            }
            FixturesCommand::Run { name } => {
                let fixture = fixtures::by_name(&name)
                    .ok_or_else(|| Failure::input(format!("unknown fixture {name:?}")))?;
                let results = fixtures::run_checks(&fixture);
                let all_passed = results.iter().all(|r| r.passed);
                let values: Vec<Value> = results.iter().map(report::check_result_json).collect();
                Ok((Value::Array(values), u8::from(!all_passed)))
            }
            FixturesCommand::RunAll => {
                let results = fixtures::run_all();
                let all_passed = results.iter().all(|r| r.passed);
                let values: Vec<Value> = results.iter().map(report::check_result_json).collect();
                Ok((
                    json!({
                        "checks": values,
                        "passed": results.iter().filter(|r| r.passed).count(),
                        "failed": results.iter().filter(|r| !r.passed).count(),
                    }),
                    u8::from(!all_passed),
                ))
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((value, code)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("valid JSON")
            );
            ExitCode::from(code)
        }
        Err(failure) => {
            if let Some(payload) = &failure.payload {
                println!(
                    "{}",
                    serde_json::to_string_pretty(payload).expect("valid JSON")
                );
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
