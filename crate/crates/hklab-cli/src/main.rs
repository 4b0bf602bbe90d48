//! Single-binary command surface: encode / decode / balance / involve / trace /
//! ks / hecke / semismall / verify, with JSON I/O.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 input
//! validation failure. Results go to `--out` or standard output; diagnostics
//! go to standard error. `HKLAB_TOL` overrides the residual tolerance.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hklab::bridge;
use hklab::involution::{
    alpha_classical, alpha_gl, equivariance_suite, Family, InvolutionParam, RealFormSpec,
};
use hklab::json::{matrix_from_json_str, EncodedPointJson, MatrixJson, QuiverRepJson};
use hklab::linalg::{CMat, Tolerances};
use hklab::orbits::{ks_table_dot, ks_table_gl};
use hklab::tracer;
use hklab::verify::{run_suite, SuiteConfig};
use hklab::Error;

#[derive(Parser)]
#[command(name = "hklab", version, about = "Involution family on matrices with real eigenvalues", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Gl,
    GlSplit,
    SlSplit,
    SlQuaternionic,
    SuPq,
    SoPq,
    SoStar,
    SpSplit,
    SpPq,
    ComplexGl,
}

impl FormArg {
    fn family(self) -> Family {
        match self {
            FormArg::Gl | FormArg::GlSplit => Family::GlSplit,
            FormArg::SlSplit => Family::SlSplit,
            FormArg::SlQuaternionic => Family::SlQuaternionic,
            FormArg::SuPq => Family::SuPq,
            FormArg::SoPq => Family::SoPq,
            FormArg::SoStar => Family::SoStar,
            FormArg::SpSplit => Family::SpSplit,
            FormArg::SpPq => Family::SpPq,
            FormArg::ComplexGl => Family::ComplexGl,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KsFormat {
    Table,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a matrix as a quiver representative on its level set
    Encode {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// balance the representative before writing it
        #[arg(long)]
        balanced: bool,
    },
    /// Decode a representative (or encoded point) back to a matrix
    Decode {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Drive the real moment map of an encoded point to zero
    Balance {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        max_iter: usize,
    },
    /// Apply the involution alpha_a
    Involve {
        #[arg(long, value_enum, default_value = "gl")]
        form: FormArg,
        #[arg(long)]
        a: f64,
        /// signature parameter for su_pq / so_pq / sp_pq
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// write an equivariance report next to the result
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Trace the fixed locus from a real matrix to a symmetric one
    Trace {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Emit the paired nilpotent orbit table for gl_n
    Ks {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: KsFormat,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Hecke presentation of a real form
    Hecke {
        #[arg(long, value_enum)]
        form: FormArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Semismallness table for the nilpotent strata of gl_n
    Semismall {
        #[arg(long)]
        n: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run the verification suite
    Verify {
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn tolerances() -> Tolerances {
    let mut tol = Tolerances::default();
    if let Ok(v) = std::env::var("HKLAB_TOL") {
        if let Ok(x) = v.parse::<f64>() {
            if x > 0.0 {
                tol.residual = x;
            } else {
                eprintln!("HKLAB_TOL must be positive; keeping {}", tol.residual);
            }
        } else {
            eprintln!("HKLAB_TOL is not a number; keeping {}", tol.residual);
        }
    }
    tol
}

fn read_matrix(path: &PathBuf) -> Result<CMat, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    matrix_from_json_str(&text)
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, payload)
            .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization")
}

fn run(cli: Cli) -> Result<(), Error> {
    let tol = tolerances();
    match cli.command {
        Command::Encode { r#in, out, balanced } => {
            let m = read_matrix(&r#in)?;
            let pt = if balanced {
                bridge::encode_balanced(&m, &tol, 2000)?
            } else {
                bridge::encode(&m, &tol)?
            };
            emit(&out, &json(&EncodedPointJson::from_point(&pt)))
        }
        Command::Decode { r#in, out } => {
            let text = fs::read_to_string(&r#in)
                .map_err(|e| Error::Validation(format!("cannot read {}: {e}", r#in.display())))?;
            // accept either an encoded point or a bare representative
            let m = if let Ok(pt) = serde_json::from_str::<EncodedPointJson>(&text) {
                pt.to_point()?.decode()
            } else {
                let rep: QuiverRepJson = serde_json::from_str(&text)
                    .map_err(|e| Error::Validation(format!("bad representative JSON: {e}")))?;
                bridge::decode(&rep.to_rep()?)
            };
            emit(&out, &json(&MatrixJson::from_cmat(&m)))
        }
        Command::Balance { r#in, out, max_iter } => {
            let text = fs::read_to_string(&r#in)
                .map_err(|e| Error::Validation(format!("cannot read {}: {e}", r#in.display())))?;
            let pt: EncodedPointJson = serde_json::from_str(&text)
                .map_err(|e| Error::Validation(format!("bad encoded point JSON: {e}")))?;
            let mut point = pt.to_point()?;
            let (rep, report) = bridge::balance(&point.rep, &tol, max_iter)?;
            eprintln!("balance: {} iterations, residual {:.3e}, converged: {}",
                report.iterations, report.final_residual, report.converged);
            eprintln!("  step        residual");
            for (step, res) in report.step_history.iter().take(12) {
                eprintln!("  {step:<11.3e} {res:.6e}");
            }
            if report.step_history.len() > 12 {
                eprintln!("  ... ({} accepted steps total)", report.step_history.len() - 1);
            }
            if !report.converged {
                return Err(Error::BalanceFailure {
                    residual: report.final_residual,
                    iterations: report.iterations,
                });
            }
            point.rep = rep;
            point.balance = report;
            emit(&out, &json(&EncodedPointJson::from_point(&point)))
        }
        Command::Involve { form, a, p, r#in, out, report } => {
            let m = read_matrix(&r#in)?;
            let param = InvolutionParam::new(a)?;
            let result = match form {
                FormArg::Gl | FormArg::GlSplit => alpha_gl(&m, param, &tol)?,
                other => {
                    let spec = RealFormSpec::new(other.family(), m.dim().0, p)?;
                    alpha_classical(&spec, &m, param, &tol)?
                }
            };
            if let Some(report_path) = report {
                let rep = equivariance_suite(&m, param, 8, 17, &tol)?;
                emit(&Some(report_path), &json(&rep))?;
            }
            emit(&out, &json(&MatrixJson::from_cmat(&result)))
        }
        Command::Trace { r#in, steps, out } => {
            let m = read_matrix(&r#in)?;
            let path = tracer::trace(&m, steps, &tol)?;
            let endpoint = tracer::verify_ks_endpoint(&path, &tol)?;
            eprintln!(
                "trace: {} samples, target symmetry {:.3e}, spectral drift {:.3e}, jordan preserved: {}",
                path.samples.len(),
                endpoint.symmetry_residual,
                endpoint.spectral_drift,
                endpoint.jordan_equal
            );
            emit(&out, &json(&path))
        }
        Command::Ks { n, format, out } => {
            let table = ks_table_gl(n)?;
            match format {
                KsFormat::Dot => emit(&out, &ks_table_dot(&table)),
                KsFormat::Table => emit(&out, &json(&table)),
            }
        }
        Command::Hecke { form, n, p, out } => {
            let spec = RealFormSpec::new(form.family(), n, p)?;
            let pres = hklab::hecke::hecke_parameters(&spec)?;
            emit(&out, &json(&pres))
        }
        Command::Semismall { n, out } => {
            let rows = hklab::hecke::semismall_check_gl(n)?;
            emit(&out, &json(&rows))
        }
        Command::Verify { nmax, seed, samples, out } => {
            let config = SuiteConfig {
                n_max: nmax,
                samples_per_case: samples,
                seed,
                tolerances: tol,
                ..SuiteConfig::default()
            };
            let report = run_suite(&config)?;
            for case in &report.cases {
                eprintln!(
                    "{} {} (max residual {:.3e})",
                    if case.pass { "PASS" } else { "FAIL" },
                    case.id,
                    case.max_residual
                );
            }
            emit(&out, &json(&report))?;
            if !report.all_pass {
                return Err(Error::Validation("verification suite failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(4)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
