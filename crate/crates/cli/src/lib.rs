//! Command-line front end for `irrev-core`.
//!
//! Data goes to stdout or `--out`; diagnostics go to stderr. Exit codes: 0 on
//! success, 1 when `verify` finds a failing invariant, 2 on usage or I/O errors.

pub mod config;
pub mod output;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use irrev_core::measures::{self, OptimizerConfig};
use irrev_core::qcore::{herm_eigvals, partial_trace, partial_transpose};
use irrev_core::symstates::{full_bell_basis, rho_lambda, twirl_g, BasisConvention};
use irrev_core::uncertainty::{
    enumerate_minimizers, is_minimizer, minimizer_profiles, ur_report, SUPPORT_TOL,
};
use irrev_core::{CVector, Complex64, Side};
use serde::Serialize;
use thiserror::Error;

use config::{parse_lambda, Convention, Format, ReportFormat, Show};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    /// Invariant failures; the report has already been rendered.
    #[error("{failed} invariant check(s) failed")]
    Failed { failed: usize, report: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Failed { .. } => 1,
            Self::Usage(_) | Self::Io(_) => 2,
        }
    }
}

impl From<irrev_core::Error> for CliError {
    fn from(e: irrev_core::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "irrev",
    version,
    about = "Entanglement cost vs. distillable entanglement for symmetric Bell-diagonal qudit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep ν over [nu-min, nu-max] and write E_D⁺, ε, co ε and the gap per point.
    ///
    /// The gap is measured against E_D⁺, so it is a lower bound on E_c − E_D.
    Sweep(SweepArgs),
    /// List every minimal-uncertainty vector in dimension d.
    Minimizers(MinimizersArgs),
    /// Compare E_D⁺(λ) with ε(λ) for an explicit spectrum.
    Gap(GapArgs),
    /// Run the invariant suite and print a pass/fail table.
    Verify(VerifyArgs),
    /// Inspect ρ_λ.
    State(StateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
}

impl OptimizerArgs {
    pub fn config(&self) -> Result<OptimizerConfig, CliError> {
        let cfg = OptimizerConfig {
            restarts: self.restarts,
            seed: self.seed,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0.0)]
    pub nu_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub nu_max: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub opt: OptimizerArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct MinimizersArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub d: usize,
    /// Comma-separated spectrum; must sum to 1 within 1e-9.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, value_enum, default_value_t = Convention::Column)]
    pub convention: Convention,
    /// Deficit below which the preimage counts as a minimal-uncertainty vector.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub opt: OptimizerArgs,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    pub d_max: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for equality assertions.
    #[arg(long, default_value_t = irrev_core::ASSERT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, value_enum, default_value_t = Convention::Column)]
    pub convention: Convention,
    #[arg(long, value_enum)]
    pub show: Show,
}

/// Largest `d` accepted by `state` (dense `d² × d²` operators).
pub const STATE_MAX_DIM: usize = 16;

/// Runs one command and returns what belongs on stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Minimizers(a) => cmd_minimizers(&a),
        Command::Gap(a) => cmd_gap(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::State(a) => cmd_state(&a),
    }
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<String, CliError> {
    if a.d < 1 {
        return Err(CliError::Usage("--d must be at least 1".into()));
    }
    if a.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let grid = measures::linspace(a.nu_min, a.nu_max, a.steps);
    measures::validate_nu_grid(&grid)?;
    let cfg = a.opt.config()?;
    let points = measures::gap_sweep(a.d, &grid, &cfg)?;
    let body = match a.format {
        Format::Csv => output::sweep_csv(&points),
        Format::Json => output::sweep_json(&output::SweepDocument {
            d: a.d,
            seed: cfg.seed,
            restarts: cfg.restarts,
            points: &points,
        }),
    };
    match &a.out {
        Some(path) => {
            std::fs::write(path, body)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(body),
    }
}

#[derive(Serialize)]
struct MinimizerRow {
    d1: usize,
    d2: usize,
    beta: usize,
    gamma: usize,
    vector: Vec<[f64; 2]>,
    lambda: Vec<f64>,
    support_product: usize,
    deficit_bits: f64,
}

pub fn cmd_minimizers(a: &MinimizersArgs) -> Result<String, CliError> {
    if a.d < 1 {
        return Err(CliError::Usage("--d must be at least 1".into()));
    }
    let rows: Vec<MinimizerRow> = enumerate_minimizers(a.d)
        .into_iter()
        .map(|m| {
            let r = ur_report(&m.vector, SUPPORT_TOL).expect("minimizers are unit vectors");
            MinimizerRow {
                d1: m.spec.d1,
                d2: m.spec.d2,
                beta: m.spec.beta,
                gamma: m.spec.gamma,
                vector: m.vector.entries().iter().map(|z| [z.re, z.im]).collect(),
                lambda: m.profile(),
                support_product: r.support_c * r.support_chat,
                deficit_bits: r.deficit,
            }
        })
        .collect();
    let profiles = minimizer_profiles(a.d).len();
    eprintln!(
        "d={}: {} minimizers, {} distinct lambda profiles",
        a.d,
        rows.len(),
        profiles
    );
    Ok(match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("plain data");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s =
                String::from("d1,d2,beta,gamma,vector,lambda,support_product,deficit_bits\n");
            for r in &rows {
                let vector =
                    output::joined(&r.vector, |z| output::complex(Complex64::new(z[0], z[1])));
                let lambda = output::joined(&r.lambda, |x| output::num(*x));
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.d1,
                    r.d2,
                    r.beta,
                    r.gamma,
                    vector,
                    lambda,
                    r.support_product,
                    output::num(r.deficit_bits)
                ));
            }
            s
        }
    })
}

#[derive(Debug, Serialize)]
pub struct GapReport {
    pub d: usize,
    pub lambda: Vec<f64>,
    pub convention: BasisConvention,
    pub ed_plus: f64,
    pub epsilon: f64,
    pub phases: Vec<f64>,
    pub gap: f64,
    pub converged: bool,
    pub minimizer: bool,
    pub deficit: f64,
    pub nearest_d1: usize,
    pub nearest_beta: usize,
    pub nearest_gamma: usize,
}

pub fn gap_report(a: &GapArgs) -> Result<GapReport, CliError> {
    let lambda = parse_lambda(&a.lambda, a.d)?;
    let cfg = a.opt.config()?;
    let eps = measures::epsilon_min(&lambda, &cfg)?;
    let edp = measures::ed_plus(&lambda);
    // the optimizer's preimage c_l = √λ_l e^{iθ_l}
    let c = CVector::new(
        lambda
            .values()
            .iter()
            .zip(&eps.optimizer_phases)
            .map(|(&l, &t)| Complex64::from_polar(l.sqrt(), t))
            .collect(),
    )
    .normalized();
    let verdict = is_minimizer(&c, a.tol)?;
    Ok(GapReport {
        d: a.d,
        lambda: lambda.values().to_vec(),
        convention: a.convention.into(),
        ed_plus: edp,
        epsilon: eps.value,
        phases: eps.optimizer_phases,
        gap: eps.value - edp,
        converged: eps.converged,
        minimizer: verdict.is_minimizer,
        deficit: verdict.deficit,
        nearest_d1: verdict.nearest.d1,
        nearest_beta: verdict.nearest.beta,
        nearest_gamma: verdict.nearest.gamma,
    })
}

pub fn cmd_gap(a: &GapArgs) -> Result<String, CliError> {
    let r = gap_report(a)?;
    Ok(match a.format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&r).expect("plain data");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let phases = output::joined(&r.phases, |x| output::num(*x));
            format!(
                "ed_plus_bits {}\nepsilon_bits {}\ngap_bits {}\nphases {}\nconverged {}\nminimizer {}\ndeficit_bits {}\nnearest d1={} beta={} gamma={}\n",
                output::num(r.ed_plus),
                output::num(r.epsilon),
                output::num(r.gap),
                phases,
                r.converged,
                r.minimizer,
                output::num(r.deficit),
                r.nearest_d1,
                r.nearest_beta,
                r.nearest_gamma
            )
        }
    })
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<String, CliError> {
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if a.d_max < 2 {
        return Err(CliError::Usage("--d-max must be at least 2".into()));
    }
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(CliError::Usage("--tol must be a positive number".into()));
    }
    let results = verify::run_suite(&verify::SuiteConfig {
        d_max: a.d_max,
        samples: a.samples,
        seed: a.seed,
        tol: a.tol,
    });
    let report = verify::render(&results);
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Failed { failed, report });
    }
    Ok(report)
}

#[derive(Serialize)]
struct MatrixDump {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

fn dump(m: &irrev_core::CMatrix) -> MatrixDump {
    let n = m.dim();
    MatrixDump {
        dim: n,
        re: (0..n)
            .map(|i| (0..n).map(|j| m.get(i, j).re).collect())
            .collect(),
        im: (0..n)
            .map(|i| (0..n).map(|j| m.get(i, j).im).collect())
            .collect(),
    }
}

pub fn cmd_state(a: &StateArgs) -> Result<String, CliError> {
    if a.d < 1 || a.d > STATE_MAX_DIM {
        return Err(CliError::Usage(format!(
            "--d must be in 1..={STATE_MAX_DIM}"
        )));
    }
    let lambda = parse_lambda(&a.lambda, a.d)?;
    let rho = rho_lambda(&lambda, a.convention.into());
    let value = match a.show {
        Show::Eigs => serde_json::json!({ "eigenvalues": herm_eigvals(&rho)? }),
        Show::Ptrace => serde_json::json!({ "reduced_a": dump(&partial_trace(&rho, Side::A)?) }),
        Show::Ptranspose => {
            let eig = herm_eigvals(&partial_transpose(&rho, Side::B)?)?;
            serde_json::json!({ "min_eigenvalue": eig[0], "eigenvalues": eig })
        }
        Show::Twirl => {
            let t = twirl_g(&rho)?;
            let diag = t.diagonal_in(&full_bell_basis(a.d));
            serde_json::json!({
                "bell_diagonal_kl": diag,
                "max_deviation_from_input": t.max_abs_diff(&rho),
            })
        }
    };
    let mut s = serde_json::to_string_pretty(&value).expect("plain data");
    s.push('\n');
    Ok(s)
}
