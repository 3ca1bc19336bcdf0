//! `g2ct` — verification harness for the closed G₂-structure models.
//!
//! Subcommands:
//!
//! * `verify` — run the full residual suite for one model at fixed (λ, μ).
//! * `scan-lambda-mu` — exact (λ, μ) consistency solve on the abstract bundle.
//! * `invariants` — tabulate curvature/orbit invariants over a radial grid.
//! * `export-model` — dump a builtin model's structure table.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 internal
//! error. All reports are deterministic for fixed inputs and version; floats
//! are printed with 17 significant digits.

use clap::{Args, Parser, Subcommand, ValueEnum};
use g2ct_core::closure_checker::{closure_residual, solve_consistency};
use g2ct_core::coframe_models::{builtin_model, samples_in, InvariantModel, MODEL_NAMES};
use g2ct_core::form::Form;
use g2ct_core::g2_core::assemble_phi;
use g2ct_core::jet::Jet;
use g2ct_core::rep_theory::{build_context, orbit_invariant, project_lambda2, G2Context};
use g2ct_core::torsion_curvature as tc;
use g2ct_core::{coframe_models, rat_i, Error as CoreError};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const SCHEMA: &str = "g2ct/1";

#[derive(Parser)]
#[command(name = "g2ct", version, about = "Closed G2-structure verification toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the residual suite for one model at fixed (lambda, mu)
    Verify(GridArgs),
    /// Solve the closure conditions for (lambda, mu) in exact arithmetic
    ScanLambdaMu(ScanArgs),
    /// Tabulate curvature and orbit invariants over a radial grid
    Invariants(GridArgs),
    /// Dump a builtin model's structure table
    ExportModel(ExportArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Model name: flat | aso4 | cp2 | heis | su21
    #[arg(long)]
    model: String,
    /// Lower end of the radial grid (default 0.2, clamped into the domain)
    #[arg(long)]
    r_min: Option<f64>,
    /// Upper end of the radial grid (default 5.0)
    #[arg(long)]
    r_max: Option<f64>,
    /// Number of log-spaced radial samples
    #[arg(long, default_value_t = 10)]
    samples: usize,
    /// Ansatz parameter lambda (-0.125 and 0.4 are the consistent values)
    #[arg(long, default_value_t = -0.125, allow_hyphen_values = true)]
    lambda: f64,
    /// Ansatz parameter mu (1 pairs with -0.125, -0.08 with 0.4)
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    mu: f64,
    /// Tolerance for first-order residuals (dphi, tau projection, dT)
    #[arg(long, default_value_t = 1e-7)]
    tol_first_order: f64,
    /// Tolerance for curvature-level residuals (dtheta, Weyl)
    #[arg(long, default_value_t = 1e-6)]
    tol_curvature: f64,
    #[arg(long, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed echoed into the report for randomized downstream suites
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Model name: flat | aso4 | cp2 | heis | su21
    #[arg(long)]
    model: String,
    #[arg(long, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum Fmt {
    Json,
    Csv,
}

enum CliError {
    Usage(String),
    Internal(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        match e {
            CoreError::UnknownModel(m) => CliError::Usage(format!("unknown model `{m}`")),
            CoreError::OutOfDomain { r } => {
                CliError::Usage(format!("radius {r} outside the model domain"))
            }
            other => CliError::Internal(format!("{other:?}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Internal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.cmd {
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::ScanLambdaMu(a) => cmd_scan_lambda_mu(a),
        Cmd::Invariants(a) => cmd_invariants(a),
        Cmd::ExportModel(a) => cmd_export_model(a),
    }
}

/// 17 significant digits, always scientific notation. Negative zero is
/// folded to zero so reports stay byte-stable across algebraically equal
/// routes.
fn f17(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn grid(args: &GridArgs, model: &InvariantModel) -> Result<Vec<f64>, CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    for r in [args.r_min, args.r_max].into_iter().flatten() {
        model.check_r(r)?;
    }
    let lo = args.r_min.unwrap_or(0.2);
    let hi = args.r_max.unwrap_or(5.0);
    if lo > hi {
        return Err(CliError::Usage("--r-min must not exceed --r-max".into()));
    }
    Ok(samples_in(model, lo, hi, args.samples))
}

fn par_map<T: Send, F>(jobs: Option<usize>, rs: &[f64], f: F) -> Result<Vec<T>, CliError>
where
    F: Fn(f64) -> Result<T, CoreError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let mut rows = pool.install(|| {
        rs.par_iter()
            .map(|&r| f(r).map(|v| (r, v)).map_err(CliError::from))
            .collect::<Result<Vec<_>, _>>()
    })?;
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

// ---------------------------------------------------------------------------
// verify

struct SampleRow {
    r: f64,
    dphi: f64,
    tau_in_14: f64,
    dt_eq: f64,
    dtheta_eq: f64,
    lambda_quadratic: f64,
    weyl_rel: f64,
    scal: f64,
    tau_norm_sq: f64,
    mu1: f64,
    mu2: f64,
    cubic_t: f64,
    cubic_tau: f64,
}

fn invariants_of(
    ctx: &G2Context,
    tau: &Form<Jet>,
) -> Result<(f64, f64, f64, f64, f64, f64), CoreError> {
    let tv: Form<f64> = tau.map(|c| c.val());
    let t = tc::torsion_tensor(ctx, tau, 1e-8)?;
    let scal = tc::scalar_curvature_from_t(&t);
    let (mu1, mu2) = orbit_invariant(&ctx.consts, &t, 1e-6)?;
    let (x, y) = (t[1][2], t[3][4]);
    let cubic_t = (x - y) * (x + 2.0 * y) * (2.0 * x + y);
    Ok((scal, tv.norm_sq(), mu1, mu2, cubic_t, 216.0 * cubic_t))
}

fn sample_row(
    ctx: &G2Context,
    model: &InvariantModel,
    r: f64,
    lambda: f64,
    mu: f64,
) -> Result<SampleRow, CoreError> {
    let frame = model.frame_at(r)?;
    let phi = assemble_phi(&frame.coframe)?;
    let dphi = coframe_models::exterior_derivative(model, &phi)?;
    let dphi_rel = dphi.norm() / phi.norm().max(1e-30);

    let tau = tc::torsion_two_form(ctx, model, r)?;
    let tv: Form<f64> = tau.map(|c| c.val());
    let (p7, _) = project_lambda2(ctx, &tv);
    let tau_in_14 = p7.norm() / tv.norm().max(1e-30);

    let sr = tc::structure_equation_residuals(ctx, model, r, lambda, mu)?;
    let lambda_quadratic = tc::lambda_quadratic_residual(ctx, model, r, lambda)?;
    let weyl_rel = tc::conformal_flatness_residual(model, r)?;
    let (scal, tau_norm_sq, mu1, mu2, cubic_t, cubic_tau) = invariants_of(ctx, &tau)?;

    Ok(SampleRow {
        r,
        dphi: dphi_rel,
        tau_in_14,
        dt_eq: sr.d_t,
        dtheta_eq: sr.d_theta,
        lambda_quadratic,
        weyl_rel,
        scal,
        tau_norm_sq,
        mu1,
        mu2,
        cubic_t,
        cubic_tau,
    })
}

fn row_passes(row: &SampleRow, args: &GridArgs) -> bool {
    let tf = args.tol_first_order;
    let tk = args.tol_curvature;
    // Weyl flatness is part of the contract only in the conformally flat
    // family (lambda = -1/8); otherwise it is reported as a diagnostic.
    let weyl_ok = args.lambda != -0.125 || row.weyl_rel <= tk;
    row.dphi <= tf
        && row.tau_in_14 <= tf
        && row.dt_eq <= tf
        && row.lambda_quadratic <= tf
        && row.dtheta_eq <= tk
        && weyl_ok
}

fn cmd_verify(args: GridArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let model = builtin_model(&args.model)?;
    let rs = grid(&args, &model)?;
    let ctx = build_context();
    let rows = par_map(args.jobs, &rs, |r| {
        sample_row(&ctx, &model, r, args.lambda, args.mu)
    })?;
    let all_pass = rows.iter().all(|row| row_passes(row, &args));

    let text = match args.format {
        Fmt::Json => {
            let mut s = String::new();
            push_header(&mut s, "verify");
            let _ = writeln!(s, "  \"model\": \"{}\",", model.name);
            let _ = writeln!(s, "  \"lambda\": {},", f17(args.lambda));
            let _ = writeln!(s, "  \"mu\": {},", f17(args.mu));
            if let Some(seed) = args.seed {
                let _ = writeln!(s, "  \"seed\": {seed},");
            }
            let _ = writeln!(
                s,
                "  \"tolerances\": {{ \"first_order\": {}, \"curvature\": {} }},",
                f17(args.tol_first_order),
                f17(args.tol_curvature)
            );
            s.push_str("  \"samples\": [\n");
            for (n, row) in rows.iter().enumerate() {
                let _ = writeln!(s, "    {{");
                let _ = writeln!(s, "      \"r\": {},", f17(row.r));
                let _ = writeln!(
                    s,
                    "      \"residuals\": {{ \"dphi\": {}, \"tau_in_14\": {}, \"dT_eq\": {}, \"dtheta_eq\": {}, \"lambda_quadratic\": {}, \"weyl_rel\": {} }},",
                    f17(row.dphi),
                    f17(row.tau_in_14),
                    f17(row.dt_eq),
                    f17(row.dtheta_eq),
                    f17(row.lambda_quadratic),
                    f17(row.weyl_rel)
                );
                let _ = writeln!(
                    s,
                    "      \"invariants\": {{ \"scal\": {}, \"tau_norm_sq\": {}, \"mu1\": {}, \"mu2\": {}, \"cubic_Tnorm\": {}, \"cubic_tau_norm\": {} }},",
                    f17(row.scal),
                    f17(row.tau_norm_sq),
                    f17(row.mu1),
                    f17(row.mu2),
                    f17(row.cubic_t),
                    f17(row.cubic_tau)
                );
                let _ = writeln!(s, "      \"pass\": {}", row_passes(row, &args));
                let _ = writeln!(s, "    }}{}", if n + 1 < rows.len() { "," } else { "" });
            }
            s.push_str("  ],\n");
            let _ = writeln!(s, "  \"verdict\": \"{}\",", if all_pass { "pass" } else { "fail" });
            push_footer(&mut s, start);
            s
        }
        Fmt::Csv => {
            let mut s = String::from(
                "r,dphi,tau_in_14,dT_eq,dtheta_eq,lambda_quadratic,weyl_rel,scal,tau_norm_sq,mu1,mu2,cubic_Tnorm,cubic_tau_norm,pass\n",
            );
            for row in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    f17(row.r),
                    f17(row.dphi),
                    f17(row.tau_in_14),
                    f17(row.dt_eq),
                    f17(row.dtheta_eq),
                    f17(row.lambda_quadratic),
                    f17(row.weyl_rel),
                    f17(row.scal),
                    f17(row.tau_norm_sq),
                    f17(row.mu1),
                    f17(row.mu2),
                    f17(row.cubic_t),
                    f17(row.cubic_tau),
                    row_passes(row, &args)
                );
            }
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(if all_pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// scan-lambda-mu

fn cmd_scan_lambda_mu(args: ScanArgs) -> Result<u8, CliError> {
    if args.format == Fmt::Csv {
        return Err(CliError::Usage("scan-lambda-mu only supports --format json".into()));
    }
    let start = Instant::now();
    let pairs = solve_consistency().map_err(|e| CliError::Internal(format!("{e:?}")))?;
    let mut s = String::new();
    push_header(&mut s, "scan-lambda-mu");
    s.push_str("  \"solutions\": [\n");
    for (n, (l, m)) in pairs.iter().enumerate() {
        let (ro, rt, rth) = closure_residual(l, m).map_err(|e| CliError::Internal(format!("{e:?}")))?;
        let _ = writeln!(
            s,
            "    {{ \"lambda\": \"{l}\", \"mu\": \"{m}\", \"residuals\": {{ \"omega\": \"{ro}\", \"T\": \"{rt}\", \"theta\": \"{rth}\" }} }}{}",
            if n + 1 < pairs.len() { "," } else { "" }
        );
    }
    s.push_str("  ],\n");
    let (_, rt0, rth0) =
        closure_residual(&rat_i(0), &rat_i(0)).map_err(|e| CliError::Internal(format!("{e:?}")))?;
    let _ = writeln!(
        s,
        "  \"control_at_origin\": {{ \"lambda\": \"0\", \"mu\": \"0\", \"res_T\": \"{rt0}\", \"res_theta\": \"{rth0}\" }},"
    );
    push_footer(&mut s, start);
    emit(&args.out, &s)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// invariants

fn cmd_invariants(args: GridArgs) -> Result<u8, CliError> {
    let start = Instant::now();
    let model = builtin_model(&args.model)?;
    let rs = grid(&args, &model)?;
    let ctx = build_context();
    let rows = par_map(args.jobs, &rs, |r| {
        let tau = tc::torsion_two_form(&ctx, &model, r)?;
        Ok((r, invariants_of(&ctx, &tau)?))
    })?;

    let text = match args.format {
        Fmt::Csv => {
            let mut s =
                String::from("r,scal,tau_norm_sq,mu1,mu2,cubic_Tnorm,cubic_tau_norm\n");
            for (r, (scal, tn, mu1, mu2, ct, ctau)) in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    f17(*r),
                    f17(*scal),
                    f17(*tn),
                    f17(*mu1),
                    f17(*mu2),
                    f17(*ct),
                    f17(*ctau)
                );
            }
            s
        }
        Fmt::Json => {
            let mut s = String::new();
            push_header(&mut s, "invariants");
            let _ = writeln!(s, "  \"model\": \"{}\",", model.name);
            s.push_str("  \"samples\": [\n");
            for (n, (r, (scal, tn, mu1, mu2, ct, ctau))) in rows.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "    {{ \"r\": {}, \"scal\": {}, \"tau_norm_sq\": {}, \"mu1\": {}, \"mu2\": {}, \"cubic_Tnorm\": {}, \"cubic_tau_norm\": {} }}{}",
                    f17(*r),
                    f17(*scal),
                    f17(*tn),
                    f17(*mu1),
                    f17(*mu2),
                    f17(*ct),
                    f17(*ctau),
                    if n + 1 < rows.len() { "," } else { "" }
                );
            }
            s.push_str("  ],\n");
            push_footer(&mut s, start);
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// export-model

fn cmd_export_model(args: ExportArgs) -> Result<u8, CliError> {
    if args.format == Fmt::Csv {
        return Err(CliError::Usage("export-model only supports --format json".into()));
    }
    let start = Instant::now();
    let model = builtin_model(&args.model)?;
    let mut s = String::new();
    push_header(&mut s, "export-model");
    let _ = writeln!(s, "  \"model\": \"{}\",", model.name);
    let _ = writeln!(s, "  \"models_available\": {:?},", MODEL_NAMES);
    let names: Vec<&str> = model.basis.names.iter().map(|n| n.as_str()).collect();
    let _ = writeln!(s, "  \"basis\": {names:?},");
    let dom = |x: f64| if x.is_finite() { f17(x) } else { "null".into() };
    let _ = writeln!(
        s,
        "  \"domain\": [{}, {}],",
        dom(model.domain.0),
        dom(model.domain.1)
    );
    s.push_str("  \"coframe\": [\n");
    for (n, (name, expr)) in model.coframe_desc.iter().enumerate() {
        let _ = writeln!(
            s,
            "    {{ \"basis\": \"{name}\", \"coefficient\": \"{expr}\" }}{}",
            if n + 1 < model.coframe_desc.len() { "," } else { "" }
        );
    }
    s.push_str("  ],\n");
    s.push_str("  \"structure\": [\n");
    for (k, d) in model.structure.iter().enumerate() {
        let terms: Vec<String> = d
            .terms
            .iter()
            .map(|(idx, c)| {
                format!(
                    "{{ \"coeff\": \"{c}\", \"wedge\": [\"{}\", \"{}\"] }}",
                    model.basis.names[idx[0] as usize], model.basis.names[idx[1] as usize]
                )
            })
            .collect();
        let _ = writeln!(
            s,
            "    {{ \"d_of\": \"{}\", \"terms\": [{}] }}{}",
            model.basis.names[k],
            terms.join(", "),
            if k + 1 < model.structure.len() { "," } else { "" }
        );
    }
    s.push_str("  ],\n");
    push_footer(&mut s, start);
    emit(&args.out, &s)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// report plumbing

fn push_header(s: &mut String, command: &str) {
    s.push_str("{\n");
    let _ = writeln!(s, "  \"schema\": \"{SCHEMA}\",");
    let _ = writeln!(s, "  \"version\": \"{}\",", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "  \"command\": \"{command}\",");
}

fn push_footer(s: &mut String, start: Instant) {
    let _ = writeln!(s, "  \"wall_time_ms\": {:.3}", start.elapsed().as_secs_f64() * 1e3);
    s.push_str("}\n");
}
