//! Command-line front end: potential configs in, CSV or JSON out.

pub mod output;

use canonsys_core::asymptotics::remainder_decay_check;
use canonsys_core::inverse::{
    contrapositive_check, oracle_residuals, DEFAULT_GAP_COUNT, DEFAULT_GAP_TOL,
};
use canonsys_core::monodromy::{
    classify_stability, discriminant_derivative, monodromy_sweep, IntegratorOptions,
};
use canonsys_core::potential::random_potential;
use canonsys_core::prufer::{dirichlet_range, shifted_mu_curve, uniform_tau_grid, DirichletKind};
use canonsys_core::selftest::{run_all, DEFAULT_SEED, RANDOM_DEGREE};
use canonsys_core::spectra::{band_edges, instability_intervals, verify_shift_extrema};
use canonsys_core::{PotentialSpec, SpectralError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{csv_bytes, emit, json_bytes, Cell, IoError};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Tolerance for classifying `|Delta| = 2` in the discriminant table.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "canonsys",
    version,
    about = "Spectral analysis of periodic 2x2 canonical systems J Y' + Q Y = lambda Y"
)]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Relative and absolute integration tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub rtol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PotentialArg {
    /// Potential config (JSON).
    #[arg(long)]
    pub potential: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Mu,
    Nu,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discriminant and monodromy matrix on a uniform lambda grid.
    #[command(
        after_help = "CSV columns: lambda; delta = trace of Y(pi); delta_prime (with --derivative); \
y11, y12, y21, y22 where y_ij is component j of the i-th column of Y(pi); \
stability = stable | unstable | boundary (||delta| - 2| <= 1e-9)."
    )]
    Discriminant {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_negative_numbers = true)]
        lambda_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda_max: f64,
        #[arg(long)]
        samples: usize,
        /// Add the derivative column (integral formula, checked against finite differences).
        #[arg(long)]
        derivative: bool,
    },
    /// Dirichlet-type eigenvalues mu_n or nu_n.
    #[command(
        after_help = "CSV columns: n; kind = mu | nu; value; residual = |theta(pi) - target| of the Prüfer angle."
    )]
    Eigs {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, allow_negative_numbers = true)]
        n_min: i64,
        #[arg(long, allow_negative_numbers = true)]
        n_max: i64,
    },
    /// mu_n of the shifted potentials Q(z + tau) on a uniform tau grid in [0, pi).
    #[command(after_help = "CSV columns: tau; mu_n_tau.")]
    ShiftScan {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long)]
        tau_samples: usize,
    },
    /// Band edges, instability intervals and (optionally) shift extrema.
    #[command(
        after_help = "JSON keys: edges (per k: lambda_2k_minus_1, lambda_2k, lambda_p_2k_minus_1, lambda_p_2k); \
gaps (j, lo, hi, width, parity); interlacing_ok; shift_extrema (null without --tau-samples); config."
    )]
    Bands {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_negative_numbers = true)]
        k_min: i64,
        #[arg(long, allow_negative_numbers = true)]
        k_max: i64,
        /// Compare extrema of the shifted mu curves with the edges on this many shifts.
        #[arg(long)]
        tau_samples: Option<usize>,
    },
    /// Remainder of the large-lambda expansions at z = pi.
    #[command(
        after_help = "CSV columns: lambda; err_full; err_coarse (operator norm of the difference from Y(pi)). \
The JSON summary (slopes, exactness, pass flags) goes to --summary or stderr."
    )]
    AsymCheck {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        lambdas: Vec<f64>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Gap-vanishing diagnostic for Q = p I.
    #[command(
        after_help = "JSON keys: verdict; max_width; gap_table; potential_class; oracle_residuals; config."
    )]
    InverseCheck {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, default_value_t = DEFAULT_GAP_COUNT)]
        n_gaps: i64,
        #[arg(long, default_value_t = DEFAULT_GAP_TOL)]
        tol: f64,
    },
    /// Run the reference checks and write deterministic artifacts.
    #[command(
        after_help = "Writes criteria.json, discriminant_random.csv and bands_random.json into --out-dir; \
prints one PASS/FAIL line per check."
    )]
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] SpectralError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.kind(),
            CliError::Io(_) => "Io",
            CliError::Failed(_) => "SelftestFailed",
        }
    }

    /// Machine-readable form for stderr.
    pub fn to_json(&self) -> Value {
        json!({"error": self.kind(), "message": self.to_string()})
    }
}

fn load_potential(path: &Path) -> Result<PotentialSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(PotentialSpec::from_json_str(&text)?)
}

fn config_comment(config: &Value) -> String {
    format!("config: {}", serde_json::to_string(config).expect("json"))
}

fn options(cli: &Cli) -> IntegratorOptions {
    IntegratorOptions {
        rtol: cli.rtol,
        atol: cli.rtol,
        ..IntegratorOptions::default()
    }
}

fn grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>, SpectralError> {
    if n == 0 {
        return Err(SpectralError::InvalidInput(
            "samples must be positive".into(),
        ));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

fn discriminant_table(
    spec: &PotentialSpec,
    lambdas: &[f64],
    derivative: bool,
    opts: &IntegratorOptions,
) -> Result<(Vec<&'static str>, Vec<Vec<Cell>>), SpectralError> {
    let monos = monodromy_sweep(spec, lambdas, opts)?;
    let primes: Vec<Option<f64>> = if derivative {
        lambdas
            .par_iter()
            .map(|&l| discriminant_derivative(spec, l, opts).map(|d| Some(d.formula)))
            .collect::<Result<_, _>>()?
    } else {
        vec![None; lambdas.len()]
    };
    let mut header = vec!["lambda", "delta"];
    if derivative {
        header.push("delta_prime");
    }
    header.extend(["y11", "y12", "y21", "y22", "stability"]);
    let rows = monos
        .iter()
        .zip(primes)
        .map(|(m, p)| {
            let mut row: Vec<Cell> = vec![m.lambda.into(), m.delta.into()];
            if let Some(p) = p {
                row.push(p.into());
            }
            row.extend([m.y11(), m.y12(), m.y21(), m.y22()].map(Cell::from));
            row.push(classify_stability(m.delta, BOUNDARY_TOL).as_str().into());
            row
        })
        .collect();
    Ok((header, rows))
}

fn bands_json(
    spec: &PotentialSpec,
    k_min: i64,
    k_max: i64,
    tau_samples: Option<usize>,
    opts: &IntegratorOptions,
) -> Result<Value, SpectralError> {
    let table = band_edges(spec, k_min, k_max, opts)?;
    let gaps: Vec<Value> = instability_intervals(&table)
        .iter()
        .map(
            |g| json!({"j": g.index, "lo": g.lo, "hi": g.hi, "width": g.width, "parity": g.parity}),
        )
        .collect();
    let shift_extrema = match tau_samples {
        Some(k) => {
            serde_json::to_value(verify_shift_extrema(spec, k_min, k_max, k, opts)?).expect("json")
        }
        None => Value::Null,
    };
    Ok(json!({
        "edges": table.band_rows(),
        "gaps": gaps,
        "interlacing_ok": table.interlacing_ok(),
        "shift_extrema": shift_extrema,
    }))
}

fn with_config(mut v: Value, config: Value) -> Value {
    v.as_object_mut()
        .expect("object")
        .insert("config".into(), config);
    v
}

/// Execute one parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let opts = options(cli);
    let out = cli.output.as_deref();
    let base = |name: &str, spec: &PotentialSpec| json!({"command": name, "rtol": cli.rtol, "potential": spec.to_json_value()});
    match &cli.command {
        Command::Discriminant {
            potential,
            lambda_min,
            lambda_max,
            samples,
            derivative,
        } => {
            let spec = load_potential(&potential.potential)?;
            let mut config = base("discriminant", &spec);
            config["lambda_min"] = json!(lambda_min);
            config["lambda_max"] = json!(lambda_max);
            config["samples"] = json!(samples);
            config["derivative"] = json!(derivative);
            let lambdas = grid(*lambda_min, *lambda_max, *samples)?;
            let (header, rows) = discriminant_table(&spec, &lambdas, *derivative, &opts)?;
            emit(
                &csv_bytes(&header, &rows, Some(&config_comment(&config))),
                out,
            )?;
        }
        Command::Eigs {
            potential,
            kind,
            n_min,
            n_max,
        } => {
            let spec = load_potential(&potential.potential)?;
            let kind = match kind {
                KindArg::Mu => DirichletKind::Mu,
                KindArg::Nu => DirichletKind::Nu,
            };
            let mut config = base("eigs", &spec);
            config["kind"] = json!(kind);
            config["n_min"] = json!(n_min);
            config["n_max"] = json!(n_max);
            if n_min > n_max {
                return Err(SpectralError::InvalidInput(format!(
                    "empty index range {n_min}..={n_max}"
                ))
                .into());
            }
            let found = dirichlet_range(&spec, kind, *n_min, *n_max, &opts)?;
            let rows: Vec<Vec<Cell>> = found
                .iter()
                .map(|e| {
                    vec![
                        e.index.into(),
                        e.kind.as_str().into(),
                        e.value.into(),
                        e.residual.into(),
                    ]
                })
                .collect();
            emit(
                &csv_bytes(
                    &["n", "kind", "value", "residual"],
                    &rows,
                    Some(&config_comment(&config)),
                ),
                out,
            )?;
        }
        Command::ShiftScan {
            potential,
            n,
            tau_samples,
        } => {
            let spec = load_potential(&potential.potential)?;
            let mut config = base("shift-scan", &spec);
            config["n"] = json!(n);
            config["tau_samples"] = json!(tau_samples);
            if *tau_samples == 0 {
                return Err(
                    SpectralError::InvalidInput("tau_samples must be positive".into()).into(),
                );
            }
            let curve = shifted_mu_curve(&spec, *n, &uniform_tau_grid(*tau_samples), &opts)?;
            let rows: Vec<Vec<Cell>> = curve
                .points
                .iter()
                .map(|(t, m)| vec![(*t).into(), (*m).into()])
                .collect();
            emit(
                &csv_bytes(&["tau", "mu_n_tau"], &rows, Some(&config_comment(&config))),
                out,
            )?;
        }
        Command::Bands {
            potential,
            k_min,
            k_max,
            tau_samples,
        } => {
            let spec = load_potential(&potential.potential)?;
            let mut config = base("bands", &spec);
            config["k_min"] = json!(k_min);
            config["k_max"] = json!(k_max);
            config["tau_samples"] = json!(tau_samples);
            let v = bands_json(&spec, *k_min, *k_max, *tau_samples, &opts)?;
            emit(&json_bytes(&with_config(v, config)), out)?;
        }
        Command::AsymCheck {
            potential,
            lambdas,
            summary,
        } => {
            let spec = load_potential(&potential.potential)?;
            let mut config = base("asym-check", &spec);
            config["lambdas"] = json!(lambdas);
            let report = remainder_decay_check(&spec, lambdas, &opts)?;
            let rows: Vec<Vec<Cell>> = report
                .rows
                .iter()
                .map(|r| vec![r.lambda.into(), r.err_full.into(), r.err_coarse.into()])
                .collect();
            emit(
                &csv_bytes(
                    &["lambda", "err_full", "err_coarse"],
                    &rows,
                    Some(&config_comment(&config)),
                ),
                out,
            )?;
            let summary_json = json!({
                "config": config,
                "slope_full": report.slope_full,
                "slope_coarse": report.slope_coarse,
                "exact": report.exact,
                "scaled_spread": report.scaled_spread,
                "full_ok": report.full_ok,
                "coarse_ok": report.coarse_ok,
            });
            let bytes = json_bytes(&summary_json);
            match summary {
                Some(p) => emit(&bytes, Some(p))?,
                None => eprint!("{}", String::from_utf8_lossy(&bytes)),
            }
        }
        Command::InverseCheck {
            potential,
            n_gaps,
            tol,
        } => {
            let spec = load_potential(&potential.potential)?;
            let mut config = base("inverse-check", &spec);
            config["n_gaps"] = json!(n_gaps);
            config["tol"] = json!(tol);
            let (verdict, report) = contrapositive_check(&spec, *n_gaps, *tol, &opts)?;
            let probe: Vec<f64> = (0..8).map(|i| -3.3 + 0.9 * i as f64).collect();
            let residuals = oracle_residuals(&spec, &probe, &opts)?;
            let v = json!({
                "verdict": verdict,
                "max_width": report.max_width,
                "gap_table": report.gap_widths,
                "gap_verdict": report.verdict,
                "potential_class": report.potential_class,
                "oracle_residuals": residuals,
            });
            emit(&json_bytes(&with_config(v, config)), out)?;
        }
        Command::Selftest { seed, out_dir } => selftest(*seed, out_dir, &opts, cli.rtol)?,
    }
    Ok(())
}

fn selftest(
    seed: u64,
    out_dir: &Path,
    opts: &IntegratorOptions,
    rtol: f64,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|source| IoError {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let config = json!({"command": "selftest", "seed": seed, "rtol": rtol});
    let outcomes = run_all(seed, opts);
    for o in &outcomes {
        println!(
            "[{}] {:>2} {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail
        );
    }
    emit(
        &json_bytes(&json!({"config": config, "criteria": outcomes})),
        Some(&out_dir.join("criteria.json")),
    )?;

    let spec = random_potential(seed, RANDOM_DEGREE);
    let mut sweep_config = config.clone();
    sweep_config["potential"] = spec.to_json_value();
    let lambdas = grid(-5.0, 5.0, 41)?;
    let (header, rows) = discriminant_table(&spec, &lambdas, true, opts)?;
    emit(
        &csv_bytes(&header, &rows, Some(&config_comment(&sweep_config))),
        Some(&out_dir.join("discriminant_random.csv")),
    )?;
    let bands = bands_json(&spec, -2, 2, None, opts)?;
    emit(
        &json_bytes(&with_config(bands, sweep_config)),
        Some(&out_dir.join("bands_random.json")),
    )?;

    let failed: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("checks failed: {failed:?}")))
    }
}
