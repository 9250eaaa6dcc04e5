//! Reference checks with known answers. Each check returns what it measured;
//! `run_all` compares against the acceptance thresholds.

use crate::asymptotics::{remainder_decay_check, DecayReport};
use crate::error::Result;
use crate::inverse::{contrapositive_check, free_dirac_discriminant, ScalarIdentityVerdict};
use crate::monodromy::{discriminant, discriminant_derivative, IntegratorOptions};
use crate::potential::{
    random_canonical_potential, random_potential, PotentialSpec, ScalarFunction,
};
use crate::prufer::{find_mu, find_nu, uniform_tau_grid};
use crate::spectra::{
    band_edges, detect_double, instability_intervals, verify_shift_extrema, ExtremaRow,
};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_SEED: u64 = 20_240_601;
/// Largest degree of the random trigonometric potentials.
pub const RANDOM_DEGREE: usize = 4;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Three seeded general potentials.
pub fn random_specimens(seed: u64) -> Vec<PotentialSpec> {
    (0..3)
        .map(|i| random_potential(seed.wrapping_add(i), RANDOM_DEGREE))
        .collect()
}

/// The traceless trigonometric potential used for the shift-extrema check.
pub fn extrema_specimen() -> PotentialSpec {
    PotentialSpec::canonical(
        ScalarFunction::trig1(0.0, 0.3, 0.0),
        ScalarFunction::trig1(0.0, 0.0, 0.2),
    )
}

/// Scalar potentials `p I`.
pub fn scalar_specimens() -> Vec<PotentialSpec> {
    vec![
        PotentialSpec::zero(),
        PotentialSpec::scalar(2.0.into()),
        PotentialSpec::scalar(ScalarFunction::trig1(1.0, 1.0, 0.0)),
        PotentialSpec::scalar(ScalarFunction::trig1(0.0, 0.0, -0.7)),
        PotentialSpec::scalar(ScalarFunction::TrigPoly(crate::TrigPoly::new(
            -0.4,
            vec![0.5, 0.25],
            vec![0.1, -0.3],
        ))),
    ]
}

/// Largest `|Delta - 2 cos(lambda pi)|` for `Q = 0` on 201 points of `[-10, 10]`.
pub fn free_discriminant(options: &IntegratorOptions) -> Result<f64> {
    let zero = PotentialSpec::zero();
    let errs: Vec<f64> = linspace(-10.0, 10.0, 201)
        .par_iter()
        .map(|&l| Ok((discriminant(&zero, l, options)? - 2.0 * (l * PI).cos()).abs()))
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Largest deviation from `2 cos(sqrt(lambda^2 - m^2) pi)` for `Q = m sigma_3`.
pub fn free_dirac(options: &IntegratorOptions) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0] {
        let spec = PotentialSpec::constant(m, -m, 0.0);
        let errs: Vec<f64> = linspace(-8.0, 8.0, 101)
            .par_iter()
            .map(|&l| Ok((discriminant(&spec, l, options)? - free_dirac_discriminant(m, l)).abs()))
            .collect::<Result<_>>()?;
        worst = errs.into_iter().fold(worst, f64::max);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarForward {
    pub gap_count: usize,
    pub max_width: f64,
    pub max_edge_error: f64,
    pub all_double: bool,
}

/// `Q = (1 + cos 2z) I`, gaps for `|k| <= n`.
pub fn scalar_forward(n: i64, options: &IntegratorOptions) -> Result<ScalarForward> {
    let spec = PotentialSpec::scalar(ScalarFunction::trig1(1.0, 1.0, 0.0));
    let c = 1.0;
    let table = band_edges(&spec, -n, n, options)?;
    let gaps = instability_intervals(&table);
    let max_width = gaps.iter().map(|g| g.width).fold(0.0, f64::max);
    let max_edge_error = table
        .rows
        .iter()
        .flat_map(|r| [r.lo, r.hi].map(|e| (e - (r.n as f64 + c)).abs()))
        .fold(0.0, f64::max);
    let doubles: Vec<bool> = table
        .rows
        .par_iter()
        .flat_map(|r| [(r.lo, r.parity), (r.hi, r.parity)])
        .map(|(e, parity)| detect_double(&spec, e, parity, crate::inverse::DOUBLE_TOL, options))
        .collect::<Result<_>>()?;
    Ok(ScalarForward {
        gap_count: gaps.len(),
        max_width,
        max_edge_error,
        all_double: doubles.iter().all(|d| *d),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkedExample {
    /// Largest `|mu_0(tau)|` and `|nu_0(tau)|` over 16 shifts.
    pub max_dirichlet_zero: f64,
    pub delta_at_zero_error: f64,
    /// Distance of the central gap from `(-1, 1)`.
    pub gap_edge_error: f64,
    pub strict: bool,
}

/// `Q = sigma_1`.
pub fn worked_example(options: &IntegratorOptions) -> Result<WorkedExample> {
    let spec = PotentialSpec::constant(0.0, 0.0, 1.0);
    let shifted: Vec<f64> = uniform_tau_grid(16)
        .par_iter()
        .map(|&t| {
            let s = spec.shift(t);
            Ok(find_mu(&s, 0, options)?
                .value
                .abs()
                .max(find_nu(&s, 0, options)?.value.abs()))
        })
        .collect::<Result<_>>()?;
    let delta_at_zero_error = (discriminant(&spec, 0.0, options)? - 2.0 * PI.cosh()).abs();
    let table = band_edges(&spec, 0, 0, options)?;
    let row = table.row(0).expect("row 0");
    Ok(WorkedExample {
        max_dirichlet_zero: shifted.into_iter().fold(0.0, f64::max),
        delta_at_zero_error,
        gap_edge_error: (row.lo + 1.0).abs().max((row.hi - 1.0).abs()),
        strict: row.lo < 0.0 && 0.0 < row.hi,
    })
}

/// Largest `|Delta_tau(lambda) - Delta(lambda)|` over 8 shifts and 16 points of `[-6, 6]`.
pub fn shift_invariance(seed: u64, options: &IntegratorOptions) -> Result<f64> {
    let lambdas = linspace(-6.0, 6.0, 16);
    let taus = uniform_tau_grid(8);
    let mut worst: f64 = 0.0;
    for spec in random_specimens(seed) {
        let base: Vec<f64> = lambdas
            .par_iter()
            .map(|&l| discriminant(&spec, l, options))
            .collect::<Result<_>>()?;
        for &t in &taus[1..] {
            let s = spec.shift(t);
            let errs: Vec<f64> = lambdas
                .par_iter()
                .zip(&base)
                .map(|(&l, b)| Ok((discriminant(&s, l, options)? - b).abs()))
                .collect::<Result<_>>()?;
            worst = errs.into_iter().fold(worst, f64::max);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub points: usize,
    pub max_relative_error: f64,
}

/// Integral formula against central differences, 16 points per potential with `|Delta'| >= 1e-4`.
pub fn derivative_formula(seed: u64, options: &IntegratorOptions) -> Result<DerivativeCheck> {
    let mut points = 0;
    let mut worst: f64 = 0.0;
    for spec in random_specimens(seed) {
        let candidates = linspace(-5.9, 5.7, 40);
        let estimates: Vec<_> = candidates
            .par_iter()
            .map(|&l| discriminant_derivative(&spec, l, options))
            .collect::<Result<_>>()?;
        for e in estimates
            .iter()
            .filter(|e| e.formula.abs() >= 1e-4)
            .take(16)
        {
            points += 1;
            worst = worst.max(e.relative_error);
        }
    }
    Ok(DerivativeCheck {
        points,
        max_relative_error: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingCheck {
    pub potentials: usize,
    pub violations: Vec<String>,
}

/// Interlacing and the full eigenvalue ordering for `|n| <= 6`.
pub fn ordering(seed: u64, options: &IntegratorOptions) -> Result<OrderingCheck> {
    let mut specs = vec![
        PotentialSpec::zero(),
        PotentialSpec::constant(0.0, 0.0, 1.0),
        PotentialSpec::constant(1.0, -1.0, 0.0),
        PotentialSpec::scalar(ScalarFunction::trig1(1.0, 1.0, 0.0)),
        extrema_specimen(),
        random_canonical_potential(seed, 2),
    ];
    specs.extend(random_specimens(seed));
    let violations: Vec<String> = specs
        .par_iter()
        .enumerate()
        .filter_map(|(i, s)| match band_edges(s, -3, 3, options) {
            Ok(t) if t.interlacing_ok() => None,
            Ok(_) => Some(format!("potential {i}: interlacing")),
            Err(e) => Some(format!("potential {i}: {e}")),
        })
        .collect();
    Ok(OrderingCheck {
        potentials: specs.len(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremaCheck {
    pub rows: Vec<ExtremaRow>,
}

impl ExtremaCheck {
    /// Largest `|extremum - edge|` minus the allowance `max(floor, C pi / 64)`.
    pub fn worst_excess(&self, floor: f64) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let allowed = floor.max(r.slope_bound * PI / 64.0);
                (r.curve_min - r.edge_lo)
                    .abs()
                    .max((r.curve_max - r.edge_hi).abs())
                    - allowed
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Shifted `mu_n` extrema against the edges of rows `n = 2k - 1, 2k` for `k = -1, 1`.
pub fn shift_extrema(options: &IntegratorOptions) -> Result<ExtremaCheck> {
    let spec = extrema_specimen();
    let mut rows = Vec::new();
    for k in [-1, 1] {
        let r = verify_shift_extrema(&spec, k, k, 64, options)?;
        rows.extend(r.rows);
    }
    Ok(ExtremaCheck { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCheck {
    pub free_dirac: DecayReport,
    pub random_canonical: DecayReport,
}

pub const DECAY_LAMBDAS: [f64; 4] = [25.0, 50.0, 100.0, 200.0];

pub fn asymptotic_decay(seed: u64, options: &IntegratorOptions) -> Result<DecayCheck> {
    Ok(DecayCheck {
        free_dirac: remainder_decay_check(
            &PotentialSpec::constant(1.0, -1.0, 0.0),
            &DECAY_LAMBDAS,
            options,
        )?,
        random_canonical: remainder_decay_check(
            &random_canonical_potential(seed, 2),
            &DECAY_LAMBDAS,
            options,
        )?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoundnessCheck {
    pub off_diagonal_certified: bool,
    pub scalar_specimens: usize,
    pub scalar_certified: usize,
}

pub fn inverse_soundness(options: &IntegratorOptions) -> Result<SoundnessCheck> {
    let (v, _) = contrapositive_check(&PotentialSpec::constant(0.0, 0.0, 1.0), 4, 1e-6, options)?;
    let specimens = scalar_specimens();
    let certified = specimens
        .par_iter()
        .map(|s| {
            Ok(matches!(
                contrapositive_check(s, 4, 1e-6, options)?.0,
                ScalarIdentityVerdict::CertifiedNotScalarIdentity { .. }
            ))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(SoundnessCheck {
        off_diagonal_certified: matches!(
            v,
            ScalarIdentityVerdict::CertifiedNotScalarIdentity { .. }
        ),
        scalar_specimens: specimens.len(),
        scalar_certified: certified.iter().filter(|c| **c).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Measured values, as text for the summary.
    pub detail: String,
}

fn outcome(id: u32, name: &'static str, r: Result<(bool, String)>) -> CriterionOutcome {
    match r {
        Ok((passed, detail)) => CriterionOutcome {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => CriterionOutcome {
            id,
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Checks 1 to 10. Byte-stable output for a fixed seed.
pub fn run_all(seed: u64, options: &IntegratorOptions) -> Vec<CriterionOutcome> {
    vec![
        outcome(1, "free discriminant", free_discriminant(options).map(|e| (e <= 1e-8, format!("max error {e:.3e}")))),
        outcome(2, "free Dirac discriminant", free_dirac(options).map(|e| (e <= 1e-7, format!("max error {e:.3e}")))),
        outcome(
            3,
            "scalar potential gaps vanish",
            scalar_forward(6, options).map(|r| {
                (
                    r.gap_count == 26 && r.max_width <= 1e-6 && r.max_edge_error <= 1e-6 && r.all_double,
                    format!(
                        "{} gaps, max width {:.3e}, max edge error {:.3e}, all double {}",
                        r.gap_count, r.max_width, r.max_edge_error, r.all_double
                    ),
                )
            }),
        ),
        outcome(
            4,
            "off-diagonal example",
            worked_example(options).map(|r| {
                (
                    r.max_dirichlet_zero <= 1e-8 && r.delta_at_zero_error <= 1e-8 && r.gap_edge_error <= 1e-6 && r.strict,
                    format!(
                        "max |mu_0|,|nu_0| {:.3e}, Delta(0) error {:.3e}, edge error {:.3e}, strict {}",
                        r.max_dirichlet_zero, r.delta_at_zero_error, r.gap_edge_error, r.strict
                    ),
                )
            }),
        ),
        outcome(5, "shift invariance", shift_invariance(seed, options).map(|e| (e <= 1e-7, format!("max difference {e:.3e}")))),
        outcome(
            6,
            "derivative formula",
            derivative_formula(seed, options).map(|r| {
                (
                    r.points == 48 && r.max_relative_error <= 1e-5,
                    format!("{} points, max relative error {:.3e}", r.points, r.max_relative_error),
                )
            }),
        ),
        outcome(
            7,
            "interlacing and ordering",
            ordering(seed, options).map(|r| {
                (r.violations.is_empty(), format!("{} potentials, violations {:?}", r.potentials, r.violations))
            }),
        ),
        outcome(
            8,
            "shift extrema",
            shift_extrema(options).map(|r| {
                let excess = r.worst_excess(1e-4);
                (excess <= 0.0, format!("{} rows, worst excess over allowance {excess:.3e}", r.rows.len()))
            }),
        ),
        outcome(
            9,
            "asymptotic decay",
            asymptotic_decay(seed, options).map(|r| {
                let slopes = [&r.free_dirac, &r.random_canonical].map(|d| (d.slope_full, d.slope_coarse));
                let ok = [&r.free_dirac, &r.random_canonical]
                    .iter()
                    .all(|d| d.slope_full.is_some_and(|s| s <= -1.7) && d.slope_coarse.is_some_and(|s| s <= -0.9));
                (ok, format!("slopes (full, coarse) {slopes:?}"))
            }),
        ),
        outcome(
            10,
            "inverse soundness",
            inverse_soundness(options).map(|r| {
                (
                    r.off_diagonal_certified && r.scalar_certified == 0,
                    format!(
                        "off-diagonal certified {}, scalar certified {}/{}",
                        r.off_diagonal_certified, r.scalar_certified, r.scalar_specimens
                    ),
                )
            }),
        ),
    ]
}
