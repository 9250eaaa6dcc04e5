//! Large-`lambda` expansion of the fundamental matrix for traceless potentials,
//! and a check of its remainder decay against the integrated solution.

use crate::error::{Result, SpectralError};
use crate::linalg::Mat2;
use crate::monodromy::{monodromy, IntegratorOptions};
use crate::potential::{PotentialSpec, CANONICAL_FORM_TOL};
use crate::quadrature::simpson;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Errors below this count as exact.
pub const EXACT_ERROR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticEvaluation {
    pub lambda: f64,
    pub z: f64,
    /// `e^{-lambda J z} (I - Q(0) / 2 lambda)`.
    pub leading: Mat2,
    /// `Q(z) e^{-lambda J z} / 2 lambda`.
    pub correction: Mat2,
    /// `int_0^z e^{lambda J (t - z)} (J Q^2 - Q') e^{-lambda J t} dt / 2 lambda`.
    pub integral_term: Mat2,
    pub total: Mat2,
}

/// `e^{-lambda J z}`.
fn free_propagator(lambda: f64, z: f64) -> Mat2 {
    Mat2::rotation(-lambda * z)
}

fn require_canonical(spec: &PotentialSpec) -> Result<()> {
    let deviation = spec.canonical_deviation();
    if deviation > CANONICAL_FORM_TOL {
        return Err(SpectralError::NotCanonicalForm { deviation });
    }
    Ok(())
}

fn require_nonzero(lambda: f64) -> Result<()> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(SpectralError::InvalidInput(format!(
            "expansion needs finite nonzero lambda, got {lambda}"
        )));
    }
    Ok(())
}

/// Quadrature intervals for the oscillatory integral term.
pub fn integral_intervals(lambda: f64) -> usize {
    let n = 512usize.max(64 * lambda.abs().ceil() as usize);
    n + n % 2
}

pub fn asymptotic_fundamental(
    spec: &PotentialSpec,
    lambda: f64,
    z: f64,
) -> Result<AsymptoticEvaluation> {
    require_canonical(spec)?;
    require_nonzero(lambda)?;
    let dq = spec.derivative()?;
    let inv = 1.0 / (2.0 * lambda);
    let e = free_propagator(lambda, z);
    let leading = e * (Mat2::IDENTITY - spec.evaluate(0.0) * inv);
    let correction = spec.evaluate(z) * e * inv;

    let integral_term = if z == 0.0 {
        Mat2::ZERO
    } else {
        let n = integral_intervals(lambda);
        let h = z / n as f64;
        let mut entries = [
            Vec::with_capacity(n + 1),
            Vec::with_capacity(n + 1),
            Vec::with_capacity(n + 1),
            Vec::with_capacity(n + 1),
        ];
        for i in 0..=n {
            let t = i as f64 * h;
            let q = spec.evaluate(t);
            let kernel = Mat2::J * (q * q) - dq.evaluate(t);
            let g = Mat2::rotation(lambda * (t - z)) * kernel * Mat2::rotation(-lambda * t);
            for (slot, v) in entries.iter_mut().zip(g.to_row_major()) {
                slot.push(v);
            }
        }
        let v: Vec<f64> = entries.iter().map(|e| simpson(e, h) * inv).collect();
        Mat2::from_row_major(&v)
    };
    Ok(AsymptoticEvaluation {
        lambda,
        z,
        leading,
        correction,
        integral_term,
        total: leading + correction + integral_term,
    })
}

/// `e^{-lambda J z} [I - Q(0)/2 lambda + (J / 2 lambda) int_0^z Q^2] + e^{lambda J z} Q(z) / 2 lambda`.
pub fn coarse_asymptotic(spec: &PotentialSpec, lambda: f64, z: f64) -> Result<Mat2> {
    require_canonical(spec)?;
    require_nonzero(lambda)?;
    let inv = 1.0 / (2.0 * lambda);
    let (q1, q2, q) = (spec.q1(), spec.q2(), spec.off_diagonal());
    let a = q1.integral_of_product(q1, z) + q.integral_of_product(q, z);
    let b = q.integral_of_product(q1, z) + q.integral_of_product(q2, z);
    let d = q2.integral_of_product(q2, z) + q.integral_of_product(q, z);
    let q_sq = Mat2::new(a, b, b, d);
    let bracket = Mat2::IDENTITY - spec.evaluate(0.0) * inv + Mat2::J * q_sq * inv;
    Ok(free_propagator(lambda, z) * bracket + Mat2::rotation(lambda * z) * spec.evaluate(z) * inv)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub lambda: f64,
    pub err_full: f64,
    pub err_coarse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    /// Least-squares slope of `ln err` against `ln lambda`; `None` when exact.
    pub slope_full: Option<f64>,
    pub slope_coarse: Option<f64>,
    /// Every error below `EXACT_ERROR`.
    pub exact: bool,
    /// `max / min` of `err_full * lambda^2`.
    pub scaled_spread: Option<f64>,
    pub full_ok: bool,
    pub coarse_ok: bool,
}

pub const MAX_SLOPE_FULL: f64 = -1.7;
pub const MAX_SLOPE_COARSE: f64 = -0.9;

fn log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || ys.iter().any(|y| *y <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Integration tolerance for the reference solution; its global error has to
/// sit well below the remainder being measured.
pub const REFERENCE_RTOL: f64 = 1e-15;

/// Errors of both expansions at `z = pi` against the monodromy matrix.
pub fn remainder_decay_check(
    spec: &PotentialSpec,
    lambdas: &[f64],
    options: &IntegratorOptions,
) -> Result<DecayReport> {
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpectralError::InvalidInput(
            "lambda list must be increasing".into(),
        ));
    }
    let reference = IntegratorOptions {
        rtol: options.rtol.min(REFERENCE_RTOL),
        atol: options.atol.min(REFERENCE_RTOL),
        ..*options
    };
    let rows: Vec<DecayRow> = lambdas
        .par_iter()
        .map(|&lambda| {
            let numeric = monodromy(spec, lambda, &reference)?.a;
            let full = asymptotic_fundamental(spec, lambda, PI)?.total;
            let coarse = coarse_asymptotic(spec, lambda, PI)?;
            Ok(DecayRow {
                lambda,
                err_full: (numeric - full).op_norm(),
                err_coarse: (numeric - coarse).op_norm(),
            })
        })
        .collect::<Result<_>>()?;
    let exact = rows
        .iter()
        .all(|r| r.err_full < EXACT_ERROR && r.err_coarse < EXACT_ERROR);
    let ls: Vec<f64> = rows.iter().map(|r| r.lambda.abs()).collect();
    let (slope_full, slope_coarse, scaled_spread) = if exact {
        (None, None, None)
    } else {
        let full: Vec<f64> = rows.iter().map(|r| r.err_full).collect();
        let coarse: Vec<f64> = rows.iter().map(|r| r.err_coarse).collect();
        let scaled: Vec<f64> = rows
            .iter()
            .map(|r| r.err_full * r.lambda * r.lambda)
            .collect();
        let max = scaled.iter().copied().fold(0.0, f64::max);
        let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        (
            log_slope(&ls, &full),
            log_slope(&ls, &coarse),
            (min > 0.0).then(|| max / min),
        )
    };
    Ok(DecayReport {
        full_ok: exact || slope_full.is_some_and(|s| s <= MAX_SLOPE_FULL),
        coarse_ok: exact || slope_coarse.is_some_and(|s| s <= MAX_SLOPE_COARSE),
        rows,
        slope_full,
        slope_coarse,
        exact,
        scaled_spread,
    })
}
