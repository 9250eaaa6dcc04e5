//! Prüfer angle of the canonical system and the Dirichlet-type eigenvalues.
//!
//! Writing a solution as `R (cos theta, sin theta)` gives
//! `theta' = lambda - q sin 2 theta - q1 cos^2 theta - q2 sin^2 theta`.
//! The angle is tracked on its continuous branch; nothing is reduced mod pi.

use crate::error::{Result, SpectralError};
use crate::monodromy::{initial_step, IntegratorOptions};
use crate::ode::{integrate, OdeSystem};
use crate::potential::PotentialSpec;
use crate::roots::{bisect_secant, expand_increasing, RootOptions};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Outward doublings allowed while bracketing an eigenvalue.
pub const MAX_BRACKET_DOUBLINGS: u32 = 64;

struct Angle<'a> {
    spec: &'a PotentialSpec,
    lambda: f64,
}

impl OdeSystem<1> for Angle<'_> {
    fn rhs(&self, z: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
        let q = self.spec.evaluate(z).m;
        let (s2, c2) = (2.0 * y[0]).sin_cos();
        let cos_sq = 0.5 * (1.0 + c2);
        let sin_sq = 0.5 * (1.0 - c2);
        dy[0] = self.lambda - q[0][1] * s2 - q[0][0] * cos_sq - q[1][1] * sin_sq;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleSolution {
    pub lambda: f64,
    pub gamma: f64,
    /// `theta(pi)` on the continuous branch through `theta(0) = gamma`.
    pub theta_end: f64,
    /// `floor(theta_end / pi)`.
    pub winding_hint: i64,
}

pub fn integrate_angle(
    spec: &PotentialSpec,
    lambda: f64,
    gamma: f64,
    options: &IntegratorOptions,
) -> Result<AngleSolution> {
    if !(0.0..PI).contains(&gamma) {
        return Err(SpectralError::InvalidInput(format!(
            "gamma must lie in [0, pi), got {gamma}"
        )));
    }
    if !lambda.is_finite() {
        return Err(SpectralError::InvalidInput(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    let adv = integrate(
        &Angle { spec, lambda },
        0.0,
        PI,
        [gamma],
        initial_step(lambda),
        &options.step_control(),
        |_| {},
        None,
    )?;
    let theta_end = adv.y[0];
    Ok(AngleSolution {
        lambda,
        gamma,
        theta_end,
        winding_hint: (theta_end / PI).floor() as i64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirichletKind {
    /// First component vanishes at both ends: `theta(0) = 0`, `theta(pi) = n pi`.
    Mu,
    /// Second component vanishes at both ends: `theta(0) = pi/2`, `theta(pi) = n pi + pi/2`.
    Nu,
}

impl DirichletKind {
    pub fn gamma(self) -> f64 {
        match self {
            DirichletKind::Mu => 0.0,
            DirichletKind::Nu => FRAC_PI_2,
        }
    }

    pub fn target(self, n: i64) -> f64 {
        n as f64 * PI + self.gamma()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DirichletKind::Mu => "mu",
            DirichletKind::Nu => "nu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirichletEigenvalue {
    pub index: i64,
    pub kind: DirichletKind,
    pub value: f64,
    /// `|theta(pi) - target|` at `value`.
    pub residual: f64,
}

/// The unique `lambda` with `theta(pi, lambda, gamma) = target`.
pub fn find_dirichlet(
    spec: &PotentialSpec,
    n: i64,
    kind: DirichletKind,
    options: &IntegratorOptions,
) -> Result<DirichletEigenvalue> {
    let gamma = kind.gamma();
    let target = kind.target(n);
    let mut g = |l: f64| Ok(integrate_angle(spec, l, gamma, options)?.theta_end - target);
    let (lo, hi, glo, ghi) = expand_increasing(&mut g, n as f64, 1.0, MAX_BRACKET_DOUBLINGS)?
        .ok_or(SpectralError::BracketFailure {
            index: n,
            doublings: MAX_BRACKET_DOUBLINGS,
        })?;
    let root = bisect_secant(&mut g, lo, hi, glo, ghi, &RootOptions::default())?;
    Ok(DirichletEigenvalue {
        index: n,
        kind,
        value: root.x,
        residual: root.fx.abs(),
    })
}

pub fn find_mu(
    spec: &PotentialSpec,
    n: i64,
    options: &IntegratorOptions,
) -> Result<DirichletEigenvalue> {
    find_dirichlet(spec, n, DirichletKind::Mu, options)
}

pub fn find_nu(
    spec: &PotentialSpec,
    n: i64,
    options: &IntegratorOptions,
) -> Result<DirichletEigenvalue> {
    find_dirichlet(spec, n, DirichletKind::Nu, options)
}

/// Eigenvalues for a range of indices, in parallel.
pub fn dirichlet_range(
    spec: &PotentialSpec,
    kind: DirichletKind,
    n_min: i64,
    n_max: i64,
    options: &IntegratorOptions,
) -> Result<Vec<DirichletEigenvalue>> {
    (n_min..=n_max)
        .into_par_iter()
        .map(|n| find_dirichlet(spec, n, kind, options))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftCurve {
    pub index: i64,
    /// `(tau, mu_n(tau))` in grid order.
    pub points: Vec<(f64, f64)>,
    /// Largest `|mu(tau_i+1) - mu(tau_i)| / (tau_i+1 - tau_i)`.
    pub slope_bound: f64,
    /// False if some jump exceeds ten times grid spacing times the median slope.
    pub continuous: bool,
}

/// `mu_n` of the shifted potentials `Q(. + tau)`.
pub fn shifted_mu_curve(
    spec: &PotentialSpec,
    n: i64,
    tau_grid: &[f64],
    options: &IntegratorOptions,
) -> Result<ShiftCurve> {
    if let Some(t) = tau_grid.iter().find(|t| !(0.0..=PI).contains(*t)) {
        return Err(SpectralError::InvalidInput(format!(
            "shift {t} outside [0, pi]"
        )));
    }
    let values: Vec<f64> = tau_grid
        .par_iter()
        .map(|&t| Ok(find_mu(&spec.shift(t), n, options)?.value))
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = tau_grid.iter().copied().zip(values).collect();
    let (slope_bound, continuous) = continuity(&points);
    Ok(ShiftCurve {
        index: n,
        points,
        slope_bound,
        continuous,
    })
}

fn continuity(points: &[(f64, f64)]) -> (f64, bool) {
    let steps: Vec<(f64, f64)> = points
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| (w[1].0 - w[0].0, (w[1].1 - w[0].1).abs()))
        .collect();
    if steps.is_empty() {
        return (0.0, true);
    }
    let mut slopes: Vec<f64> = steps.iter().map(|(dt, dm)| dm / dt).collect();
    let slope_bound = slopes.iter().copied().fold(0.0, f64::max);
    slopes.sort_by(f64::total_cmp);
    let median = slopes[slopes.len() / 2];
    let continuous = steps
        .iter()
        .all(|(dt, dm)| *dm <= 10.0 * dt * median.max(1e-6) + 1e-9);
    (slope_bound, continuous)
}

/// Uniform grid of `samples` shifts in `[0, pi)`.
pub fn uniform_tau_grid(samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|i| PI * i as f64 / samples as f64)
        .collect()
}
