//! Fundamental matrix, monodromy matrix, discriminant and Floquet multipliers.
//!
//! The system `J Y' + Q Y = lambda Y` is integrated as `Y' = -J (lambda I - Q) Y`
//! from `Y(0) = I`. Matrices are row-major: `m[r][c]` is row `r`, column `c`.
//! The accessors `y11 .. y22` use the column-solution convention instead:
//! `y_ij` is component `j` of the `i`-th column, so `y12 = m[1][0]`.

use crate::error::{Result, SpectralError};
use crate::linalg::Mat2;
use crate::ode::{integrate, integrate_on_mesh, OdeSystem, StepControl};
use crate::potential::PotentialSpec;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Bound for `|J Y' + (Q - lambda) Y|` at trajectory midpoints.
    pub residual_tol: f64,
    /// Relative agreement required between the integral formula for the
    /// discriminant derivative and its finite-difference estimate.
    pub derivative_rel_tol: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 2_000_000,
            residual_tol: 1e-9,
            derivative_rel_tol: 1e-5,
        }
    }
}

impl IntegratorOptions {
    pub fn step_control(&self) -> StepControl {
        StepControl {
            rtol: self.rtol,
            atol: self.atol,
            max_steps: self.max_steps,
            h_max: f64::INFINITY,
        }
    }

    /// Same options with integration tolerances scaled by `factor`.
    pub fn with_tolerance_scale(&self, factor: f64) -> Self {
        IntegratorOptions {
            rtol: self.rtol * factor,
            atol: self.atol * factor,
            ..*self
        }
    }
}

/// Initial step: the solution oscillates with frequency about `|lambda|`.
pub fn initial_step(lambda: f64) -> f64 {
    (PI / 64.0).min(1.0 / (4.0 * (1.0 + lambda.abs())))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() {
        Ok(())
    } else {
        Err(SpectralError::InvalidInput(format!(
            "lambda must be finite, got {lambda}"
        )))
    }
}

/// `Y' = M Y` with `M = [[q, q2 - lambda], [lambda - q1, -q]]`.
#[inline]
fn generator(spec: &PotentialSpec, lambda: f64, z: f64) -> [[f64; 2]; 2] {
    let q = spec.evaluate(z).m;
    [[q[0][1], q[1][1] - lambda], [lambda - q[0][0], -q[0][1]]]
}

#[inline]
fn apply(m: &[[f64; 2]; 2], y: &[f64], dy: &mut [f64]) {
    dy[0] = m[0][0] * y[0] + m[0][1] * y[2];
    dy[1] = m[0][0] * y[1] + m[0][1] * y[3];
    dy[2] = m[1][0] * y[0] + m[1][1] * y[2];
    dy[3] = m[1][0] * y[1] + m[1][1] * y[3];
}

struct Fundamental<'a> {
    spec: &'a PotentialSpec,
    lambda: f64,
}

impl OdeSystem<4> for Fundamental<'_> {
    fn rhs(&self, z: f64, y: &[f64; 4], dy: &mut [f64; 4]) {
        apply(&generator(self.spec, self.lambda, z), y, dy);
    }
}

/// Fundamental matrix plus the running integrals of `|Y1|^2`, `Y1.Y2`, `|Y2|^2`.
struct Augmented<'a> {
    spec: &'a PotentialSpec,
    lambda: f64,
}

impl OdeSystem<7> for Augmented<'_> {
    fn rhs(&self, z: f64, y: &[f64; 7], dy: &mut [f64; 7]) {
        apply(&generator(self.spec, self.lambda, z), &y[..4], &mut dy[..4]);
        dy[4] = y[0] * y[0] + y[2] * y[2];
        dy[5] = y[0] * y[1] + y[2] * y[3];
        dy[6] = y[1] * y[1] + y[3] * y[3];
    }
}

/// Rescale the matrix part to unit determinant.
#[inline]
fn renormalize(y: &mut [f64]) {
    let det = y[0] * y[3] - y[1] * y[2];
    if det > 0.0 && det.is_finite() {
        let s = 1.0 / det.sqrt();
        for v in &mut y[..4] {
            *v *= s;
        }
    }
}

const IDENTITY_STATE: [f64; 4] = [1.0, 0.0, 0.0, 1.0];

fn to_mat(y: &[f64]) -> Mat2 {
    Mat2::new(y[0], y[1], y[2], y[3])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Monodromy {
    pub lambda: f64,
    /// `Y(pi, lambda)`.
    pub a: Mat2,
    /// `trace(a)`.
    pub delta: f64,
}

impl Monodromy {
    fn from_matrix(lambda: f64, a: Mat2) -> Self {
        Monodromy {
            lambda,
            delta: a.m[0][0] + a.m[1][1],
            a,
        }
    }

    pub fn y11(&self) -> f64 {
        self.a.m[0][0]
    }

    pub fn y12(&self) -> f64 {
        self.a.m[1][0]
    }

    pub fn y21(&self) -> f64 {
        self.a.m[0][1]
    }

    pub fn y22(&self) -> f64 {
        self.a.m[1][1]
    }

    pub fn det_error(&self) -> f64 {
        (self.a.det() - 1.0).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalTrajectory {
    pub lambda: f64,
    pub z_nodes: Vec<f64>,
    pub matrices: Vec<Mat2>,
    /// `max |det Y - 1|` over the nodes.
    pub det_drift: f64,
    /// Largest midpoint residual `|J Y' + (Q - lambda) Y|`, from a five-point
    /// difference of short re-integrations.
    pub max_residual: f64,
}

fn trajectory_intervals(lambda: f64) -> usize {
    if lambda.abs() > 50.0 {
        1024
    } else {
        512
    }
}

pub fn integrate_fundamental(
    spec: &PotentialSpec,
    lambda: f64,
    options: &IntegratorOptions,
) -> Result<FundamentalTrajectory> {
    check_lambda(lambda)?;
    let sys = Fundamental { spec, lambda };
    let control = options.step_control();
    let n = trajectory_intervals(lambda);
    let z_nodes: Vec<f64> = (0..=n).map(|i| PI * i as f64 / n as f64).collect();
    let mut matrices = Vec::with_capacity(n + 1);
    matrices.push(Mat2::IDENTITY);
    let mut y = IDENTITY_STATE;
    let mut h = initial_step(lambda);
    for w in z_nodes.windows(2) {
        let adv = integrate(&sys, w[0], w[1], y, h, &control, |s| renormalize(s), None)?;
        y = adv.y;
        h = adv.h_next;
        matrices.push(to_mat(&y));
    }
    let det_drift = matrices
        .iter()
        .map(|m| (m.det() - 1.0).abs())
        .fold(0.0, f64::max);

    let q_scale = matrices_scale(spec);
    let dz = 0.004 / (1.0 + lambda.abs() + q_scale);
    let max_residual = z_nodes
        .windows(2)
        .zip(&matrices)
        .map(|(w, start)| {
            midpoint_residual(
                &sys,
                spec,
                lambda,
                w[0],
                start,
                0.5 * (w[0] + w[1]),
                dz,
                &control,
            )
        })
        .try_fold(0.0_f64, |acc, r| r.map(|r| acc.max(r)))?;

    Ok(FundamentalTrajectory {
        lambda,
        z_nodes,
        matrices,
        det_drift,
        max_residual,
    })
}

fn matrices_scale(spec: &PotentialSpec) -> f64 {
    crate::potential::check_grid()
        .map(|z| spec.evaluate(z).max_abs())
        .fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
fn midpoint_residual(
    sys: &Fundamental<'_>,
    spec: &PotentialSpec,
    lambda: f64,
    z0: f64,
    start: &Mat2,
    mid: f64,
    dz: f64,
    control: &StepControl,
) -> Result<f64> {
    let stencil = [mid - 2.0 * dz, mid - dz, mid, mid + dz, mid + 2.0 * dz];
    let mut y = start.to_row_major();
    let mut z = z0;
    let mut h = dz;
    let mut values = [[0.0; 4]; 5];
    for (k, &target) in stencil.iter().enumerate() {
        let adv = integrate(sys, z, target, y, h, control, |_| {}, None)?;
        y = adv.y;
        h = adv.h_next;
        z = target;
        values[k] = y;
    }
    let dy = to_mat(&std::array::from_fn::<f64, 4, _>(|i| {
        (values[0][i] - 8.0 * values[1][i] + 8.0 * values[3][i] - values[4][i]) / (12.0 * dz)
    }));
    let ymid = to_mat(&values[2]);
    let resid = Mat2::J * dy + (spec.evaluate(mid) - Mat2::scalar(lambda)) * ymid;
    Ok(resid.op_norm() / ymid.op_norm().max(1.0))
}

pub fn monodromy(
    spec: &PotentialSpec,
    lambda: f64,
    options: &IntegratorOptions,
) -> Result<Monodromy> {
    check_lambda(lambda)?;
    let sys = Fundamental { spec, lambda };
    let adv = integrate(
        &sys,
        0.0,
        PI,
        IDENTITY_STATE,
        initial_step(lambda),
        &options.step_control(),
        |s| renormalize(s),
        None,
    )?;
    Ok(Monodromy::from_matrix(lambda, to_mat(&adv.y)))
}

pub fn discriminant(spec: &PotentialSpec, lambda: f64, options: &IntegratorOptions) -> Result<f64> {
    Ok(monodromy(spec, lambda, options)?.delta)
}

/// Monodromy at many spectral parameters, in parallel.
pub fn monodromy_sweep(
    spec: &PotentialSpec,
    lambdas: &[f64],
    options: &IntegratorOptions,
) -> Result<Vec<Monodromy>> {
    lambdas
        .par_iter()
        .map(|&l| monodromy(spec, l, options))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeEstimate {
    pub lambda: f64,
    /// From the integrals of the fundamental solutions.
    pub formula: f64,
    /// Central difference on the frozen step mesh.
    pub finite_difference: f64,
    pub relative_error: f64,
}

/// Step mesh and monodromy data from an augmented run at `lambda`.
struct AugmentedRun {
    mesh: Vec<f64>,
    a: Mat2,
    integrals: [f64; 3],
}

fn augmented_run(
    spec: &PotentialSpec,
    lambda: f64,
    options: &IntegratorOptions,
) -> Result<AugmentedRun> {
    check_lambda(lambda)?;
    let sys = Augmented { spec, lambda };
    let mut y0 = [0.0; 7];
    y0[..4].copy_from_slice(&IDENTITY_STATE);
    let mut mesh = vec![0.0];
    let adv = integrate(
        &sys,
        0.0,
        PI,
        y0,
        initial_step(lambda),
        &options.step_control(),
        |s| renormalize(&mut s[..4]),
        Some(&mut mesh),
    )?;
    Ok(AugmentedRun {
        mesh,
        a: to_mat(&adv.y[..4]),
        integrals: [adv.y[4], adv.y[5], adv.y[6]],
    })
}

fn delta_on_mesh(spec: &PotentialSpec, lambda: f64, mesh: &[f64]) -> f64 {
    let y = integrate_on_mesh(&Fundamental { spec, lambda }, mesh, IDENTITY_STATE, |s| {
        renormalize(s)
    });
    y[0] + y[3]
}

fn fd_step(lambda: f64) -> f64 {
    1e-5 * lambda.abs().max(1.0)
}

/// `d Delta / d lambda` from the integrals of the fundamental solutions,
/// cross-checked against a central difference.
pub fn discriminant_derivative(
    spec: &PotentialSpec,
    lambda: f64,
    options: &IntegratorOptions,
) -> Result<DerivativeEstimate> {
    let run = augmented_run(spec, lambda, options)?;
    let a = run.a.m;
    let [n11, n12, n22] = run.integrals;
    let formula = a[0][1] * n11 + (a[1][1] - a[0][0]) * n12 - a[1][0] * n22;

    let d = fd_step(lambda);
    let f = |k: f64| delta_on_mesh(spec, lambda + k * d, &run.mesh);
    let finite_difference = (8.0 * (f(1.0) - f(-1.0)) - (f(2.0) - f(-2.0))) / (12.0 * d);

    let diff = (formula - finite_difference).abs();
    let scale = formula.abs().max(finite_difference.abs());
    let relative_error = if scale > 0.0 { diff / scale } else { 0.0 };
    let mismatch = if scale < 1e-6 {
        diff > 1e-8
    } else {
        relative_error > 10.0 * options.derivative_rel_tol
    };
    if mismatch {
        return Err(SpectralError::DerivativeMismatch {
            lambda,
            formula,
            finite_difference,
        });
    }
    Ok(DerivativeEstimate {
        lambda,
        formula,
        finite_difference,
        relative_error,
    })
}

/// Five-point second difference of the discriminant on a frozen mesh.
pub fn discriminant_second_derivative(
    spec: &PotentialSpec,
    lambda: f64,
    options: &IntegratorOptions,
) -> Result<f64> {
    let run = augmented_run(spec, lambda, options)?;
    let d = 1e-3 * lambda.abs().max(1.0);
    let f = |k: f64| delta_on_mesh(spec, lambda + k * d, &run.mesh);
    Ok((-f(2.0) + 16.0 * f(1.0) - 30.0 * f(0.0) + 16.0 * f(-1.0) - f(-2.0)) / (12.0 * d * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloquetPair {
    pub rho_plus: Complex64,
    pub rho_minus: Complex64,
}

/// Roots of `rho^2 - delta rho + 1`.
pub fn floquet_multipliers(m: &Monodromy) -> FloquetPair {
    multipliers_from_delta(m.delta)
}

pub fn multipliers_from_delta(delta: f64) -> FloquetPair {
    let disc = delta * delta - 4.0;
    if disc >= 0.0 {
        let r = disc.sqrt();
        if delta >= 0.0 {
            let big = 0.5 * (delta + r);
            FloquetPair {
                rho_plus: big.into(),
                rho_minus: (1.0 / big).into(),
            }
        } else {
            let big = 0.5 * (delta - r);
            FloquetPair {
                rho_plus: (1.0 / big).into(),
                rho_minus: big.into(),
            }
        }
    } else {
        let re = 0.5 * delta;
        let im = (1.0 - re * re).max(0.0).sqrt();
        FloquetPair {
            rho_plus: Complex64::new(re, im),
            rho_minus: Complex64::new(re, -im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Boundary,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Boundary => "boundary",
        }
    }
}

pub fn classify_stability(delta: f64, tol: f64) -> Stability {
    let excess = delta.abs() - 2.0;
    if excess.abs() <= tol {
        Stability::Boundary
    } else if excess < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::ScalarFunction;

    fn opts() -> IntegratorOptions {
        IntegratorOptions::default()
    }

    #[test]
    fn free_monodromy_at_one_is_minus_identity() {
        let m = monodromy(&PotentialSpec::zero(), 1.0, &opts()).unwrap();
        assert!((m.a - Mat2::scalar(-1.0)).max_abs() < 1e-10);
    }

    #[test]
    fn free_discriminant_is_cosine() {
        for i in 0..21 {
            let l = -5.0 + 0.5 * i as f64;
            let d = discriminant(&PotentialSpec::zero(), l, &opts()).unwrap();
            assert!((d - 2.0 * (l * PI).cos()).abs() < 1e-9, "lambda = {l}");
        }
    }

    #[test]
    fn free_dirac_discriminant() {
        let m: f64 = 1.5;
        let spec = PotentialSpec::constant(m, -m, 0.0);
        for l in [0.3, 1.0, 2.0, 3.7] {
            let d = discriminant(&spec, l, &opts()).unwrap();
            let s = l * l - m * m;
            let expect = if s >= 0.0 {
                2.0 * (s.sqrt() * PI).cos()
            } else {
                2.0 * ((-s).sqrt() * PI).cosh()
            };
            assert!((d - expect).abs() < 1e-8, "lambda = {l}");
        }
    }

    #[test]
    fn off_diagonal_example_at_zero() {
        let d = discriminant(&PotentialSpec::constant(0.0, 0.0, 1.0), 0.0, &opts()).unwrap();
        assert!((d - 2.0 * PI.cosh()).abs() < 1e-8);
        assert!((d - 23.1839).abs() < 1e-4);
    }

    #[test]
    fn trajectory_starts_at_identity_and_keeps_unit_determinant() {
        let spec = PotentialSpec::new(
            ScalarFunction::trig1(0.2, 0.5, -0.3),
            ScalarFunction::trig1(-0.1, 0.0, 0.4),
            ScalarFunction::trig1(0.3, 0.2, 0.1),
        );
        let t = integrate_fundamental(&spec, 1.3, &opts()).unwrap();
        assert_eq!(t.matrices[0], Mat2::IDENTITY);
        assert_eq!(t.z_nodes.len(), 513);
        assert!(t.det_drift <= 1e-10);
        assert!(
            t.max_residual <= opts().residual_tol,
            "residual {}",
            t.max_residual
        );
        let m = monodromy(&spec, 1.3, &opts()).unwrap();
        assert!((t.matrices[512] - m.a).max_abs() < 1e-9);
    }

    #[test]
    fn derivative_free_case() {
        let d = discriminant_derivative(&PotentialSpec::zero(), 0.5, &opts()).unwrap();
        assert!((d.formula + 2.0 * PI).abs() < 1e-9);
        let d = discriminant_derivative(&PotentialSpec::zero(), 0.0, &opts()).unwrap();
        assert!(d.formula.abs() < 1e-12);
    }

    #[test]
    fn derivative_scalar_constant() {
        let c = 0.7;
        let spec = PotentialSpec::scalar(c.into());
        for l in [-1.2, 0.4, 2.9] {
            let d = discriminant_derivative(&spec, l, &opts()).unwrap();
            let expect = -2.0 * PI * ((l - c) * PI).sin();
            assert!((d.formula - expect).abs() < 1e-9);
            assert!(d.relative_error <= 1e-5);
        }
    }

    #[test]
    fn multiplier_examples() {
        let p = multipliers_from_delta(2.0);
        assert_eq!(p.rho_plus, Complex64::new(1.0, 0.0));
        assert_eq!(p.rho_minus, Complex64::new(1.0, 0.0));
        let p = multipliers_from_delta(0.0);
        assert_eq!(p.rho_plus, Complex64::new(0.0, 1.0));
        let p = multipliers_from_delta(23.1839);
        assert!((p.rho_plus.re - 23.1407).abs() < 1e-4);
        assert!((p.rho_minus.re - 0.0432).abs() < 1e-4);
        assert!(((p.rho_plus * p.rho_minus).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stability_examples() {
        assert_eq!(classify_stability(0.0, 1e-9), Stability::Stable);
        assert_eq!(classify_stability(23.1839, 1e-9), Stability::Unstable);
        assert_eq!(classify_stability(2.0, 1e-9), Stability::Boundary);
        assert_eq!(classify_stability(-2.0 - 1e-12, 1e-9), Stability::Boundary);
    }

    #[test]
    fn non_finite_lambda_rejected() {
        assert!(matches!(
            monodromy(&PotentialSpec::zero(), f64::NAN, &opts()),
            Err(SpectralError::InvalidInput(_))
        ));
    }
}
