//! Gap-vanishing diagnostics: a scalar potential `p I` has no open gaps, so an
//! open gap certifies `Q != p I`. Vanishing of finitely many gaps proves nothing.

use crate::error::{Result, SpectralError};
use crate::linalg::Mat2;
use crate::monodromy::{discriminant, monodromy, IntegratorOptions};
use crate::potential::{PotentialSpec, ScalarFunction, SCALAR_IDENTITY_TOL};
use crate::spectra::{
    band_edges, detect_double, instability_intervals, InstabilityInterval, Parity,
};
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_GAP_COUNT: i64 = 8;
pub const DEFAULT_GAP_TOL: f64 = 1e-6;
/// Edge-position agreement required by the forward check.
pub const EDGE_POSITION_TOL: f64 = 1e-6;
/// Matrix tolerance for double eigenvalues in the forward check.
pub const DOUBLE_TOL: f64 = 1e-8;

/// `2 cos(lambda pi - int_0^pi p)`, the discriminant of `p I`.
pub fn closed_form_discriminant_scalar(p: &ScalarFunction, lambda: f64) -> f64 {
    2.0 * (lambda * PI - p.integral_to(PI)).cos()
}

/// `Y(z) = e^{J (int_0^z p - lambda z)}` for `Q = p I`.
pub fn closed_form_fundamental_scalar(p: &ScalarFunction, lambda: f64, z: f64) -> Mat2 {
    Mat2::rotation(p.integral_to(z) - lambda * z)
}

/// `2 cos(sqrt(lambda^2 - m^2) pi)` for `Q = m sigma_3`, continued by `cosh` when `|lambda| < |m|`.
pub fn free_dirac_discriminant(m: f64, lambda: f64) -> f64 {
    constant_potential_discriminant(m, -m, 0.0, lambda)
}

/// Discriminant of a constant potential: `(M pi)^2 = -D pi^2 I` with
/// `D = (lambda - q1)(lambda - q2) - q^2`.
pub fn constant_potential_discriminant(q1: f64, q2: f64, q: f64, lambda: f64) -> f64 {
    let d = (lambda - q1) * (lambda - q2) - q * q;
    if d >= 0.0 {
        2.0 * (d.sqrt() * PI).cos()
    } else {
        2.0 * ((-d).sqrt() * PI).cosh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PotentialClass {
    ScalarIdentity,
    CanonicalForm,
    General,
}

impl PotentialClass {
    pub fn of(spec: &PotentialSpec) -> Self {
        let tags = spec.tags();
        if tags.is_scalar_identity {
            PotentialClass::ScalarIdentity
        } else if tags.is_canonical_form {
            PotentialClass::CanonicalForm
        } else {
            PotentialClass::General
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum GapVerdict {
    AllVanish { tol: f64 },
    GapFound { j: i64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    /// Gaps for `k` in `-n..=n`.
    pub n: i64,
    pub gap_widths: Vec<InstabilityInterval>,
    pub max_width: f64,
    pub verdict: GapVerdict,
    pub potential_class: PotentialClass,
}

pub fn gap_vanishing_report(
    spec: &PotentialSpec,
    n: i64,
    tol: f64,
    options: &IntegratorOptions,
) -> Result<GapReport> {
    if n < 1 {
        return Err(SpectralError::InvalidInput(format!(
            "gap count must be at least 1, got {n}"
        )));
    }
    let table = band_edges(spec, -n, n, options)?;
    let gap_widths = instability_intervals(&table);
    let widest = gap_widths
        .iter()
        .max_by(|a, b| a.width.total_cmp(&b.width))
        .copied()
        .expect("non-empty table");
    let verdict = if widest.width > tol {
        GapVerdict::GapFound {
            j: widest.index,
            width: widest.width,
        }
    } else {
        GapVerdict::AllVanish { tol }
    };
    Ok(GapReport {
        n,
        max_width: widest.width,
        gap_widths,
        verdict,
        potential_class: PotentialClass::of(spec),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardReport {
    /// Mean of the scalar `p`.
    pub shift_constant: f64,
    pub max_width: f64,
    pub max_edge_error: f64,
    pub edges_checked: usize,
    pub all_double: bool,
}

/// For `Q = p I`: every gap closed, periodic edges at `2k + c`, anti-periodic
/// at `2k - 1 + c`, and every edge a double eigenvalue.
pub fn forward_check(
    spec: &PotentialSpec,
    n: i64,
    tol: f64,
    options: &IntegratorOptions,
) -> Result<ForwardReport> {
    if !spec.is_scalar_identity(SCALAR_IDENTITY_TOL) {
        return Err(SpectralError::InvalidInput(
            "forward check needs Q = p I".into(),
        ));
    }
    let c = spec.half_trace().mean();
    let table = band_edges(spec, -n, n, options)?;
    let mut max_width: f64 = 0.0;
    let mut max_edge_error: f64 = 0.0;
    let mut edges_checked = 0;
    for row in &table.rows {
        if row.width() > tol {
            return Err(SpectralError::AssertionFailure {
                index: row.n,
                detail: format!("gap width {:e} exceeds {tol:e}", row.width()),
            });
        }
        max_width = max_width.max(row.width());
        let expected = row.n as f64 + c;
        for edge in [row.lo, row.hi] {
            let err = (edge - expected).abs();
            max_edge_error = max_edge_error.max(err);
            if err > EDGE_POSITION_TOL {
                return Err(SpectralError::AssertionFailure {
                    index: row.n,
                    detail: format!("edge {edge} is {err:e} from {expected}"),
                });
            }
            if !detect_double(spec, edge, row.parity, DOUBLE_TOL, options)? {
                return Err(SpectralError::AssertionFailure {
                    index: row.n,
                    detail: format!("edge {edge} is not a double eigenvalue"),
                });
            }
            edges_checked += 1;
        }
    }
    Ok(ForwardReport {
        shift_constant: c,
        max_width,
        max_edge_error,
        edges_checked,
        all_double: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum ScalarIdentityVerdict {
    /// An open gap was found; `Q` is not a scalar multiple of the identity.
    CertifiedNotScalarIdentity { j: i64, width: f64 },
    /// No open gap among the checked indices. Not a certificate.
    ConsistentWithScalarIdentityUpToN { n: i64 },
}

pub fn contrapositive_check(
    spec: &PotentialSpec,
    n: i64,
    tol: f64,
    options: &IntegratorOptions,
) -> Result<(ScalarIdentityVerdict, GapReport)> {
    let report = gap_vanishing_report(spec, n, tol, options)?;
    let verdict = match report.verdict {
        GapVerdict::GapFound { j, width } => {
            if spec.is_scalar_identity(SCALAR_IDENTITY_TOL) {
                // a scalar potential has no gaps; this is numerical breakdown
                return Err(SpectralError::AssertionFailure {
                    index: j,
                    detail: format!("gap of width {width:e} found for a scalar potential"),
                });
            }
            ScalarIdentityVerdict::CertifiedNotScalarIdentity { j, width }
        }
        GapVerdict::AllVanish { .. } => {
            ScalarIdentityVerdict::ConsistentWithScalarIdentityUpToN { n }
        }
    };
    Ok((verdict, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResidual {
    pub lambda: f64,
    pub numeric: f64,
    pub oracle: f64,
    pub residual: f64,
}

/// Discriminant against a closed form, when one applies (scalar or constant potentials).
pub fn oracle_residuals(
    spec: &PotentialSpec,
    lambdas: &[f64],
    options: &IntegratorOptions,
) -> Result<Vec<OracleResidual>> {
    let oracle: Box<dyn Fn(f64) -> f64> =
        if spec.is_scalar_identity(0.0) && spec.is_absolutely_continuous() {
            let p = spec.half_trace();
            Box::new(move |l| closed_form_discriminant_scalar(&p, l))
        } else if spec.tags().is_constant {
            let m = spec.evaluate(0.0).m;
            Box::new(move |l| constant_potential_discriminant(m[0][0], m[1][1], m[0][1], l))
        } else {
            return Ok(Vec::new());
        };
    lambdas
        .iter()
        .map(|&l| {
            let numeric = discriminant(spec, l, options)?;
            let o = oracle(l);
            Ok(OracleResidual {
                lambda: l,
                numeric,
                oracle: o,
                residual: (numeric - o).abs(),
            })
        })
        .collect()
}

/// Entrywise distance between the integrated and closed-form `Y(pi)` for `Q = p I`.
pub fn scalar_fundamental_residual(
    p: &ScalarFunction,
    lambda: f64,
    options: &IntegratorOptions,
) -> Result<f64> {
    let spec = PotentialSpec::scalar(p.clone());
    let numeric = monodromy(&spec, lambda, options)?.a;
    Ok((numeric - closed_form_fundamental_scalar(p, lambda, PI)).max_abs())
}

/// Parity of the edges in gap `j`.
pub fn gap_parity(j: i64) -> Parity {
    Parity::of_row(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> IntegratorOptions {
        IntegratorOptions::default()
    }

    #[test]
    fn closed_form_examples() {
        assert!(closed_form_discriminant_scalar(&0.0.into(), 0.5).abs() < 1e-15);
        assert!((closed_form_discriminant_scalar(&1.0.into(), 0.0) + 2.0).abs() < 1e-15);
        assert!((closed_form_discriminant_scalar(&2.0.into(), 2.0) - 2.0).abs() < 1e-15);
        assert!((free_dirac_discriminant(1.0, 0.0) - 2.0 * PI.cosh()).abs() < 1e-12);
        assert!(
            (constant_potential_discriminant(0.0, 0.0, 1.0, 0.0) - 2.0 * PI.cosh()).abs() < 1e-12
        );
    }

    #[test]
    fn gap_report_examples() {
        let o = opts();
        let p = PotentialSpec::scalar(ScalarFunction::trig1(1.0, 1.0, 0.0));
        let r = gap_vanishing_report(&p, 4, 1e-6, &o).unwrap();
        assert!(matches!(r.verdict, GapVerdict::AllVanish { .. }));
        assert_eq!(r.potential_class, PotentialClass::ScalarIdentity);

        let sigma1 = PotentialSpec::constant(0.0, 0.0, 1.0);
        let r = gap_vanishing_report(&sigma1, 4, 1e-6, &o).unwrap();
        match r.verdict {
            GapVerdict::GapFound { j, width } => {
                assert_eq!(j, 0);
                assert!((width - 2.0).abs() < 1e-6);
            }
            v => panic!("unexpected {v:?}"),
        }
        assert_eq!(r.potential_class, PotentialClass::CanonicalForm);

        let r = gap_vanishing_report(&PotentialSpec::zero(), 2, 1e-6, &o).unwrap();
        assert!(r.max_width <= 1e-10);
    }

    #[test]
    fn forward_check_examples() {
        let o = opts();
        let r = forward_check(&PotentialSpec::scalar(2.0.into()), 3, 1e-6, &o).unwrap();
        assert_eq!(r.shift_constant, 2.0);
        assert!(r.max_edge_error <= 1e-6);
        forward_check(
            &PotentialSpec::scalar(ScalarFunction::trig1(0.0, 1.0, 0.0)),
            3,
            1e-6,
            &o,
        )
        .unwrap();
        forward_check(&PotentialSpec::zero(), 3, 1e-6, &o).unwrap();
        assert!(forward_check(&PotentialSpec::constant(0.0, 0.0, 1.0), 1, 1e-6, &o).is_err());
    }

    #[test]
    fn contrapositive_examples() {
        let o = opts();
        let (v, _) =
            contrapositive_check(&PotentialSpec::constant(0.0, 0.0, 1.0), 2, 1e-6, &o).unwrap();
        assert!(matches!(
            v,
            ScalarIdentityVerdict::CertifiedNotScalarIdentity { j: 0, .. }
        ));
        let (v, _) = contrapositive_check(&PotentialSpec::scalar(0.4.into()), 2, 1e-6, &o).unwrap();
        assert_eq!(
            v,
            ScalarIdentityVerdict::ConsistentWithScalarIdentityUpToN { n: 2 }
        );
    }

    #[test]
    fn oracle_residuals_for_scalar_and_constant() {
        let o = opts();
        let ls = [-1.3, 0.2, 2.7];
        let p = PotentialSpec::scalar(ScalarFunction::trig1(0.3, 0.5, 0.1));
        let r = oracle_residuals(&p, &ls, &o).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|x| x.residual <= 1e-8));
        let k = PotentialSpec::constant(0.5, -0.2, 0.7);
        assert!(oracle_residuals(&k, &ls, &o)
            .unwrap()
            .iter()
            .all(|x| x.residual <= 1e-8));
        let general = PotentialSpec::canonical(ScalarFunction::trig1(0.0, 0.5, 0.0), 0.0.into());
        assert!(oracle_residuals(&general, &ls, &o).unwrap().is_empty());
        assert!(
            scalar_fundamental_residual(&ScalarFunction::trig1(0.3, 0.5, 0.1), 1.7, &o).unwrap()
                <= 1e-8
        );
    }
}
