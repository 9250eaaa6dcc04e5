//! Periodic and anti-periodic eigenvalues, instability intervals, double
//! eigenvalues, and extremal properties of the shifted Dirichlet curves.
//!
//! Row `n` of a table is the component of `{(-1)^n Delta >= 2}` containing
//! `mu_n` and `nu_n`. Even rows `n = 2k` hold the periodic pair
//! `(lambda_{2k-1}, lambda_{2k})`; odd rows `n = 2k - 1` hold the
//! anti-periodic pair `(lambda'_{2k-1}, lambda'_{2k})`.

use crate::error::{Result, SpectralError};
use crate::linalg::Mat2;
use crate::monodromy::{discriminant, monodromy, IntegratorOptions};
use crate::potential::PotentialSpec;
use crate::prufer::{
    find_dirichlet, find_mu, uniform_tau_grid, DirichletEigenvalue, DirichletKind,
};
use crate::roots::{bisect_secant, golden_minimize, RootOptions};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Inequality slack for the ordering of eigenvalues.
pub const CHAIN_SLACK: f64 = 1e-8;
/// Widths at or below this are double eigenvalues.
pub const COLLAPSE_WIDTH: f64 = 1e-8;
/// `|Y(pi) -+ I|` bound used to recognise a collapsed gap at the Dirichlet anchors.
pub const COLLAPSE_MATRIX_TOL: f64 = 1e-8;
/// Largest accepted `|Delta(edge) -+ 2|`.
pub const EDGE_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    /// `Delta = 2` at the edges.
    PeriodicEdge,
    /// `Delta = -2` at the edges.
    AntiperiodicEdge,
}

impl Parity {
    pub fn of_row(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Parity::PeriodicEdge
        } else {
            Parity::AntiperiodicEdge
        }
    }

    /// `+1` or `-1`: the value of `Delta / 2` at the edges.
    pub fn sign(self) -> f64 {
        match self {
            Parity::PeriodicEdge => 1.0,
            Parity::AntiperiodicEdge => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Self {
        if sign >= 0 {
            Parity::PeriodicEdge
        } else {
            Parity::AntiperiodicEdge
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeRow {
    pub n: i64,
    pub parity: Parity,
    pub lo: f64,
    pub hi: f64,
    /// `|Delta(lo) -+ 2|` and `|Delta(hi) -+ 2|`.
    pub lo_residual: f64,
    pub hi_residual: f64,
    pub mu: f64,
    pub nu: f64,
    /// Recognised as a double eigenvalue at the Dirichlet anchors.
    pub collapsed: bool,
}

impl EdgeRow {
    pub fn width(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }
}

/// Edges of one `k`, in the usual indexing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandRow {
    pub k: i64,
    pub lambda_2k_minus_1: f64,
    pub lambda_2k: f64,
    pub lambda_p_2k_minus_1: f64,
    pub lambda_p_2k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub k_min: i64,
    pub k_max: i64,
    /// Rows `n = 2 k_min - 1 ..= 2 k_max`, ascending.
    pub rows: Vec<EdgeRow>,
    /// Dirichlet-type eigenvalues over `n = 2 k_min - 2 ..= 2 k_max + 1`.
    pub mu: Vec<DirichletEigenvalue>,
    pub nu: Vec<DirichletEigenvalue>,
}

impl SpectrumTable {
    pub fn row(&self, n: i64) -> Option<&EdgeRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn band_rows(&self) -> Vec<BandRow> {
        (self.k_min..=self.k_max)
            .filter_map(|k| {
                let anti = self.row(2 * k - 1)?;
                let per = self.row(2 * k)?;
                Some(BandRow {
                    k,
                    lambda_2k_minus_1: per.lo,
                    lambda_2k: per.hi,
                    lambda_p_2k_minus_1: anti.lo,
                    lambda_p_2k: anti.hi,
                })
            })
            .collect()
    }

    fn dirichlet(&self, n: i64) -> Option<(f64, f64)> {
        let mu = self.mu.iter().find(|e| e.index == n)?.value;
        let nu = self.nu.iter().find(|e| e.index == n)?.value;
        Some((mu, nu))
    }

    /// Strict `max{mu_n, nu_n} < min{mu_n+1, nu_n+1}` for every stored pair.
    pub fn interlacing_ok(&self) -> bool {
        self.interlacing_violation().is_none()
    }

    fn interlacing_violation(&self) -> Option<(i64, String)> {
        let first = self.mu.first()?.index;
        let last = self.mu.last()?.index;
        for n in first..last {
            let (m0, v0) = self.dirichlet(n)?;
            let (m1, v1) = self.dirichlet(n + 1)?;
            if m0.max(v0) >= m1.min(v1) {
                return Some((
                    n,
                    format!(
                        "max(mu, nu) = {} not below next min {}",
                        m0.max(v0),
                        m1.min(v1)
                    ),
                ));
            }
        }
        None
    }

    /// The full ordering `lambda'_{2k-1} <= {mu, nu}_{2k-1} <= lambda'_{2k} < lambda_{2k-1}
    /// <= {mu, nu}_{2k} <= lambda_{2k} < lambda'_{2k+1}` with slack, and edge residuals.
    pub fn validate(&self) -> Result<()> {
        let violation = |n: i64, detail: String| SpectralError::IndexingViolation {
            k: n.div_euclid(2) + n.rem_euclid(2),
            detail,
        };
        if let Some((n, detail)) = self.interlacing_violation() {
            return Err(violation(n, format!("interlacing at n = {n}: {detail}")));
        }
        for (i, r) in self.rows.iter().enumerate() {
            let a = r.mu.min(r.nu);
            let b = r.mu.max(r.nu);
            if r.lo > a + CHAIN_SLACK || b > r.hi + CHAIN_SLACK || r.lo > r.hi + CHAIN_SLACK {
                return Err(violation(
                    r.n,
                    format!(
                        "row {}: edges ({}, {}) do not enclose ({a}, {b})",
                        r.n, r.lo, r.hi
                    ),
                ));
            }
            if r.lo_residual > EDGE_RESIDUAL_TOL || r.hi_residual > EDGE_RESIDUAL_TOL {
                return Err(violation(
                    r.n,
                    format!(
                        "row {}: edge residuals {:e}, {:e}",
                        r.n, r.lo_residual, r.hi_residual
                    ),
                ));
            }
            if let Some(next) = self.rows.get(i + 1) {
                if r.hi >= next.lo + CHAIN_SLACK {
                    return Err(violation(
                        r.n,
                        format!(
                            "row {} upper edge {} not below row {} lower edge {}",
                            r.n, r.hi, next.n, next.lo
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn edge_root(
    spec: &PotentialSpec,
    sign: f64,
    inner: f64,
    outer: f64,
    options: &IntegratorOptions,
) -> Result<(f64, f64)> {
    let f = |l: f64| Ok(sign * discriminant(spec, l, options)? - 2.0);
    let f_inner = f(inner)?;
    if f_inner <= 0.0 {
        // the anchor itself sits on the edge up to round-off
        return Ok((inner, f_inner.abs()));
    }
    let f_outer = f(outer)?;
    if f_outer >= 0.0 {
        return Err(SpectralError::IndexingViolation {
            k: 0,
            detail: format!("no sign change for the edge between {inner} and {outer}"),
        });
    }
    let (lo, hi, flo, fhi) = if inner < outer {
        (inner, outer, f_inner, f_outer)
    } else {
        (outer, inner, f_outer, f_inner)
    };
    let root = bisect_secant(f, lo, hi, flo, fhi, &RootOptions::default())?;
    Ok((root.x, root.fx.abs()))
}

fn is_near_scalar(a: &Mat2, sign: f64, tol: f64) -> bool {
    (*a - Mat2::scalar(sign)).max_abs() <= tol
}

/// Band edges for `k` in `k_min..=k_max`.
pub fn band_edges(
    spec: &PotentialSpec,
    k_min: i64,
    k_max: i64,
    options: &IntegratorOptions,
) -> Result<SpectrumTable> {
    if k_min > k_max {
        return Err(SpectralError::InvalidInput(format!(
            "empty k range {k_min}..={k_max}"
        )));
    }
    let n_lo = 2 * k_min - 1;
    let n_hi = 2 * k_max;
    let jobs: Vec<(i64, DirichletKind)> = (n_lo - 1..=n_hi + 1)
        .flat_map(|n| [(n, DirichletKind::Mu), (n, DirichletKind::Nu)])
        .collect();
    let found: Vec<DirichletEigenvalue> = jobs
        .par_iter()
        .map(|&(n, kind)| find_dirichlet(spec, n, kind, options))
        .collect::<Result<_>>()?;
    let mut mu = Vec::new();
    let mut nu = Vec::new();
    for e in found {
        match e.kind {
            DirichletKind::Mu => mu.push(e),
            DirichletKind::Nu => nu.push(e),
        }
    }
    let by_index = |v: &[DirichletEigenvalue]| -> BTreeMap<i64, f64> {
        v.iter().map(|e| (e.index, e.value)).collect()
    };
    let (mu_at, nu_at) = (by_index(&mu), by_index(&nu));

    let rows: Vec<EdgeRow> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            let parity = Parity::of_row(n);
            let sign = parity.sign();
            let (m, v) = (mu_at[&n], nu_at[&n]);
            let (a, b) = (m.min(v), m.max(v));
            let left = mu_at[&(n - 1)].max(nu_at[&(n - 1)]);
            let right = mu_at[&(n + 1)].min(nu_at[&(n + 1)]);
            if b - a <= COLLAPSE_WIDTH {
                let ya = monodromy(spec, a, options)?;
                let yb = if b == a {
                    ya.clone()
                } else {
                    monodromy(spec, b, options)?
                };
                if is_near_scalar(&ya.a, sign, COLLAPSE_MATRIX_TOL)
                    && is_near_scalar(&yb.a, sign, COLLAPSE_MATRIX_TOL)
                {
                    let mid = 0.5 * (a + b);
                    let residual = (discriminant(spec, mid, options)? - 2.0 * sign).abs();
                    return Ok(EdgeRow {
                        n,
                        parity,
                        lo: mid,
                        hi: mid,
                        lo_residual: residual,
                        hi_residual: residual,
                        mu: m,
                        nu: v,
                        collapsed: true,
                    });
                }
            }
            let (lo, lo_residual) = edge_root(spec, sign, a, left, options)?;
            let (hi, hi_residual) = edge_root(spec, sign, b, right, options)?;
            Ok(EdgeRow {
                n,
                parity,
                lo,
                hi,
                lo_residual,
                hi_residual,
                mu: m,
                nu: v,
                collapsed: false,
            })
        })
        .collect::<Result<_>>()?;

    let table = SpectrumTable {
        k_min,
        k_max,
        rows,
        mu,
        nu,
    };
    table.validate()?;
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstabilityInterval {
    /// Row index `n`: `(lambda_{n-1}, lambda_n)` for even `n`,
    /// `(lambda'_n, lambda'_{n+1})` for odd `n`.
    pub index: i64,
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
    pub parity: Parity,
}

pub fn instability_intervals(table: &SpectrumTable) -> Vec<InstabilityInterval> {
    table
        .rows
        .iter()
        .map(|r| InstabilityInterval {
            index: r.n,
            lo: r.lo,
            hi: r.hi,
            width: r.width(),
            parity: r.parity,
        })
        .collect()
}

/// Probe results for one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalProbe {
    /// Smallest `|Delta|` over 16 points spanning `[lo, hi]`.
    pub min_inside: f64,
    /// Largest `|Delta|` at `lo - eps` and `hi + eps`.
    pub max_outside: f64,
}

pub fn probe_interval(
    spec: &PotentialSpec,
    interval: &InstabilityInterval,
    options: &IntegratorOptions,
) -> Result<IntervalProbe> {
    let mut min_inside = f64::INFINITY;
    for i in 0..16 {
        let l = interval.lo + (interval.hi - interval.lo) * i as f64 / 15.0;
        min_inside = min_inside.min(discriminant(spec, l, options)?.abs());
    }
    let eps = 1e-4 * interval.lo.abs().max(1.0);
    let max_outside = discriminant(spec, interval.lo - eps, options)?
        .abs()
        .max(discriminant(spec, interval.hi + eps, options)?.abs());
    Ok(IntervalProbe {
        min_inside,
        max_outside,
    })
}

/// True iff `Y(pi, lambda)` equals `+I` (periodic) or `-I` (anti-periodic)
/// within `tol`. Returns false when `Delta` is not at the matching edge value.
pub fn detect_double(
    spec: &PotentialSpec,
    lambda_candidate: f64,
    parity: Parity,
    tol: f64,
    options: &IntegratorOptions,
) -> Result<bool> {
    let m = monodromy(spec, lambda_candidate, options)?;
    let sign = parity.sign();
    if (m.delta - 2.0 * sign).abs() > tol {
        return Ok(false);
    }
    Ok(is_near_scalar(&m.a, sign, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremaRow {
    pub k: i64,
    /// Dirichlet index of the shifted curve `mu_n(tau)`.
    pub n: i64,
    pub parity: Parity,
    pub edge_lo: f64,
    pub edge_hi: f64,
    pub curve_min: f64,
    pub curve_max: f64,
    pub tau_at_min: f64,
    pub tau_at_max: f64,
    /// Observed Lipschitz bound of the sampled curve.
    pub slope_bound: f64,
    pub tolerance: f64,
    pub continuous: bool,
    /// The `k = 0` periodic row is reported but not asserted.
    pub skipped: bool,
    pub ok: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftExtremaReport {
    pub tau_samples: usize,
    pub rows: Vec<ExtremaRow>,
    pub violations: Vec<String>,
}

impl ShiftExtremaReport {
    pub fn all_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Golden-section refinement of an extremum of `mu_n(tau)` around a grid point.
fn refine_extremum(
    spec: &PotentialSpec,
    n: i64,
    center: f64,
    step: f64,
    maximize: bool,
    options: &IntegratorOptions,
) -> Result<(f64, f64)> {
    let s = if maximize { -1.0 } else { 1.0 };
    let f = |t: f64| Ok(s * find_mu(&spec.shift(t.rem_euclid(PI)), n, options)?.value);
    let (t, v) = golden_minimize(f, center - step, center + step, 1e-5 * step.max(1e-3))?;
    Ok((t.rem_euclid(PI), s * v))
}

/// Compare the extrema over `tau` of `mu_n(tau)` with the band edges of row `n`.
pub fn verify_shift_extrema(
    spec: &PotentialSpec,
    k_min: i64,
    k_max: i64,
    tau_samples: usize,
    options: &IntegratorOptions,
) -> Result<ShiftExtremaReport> {
    if tau_samples < 3 {
        return Err(SpectralError::InvalidInput(
            "tau_samples must be at least 3".into(),
        ));
    }
    let table = band_edges(spec, k_min, k_max, options)?;
    let grid = uniform_tau_grid(tau_samples);
    let step = PI / tau_samples as f64;
    let rows: Vec<ExtremaRow> = table
        .rows
        .par_iter()
        .map(|r| -> Result<ExtremaRow> {
            let n = r.n;
            let k = (n + 1).div_euclid(2);
            let values: Vec<f64> = grid
                .par_iter()
                .map(|&t| Ok(find_mu(&spec.shift(t), n, options)?.value))
                .collect::<Result<_>>()?;
            let mut closed = values.clone();
            closed.push(values[0]);
            let slope_bound = closed.windows(2).map(|w| (w[1] - w[0]).abs() / step).fold(0.0, f64::max);
            let median = {
                let mut s: Vec<f64> = closed.windows(2).map(|w| (w[1] - w[0]).abs() / step).collect();
                s.sort_by(f64::total_cmp);
                s[s.len() / 2]
            };
            let continuous = closed
                .windows(2)
                .all(|w| (w[1] - w[0]).abs() <= 10.0 * step * median.max(1e-6) + 1e-9);
            let (i_min, _) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("grid");
            let (i_max, _) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("grid");
            let flat = values[i_max] - values[i_min] <= 1e-12;
            let (tau_at_min, curve_min) = if flat {
                (grid[i_min], values[i_min])
            } else {
                refine_extremum(spec, n, grid[i_min], step, false, options)?
            };
            let (tau_at_max, curve_max) = if flat {
                (grid[i_max], values[i_max])
            } else {
                refine_extremum(spec, n, grid[i_max], step, true, options)?
            };
            // refinement never makes the extremum worse than the grid value
            let curve_min = curve_min.min(values[i_min]);
            let curve_max = curve_max.max(values[i_max]);
            let tolerance = slope_bound * step + 1e-6;
            let skipped = n == 0;
            let ok = (curve_min - r.lo).abs() <= tolerance && (curve_max - r.hi).abs() <= tolerance;
            let note = skipped.then(|| {
                format!(
                    "k = 0 periodic row not asserted; mu_0(tau) spans [{curve_min}, {curve_max}], strictly inside ({}, {}): {}",
                    r.lo,
                    r.hi,
                    r.lo < curve_min && curve_max < r.hi
                )
            });
            Ok(ExtremaRow {
                k,
                n,
                parity: r.parity,
                edge_lo: r.lo,
                edge_hi: r.hi,
                curve_min,
                curve_max,
                tau_at_min,
                tau_at_max,
                slope_bound,
                tolerance,
                continuous,
                skipped,
                ok,
                note,
            })
        })
        .collect::<Result<_>>()?;
    let violations = rows
        .iter()
        .filter(|r| !r.skipped && !r.ok)
        .map(|r| {
            format!(
                "row {}: extrema ({}, {}) vs edges ({}, {}), tolerance {:e}",
                r.n, r.curve_min, r.curve_max, r.edge_lo, r.edge_hi, r.tolerance
            )
        })
        .collect();
    Ok(ShiftExtremaReport {
        tau_samples,
        rows,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::ScalarFunction;

    fn opts() -> IntegratorOptions {
        IntegratorOptions::default()
    }

    #[test]
    fn free_edges_at_integers() {
        let t = band_edges(&PotentialSpec::zero(), -2, 2, &opts()).unwrap();
        for b in t.band_rows() {
            let k = b.k as f64;
            assert!((b.lambda_2k_minus_1 - 2.0 * k).abs() < 1e-9);
            assert!((b.lambda_2k - 2.0 * k).abs() < 1e-9);
            assert!((b.lambda_p_2k_minus_1 - (2.0 * k - 1.0)).abs() < 1e-9);
            assert!((b.lambda_p_2k - (2.0 * k - 1.0)).abs() < 1e-9);
        }
        assert!(instability_intervals(&t).iter().all(|i| i.width == 0.0));
        assert!(t.rows.iter().all(|r| r.collapsed));
    }

    #[test]
    fn scalar_potential_edges_shift_by_mean() {
        let c = 0.35;
        let spec = PotentialSpec::scalar(ScalarFunction::trig1(c, 0.5, -0.2));
        let t = band_edges(&spec, -1, 1, &opts()).unwrap();
        for b in t.band_rows() {
            let k = b.k as f64;
            assert!((b.lambda_2k - (2.0 * k + c)).abs() < 1e-8);
            assert!((b.lambda_p_2k_minus_1 - (2.0 * k - 1.0 + c)).abs() < 1e-8);
        }
        assert!(instability_intervals(&t).iter().all(|i| i.width <= 1e-8));
    }

    #[test]
    fn off_diagonal_example_has_single_gap() {
        let spec = PotentialSpec::constant(0.0, 0.0, 1.0);
        let t = band_edges(&spec, -1, 1, &opts()).unwrap();
        let gaps = instability_intervals(&t);
        let g0 = gaps.iter().find(|g| g.index == 0).unwrap();
        assert!((g0.lo + 1.0).abs() < 1e-6 && (g0.hi - 1.0).abs() < 1e-6);
        assert!((g0.width - 2.0).abs() < 1e-6);
        assert!(gaps
            .iter()
            .filter(|g| g.index != 0)
            .all(|g| g.width <= 1e-8));
        let probe = probe_interval(&spec, g0, &opts()).unwrap();
        assert!(probe.min_inside >= 2.0 - 1e-8 && probe.max_outside < 2.0);
    }

    #[test]
    fn double_eigenvalue_examples() {
        let o = opts();
        assert!(
            detect_double(&PotentialSpec::zero(), 2.0, Parity::PeriodicEdge, 1e-8, &o).unwrap()
        );
        let sigma1 = PotentialSpec::constant(0.0, 0.0, 1.0);
        assert!(!detect_double(&sigma1, 1.0, Parity::PeriodicEdge, 1e-8, &o).unwrap());
        let c = 0.6;
        let scalar = PotentialSpec::scalar(c.into());
        assert!(detect_double(&scalar, 2.0 + c, Parity::PeriodicEdge, 1e-8, &o).unwrap());
        assert!(detect_double(&scalar, 1.0 + c, Parity::AntiperiodicEdge, 1e-8, &o).unwrap());
    }

    #[test]
    fn shift_extrema_on_scalar_potential_trivially_hold() {
        let spec = PotentialSpec::scalar(ScalarFunction::trig1(0.2, 0.4, 0.0));
        let r = verify_shift_extrema(&spec, 1, 1, 8, &opts()).unwrap();
        assert!(r.all_ok(), "{:?}", r.violations);
    }

    #[test]
    fn shift_extrema_example_skips_k_zero() {
        let spec = PotentialSpec::constant(0.0, 0.0, 1.0);
        let r = verify_shift_extrema(&spec, 0, 0, 8, &opts()).unwrap();
        let row = r.rows.iter().find(|r| r.n == 0).unwrap();
        assert!(row.skipped);
        assert!(row.note.as_deref().unwrap().ends_with("true"));
        assert!(row.curve_min.abs() < 1e-9 && row.curve_max.abs() < 1e-9);
    }
}
