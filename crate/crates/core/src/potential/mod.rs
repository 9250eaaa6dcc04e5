//! Real symmetric pi-periodic 2x2 potentials `Q = [[q1, q], [q, q2]]`.

mod config;
mod random;
mod scalar;

pub use config::{PotentialConfig, ScalarConfig};
pub use random::{random_canonical_potential, random_potential, random_trig_poly};
pub use scalar::{ModTerm, SampledGrid, ScalarFunction, TrigPoly};

use crate::error::{Result, SpectralError};
use crate::linalg::SymmetricMatrix2;
use std::f64::consts::PI;

/// Points in `[0, pi)` used by pointwise predicates.
pub const CHECK_GRID_POINTS: usize = 64;
/// Tolerance behind the cached scalar-identity tag.
pub const SCALAR_IDENTITY_TOL: f64 = 1e-9;
/// Tolerance behind the cached canonical-form tag.
pub const CANONICAL_FORM_TOL: f64 = 1e-10;

pub fn check_grid() -> impl Iterator<Item = f64> {
    (0..CHECK_GRID_POINTS).map(|i| i as f64 * PI / CHECK_GRID_POINTS as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PotentialTags {
    pub is_constant: bool,
    pub is_scalar_identity: bool,
    pub is_canonical_form: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    q1: ScalarFunction,
    q2: ScalarFunction,
    q: ScalarFunction,
    tags: PotentialTags,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::zero()
    }
}

impl PotentialSpec {
    pub fn new(q1: ScalarFunction, q2: ScalarFunction, q: ScalarFunction) -> Self {
        let mut spec = PotentialSpec {
            q1,
            q2,
            q,
            tags: PotentialTags::default(),
        };
        let is_constant = [&spec.q1, &spec.q2, &spec.q].iter().all(|f| match f {
            ScalarFunction::Constant(_) => true,
            ScalarFunction::TrigPoly(t) => !t.has_harmonics(),
            _ => false,
        });
        spec.tags = PotentialTags {
            is_constant,
            is_scalar_identity: spec.is_scalar_identity(SCALAR_IDENTITY_TOL),
            is_canonical_form: spec.canonical_deviation() <= CANONICAL_FORM_TOL,
        };
        spec
    }

    pub fn zero() -> Self {
        Self::constant(0.0, 0.0, 0.0)
    }

    pub fn constant(q1: f64, q2: f64, q: f64) -> Self {
        Self::new(q1.into(), q2.into(), q.into())
    }

    /// `p(z) I`.
    pub fn scalar(p: ScalarFunction) -> Self {
        Self::new(p.clone(), p, ScalarFunction::zero())
    }

    /// Traceless `[[d, q], [q, -d]]`.
    pub fn canonical(d: ScalarFunction, q: ScalarFunction) -> Self {
        let neg = d.neg();
        Self::new(d, neg, q)
    }

    pub fn q1(&self) -> &ScalarFunction {
        &self.q1
    }

    pub fn q2(&self) -> &ScalarFunction {
        &self.q2
    }

    pub fn off_diagonal(&self) -> &ScalarFunction {
        &self.q
    }

    pub fn tags(&self) -> PotentialTags {
        self.tags
    }

    pub fn into_entries(self) -> (ScalarFunction, ScalarFunction, ScalarFunction) {
        (self.q1, self.q2, self.q)
    }

    fn entries(&self) -> [&ScalarFunction; 3] {
        [&self.q1, &self.q2, &self.q]
    }

    pub fn evaluate(&self, z: f64) -> SymmetricMatrix2 {
        SymmetricMatrix2::symmetric(self.q1.evaluate(z), self.q.evaluate(z), self.q2.evaluate(z))
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        self.entries().iter().all(|f| f.is_absolutely_continuous())
    }

    /// `Q(z + tau)`.
    pub fn shift(&self, tau: f64) -> PotentialSpec {
        PotentialSpec::new(self.q1.shift(tau), self.q2.shift(tau), self.q.shift(tau))
    }

    /// Entrywise `Q'`.
    pub fn derivative(&self) -> Result<PotentialSpec> {
        Ok(PotentialSpec::new(
            self.q1.derivative()?,
            self.q2.derivative()?,
            self.q.derivative()?,
        ))
    }

    /// `max |q1 + q2|` on the check grid.
    pub fn canonical_deviation(&self) -> f64 {
        check_grid()
            .map(|z| (self.q1.evaluate(z) + self.q2.evaluate(z)).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_canonical_form(&self, tol: f64) -> bool {
        self.canonical_deviation() <= tol
    }

    /// True iff `|q|` and `|q1 - q2|` stay below `tol` on the check grid.
    pub fn is_scalar_identity(&self, tol: f64) -> bool {
        check_grid().all(|z| {
            self.q.evaluate(z).abs() <= tol
                && (self.q1.evaluate(z) - self.q2.evaluate(z)).abs() <= tol
        })
    }

    /// `p = trace(Q)/2`.
    pub fn half_trace(&self) -> ScalarFunction {
        self.q1.add(&self.q2).scale(0.5)
    }

    /// `e^{2J omega} Q` for canonical `Q`.
    pub fn gauge_rotate(&self, omega: f64) -> Result<PotentialSpec> {
        let deviation = self.canonical_deviation();
        if deviation > CANONICAL_FORM_TOL {
            return Err(SpectralError::NotCanonicalForm { deviation });
        }
        if omega == 0.0 {
            return Ok(self.clone());
        }
        let (s, c) = (2.0 * omega).sin_cos();
        let d = self.q1.scale(c).add(&self.q.scale(s));
        let q = self.q.scale(c).sub(&self.q1.scale(s));
        Ok(PotentialSpec::canonical(d, q))
    }

    /// Writes `Q = p I + e^{Jh} Q~ e^{-Jh}` with `Q~` traceless and `h(0) = h(pi) = 0`.
    pub fn trace_split(&self) -> Result<TraceSplit> {
        if !self.is_absolutely_continuous() {
            return Err(SpectralError::AcRequired {
                what: "trace splitting",
            });
        }
        let p = self.half_trace();
        let p_poly = p.as_trig_poly().ok_or_else(|| {
            SpectralError::UnsupportedRepresentation(
                "trace splitting needs a constant or trigonometric-polynomial trace".into(),
            )
        })?;
        let shift_constant = p_poly.a0;
        let h = p_poly.periodic_antiderivative();
        let d = self.q1.sub(&self.q2).scale(0.5);
        let tilde = if !h.has_harmonics() && h.a0 == 0.0 {
            PotentialSpec::canonical(d, self.q.clone())
        } else {
            let (d_poly, q_poly) = match (d.as_trig_poly(), self.q.as_trig_poly()) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(SpectralError::UnsupportedRepresentation(
                        "trace splitting with a z-dependent gauge needs trigonometric entries"
                            .into(),
                    ))
                }
            };
            let phase = h.scale(2.0);
            let diag = ScalarFunction::Modulated(vec![ModTerm {
                cos_amp: d_poly.clone(),
                sin_amp: q_poly.scale(-1.0),
                phase: phase.clone(),
            }])
            .simplified();
            let off = ScalarFunction::Modulated(vec![ModTerm {
                cos_amp: q_poly,
                sin_amp: d_poly,
                phase,
            }])
            .simplified();
            PotentialSpec::canonical(diag, off)
        };
        Ok(TraceSplit {
            p,
            gauge: GaugeAngle::Profile(ScalarFunction::TrigPoly(h).simplified()),
            tilde,
            shift_constant,
        })
    }
}

/// A rotation angle: constant, or a z-dependent profile.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugeAngle {
    Constant(f64),
    Profile(ScalarFunction),
}

impl GaugeAngle {
    pub fn value(&self, z: f64) -> f64 {
        match self {
            GaugeAngle::Constant(w) => *w,
            GaugeAngle::Profile(h) => h.evaluate(z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSplit {
    /// Half trace of the input.
    pub p: ScalarFunction,
    /// `h(z) = int_0^z p - z * mean(p)`.
    pub gauge: GaugeAngle,
    /// Traceless potential isospectral to the input after `lambda -> lambda - shift_constant`.
    pub tilde: PotentialSpec,
    /// Mean of `p` over a period.
    pub shift_constant: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat2;

    fn close(a: Mat2, b: Mat2, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(PotentialSpec::zero().evaluate(0.3), Mat2::ZERO);
        let sigma1 = PotentialSpec::constant(0.0, 0.0, 1.0);
        assert_eq!(sigma1.evaluate(1.7), Mat2::SIGMA1);
        let c = ScalarFunction::trig1(0.0, 1.0, 0.0);
        let spec = PotentialSpec::canonical(c, ScalarFunction::zero());
        assert_eq!(spec.evaluate(0.0), Mat2::SIGMA3);
    }

    #[test]
    fn shift_examples() {
        let k = PotentialSpec::constant(1.0, 2.0, 3.0);
        assert_eq!(k.shift(0.77), k);
        let spec = PotentialSpec::new(
            ScalarFunction::trig1(0.0, 1.0, 0.0),
            ScalarFunction::zero(),
            ScalarFunction::zero(),
        );
        let s = spec.shift(PI / 2.0);
        for z in check_grid() {
            assert!((s.q1().evaluate(z) + (2.0 * z).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn gauge_rotate_examples() {
        let diag = PotentialSpec::constant(1.0, -1.0, 0.0);
        let r = diag.gauge_rotate(PI / 4.0).unwrap();
        assert!(close(
            r.evaluate(0.0),
            Mat2::symmetric(0.0, -1.0, 0.0),
            1e-15
        ));
        assert_eq!(diag.gauge_rotate(0.0).unwrap(), diag);

        let (a, b) = (0.6, 0.8);
        let spec = PotentialSpec::constant(a, -a, b);
        let r = spec.gauge_rotate(0.5 * (b / a).atan()).unwrap();
        assert!(close(r.evaluate(1.0), Mat2::SIGMA3 * 1.0, 1e-15));
    }

    #[test]
    fn gauge_rotate_requires_canonical_form() {
        let spec = PotentialSpec::constant(1.0, 1.0, 0.0);
        assert!(matches!(
            spec.gauge_rotate(0.3),
            Err(SpectralError::NotCanonicalForm { .. })
        ));
    }

    #[test]
    fn trace_split_constant_cases() {
        let split = PotentialSpec::scalar(2.5.into()).trace_split().unwrap();
        assert_eq!(split.shift_constant, 2.5);
        assert!(split.tilde.is_scalar_identity(0.0) && split.tilde.q1().is_identically_zero());

        let split = PotentialSpec::constant(2.0, 0.0, 0.0)
            .trace_split()
            .unwrap();
        assert_eq!(split.shift_constant, 1.0);
        assert!(close(split.tilde.evaluate(0.4), Mat2::SIGMA3, 1e-15));

        let sigma1 = PotentialSpec::constant(0.0, 0.0, 1.0);
        let split = sigma1.trace_split().unwrap();
        assert_eq!(split.p, ScalarFunction::Constant(0.0));
        assert_eq!(split.gauge.value(1.0), 0.0);
        assert_eq!(split.tilde, sigma1);
    }

    #[test]
    fn trace_split_gauge_vanishes_at_ends() {
        let spec = PotentialSpec::new(
            ScalarFunction::TrigPoly(TrigPoly::new(0.4, vec![0.3, 0.1], vec![-0.2])),
            ScalarFunction::trig1(0.1, 0.0, 0.5),
            ScalarFunction::trig1(0.2, 0.7, 0.0),
        );
        let split = spec.trace_split().unwrap();
        assert!(split.gauge.value(0.0).abs() < 1e-12);
        assert!(split.gauge.value(PI).abs() < 1e-12);
        assert!(split.tilde.is_canonical_form(1e-10));
        assert!((split.shift_constant - 0.25).abs() < 1e-15);
        // Q - pI = e^{Jh} Q~ e^{-Jh}
        for z in check_grid() {
            let h = split.gauge.value(z);
            let back = Mat2::rotation(h) * split.tilde.evaluate(z) * Mat2::rotation(-h);
            let direct = spec.evaluate(z) - Mat2::IDENTITY * split.p.evaluate(z);
            assert!(close(back, direct, 1e-13), "z = {z}");
        }
    }

    #[test]
    fn trace_split_rejects_samples() {
        let spec = PotentialSpec::scalar(ScalarFunction::samples(vec![0.0, 1.0, 0.5]).unwrap());
        assert!(matches!(
            spec.trace_split(),
            Err(SpectralError::AcRequired { .. })
        ));
    }

    #[test]
    fn scalar_identity_examples() {
        assert!(PotentialSpec::scalar(3.0.into()).is_scalar_identity(0.0));
        assert!(!PotentialSpec::constant(0.0, 0.0, 1.0).is_scalar_identity(1e-8));
        let p = ScalarFunction::trig1(2.0, 1.0, 0.0);
        let spec = PotentialSpec::scalar(p);
        assert!(spec.is_scalar_identity(0.0));
        assert!(spec.tags().is_scalar_identity && !spec.tags().is_constant);
    }

    #[test]
    fn canonical_form_anticommutes_with_j() {
        let spec = PotentialSpec::canonical(
            ScalarFunction::trig1(0.1, 0.3, -0.4),
            ScalarFunction::trig1(-0.2, 0.0, 0.9),
        );
        assert!(spec.tags().is_canonical_form);
        for z in check_grid() {
            let q = spec.evaluate(z);
            assert!(close(Mat2::J * q, -(q * Mat2::J), 1e-12));
        }
    }
}
