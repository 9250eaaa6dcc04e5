//! Scalar pi-periodic functions: constants, trigonometric polynomials in
//! `2z`, uniformly sampled grids, and phase-modulated trigonometric terms.

use crate::error::{Result, SpectralError};
use crate::quadrature::simpson_fn;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Grid size used when sampled functions are combined with other kinds.
const RESAMPLE_POINTS: usize = 1024;
/// Simpson intervals for integrals without a closed form.
const QUADRATURE_INTERVALS: usize = 4096;

/// `a0 + sum_k cos[k-1] cos(2kz) + sin[k-1] sin(2kz)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPoly {
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn new(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        TrigPoly { a0, cos, sin }
    }

    pub fn constant(a0: f64) -> Self {
        TrigPoly {
            a0,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    fn cos_k(&self, k: usize) -> f64 {
        self.cos.get(k - 1).copied().unwrap_or(0.0)
    }

    fn sin_k(&self, k: usize) -> f64 {
        self.sin.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn has_harmonics(&self) -> bool {
        self.cos.iter().chain(self.sin.iter()).any(|&c| c != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.a0 == 0.0 && !self.has_harmonics()
    }

    pub fn evaluate(&self, z: f64) -> f64 {
        let n = self.degree();
        if n == 0 {
            return self.a0;
        }
        let (s1, c1) = (2.0 * z).sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut acc = self.a0;
        for k in 1..=n {
            acc += self.cos_k(k) * c + self.sin_k(k) * s;
            if k < n {
                if k % 8 == 7 {
                    // refresh to keep the recurrence from drifting
                    (s, c) = (2.0 * (k + 1) as f64 * z).sin_cos();
                } else {
                    (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
                }
            }
        }
        acc
    }

    pub fn derivative(&self) -> TrigPoly {
        let n = self.degree();
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 1..=n {
            let w = 2.0 * k as f64;
            cos[k - 1] = w * self.sin_k(k);
            sin[k - 1] = -w * self.cos_k(k);
        }
        TrigPoly::new(0.0, cos, sin)
    }

    /// Coefficients of `z -> self(z + tau)`.
    pub fn shift(&self, tau: f64) -> TrigPoly {
        let n = self.degree();
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 1..=n {
            let (s, c) = (2.0 * k as f64 * tau).sin_cos();
            let (a, b) = (self.cos_k(k), self.sin_k(k));
            cos[k - 1] = a * c + b * s;
            sin[k - 1] = b * c - a * s;
        }
        TrigPoly::new(self.a0, cos, sin)
    }

    pub fn scale(&self, s: f64) -> TrigPoly {
        TrigPoly::new(
            self.a0 * s,
            self.cos.iter().map(|c| c * s).collect(),
            self.sin.iter().map(|c| c * s).collect(),
        )
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let n = self.degree().max(other.degree());
        TrigPoly::new(
            self.a0 + other.a0,
            (1..=n).map(|k| self.cos_k(k) + other.cos_k(k)).collect(),
            (1..=n).map(|k| self.sin_k(k) + other.sin_k(k)).collect(),
        )
    }

    /// Product, via convolution of the complex coefficients `c_k` of `e^{2ikz}`.
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let (na, nb) = (self.degree() as i64, other.degree() as i64);
        let coeff = |p: &TrigPoly, k: i64| -> (f64, f64) {
            if k == 0 {
                (p.a0, 0.0)
            } else {
                let m = k.unsigned_abs() as usize;
                let (a, b) = (p.cos_k(m), p.sin_k(m));
                if k > 0 {
                    (0.5 * a, -0.5 * b)
                } else {
                    (0.5 * a, 0.5 * b)
                }
            }
        };
        let n = na + nb;
        let mut out = TrigPoly::new(0.0, vec![0.0; n as usize], vec![0.0; n as usize]);
        for k in 0..=n {
            let (mut re, mut im) = (0.0, 0.0);
            for j in -na..=na {
                let l = k - j;
                if l < -nb || l > nb {
                    continue;
                }
                let (ar, ai) = coeff(self, j);
                let (br, bi) = coeff(other, l);
                re += ar * br - ai * bi;
                im += ar * bi + ai * br;
            }
            if k == 0 {
                out.a0 = re;
            } else {
                out.cos[k as usize - 1] = 2.0 * re;
                out.sin[k as usize - 1] = -2.0 * im;
            }
        }
        out
    }

    /// `int_0^z self(t) dt`.
    pub fn integral_to(&self, z: f64) -> f64 {
        let mut acc = self.a0 * z;
        for k in 1..=self.degree() {
            let w = 2.0 * k as f64;
            let (s, c) = (w * z).sin_cos();
            acc += self.cos_k(k) * s / w + self.sin_k(k) * (1.0 - c) / w;
        }
        acc
    }

    /// The periodic part of the antiderivative, `int_0^z self - a0 z`.
    pub fn periodic_antiderivative(&self) -> TrigPoly {
        let n = self.degree();
        let mut a0 = 0.0;
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 1..=n {
            let w = 2.0 * k as f64;
            a0 += self.sin_k(k) / w;
            cos[k - 1] = -self.sin_k(k) / w;
            sin[k - 1] = self.cos_k(k) / w;
        }
        TrigPoly::new(a0, cos, sin)
    }

    /// Equality as functions (missing coefficients count as zero).
    pub fn same_function(&self, other: &TrigPoly) -> bool {
        let n = self.degree().max(other.degree());
        self.a0 == other.a0
            && (1..=n).all(|k| self.cos_k(k) == other.cos_k(k) && self.sin_k(k) == other.sin_k(k))
    }
}

/// Values at `z_i = i*pi/n`, `i = 0..n`, linearly interpolated and extended
/// periodically. `offset` shifts the argument: `f(z) = interp(z + offset)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    pub values: Vec<f64>,
    pub offset: f64,
}

impl SampledGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(SpectralError::InvalidInput(
                "sampled function needs at least 2 values".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::InvalidInput(
                "non-finite sample value".into(),
            ));
        }
        Ok(SampledGrid {
            values,
            offset: 0.0,
        })
    }

    pub fn spacing(&self) -> f64 {
        PI / self.values.len() as f64
    }

    pub fn evaluate(&self, z: f64) -> f64 {
        let n = self.values.len();
        let u = (z + self.offset).rem_euclid(PI);
        let pos = u / self.spacing();
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        let a = self.values[i];
        let b = self.values[(i + 1) % n];
        a + frac * (b - a)
    }

    pub fn shift(&self, tau: f64) -> SampledGrid {
        let n = self.values.len();
        let offset = (self.offset + tau).rem_euclid(PI);
        let steps = offset / self.spacing();
        let whole = steps.round();
        if (steps - whole).abs() <= 1e-12 * n as f64 {
            // whole grid steps: a circular shift of the samples is exact
            let r = (whole as usize) % n;
            let mut values = self.values.clone();
            values.rotate_left(r);
            SampledGrid {
                values,
                offset: 0.0,
            }
        } else {
            SampledGrid {
                values: self.values.clone(),
                offset,
            }
        }
    }
}

/// `cos_amp(z) cos(phase(z)) + sin_amp(z) sin(phase(z))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModTerm {
    pub cos_amp: TrigPoly,
    pub sin_amp: TrigPoly,
    pub phase: TrigPoly,
}

impl ModTerm {
    pub fn evaluate(&self, z: f64) -> f64 {
        let (s, c) = self.phase.evaluate(z).sin_cos();
        self.cos_amp.evaluate(z) * c + self.sin_amp.evaluate(z) * s
    }
}

/// A real pi-periodic function.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFunction {
    Constant(f64),
    TrigPoly(TrigPoly),
    /// Second-class: no derivative is available.
    Samples(SampledGrid),
    /// Sum of phase-modulated terms; produced by the trace-splitting gauge.
    Modulated(Vec<ModTerm>),
}

impl Default for ScalarFunction {
    fn default() -> Self {
        ScalarFunction::Constant(0.0)
    }
}

impl From<f64> for ScalarFunction {
    fn from(c: f64) -> Self {
        ScalarFunction::Constant(c)
    }
}

impl From<TrigPoly> for ScalarFunction {
    fn from(t: TrigPoly) -> Self {
        ScalarFunction::TrigPoly(t)
    }
}

impl ScalarFunction {
    pub fn zero() -> Self {
        ScalarFunction::Constant(0.0)
    }

    /// `a0 + a1 cos 2z + b1 sin 2z`.
    pub fn trig1(a0: f64, a1: f64, b1: f64) -> Self {
        ScalarFunction::TrigPoly(TrigPoly::new(a0, vec![a1], vec![b1]))
    }

    pub fn samples(values: Vec<f64>) -> Result<Self> {
        Ok(ScalarFunction::Samples(SampledGrid::new(values)?))
    }

    pub fn evaluate(&self, z: f64) -> f64 {
        match self {
            ScalarFunction::Constant(c) => *c,
            ScalarFunction::TrigPoly(t) => t.evaluate(z),
            ScalarFunction::Samples(s) => s.evaluate(z),
            ScalarFunction::Modulated(terms) => terms.iter().map(|t| t.evaluate(z)).sum(),
        }
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        !matches!(self, ScalarFunction::Samples(_))
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, ScalarFunction::Samples(_))
    }

    /// Constant or trigonometric polynomial (closed-form calculus available).
    pub fn as_trig_poly(&self) -> Option<TrigPoly> {
        match self {
            ScalarFunction::Constant(c) => Some(TrigPoly::constant(*c)),
            ScalarFunction::TrigPoly(t) => Some(t.clone()),
            _ => None,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            ScalarFunction::Constant(c) => *c == 0.0,
            ScalarFunction::TrigPoly(t) => t.is_zero(),
            ScalarFunction::Samples(s) => s.values.iter().all(|&v| v == 0.0),
            ScalarFunction::Modulated(terms) => terms
                .iter()
                .all(|t| t.cos_amp.is_zero() && t.sin_amp.is_zero()),
        }
    }

    pub fn derivative(&self) -> Result<ScalarFunction> {
        Ok(match self {
            ScalarFunction::Constant(_) => ScalarFunction::Constant(0.0),
            ScalarFunction::TrigPoly(t) => ScalarFunction::TrigPoly(t.derivative()),
            ScalarFunction::Samples(_) => {
                return Err(SpectralError::AcRequired { what: "derivative" })
            }
            ScalarFunction::Modulated(terms) => {
                // (A cos f + B sin f)' = (A' + B f') cos f + (B' - A f') sin f
                let out = terms
                    .iter()
                    .map(|t| {
                        let dphi = t.phase.derivative();
                        ModTerm {
                            cos_amp: t.cos_amp.derivative().add(&t.sin_amp.mul(&dphi)),
                            sin_amp: t
                                .sin_amp
                                .derivative()
                                .add(&t.cos_amp.mul(&dphi).scale(-1.0)),
                            phase: t.phase.clone(),
                        }
                    })
                    .collect();
                ScalarFunction::Modulated(out).simplified()
            }
        })
    }

    /// `z -> self(z + tau)`, keeping the representation.
    pub fn shift(&self, tau: f64) -> ScalarFunction {
        match self {
            ScalarFunction::Constant(c) => ScalarFunction::Constant(*c),
            ScalarFunction::TrigPoly(t) => ScalarFunction::TrigPoly(t.shift(tau)),
            ScalarFunction::Samples(s) => ScalarFunction::Samples(s.shift(tau)),
            ScalarFunction::Modulated(terms) => ScalarFunction::Modulated(
                terms
                    .iter()
                    .map(|t| ModTerm {
                        cos_amp: t.cos_amp.shift(tau),
                        sin_amp: t.sin_amp.shift(tau),
                        phase: t.phase.shift(tau),
                    })
                    .collect(),
            ),
        }
    }

    pub fn scale(&self, s: f64) -> ScalarFunction {
        match self {
            ScalarFunction::Constant(c) => ScalarFunction::Constant(c * s),
            ScalarFunction::TrigPoly(t) => ScalarFunction::TrigPoly(t.scale(s)),
            ScalarFunction::Samples(g) => ScalarFunction::Samples(SampledGrid {
                values: g.values.iter().map(|v| v * s).collect(),
                offset: g.offset,
            }),
            ScalarFunction::Modulated(terms) => ScalarFunction::Modulated(
                terms
                    .iter()
                    .map(|t| ModTerm {
                        cos_amp: t.cos_amp.scale(s),
                        sin_amp: t.sin_amp.scale(s),
                        phase: t.phase.clone(),
                    })
                    .collect(),
            ),
        }
    }

    pub fn neg(&self) -> ScalarFunction {
        self.scale(-1.0)
    }

    /// Pointwise sum. Sampled operands force a sampled result on a common grid.
    pub fn add(&self, other: &ScalarFunction) -> ScalarFunction {
        use ScalarFunction::*;
        match (self, other) {
            (Constant(a), Constant(b)) => Constant(a + b),
            (Samples(a), Samples(b))
                if a.values.len() == b.values.len() && a.offset == b.offset =>
            {
                Samples(SampledGrid {
                    values: a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect(),
                    offset: a.offset,
                })
            }
            (Samples(_), _) | (_, Samples(_)) => {
                let n = [self, other]
                    .iter()
                    .filter_map(|f| match f {
                        Samples(g) => Some(g.values.len()),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(RESAMPLE_POINTS)
                    .max(RESAMPLE_POINTS);
                let h = PI / n as f64;
                Samples(SampledGrid {
                    values: (0..n)
                        .map(|i| self.evaluate(i as f64 * h) + other.evaluate(i as f64 * h))
                        .collect(),
                    offset: 0.0,
                })
            }
            (Modulated(_), _) | (_, Modulated(_)) => {
                let mut terms = self.mod_terms();
                for t in other.mod_terms() {
                    if let Some(existing) =
                        terms.iter_mut().find(|e| e.phase.same_function(&t.phase))
                    {
                        existing.cos_amp = existing.cos_amp.add(&t.cos_amp);
                        existing.sin_amp = existing.sin_amp.add(&t.sin_amp);
                    } else {
                        terms.push(t);
                    }
                }
                Modulated(terms).simplified()
            }
            _ => {
                let a = self.as_trig_poly().expect("constant or trig poly");
                let b = other.as_trig_poly().expect("constant or trig poly");
                TrigPoly(a.add(&b)).simplified()
            }
        }
    }

    pub fn sub(&self, other: &ScalarFunction) -> ScalarFunction {
        self.add(&other.neg())
    }

    fn mod_terms(&self) -> Vec<ModTerm> {
        match self {
            ScalarFunction::Modulated(terms) => terms.clone(),
            other => {
                let t = other.as_trig_poly().expect("non-sampled function");
                vec![ModTerm {
                    cos_amp: t,
                    sin_amp: TrigPoly::default(),
                    phase: TrigPoly::default(),
                }]
            }
        }
    }

    /// Collapse representations produced by arithmetic to their simplest kind.
    pub fn simplified(self) -> ScalarFunction {
        match self {
            ScalarFunction::TrigPoly(t) if !t.has_harmonics() => ScalarFunction::Constant(t.a0),
            ScalarFunction::Modulated(terms) => {
                let terms: Vec<ModTerm> = terms
                    .into_iter()
                    .filter(|t| !(t.cos_amp.is_zero() && t.sin_amp.is_zero()))
                    .collect();
                if terms.iter().all(|t| t.phase.is_zero()) {
                    let sum = terms
                        .iter()
                        .fold(TrigPoly::default(), |acc, t| acc.add(&t.cos_amp));
                    ScalarFunction::TrigPoly(sum).simplified()
                } else {
                    ScalarFunction::Modulated(terms)
                }
            }
            other => other,
        }
    }

    /// `int_0^z self(t) dt`; closed form for constants and trig polynomials.
    pub fn integral_to(&self, z: f64) -> f64 {
        match self {
            ScalarFunction::Constant(c) => c * z,
            ScalarFunction::TrigPoly(t) => t.integral_to(z),
            _ => simpson_fn(|t| self.evaluate(t), 0.0, z, QUADRATURE_INTERVALS),
        }
    }

    /// `(1/pi) int_0^pi self`.
    pub fn mean(&self) -> f64 {
        match self {
            ScalarFunction::Constant(c) => *c,
            ScalarFunction::TrigPoly(t) => t.a0,
            _ => self.integral_to(PI) / PI,
        }
    }

    /// `int_0^z self * other`; closed form when both are trig polynomials.
    pub fn integral_of_product(&self, other: &ScalarFunction, z: f64) -> f64 {
        match (self.as_trig_poly(), other.as_trig_poly()) {
            (Some(a), Some(b)) => a.mul(&b).integral_to(z),
            _ => simpson_fn(
                |t| self.evaluate(t) * other.evaluate(t),
                0.0,
                z,
                QUADRATURE_INTERVALS,
            ),
        }
    }
}
