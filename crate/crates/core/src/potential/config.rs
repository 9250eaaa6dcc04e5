//! JSON schema for potentials.
//!
//! ```json
//! {"q1": {"kind": "trigpoly", "a0": 0.0, "cos": [0.3], "sin": []},
//!  "q2": {"kind": "constant", "value": 1.0},
//!  "q":  {"kind": "samples", "values": [0.0, 0.5, 1.0, 0.5]}}
//! ```
//!
//! Missing entries are zero. Unknown keys are rejected.

use super::scalar::{ModTerm, SampledGrid, ScalarFunction, TrigPoly};
use super::PotentialSpec;
use crate::error::{Result, SpectralError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScalarConfig {
    Constant {
        value: f64,
    },
    #[serde(rename = "trigpoly")]
    TrigPoly {
        #[serde(default)]
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Samples {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "is_zero")]
        offset: f64,
    },
    Modulated {
        terms: Vec<ModTerm>,
    },
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl Default for ScalarConfig {
    fn default() -> Self {
        ScalarConfig::Constant { value: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    #[serde(default)]
    pub q1: ScalarConfig,
    #[serde(default)]
    pub q2: ScalarConfig,
    #[serde(default)]
    pub q: ScalarConfig,
}

impl TryFrom<ScalarConfig> for ScalarFunction {
    type Error = SpectralError;

    fn try_from(c: ScalarConfig) -> Result<Self> {
        let check = |xs: &[f64]| {
            if xs.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(SpectralError::InvalidInput("non-finite coefficient".into()))
            }
        };
        Ok(match c {
            ScalarConfig::Constant { value } => {
                check(&[value])?;
                ScalarFunction::Constant(value)
            }
            ScalarConfig::TrigPoly { a0, cos, sin } => {
                check(&[a0])?;
                check(&cos)?;
                check(&sin)?;
                ScalarFunction::TrigPoly(TrigPoly { a0, cos, sin })
            }
            ScalarConfig::Samples { values, offset } => {
                check(&[offset])?;
                let mut grid = SampledGrid::new(values)?;
                grid.offset = offset;
                ScalarFunction::Samples(grid)
            }
            ScalarConfig::Modulated { terms } => {
                for t in &terms {
                    for p in [&t.cos_amp, &t.sin_amp, &t.phase] {
                        check(&[p.a0])?;
                        check(&p.cos)?;
                        check(&p.sin)?;
                    }
                }
                ScalarFunction::Modulated(terms)
            }
        })
    }
}

impl From<ScalarFunction> for ScalarConfig {
    fn from(f: ScalarFunction) -> Self {
        match f {
            ScalarFunction::Constant(value) => ScalarConfig::Constant { value },
            ScalarFunction::TrigPoly(TrigPoly { a0, cos, sin }) => {
                ScalarConfig::TrigPoly { a0, cos, sin }
            }
            ScalarFunction::Samples(g) => ScalarConfig::Samples {
                values: g.values,
                offset: g.offset,
            },
            ScalarFunction::Modulated(terms) => ScalarConfig::Modulated { terms },
        }
    }
}

impl TryFrom<PotentialConfig> for PotentialSpec {
    type Error = SpectralError;

    fn try_from(c: PotentialConfig) -> Result<Self> {
        Ok(PotentialSpec::new(
            c.q1.try_into()?,
            c.q2.try_into()?,
            c.q.try_into()?,
        ))
    }
}

impl From<PotentialSpec> for PotentialConfig {
    fn from(s: PotentialSpec) -> Self {
        let (q1, q2, q) = s.into_entries();
        PotentialConfig {
            q1: q1.into(),
            q2: q2.into(),
            q: q.into(),
        }
    }
}

impl PotentialSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: PotentialConfig = serde_json::from_str(text)
            .map_err(|e| SpectralError::InvalidInput(format!("potential config: {e}")))?;
        cfg.try_into()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(PotentialConfig::from(self.clone())).expect("config serializes")
    }
}
