//! JSON scene files describing a connection to evaluate or flow.
//!
//! ```json
//! {
//!   "preset": "constant_flux(0.5)",
//!   "dim": 4,
//!   "resolution": 16,
//!   "metric": "flat",
//!   "b": "minus_phi",
//!   "tolerances": { "residual": 1e-6, "flow": 1e-8 }
//! }
//! ```
//!
//! Unknown keys are rejected.

use std::f64::consts::TAU;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::Algebra;
use crate::domain::TorusDomain;
use crate::error::{Error, Result};
use crate::form::DifferentialForm;
use crate::metric::Metric;
use crate::presets::{self, Instance, Preset, Sampling};
use crate::symplectic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricChoice {
    Flat,
    T4Example,
}

/// The cone field `B`: `"minus_phi"` (`B = −ΛF/n`), `"zero"`, or a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BChoice {
    Named(BName),
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BName {
    MinusPhi,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Threshold on residual sup norms for critical-point verdicts.
    pub residual: f64,
    /// Stop tolerance for flows.
    pub flow: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-6,
            flow: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub preset: Preset,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub periods: Option<Vec<f64>>,
    #[serde(default)]
    pub metric: Option<MetricChoice>,
    /// Must agree with the preset's algebra when given.
    #[serde(default)]
    pub algebra: Option<Algebra>,
    /// Seed for point-cloud sampling.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub b: Option<BChoice>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Scene {
    pub fn from_preset(preset: Preset) -> Self {
        Self {
            preset,
            dim: None,
            resolution: None,
            periods: None,
            metric: None,
            algebra: None,
            seed: None,
            points: None,
            b: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Scene =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("scene: {e}")))?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("reading scene {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(format!("scene: {m}")));
        if let Some(alg) = self.algebra {
            if alg != self.preset.algebra() {
                return bad(format!(
                    "algebra {} does not match preset {} ({})",
                    alg.name(),
                    self.preset,
                    self.preset.algebra().name()
                ));
            }
        }
        if let Some(d) = self.dim {
            if d != 2 && d != 4 {
                return bad(format!("dim must be 2 or 4, got {d}"));
            }
        }
        if let Some(n) = self.resolution {
            if n < 4 {
                return bad(format!("resolution must be at least 4, got {n}"));
            }
        }
        if let Some(p) = &self.periods {
            if p.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return bad("periods must be positive".into());
            }
        }
        if !(self.tolerances.residual > 0.0 && self.tolerances.flow > 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }

    fn sampling(&self) -> Sampling {
        let d = Sampling::default();
        Sampling {
            dim: self.dim.unwrap_or(d.dim),
            resolution: self.resolution.unwrap_or(d.resolution),
            points: self.points.unwrap_or(d.points),
            seed: self.seed.unwrap_or(d.seed),
        }
    }

    /// Build the preset with the scene's sampling, periods and metric.
    pub fn instance(&self) -> Result<Instance> {
        self.validate()?;
        let sampling = self.sampling();
        let mut inst = match &self.periods {
            None => presets::build(&self.preset, sampling)?,
            Some(periods) => {
                let dim = match &self.preset {
                    Preset::FlatWilson(c) => c.len(),
                    _ => sampling.dim,
                };
                if periods.len() != dim {
                    return Err(Error::InvalidParameter(format!(
                        "scene: {} periods given for a {dim}-dimensional torus",
                        periods.len()
                    )));
                }
                let dom = Arc::new(TorusDomain::new(vec![sampling.resolution; dim], periods.clone())?.into());
                match &self.preset {
                    Preset::FlatWilson(c) => presets::flat_wilson(&dom, c)?,
                    Preset::ConstantFlux(c) => presets::constant_flux(&dom, *c)?,
                    Preset::RandomSu2 { seed, amplitude } => {
                        presets::random_connection(&dom, Algebra::Su2, *seed, *amplitude)?
                    }
                    Preset::RandomAbelian { seed, amplitude } => {
                        presets::random_connection(&dom, Algebra::Abelian, *seed, *amplitude)?
                    }
                    Preset::T4YangMillsExample if periods.iter().all(|p| (p - TAU).abs() < 1e-12) => {
                        presets::build(&self.preset, sampling)?
                    }
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "scene: preset {other} does not accept custom periods"
                        )))
                    }
                }
            }
        };
        match self.metric {
            Some(MetricChoice::Flat) => inst.metric = Metric::flat(inst.domain()),
            Some(MetricChoice::T4Example) => inst.metric = Metric::t4_example(inst.domain())?,
            None => {}
        }
        Ok(inst)
    }

    /// The cone field for this scene; defaults to `B = −ΛF/n`.
    pub fn b_field(&self, inst: &Instance) -> Result<DifferentialForm> {
        let algebra = inst.connection.algebra();
        match self.b.as_ref().unwrap_or(&BChoice::Named(BName::MinusPhi)) {
            BChoice::Named(BName::MinusPhi) => {
                let f = inst.connection.curvature()?;
                Ok(symplectic::lefschetz_decompose_2form(&f)?.phi.scale(-1.0))
            }
            BChoice::Named(BName::Zero) => DifferentialForm::zeros(inst.domain(), algebra, 0),
            BChoice::Constant(c) => {
                if algebra != Algebra::Abelian {
                    return Err(Error::InvalidParameter(
                        "scene: a constant B needs an abelian preset".into(),
                    ));
                }
                DifferentialForm::constant(inst.domain(), 0, &[*c])
            }
        }
    }
}
