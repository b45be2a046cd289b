//! TOML scenario files.
//!
//! ```toml
//! mu = [0.5, 0.5]
//! s0 = [0.6, 0.4]
//! U = [[0.1, 5.5], [0.5, 1.0]]
//! V = [[0.5, -0.5], [-0.25, 1.0]]
//! distribution = { family = "gaussian", mean0 = -1.0, mean1 = 1.0, sigma = 1.0 }
//! dynamics = { model = "replicator" }
//! intervention = { tag = "feedback_control", epsilon = 0.05 }
//! interventions = [{ tag = "group_independent" }, { tag = "laissez_faire" }]
//! steps = 10000
//! ```
//!
//! Every error carries the line of the offending key.

use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::classifier::ClassifierPayoffs;
use crate::dist::FeaturePair;
use crate::dynamics::{AgentSuccess, CostDistribution, DynamicsModel, TransitionMatrix};
use crate::error::{Error, Result};
use crate::harness::{Scenario, DEFAULT_STEPS, DEFAULT_TOL, DEFAULT_WINDOW};
use crate::interventions::InterventionSpec;
use crate::state::{GroupProfile, PopulationState};

pub const DEFAULT_STRIDE: usize = 1;
pub const DEFAULT_RESOLUTION: usize = 40;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mu: Spanned<Vec<f64>>,
    s0: Option<Spanned<Vec<f64>>>,
    #[serde(rename = "U")]
    u: Spanned<Vec<Vec<f64>>>,
    #[serde(rename = "V")]
    v: Spanned<Vec<Vec<f64>>>,
    distribution: Option<Spanned<RawDistribution>>,
    dynamics: Option<Spanned<RawDynamics>>,
    intervention: Option<Spanned<InterventionSpec>>,
    interventions: Option<Spanned<Vec<InterventionSpec>>>,
    steps: Option<Spanned<usize>>,
    stride: Option<Spanned<usize>>,
    resolution: Option<Spanned<usize>>,
    window: Option<Spanned<usize>>,
    tol: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum RawDistribution {
    Gaussian { mean0: f64, mean1: f64, sigma: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
enum RawDynamics {
    Replicator,
    Markov {
        #[serde(rename = "T")]
        t: Vec<Vec<f64>>,
    },
    BestResponse { omega: f64, cost: RawCost },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum RawCost {
    Uniform { hi: f64 },
    Exponential { rate: f64 },
}

/// Run-length settings; command-line flags override these.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub steps: usize,
    pub stride: usize,
    pub resolution: usize,
    pub window: usize,
    pub tol: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            stride: DEFAULT_STRIDE,
            resolution: DEFAULT_RESOLUTION,
            window: DEFAULT_WINDOW,
            tol: DEFAULT_TOL,
        }
    }
}

/// A parsed and fully validated scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub s0: Option<PopulationState>,
    /// Interventions to compare or sweep; empty when the file lists none.
    pub interventions: Vec<InterventionSpec>,
    pub run: RunSettings,
}

struct Source<'a>(&'a str);

impl Source<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.0.len());
        self.0[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn err(&self, span: Range<usize>, e: impl std::fmt::Display) -> Error {
        Error::Config {
            line: Some(self.line(span)),
            message: e.to_string(),
        }
    }

    fn matrix(&self, key: &str, m: &Spanned<Vec<Vec<f64>>>) -> Result<[[f64; 2]; 2]> {
        let rows = m.get_ref();
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            let shape: Vec<String> = rows.iter().map(|r| r.len().to_string()).collect();
            return Err(self.err(
                m.span(),
                format!("`{key}` must be a 2x2 matrix, got rows of length [{}]", shape.join(", ")),
            ));
        }
        Ok([[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]])
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let src = Source(text);
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().map(|s| src.line(s)),
            message: e.message().trim().to_string(),
        })?;

        let mu = GroupProfile::new(raw.mu.get_ref().clone()).map_err(|e| src.err(raw.mu.span(), e))?;

        let success = AgentSuccess::new(src.matrix("U", &raw.u)?).map_err(|e| src.err(raw.u.span(), e))?;
        let payoffs =
            ClassifierPayoffs::new(src.matrix("V", &raw.v)?).map_err(|e| src.err(raw.v.span(), e))?;

        let features = match &raw.distribution {
            None => FeaturePair::standard(),
            Some(d) => {
                let RawDistribution::Gaussian { mean0, mean1, sigma } = *d.get_ref();
                let pair = FeaturePair::gaussian(mean0, mean1, sigma).map_err(|e| src.err(d.span(), e))?;
                if !pair.has_mlr() {
                    return Err(src.err(
                        d.span(),
                        "likelihood ratio must be increasing: need mean1 > mean0",
                    ));
                }
                pair
            }
        };

        let dynamics = match &raw.dynamics {
            None => DynamicsModel::Replicator,
            Some(d) => {
                let model = match d.get_ref() {
                    RawDynamics::Replicator => DynamicsModel::Replicator,
                    RawDynamics::Markov { t } => {
                        let t = Spanned::new(d.span(), t.clone());
                        let m = src.matrix("T", &t)?;
                        DynamicsModel::Markov {
                            transition: TransitionMatrix::new(m).map_err(|e| src.err(d.span(), e))?,
                        }
                    }
                    RawDynamics::BestResponse { omega, cost } => DynamicsModel::BestResponse {
                        omega: *omega,
                        cost: match *cost {
                            RawCost::Uniform { hi } => CostDistribution::Uniform { hi },
                            RawCost::Exponential { rate } => CostDistribution::Exponential { rate },
                        },
                    },
                };
                model.validate().map_err(|e| src.err(d.span(), e))?;
                model
            }
        };

        let intervention = match &raw.intervention {
            None => InterventionSpec::GroupIndependent,
            Some(i) => {
                i.get_ref().validate().map_err(|e| src.err(i.span(), e))?;
                i.get_ref().clone()
            }
        };

        let interventions = match &raw.interventions {
            None => Vec::new(),
            Some(list) => {
                for spec in list.get_ref() {
                    spec.validate().map_err(|e| src.err(list.span(), e))?;
                }
                list.get_ref().clone()
            }
        };

        let s0 = match &raw.s0 {
            None => None,
            Some(s) => {
                if s.get_ref().len() != mu.len() {
                    return Err(src.err(
                        s.span(),
                        format!("`s0` has {} entries but `mu` has {}", s.get_ref().len(), mu.len()),
                    ));
                }
                Some(PopulationState::new(s.get_ref().clone()).map_err(|e| src.err(s.span(), e))?)
            }
        };

        let mut run = RunSettings::default();
        let positive = |v: &Option<Spanned<usize>>, key: &str, slot: &mut usize| -> Result<()> {
            if let Some(v) = v {
                if *v.get_ref() == 0 {
                    return Err(src.err(v.span(), format!("`{key}` must be at least 1")));
                }
                *slot = *v.get_ref();
            }
            Ok(())
        };
        positive(&raw.steps, "steps", &mut run.steps)?;
        positive(&raw.stride, "stride", &mut run.stride)?;
        positive(&raw.resolution, "resolution", &mut run.resolution)?;
        positive(&raw.window, "window", &mut run.window)?;
        if let Some(tol) = &raw.tol {
            if !(tol.get_ref().is_finite() && *tol.get_ref() >= 0.0) {
                return Err(src.err(tol.span(), "`tol` must be finite and nonnegative"));
            }
            run.tol = *tol.get_ref();
        }

        let scenario = Scenario::new(mu, features, payoffs, success, dynamics, intervention)
            .map_err(|e| Error::Config { line: None, message: e.to_string() })?;
        Ok(Self {
            scenario,
            s0,
            interventions,
            run,
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn require_s0(&self) -> Result<&PopulationState> {
        self.s0.as_ref().ok_or_else(|| Error::Config {
            line: None,
            message: "missing key `s0`".into(),
        })
    }
}
