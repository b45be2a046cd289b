//! One-step population response to a threshold policy.
//!
//! The primary model is the discrete-time replicator equation, in which the
//! fraction of qualified agents in each group grows in proportion to the
//! fitness of qualifying relative to the group's mean fitness. Two alternative
//! response models are included for comparison: a Markov transition model,
//! where the probability of being qualified next round depends only on the
//! current outcome, and a best-response model, where agents qualify when the
//! acceptance gain outweighs a privately drawn cost.

use serde::Serialize;

use crate::classifier::{confusion, ThresholdPolicy};
use crate::dist::{FeaturePair, Label};
use crate::error::{Error, Result};
use crate::harness::Scenario;
use crate::state::{GroupProfile, PopulationState};

/// Fitness values below this are treated as an error rather than rounding noise.
pub const NEGATIVE_FITNESS_TOL: f64 = 1e-9;

/// Agent success `U[y][ŷ]` of each qualification/decision outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentSuccess {
    u: [[f64; 2]; 2],
}

impl AgentSuccess {
    /// Requires nonnegative finite entries and `U11 > U10`.
    ///
    /// `U00 == U01` is allowed: the fitness gap is then monotone, which is
    /// exactly the single-unstable-hyperplane reference setting.
    pub fn new(u: [[f64; 2]; 2]) -> Result<Self> {
        if u.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidSuccess(
                "entries must be finite and nonnegative".into(),
            ));
        }
        if !(u[1][1] > u[1][0]) {
            return Err(Error::InvalidSuccess(format!(
                "acceptance must benefit qualified agents (U11={} <= U10={})",
                u[1][1], u[1][0]
            )));
        }
        Ok(Self { u })
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.u
    }

    pub fn get(&self, y: Label, decision: Label) -> f64 {
        self.u[y.index()][decision.index()]
    }
}

/// Fitness of not qualifying (`w0`) and of qualifying (`w1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitnessPair {
    pub w0: f64,
    pub w1: f64,
}

impl FitnessPair {
    pub fn gap(&self) -> f64 {
        self.w1 - self.w0
    }

    /// Mean fitness of a group with qualification rate `s`.
    pub fn mean(&self, s: f64) -> f64 {
        s * self.w1 + (1.0 - s) * self.w0
    }
}

/// `W_y = U[y][1] + (U[y][0] - U[y][1]) Q_y(phi)`.
pub fn fitness(d: &FeaturePair, u: &AgentSuccess, phi: f64) -> Result<FitnessPair> {
    let m = u.matrix();
    let w = |y: Label| {
        let row = m[y.index()];
        let q = d.cdf(y, phi);
        row[0] * q + row[1] * (1.0 - q)
    };
    let clamp = |label: usize, value: f64| {
        if value < -NEGATIVE_FITNESS_TOL {
            Err(Error::NegativeFitness { label, value })
        } else {
            Ok(value.max(0.0))
        }
    };
    Ok(FitnessPair {
        w0: clamp(0, w(Label::Unqualified))?,
        w1: clamp(1, w(Label::Qualified))?,
    })
}

/// Replicator update of a single group's qualification rate.
///
/// Boundary rates are fixed points and are returned unchanged.
pub fn replicator_update(s: f64, f: FitnessPair) -> Option<f64> {
    if s == 0.0 || s == 1.0 {
        return Some(s);
    }
    let mean = f.mean(s);
    if mean == 0.0 {
        return None;
    }
    // incremental form keeps equal-fitness states exactly fixed
    Some((s + s * (1.0 - s) * f.gap() / mean).clamp(0.0, 1.0))
}

fn check_lengths(mu: &GroupProfile, s: &PopulationState, policy: &ThresholdPolicy) -> Result<()> {
    for found in [s.len(), policy.len()] {
        if found != mu.len() {
            return Err(Error::LengthMismatch {
                expected: mu.len(),
                found,
            });
        }
    }
    Ok(())
}

/// `s_g' = s_g W1(phi_g) / (s_g W1(phi_g) + (1 - s_g) W0(phi_g))`, with each
/// group's fitness evaluated at its own threshold.
pub fn replicator_step(
    mu: &GroupProfile,
    s: &PopulationState,
    policy: &ThresholdPolicy,
    d: &FeaturePair,
    u: &AgentSuccess,
) -> Result<PopulationState> {
    check_lengths(mu, s, policy)?;
    let next = (0..s.len())
        .map(|g| {
            let f = fitness(d, u, policy.get(g))?;
            replicator_update(s.get(g), f).ok_or(Error::DegenerateFitness { group: g })
        })
        .collect::<Result<Vec<_>>>()?;
    PopulationState::with_boundary(next)
}

/// Probability `T[y][ŷ]` of being qualified next round given outcome `(y, ŷ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionMatrix {
    t: [[f64; 2]; 2],
}

impl TransitionMatrix {
    pub fn new(t: [[f64; 2]; 2]) -> Result<Self> {
        if t.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidParameter(
                "transition probabilities must lie in [0, 1]".into(),
            ));
        }
        Ok(Self { t })
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.t
    }
}

/// `s_g' = Σ_{y,ŷ} Pr(Y = y, Ŷ = ŷ | G = g) T[y][ŷ]`.
pub fn markov_step(
    mu: &GroupProfile,
    s: &PopulationState,
    policy: &ThresholdPolicy,
    d: &FeaturePair,
    t: &TransitionMatrix,
) -> Result<PopulationState> {
    check_lengths(mu, s, policy)?;
    let m = t.matrix();
    let next = (0..s.len())
        .map(|g| {
            let c = confusion(d, policy.get(g), s.get(g));
            let p = c.joint[0][0] * m[0][0]
                + c.joint[0][1] * m[0][1]
                + c.joint[1][0] * m[1][0]
                + c.joint[1][1] * m[1][1];
            p.clamp(0.0, 1.0)
        })
        .collect();
    PopulationState::with_boundary(next)
}

/// Distribution of the private cost of becoming qualified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CostDistribution {
    /// Uniform on `[0, hi]`.
    Uniform { hi: f64 },
    /// Exponential with the given rate.
    Exponential { rate: f64 },
}

impl CostDistribution {
    pub fn validate(&self) -> Result<()> {
        let (name, value) = match *self {
            CostDistribution::Uniform { hi } => ("hi", hi),
            CostDistribution::Exponential { rate } => ("rate", rate),
        };
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cost distribution {name} must be positive, got {value}"
            )));
        }
        Ok(())
    }

    pub fn cdf(&self, c: f64) -> f64 {
        if c <= 0.0 {
            return 0.0;
        }
        match *self {
            CostDistribution::Uniform { hi } => (c / hi).min(1.0),
            CostDistribution::Exponential { rate } => -(-rate * c).exp_m1(),
        }
    }
}

/// `s_g' = F_cost(omega (Q0(phi_g) - Q1(phi_g)))`: the share of agents whose
/// cost is below the gain in acceptance probability from qualifying.
pub fn best_response_step(
    mu: &GroupProfile,
    s: &PopulationState,
    policy: &ThresholdPolicy,
    d: &FeaturePair,
    omega: f64,
    cost: &CostDistribution,
) -> Result<PopulationState> {
    check_lengths(mu, s, policy)?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let next = policy
        .thresholds()
        .iter()
        .map(|&phi| {
            let gain = d.cdf(Label::Unqualified, phi) - d.cdf(Label::Qualified, phi);
            cost.cdf(omega * gain)
        })
        .collect();
    PopulationState::with_boundary(next)
}

/// Population response model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DynamicsModel {
    Replicator,
    Markov {
        transition: TransitionMatrix,
    },
    BestResponse {
        omega: f64,
        cost: CostDistribution,
    },
}

impl DynamicsModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            DynamicsModel::Replicator | DynamicsModel::Markov { .. } => Ok(()),
            DynamicsModel::BestResponse { omega, cost } => {
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "omega must be positive, got {omega}"
                    )));
                }
                cost.validate()
            }
        }
    }

    pub fn advance(
        &self,
        mu: &GroupProfile,
        s: &PopulationState,
        policy: &ThresholdPolicy,
        d: &FeaturePair,
        u: &AgentSuccess,
    ) -> Result<PopulationState> {
        match self {
            DynamicsModel::Replicator => replicator_step(mu, s, policy, d, u),
            DynamicsModel::Markov { transition } => markov_step(mu, s, policy, d, transition),
            DynamicsModel::BestResponse { omega, cost } => {
                best_response_step(mu, s, policy, d, *omega, cost)
            }
        }
    }
}

/// Advances `state` one step under the scenario's response model.
pub fn step(
    scenario: &Scenario,
    state: &PopulationState,
    policy: &ThresholdPolicy,
) -> Result<PopulationState> {
    scenario.dynamics.advance(
        &scenario.mu,
        state,
        policy,
        &scenario.features,
        &scenario.success,
    )
}
