//! Scenarios, trajectories, convergence detection and phase-portrait sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::fitness_gap;
use crate::classifier::{confusion, ClassifierPayoffs, ThresholdPolicy};
use crate::dist::FeaturePair;
use crate::dynamics::{self, AgentSuccess, DynamicsModel};
use crate::error::{Error, Result};
use crate::interventions::InterventionSpec;
use crate::state::{disparity_norm, to_coords, GroupProfile, PopulationState};

pub const DEFAULT_STEPS: usize = 10_000;
pub const DEFAULT_WINDOW: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Immutable problem definition: who is classified, how, and how they respond.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub mu: GroupProfile,
    pub features: FeaturePair,
    pub payoffs: ClassifierPayoffs,
    pub success: AgentSuccess,
    pub dynamics: DynamicsModel,
    pub intervention: InterventionSpec,
}

impl Scenario {
    pub fn new(
        mu: GroupProfile,
        features: FeaturePair,
        payoffs: ClassifierPayoffs,
        success: AgentSuccess,
        dynamics: DynamicsModel,
        intervention: InterventionSpec,
    ) -> Result<Self> {
        if !features.has_mlr() {
            return Err(Error::InvalidDistribution(
                "likelihood ratio q1/q0 must be strictly increasing (mean1 > mean0)".into(),
            ));
        }
        dynamics.validate()?;
        intervention.validate()?;
        Ok(Self {
            mu,
            features,
            payoffs,
            success,
            dynamics,
            intervention,
        })
    }

    /// Replicator dynamics under the group-independent policy.
    pub fn replicator(
        mu: GroupProfile,
        features: FeaturePair,
        payoffs: ClassifierPayoffs,
        success: AgentSuccess,
    ) -> Result<Self> {
        Self::new(
            mu,
            features,
            payoffs,
            success,
            DynamicsModel::Replicator,
            InterventionSpec::GroupIndependent,
        )
    }

    pub fn with_intervention(&self, intervention: InterventionSpec) -> Result<Self> {
        intervention.validate()?;
        Ok(Self {
            intervention,
            ..self.clone()
        })
    }

    pub fn with_dynamics(&self, dynamics: DynamicsModel) -> Result<Self> {
        dynamics.validate()?;
        Ok(Self {
            dynamics,
            ..self.clone()
        })
    }

    pub fn groups(&self) -> usize {
        self.mu.len()
    }

    /// Policy the classifier applies at state `s`.
    pub fn policy(&self, s: &PopulationState) -> Result<ThresholdPolicy> {
        self.intervention
            .policy(&self.features, &self.payoffs, &self.mu, s)
    }

    /// One alternation: classify with the policy for `s`, then let the population respond.
    pub fn step(&self, s: &PopulationState) -> Result<(ThresholdPolicy, PopulationState)> {
        let policy = self.policy(s)?;
        let next = dynamics::step(self, s, &policy)?;
        Ok((policy, next))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub t: usize,
    pub s: Vec<f64>,
    /// Policy computed from `s` at this step (before the population responds).
    pub phi: Vec<f64>,
    pub s_bar: f64,
    pub disparity_l1: f64,
    pub acceptance: Vec<f64>,
    pub fpr: Vec<f64>,
    pub fnr: Vec<f64>,
    /// `W1 - W0` at the shared threshold, when the policy is group-independent.
    pub fitness_gap: Option<f64>,
}

impl TrajectoryRecord {
    fn build(sc: &Scenario, t: usize, s: &PopulationState, policy: &ThresholdPolicy) -> Result<Self> {
        let coords = to_coords(&sc.mu, s)?;
        let outcomes: Vec<_> = (0..s.len())
            .map(|g| confusion(&sc.features, policy.get(g), s.get(g)))
            .collect();
        Ok(Self {
            t,
            s: s.as_slice().to_vec(),
            phi: policy.thresholds().to_vec(),
            s_bar: coords.s_bar,
            disparity_l1: disparity_norm(&coords.distances, 1.0)?,
            acceptance: outcomes.iter().map(|c| c.acceptance()).collect(),
            fpr: outcomes.iter().map(|c| c.fpr).collect(),
            fnr: outcomes.iter().map(|c| c.fnr).collect(),
            fitness_gap: policy
                .is_uniform()
                .then(|| fitness_gap(&sc.features, &sc.success, policy.get(0))),
        })
    }

    /// Per-group false positive and false negative rates agree within `tol`.
    pub fn equalized_odds(&self, tol: f64) -> bool {
        spread(&self.fpr) <= tol && spread(&self.fnr) <= tol
    }

    /// Per-group acceptance rates agree within `tol`.
    pub fn demographic_parity(&self, tol: f64) -> bool {
        spread(&self.acceptance) <= tol
    }
}

fn spread(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Iterates policy → classification → response for `steps` steps.
///
/// Records every `stride`-th step plus the final one; step `t` carries the
/// state `s[t]` and the policy computed from it.
pub fn run_trajectory(
    sc: &Scenario,
    s0: &PopulationState,
    steps: usize,
    stride: usize,
) -> Result<Vec<TrajectoryRecord>> {
    if steps == 0 || stride == 0 {
        return Err(Error::InvalidParameter(
            "steps and stride must be at least 1".into(),
        ));
    }
    if s0.len() != sc.groups() {
        return Err(Error::LengthMismatch {
            expected: sc.groups(),
            found: s0.len(),
        });
    }
    let mut records = Vec::with_capacity(steps / stride + 2);
    let mut s = s0.clone();
    for t in 0..=steps {
        let policy = sc.policy(&s)?;
        if t % stride == 0 || t == steps {
            records.push(TrajectoryRecord::build(sc, t, &s, &policy)?);
        }
        if t < steps {
            s = dynamics::step(sc, &s, &policy)?;
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    InternalHyperplane,
    TrivialVertex,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    /// Largest `‖s[t+1] - s[t]‖∞` inside the trailing window.
    pub max_change: f64,
    pub limit: Vec<f64>,
    pub terminal_s_bar: f64,
    pub terminal_disparity_l1: f64,
    pub nearest: EquilibriumKind,
}

fn max_change(a: &TrajectoryRecord, b: &TrajectoryRecord) -> f64 {
    a.s.iter()
        .zip(&b.s)
        .fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

/// Converged iff every consecutive change over the last `window` records is at most `tol`.
pub fn detect_convergence(records: &[TrajectoryRecord], window: usize, tol: f64) -> Result<ConvergenceReport> {
    let last = records
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    if window == 0 || window > records.len() {
        return Err(Error::InvalidParameter(format!(
            "window {window} must be in 1..={}",
            records.len()
        )));
    }
    let tail = &records[records.len() - window..];
    let change = tail
        .windows(2)
        .map(|w| max_change(&w[0], &w[1]))
        .fold(0.0, f64::max);
    let converged = change <= tol;
    let at_vertex = last.s.iter().all(|&v| v <= tol || v >= 1.0 - tol);
    let nearest = match (converged, at_vertex) {
        (false, _) => EquilibriumKind::None,
        (true, true) => EquilibriumKind::TrivialVertex,
        (true, false) => EquilibriumKind::InternalHyperplane,
    };
    Ok(ConvergenceReport {
        converged,
        max_change: change,
        limit: last.s.clone(),
        terminal_s_bar: last.s_bar,
        terminal_disparity_l1: last.disparity_l1,
        nearest,
    })
}

/// First recorded step after which every consecutive change is at most `tol`.
pub fn settling_step(records: &[TrajectoryRecord], tol: f64) -> Option<usize> {
    let last_big = records
        .windows(2)
        .rposition(|w| max_change(&w[0], &w[1]) > tol);
    match last_big {
        None => records.first().map(|r| r.t),
        Some(i) if i + 2 < records.len() => Some(records[i + 1].t),
        Some(_) => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub s1: f64,
    pub s2: f64,
    pub ds1: f64,
    pub ds2: f64,
    pub acc1: f64,
    pub fpr1: f64,
    pub fnr1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Cell centres along each axis.
    pub axis: Vec<f64>,
    /// Row-major: `cells[i * resolution + j]` sits at `(axis[i], axis[j])`.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn resolution(&self) -> usize {
        self.axis.len()
    }

    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.axis.len() + j]
    }
}

/// One-step displacement field over a `resolution × resolution` grid of
/// two-group states, sampled at cell centres.
pub fn sweep_grid(sc: &Scenario, resolution: usize) -> Result<SweepResult> {
    if sc.groups() != 2 {
        return Err(Error::InvalidParameter(format!(
            "sweeps need exactly two groups, scenario has {}",
            sc.groups()
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter("resolution must be at least 2".into()));
    }
    let axis: Vec<f64> = (0..resolution)
        .map(|i| (i as f64 + 0.5) / resolution as f64)
        .collect();
    let cells = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let (s1, s2) = (axis[k / resolution], axis[k % resolution]);
            let s = PopulationState::new(vec![s1, s2])?;
            let (policy, next) = sc.step(&s)?;
            let c = confusion(&sc.features, policy.get(0), s1);
            Ok(SweepCell {
                s1,
                s2,
                ds1: next.get(0) - s1,
                ds2: next.get(1) - s2,
                acc1: c.acceptance(),
                fpr1: c.fpr,
                fnr1: c.fnr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { axis, cells })
}
