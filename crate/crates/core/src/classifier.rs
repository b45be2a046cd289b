//! Bayes-optimal threshold classification.

use serde::Serialize;

use crate::dist::{FeaturePair, Label};
use crate::error::{Error, Result};
use crate::state::{GroupProfile, PopulationState};

/// Classifier utility `V[y][ŷ]` for true label `y` and decision `ŷ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifierPayoffs {
    v: [[f64; 2]; 2],
}

impl ClassifierPayoffs {
    pub fn new(v: [[f64; 2]; 2]) -> Result<Self> {
        if v.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPayoffs("entries must be finite".into()));
        }
        if !(v[0][0] > v[0][1]) {
            return Err(Error::InvalidPayoffs(format!(
                "rejecting an unqualified agent must pay more than accepting one (V00={} <= V01={})",
                v[0][0], v[0][1]
            )));
        }
        if !(v[1][1] > v[1][0]) {
            return Err(Error::InvalidPayoffs(format!(
                "accepting a qualified agent must pay more than rejecting one (V11={} <= V10={})",
                v[1][1], v[1][0]
            )));
        }
        let payoffs = Self { v };
        let xi = payoffs.xi();
        if !(xi.is_finite() && xi > 0.0) {
            return Err(Error::InvalidPayoffs(format!("xi = {xi} is not in (0, inf)")));
        }
        Ok(payoffs)
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.v
    }

    pub fn get(&self, y: Label, decision: Label) -> f64 {
        self.v[y.index()][decision.index()]
    }

    /// Cost ratio `(V00 - V01) / (V11 - V10)` on the right side of the threshold equation.
    pub fn xi(&self) -> f64 {
        (self.v[0][0] - self.v[0][1]) / (self.v[1][1] - self.v[1][0])
    }

    /// Posterior probability threshold `xi / (1 + xi)`.
    pub fn theta(&self) -> f64 {
        let xi = self.xi();
        xi / (1.0 + xi)
    }
}

/// One feature threshold per group; group `g` accepts exactly `x > phi[g]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdPolicy(Vec<f64>);

impl ThresholdPolicy {
    pub fn new(phi: Vec<f64>) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::InvalidParameter("policy needs at least one threshold".into()));
        }
        if phi.iter().any(|p| p.is_nan()) {
            return Err(Error::InvalidParameter("threshold is NaN".into()));
        }
        Ok(Self(phi))
    }

    /// The same threshold for all `n` groups.
    pub fn uniform(n: usize, phi: f64) -> Self {
        Self(vec![phi; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, g: usize) -> f64 {
        self.0[g]
    }

    /// All thresholds bitwise equal.
    pub fn is_uniform(&self) -> bool {
        self.0.windows(2).all(|w| w[0].to_bits() == w[1].to_bits())
    }

    /// Component-wise sum with a perturbation vector.
    pub fn perturbed(&self, delta: &[f64]) -> Result<Self> {
        if delta.len() != self.0.len() {
            return Err(Error::LengthMismatch {
                expected: self.0.len(),
                found: delta.len(),
            });
        }
        Ok(Self(self.0.iter().zip(delta).map(|(p, d)| p + d).collect()))
    }

    /// Adds the same offset to every threshold.
    pub fn shifted(&self, offset: f64) -> Self {
        Self(self.0.iter().map(|p| p + offset).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Bayes-optimal group-independent threshold for global qualification rate `s_bar`.
///
/// Solves `q1(phi)/q0(phi) = xi (1 - s_bar) / s_bar`. The boundary rates are
/// accepted as limits: `s_bar = 0` gives `+∞` (reject everyone) and
/// `s_bar = 1` gives `-∞`.
pub fn solve_threshold(d: &FeaturePair, v: &ClassifierPayoffs, s_bar: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s_bar) {
        return Err(Error::InvalidState(format!(
            "qualification rate {s_bar} outside [0, 1]"
        )));
    }
    let ratio = v.xi() * (1.0 - s_bar) / s_bar;
    d.inverse_likelihood_ratio(ratio)
}

/// `Pr(Ŷ = 1 | G = g)` for threshold `phi` and qualification rate `s`.
pub fn acceptance_rate(d: &FeaturePair, phi: f64, s: f64) -> f64 {
    s * (1.0 - d.cdf(Label::Qualified, phi)) + (1.0 - s) * (1.0 - d.cdf(Label::Unqualified, phi))
}

/// Joint outcome fractions `Pr(Y = y, Ŷ = ŷ | G = g)` for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Confusion {
    /// Indexed `[y][ŷ]`.
    pub joint: [[f64; 2]; 2],
    /// `Pr(Ŷ = 1 | Y = 0)`.
    pub fpr: f64,
    /// `Pr(Ŷ = 0 | Y = 1)`.
    pub fnr: f64,
}

impl Confusion {
    pub fn acceptance(&self) -> f64 {
        self.joint[0][1] + self.joint[1][1]
    }
}

pub fn confusion(d: &FeaturePair, phi: f64, s: f64) -> Confusion {
    let q0 = d.cdf(Label::Unqualified, phi);
    let q1 = d.cdf(Label::Qualified, phi);
    Confusion {
        joint: [[(1.0 - s) * q0, (1.0 - s) * (1.0 - q0)], [s * q1, s * (1.0 - q1)]],
        fpr: 1.0 - q0,
        fnr: q1,
    }
}

/// Expected classifier utility summed over groups, weighted by group size.
pub fn utility(
    d: &FeaturePair,
    v: &ClassifierPayoffs,
    mu: &GroupProfile,
    policy: &ThresholdPolicy,
    state: &PopulationState,
) -> Result<f64> {
    let n = mu.len();
    if state.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: state.len(),
        });
    }
    if policy.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: policy.len(),
        });
    }
    let m = v.matrix();
    Ok((0..n)
        .map(|g| {
            let c = confusion(d, policy.get(g), state.get(g));
            let per_group: f64 = (0..2)
                .flat_map(|y| (0..2).map(move |yh| (y, yh)))
                .map(|(y, yh)| m[y][yh] * c.joint[y][yh])
                .sum();
            mu.get(g) * per_group
        })
        .sum())
}
