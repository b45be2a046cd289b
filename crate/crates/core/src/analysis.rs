//! Equilibrium structure of the coupled classifier/replicator system.
//!
//! Internal equilibria are the zeros of the fitness gap `W1(φ) - W0(φ)`. The
//! gap is strictly quasi-concave in `φ` with its peak at `φ*`, so it has at
//! most two zeros: `φ⁺` on the rising flank (left of `φ*`) and `φ⁻` on the
//! falling flank. Each zero maps through the threshold equation to a mean
//! qualification rate `s̄`, i.e. a hyperplane of equilibrium states.
//!
//! Linearised at such a state, the one-step change of `(D, s̄)` has a single
//! non-zero column; its eigenvalue `λ` decides stability (`-2 < λ < 0`).

use serde::Serialize;

use crate::classifier::{solve_threshold, ClassifierPayoffs};
use crate::dist::{FeaturePair, Label};
use crate::dynamics::{fitness, AgentSuccess};
use crate::error::{Error, Result};
use crate::harness::Scenario;
use crate::state::{from_coords, to_coords, CoordState, GroupProfile, PopulationState};

/// Largest `|W1 - W0|` at which a state still counts as on a hyperplane.
pub const ON_HYPERPLANE_TOL: f64 = 1e-8;
/// `|λ|` below this is reported as [`Stability::Marginal`].
pub const MARGINAL_TOL: f64 = 1e-10;

pub fn fitness_gap(d: &FeaturePair, u: &AgentSuccess, phi: f64) -> f64 {
    let m = u.matrix();
    let w1 = m[1][1] + (m[1][0] - m[1][1]) * d.cdf(Label::Qualified, phi);
    let w0 = m[0][1] + (m[0][0] - m[0][1]) * d.cdf(Label::Unqualified, phi);
    w1 - w0
}

/// `d(W1 - W0)/dφ = q1(φ)(U10 - U11) - q0(φ)(U00 - U01)`.
pub fn gap_slope(d: &FeaturePair, u: &AgentSuccess, phi: f64) -> f64 {
    let m = u.matrix();
    d.pdf(Label::Qualified, phi) * (m[1][0] - m[1][1])
        - d.pdf(Label::Unqualified, phi) * (m[0][0] - m[0][1])
}

/// Location of the fitness gap's maximum.
///
/// Solves `q1/q0 = (U00 - U01)/(U10 - U11)`; when that ratio is not positive
/// the gap is monotone and the peak sits at the infinite end it rises toward.
pub fn phi_star(d: &FeaturePair, u: &AgentSuccess) -> Result<f64> {
    let m = u.matrix();
    let ratio = (m[0][0] - m[0][1]) / (m[1][0] - m[1][1]);
    if ratio > 0.0 {
        return d.inverse_likelihood_ratio(ratio);
    }
    let center = d.inverse_likelihood_ratio(1.0)?;
    Ok(if gap_slope(d, u, center) > 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Initial bracket half-width around `φ*`, in units of the feature scale.
    pub half_width: f64,
    /// Bisection stops at this bracket width.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            half_width: 20.0,
            tol: 1e-10,
            max_iter: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumThresholds {
    pub phi_star: f64,
    /// Zero on the rising flank (stable hyperplane).
    pub phi_plus: Option<f64>,
    /// Zero on the falling flank (unstable hyperplane).
    pub phi_minus: Option<f64>,
}

impl EquilibriumThresholds {
    pub fn count(&self) -> usize {
        self.phi_plus.is_some() as usize + self.phi_minus.is_some() as usize
    }
}

/// Zeros of the fitness gap, found by bisection on each monotone flank of `φ*`.
pub fn find_equilibrium_thresholds(
    d: &FeaturePair,
    u: &AgentSuccess,
    opts: &SearchOptions,
) -> Result<EquilibriumThresholds> {
    let gap = |phi: f64| fitness_gap(d, u, phi);
    let star = phi_star(d, u)?;
    let (low_limit, high_limit) = (gap(f64::NEG_INFINITY), gap(f64::INFINITY));
    let peak = gap(star);
    let center = if star.is_finite() {
        star
    } else {
        d.inverse_likelihood_ratio(1.0)?
    };
    let reach = opts.half_width * d.scale();

    // rising flank: (-∞, φ*]
    let phi_plus = if star > f64::NEG_INFINITY && low_limit < 0.0 && peak > 0.0 {
        let lo = expand(|x| gap(x) < 0.0, center, -reach, opts)?;
        let hi = if star.is_finite() {
            star
        } else {
            expand(|x| gap(x) > 0.0, center, reach, opts)?
        };
        Some(bisect(gap, lo, hi, opts)?)
    } else {
        None
    };
    // falling flank: [φ*, ∞)
    let phi_minus = if star < f64::INFINITY && peak > 0.0 && high_limit < 0.0 {
        let lo = if star.is_finite() {
            star
        } else {
            expand(|x| gap(x) > 0.0, center, -reach, opts)?
        };
        let hi = expand(|x| gap(x) < 0.0, center, reach, opts)?;
        Some(bisect(|x| -gap(x), lo, hi, opts)?)
    } else {
        None
    };
    Ok(EquilibriumThresholds {
        phi_star: star,
        phi_plus,
        phi_minus,
    })
}

/// Walks from `center` by `step`, doubling, until `accept` holds.
fn expand(accept: impl Fn(f64) -> bool, center: f64, step: f64, opts: &SearchOptions) -> Result<f64> {
    let mut offset = step;
    for _ in 0..opts.max_iter {
        let x = center + offset;
        if accept(x) {
            return Ok(x);
        }
        offset *= 2.0;
    }
    Err(Error::NonConvergence {
        what: "equilibrium bracket",
        iterations: opts.max_iter,
    })
}

/// Root of an increasing function on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, opts: &SearchOptions) -> Result<f64> {
    for _ in 0..opts.max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= opts.tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        what: "equilibrium bisection",
        iterations: opts.max_iter,
    })
}

/// The `s̄` at which the Bayes-optimal threshold equals `phi`: `ξ / (ξ + q1(φ)/q0(φ))`.
pub fn hyperplane_qualification(d: &FeaturePair, v: &ClassifierPayoffs, phi: f64) -> f64 {
    let xi = v.xi();
    xi / (xi + d.likelihood_ratio(phi))
}

/// `dφ/ds̄ = -ξ / (s̄² · d(q1/q0)/dφ)` along the threshold equation; always negative.
pub fn dphi_dsbar(d: &FeaturePair, v: &ClassifierPayoffs, phi: f64) -> f64 {
    let s_bar = hyperplane_qualification(d, v, phi);
    -v.xi() / (s_bar * s_bar * d.likelihood_ratio_derivative(phi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenpair {
    pub lambda: f64,
    /// Non-trivial eigenvector in `(D, s̄)` coordinates.
    pub vector: Vec<f64>,
}

/// `Σ_g μ_g s_g (1 - s_g)`.
fn weighted_variance(mu: &GroupProfile, s: &PopulationState) -> f64 {
    (0..mu.len()).map(|g| mu.get(g) * s.get(g) * (1.0 - s.get(g))).sum()
}

/// Non-trivial eigenpair of the linearised one-step map at an equilibrium state.
pub fn jacobian_eigen(
    mu: &GroupProfile,
    s: &PopulationState,
    d: &FeaturePair,
    u: &AgentSuccess,
    v: &ClassifierPayoffs,
) -> Result<Eigenpair> {
    let s_bar = mu.mean(s)?;
    let phi = solve_threshold(d, v, s_bar)?;
    let gap = fitness_gap(d, u, phi);
    if !(gap.abs() < ON_HYPERPLANE_TOL) || !phi.is_finite() {
        return Err(Error::NotAtEquilibrium { gap });
    }
    let f = fitness(d, u, phi)?;
    let w_eq = 0.5 * (f.w0 + f.w1);
    if w_eq == 0.0 {
        return Err(Error::DegenerateEquilibrium);
    }
    let spread = weighted_variance(mu, s);
    let lambda = spread / w_eq * dphi_dsbar(d, v, phi) * gap_slope(d, u, phi);
    let n = mu.len();
    let mut vector: Vec<f64> = (0..n - 1)
        .map(|g| s.distance(g, g + 1) * (1.0 - s.get(g) - s.get(g + 1)))
        .collect();
    vector.push(spread);
    Ok(Eigenpair { lambda, vector })
}

/// Central-difference Jacobian of `r ↦ r[t+1] - r[t]` in `(D, s̄)`
/// coordinates under the scenario's policy and dynamics. Row `i`, column `j`
/// holds `∂Δr_i/∂r_j`.
pub fn numeric_jacobian(scenario: &Scenario, s: &PopulationState, h: f64) -> Result<Vec<Vec<f64>>> {
    if !(1e-7..=1e-4).contains(&h) {
        return Err(Error::InvalidParameter(format!("step {h} outside [1e-7, 1e-4]")));
    }
    let mu = &scenario.mu;
    let base = to_coords(mu, s)?.to_vec();
    let n = base.len();
    let displacement = |r: &[f64]| -> Result<Vec<f64>> {
        let state = from_coords(mu, &CoordState::from_slice(r)?)?;
        if let Some((index, &value)) = state
            .as_slice()
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && **v < 1.0))
        {
            return Err(Error::OutOfSimplex { index, value });
        }
        let (_, next) = scenario.step(&state)?;
        let after = to_coords(mu, &next)?.to_vec();
        Ok(after.iter().zip(r).map(|(a, b)| a - b).collect())
    };
    let mut jac = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += h;
        minus[j] -= h;
        let dp = displacement(&plus)?;
        let dm = displacement(&minus)?;
        for i in 0..n {
            jac[i][j] = (dp[i] - dm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Overcorrecting,
    Marginal,
}

pub fn classify_stability(lambda: f64) -> Stability {
    if lambda.abs() < MARGINAL_TOL {
        Stability::Marginal
    } else if lambda <= -2.0 {
        Stability::Overcorrecting
    } else if lambda < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flank {
    /// Positive-slope zero `φ⁺`.
    Plus,
    /// Negative-slope zero `φ⁻`.
    Minus,
}

/// One internal equilibrium hyperplane, linearised at its disparity-free state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperplane {
    pub flank: Flank,
    pub phi: f64,
    pub s_bar: f64,
    pub gap_slope: f64,
    pub w_eq: f64,
    pub lambda: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub phi_star: f64,
    pub phi_plus: Option<f64>,
    pub phi_minus: Option<f64>,
    pub s_bar_plus: Option<f64>,
    pub s_bar_minus: Option<f64>,
    pub hyperplanes: Vec<Hyperplane>,
}

impl EquilibriumReport {
    pub fn hyperplane(&self, flank: Flank) -> Option<&Hyperplane> {
        self.hyperplanes.iter().find(|h| h.flank == flank)
    }
}

pub fn equilibrium_report(
    d: &FeaturePair,
    u: &AgentSuccess,
    v: &ClassifierPayoffs,
    mu: &GroupProfile,
    opts: &SearchOptions,
) -> Result<EquilibriumReport> {
    let zeros = find_equilibrium_thresholds(d, u, opts)?;
    let mut hyperplanes = Vec::new();
    for (flank, phi) in [(Flank::Plus, zeros.phi_plus), (Flank::Minus, zeros.phi_minus)] {
        let Some(phi) = phi else { continue };
        let s_bar = hyperplane_qualification(d, v, phi);
        let state = PopulationState::new(vec![s_bar; mu.len()])?;
        let eigen = jacobian_eigen(mu, &state, d, u, v)?;
        let f = fitness(d, u, phi)?;
        hyperplanes.push(Hyperplane {
            flank,
            phi,
            s_bar,
            gap_slope: gap_slope(d, u, phi),
            w_eq: 0.5 * (f.w0 + f.w1),
            lambda: eigen.lambda,
            stability: classify_stability(eigen.lambda),
        });
    }
    Ok(EquilibriumReport {
        phi_star: zeros.phi_star,
        phi_plus: zeros.phi_plus,
        phi_minus: zeros.phi_minus,
        s_bar_plus: zeros.phi_plus.map(|p| hyperplane_qualification(d, v, p)),
        s_bar_minus: zeros.phi_minus.map(|p| hyperplane_qualification(d, v, p)),
        hyperplanes,
    })
}
