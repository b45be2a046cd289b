//! Policy generators: map the current population state to per-group thresholds.

use serde::{Deserialize, Serialize};

use crate::classifier::{acceptance_rate, solve_threshold, utility, ClassifierPayoffs, ThresholdPolicy};
use crate::dist::{FeaturePair, Label};
use crate::error::{Error, Result};
use crate::state::{to_coords, GroupProfile, PopulationState};

/// Which policy the classifier is restricted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterventionSpec {
    /// One Bayes-optimal threshold for everyone.
    GroupIndependent,
    /// A separate utility-maximizing threshold per group.
    LaissezFaire,
    /// Utility-maximizing thresholds subject to equal acceptance rates.
    DemographicParity,
    /// Shift every threshold of `inner` (group-independent by default) down by `delta`.
    UniversalSubsidy {
        delta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inner: Option<Box<InterventionSpec>>,
    },
    /// Group-independent thresholds plus the distance-contracting perturbation.
    FeedbackControl { epsilon: f64 },
    /// Raise the thresholds of `inner` uniformly until global acceptance is at most `cap`.
    CapacityCapped {
        cap: f64,
        inner: Box<InterventionSpec>,
    },
}

impl InterventionSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            InterventionSpec::GroupIndependent => "group_independent",
            InterventionSpec::LaissezFaire => "laissez_faire",
            InterventionSpec::DemographicParity => "demographic_parity",
            InterventionSpec::UniversalSubsidy { .. } => "universal_subsidy",
            InterventionSpec::FeedbackControl { .. } => "feedback_control",
            InterventionSpec::CapacityCapped { .. } => "capacity_capped",
        }
    }

    /// Short human-readable label including parameters.
    pub fn label(&self) -> String {
        match self {
            InterventionSpec::UniversalSubsidy { delta, inner } => match inner {
                Some(inner) => format!("universal_subsidy(delta={delta},{})", inner.label()),
                None => format!("universal_subsidy(delta={delta})"),
            },
            InterventionSpec::FeedbackControl { epsilon } => {
                format!("feedback_control(epsilon={epsilon})")
            }
            InterventionSpec::CapacityCapped { cap, inner } => {
                format!("capacity_capped(cap={cap},{})", inner.label())
            }
            other => other.tag().to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InterventionSpec::UniversalSubsidy { delta, inner } => {
                if !delta.is_finite() {
                    return Err(Error::InvalidParameter(format!("delta must be finite, got {delta}")));
                }
                inner.as_deref().map_or(Ok(()), InterventionSpec::validate)
            }
            InterventionSpec::FeedbackControl { epsilon } => {
                if !epsilon.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "epsilon must be finite, got {epsilon}"
                    )));
                }
                Ok(())
            }
            InterventionSpec::CapacityCapped { cap, inner } => {
                if !(*cap > 0.0 && *cap < 1.0) {
                    return Err(Error::InvalidParameter(format!("cap must be in (0, 1), got {cap}")));
                }
                inner.validate()
            }
            _ => Ok(()),
        }
    }

    /// Thresholds chosen for state `s`.
    pub fn policy(
        &self,
        d: &FeaturePair,
        v: &ClassifierPayoffs,
        mu: &GroupProfile,
        s: &PopulationState,
    ) -> Result<ThresholdPolicy> {
        match self {
            InterventionSpec::GroupIndependent => group_independent_policy(d, v, mu, s),
            InterventionSpec::LaissezFaire => laissez_faire_policy(d, v, mu, s),
            InterventionSpec::DemographicParity => {
                Ok(demographic_parity_policy(d, v, mu, s, &DpOptions::default())?.policy)
            }
            InterventionSpec::UniversalSubsidy { delta, inner } => {
                let base = match inner {
                    Some(inner) => inner.policy(d, v, mu, s)?,
                    None => group_independent_policy(d, v, mu, s)?,
                };
                Ok(universal_subsidy(&base, *delta))
            }
            InterventionSpec::FeedbackControl { epsilon } => {
                feedback_control_policy(d, v, mu, s, *epsilon)
            }
            InterventionSpec::CapacityCapped { cap, inner } => {
                let base = inner.policy(d, v, mu, s)?;
                capacity_capped(d, mu, s, &base, *cap)
            }
        }
    }
}

pub fn group_independent_policy(
    d: &FeaturePair,
    v: &ClassifierPayoffs,
    mu: &GroupProfile,
    s: &PopulationState,
) -> Result<ThresholdPolicy> {
    let phi = solve_threshold(d, v, mu.mean(s)?)?;
    Ok(ThresholdPolicy::uniform(mu.len(), phi))
}

/// Threshold equation solved per group with `s_g` in place of `s̄`.
pub fn laissez_faire_threshold(d: &FeaturePair, v: &ClassifierPayoffs, s_g: f64) -> Result<f64> {
    solve_threshold(d, v, s_g)
}

pub fn laissez_faire_policy(
    d: &FeaturePair,
    v: &ClassifierPayoffs,
    mu: &GroupProfile,
    s: &PopulationState,
) -> Result<ThresholdPolicy> {
    if s.len() != mu.len() {
        return Err(Error::LengthMismatch {
            expected: mu.len(),
            found: s.len(),
        });
    }
    let phi = s
        .as_slice()
        .iter()
        .map(|&sg| laissez_faire_threshold(d, v, sg))
        .collect::<Result<Vec<_>>>()?;
    ThresholdPolicy::new(phi)
}

/// Search settings for [`demographic_parity_policy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpOptions {
    /// Interior acceptance rates `k / (grid_points + 1)` scanned before refinement.
    pub grid_points: usize,
    /// Width in acceptance rate at which refinement stops.
    pub rate_tol: f64,
    pub max_iter: usize,
}

impl Default for DpOptions {
    fn default() -> Self {
        Self {
            grid_points: 64,
            rate_tol: 1e-14,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub policy: ThresholdPolicy,
    /// Common acceptance rate of every group.
    pub acceptance: f64,
    pub utility: f64,
    /// Optimum at the trivial accept-all or reject-all policy.
    pub boundary: bool,
}

/// Threshold at which a group with qualification rate `s` is accepted at rate `a`.
///
/// Acceptance is strictly decreasing in the threshold, so this is a
/// safeguarded Newton iteration inside an expanding bracket.
pub fn threshold_for_acceptance(d: &FeaturePair, s: f64, a: f64) -> Result<f64> {
    if a >= 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if a <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let f = |x: f64| acceptance_rate(d, x, s) - a;
    let step = 2.0 * d.scale();
    let (mut lo, mut hi) = (-step, step);
    let mut iterations = 0;
    while f(lo) < 0.0 {
        lo = 2.0 * lo;
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NonConvergence {
                what: "acceptance-rate bracket",
                iterations,
            });
        }
    }
    while f(hi) > 0.0 {
        hi = 2.0 * hi;
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NonConvergence {
                what: "acceptance-rate bracket",
                iterations,
            });
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() <= 1e-16 {
            return Ok(x);
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 1e-15 * x.abs().max(1.0) {
            return Ok(x);
        }
        let slope = -(s * d.pdf(Label::Qualified, x) + (1.0 - s) * d.pdf(Label::Unqualified, x));
        let newton = x - fx / slope;
        if slope < 0.0 && (newton - x).abs() <= 1e-15 * x.abs().max(1.0) {
            return Ok(newton);
        }
        x = if slope < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NonConvergence {
        what: "acceptance-rate inversion",
        iterations: 200,
    })
}

fn parity_thresholds(d: &FeaturePair, s: &PopulationState, a: f64) -> Result<ThresholdPolicy> {
    let phi = s
        .as_slice()
        .iter()
        .map(|&sg| threshold_for_acceptance(d, sg, a))
        .collect::<Result<Vec<_>>>()?;
    ThresholdPolicy::new(phi)
}

/// Derivative of utility along the equal-acceptance family `a ↦ Φ(a)`.
fn parity_utility_slope(
    d: &FeaturePair,
    v: &ClassifierPayoffs,
    mu: &GroupProfile,
    s: &PopulationState,
    policy: &ThresholdPolicy,
) -> f64 {
    let m = v.matrix();
    (0..mu.len())
        .map(|g| {
            let (phi, sg) = (policy.get(g), s.get(g));
            let q0 = d.pdf(Label::Unqualified, phi);
            let q1 = d.pdf(Label::Qualified, phi);
            let du_dphi = (1.0 - sg) * q0 * (m[0][0] - m[0][1]) + sg * q1 * (m[1][0] - m[1][1]);
            let dacc_dphi = -(sg * q1 + (1.0 - sg) * q0);
            mu.get(g) * du_dphi / dacc_dphi
        })
        .sum()
}

/// Utility-maximizing thresholds under equal per-group acceptance rates.
///
/// The feasible set is parameterized by the common acceptance rate `a`; each
/// `Φ(a)` is found by per-group inversion. A grid over `a` locates the best
/// bracket, and the maximum inside it is refined by bisection on the analytic
/// derivative `du/da`.
pub fn demographic_parity_policy(
    d: &FeaturePair,
    v: &ClassifierPayoffs,
    mu: &GroupProfile,
    s: &PopulationState,
    opts: &DpOptions,
) -> Result<DpSolution> {
    if s.len() != mu.len() {
        return Err(Error::LengthMismatch {
            expected: mu.len(),
            found: s.len(),
        });
    }
    let at = |a: f64| -> Result<(ThresholdPolicy, f64)> {
        let policy = parity_thresholds(d, s, a)?;
        let u = utility(d, v, mu, &policy, s)?;
        Ok((policy, u))
    };
    let points = opts.grid_points.max(2);
    let rates: Vec<f64> = (0..=points + 1).map(|k| k as f64 / (points + 1) as f64).collect();
    let mut best_k = 0;
    let mut best_u = f64::NEG_INFINITY;
    for (k, &a) in rates.iter().enumerate() {
        let (_, u) = at(a)?;
        if u > best_u {
            best_u = u;
            best_k = k;
        }
    }

    let lo_k = best_k.saturating_sub(1);
    let hi_k = (best_k + 1).min(rates.len() - 1);
    let (mut lo, mut hi) = (rates[lo_k], rates[hi_k]);
    let slope_at = |a: f64| -> Result<f64> {
        Ok(parity_utility_slope(d, v, mu, s, &parity_thresholds(d, s, a)?))
    };
    // endpoints of the bracket may be the trivial policies, where the slope is
    // not informative; probe just inside instead
    let inner_lo = if lo == 0.0 { 1e-12 } else { lo };
    let inner_hi = if hi == 1.0 { 1.0 - 1e-12 } else { hi };
    let mut candidate = rates[best_k];
    if slope_at(inner_lo)? > 0.0 && slope_at(inner_hi)? < 0.0 {
        lo = inner_lo;
        hi = inner_hi;
        let mut iterations = 0;
        while hi - lo > opts.rate_tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope_at(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
            if iterations > opts.max_iter {
                return Err(Error::NonConvergence {
                    what: "demographic parity search",
                    iterations,
                });
            }
        }
        candidate = 0.5 * (lo + hi);
    }
    let (mut policy, mut u) = at(candidate)?;
    let mut acceptance = candidate;
    if u < best_u {
        acceptance = rates[best_k];
        (policy, u) = at(acceptance)?;
    }
    let boundary = acceptance <= 0.0 || acceptance >= 1.0;
    Ok(DpSolution {
        policy,
        acceptance,
        utility: u,
        boundary,
    })
}

/// Lowers every threshold by `delta` (negative `delta` is a penalty).
pub fn universal_subsidy(base: &ThresholdPolicy, delta: f64) -> ThresholdPolicy {
    base.shifted(-delta)
}

/// Perturbation that targets only `D_pair = s_pair - s_{pair+1}`: groups up to
/// `pair` move by `α`, the rest by `β`, each scaled by `-ε D_pair / (s_g (1 - s_g))`.
/// Summing over every pair gives [`feedback_control_delta`].
pub fn feedback_control_component(
    mu: &GroupProfile,
    s: &PopulationState,
    pair: usize,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let n = mu.len();
    if s.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: s.len() });
    }
    if pair + 1 >= n {
        return Err(Error::InvalidParameter(format!(
            "pair index {pair} out of range for {n} groups"
        )));
    }
    let beta: f64 = -(0..=pair).map(|k| mu.get(k)).sum::<f64>();
    let alpha = 1.0 + beta;
    let distance = s.distance(pair, pair + 1);
    Ok((0..n)
        .map(|g| {
            let sg = s.get(g);
            if sg == 0.0 || sg == 1.0 {
                return 0.0;
            }
            let weight = if g <= pair { alpha } else { beta };
            -epsilon * distance * weight / (sg * (1.0 - sg))
        })
        .collect())
}

/// Per-group threshold perturbation that contracts every sequential
/// qualification distance while leaving `s̄` unchanged to first order on the
/// stable equilibrium hyperplane.
///
/// `Δφ_g = -ε / (s_g (1 - s_g)) (Σ_{h>=g} α_h D_h + Σ_{h<g} β_h D_h)` with
/// `α_h = μ_{h+1} + ... + μ_n` and `β_h = -(μ_1 + ... + μ_h)`.
pub fn feedback_control_delta(mu: &GroupProfile, s: &PopulationState, epsilon: f64) -> Result<Vec<f64>> {
    let coords = to_coords(mu, s)?;
    let n = mu.len();
    let mut beta = vec![0.0; n - 1];
    let mut below = 0.0;
    for h in 0..n - 1 {
        below += mu.get(h);
        beta[h] = -below;
    }
    // α_h - β_h = 1
    let alpha: Vec<f64> = beta.iter().map(|b| 1.0 + b).collect();
    Ok((0..n)
        .map(|g| {
            let ahead: f64 = (g..n - 1).map(|h| alpha[h] * coords.distances[h]).sum();
            let behind: f64 = (0..g).map(|h| beta[h] * coords.distances[h]).sum();
            let sg = s.get(g);
            // a group at 0 or 1 is fixed whatever its threshold
            if sg == 0.0 || sg == 1.0 {
                return 0.0;
            }
            -epsilon / (sg * (1.0 - sg)) * (ahead + behind)
        })
        .collect())
}

pub fn feedback_control_policy(
    d: &FeaturePair,
    v: &ClassifierPayoffs,
    mu: &GroupProfile,
    s: &PopulationState,
    epsilon: f64,
) -> Result<ThresholdPolicy> {
    let base = group_independent_policy(d, v, mu, s)?;
    base.perturbed(&feedback_control_delta(mu, s, epsilon)?)
}

/// `Σ_g μ_g Pr(Ŷ = 1 | G = g)`.
pub fn global_acceptance(
    d: &FeaturePair,
    mu: &GroupProfile,
    s: &PopulationState,
    policy: &ThresholdPolicy,
) -> f64 {
    (0..mu.len())
        .map(|g| mu.get(g) * acceptance_rate(d, policy.get(g), s.get(g)))
        .sum()
}

/// Shifts `inner` uniformly so that global acceptance does not exceed `cap`.
///
/// Thresholds at `-∞` cannot be shifted; they are first replaced by the
/// lowest finite threshold of `inner` (or `0` when none is finite), which
/// keeps a group-independent policy group-independent.
pub fn capacity_capped(
    d: &FeaturePair,
    mu: &GroupProfile,
    s: &PopulationState,
    inner: &ThresholdPolicy,
    cap: f64,
) -> Result<ThresholdPolicy> {
    if !(cap > 0.0 && cap < 1.0) {
        return Err(Error::InvalidParameter(format!("cap must be in (0, 1), got {cap}")));
    }
    if inner.len() != mu.len() || s.len() != mu.len() {
        return Err(Error::LengthMismatch {
            expected: mu.len(),
            found: inner.len().min(s.len()),
        });
    }
    if global_acceptance(d, mu, s, inner) <= cap {
        return Ok(inner.clone());
    }
    let floor = inner
        .thresholds()
        .iter()
        .copied()
        .filter(|p| p.is_finite())
        .fold(None, |m: Option<f64>, p| Some(m.map_or(p, |m| m.min(p))))
        .unwrap_or(0.0);
    let base = ThresholdPolicy::new(
        inner
            .thresholds()
            .iter()
            .map(|&p| if p == f64::NEG_INFINITY { floor } else { p })
            .collect(),
    )?;
    let excess = |shift: f64| global_acceptance(d, mu, s, &base.shifted(shift)) - cap;
    let step = d.scale();
    let (mut lo, mut hi) = (-step, step);
    let mut iterations = 0;
    while excess(lo) < 0.0 {
        lo *= 2.0;
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NonConvergence {
                what: "capacity cap bracket",
                iterations,
            });
        }
    }
    while excess(hi) > 0.0 {
        hi *= 2.0;
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NonConvergence {
                what: "capacity cap bracket",
                iterations,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // hi keeps acceptance at or below the cap
    Ok(base.shifted(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings;

    fn d() -> FeaturePair {
        FeaturePair::standard()
    }

    fn two(s1: f64, s2: f64) -> (GroupProfile, PopulationState) {
        (
            GroupProfile::equal(2).unwrap(),
            PopulationState::new(vec![s1, s2]).unwrap(),
        )
    }

    #[test]
    fn group_independent_examples() {
        let id = ClassifierPayoffs::new([[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let (mu, s) = two(0.7, 0.3);
        let p = group_independent_policy(&d(), &id, &mu, &s).unwrap();
        assert_eq!(p.thresholds(), &[0.0, 0.0]);
        assert!(p.is_uniform());
    }

    #[test]
    fn laissez_faire_examples() {
        let v = settings::setting1_payoffs();
        let (mu, s) = two(0.6, 0.4);
        let p = laissez_faire_policy(&d(), &v, &mu, &s).unwrap();
        assert!((p.get(0) - (-0.314_304_329_711_187)).abs() < 1e-14);
        assert!((p.get(1) - 0.091_160_778_396_977_3).abs() < 1e-14);
        assert!(p.get(0) < p.get(1));

        let (mu, s) = two(0.45, 0.45);
        assert_eq!(
            laissez_faire_policy(&d(), &v, &mu, &s).unwrap(),
            group_independent_policy(&d(), &v, &mu, &s).unwrap()
        );
    }

    #[test]
    fn threshold_for_acceptance_inverts() {
        for s in [0.0, 0.1, 0.5, 0.93, 1.0] {
            for a in [1e-6, 0.02, 0.3, 0.5, 0.77, 0.999_999] {
                let phi = threshold_for_acceptance(&d(), s, a).unwrap();
                assert!((acceptance_rate(&d(), phi, s) - a).abs() < 1e-13, "s={s} a={a}");
            }
        }
        assert_eq!(threshold_for_acceptance(&d(), 0.5, 1.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(threshold_for_acceptance(&d(), 0.5, 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn dp_with_equal_rates_matches_group_independent() {
        let v = settings::setting1_payoffs();
        let (mu, s) = two(0.55, 0.55);
        let dp = demographic_parity_policy(&d(), &v, &mu, &s, &DpOptions::default()).unwrap();
        let gi = group_independent_policy(&d(), &v, &mu, &s).unwrap();
        assert!(!dp.boundary);
        assert_eq!(dp.policy.get(0), dp.policy.get(1));
        assert!((dp.policy.get(0) - gi.get(0)).abs() < 1e-8, "{:?} vs {:?}", dp.policy, gi);
    }

    #[test]
    fn dp_equalizes_acceptance_and_moves_thresholds_in_opposite_directions() {
        let v = settings::setting1_payoffs();
        let (mu, s) = two(0.6, 0.4);
        let dp = demographic_parity_policy(&d(), &v, &mu, &s, &DpOptions::default()).unwrap();
        let a0 = acceptance_rate(&d(), dp.policy.get(0), 0.6);
        let a1 = acceptance_rate(&d(), dp.policy.get(1), 0.4);
        assert!((a0 - a1).abs() < 1e-9);
        let lz = laissez_faire_policy(&d(), &v, &mu, &s).unwrap();
        let c0 = dp.policy.get(0) - lz.get(0);
        let c1 = dp.policy.get(1) - lz.get(1);
        assert!(c0 * c1 < 0.0, "changes {c0} {c1}");
    }

    #[test]
    fn subsidy_shifts_down() {
        let p = ThresholdPolicy::new(vec![0.2, -0.1]).unwrap();
        assert_eq!(universal_subsidy(&p, 0.0), p);
        let q = universal_subsidy(&p, 0.1);
        assert!((q.get(0) - 0.1).abs() < 1e-15 && (q.get(1) + 0.2).abs() < 1e-15);
    }

    #[test]
    fn feedback_delta_examples() {
        let (mu, s) = two(0.6, 0.4);
        let delta = feedback_control_delta(&mu, &s, 0.01).unwrap();
        let expect = 0.01 * 0.5 * 0.2 / (0.6 * 0.4);
        assert!((delta[0] + expect).abs() < 1e-15);
        assert!((delta[1] - expect).abs() < 1e-15);

        let (mu, s) = two(0.3, 0.3);
        assert!(feedback_control_delta(&mu, &s, 0.05).unwrap().iter().all(|&x| x == 0.0));
        let v = settings::setting1_payoffs();
        assert_eq!(
            feedback_control_policy(&d(), &v, &mu, &s, 0.05).unwrap(),
            group_independent_policy(&d(), &v, &mu, &s).unwrap()
        );
    }

    #[test]
    fn feedback_components_compose() {
        let mu = GroupProfile::new(vec![0.2, 0.3, 0.5]).unwrap();
        let s = PopulationState::new(vec![0.7, 0.5, 0.2]).unwrap();
        let total = feedback_control_delta(&mu, &s, 0.03).unwrap();
        let parts: Vec<Vec<f64>> = (0..2)
            .map(|g| feedback_control_component(&mu, &s, g, 0.03).unwrap())
            .collect();
        for g in 0..3 {
            assert!((parts[0][g] + parts[1][g] - total[g]).abs() < 1e-15);
        }
        assert!(feedback_control_component(&mu, &s, 2, 0.03).is_err());
    }

    #[test]
    fn feedback_leaves_boundary_groups_alone() {
        let mu = GroupProfile::equal(2).unwrap();
        let s = PopulationState::with_boundary(vec![1.0, 0.4]).unwrap();
        let delta = feedback_control_delta(&mu, &s, 0.05).unwrap();
        assert_eq!(delta[0], 0.0);
        assert!(delta[1] > 0.0);
    }

    #[test]
    fn subsidy_composes_with_inner_policy() {
        let v = settings::setting1_payoffs();
        let (mu, s) = two(0.6, 0.4);
        let fc = InterventionSpec::FeedbackControl { epsilon: 0.05 };
        let spec = InterventionSpec::UniversalSubsidy { delta: 0.2, inner: Some(Box::new(fc.clone())) };
        let base = fc.policy(&d(), &v, &mu, &s).unwrap();
        let shifted = spec.policy(&d(), &v, &mu, &s).unwrap();
        for g in 0..2 {
            assert!((base.get(g) - shifted.get(g) - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn capacity_cap_examples() {
        let (mu, s) = two(0.5, 0.3);
        let strict = ThresholdPolicy::uniform(2, 1.5);
        assert!(global_acceptance(&d(), &mu, &s, &strict) < 0.6);
        assert_eq!(capacity_capped(&d(), &mu, &s, &strict, 0.6).unwrap(), strict);

        let all = ThresholdPolicy::uniform(2, f64::NEG_INFINITY);
        let capped = capacity_capped(&d(), &mu, &s, &all, 0.6).unwrap();
        assert!((global_acceptance(&d(), &mu, &s, &capped) - 0.6).abs() < 1e-9);
        assert!(capped.is_uniform());

        let gi = ThresholdPolicy::uniform(2, -0.8);
        let capped = capacity_capped(&d(), &mu, &s, &gi, 0.3).unwrap();
        assert!(capped.is_uniform());
        assert!((global_acceptance(&d(), &mu, &s, &capped) - 0.3).abs() < 1e-9);
        assert!(capacity_capped(&d(), &mu, &s, &gi, 1.0).is_err());
    }

    #[test]
    fn spec_validation_and_labels() {
        let fc = InterventionSpec::FeedbackControl { epsilon: f64::NAN };
        assert!(fc.validate().is_err());
        let cc = InterventionSpec::CapacityCapped {
            cap: 0.6,
            inner: Box::new(InterventionSpec::GroupIndependent),
        };
        assert!(cc.validate().is_ok());
        assert_eq!(cc.label(), "capacity_capped(cap=0.6,group_independent)");
    }
}
