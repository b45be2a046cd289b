//! Population state and the (D, s̄) coordinate system.
//!
//! `D` holds the sequential qualification distances `s_g - s_{g+1}`; together
//! with the mean qualification rate `s̄ = <mu, s>` it is a (non-orthogonal)
//! basis for the state space.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative group sizes `mu_g = Pr(G = g)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupProfile(Vec<f64>);

impl GroupProfile {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(mu: Vec<f64>) -> Result<Self> {
        if mu.len() < 2 {
            return Err(Error::InvalidGroups(format!(
                "need at least two groups, got {}",
                mu.len()
            )));
        }
        if let Some((g, m)) = mu.iter().enumerate().find(|(_, &m)| !(m > 0.0 && m < 1.0)) {
            return Err(Error::InvalidGroups(format!("mu[{g}] = {m} is not in (0, 1)")));
        }
        let total: f64 = mu.iter().sum();
        if (total - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidGroups(format!("sizes sum to {total}, not 1")));
        }
        Ok(Self(mu))
    }

    /// `n` groups of equal size.
    pub fn equal(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, g: usize) -> f64 {
        self.0[g]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Mean qualification rate `<mu, s>`.
    pub fn mean(&self, s: &PopulationState) -> Result<f64> {
        mean_qualification(self, s)
    }
}

/// Per-group qualification rates `s_g = Pr(Y = 1 | G = g)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationState(Vec<f64>);

impl PopulationState {
    /// Interior state: every rate strictly inside `(0, 1)`.
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidState("empty state".into()));
        }
        if let Some((g, &v)) = s.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v < 1.0)) {
            return Err(Error::InvalidState(format!(
                "s[{g}] = {v} is not strictly inside (0, 1)"
            )));
        }
        Ok(Self(s))
    }

    /// State that may sit on the boundary of the unit cube, e.g. a trivial
    /// equilibrium with every `s_g` in `{0, 1}`.
    pub fn with_boundary(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidState("empty state".into()));
        }
        if let Some((index, &value)) = s.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutOfSimplex { index, value });
        }
        Ok(Self(s))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, g: usize) -> f64 {
        self.0[g]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0 && v < 1.0)
    }

    /// Every rate is exactly 0 or 1.
    pub fn is_vertex(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// `delta(g, h) = s_g - s_h`.
    pub fn distance(&self, g: usize, h: usize) -> f64 {
        self.0[g] - self.0[h]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// State in `(D, s̄)` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordState {
    /// `D_g = s_g - s_{g+1}` for `g = 0..n-1`.
    pub distances: Vec<f64>,
    pub s_bar: f64,
}

impl CoordState {
    /// Flattened as `(D_1, ..., D_{n-1}, s̄)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut r = self.distances.clone();
        r.push(self.s_bar);
        r
    }

    pub fn from_slice(r: &[f64]) -> Result<Self> {
        let (s_bar, distances) = r
            .split_last()
            .ok_or_else(|| Error::InvalidState("empty coordinate vector".into()))?;
        Ok(Self {
            distances: distances.to_vec(),
            s_bar: *s_bar,
        })
    }
}

fn check_len(mu: &GroupProfile, found: usize) -> Result<()> {
    if mu.len() != found {
        return Err(Error::LengthMismatch {
            expected: mu.len(),
            found,
        });
    }
    Ok(())
}

pub fn mean_qualification(mu: &GroupProfile, s: &PopulationState) -> Result<f64> {
    check_len(mu, s.len())?;
    Ok(mu.0.iter().zip(&s.0).map(|(m, v)| m * v).sum())
}

pub fn to_coords(mu: &GroupProfile, s: &PopulationState) -> Result<CoordState> {
    let s_bar = mean_qualification(mu, s)?;
    Ok(CoordState {
        distances: s.0.windows(2).map(|w| w[0] - w[1]).collect(),
        s_bar,
    })
}

/// Inverse of [`to_coords`]:
/// `s_g = s̄ + Σ_{h>=g} D_h - Σ_h (mu_1 + ... + mu_h) D_h`.
pub fn from_coords(mu: &GroupProfile, c: &CoordState) -> Result<PopulationState> {
    check_len(mu, c.distances.len() + 1)?;
    let mut cumulative = 0.0;
    let offset: f64 = c
        .distances
        .iter()
        .enumerate()
        .map(|(h, d)| {
            cumulative += mu.get(h);
            cumulative * d
        })
        .sum();
    let n = mu.len();
    // tail[g] = Σ_{h >= g} D_h
    let mut tail = vec![0.0; n];
    for g in (0..n - 1).rev() {
        tail[g] = tail[g + 1] + c.distances[g];
    }
    let s = tail.iter().map(|t| c.s_bar + t - offset).collect();
    PopulationState::with_boundary(s)
}

/// `(Σ |D_g|^p)^(1/p)` for `p >= 1`; `p = ∞` gives the max norm.
pub fn disparity_norm(distances: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidNorm(p));
    }
    let largest = distances.iter().fold(0.0, |m: f64, d| m.max(d.abs()));
    if p == f64::INFINITY || largest == 0.0 {
        return Ok(largest);
    }
    if p == 1.0 {
        return Ok(distances.iter().map(|d| d.abs()).sum());
    }
    // scaled by the largest entry so tiny distances do not underflow
    let sum: f64 = distances.iter().map(|d| (d.abs() / largest).powf(p)).sum();
    Ok(largest * sum.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mu(v: &[f64]) -> GroupProfile {
        GroupProfile::new(v.to_vec()).unwrap()
    }

    fn st(v: &[f64]) -> PopulationState {
        PopulationState::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mean_qualification_examples() {
        assert_eq!(mean_qualification(&mu(&[0.5, 0.5]), &st(&[0.6, 0.4])).unwrap(), 0.5);
        assert!((mean_qualification(&mu(&[0.7, 0.3]), &st(&[0.6, 0.4])).unwrap() - 0.54).abs() < 1e-15);
        assert!(
            (mean_qualification(&mu(&[0.5, 0.3, 0.2]), &st(&[0.1, 0.5, 0.9])).unwrap() - 0.38).abs()
                < 1e-15
        );
        assert!(matches!(
            mean_qualification(&mu(&[0.5, 0.5]), &st(&[0.1, 0.2, 0.3])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn to_coords_examples() {
        let c = to_coords(&mu(&[0.5, 0.5]), &st(&[0.6, 0.4])).unwrap();
        assert!((c.distances[0] - 0.2).abs() < 1e-15);
        assert_eq!(c.s_bar, 0.5);

        let c = to_coords(&mu(&[0.2, 0.3, 0.5]), &st(&[0.3, 0.3, 0.3])).unwrap();
        assert_eq!(c.distances, vec![0.0, 0.0]);
        assert!((c.s_bar - 0.3).abs() < 1e-15);

        let third = 1.0 / 3.0;
        let c = to_coords(
            &GroupProfile::new(vec![third, third, 1.0 - 2.0 * third]).unwrap(),
            &st(&[0.1, 0.5, 0.9]),
        )
        .unwrap();
        assert!((c.distances[0] + 0.4).abs() < 1e-15);
        assert!((c.distances[1] + 0.4).abs() < 1e-15);
        assert!((c.s_bar - 0.5).abs() < 1e-15);
    }

    #[test]
    fn from_coords_examples() {
        let s = from_coords(
            &mu(&[0.5, 0.5]),
            &CoordState {
                distances: vec![0.2],
                s_bar: 0.5,
            },
        )
        .unwrap();
        assert!((s.get(0) - 0.6).abs() < 1e-15 && (s.get(1) - 0.4).abs() < 1e-15);

        let s = from_coords(
            &mu(&[0.2, 0.3, 0.5]),
            &CoordState {
                distances: vec![0.0, 0.0],
                s_bar: 0.42,
            },
        )
        .unwrap();
        assert!(s.as_slice().iter().all(|&v| v == 0.42));

        let s = from_coords(
            &mu(&[0.9, 0.1]),
            &CoordState {
                distances: vec![0.2],
                s_bar: 0.5,
            },
        )
        .unwrap();
        assert!((s.get(0) - 0.52).abs() < 1e-15 && (s.get(1) - 0.32).abs() < 1e-15);
    }

    #[test]
    fn from_coords_rejects_points_outside_the_cube() {
        let err = from_coords(
            &mu(&[0.5, 0.5]),
            &CoordState {
                distances: vec![1.5],
                s_bar: 0.5,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::OutOfSimplex { .. }));
    }

    #[test]
    fn disparity_norm_examples() {
        assert!((disparity_norm(&[0.2], 1.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((disparity_norm(&[0.3, -0.4], 2.0).unwrap() - 0.5).abs() < 1e-15);
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert_eq!(disparity_norm(&[0.0, 0.0, 0.0], p).unwrap(), 0.0);
        }
        assert!(matches!(disparity_norm(&[0.1], 0.5), Err(Error::InvalidNorm(_))));
    }

    #[test]
    fn group_profile_validation() {
        assert!(GroupProfile::new(vec![1.0]).is_err());
        assert!(GroupProfile::new(vec![0.6, 0.6]).is_err());
        assert!(GroupProfile::new(vec![0.0, 1.0]).is_err());
        assert!(GroupProfile::equal(4).is_ok());
    }

    #[test]
    fn state_constructors() {
        assert!(PopulationState::new(vec![0.0, 0.5]).is_err());
        let v = PopulationState::with_boundary(vec![0.0, 1.0]).unwrap();
        assert!(v.is_vertex() && !v.is_interior());
        assert!(PopulationState::with_boundary(vec![1.2, 0.5]).is_err());
    }

    fn profile_and_state() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..=6).prop_flat_map(|n| {
            (
                prop::collection::vec(0.05f64..1.0, n),
                prop::collection::vec(0.01f64..0.99, n),
            )
        })
    }

    fn normalize(w: Vec<f64>) -> GroupProfile {
        let total: f64 = w.iter().sum();
        let mut mu: Vec<f64> = w.iter().map(|x| x / total).collect();
        let head: f64 = mu[..mu.len() - 1].iter().sum();
        *mu.last_mut().unwrap() = 1.0 - head;
        GroupProfile::new(mu).unwrap()
    }

    proptest! {
        #[test]
        fn coords_round_trip((w, s) in profile_and_state()) {
            let mu = normalize(w);
            let s = PopulationState::new(s).unwrap();
            let back = from_coords(&mu, &to_coords(&mu, &s).unwrap()).unwrap();
            for (a, b) in s.as_slice().iter().zip(back.as_slice()) {
                prop_assert!((a - b).abs() < 1e-14, "{} vs {}", a, b);
            }
        }

        #[test]
        fn fixed_mean_states_lie_on_one_hyperplane(
            (w, _s) in profile_and_state(),
            s_bar in 0.3f64..0.7,
            scale in -0.05f64..0.05,
        ) {
            let mu = normalize(w);
            let n = mu.len();
            let distances: Vec<f64> = (0..n - 1).map(|h| scale * (h as f64 + 1.0) / n as f64).collect();
            let s = from_coords(&mu, &CoordState { distances, s_bar }).unwrap();
            prop_assert!((mu.mean(&s).unwrap() - s_bar).abs() < 1e-14);
        }

        #[test]
        fn disparity_norm_vanishes_only_at_zero(
            d in prop::collection::vec(-1.0f64..1.0, 1..6),
            p in 1.0f64..8.0,
        ) {
            let norm = disparity_norm(&d, p).unwrap();
            prop_assert_eq!(norm == 0.0, d.iter().all(|&x| x == 0.0));
        }
    }
}
