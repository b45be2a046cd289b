//! Label-conditioned feature distributions.
//!
//! A [`FeaturePair`] holds the two densities `q_0` (unqualified agents) and
//! `q_1` (qualified agents) over a scalar feature. Everything downstream only
//! touches the pair through [`FeaturePair::pdf`], [`FeaturePair::cdf`],
//! [`FeaturePair::likelihood_ratio`] and
//! [`FeaturePair::inverse_likelihood_ratio`], so adding another family with a
//! monotone likelihood ratio only requires filling in those four.
//!
//! Thresholds are extended reals: `f64::INFINITY` and `f64::NEG_INFINITY` are
//! valid inputs to [`FeaturePair::cdf`] and valid outputs of the ratio
//! inversion.

use serde::Serialize;
use libm::erfc;

use crate::error::{Error, Result};

/// True label of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Unqualified,
    Qualified,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Unqualified, Label::Qualified];

    pub fn index(self) -> usize {
        match self {
            Label::Unqualified => 0,
            Label::Qualified => 1,
        }
    }
}

/// Distribution family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FeatureFamily {
    /// Two normals sharing a standard deviation.
    Gaussian { mean0: f64, mean1: f64, sigma: f64 },
}

/// Bracket expansion and bisection budget for the generic ratio inversion.
pub const INVERSION_MAX_ITER: usize = 200;
/// Absolute bracket width at which the generic ratio inversion stops.
pub const INVERSION_TOL: f64 = 1e-12;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeaturePair {
    #[serde(flatten)]
    family: FeatureFamily,
}

impl FeaturePair {
    /// Gaussian pair `N(mean0, sigma^2)`, `N(mean1, sigma^2)`.
    ///
    /// Only the parameters themselves are checked here. A pair with
    /// `mean1 <= mean0` is constructible (so it can be inspected with
    /// [`FeaturePair::validate_mlr`]) but [`FeaturePair::has_mlr`] reports it
    /// and scenarios refuse it.
    pub fn gaussian(mean0: f64, mean1: f64, sigma: f64) -> Result<Self> {
        if !(mean0.is_finite() && mean1.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "means must be finite, got ({mean0}, {mean1})"
            )));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self {
            family: FeatureFamily::Gaussian {
                mean0,
                mean1,
                sigma,
            },
        })
    }

    /// The Gaussian pair used throughout the reference settings: means -1 and 1, unit variance.
    pub fn standard() -> Self {
        Self::gaussian(-1.0, 1.0, 1.0).expect("valid parameters")
    }

    pub fn family(&self) -> FeatureFamily {
        self.family
    }

    /// Characteristic length of the feature axis (used to size search brackets).
    pub fn scale(&self) -> f64 {
        match self.family {
            FeatureFamily::Gaussian { sigma, .. } => sigma,
        }
    }

    /// Whether `q_1 / q_0` is strictly increasing over the whole real line.
    pub fn has_mlr(&self) -> bool {
        match self.family {
            FeatureFamily::Gaussian { mean0, mean1, .. } => mean1 > mean0,
        }
    }

    /// Density `q_y(x)`.
    pub fn pdf(&self, y: Label, x: f64) -> f64 {
        match self.family {
            FeatureFamily::Gaussian {
                mean0,
                mean1,
                sigma,
            } => {
                let mean = if y == Label::Qualified { mean1 } else { mean0 };
                let z = (x - mean) / sigma;
                FRAC_1_SQRT_2PI / sigma * (-0.5 * z * z).exp()
            }
        }
    }

    /// Cumulative distribution `Q_y(x) = Pr(X <= x | Y = y)`; accepts `x = ±∞`.
    pub fn cdf(&self, y: Label, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        match self.family {
            FeatureFamily::Gaussian {
                mean0,
                mean1,
                sigma,
            } => {
                let mean = if y == Label::Qualified { mean1 } else { mean0 };
                0.5 * erfc(-(x - mean) / (sigma * std::f64::consts::SQRT_2))
            }
        }
    }

    /// `ln(q_1(x) / q_0(x))`.
    pub fn log_likelihood_ratio(&self, x: f64) -> f64 {
        match self.family {
            FeatureFamily::Gaussian {
                mean0,
                mean1,
                sigma,
            } => (mean1 - mean0) * (2.0 * x - mean0 - mean1) / (2.0 * sigma * sigma),
        }
    }

    /// `q_1(x) / q_0(x)`.
    pub fn likelihood_ratio(&self, x: f64) -> f64 {
        self.log_likelihood_ratio(x).exp()
    }

    /// Derivative of the likelihood ratio with respect to `x`.
    pub fn likelihood_ratio_derivative(&self, x: f64) -> f64 {
        match self.family {
            FeatureFamily::Gaussian {
                mean0,
                mean1,
                sigma,
            } => self.likelihood_ratio(x) * (mean1 - mean0) / (sigma * sigma),
        }
    }

    /// Infimum and supremum of the likelihood ratio over the real line.
    pub fn ratio_range(&self) -> (f64, f64) {
        match self.family {
            FeatureFamily::Gaussian { .. } => (0.0, f64::INFINITY),
        }
    }

    /// The feature value at which `q_1 / q_0 = r`.
    ///
    /// `r` may be `0` or `+∞`; ratios at or beyond the ends of
    /// [`FeaturePair::ratio_range`] map to `-∞` and `+∞` respectively.
    pub fn inverse_likelihood_ratio(&self, r: f64) -> Result<f64> {
        self.check_ratio_argument(r)?;
        let (inf, sup) = self.ratio_range();
        if r <= inf {
            return Ok(f64::NEG_INFINITY);
        }
        if r >= sup {
            return Ok(f64::INFINITY);
        }
        match self.family {
            FeatureFamily::Gaussian {
                mean0,
                mean1,
                sigma,
            } => Ok(0.5 * (mean0 + mean1) + sigma * sigma * r.ln() / (mean1 - mean0)),
        }
    }

    /// Ratio inversion by bracketed bisection on the log ratio.
    ///
    /// This is the fallback for families without a closed-form inverse; for the
    /// Gaussian family it exists so the two routes can be checked against each
    /// other.
    pub fn inverse_likelihood_ratio_bisect(&self, r: f64) -> Result<f64> {
        self.check_ratio_argument(r)?;
        let (inf, sup) = self.ratio_range();
        if r <= inf {
            return Ok(f64::NEG_INFINITY);
        }
        if r >= sup {
            return Ok(f64::INFINITY);
        }
        invert_increasing(|x| self.log_likelihood_ratio(x), r.ln())
    }

    /// True iff the likelihood ratio strictly increases along `grid`.
    pub fn validate_mlr(&self, grid: &[f64]) -> Result<bool> {
        if grid.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least two points, got {}",
                grid.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
        }
        let ratios: Vec<f64> = grid.iter().map(|&x| self.likelihood_ratio(x)).collect();
        Ok(ratios.windows(2).all(|w| w[0] < w[1]))
    }

    fn check_ratio_argument(&self, r: f64) -> Result<()> {
        if !self.has_mlr() {
            return Err(Error::InvalidDistribution(
                "likelihood ratio is not strictly increasing; cannot invert".into(),
            ));
        }
        if r.is_nan() || r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "likelihood ratio target must be nonnegative, got {r}"
            )));
        }
        Ok(())
    }
}

/// Solves `f(x) = target` for a strictly increasing `f` whose range contains
/// `target`: the bracket doubles outward from `x = 0`, then bisects to
/// [`INVERSION_TOL`].
pub fn invert_increasing(f: impl Fn(f64) -> f64, target: f64) -> Result<f64> {
    let mut iterations = 0;
    let (mut lo, mut hi);
    let f0 = f(0.0);
    if f0 == target {
        return Ok(0.0);
    }
    if f0 < target {
        lo = 0.0;
        hi = 1.0;
        while f(hi) < target {
            lo = hi;
            hi *= 2.0;
            iterations += 1;
            if iterations >= INVERSION_MAX_ITER {
                return Err(Error::NonConvergence {
                    what: "likelihood ratio bracket",
                    iterations,
                });
            }
        }
    } else {
        hi = 0.0;
        lo = -1.0;
        while f(lo) > target {
            hi = lo;
            lo *= 2.0;
            iterations += 1;
            if iterations >= INVERSION_MAX_ITER {
                return Err(Error::NonConvergence {
                    what: "likelihood ratio bracket",
                    iterations,
                });
            }
        }
    }
    while hi - lo > INVERSION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations >= INVERSION_MAX_ITER {
            return Err(Error::NonConvergence {
                what: "likelihood ratio bisection",
                iterations,
            });
        }
    }
    Ok(0.5 * (lo + hi))
}
