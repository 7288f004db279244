use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{GameError, Result};
use crate::numeric::integrate;

const PANELS: usize = 2;

fn std_cdf(z: f64) -> f64 {
    Normal::standard().cdf(z)
}

fn std_pdf(z: f64) -> f64 {
    Normal::standard().pdf(z)
}

/// Prior density of the state over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorDensity {
    Uniform,
    /// Tilted uniform: f(θ) = (1 + slope·s)/(hi − lo) with s running from −1 at `lo` to 1 at `hi`.
    Linear {
        slope: f64,
    },
    /// Normal(mean, sd) truncated to the interval.
    TruncatedNormal {
        mean: f64,
        sd: f64,
    },
}

/// A prior density bound to its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prior {
    pub lo: f64,
    pub hi: f64,
    pub density: PriorDensity,
    normaliser: f64,
}

impl Prior {
    pub fn new(lo: f64, hi: f64, density: PriorDensity) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GameError::InvalidParameter(format!(
                "state interval [{lo}, {hi}] must be finite and non-empty"
            )));
        }
        let normaliser = match density {
            PriorDensity::Uniform => 1.0,
            PriorDensity::Linear { slope } => {
                if !(slope.is_finite() && slope.abs() < 1.0) {
                    return Err(GameError::InvalidParameter(format!(
                        "linear prior slope must lie in (-1, 1), got {slope}"
                    )));
                }
                1.0
            }
            PriorDensity::TruncatedNormal { mean, sd } => {
                let n = Normal::new(mean, sd).map_err(|e| {
                    GameError::InvalidParameter(format!("truncated normal prior: {e}"))
                })?;
                let z = n.cdf(hi) - n.cdf(lo);
                if !(z > 0.0) {
                    return Err(GameError::InvalidParameter(
                        "truncated normal prior has no mass on the interval".into(),
                    ));
                }
                z
            }
        };
        let prior = Self {
            lo,
            hi,
            density,
            normaliser,
        };
        let total = prior.mass(lo, hi);
        if (total - 1.0).abs() > 1e-9 {
            return Err(GameError::InvalidParameter(format!(
                "prior integrates to {total}, not 1"
            )));
        }
        Ok(prior)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, PriorDensity::Uniform)
    }

    pub fn pdf(&self, theta: f64) -> f64 {
        if theta < self.lo || theta > self.hi {
            return 0.0;
        }
        let width = self.hi - self.lo;
        match self.density {
            PriorDensity::Uniform => 1.0 / width,
            PriorDensity::Linear { slope } => {
                let s = (2.0 * theta - self.lo - self.hi) / width;
                (1.0 + slope * s) / width
            }
            PriorDensity::TruncatedNormal { mean, sd } => {
                Normal::new(mean, sd).map(|n| n.pdf(theta)).unwrap_or(0.0) / self.normaliser
            }
        }
    }

    /// Probability of `[a, b]`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(self.lo), b.min(self.hi));
        if b <= a {
            return 0.0;
        }
        match self.density {
            PriorDensity::Uniform => (b - a) / (self.hi - self.lo),
            PriorDensity::Linear { .. } => integrate(|t| self.pdf(t), a, b, 1),
            PriorDensity::TruncatedNormal { mean, sd } => {
                let (za, zb) = ((a - mean) / sd, (b - mean) / sd);
                (std_cdf(zb) - std_cdf(za)) / self.normaliser
            }
        }
    }

    /// E[θ | θ ∈ [a, b]]; the midpoint of a degenerate interval.
    pub fn conditional_mean(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(self.lo), b.min(self.hi));
        if b <= a {
            return a;
        }
        match self.density {
            PriorDensity::Uniform => 0.5 * (a + b),
            PriorDensity::TruncatedNormal { mean, sd } => {
                let (za, zb) = ((a - mean) / sd, (b - mean) / sd);
                let z = std_cdf(zb) - std_cdf(za);
                if z <= 0.0 {
                    return 0.5 * (a + b);
                }
                (mean + sd * (std_pdf(za) - std_pdf(zb)) / z).clamp(a, b)
            }
            PriorDensity::Linear { .. } => {
                let m = self.mass(a, b);
                if m <= 0.0 {
                    return 0.5 * (a + b);
                }
                (integrate(|t| t * self.pdf(t), a, b, PANELS) / m).clamp(a, b)
            }
        }
    }

    /// Var[θ | θ ∈ [a, b]].
    pub fn conditional_variance(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(self.lo), b.min(self.hi));
        if b <= a {
            return 0.0;
        }
        match self.density {
            PriorDensity::Uniform => (b - a).powi(2) / 12.0,
            PriorDensity::TruncatedNormal { sd, mean } => {
                let (za, zb) = ((a - mean) / sd, (b - mean) / sd);
                let z = std_cdf(zb) - std_cdf(za);
                if z <= 0.0 {
                    return 0.0;
                }
                let shift = (std_pdf(za) - std_pdf(zb)) / z;
                let tilt = (za * std_pdf(za) - zb * std_pdf(zb)) / z;
                (sd * sd * (1.0 + tilt - shift * shift)).max(0.0)
            }
            PriorDensity::Linear { .. } => {
                let m = self.mass(a, b);
                if m <= 0.0 {
                    return 0.0;
                }
                let mu = self.conditional_mean(a, b);
                integrate(|t| (t - mu).powi(2) * self.pdf(t), a, b, PANELS) / m
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_families_normalise() {
        for d in [
            PriorDensity::Uniform,
            PriorDensity::Linear { slope: 0.6 },
            PriorDensity::TruncatedNormal { mean: 0.3, sd: 0.2 },
        ] {
            let p = Prior::new(0.0, 2.0, d).unwrap();
            assert!((p.mass(0.0, 2.0) - 1.0).abs() < 1e-12);
            assert!(p.pdf(1.3) > 0.0);
        }
    }

    #[test]
    fn rejects_bad_priors() {
        assert!(Prior::new(1.0, 0.0, PriorDensity::Uniform).is_err());
        assert!(Prior::new(0.0, 1.0, PriorDensity::Linear { slope: 1.5 }).is_err());
        assert!(Prior::new(
            0.0,
            1.0,
            PriorDensity::TruncatedNormal {
                mean: 0.0,
                sd: -1.0
            }
        )
        .is_err());
    }

    #[test]
    fn linear_prior_moments() {
        // f(θ) = 1 + 0.5(2θ − 1) = 0.5 + θ on [0, 1]
        let p = Prior::new(0.0, 1.0, PriorDensity::Linear { slope: 0.5 }).unwrap();
        let mean = 0.5 * 0.5 + 1.0 / 3.0;
        assert!((p.conditional_mean(0.0, 1.0) - mean).abs() < 1e-14);
        assert!((p.mass(0.0, 0.5) - (0.25 + 0.125)).abs() < 1e-14);
    }

    #[test]
    fn truncated_normal_moments_match_quadrature() {
        let p = Prior::new(
            0.0,
            2.0,
            PriorDensity::TruncatedNormal { mean: 0.3, sd: 0.2 },
        )
        .unwrap();
        let (a, b) = (0.1, 0.9);
        let m = integrate(|t| p.pdf(t), a, b, 64);
        let mean = integrate(|t| t * p.pdf(t), a, b, 64) / m;
        let var = integrate(|t| (t - mean).powi(2) * p.pdf(t), a, b, 64) / m;
        assert!((p.mass(a, b) - m).abs() < 1e-10);
        assert!((p.conditional_mean(a, b) - mean).abs() < 1e-10);
        assert!((p.conditional_variance(a, b) - var).abs() < 1e-10);
    }

    #[test]
    fn uniform_moments() {
        let p = Prior::uniform(0.0, 1.0).unwrap();
        assert_eq!(p.conditional_mean(0.2, 0.6), 0.4);
        assert!((p.conditional_variance(0.2, 0.6) - 0.16 / 12.0).abs() < 1e-15);
    }
}
