//! Effort, cost and contest-success primitives shared by every solver.
//!
//! All quantities are in "utility units"; the prize sets the scale.

use crate::error::{Error, Result};
use crate::math::{abs, powf};

/// Convex sabotage cost `c(s) = s^a / m` with `a > 1`, `m > 0`.
///
/// The power family gives `c(0) = c'(0) = 0`, a strictly increasing
/// marginal cost and a closed-form inverse marginal.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CostSpec {
    pub exponent: f64,
    pub divisor: f64,
}

impl CostSpec {
    pub fn new(exponent: f64, divisor: f64) -> Result<Self> {
        let spec = CostSpec { exponent, divisor };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exponent.is_finite() && self.exponent > 1.0) {
            return Err(Error::domain("cost exponent must be finite and > 1"));
        }
        if !(self.divisor.is_finite() && self.divisor > 0.0) {
            return Err(Error::domain("cost divisor must be finite and > 0"));
        }
        Ok(())
    }

    /// `c(s)`; the caller guarantees `s >= 0`.
    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        powf(s, self.exponent) / self.divisor
    }

    /// `c'(s)`.
    #[inline]
    pub fn marginal(&self, s: f64) -> f64 {
        self.exponent * powf(s, self.exponent - 1.0) / self.divisor
    }

    /// `c''(s)`.
    #[inline]
    pub fn curvature(&self, s: f64) -> f64 {
        self.exponent * (self.exponent - 1.0) * powf(s, self.exponent - 2.0) / self.divisor
    }

    /// `c'^{-1}(y)`; the caller guarantees `y >= 0`.
    #[inline]
    pub fn marginal_inverse(&self, y: f64) -> f64 {
        powf(
            self.divisor * y / self.exponent,
            1.0 / (self.exponent - 1.0),
        )
    }
}

/// Contest success function.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum CsfSpec {
    /// Ratio form `b_i^r / (b_i^r + b_j^r)`, `0 < r <= 1`, with ½ when both efforts are zero.
    Tullock { r: f64 },
    /// Performance `f(b) + ε` with `f(b) = b^β` and `ε ~ U[-a, a]` i.i.d.,
    /// so the noise difference is triangular on `[-2a, 2a]`.
    ProbitUniform { half_width: f64, f_exponent: f64 },
}

impl CsfSpec {
    pub fn tullock(r: f64) -> Result<Self> {
        let csf = CsfSpec::Tullock { r };
        csf.validate()?;
        Ok(csf)
    }

    pub fn probit_uniform(half_width: f64, f_exponent: f64) -> Result<Self> {
        let csf = CsfSpec::ProbitUniform {
            half_width,
            f_exponent,
        };
        csf.validate()?;
        Ok(csf)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CsfSpec::Tullock { r } => {
                if !(r.is_finite() && r > 0.0 && r <= 1.0) {
                    return Err(Error::domain("tullock r must lie in (0, 1]"));
                }
            }
            CsfSpec::ProbitUniform {
                half_width,
                f_exponent,
            } => {
                if !(half_width.is_finite() && half_width > 0.0) {
                    return Err(Error::domain("probit half_width must be finite and > 0"));
                }
                // β = 1 leaves f' constant and the symmetric FOC cannot pin the effort.
                if !(f_exponent.is_finite() && f_exponent > 0.0 && f_exponent < 1.0) {
                    return Err(Error::domain("probit f_exponent must lie in (0, 1)"));
                }
            }
        }
        Ok(())
    }

    /// Probit production function `f(b) = b^β`. Identity for Tullock.
    #[inline]
    pub fn performance(&self, b: f64) -> f64 {
        match *self {
            CsfSpec::Tullock { .. } => b,
            CsfSpec::ProbitUniform { f_exponent, .. } => powf(b, f_exponent),
        }
    }

    /// `f'(b)`.
    #[inline]
    pub fn performance_slope(&self, b: f64) -> f64 {
        match *self {
            CsfSpec::Tullock { .. } => 1.0,
            CsfSpec::ProbitUniform { f_exponent, .. } => f_exponent * powf(b, f_exponent - 1.0),
        }
    }

    /// CDF `G` of the noise difference `ε_j - ε_i` (probit only).
    pub fn noise_cdf(&self, t: f64) -> f64 {
        match *self {
            CsfSpec::Tullock { .. } => f64::NAN,
            CsfSpec::ProbitUniform { half_width: a, .. } => triangular_cdf(a, t),
        }
    }

    /// Density `g` of the noise difference (probit only).
    pub fn noise_density(&self, t: f64) -> f64 {
        match *self {
            CsfSpec::Tullock { .. } => f64::NAN,
            CsfSpec::ProbitUniform { half_width: a, .. } => triangular_pdf(a, t),
        }
    }

    /// Smallest own effective effort that wins surely against a rival whose
    /// effective effort is zero (a limit for Tullock, hence zero).
    pub fn sure_win_effort(&self) -> f64 {
        match *self {
            CsfSpec::Tullock { .. } => 0.0,
            CsfSpec::ProbitUniform {
                half_width,
                f_exponent,
            } => powf(2.0 * half_width, 1.0 / f_exponent),
        }
    }

    /// Unchecked win probability; efforts must be finite and non-negative.
    ///
    /// The larger-effort side is always computed as the complement of the
    /// smaller one, so `prob(a, b) + prob(b, a) == 1.0` holds bit-exactly.
    #[inline]
    pub fn prob(&self, b_own: f64, b_rival: f64) -> f64 {
        if b_own <= b_rival {
            self.raw_prob(b_own, b_rival)
        } else {
            1.0 - self.raw_prob(b_rival, b_own)
        }
    }

    #[inline]
    fn raw_prob(&self, b_own: f64, b_rival: f64) -> f64 {
        match *self {
            CsfSpec::Tullock { r } => {
                if b_own + b_rival <= 0.0 {
                    return 0.5;
                }
                if r == 1.0 {
                    b_own / (b_own + b_rival)
                } else {
                    let own = powf(b_own, r);
                    own / (own + powf(b_rival, r))
                }
            }
            CsfSpec::ProbitUniform {
                half_width: a,
                f_exponent,
            } => triangular_cdf(a, powf(b_own, f_exponent) - powf(b_rival, f_exponent)),
        }
    }

    /// Unchecked analytic partials `(∂p_own/∂b_own, ∂p_own/∂b_rival)`.
    #[inline]
    pub fn partials(&self, b_own: f64, b_rival: f64) -> (f64, f64) {
        match *self {
            CsfSpec::Tullock { r } => {
                let (own, rival) = (powf(b_own, r), powf(b_rival, r));
                let denom = (own + rival) * (own + rival);
                let d_own = r * own / b_own * rival / denom;
                let d_rival = -r * own * rival / b_rival / denom;
                (d_own, d_rival)
            }
            CsfSpec::ProbitUniform { half_width: a, .. } => {
                let diff = self.performance(b_own) - self.performance(b_rival);
                let g = triangular_pdf(a, diff);
                (
                    g * self.performance_slope(b_own),
                    -g * self.performance_slope(b_rival),
                )
            }
        }
    }

    fn saturated(&self, b_own: f64, b_rival: f64) -> bool {
        match *self {
            CsfSpec::Tullock { .. } => false,
            CsfSpec::ProbitUniform { half_width, .. } => {
                abs(self.performance(b_own) - self.performance(b_rival)) >= 2.0 * half_width
            }
        }
    }
}

fn triangular_cdf(a: f64, t: f64) -> f64 {
    let w = 2.0 * a;
    if t <= -w {
        0.0
    } else if t <= 0.0 {
        (t + w) * (t + w) / (8.0 * a * a)
    } else if t < w {
        1.0 - (w - t) * (w - t) / (8.0 * a * a)
    } else {
        1.0
    }
}

fn triangular_pdf(a: f64, t: f64) -> f64 {
    let w = 2.0 * a;
    if abs(t) >= w {
        0.0
    } else {
        (w - abs(t)) / (4.0 * a * a)
    }
}

/// A player's own productive and sabotage efforts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EffortPair {
    pub productive: f64,
    pub sabotage: f64,
}

impl EffortPair {
    pub fn new(productive: f64, sabotage: f64) -> Result<Self> {
        check_effort("productive effort", productive)?;
        check_effort("sabotage effort", sabotage)?;
        Ok(EffortPair {
            productive,
            sabotage,
        })
    }
}

fn check_effort(what: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(alloc::format!(
            "{what} must be finite and >= 0, got {x}"
        )));
    }
    Ok(())
}

/// `max(0, x - s_rival)`.
pub fn effective_effort(productive: f64, rival_sabotage: f64) -> Result<f64> {
    check_effort("productive effort", productive)?;
    check_effort("rival sabotage", rival_sabotage)?;
    Ok((productive - rival_sabotage).max(0.0))
}

pub fn win_prob(csf: &CsfSpec, b_own: f64, b_rival: f64) -> Result<f64> {
    check_effort("own effective effort", b_own)?;
    check_effort("rival effective effort", b_rival)?;
    Ok(csf.prob(b_own, b_rival))
}

/// Analytic `(∂p_own/∂b_own, ∂p_own/∂b_rival)` at an interior point.
pub fn win_prob_partials(csf: &CsfSpec, b_own: f64, b_rival: f64) -> Result<(f64, f64)> {
    check_effort("own effective effort", b_own)?;
    check_effort("rival effective effort", b_rival)?;
    if b_own <= 0.0 || b_rival <= 0.0 {
        return Err(Error::domain("partials need strictly positive efforts"));
    }
    if csf.saturated(b_own, b_rival) {
        return Err(Error::domain(
            "probit CSF saturated: |f(b_own) - f(b_rival)| >= 2a",
        ));
    }
    Ok(csf.partials(b_own, b_rival))
}

pub fn cost_eval(cost: &CostSpec, s: f64) -> Result<f64> {
    check_effort("sabotage", s)?;
    Ok(cost.value(s))
}

pub fn cost_marginal_inverse(cost: &CostSpec, y: f64) -> Result<f64> {
    if !y.is_finite() || y < 0.0 {
        return Err(Error::domain("marginal cost level must be finite and >= 0"));
    }
    Ok(cost.marginal_inverse(y))
}
