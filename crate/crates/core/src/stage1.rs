//! Semifinal (stage-1) contests.
//!
//! A semifinal is a one-shot contest in which each side values winning at
//! its own continuation value: the expected final-stage payoff given the
//! type of whoever wins the parallel semifinal. A hawk's continuation `A`
//! is always below a dove's `B` by exactly `c(c'^{-1}(1))`, which is what
//! makes doves try harder.

use crate::error::{Error, Result};
use crate::math::{abs, powf};
use crate::primitives::{CostSpec, CsfSpec};
use crate::roots::{bisect, newton2, NewtonSettings};
use crate::stage2::{base_effort, PayoffMenu};

/// Stage-2 continuation values of a hawk (`A`) and a dove (`B`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContinuationValues {
    pub hawk: f64,
    pub dove: f64,
}

/// Expected final payoff of each own type when the other finalist is a
/// hawk with probability `prob_rival_hawk`.
pub fn continuation_values(menu: &PayoffMenu, prob_rival_hawk: f64) -> Result<ContinuationValues> {
    if !(0.0..=1.0).contains(&prob_rival_hawk) {
        return Err(Error::domain(
            "parallel-match probability must lie in [0, 1]",
        ));
    }
    let q = prob_rival_hawk;
    Ok(ContinuationValues {
        hawk: q * menu.hawk_vs_hawk + (1.0 - q) * menu.hawk_vs_dove,
        dove: q * menu.dove_vs_hawk + (1.0 - q) * menu.dove_vs_dove,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FixedPointSettings {
    /// Weight on the new iterate in `p ← (1-λ)p + λΦ(p)`.
    pub damping: f64,
    /// Iteration stops once `|Φ(p) - p|` falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Fixed-point certificate and FOC residual limit on the returned solution.
    pub acceptance: f64,
    /// Perturbed restarts for the probit Newton solve.
    pub newton_restarts: usize,
}

impl Default for FixedPointSettings {
    fn default() -> Self {
        FixedPointSettings {
            damping: 0.5,
            tolerance: 1e-12,
            max_iterations: 10_000,
            acceptance: 1e-8,
            newton_restarts: 8,
        }
    }
}

/// How a hawk-vs-dove semifinal was closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    DampedIteration,
    Bisection,
    Newton,
    /// Profile rebuilt from a supplied win probability, not solved.
    Reconstructed,
}

/// Solved hawk-vs-dove semifinal.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HdMatch {
    pub hawk_effective: f64,
    pub dove_effective: f64,
    pub hawk_productive: f64,
    /// Productive effort including what the hawk's sabotage removes.
    pub dove_productive: f64,
    pub sabotage: f64,
    pub p_hawk: f64,
    pub continuation: ContinuationValues,
    /// `|Φ(p) - p|` for Tullock, FOC residual ∞-norm for probit.
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
}

fn positive_on_unit<F: Fn(f64) -> f64>(f: &F) -> bool {
    [0.0, 0.5, 1.0].iter().all(|&p| {
        let x = f(p);
        x.is_finite() && x > 0.0
    })
}

fn check_continuations<FA, FB>(a_of_p: &FA, b_of_p: &FB) -> Result<()>
where
    FA: Fn(f64) -> f64,
    FB: Fn(f64) -> f64,
{
    if !positive_on_unit(a_of_p) {
        return Err(Error::no_interior(
            "final-stage rents exhausted: hawk continuation A(p) <= 0 on [0, 1]",
        ));
    }
    if !positive_on_unit(b_of_p) {
        return Err(Error::no_interior(
            "final-stage rents exhausted: dove continuation B(p) <= 0 on [0, 1]",
        ));
    }
    Ok(())
}

/// Hawk-vs-dove semifinal under the Tullock CSF.
///
/// `a_of_p`/`b_of_p` give the continuation values as functions of the
/// hawk win probability `p` of the parallel semifinal. With both semifinals
/// identical, `p` is the fixed point of `Φ(p) = A^r / (A^r + B^r)`; since
/// `A' = B'` and `A < B`, `Φ` is decreasing and the fixed point is unique.
pub fn solve_stage1_hd_tullock<FA, FB>(
    a_of_p: FA,
    b_of_p: FB,
    cost: &CostSpec,
    r: f64,
    settings: &FixedPointSettings,
) -> Result<HdMatch>
where
    FA: Fn(f64) -> f64,
    FB: Fn(f64) -> f64,
{
    CsfSpec::tullock(r)?;
    cost.validate()?;
    check_continuations(&a_of_p, &b_of_p)?;

    let phi = |p: f64| {
        let (a, b) = (powf(a_of_p(p), r), powf(b_of_p(p), r));
        a / (a + b)
    };

    let mut p = 0.5;
    let mut iterations = 0;
    let mut method = Method::DampedIteration;
    let lambda = settings.damping;
    let mut converged = false;
    while iterations < settings.max_iterations {
        let next = phi(p);
        if abs(next - p) <= settings.tolerance {
            p = next;
            converged = true;
            break;
        }
        p = (1.0 - lambda) * p + lambda * next;
        iterations += 1;
    }
    if !converged {
        // Φ(0) - 0 > 0 and Φ(1) - 1 < 0 since A, B > 0.
        p = bisect(|q| phi(q) - q, 0.0, 1.0, 1e-16, 200)
            .ok_or_else(|| Error::no_interior("fixed point not bracketed"))?;
        method = Method::Bisection;
    }

    let (a, b) = (a_of_p(p), b_of_p(p));
    let (ar, br) = (powf(a, r), powf(b, r));
    let denom = (ar + br) * (ar + br);
    let hawk = r * a * ar * br / denom;
    let dove = r * b * br * ar / denom;
    let sabotage = cost.marginal_inverse(a / b);
    let residual = abs(phi(p) - p);
    if residual > settings.acceptance {
        return Err(Error::no_interior("fixed-point certificate failed"));
    }
    Ok(HdMatch {
        hawk_effective: hawk,
        dove_effective: dove,
        hawk_productive: hawk,
        dove_productive: dove + sabotage,
        sabotage,
        p_hawk: p,
        continuation: ContinuationValues { hawk: a, dove: b },
        residual,
        iterations,
        method,
    })
}

/// Rebuild a Tullock hawk-vs-dove profile from a given hawk win
/// probability instead of solving for it.
///
/// Continuations are evaluated at `p`, sabotage is `c'^{-1}(A/B)`, and the
/// efforts satisfy the dove's first-order condition together with
/// `b_h^r / (b_h^r + b_d^r) = p`. At the true fixed point this reproduces
/// [`solve_stage1_hd_tullock`]; elsewhere it is a non-equilibrium
/// candidate useful for auditing printed numbers.
pub fn tullock_hd_at_probability<FA, FB>(
    p: f64,
    a_of_p: FA,
    b_of_p: FB,
    cost: &CostSpec,
    r: f64,
) -> Result<HdMatch>
where
    FA: Fn(f64) -> f64,
    FB: Fn(f64) -> f64,
{
    CsfSpec::tullock(r)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("probability must lie in (0, 1)"));
    }
    let (a, b) = (a_of_p(p), b_of_p(p));
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::no_interior("continuation value <= 0"));
    }
    let dove = r * p * (1.0 - p) * b;
    let hawk = dove * powf(p / (1.0 - p), 1.0 / r);
    let sabotage = cost.marginal_inverse(a / b);
    let phi = powf(a, r) / (powf(a, r) + powf(b, r));
    Ok(HdMatch {
        hawk_effective: hawk,
        dove_effective: dove,
        hawk_productive: hawk,
        dove_productive: dove + sabotage,
        sabotage,
        p_hawk: p,
        continuation: ContinuationValues { hawk: a, dove: b },
        residual: abs(phi - p),
        iterations: 0,
        method: Method::Reconstructed,
    })
}

/// Hawk-vs-dove semifinal under the probit CSF with uniform noise.
///
/// Solves the hawk's and the dove's productive-effort FOCs jointly by
/// damped Newton, with `p = G(f(b_h) - f(b_d))` feeding back into the
/// continuation values.
pub fn solve_stage1_hd_probit<FA, FB>(
    a_of_p: FA,
    b_of_p: FB,
    cost: &CostSpec,
    csf: &CsfSpec,
    settings: &FixedPointSettings,
) -> Result<HdMatch>
where
    FA: Fn(f64) -> f64,
    FB: Fn(f64) -> f64,
{
    csf.validate()?;
    cost.validate()?;
    let half_width = match *csf {
        CsfSpec::ProbitUniform { half_width, .. } => half_width,
        CsfSpec::Tullock { .. } => return Err(Error::domain("probit solver needs a probit CSF")),
    };
    check_continuations(&a_of_p, &b_of_p)?;

    let residual = |x: [f64; 2]| -> Option<[f64; 2]> {
        let [bh, bd] = x;
        if !(bh > 0.0 && bd > 0.0 && bh.is_finite() && bd.is_finite()) {
            return None;
        }
        let diff = csf.performance(bh) - csf.performance(bd);
        if abs(diff) >= 2.0 * half_width {
            return None;
        }
        let p = csf.noise_cdf(diff);
        let (a, b) = (a_of_p(p), b_of_p(p));
        if !(a > 0.0 && b > 0.0) {
            return None;
        }
        let g = csf.noise_density(diff);
        Some([
            g * csf.performance_slope(bh) * a - 1.0,
            g * csf.performance_slope(bd) * b - 1.0,
        ])
    };

    let prize = 0.5 * (a_of_p(0.5) + b_of_p(0.5));
    let b0 = base_effort(csf, prize)?;
    const SEEDS: [(f64, f64); 8] = [
        (0.5, 0.5),
        (2.0, 2.0),
        (0.8, 1.25),
        (1.25, 0.8),
        (0.25, 0.25),
        (4.0, 4.0),
        (0.5, 1.0),
        (1.0, 0.5),
    ];
    let starts =
        core::iter::once((1.0, 1.0)).chain(SEEDS.iter().copied().take(settings.newton_restarts));
    let newton = NewtonSettings {
        tolerance: 1e-14,
        max_iter: 200,
        fd_step: 1e-6,
    };
    let mut total_iterations = 0;
    for (kh, kd) in starts {
        let Some(out) = newton2(residual, [b0 * kh, b0 * kd], newton) else {
            continue;
        };
        total_iterations += out.iterations;
        if out.residual > settings.acceptance {
            continue;
        }
        let [bh, bd] = out.x;
        let diff = csf.performance(bh) - csf.performance(bd);
        let p = csf.noise_cdf(diff);
        let (a, b) = (a_of_p(p), b_of_p(p));
        let sabotage = cost.marginal_inverse(a / b);
        return Ok(HdMatch {
            hawk_effective: bh,
            dove_effective: bd,
            hawk_productive: bh,
            dove_productive: bd + sabotage,
            sabotage,
            p_hawk: p,
            continuation: ContinuationValues { hawk: a, dove: b },
            residual: out.residual,
            iterations: total_iterations,
            method: Method::Newton,
        });
    }
    Err(Error::no_interior(
        "probit semifinal: Newton found no interior root from any seed",
    ))
}

/// Expected stage-1 payoffs `(hawk, dove)` of a hawk-vs-dove semifinal.
///
/// The dove pays for its whole productive effort, part of which the
/// hawk's sabotage destroys.
pub fn stage1_payoffs(m: &HdMatch, cost: &CostSpec) -> (f64, f64) {
    let hawk = m.p_hawk * m.continuation.hawk - cost.value(m.sabotage) - m.hawk_productive;
    let dove = (1.0 - m.p_hawk) * m.continuation.dove - m.dove_productive;
    (hawk, dove)
}

/// Semifinal between two players of the same type valuing the final at
/// `continuation`. Returns `(effective effort, sabotage)`; sabotage is
/// `c'^{-1}(1)` for two hawks and zero for two doves.
pub fn solve_stage1_symmetric(
    hawks: bool,
    csf: &CsfSpec,
    cost: &CostSpec,
    continuation: f64,
) -> Result<(f64, f64)> {
    if !(continuation.is_finite() && continuation > 0.0) {
        return Err(Error::no_interior(
            "final-stage rents exhausted: symmetric semifinal continuation <= 0",
        ));
    }
    let b = base_effort(csf, continuation)?;
    let s = if hawks {
        cost.marginal_inverse(1.0)
    } else {
        0.0
    };
    Ok((b, s))
}
