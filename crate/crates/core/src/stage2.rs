//! The final (stage-2) contest.
//!
//! The final is a one-shot contest for the common prize `v`. At the
//! symmetric interior solution both finalists reach the same effective
//! effort `b*`, every hawk sabotages `c'^{-1}(1)` regardless of `v`, and a
//! dove facing a hawk simply adds the hawk's sabotage to its own effort.

use crate::error::{Error, Result};
use crate::math::powf;
use crate::primitives::{CostSpec, CsfSpec, EffortPair};
use crate::roots::bisect;
use crate::tournament::PlayerType;

/// Type pairing of the two finalists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Pairing {
    DD,
    HH,
    /// Hawk first, dove second.
    HD,
}

impl Pairing {
    pub fn of(a: PlayerType, b: PlayerType) -> Pairing {
        match (a, b) {
            (PlayerType::Dove, PlayerType::Dove) => Pairing::DD,
            (PlayerType::Hawk, PlayerType::Hawk) => Pairing::HH,
            _ => Pairing::HD,
        }
    }

    pub fn parse(s: &str) -> Result<Pairing> {
        match s {
            "DD" => Ok(Pairing::DD),
            "HH" => Ok(Pairing::HH),
            "HD" | "DH" => Ok(Pairing::HD),
            other => Err(Error::domain(alloc::format!("unknown pairing {other:?}"))),
        }
    }
}

/// Efforts of both finalists; for [`Pairing::HD`] `first` is the hawk.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stage2Profile {
    pub first: EffortPair,
    pub second: EffortPair,
}

impl Stage2Profile {
    /// Effective efforts `(b_first, b_second)`.
    pub fn effective(&self) -> (f64, f64) {
        (
            (self.first.productive - self.second.sabotage).max(0.0),
            (self.second.productive - self.first.sabotage).max(0.0),
        )
    }
}

/// Expected stage-2 payoffs by own type and rival type, net of final-stage outlays.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PayoffMenu {
    pub dove_vs_dove: f64,
    pub hawk_vs_hawk: f64,
    pub dove_vs_hawk: f64,
    pub hawk_vs_dove: f64,
}

impl PayoffMenu {
    pub fn payoff(&self, own: PlayerType, rival: PlayerType) -> f64 {
        use PlayerType::*;
        match (own, rival) {
            (Dove, Dove) => self.dove_vs_dove,
            (Hawk, Hawk) => self.hawk_vs_hawk,
            (Dove, Hawk) => self.dove_vs_hawk,
            (Hawk, Dove) => self.hawk_vs_dove,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stage2Solution {
    pub prize: f64,
    pub base_effort: f64,
    pub sabotage: f64,
    pub dove_dove: Stage2Profile,
    pub hawk_hawk: Stage2Profile,
    pub hawk_dove: Stage2Profile,
    pub menu: PayoffMenu,
    /// Some menu entry is not positive: the interior candidate is suspect
    /// and the verification module will decide.
    pub degenerate: bool,
}

impl Stage2Solution {
    pub fn profile(&self, pairing: Pairing) -> &Stage2Profile {
        match pairing {
            Pairing::DD => &self.dove_dove,
            Pairing::HH => &self.hawk_hawk,
            Pairing::HD => &self.hawk_dove,
        }
    }
}

fn check_prize(v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain("prize must be finite and > 0"));
    }
    Ok(())
}

/// Symmetric effective effort `b*` solving `∂p/∂b_own · v = 1` at equal efforts.
pub fn base_effort(csf: &CsfSpec, v: f64) -> Result<f64> {
    check_prize(v)?;
    csf.validate()?;
    Ok(match *csf {
        CsfSpec::Tullock { r } => r * v / 4.0,
        CsfSpec::ProbitUniform {
            half_width,
            f_exponent,
        } => powf(
            f_exponent * v / (2.0 * half_width),
            1.0 / (1.0 - f_exponent),
        ),
    })
}

/// Root of `g(0)·f'(b)·v = 1` by bracketing bisection; works for any
/// decreasing `f'`, not only the power family.
pub fn base_effort_bisection(csf: &CsfSpec, v: f64) -> Result<f64> {
    check_prize(v)?;
    csf.validate()?;
    let foc = |b: f64| match *csf {
        CsfSpec::Tullock { .. } => csf.partials(b, b).0 * v - 1.0,
        CsfSpec::ProbitUniform { .. } => {
            csf.noise_density(0.0) * csf.performance_slope(b) * v - 1.0
        }
    };
    let mut hi = 1.0;
    let mut expansions = 0;
    while foc(hi) > 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 2000 {
            return Err(Error::no_interior("symmetric FOC has no root"));
        }
    }
    let mut lo = hi;
    while foc(lo) < 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::no_interior("symmetric FOC has no root"));
        }
    }
    bisect(foc, lo, hi, 1e-15 * hi, 400).ok_or_else(|| Error::no_interior("bracket lost"))
}

/// `s² = c'^{-1}(1)`, independent of the prize and of the CSF.
pub fn stage2_sabotage(cost: &CostSpec) -> Result<f64> {
    cost.validate()?;
    Ok(cost.marginal_inverse(1.0))
}

pub fn stage2_profile(
    pairing: Pairing,
    csf: &CsfSpec,
    cost: &CostSpec,
    v: f64,
) -> Result<Stage2Profile> {
    let b = base_effort(csf, v)?;
    let s = stage2_sabotage(cost)?;
    Ok(profile_from(pairing, b, s))
}

fn profile_from(pairing: Pairing, b: f64, s: f64) -> Stage2Profile {
    let dove = EffortPair {
        productive: b,
        sabotage: 0.0,
    };
    let hawk_vs_hawk = EffortPair {
        productive: b + s,
        sabotage: s,
    };
    match pairing {
        Pairing::DD => Stage2Profile {
            first: dove,
            second: dove,
        },
        Pairing::HH => Stage2Profile {
            first: hawk_vs_hawk,
            second: hawk_vs_hawk,
        },
        Pairing::HD => Stage2Profile {
            first: EffortPair {
                productive: b,
                sabotage: s,
            },
            second: EffortPair {
                productive: b + s,
                sabotage: 0.0,
            },
        },
    }
}

pub fn stage2_payoff_menu(csf: &CsfSpec, cost: &CostSpec, v: f64) -> Result<PayoffMenu> {
    let b = base_effort(csf, v)?;
    let s = stage2_sabotage(cost)?;
    Ok(menu_from(v, b, s, cost.value(s)))
}

fn menu_from(v: f64, b: f64, s: f64, cs: f64) -> PayoffMenu {
    let half = v / 2.0;
    PayoffMenu {
        dove_vs_dove: half - b,
        hawk_vs_hawk: half - (b + s + cs),
        dove_vs_hawk: half - (b + s),
        hawk_vs_dove: half - (b + cs),
    }
}

pub fn solve_stage2(csf: &CsfSpec, cost: &CostSpec, v: f64) -> Result<Stage2Solution> {
    let b = base_effort(csf, v)?;
    let s = stage2_sabotage(cost)?;
    let menu = menu_from(v, b, s, cost.value(s));
    let degenerate = [
        menu.dove_vs_dove,
        menu.hawk_vs_hawk,
        menu.dove_vs_hawk,
        menu.hawk_vs_dove,
    ]
    .iter()
    .any(|&x| x <= 0.0);
    Ok(Stage2Solution {
        prize: v,
        base_effort: b,
        sabotage: s,
        dove_dove: profile_from(Pairing::DD, b, s),
        hawk_hawk: profile_from(Pairing::HH, b, s),
        hawk_dove: profile_from(Pairing::HD, b, s),
        menu,
        degenerate,
    })
}
