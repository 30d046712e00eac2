//! Backward induction over the four-player bracket.
//!
//! Players are numbered `0..4`: semifinal `m` seats players `2m` and
//! `2m + 1`. The final is always solved first (it does not depend on
//! anything that happened before it), then each semifinal is solved with
//! continuation values implied by the parallel semifinal.

use crate::error::{Error, Result};
use crate::math::abs;
use crate::primitives::{CostSpec, CsfSpec};
use crate::stage1::{
    continuation_values, solve_stage1_hd_probit, solve_stage1_hd_tullock, solve_stage1_symmetric,
    FixedPointSettings, HdMatch, Method,
};
use crate::stage2::{solve_stage2, Pairing, Stage2Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PlayerType {
    #[cfg_attr(feature = "serde", serde(rename = "H"))]
    Hawk,
    #[cfg_attr(feature = "serde", serde(rename = "D"))]
    Dove,
}

impl PlayerType {
    pub fn is_hawk(self) -> bool {
        self == PlayerType::Hawk
    }

    pub fn letter(self) -> char {
        match self {
            PlayerType::Hawk => 'H',
            PlayerType::Dove => 'D',
        }
    }
}

/// The two semifinal pairings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Bracket(pub [[PlayerType; 2]; 2]);

impl Default for Bracket {
    /// Two hawks and two doves, every hawk meeting a dove.
    fn default() -> Self {
        use PlayerType::*;
        Bracket([[Hawk, Dove], [Hawk, Dove]])
    }
}

impl Bracket {
    pub fn player_type(&self, player: usize) -> PlayerType {
        self.0[player / 2][player % 2]
    }

    pub fn kind(&self, m: usize) -> MatchKind {
        match self.0[m] {
            [PlayerType::Hawk, PlayerType::Hawk] => MatchKind::HawkHawk,
            [PlayerType::Dove, PlayerType::Dove] => MatchKind::DoveDove,
            _ => MatchKind::HawkDove,
        }
    }

    pub fn count(&self, t: PlayerType) -> usize {
        self.0.iter().flatten().filter(|&&x| x == t).count()
    }

    /// Final pairings that occur with positive probability.
    pub fn reachable_finals(&self) -> alloc::vec::Vec<Pairing> {
        let mut out = alloc::vec::Vec::new();
        for &a in &self.0[0] {
            for &b in &self.0[1] {
                let p = Pairing::of(a, b);
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MatchKind {
    HawkDove,
    HawkHawk,
    DoveDove,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverSettings {
    /// Fixed-point certificate `|Φ(p) - p|` and Lemma-1 consistency bound.
    pub tolerance: f64,
    pub damping: f64,
    pub max_iterations: usize,
    /// Bracket sweeps for brackets whose semifinals differ.
    pub max_sweeps: usize,
    /// First-order residual limit for solver output and for verification.
    pub foc_tolerance: f64,
    /// Largest deviation gain still counted as "no profitable deviation".
    pub gain_tolerance: f64,
    /// Coarse oracle grid resolution per axis.
    pub oracle_grid: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tolerance: 1e-10,
            damping: 0.5,
            max_iterations: 10_000,
            max_sweeps: 1_000,
            foc_tolerance: 1e-8,
            gain_tolerance: 1e-6,
            oracle_grid: 400,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tolerance > 0.0
            && self.damping > 0.0
            && self.damping <= 1.0
            && self.max_iterations > 0
            && self.max_sweeps > 0
            && self.foc_tolerance > 0.0
            && self.gain_tolerance >= 0.0
            && self.oracle_grid >= 2;
        if ok {
            Ok(())
        } else {
            Err(Error::domain("invalid solver settings"))
        }
    }

    fn fixed_point(&self, csf: &CsfSpec) -> FixedPointSettings {
        let acceptance = match csf {
            CsfSpec::Tullock { .. } => self.tolerance,
            CsfSpec::ProbitUniform { .. } => self.foc_tolerance,
        };
        FixedPointSettings {
            damping: self.damping,
            tolerance: self.tolerance.min(1e-12),
            max_iterations: self.max_iterations,
            acceptance,
            ..FixedPointSettings::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TournamentSpec {
    pub prize: f64,
    pub csf: CsfSpec,
    pub cost: CostSpec,
    pub bracket: Bracket,
    pub settings: SolverSettings,
    pub seed: u64,
}

impl TournamentSpec {
    /// Default 2H2D bracket, default settings, seed 42.
    pub fn new(prize: f64, csf: CsfSpec, cost: CostSpec) -> Result<Self> {
        let spec = TournamentSpec {
            prize,
            csf,
            cost,
            bracket: Bracket::default(),
            settings: SolverSettings::default(),
            seed: 42,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_bracket(mut self, bracket: Bracket) -> Self {
        self.bracket = bracket;
        self
    }

    pub fn with_prize(mut self, prize: f64) -> Self {
        self.prize = prize;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.prize.is_finite() && self.prize > 0.0) {
            return Err(Error::domain("prize must be finite and > 0"));
        }
        self.csf.validate()?;
        self.cost.validate()?;
        self.settings.validate()
    }
}

/// One solved semifinal, seat-indexed like the bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatchSolution {
    pub kind: MatchKind,
    pub types: [PlayerType; 2],
    pub productive: [f64; 2],
    pub sabotage: [f64; 2],
    pub effective: [f64; 2],
    pub win_prob: [f64; 2],
    /// Value each seat attaches to reaching the final (A for hawks, B for doves).
    pub continuation: [f64; 2],
    /// Expected payoff from the start of the tournament.
    pub payoff: [f64; 2],
    pub residual: f64,
    pub method: Option<Method>,
}

impl MatchSolution {
    /// Seat a solved hawk-vs-dove semifinal according to `types`.
    pub fn from_hd(types: [PlayerType; 2], hd: &HdMatch, cost: &CostSpec) -> MatchSolution {
        let hawk_seat = if types[0].is_hawk() { 0 } else { 1 };
        let dove_seat = 1 - hawk_seat;
        let mut m = MatchSolution {
            kind: MatchKind::HawkDove,
            types,
            productive: [0.0; 2],
            sabotage: [0.0; 2],
            effective: [0.0; 2],
            win_prob: [0.0; 2],
            continuation: [0.0; 2],
            payoff: [0.0; 2],
            residual: hd.residual,
            method: Some(hd.method),
        };
        m.productive[hawk_seat] = hd.hawk_productive;
        m.productive[dove_seat] = hd.dove_productive;
        m.sabotage[hawk_seat] = hd.sabotage;
        m.effective[hawk_seat] = hd.hawk_effective;
        m.effective[dove_seat] = hd.dove_effective;
        m.win_prob[hawk_seat] = hd.p_hawk;
        m.win_prob[dove_seat] = 1.0 - hd.p_hawk;
        m.continuation[hawk_seat] = hd.continuation.hawk;
        m.continuation[dove_seat] = hd.continuation.dove;
        let (hawk_pay, dove_pay) = crate::stage1::stage1_payoffs(hd, cost);
        m.payoff[hawk_seat] = hawk_pay;
        m.payoff[dove_seat] = dove_pay;
        m
    }

    fn symmetric(
        t: PlayerType,
        effective: f64,
        sabotage: f64,
        continuation: f64,
        cost: &CostSpec,
    ) -> Self {
        let x = effective + sabotage;
        let pay = 0.5 * continuation
            - x
            - if t.is_hawk() {
                cost.value(sabotage)
            } else {
                0.0
            };
        MatchSolution {
            kind: if t.is_hawk() {
                MatchKind::HawkHawk
            } else {
                MatchKind::DoveDove
            },
            types: [t, t],
            productive: [x, x],
            sabotage: [sabotage, sabotage],
            effective: [effective, effective],
            win_prob: [0.5, 0.5],
            continuation: [continuation, continuation],
            payoff: [pay, pay],
            residual: 0.0,
            method: None,
        }
    }

    /// Probability that the winner of this semifinal is a hawk.
    pub fn hawk_winner_prob(&self) -> f64 {
        (0..2)
            .filter(|&k| self.types[k].is_hawk())
            .map(|k| self.win_prob[k])
            .sum()
    }
}

/// Per-player row of a solved tournament.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlayerSummary {
    pub player: usize,
    pub player_type: PlayerType,
    pub stage1_productive: f64,
    pub stage1_sabotage: f64,
    pub stage1_effective: f64,
    pub stage1_win_prob: f64,
    pub win_prob: f64,
    pub payoff: f64,
}

/// Full subgame-perfect candidate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpeSolution {
    pub prize: f64,
    pub bracket: Bracket,
    pub stage2: Stage2Solution,
    pub matches: [MatchSolution; 2],
    pub player_win_probs: [f64; 4],
    pub hawk_win_prob: f64,
    pub dove_win_prob: f64,
}

impl SpeSolution {
    /// Assemble a solution from already-solved pieces.
    pub fn assemble(
        prize: f64,
        bracket: Bracket,
        stage2: Stage2Solution,
        matches: [MatchSolution; 2],
    ) -> Result<Self> {
        let player_win_probs = bracket_win_probs([matches[0].win_prob[0], matches[1].win_prob[0]])?;
        let (hawk_win_prob, dove_win_prob) = type_win_probs(&bracket, &player_win_probs);
        Ok(SpeSolution {
            prize,
            bracket,
            stage2,
            matches,
            player_win_probs,
            hawk_win_prob,
            dove_win_prob,
        })
    }

    pub fn match_of(&self, player: usize) -> (&MatchSolution, usize) {
        (&self.matches[player / 2], player % 2)
    }

    pub fn player(&self, player: usize) -> PlayerSummary {
        let (m, k) = self.match_of(player);
        PlayerSummary {
            player,
            player_type: m.types[k],
            stage1_productive: m.productive[k],
            stage1_sabotage: m.sabotage[k],
            stage1_effective: m.effective[k],
            stage1_win_prob: m.win_prob[k],
            win_prob: self.player_win_probs[player],
            payoff: m.payoff[k],
        }
    }

    /// Hawk win probability in the first hawk-vs-dove semifinal, if any.
    pub fn hd_hawk_prob(&self) -> Option<f64> {
        self.matches
            .iter()
            .find(|m| m.kind == MatchKind::HawkDove)
            .map(MatchSolution::hawk_winner_prob)
    }
}

/// Exact enumeration over the four stage-1 outcomes with a fair final.
///
/// `first_seat_win[m]` is the win probability of seat 0 in semifinal `m`.
pub fn bracket_win_probs(first_seat_win: [f64; 2]) -> Result<[f64; 4]> {
    if first_seat_win.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::domain("win probabilities must lie in [0, 1]"));
    }
    let mut out = [0.0; 4];
    for w0 in 0..2 {
        let p0 = if w0 == 0 {
            first_seat_win[0]
        } else {
            1.0 - first_seat_win[0]
        };
        for w1 in 0..2 {
            let p1 = if w1 == 0 {
                first_seat_win[1]
            } else {
                1.0 - first_seat_win[1]
            };
            let reach = p0 * p1;
            out[w0] += 0.5 * reach;
            out[2 + w1] += 0.5 * reach;
        }
    }
    Ok(out)
}

/// `(hawk total, dove total)`.
pub fn type_win_probs(bracket: &Bracket, probs: &[f64; 4]) -> (f64, f64) {
    let mut hawk = 0.0;
    let mut dove = 0.0;
    for (i, p) in probs.iter().enumerate() {
        if bracket.player_type(i).is_hawk() {
            hawk += p;
        } else {
            dove += p;
        }
    }
    (hawk, dove)
}

fn solve_hd(
    spec: &TournamentSpec,
    a_of_p: impl Fn(f64) -> f64,
    b_of_p: impl Fn(f64) -> f64,
) -> Result<HdMatch> {
    let fp = spec.settings.fixed_point(&spec.csf);
    match spec.csf {
        CsfSpec::Tullock { r } => solve_stage1_hd_tullock(a_of_p, b_of_p, &spec.cost, r, &fp),
        CsfSpec::ProbitUniform { .. } => {
            solve_stage1_hd_probit(a_of_p, b_of_p, &spec.cost, &spec.csf, &fp)
        }
    }
}

/// Solve the whole tournament by backward induction.
pub fn solve_tournament(spec: &TournamentSpec) -> Result<SpeSolution> {
    spec.validate()?;
    let stage2 = solve_stage2(&spec.csf, &spec.cost, spec.prize)?;
    let menu = stage2.menu;
    let bracket = spec.bracket;

    if bracket.kind(0) == MatchKind::HawkDove && bracket.kind(1) == MatchKind::HawkDove {
        // Both semifinals are the same hawk-vs-dove game: a scalar fixed point.
        let hd = solve_hd(
            spec,
            |p| {
                continuation_values(&menu, p)
                    .map(|c| c.hawk)
                    .unwrap_or(f64::NAN)
            },
            |p| {
                continuation_values(&menu, p)
                    .map(|c| c.dove)
                    .unwrap_or(f64::NAN)
            },
        )?;
        let matches = [
            MatchSolution::from_hd(bracket.0[0], &hd, &spec.cost),
            MatchSolution::from_hd(bracket.0[1], &hd, &spec.cost),
        ];
        return SpeSolution::assemble(spec.prize, bracket, stage2, matches);
    }

    let mut hawk_final = [0.5; 2];
    let mut solved: [Option<MatchSolution>; 2] = [None, None];
    let mut converged = false;
    for _ in 0..spec.settings.max_sweeps {
        let mut moved: f64 = 0.0;
        for m in 0..2 {
            let cv = continuation_values(&menu, hawk_final[1 - m])?;
            let types = bracket.0[m];
            let sol = match bracket.kind(m) {
                MatchKind::HawkDove => {
                    let hd = solve_hd(spec, |_| cv.hawk, |_| cv.dove)?;
                    MatchSolution::from_hd(types, &hd, &spec.cost)
                }
                MatchKind::HawkHawk => {
                    let (b, s) = solve_stage1_symmetric(true, &spec.csf, &spec.cost, cv.hawk)?;
                    MatchSolution::symmetric(PlayerType::Hawk, b, s, cv.hawk, &spec.cost)
                }
                MatchKind::DoveDove => {
                    let (b, s) = solve_stage1_symmetric(false, &spec.csf, &spec.cost, cv.dove)?;
                    MatchSolution::symmetric(PlayerType::Dove, b, s, cv.dove, &spec.cost)
                }
            };
            let h = sol.hawk_winner_prob();
            moved = moved.max(abs(h - hawk_final[m]));
            hawk_final[m] = h;
            solved[m] = Some(sol);
        }
        if moved < spec.settings.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::no_interior("bracket sweep did not converge"));
    }
    let matches = [solved[0].unwrap(), solved[1].unwrap()];
    SpeSolution::assemble(spec.prize, bracket, stage2, matches)
}
