//! Seeded Monte Carlo replay of a solved tournament.
//!
//! Trials are split into fixed-size batches. Batch `k` draws from a
//! ChaCha8 stream seeded with the run seed and stream id `k`, and batches
//! only produce integer win counts, so a run is bit-identical for any
//! executor and thread count.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::math::{ln, sqrt};
use crate::primitives::CsfSpec;
use crate::stage2::Pairing;
use crate::tournament::SpeSolution;

/// Trials per RNG stream.
pub const BATCH: u64 = 8192;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SimMode {
    /// Draw each match winner straight from the contest success function.
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "direct"))]
    DirectProbability,
    /// Draw noisy performances and let the higher one win.
    #[cfg_attr(feature = "serde", serde(rename = "structural"))]
    StructuralNoise,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: 1_000_000,
            seed: 42,
            mode: SimMode::DirectProbability,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, csf: &CsfSpec) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("trials must be > 0"));
        }
        if self.mode == SimMode::StructuralNoise {
            if let CsfSpec::Tullock { r } = csf {
                if *r != 1.0 {
                    return Err(Error::UnsupportedMode(
                        "structural noise is only available for Tullock r = 1 and the uniform probit".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimResult {
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
    pub counts: [u64; 4],
    pub player_freq: [f64; 4],
    /// 99% normal-approximation half widths.
    pub player_half_width: [f64; 4],
    pub hawk_freq: f64,
    pub hawk_half_width: f64,
    pub dove_freq: f64,
    pub dove_half_width: f64,
}

/// Uniform on the open interval (0, 1).
#[inline]
fn open01<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Play one contest between effective efforts `b[0]` and `b[1]`; returns the winning seat.
pub fn simulate_match<R: Rng>(rng: &mut R, csf: &CsfSpec, b: [f64; 2], mode: SimMode) -> usize {
    let (y0, y1) = match (mode, csf) {
        (SimMode::DirectProbability, _) => {
            return if open01(rng) < csf.prob(b[0], b[1]) {
                0
            } else {
                1
            };
        }
        // b·ε with ε = -1/ln U is Fréchet(1) scaled by b; P(y0 > y1) = b0/(b0 + b1).
        (SimMode::StructuralNoise, CsfSpec::Tullock { .. }) => {
            let e0 = -1.0 / ln(open01(rng));
            let e1 = -1.0 / ln(open01(rng));
            (b[0] * e0, b[1] * e1)
        }
        (SimMode::StructuralNoise, CsfSpec::ProbitUniform { half_width, .. }) => {
            let n0 = (2.0 * open01(rng) - 1.0) * half_width;
            let n1 = (2.0 * open01(rng) - 1.0) * half_width;
            (csf.performance(b[0]) + n0, csf.performance(b[1]) + n1)
        }
    };
    if y0 > y1 {
        0
    } else if y1 > y0 {
        1
    } else if rng.random::<bool>() {
        0
    } else {
        1
    }
}

/// Run one full bracket; returns the champion's player index.
pub fn simulate_once<R: Rng>(
    rng: &mut R,
    solution: &SpeSolution,
    csf: &CsfSpec,
    mode: SimMode,
) -> usize {
    let mut finalists = [0usize; 2];
    for (m, slot) in finalists.iter_mut().enumerate() {
        let seat = simulate_match(rng, csf, solution.matches[m].effective, mode);
        *slot = 2 * m + seat;
    }
    let types = finalists.map(|p| solution.bracket.player_type(p));
    let pairing = Pairing::of(types[0], types[1]);
    let (b_first, b_second) = solution.stage2.profile(pairing).effective();
    // The hawk takes the profile's first seat in a mixed final.
    let order = if pairing == Pairing::HD && !types[0].is_hawk() {
        [finalists[1], finalists[0]]
    } else {
        finalists
    };
    order[simulate_match(rng, csf, [b_first, b_second], mode)]
}

fn half_width(f: f64, n: u64) -> f64 {
    Z99 * sqrt(f * (1.0 - f) / n as f64)
}

/// Replay `config.trials` tournaments at the solved efforts.
pub fn simulate_tournament<E: Executor>(
    exec: &E,
    solution: &SpeSolution,
    csf: &CsfSpec,
    config: &SimConfig,
) -> Result<SimResult> {
    config.validate(csf)?;
    let batches = config.trials.div_ceil(BATCH);
    let counts = exec.map_reduce(
        batches as usize,
        [0u64; 4],
        |k| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(k as u64);
            let n = BATCH.min(config.trials - k as u64 * BATCH);
            let mut c = [0u64; 4];
            for _ in 0..n {
                c[simulate_once(&mut rng, solution, csf, config.mode)] += 1;
            }
            c
        },
        |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
    );

    let n = config.trials;
    let player_freq = counts.map(|c| c as f64 / n as f64);
    let player_half_width = player_freq.map(|f| half_width(f, n));
    let hawk_count: u64 = (0..4)
        .filter(|&i| solution.bracket.player_type(i).is_hawk())
        .map(|i| counts[i])
        .sum();
    let hawk_freq = hawk_count as f64 / n as f64;
    let dove_freq = (n - hawk_count) as f64 / n as f64;
    Ok(SimResult {
        trials: n,
        seed: config.seed,
        mode: config.mode,
        counts,
        player_freq,
        player_half_width,
        hawk_freq,
        hawk_half_width: half_width(hawk_freq, n),
        dove_freq,
        dove_half_width: half_width(dove_freq, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::primitives::CostSpec;
    use crate::tournament::{solve_tournament, TournamentSpec};

    fn ex1() -> (TournamentSpec, SpeSolution) {
        let spec = TournamentSpec::new(
            80.0,
            CsfSpec::tullock(1.0).unwrap(),
            CostSpec::new(3.0, 12.0).unwrap(),
        )
        .unwrap();
        let sol = solve_tournament(&spec).unwrap();
        (spec, sol)
    }

    #[test]
    fn open_interval_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let u = open01(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn structural_tullock_matches_ratio() {
        let csf = CsfSpec::tullock(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let wins = (0..n)
            .filter(|_| simulate_match(&mut rng, &csf, [1.0, 3.0], SimMode::StructuralNoise) == 0)
            .count();
        let f = wins as f64 / n as f64;
        assert!((f - 0.25).abs() < half_width(0.25, n as u64), "{f}");
    }

    #[test]
    fn structural_probit_matches_cdf() {
        let csf = CsfSpec::probit_uniform(5.0, 0.5).unwrap();
        let b = [2.0, 6.0];
        let p = csf.prob(b[0], b[1]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 200_000;
        let wins = (0..n)
            .filter(|_| simulate_match(&mut rng, &csf, b, SimMode::StructuralNoise) == 0)
            .count();
        assert!((wins as f64 / n as f64 - p).abs() < half_width(p, n as u64));
    }

    #[test]
    fn zero_efforts_split_evenly() {
        let csf = CsfSpec::tullock(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        for mode in [SimMode::DirectProbability, SimMode::StructuralNoise] {
            let wins = (0..n)
                .filter(|_| simulate_match(&mut rng, &csf, [0.0, 0.0], mode) == 0)
                .count();
            assert!((wins as f64 / n as f64 - 0.5).abs() < half_width(0.5, n as u64));
        }
    }

    #[test]
    fn reproducible_and_partial_batches() {
        let (spec, sol) = ex1();
        let cfg = SimConfig {
            trials: BATCH + 17,
            seed: 5,
            mode: SimMode::DirectProbability,
        };
        let a = simulate_tournament(&Sequential, &sol, &spec.csf, &cfg).unwrap();
        let b = simulate_tournament(&Sequential, &sol, &spec.csf, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), cfg.trials);
        let other =
            simulate_tournament(&Sequential, &sol, &spec.csf, &SimConfig { seed: 6, ..cfg })
                .unwrap();
        assert_ne!(a.counts, other.counts);
    }

    #[test]
    fn unsupported_structural_mode() {
        let spec = TournamentSpec::new(
            80.0,
            CsfSpec::tullock(0.5).unwrap(),
            CostSpec::new(3.0, 12.0).unwrap(),
        )
        .unwrap();
        let cfg = SimConfig {
            mode: SimMode::StructuralNoise,
            ..SimConfig::default()
        };
        let err = cfg.validate(&spec.csf).unwrap_err();
        assert!(matches!(err, Error::UnsupportedMode(_)));
        assert!(SimConfig {
            trials: 0,
            ..SimConfig::default()
        }
        .validate(&spec.csf)
        .is_err());
    }
}
