//! Scenario files.
//!
//! ```json
//! {
//!   "prize": 80,
//!   "csf": { "type": "tullock", "r": 1 },
//!   "cost": { "exponent": 3, "divisor": 12 },
//!   "bracket": [["H", "D"], ["H", "D"]],
//!   "solver": { "tolerance": 1e-10 },
//!   "sim": { "trials": 1000000, "seed": 42, "mode": "direct" }
//! }
//! ```
//!
//! `bracket`, `solver` and `sim` are optional. Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;
use tourney_core::{
    Bracket, CostSpec, CsfSpec, SimConfig, SimMode, SolverSettings, TournamentSpec,
};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    prize: f64,
    csf: CsfSpec,
    cost: CostSpec,
    #[serde(default)]
    bracket: Bracket,
    #[serde(default)]
    solver: SolverSettings,
    #[serde(default)]
    sim: SimSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    trials: Option<u64>,
    seed: Option<u64>,
    mode: Option<SimMode>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub spec: TournamentSpec,
    pub sim: SimConfig,
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Parse(format!("{path}: {}", e.into_inner()))
    })?;

    let key = |k: &'static str| move |e: tourney_core::Error| CliError::Parse(format!("{k}: {e}"));
    if !(file.prize.is_finite() && file.prize > 0.0) {
        return Err(CliError::Parse("prize: must be finite and > 0".into()));
    }
    file.csf.validate().map_err(key("csf"))?;
    file.cost.validate().map_err(key("cost"))?;
    file.solver.validate().map_err(key("solver"))?;

    let defaults = SimConfig::default();
    let sim = SimConfig {
        trials: file.sim.trials.unwrap_or(defaults.trials),
        seed: file.sim.seed.unwrap_or(defaults.seed),
        mode: file.sim.mode.unwrap_or(defaults.mode),
    };
    if sim.trials == 0 {
        return Err(CliError::Parse("sim.trials: must be > 0".into()));
    }
    let spec = TournamentSpec {
        prize: file.prize,
        csf: file.csf,
        cost: file.cost,
        bracket: file.bracket,
        settings: file.solver,
        seed: sim.seed,
    };
    Ok(Scenario { spec, sim })
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_scenario_str(&text)
}

pub const EXAMPLE1: &str = include_str!("../scenarios/example1.json");
pub const EXAMPLE2: &str = include_str!("../scenarios/example2.json");

#[cfg(test)]
mod tests {
    use super::*;
    use tourney_core::PlayerType::*;

    fn parse_err(text: &str) -> String {
        match parse_scenario_str(text) {
            Err(CliError::Parse(m)) => m,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn bundled_examples() {
        let s = parse_scenario_str(EXAMPLE1).unwrap();
        assert_eq!(s.spec.csf, CsfSpec::Tullock { r: 1.0 });
        assert_eq!(s.spec.prize, 80.0);
        assert_eq!(
            s.spec.cost,
            CostSpec {
                exponent: 3.0,
                divisor: 12.0
            }
        );
        assert_eq!(s.spec.bracket, Bracket::default());
        assert_eq!(s.spec.settings.tolerance, 1e-10);
        assert_eq!((s.sim.trials, s.sim.seed), (1_000_000, 42));

        let s = parse_scenario_str(EXAMPLE2).unwrap();
        assert_eq!(
            s.spec.csf,
            CsfSpec::ProbitUniform {
                half_width: 5.0,
                f_exponent: 0.5
            }
        );
        assert_eq!((s.spec.prize, s.spec.cost.divisor), (20.0, 27.0));
    }

    #[test]
    fn three_hawk_bracket_is_legal() {
        let s = parse_scenario_str(
            r#"{"prize": 80, "csf": {"type": "tullock", "r": 1}, "cost": {"exponent": 3, "divisor": 12},
                "bracket": [["H", "D"], ["H", "H"]]}"#,
        )
        .unwrap();
        assert_eq!(s.spec.bracket, Bracket([[Hawk, Dove], [Hawk, Hawk]]));
    }

    #[test]
    fn errors_name_the_key() {
        let base = r#""csf": {"type": "tullock", "r": 1}, "cost": {"exponent": 3, "divisor": 12}"#;
        assert!(parse_err(&format!(r#"{{"prize": 80, {base}, "colour": 1}}"#)).contains("colour"));
        assert!(parse_err(&format!(r#"{{{base}}}"#)).contains("prize"));
        assert!(parse_err(&format!(r#"{{"prize": -1, {base}}}"#)).starts_with("prize"));
        let m = parse_err(
            r#"{"prize": 80, "csf": {"type": "tullock", "r": 3}, "cost": {"exponent": 3, "divisor": 12}}"#,
        );
        assert!(m.starts_with("csf"), "{m}");
        let m = parse_err(
            r#"{"prize": 80, "csf": {"type": "tullock", "r": 1}, "cost": {"exponent": 0.5, "divisor": 12}}"#,
        );
        assert!(m.starts_with("cost"), "{m}");
        let m = parse_err(&format!(
            r#"{{"prize": 80, {base}, "sim": {{"mode": "fast"}}}}"#
        ));
        assert!(m.contains("sim.mode"), "{m}");
        let m = parse_err(&format!(
            r#"{{"prize": 80, {base}, "solver": {{"grid": 3}}}}"#
        ));
        assert!(m.contains("grid"), "{m}");
        let m = parse_err(&format!(
            r#"{{"prize": 80, {base}, "bracket": [["H", "X"], ["H", "D"]]}}"#
        ));
        assert!(m.contains("bracket"), "{m}");
        assert!(parse_err("{").contains("EOF"));
    }

    #[test]
    fn sim_section_overrides() {
        let s = parse_scenario_str(
            r#"{"prize": 20, "csf": {"type": "probit_uniform", "half_width": 5, "f_exponent": 0.5},
                "cost": {"exponent": 3, "divisor": 27}, "sim": {"trials": 10, "seed": 7, "mode": "structural"}}"#,
        )
        .unwrap();
        assert_eq!(
            s.sim,
            SimConfig {
                trials: 10,
                seed: 7,
                mode: SimMode::StructuralNoise
            }
        );
        assert_eq!(s.spec.seed, 7);
    }
}
