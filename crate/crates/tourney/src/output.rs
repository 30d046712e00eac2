//! Human-readable tables, JSON and CSV writers.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use tourney_core::{CsfSpec, SimResult, SpeSolution, TournamentSpec, VerificationReport};

use crate::error::CliError;

pub const PLAYER_CSV_HEADER: &str =
    "player,type,stage1_x,stage1_s,stage1_b,stage1_p,win_prob,payoff";
pub const SIM_CSV_HEADER: &str = "player,type,wins,freq,half_width_99";

pub fn describe_spec(spec: &TournamentSpec) -> String {
    let csf = match spec.csf {
        CsfSpec::Tullock { r } => format!("tullock r={r}"),
        CsfSpec::ProbitUniform {
            half_width,
            f_exponent,
        } => {
            format!("probit noise U[-{half_width},{half_width}], f(b)=b^{f_exponent}")
        }
    };
    let bracket: Vec<String> = spec
        .bracket
        .0
        .iter()
        .map(|m| m.iter().map(|t| t.letter()).collect())
        .collect();
    format!(
        "prize {}, {csf}, cost s^{}/{}, bracket {}",
        spec.prize,
        spec.cost.exponent,
        spec.cost.divisor,
        bracket.join("|")
    )
}

pub fn solution_table(spec: &TournamentSpec, sol: &SpeSolution) -> String {
    let mut out = String::new();
    let s2 = &sol.stage2;
    let menu = &s2.menu;
    let _ = writeln!(out, "{}", describe_spec(spec));
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "final: b* = {:.6}  s2 = {:.6}",
        s2.base_effort, s2.sabotage
    );
    let _ = writeln!(
        out,
        "  menu: DD {:.6}  H vs D {:.6}  D vs H {:.6}  HH {:.6}",
        menu.dove_vs_dove, menu.hawk_vs_dove, menu.dove_vs_hawk, menu.hawk_vs_hawk
    );
    if s2.degenerate {
        let _ = writeln!(out, "  warning: some final payoff is not positive");
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>6} {:>4} {:>12} {:>12} {:>12} {:>9} {:>12} {:>9} {:>12}",
        "player", "type", "x", "s", "b", "p", "A/B", "win", "payoff"
    );
    for i in 0..4 {
        let p = sol.player(i);
        let (m, k) = sol.match_of(i);
        let _ = writeln!(
            out,
            "{:>6} {:>4} {:>12.6} {:>12.6} {:>12.6} {:>9.6} {:>12.6} {:>9.6} {:>12.6}",
            i,
            p.player_type.letter(),
            p.stage1_productive,
            p.stage1_sabotage,
            p.stage1_effective,
            p.stage1_win_prob,
            m.continuation[k],
            p.win_prob,
            p.payoff
        );
    }
    let _ = writeln!(out);
    if let Some(p) = sol.hd_hawk_prob() {
        let _ = writeln!(out, "p_H1 (hawk wins a hawk-vs-dove semifinal) = {p:.6}");
    }
    let _ = writeln!(out, "hawk-type win probability = {:.6}", sol.hawk_win_prob);
    let _ = writeln!(out, "dove-type win probability = {:.6}", sol.dove_win_prob);
    out
}

pub fn report_table(report: &VerificationReport) -> String {
    let mut out = String::new();
    let verdict = if report.interior_ok {
        "ACCEPTED"
    } else {
        "REJECTED"
    };
    let _ = writeln!(out, "verdict: {verdict}");
    if let Some(f) = &report.first_failure {
        let _ = writeln!(out, "first failure: {f}");
    }
    let _ = writeln!(out, "interior: {}", report.interior);
    let _ = writeln!(out, "max |FOC residual| = {:.3e}", report.foc_max);
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<32} {:>14}", "FOC residual", "value");
    for c in &report.foc_residuals {
        let _ = writeln!(out, "{:<32} {:>14.3e}", c.label, c.value);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<32} {:>14}", "second partial", "value");
    for c in &report.soc_values {
        let _ = writeln!(out, "{:<32} {:>14.6}", c.label, c.value);
    }
    if let Some(cf) = &report.soc_closed_form {
        let _ = writeln!(
            out,
            "final hawk d2/ds2: quoted closed form {:.6}, derived closed form {:.6}, finite difference {:.6}",
            cf.quoted, cf.derived, cf.finite_difference
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<24} {:>12}", "corner deviation", "gain");
    for c in &report.corner_gains {
        let _ = writeln!(out, "{:<24} {:>12.6}", c.label, c.value);
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<24} {:>12} {:>12} {:>12} {:>10} {:>10}",
        "grid oracle", "gain", "best", "candidate", "x", "s"
    );
    for o in &report.oracle_gains {
        let _ = writeln!(
            out,
            "{:<24} {:>12.3e} {:>12.6} {:>12.6} {:>10.4} {:>10.4}",
            o.label,
            o.gain,
            o.best_payoff,
            o.candidate_payoff,
            o.argmax_productive,
            o.argmax_sabotage
        );
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

pub fn sim_table(sol: &SpeSolution, sim: &SimResult) -> String {
    let mut out = String::new();
    let mode = match sim.mode {
        tourney_core::SimMode::DirectProbability => "direct",
        tourney_core::SimMode::StructuralNoise => "structural",
    };
    let _ = writeln!(out, "trials {}  seed {}  mode {mode}", sim.trials, sim.seed);
    let _ = writeln!(
        out,
        "{:>6} {:>4} {:>10} {:>10} {:>10} {:>10}",
        "player", "type", "wins", "freq", "±99%", "analytic"
    );
    for i in 0..4 {
        let _ = writeln!(
            out,
            "{:>6} {:>4} {:>10} {:>10.6} {:>10.6} {:>10.6}",
            i,
            sol.bracket.player_type(i).letter(),
            sim.counts[i],
            sim.player_freq[i],
            sim.player_half_width[i],
            sol.player_win_probs[i]
        );
    }
    let _ = writeln!(
        out,
        "hawk types {:.6} ± {:.6} (analytic {:.6})",
        sim.hawk_freq, sim.hawk_half_width, sol.hawk_win_prob
    );
    let _ = writeln!(
        out,
        "dove types {:.6} ± {:.6} (analytic {:.6})",
        sim.dove_freq, sim.dove_half_width, sol.dove_win_prob
    );
    out
}

pub fn players_csv(sol: &SpeSolution) -> String {
    let mut out = String::from(PLAYER_CSV_HEADER);
    out.push('\n');
    for i in 0..4 {
        let p = sol.player(i);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            i,
            p.player_type.letter(),
            p.stage1_productive,
            p.stage1_sabotage,
            p.stage1_effective,
            p.stage1_win_prob,
            p.win_prob,
            p.payoff
        );
    }
    out
}

pub fn sim_csv(sol: &SpeSolution, sim: &SimResult) -> String {
    let mut out = String::from(SIM_CSV_HEADER);
    out.push('\n');
    for i in 0..4 {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i,
            sol.bracket.player_type(i).letter(),
            sim.counts[i],
            sim.player_freq[i],
            sim.player_half_width[i]
        );
    }
    out
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)?;
    Ok(())
}
