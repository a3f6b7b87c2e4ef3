//! Config-driven experiment runners emitting CSV datasets.
//!
//! Each runner produces one complete CSV document as a string: a comment
//! preamble echoing the fully-resolved configuration (enough to regenerate
//! the file bit-exactly), a header row, then data rows with floats printed
//! to 9 significant digits. Plotting is left to external tools.

use crate::analysis::deflection_surface;
use crate::config::{ExperimentKind, LinkKind, ResolvedExperiment, SensorKind};
use crate::error::{Error, Result};
use crate::montecarlo::{
    log_pf0_grid, power_at_target, roc_sweep, LinkModel, Scenario, ScenarioSpec,
};
use crate::rules::RuleId;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

/// Floats are serialized with 9 significant digits.
pub fn fmt_sig9(x: f64) -> String {
    // +0.0 keeps -0.0 out of the output.
    format!("{:.8e}", x + 0.0)
}

fn fmt_float_list(values: &[f64]) -> String {
    let inner: Vec<String> = values.iter().map(|&v| fmt_sig9(v)).collect();
    format!("[{}]", inner.join(", "))
}

fn fmt_usize_list(values: &[usize]) -> String {
    let inner: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

fn fmt_rule_list(rules: &[RuleId]) -> String {
    let inner: Vec<&str> = rules.iter().map(|r| r.label()).collect();
    format!("[{}]", inner.join(", "))
}

/// The resolved configuration as `key = value` lines, in a fixed order.
/// Everything that influences the emitted data is here, so a file can be
/// regenerated bit-exactly from its own preamble (the output path itself is
/// deliberately not part of the data).
pub fn echo_lines(r: &ResolvedExperiment) -> Vec<String> {
    vec![
        format!("experiment = {}", r.kind.label()),
        format!("sensors = {}", r.sensors),
        format!(
            "sensor_model = {}",
            match r.sensor_kind {
                SensorKind::Iid => "iid",
                SensorKind::Inid => "inid",
            }
        ),
        format!("pf = {}", fmt_sig9(r.pf)),
        format!("pd = {}", fmt_sig9(r.pd)),
        format!("pfu = {}", fmt_sig9(r.pfu)),
        format!("pde = {}", fmt_sig9(r.pde)),
        format!(
            "link = {}",
            match r.link_kind {
                LinkKind::Fading => "fading",
                LinkKind::Fixed => "fixed",
            }
        ),
        format!("pe = {}", fmt_float_list(&r.pe)),
        format!("snr_db = {}", fmt_float_list(&r.snr_db)),
        format!("priors_h1 = {}", fmt_sig9(r.priors_h1)),
        format!("seed = {}", r.seed),
        format!("rules = {}", fmt_rule_list(&r.rules)),
        format!("runs = {}", r.runs),
        format!("cal_runs = {}", r.cal_runs),
        format!("target_pf0 = {}", fmt_sig9(r.target_pf0)),
        format!("roc_points = {}", r.roc_points),
        format!("grid_points = {}", r.grid_points),
        format!("k_list = {}", fmt_usize_list(&r.k_list)),
    ]
}

fn document(r: &ResolvedExperiment, header: &str, rows: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# dfsim {}", r.kind.label());
    for line in echo_lines(r) {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{header}");
    for row in rows {
        let _ = writeln!(out, "{row}");
    }
    out
}

fn scenario(r: &ResolvedExperiment, sensors: usize, link_model: LinkModel) -> Result<Scenario> {
    Scenario::realize(ScenarioSpec {
        sensors,
        sensor_model: r.sensor_model(),
        link_model,
        priors: r.priors(),
        seed: r.seed,
    })
}

/// Two-sensor deflection surface over `(pe1, pe2) in [0, 1/2]^2`.
/// Columns: `pe1, pe2, d_cr0, d_wu0, gap`.
pub fn run_fig1(r: &ResolvedExperiment) -> Result<String> {
    expect_kind(r, ExperimentKind::Fig1DeflectionSurface)?;
    let points = deflection_surface(r.pf, r.pd, r.grid_points)?;
    let rows: Vec<String> = points
        .iter()
        .map(|p| {
            format!(
                "{},{},{},{},{}",
                fmt_sig9(p.pe1),
                fmt_sig9(p.pe2),
                fmt_sig9(p.d_cr0),
                fmt_sig9(p.d_wu0),
                fmt_sig9(p.gap)
            )
        })
        .collect();
    Ok(document(r, "pe1,pe2,d_cr0,d_wu0,gap", &rows))
}

/// ROC curves, one per rule per SNR point.
/// Columns: `rule, snr_db, pf0, pd0, stderr`.
pub fn run_fig2(r: &ResolvedExperiment) -> Result<String> {
    expect_kind(r, ExperimentKind::Fig2Roc)?;
    let grid = log_pf0_grid(r.roc_points);
    let mut rows = Vec::new();
    for &snr_db in &r.snr_db {
        let sc = scenario(r, r.sensors, LinkModel::Fading { snr_db })?;
        let curves = roc_sweep(&r.rules, &sc, r.runs, &grid)?;
        for curve in curves {
            for p in &curve.points {
                rows.push(format!(
                    "{},{},{},{},{}",
                    curve.rule,
                    fmt_sig9(snr_db),
                    fmt_sig9(p.pf0),
                    fmt_sig9(p.pd0),
                    fmt_sig9(p.stderr)
                ));
            }
        }
    }
    Ok(document(r, "rule,snr_db,pf0,pd0,stderr", &rows))
}

/// Detection probability against per-sensor SNR at a fixed false-alarm
/// target. Columns: `rule, K, snr_db, pd0, stderr`.
pub fn run_fig3(r: &ResolvedExperiment) -> Result<String> {
    expect_kind(r, ExperimentKind::Fig3Pd0VsSnr)?;
    if r.sensor_kind != SensorKind::Iid {
        return Err(Error::InvalidConfig(
            "the SNR sweep protocol uses identical sensors; use the custom experiment otherwise"
                .into(),
        ));
    }
    let mut rows = Vec::new();
    for &k in &r.k_list {
        for &snr_db in &r.snr_db {
            let sc = scenario(r, k, LinkModel::Fading { snr_db })?;
            let estimates = power_at_target(&r.rules, &sc, r.target_pf0, r.cal_runs, r.runs)?;
            for e in estimates {
                rows.push(format!(
                    "{},{},{},{},{}",
                    e.test.rule,
                    k,
                    fmt_sig9(snr_db),
                    fmt_sig9(e.pd0),
                    fmt_sig9(e.stderr)
                ));
            }
        }
    }
    Ok(document(r, "rule,K,snr_db,pd0,stderr", &rows))
}

/// The two reference identical-sensor setups swept in `fig4`.
pub const FIG4_SCENARIOS: [(&str, f64, f64); 2] = [("A", 0.05, 0.5), ("B", 0.4, 0.6)];

/// Detection probability against network size at a fixed false-alarm
/// target, for the two reference local-performance scenarios.
/// Columns: `scenario_label, rule, snr_db, K, pd0, stderr`.
pub fn run_fig4(r: &ResolvedExperiment) -> Result<String> {
    expect_kind(r, ExperimentKind::Fig4Pd0VsK)?;
    if r.sensor_kind != SensorKind::Iid {
        return Err(Error::InvalidConfig(
            "the network-size sweep uses the identical-sensor scenarios A and B".into(),
        ));
    }
    let mut rows = Vec::new();
    for (label, pf, pd) in FIG4_SCENARIOS {
        for &snr_db in &r.snr_db {
            for &k in &r.k_list {
                let sc = Scenario::realize(ScenarioSpec {
                    sensors: k,
                    sensor_model: crate::model::SensorModel::Iid { pf, pd },
                    link_model: LinkModel::Fading { snr_db },
                    priors: r.priors(),
                    seed: r.seed,
                })?;
                let estimates = power_at_target(&r.rules, &sc, r.target_pf0, r.cal_runs, r.runs)?;
                for e in estimates {
                    rows.push(format!(
                        "{},{},{},{},{},{}",
                        label,
                        e.test.rule,
                        fmt_sig9(snr_db),
                        k,
                        fmt_sig9(e.pd0),
                        fmt_sig9(e.stderr)
                    ));
                }
            }
        }
    }
    Ok(document(r, "scenario_label,rule,snr_db,K,pd0,stderr", &rows))
}

/// Fully config-driven ROC experiment: fixed links use the configured `pe`
/// (the `snr_db` column is then empty), fading links sweep the `snr_db`
/// list. Columns: `rule, snr_db, pf0, pd0, stderr`.
pub fn run_custom(r: &ResolvedExperiment) -> Result<String> {
    expect_kind(r, ExperimentKind::Custom)?;
    let grid = log_pf0_grid(r.roc_points);
    let mut rows = Vec::new();
    let mut emit = |snr_label: &str, sc: &Scenario| -> Result<()> {
        let curves = roc_sweep(&r.rules, sc, r.runs, &grid)?;
        for curve in curves {
            for p in &curve.points {
                rows.push(format!(
                    "{},{},{},{},{}",
                    curve.rule,
                    snr_label,
                    fmt_sig9(p.pf0),
                    fmt_sig9(p.pd0),
                    fmt_sig9(p.stderr)
                ));
            }
        }
        Ok(())
    };
    match r.link_kind {
        LinkKind::Fixed => {
            let sc = scenario(r, r.sensors, LinkModel::FixedBep(r.pe.clone()))?;
            emit("", &sc)?;
        }
        LinkKind::Fading => {
            for &snr_db in &r.snr_db {
                let sc = scenario(r, r.sensors, LinkModel::Fading { snr_db })?;
                emit(&fmt_sig9(snr_db), &sc)?;
            }
        }
    }
    Ok(document(r, "rule,snr_db,pf0,pd0,stderr", &rows))
}

fn expect_kind(r: &ResolvedExperiment, kind: ExperimentKind) -> Result<()> {
    if r.kind != kind {
        return Err(Error::InvalidConfig(format!(
            "runner for {} received a {} configuration",
            kind.label(),
            r.kind.label()
        )));
    }
    Ok(())
}

/// Runs the experiment selected by the resolved configuration.
pub fn run(r: &ResolvedExperiment) -> Result<String> {
    match r.kind {
        ExperimentKind::Fig1DeflectionSurface => run_fig1(r),
        ExperimentKind::Fig2Roc => run_fig2(r),
        ExperimentKind::Fig3Pd0VsSnr => run_fig3(r),
        ExperimentKind::Fig4Pd0VsK => run_fig4(r),
        ExperimentKind::Custom => run_custom(r),
    }
}

/// Runs the experiment and writes its CSV to the configured path. The
/// document is generated completely before anything touches the filesystem,
/// and a failed write removes the file rather than leaving a partial one.
pub fn run_to_file(r: &ResolvedExperiment) -> Result<PathBuf> {
    let csv = run(r)?;
    if let Err(e) = fs::write(&r.out, csv) {
        let _ = fs::remove_file(&r.out);
        return Err(e.into());
    }
    Ok(r.out.clone())
}
