//! `dfsim`: decision-fusion experiments for wireless sensor networks.
//!
//! The `fig1`..`fig4` subcommands reproduce the reference experiments as CSV
//! datasets; `custom` runs a fully config-driven ROC sweep; `eval` prints a
//! single statistic value; `calibrate` reports the randomized threshold for
//! a false-alarm target.

use clap::{Args, Parser, Subcommand};
use dfsim::config::{ExperimentConfig, ExperimentKind, LinkKind};
use dfsim::config::{parse_prob_list, parse_prob_param};
use dfsim::experiments;
use dfsim::montecarlo::{self, LinkModel, Scenario, ScenarioSpec};
use dfsim::{DecisionVector, Error, LinkState, ProbParam, RuleContext, RuleId};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "dfsim",
    version,
    about = "Channel-aware decision fusion experiments for wireless sensor networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-sensor deflection surface of the counting vs estimator rule
    Fig1(RunArgs),
    /// ROC curves per rule and SNR
    Fig2(RunArgs),
    /// Detection probability vs SNR at a fixed false-alarm rate
    Fig3(RunArgs),
    /// Detection probability vs network size at a fixed false-alarm rate
    Fig4(RunArgs),
    /// Config-driven ROC experiment
    Custom(RunArgs),
    /// Evaluate one fusion statistic on a received word
    Eval(EvalArgs),
    /// Calibrate a rule to a false-alarm target and report gamma and rho
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat JSON config file; unset keys take the experiment's defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo runs override (1000000 reproduces the reference scale)
    #[arg(long)]
    runs: Option<u64>,
    /// Output CSV path override
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// One of: lrt, is, lod, lod_inid, cr, wu, lowsnr_is, lowsnr_lod, lowsnr_lrt
    #[arg(long)]
    rule: String,
    /// Received word as a bit string, e.g. 1011
    #[arg(long)]
    y: String,
    /// Link bit-error probabilities, comma separated; one value broadcasts
    #[arg(long)]
    pe: Option<String>,
    /// Sensor false-alarm probability: one shared value or a comma list
    #[arg(long)]
    pf: Option<String>,
    /// Sensor detection probability: one shared value or a comma list
    #[arg(long)]
    pd: Option<String>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Rule to calibrate
    #[arg(long)]
    rule: String,
    /// Flat JSON config file describing the scenario
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
    /// Calibration sample size override
    #[arg(long)]
    runs: Option<u64>,
    /// False-alarm target override
    #[arg(long)]
    target: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fig1(args) => run_experiment(ExperimentKind::Fig1DeflectionSurface, &args),
        Command::Fig2(args) => run_experiment(ExperimentKind::Fig2Roc, &args),
        Command::Fig3(args) => run_experiment(ExperimentKind::Fig3Pd0VsSnr, &args),
        Command::Fig4(args) => run_experiment(ExperimentKind::Fig4Pd0VsK, &args),
        Command::Custom(args) => run_experiment(ExperimentKind::Custom, &args),
        Command::Eval(args) => eval(&args),
        Command::Calibrate(args) => calibrate(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> dfsim::Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::from_json(&fs::read_to_string(p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn run_experiment(kind: ExperimentKind, args: &RunArgs) -> dfsim::Result<()> {
    let mut cfg = load_config(args.config.as_ref())?;
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    if let Some(runs) = args.runs {
        cfg.runs = Some(runs);
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.to_string_lossy().into_owned());
    }
    let resolved = cfg.resolve(kind)?;
    for notice in &resolved.notices {
        eprintln!("notice: {notice}");
    }
    let path = experiments::run_to_file(&resolved)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn eval(args: &EvalArgs) -> dfsim::Result<()> {
    let rule: RuleId = args.rule.parse()?;
    let y: DecisionVector = args.y.parse()?;
    let k = y.len();

    let pe = match &args.pe {
        Some(text) => {
            let mut list = parse_prob_list(text)?;
            if list.len() == 1 {
                list = vec![list[0]; k];
            }
            LinkState::new(list)?
        }
        None if rule == RuleId::Cr => LinkState::new(vec![0.0; k])?,
        None => {
            return Err(Error::InvalidConfig(format!(
                "rule {rule} needs --pe"
            )))
        }
    };

    let needs_pf = matches!(
        rule,
        RuleId::Lrt | RuleId::Lod | RuleId::LodInid | RuleId::Wu | RuleId::LowSnrLrt
    );
    let needs_pd = matches!(rule, RuleId::Lrt | RuleId::LowSnrLrt);
    if needs_pf && args.pf.is_none() {
        return Err(Error::InvalidConfig(format!("rule {rule} needs --pf")));
    }
    if needs_pd && args.pd.is_none() {
        return Err(Error::InvalidConfig(format!("rule {rule} needs --pd")));
    }

    let parse_or_nan = |text: &Option<String>| -> dfsim::Result<ProbParam> {
        match text {
            Some(t) => parse_prob_param(t),
            // Unused by the requested rule; poisoned so misuse cannot pass.
            None => Ok(ProbParam::shared(f64::NAN)),
        }
    };
    let ctx = RuleContext {
        pf: parse_or_nan(&args.pf)?,
        pd: parse_or_nan(&args.pd)?,
    };
    let value = dfsim::rules::evaluate(rule, &y, &ctx, &pe)?;
    println!("{value}");
    Ok(())
}

fn calibrate(args: &CalibrateArgs) -> dfsim::Result<()> {
    let rule: RuleId = args.rule.parse()?;
    let mut cfg = load_config(args.config.as_ref())?;
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    if let Some(runs) = args.runs {
        cfg.runs = Some(runs);
    }
    if let Some(target) = args.target {
        cfg.target_pf0 = Some(target);
    }
    let resolved = cfg.resolve(ExperimentKind::Custom)?;
    let link_model = match resolved.link_kind {
        LinkKind::Fixed => LinkModel::FixedBep(resolved.pe.clone()),
        LinkKind::Fading => LinkModel::Fading {
            snr_db: resolved.snr_db[0],
        },
    };
    let sc = Scenario::realize(ScenarioSpec {
        sensors: resolved.sensors,
        sensor_model: resolved.sensor_model(),
        link_model,
        priors: resolved.priors(),
        seed: resolved.seed,
    })?;
    let test = montecarlo::calibrate(rule, &sc, resolved.target_pf0, resolved.runs)?;
    let (pf0, stderr) = montecarlo::validate_false_alarm(&test, &sc, resolved.runs)?;
    println!("rule = {}", test.rule);
    println!("target_pf0 = {}", test.target_pf0);
    println!("n_cal = {}", resolved.runs);
    println!("gamma = {}", test.gamma);
    println!("rho = {}", test.rho);
    println!("validation_pf0 = {pf0}");
    println!("validation_stderr = {stderr}");
    println!("seed = {}", resolved.seed);
    Ok(())
}
