//! Experiment configuration: a single flat JSON document plus the small
//! text grammars used by CLI flags.
//!
//! Every key is optional; unset keys resolve to defaults that reproduce the
//! reference experiment setups, so an empty document is a valid
//! configuration for any experiment. Unknown keys are rejected rather than
//! ignored so that typos fail loudly.

use crate::error::{Error, Result};
use crate::model::{Priors, ProbParam, SensorModel};
use crate::rules::RuleId;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

const MAX_SENSORS: usize = 10_000;
const MAX_LIST: usize = 4_096;

/// The experiments the runner knows how to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig1DeflectionSurface,
    Fig2Roc,
    Fig3Pd0VsSnr,
    Fig4Pd0VsK,
    Custom,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Fig1DeflectionSurface => "fig1_deflection_surface",
            ExperimentKind::Fig2Roc => "fig2_roc",
            ExperimentKind::Fig3Pd0VsSnr => "fig3_pd0_vs_snr",
            ExperimentKind::Fig4Pd0VsK => "fig4_pd0_vs_k",
            ExperimentKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    Iid,
    Inid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Fading,
    Fixed,
}

/// The raw, flat configuration document. All keys optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub sensors: Option<usize>,
    pub sensor_model: Option<SensorKind>,
    pub pf: Option<f64>,
    pub pd: Option<f64>,
    pub pfu: Option<f64>,
    pub pde: Option<f64>,
    pub link: Option<LinkKind>,
    pub pe: Option<Vec<f64>>,
    pub snr_db: Option<Vec<f64>>,
    pub priors_h1: Option<f64>,
    pub seed: Option<u64>,
    pub rules: Option<Vec<String>>,
    pub runs: Option<u64>,
    pub cal_runs: Option<u64>,
    pub target_pf0: Option<f64>,
    pub roc_points: Option<usize>,
    pub grid_points: Option<usize>,
    pub k_list: Option<Vec<usize>>,
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    /// Fills defaults for the given experiment and validates the result.
    /// The subcommand decides the experiment; a conflicting `experiment` key
    /// in the document is an error.
    pub fn resolve(&self, kind: ExperimentKind) -> Result<ResolvedExperiment> {
        if let Some(stated) = self.experiment {
            if stated != kind {
                return Err(Error::InvalidConfig(format!(
                    "config says experiment = {}, but {} was requested",
                    stated.label(),
                    kind.label()
                )));
            }
        }
        let mut notices = Vec::new();

        let sensor_kind = self.sensor_model.unwrap_or(SensorKind::Iid);
        let pf = self.pf.unwrap_or(0.05);
        let pd = self.pd.unwrap_or(0.5);
        let pfu = self.pfu.unwrap_or(0.2);
        let pde = self.pde.unwrap_or(0.6);
        let link_kind = self.link.unwrap_or(LinkKind::Fading);
        let sensors = self.sensors.unwrap_or(10);
        let priors_h1 = self.priors_h1.unwrap_or(0.5);
        let seed = self.seed.unwrap_or(1);
        let runs = self.runs.unwrap_or(100_000);
        let cal_runs = self.cal_runs.unwrap_or(runs);
        let target_pf0 = self.target_pf0.unwrap_or(0.01);
        let roc_points = self.roc_points.unwrap_or(50);
        let grid_points = self.grid_points.unwrap_or(26);

        let snr_db = match &self.snr_db {
            Some(list) => list.clone(),
            None => match kind {
                ExperimentKind::Fig3Pd0VsSnr => {
                    vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
                }
                ExperimentKind::Custom => vec![0.0],
                _ => vec![0.0, 10.0],
            },
        };
        let k_list = match &self.k_list {
            Some(list) => list.clone(),
            None => match kind {
                ExperimentKind::Fig3Pd0VsSnr => vec![10, 30],
                _ => (1..=60).collect(),
            },
        };
        let pe = match &self.pe {
            Some(list) if list.len() == 1 => vec![list[0]; sensors],
            Some(list) => list.clone(),
            None => vec![0.1; sensors],
        };

        let rule_names = match &self.rules {
            Some(names) => {
                let mut parsed = Vec::with_capacity(names.len());
                for name in names {
                    parsed.push(name.parse::<RuleId>()?);
                }
                parsed
            }
            None => match sensor_kind {
                SensorKind::Iid => RuleId::iid_set().to_vec(),
                SensorKind::Inid => RuleId::inid_set().to_vec(),
            },
        };
        let rules = if sensor_kind == SensorKind::Inid {
            let mut kept = Vec::with_capacity(rule_names.len());
            for rule in rule_names {
                match rule {
                    RuleId::Wu => notices.push(
                        "wu is excluded for non-identical sensors: its pd estimate presumes one \
                         common pd"
                            .to_string(),
                    ),
                    RuleId::Lod => {
                        return Err(Error::InvalidConfig(
                            "lod needs a shared pf; use lod_inid for non-identical sensors".into(),
                        ))
                    }
                    other => kept.push(other),
                }
            }
            kept
        } else {
            rule_names
        };
        if rules.is_empty() {
            return Err(Error::InvalidConfig("no rules left to run".into()));
        }

        let out = PathBuf::from(self.out.clone().unwrap_or_else(|| {
            format!("{}.csv", kind.label())
        }));

        let resolved = ResolvedExperiment {
            kind,
            sensors,
            sensor_kind,
            pf,
            pd,
            pfu,
            pde,
            link_kind,
            pe,
            snr_db,
            priors_h1,
            seed,
            rules,
            runs,
            cal_runs,
            target_pf0,
            roc_points,
            grid_points,
            k_list,
            out,
            notices,
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

/// A fully-populated experiment description: every default applied, every
/// range checked. This is what the figure runners consume and what gets
/// echoed into the CSV header.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedExperiment {
    pub kind: ExperimentKind,
    pub sensors: usize,
    pub sensor_kind: SensorKind,
    pub pf: f64,
    pub pd: f64,
    pub pfu: f64,
    pub pde: f64,
    pub link_kind: LinkKind,
    pub pe: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub priors_h1: f64,
    pub seed: u64,
    pub rules: Vec<RuleId>,
    pub runs: u64,
    pub cal_runs: u64,
    pub target_pf0: f64,
    pub roc_points: usize,
    pub grid_points: usize,
    pub k_list: Vec<usize>,
    pub out: PathBuf,
    pub notices: Vec<String>,
}

impl ResolvedExperiment {
    fn validate(&self) -> Result<()> {
        if self.sensors == 0 || self.sensors > MAX_SENSORS {
            return Err(Error::InvalidConfig(format!(
                "sensors must be in 1..={MAX_SENSORS}, got {}",
                self.sensors
            )));
        }
        self.sensor_model().validate()?;
        if self.sensor_kind == SensorKind::Iid {
            // Experiment configurations demand informative, non-degenerate
            // sensors; boundary cases remain available to library callers.
            if !(0.0 < self.pf && self.pf < self.pd && self.pd < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "iid scenarios need 0 < pf < pd < 1, got pf = {}, pd = {}",
                    self.pf, self.pd
                )));
            }
        }
        if !(0.0 < self.priors_h1 && self.priors_h1 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "priors_h1 must be inside (0, 1), got {}",
                self.priors_h1
            )));
        }
        if self.link_kind == LinkKind::Fixed {
            if self.pe.len() != self.sensors {
                return Err(Error::InvalidConfig(format!(
                    "pe lists {} links for {} sensors",
                    self.pe.len(),
                    self.sensors
                )));
            }
            for &e in &self.pe {
                if !(e.is_finite() && (0.0..=0.5).contains(&e)) {
                    return Err(Error::InvalidConfig(format!("pe entry {e} outside [0, 0.5]")));
                }
            }
        }
        if self.snr_db.is_empty() || self.snr_db.len() > MAX_LIST {
            return Err(Error::InvalidConfig("snr_db list empty or too long".into()));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig("snr_db entries must be finite".into()));
        }
        if !(self.target_pf0 > 0.0 && self.target_pf0 <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "target_pf0 must be inside (0, 1], got {}",
                self.target_pf0
            )));
        }
        let needs_mc = !matches!(self.kind, ExperimentKind::Fig1DeflectionSurface);
        if needs_mc && self.runs < 10_000 {
            return Err(Error::InvalidConfig(format!(
                "runs = {} is below the 10000-trial minimum for usable tails",
                self.runs
            )));
        }
        if needs_mc && self.cal_runs == 0 {
            return Err(Error::InvalidConfig("cal_runs must be positive".into()));
        }
        if !(2..=2_000).contains(&self.grid_points) {
            return Err(Error::InvalidConfig(format!(
                "grid_points must be in 2..=2000, got {}",
                self.grid_points
            )));
        }
        if !(2..=10_000).contains(&self.roc_points) {
            return Err(Error::InvalidConfig(format!(
                "roc_points must be in 2..=10000, got {}",
                self.roc_points
            )));
        }
        if self.k_list.is_empty() || self.k_list.len() > MAX_LIST {
            return Err(Error::InvalidConfig("k_list empty or too long".into()));
        }
        if self.k_list.iter().any(|&k| k == 0 || k > MAX_SENSORS) {
            return Err(Error::InvalidConfig(format!(
                "k_list entries must be in 1..={MAX_SENSORS}"
            )));
        }
        if self.kind == ExperimentKind::Fig1DeflectionSurface
            && self.sensor_kind == SensorKind::Inid
        {
            return Err(Error::InvalidConfig(
                "the deflection surface is defined for identical sensors".into(),
            ));
        }
        Ok(())
    }

    pub fn sensor_model(&self) -> SensorModel {
        match self.sensor_kind {
            SensorKind::Iid => SensorModel::Iid {
                pf: self.pf,
                pd: self.pd,
            },
            SensorKind::Inid => SensorModel::Inid {
                pfu: self.pfu,
                pde: self.pde,
            },
        }
    }

    pub fn priors(&self) -> Priors {
        Priors::new(self.priors_h1).expect("validated")
    }
}

/// Parses a comma-separated list of probabilities, e.g. `"0.1,0.2"`.
pub fn parse_prob_list(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, piece) in text.split(',').enumerate() {
        if values.len() >= 100_000 {
            return Err(Error::Parse("probability list too long".into()));
        }
        let trimmed = piece.trim();
        let value: f64 = trimmed
            .parse()
            .map_err(|_| Error::Parse(format!("entry {i}: {trimmed:?} is not a number")))?;
        if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
            return Err(Error::Parse(format!(
                "entry {i}: {value} is not a probability in [0, 1]"
            )));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::Parse("empty probability list".into()));
    }
    Ok(values)
}

/// Parses a probability parameter: a single value means one shared
/// probability, a comma-separated list means per-sensor values.
pub fn parse_prob_param(text: &str) -> Result<ProbParam> {
    let values = parse_prob_list(text)?;
    if values.len() == 1 {
        Ok(ProbParam::shared(values[0]))
    } else {
        Ok(ProbParam::per_sensor(values))
    }
}
