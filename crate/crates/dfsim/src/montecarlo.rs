//! Reproducible Monte Carlo engine: trial generation, randomized-threshold
//! calibration to an exact system false-alarm rate, and estimation of ROC
//! curves and detection probabilities.
//!
//! # Reproducibility
//!
//! Every random draw comes from a ChaCha substream addressed by
//! `(master seed, sample block, hypothesis, trial index)`. Trials are
//! therefore independent of worker count and of each other, calibration
//! samples never overlap evaluation samples, and a rerun with the same
//! `ScenarioSpec` is bit-identical. Aggregation uses counts and per-index
//! vectors only, so parallel execution cannot reorder a result.
//!
//! Statistics are discrete random variables here, so a plain threshold
//! usually cannot meet a false-alarm target exactly. Calibration returns a
//! randomized test: reject when the statistic exceeds `gamma`, and reject
//! with probability `rho` on ties.

use crate::channel::{bep_from_gain, draw_fading, sigma_from_snr, snr_db_to_linear};
use crate::error::{Error, Result};
use crate::model::{
    check_range, sample_decision_vector, DecisionVector, Hypothesis, LinkState, Priors,
    SensorBank, SensorModel,
};
use crate::rules::{self, RuleContext, RuleId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Substream reserved for the one-off draw of heterogeneous sensor
/// parameters.
const STREAM_PARAMS: u64 = 0;

/// How the reporting links are modelled for a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkModel {
    /// One fixed bit-error probability per link, identical across trials.
    FixedBep(Vec<f64>),
    /// Rayleigh fading redrawn every trial; the per-sensor SNR (in dB) sets
    /// the noise level.
    Fading { snr_db: f64 },
}

/// Complete description of one experiment scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub sensors: usize,
    pub sensor_model: SensorModel,
    pub link_model: LinkModel,
    pub priors: Priors,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sensors == 0 {
            return Err(Error::InvalidConfig("scenario needs K >= 1 sensors".into()));
        }
        self.sensor_model.validate()?;
        if let LinkModel::FixedBep(pe) = &self.link_model {
            if pe.len() != self.sensors {
                return Err(Error::DimensionMismatch {
                    what: "pe",
                    expected: self.sensors,
                    got: pe.len(),
                });
            }
            for &e in pe {
                check_range("pe", e, 0.0, 0.5)?;
            }
        }
        if let LinkModel::Fading { snr_db } = self.link_model {
            if !snr_db.is_finite() {
                return Err(Error::InvalidConfig(format!("snr_db = {snr_db} not finite")));
            }
        }
        Ok(())
    }
}

/// Which substream block a trial belongs to. Calibration, evaluation and
/// validation samples are disjoint by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleBlock {
    Calibration,
    Evaluation,
    Validation,
}

impl SampleBlock {
    fn code(self) -> u64 {
        match self {
            SampleBlock::Calibration => 1,
            SampleBlock::Evaluation => 2,
            SampleBlock::Validation => 3,
        }
    }
}

/// A scenario with its per-sensor parameters realized. For heterogeneous
/// scenarios the `(pf_k, pd_k)` draw happens once here, keyed by the master
/// seed, and stays fixed across all trials; the fusion center's knowledge
/// (`RuleContext`) is derived from the same realization.
#[derive(Debug, Clone)]
pub struct Scenario {
    spec: ScenarioSpec,
    bank: SensorBank,
    ctx: RuleContext,
    sigma_w: Option<f64>,
    fixed_pe: Option<LinkState>,
}

impl Scenario {
    pub fn realize(spec: ScenarioSpec) -> Result<Self> {
        spec.validate()?;
        let k = spec.sensors;
        let (bank, ctx) = match spec.sensor_model {
            SensorModel::Iid { pf, pd } => {
                (SensorBank::iid(k, pf, pd)?, RuleContext::iid(pf, pd))
            }
            SensorModel::Inid { pfu, pde } => {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                rng.set_stream(STREAM_PARAMS);
                let mut pf = Vec::with_capacity(k);
                let mut pd = Vec::with_capacity(k);
                for _ in 0..k {
                    let f = positive_uniform(&mut rng, pfu);
                    let delta = positive_uniform(&mut rng, pde);
                    pf.push(f);
                    pd.push(f + delta);
                }
                (
                    SensorBank::new(pf.clone(), pd.clone())?,
                    RuleContext::inid(pf, pd),
                )
            }
        };
        let sigma_w = match spec.link_model {
            LinkModel::Fading { snr_db } => Some(sigma_from_snr(
                snr_db_to_linear(snr_db),
                &spec.sensor_model,
                &spec.priors,
            )?),
            LinkModel::FixedBep(_) => None,
        };
        let fixed_pe = match &spec.link_model {
            LinkModel::FixedBep(pe) => Some(LinkState::new(pe.clone())?),
            LinkModel::Fading { .. } => None,
        };
        Ok(Self {
            spec,
            bank,
            ctx,
            sigma_w,
            fixed_pe,
        })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    /// Realized per-sensor local performance.
    pub fn bank(&self) -> &SensorBank {
        &self.bank
    }

    /// What the fusion center knows about the sensors.
    pub fn ctx(&self) -> &RuleContext {
        &self.ctx
    }

    /// Noise standard deviation of the fading link model, if applicable.
    pub fn sigma_w(&self) -> Option<f64> {
        self.sigma_w
    }

    fn trial_rng(&self, block: SampleBlock, h: Hypothesis, trial: u64) -> ChaCha8Rng {
        debug_assert!(trial < 1 << 56);
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_stream((block.code() << 60) | ((h.index() as u64) << 56) | trial);
        rng
    }

    /// Generates one trial: the realized link state (fading is redrawn per
    /// trial) and the received word. Deterministic in
    /// `(seed, block, h, trial)`.
    pub fn run_trial(
        &self,
        h: Hypothesis,
        block: SampleBlock,
        trial: u64,
    ) -> (DecisionVector, LinkState) {
        let mut rng = self.trial_rng(block, h, trial);
        let pe = match &self.spec.link_model {
            LinkModel::FixedBep(_) => self.fixed_pe.clone().expect("fixed pe realized"),
            LinkModel::Fading { .. } => {
                let sigma = self.sigma_w.expect("sigma realized for fading");
                let gains = draw_fading(self.spec.sensors, &mut rng);
                LinkState::from_validated(
                    gains.iter().map(|&g| bep_from_gain(g, sigma)).collect(),
                )
            }
        };
        let y = sample_decision_vector(&self.bank, &pe, h, &mut rng)
            .expect("scenario dimensions are validated");
        (y, pe)
    }
}

fn positive_uniform(rng: &mut ChaCha8Rng, upper: f64) -> f64 {
    use rand::Rng;
    loop {
        let v = rng.random::<f64>() * upper;
        if v > 0.0 {
            return v;
        }
    }
}

/// Statistic values of each requested rule over `n` trials of one block.
/// The outer vector is indexed like `rules`; inner vectors by trial index.
pub fn rule_statistics(
    sc: &Scenario,
    rule_ids: &[RuleId],
    h: Hypothesis,
    block: SampleBlock,
    n: u64,
) -> Result<Vec<Vec<f64>>> {
    let per_trial: Result<Vec<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|t| {
            let (y, pe) = sc.run_trial(h, block, t);
            rule_ids
                .iter()
                // +0.0 canonicalizes -0.0 so tie counting sees one atom.
                .map(|&r| rules::evaluate(r, &y, sc.ctx(), &pe).map(|v| v + 0.0))
                .collect()
        })
        .collect();
    let per_trial = per_trial?;
    let mut out = vec![Vec::with_capacity(n as usize); rule_ids.len()];
    for row in per_trial {
        for (i, v) in row.into_iter().enumerate() {
            out[i].push(v);
        }
    }
    Ok(out)
}

/// A fusion rule with a calibrated randomized threshold: decide the
/// phenomenon present when the statistic exceeds `gamma`, and with
/// probability `rho` when it ties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedTest {
    pub rule: RuleId,
    pub gamma: f64,
    pub rho: f64,
    pub target_pf0: f64,
}

/// Smallest observed threshold meeting the target, with the tie-breaking
/// probability that interpolates the remaining mass:
/// `gamma` is the smallest sample value whose strict upper tail is within
/// the target, `rho = (target*n - tail) / #ties`.
///
/// `values` must be sorted ascending. Targets 0 and 1 return the infinite
/// sentinels (never / always decide present).
pub fn threshold_for_target(values: &[f64], target: f64) -> (f64, f64) {
    assert!(!values.is_empty());
    if target <= 0.0 {
        return (f64::INFINITY, 0.0);
    }
    if target >= 1.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let n = values.len();
    let budget = target * n as f64;
    let mut idx = 0;
    while idx < n {
        let v = values[idx];
        let mut j = idx;
        while j < n && values[j] == v {
            j += 1;
        }
        let tail = (n - j) as f64;
        if tail <= budget {
            let ties = (j - idx) as f64;
            let rho = ((budget - tail) / ties).clamp(0.0, 1.0);
            return (v, rho);
        }
        idx = j;
    }
    unreachable!("the largest sample value always has an empty strict tail");
}

/// Calibrates `rule` to the system false-alarm target on `n_cal` fresh H0
/// trials from the calibration block.
pub fn calibrate(
    rule: RuleId,
    sc: &Scenario,
    target_pf0: f64,
    n_cal: u64,
) -> Result<CalibratedTest> {
    let mut tests = calibrate_many(&[rule], sc, target_pf0, n_cal)?;
    Ok(tests.pop().expect("one rule in, one test out"))
}

/// Calibrates several rules on one shared set of H0 trials.
pub fn calibrate_many(
    rule_ids: &[RuleId],
    sc: &Scenario,
    target_pf0: f64,
    n_cal: u64,
) -> Result<Vec<CalibratedTest>> {
    check_range("target_pf0", target_pf0, 0.0, 1.0)?;
    if target_pf0 <= 0.0 || target_pf0 >= 1.0 {
        // Degenerate targets need no sample at all.
        let gamma = if target_pf0 <= 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        return Ok(rule_ids
            .iter()
            .map(|&rule| CalibratedTest {
                rule,
                gamma,
                rho: 0.0,
                target_pf0,
            })
            .collect());
    }
    let tail_mass = n_cal as f64 * target_pf0;
    if tail_mass < 100.0 {
        return Err(Error::InsufficientCalibration {
            min: 100.0,
            got: tail_mass,
        });
    }
    let samples = rule_statistics(sc, rule_ids, Hypothesis::H0, SampleBlock::Calibration, n_cal)?;
    rule_ids
        .iter()
        .zip(samples)
        .map(|(&rule, mut values)| {
            values.sort_unstable_by(f64::total_cmp);
            if values[0] == values[values.len() - 1] {
                return Err(Error::ConstantStatistic);
            }
            let (gamma, rho) = threshold_for_target(&values, target_pf0);
            Ok(CalibratedTest {
                rule,
                gamma,
                rho,
                target_pf0,
            })
        })
        .collect()
}

fn rate_on_sample(values: &[f64], test: &CalibratedTest) -> (f64, f64) {
    let mut above = 0u64;
    let mut ties = 0u64;
    for &v in values {
        if v > test.gamma {
            above += 1;
        } else if v == test.gamma {
            ties += 1;
        }
    }
    let n = values.len() as f64;
    let p = (above as f64 + test.rho * ties as f64) / n;
    (p, (p * (1.0 - p) / n).sqrt())
}

/// Rejection rate of a calibrated test on a fresh sample of `n_runs` trials
/// under hypothesis `h`, with its binomial standard error.
pub fn rejection_rate(
    test: &CalibratedTest,
    sc: &Scenario,
    h: Hypothesis,
    block: SampleBlock,
    n_runs: u64,
) -> Result<(f64, f64)> {
    let values = rule_statistics(sc, &[test.rule], h, block, n_runs)?
        .pop()
        .expect("one rule");
    Ok(rate_on_sample(&values, test))
}

/// System detection probability `P(Lambda > gamma | H1)` (plus randomized
/// ties) on the evaluation block.
pub fn estimate_pd0(test: &CalibratedTest, sc: &Scenario, n_runs: u64) -> Result<(f64, f64)> {
    rejection_rate(test, sc, Hypothesis::H1, SampleBlock::Evaluation, n_runs)
}

/// Achieved false-alarm rate on a validation sample disjoint from the
/// calibration sample.
pub fn validate_false_alarm(
    test: &CalibratedTest,
    sc: &Scenario,
    n_runs: u64,
) -> Result<(f64, f64)> {
    rejection_rate(test, sc, Hypothesis::H0, SampleBlock::Validation, n_runs)
}

/// A calibrated test together with its estimated detection probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    pub test: CalibratedTest,
    pub pd0: f64,
    pub stderr: f64,
}

/// Calibrates every rule to the same false-alarm target and estimates each
/// rule's detection probability, sharing trials across rules.
pub fn power_at_target(
    rule_ids: &[RuleId],
    sc: &Scenario,
    target_pf0: f64,
    n_cal: u64,
    n_runs: u64,
) -> Result<Vec<PowerEstimate>> {
    let tests = calibrate_many(rule_ids, sc, target_pf0, n_cal)?;
    let samples = rule_statistics(sc, rule_ids, Hypothesis::H1, SampleBlock::Evaluation, n_runs)?;
    Ok(tests
        .into_iter()
        .zip(samples)
        .map(|(test, values)| {
            let (pd0, stderr) = rate_on_sample(&values, &test);
            PowerEstimate { test, pd0, stderr }
        })
        .collect())
}

/// One operating point of an empirical ROC curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub pf0: f64,
    pub pd0: f64,
    pub stderr: f64,
}

/// Empirical ROC of one rule: matched `(pf0, pd0)` pairs obtained by
/// sweeping randomized thresholds over the H0 sample quantiles.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub rule: RuleId,
    pub n_runs: u64,
    pub points: Vec<RocPoint>,
}

/// Default false-alarm grid for ROC sweeps: logarithmic from 1e-3 to 1.
pub fn log_pf0_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / (points - 1) as f64))
        .collect()
}

/// Estimates one ROC curve. See [`roc_sweep`] for several rules on shared
/// trials.
pub fn estimate_roc(
    rule: RuleId,
    sc: &Scenario,
    n_runs: u64,
    targets: &[f64],
) -> Result<RocCurve> {
    let mut curves = roc_sweep(&[rule], sc, n_runs, targets)?;
    Ok(curves.pop().expect("one rule in, one curve out"))
}

/// Estimates the ROC of every rule from one shared set of trials:
/// `n_runs` H0 trials supply the threshold quantiles and the achieved
/// false-alarm rates, `n_runs` disjoint H1 trials the detection rates.
pub fn roc_sweep(
    rule_ids: &[RuleId],
    sc: &Scenario,
    n_runs: u64,
    targets: &[f64],
) -> Result<Vec<RocCurve>> {
    if n_runs < 10_000 {
        return Err(Error::InvalidConfig(format!(
            "ROC estimation needs at least 10000 runs for usable tails, got {n_runs}"
        )));
    }
    for &t in targets {
        check_range("target_pf0", t, 0.0, 1.0)?;
    }
    let h0 = rule_statistics(sc, rule_ids, Hypothesis::H0, SampleBlock::Calibration, n_runs)?;
    let h1 = rule_statistics(sc, rule_ids, Hypothesis::H1, SampleBlock::Evaluation, n_runs)?;
    Ok(rule_ids
        .iter()
        .zip(h0.into_iter().zip(h1))
        .map(|(&rule, (mut s0, mut s1))| {
            s0.sort_unstable_by(f64::total_cmp);
            s1.sort_unstable_by(f64::total_cmp);
            let points = targets
                .iter()
                .map(|&t| {
                    let (gamma, rho) = threshold_for_target(&s0, t);
                    let pf0 = rate_on_sorted(&s0, gamma, rho);
                    let pd0 = rate_on_sorted(&s1, gamma, rho);
                    RocPoint {
                        pf0,
                        pd0,
                        stderr: (pd0 * (1.0 - pd0) / n_runs as f64).sqrt(),
                    }
                })
                .collect();
            RocCurve {
                rule,
                n_runs,
                points,
            }
        })
        .collect())
}

fn rate_on_sorted(sorted: &[f64], gamma: f64, rho: f64) -> f64 {
    let first_ge = sorted.partition_point(|&v| v < gamma);
    let first_gt = sorted.partition_point(|&v| v <= gamma);
    let above = (sorted.len() - first_gt) as f64;
    let ties = (first_gt - first_ge) as f64;
    (above + rho * ties) / sorted.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iid_fixed_scenario(k: usize, pf: f64, pd: f64, pe: f64, seed: u64) -> Scenario {
        Scenario::realize(ScenarioSpec {
            sensors: k,
            sensor_model: SensorModel::Iid { pf, pd },
            link_model: LinkModel::FixedBep(vec![pe; k]),
            priors: Priors::uniform(),
            seed,
        })
        .unwrap()
    }

    fn iid_fading_scenario(k: usize, pf: f64, pd: f64, snr_db: f64, seed: u64) -> Scenario {
        Scenario::realize(ScenarioSpec {
            sensors: k,
            sensor_model: SensorModel::Iid { pf, pd },
            link_model: LinkModel::Fading { snr_db },
            priors: Priors::uniform(),
            seed,
        })
        .unwrap()
    }

    /// Exact Binomial(n, p) pmf over the full support, by recurrence.
    fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
        let mut pmf = vec![0.0; n + 1];
        pmf[0] = (1.0 - p).powi(n as i32);
        for j in 1..=n {
            pmf[j] = pmf[j - 1] * ((n - j + 1) as f64 / j as f64) * (p / (1.0 - p));
        }
        pmf
    }

    /// Exact randomized threshold for an integer-valued statistic with the
    /// given pmf: the Neyman-Pearson oracle the empirical calibration is
    /// checked against.
    fn exact_threshold(pmf: &[f64], target: f64) -> (f64, f64) {
        for s in 0..pmf.len() {
            let tail: f64 = pmf[s + 1..].iter().sum();
            if tail <= target {
                return (s as f64, (target - tail) / pmf[s]);
            }
        }
        unreachable!()
    }

    #[test]
    fn trials_are_deterministic_and_blocks_are_disjoint() {
        let sc = iid_fading_scenario(10, 0.05, 0.5, 0.0, 42);
        let (y1, pe1) = sc.run_trial(Hypothesis::H0, SampleBlock::Calibration, 7);
        let (y2, pe2) = sc.run_trial(Hypothesis::H0, SampleBlock::Calibration, 7);
        assert_eq!(y1, y2);
        assert_eq!(pe1, pe2);
        let (_, pe3) = sc.run_trial(Hypothesis::H0, SampleBlock::Evaluation, 7);
        assert_ne!(pe1, pe3, "different blocks share a substream");
        let (_, pe4) = sc.run_trial(Hypothesis::H1, SampleBlock::Calibration, 7);
        assert_ne!(pe1, pe4, "different hypotheses share a substream");
    }

    #[test]
    fn inid_realization_is_fixed_per_seed_and_valid() {
        let spec = ScenarioSpec {
            sensors: 64,
            sensor_model: SensorModel::Inid {
                pfu: 0.2,
                pde: 0.6,
            },
            link_model: LinkModel::Fading { snr_db: 10.0 },
            priors: Priors::uniform(),
            seed: 9,
        };
        let a = Scenario::realize(spec.clone()).unwrap();
        let b = Scenario::realize(spec).unwrap();
        assert_eq!(a.bank(), b.bank());
        for (&f, &d) in a.bank().pf().iter().zip(a.bank().pd()) {
            assert!(0.0 < f && f < 0.2);
            assert!(f < d && d < 0.8);
        }
    }

    #[test]
    fn trial_marginals_match_alpha() {
        // H0 with pf = 0.05 over pe = 0.1 links: mean bit rate alpha = 0.14.
        let sc = iid_fixed_scenario(10, 0.05, 0.5, 0.1, 11);
        let n = 100_000u64;
        let mut ones = 0usize;
        for t in 0..n {
            let (y, _) = sc.run_trial(Hypothesis::H0, SampleBlock::Evaluation, t);
            ones += y.ones();
        }
        let mean = ones as f64 / (n as f64 * 10.0);
        let sigma = (0.14f64 * 0.86 / (n as f64 * 10.0)).sqrt();
        assert!((mean - 0.14).abs() < 3.0 * sigma, "mean = {mean}");
    }

    #[test]
    fn threshold_selector_handles_atoms_and_corners() {
        let values = vec![0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 3.0, 4.0, 5.0];
        // target 0.2: strict tail of 3.0 is 2/10 = 0.2, of 2.0 is 3/10.
        let (gamma, rho) = threshold_for_target(&values, 0.2);
        assert_eq!(gamma, 3.0);
        assert!((rho - 0.0).abs() < 1e-12);
        // target 0.25: gamma stays 3.0, half a tie's mass gets randomized.
        let (gamma, rho) = threshold_for_target(&values, 0.25);
        assert_eq!(gamma, 3.0);
        assert!((rho - 0.5).abs() < 1e-12);
        assert_eq!(threshold_for_target(&values, 0.0), (f64::INFINITY, 0.0));
        assert_eq!(threshold_for_target(&values, 1.0), (f64::NEG_INFINITY, 0.0));
        // Target below the smallest attainable nonzero rate randomizes the max.
        let (gamma, rho) = threshold_for_target(&values, 0.05);
        assert_eq!(gamma, 5.0);
        assert!((rho - 0.5).abs() < 1e-12);
    }

    #[test]
    fn calibration_matches_exact_binomial_oracle() {
        // Noiseless links, counting rule: the statistic is Binomial(10, 0.05)
        // under H0. The exact oracle gives gamma = 3 and
        // rho = (0.01 - P(S >= 4)) / P(S = 3) = 0.856464.
        let pmf = binomial_pmf(10, 0.05);
        let (gamma_star, rho_star) = exact_threshold(&pmf, 0.01);
        assert_eq!(gamma_star, 3.0);
        assert!((rho_star - 0.8564640).abs() < 1e-6);

        let sc = iid_fixed_scenario(10, 0.05, 0.5, 0.0, 77);
        let test = calibrate(RuleId::Cr, &sc, 0.01, 400_000).unwrap();
        assert_eq!(test.gamma, 3.0);
        assert!(
            (test.rho - rho_star).abs() < 0.05,
            "rho = {}, oracle = {rho_star}",
            test.rho
        );
        // Fresh-sample false alarm within 3 binomial standard errors.
        let (pf0, _) = validate_false_alarm(&test, &sc, 100_000).unwrap();
        let band = 3.0 * (0.01f64 * 0.99 / 100_000.0).sqrt();
        assert!((pf0 - 0.01).abs() < band, "pf0 = {pf0}");
    }

    #[test]
    fn continuous_statistics_need_almost_no_randomization() {
        let sc = iid_fading_scenario(10, 0.05, 0.5, 10.0, 3);
        let test = calibrate(RuleId::Lod, &sc, 0.01, 100_000).unwrap();
        assert!(test.rho < 1e-6, "rho = {}", test.rho);
        assert!(test.gamma.is_finite());
    }

    #[test]
    fn degenerate_targets_use_sentinels() {
        let sc = iid_fixed_scenario(5, 0.05, 0.5, 0.1, 21);
        let always = calibrate(RuleId::Cr, &sc, 1.0, 1000).unwrap();
        assert_eq!(always.gamma, f64::NEG_INFINITY);
        let (pd0, _) = estimate_pd0(&always, &sc, 10_000).unwrap();
        assert_eq!(pd0, 1.0);
        let never = calibrate(RuleId::Cr, &sc, 0.0, 1000).unwrap();
        assert_eq!(never.gamma, f64::INFINITY);
        let (pd0, _) = estimate_pd0(&never, &sc, 10_000).unwrap();
        assert_eq!(pd0, 0.0);
    }

    #[test]
    fn calibration_rejects_thin_tails_and_constant_statistics() {
        let sc = iid_fixed_scenario(5, 0.05, 0.5, 0.1, 4);
        assert!(matches!(
            calibrate(RuleId::Cr, &sc, 0.01, 500),
            Err(Error::InsufficientCalibration { .. })
        ));
        let noisy = iid_fixed_scenario(5, 0.05, 0.5, 0.5, 4);
        assert!(matches!(
            calibrate(RuleId::Is, &noisy, 0.01, 100_000),
            Err(Error::ConstantStatistic)
        ));
    }

    #[test]
    fn indistinguishable_hypotheses_give_pd0_equal_to_target() {
        // pd = pf: the test cannot do better than its false-alarm rate.
        let sc = Scenario::realize(ScenarioSpec {
            sensors: 10,
            sensor_model: SensorModel::Iid { pf: 0.2, pd: 0.2 },
            link_model: LinkModel::FixedBep(vec![0.1; 10]),
            priors: Priors::uniform(),
            seed: 15,
        })
        .unwrap();
        let n = 100_000u64;
        let n_cal = 400_000u64;
        let test = calibrate(RuleId::Cr, &sc, 0.01, n_cal).unwrap();
        let (pd0, stderr) = estimate_pd0(&test, &sc, n).unwrap();
        // Validation noise plus calibration noise.
        let band = 3.0 * stderr * (1.0 + n as f64 / n_cal as f64).sqrt();
        assert!((pd0 - 0.01).abs() < band, "pd0 = {pd0}, band = {band}");
    }

    #[test]
    fn perfect_sensors_at_clean_links_detect_always() {
        let sc = Scenario::realize(ScenarioSpec {
            sensors: 10,
            sensor_model: SensorModel::Iid { pf: 0.05, pd: 1.0 },
            link_model: LinkModel::FixedBep(vec![0.0; 10]),
            priors: Priors::uniform(),
            seed: 8,
        })
        .unwrap();
        let test = calibrate(RuleId::Cr, &sc, 0.01, 100_000).unwrap();
        assert!(test.gamma < 10.0);
        let (pd0, _) = estimate_pd0(&test, &sc, 20_000).unwrap();
        assert_eq!(pd0, 1.0);
    }

    #[test]
    fn roc_contains_corners_and_is_monotone() {
        let sc = iid_fading_scenario(10, 0.05, 0.5, 5.0, 33);
        let mut targets = vec![0.0];
        targets.extend(log_pf0_grid(20));
        let curve = estimate_roc(RuleId::Lod, &sc, 20_000, &targets).unwrap();
        let first = curve.points.first().unwrap();
        assert_eq!((first.pf0, first.pd0), (0.0, 0.0));
        let last = curve.points.last().unwrap();
        assert_eq!((last.pf0, last.pd0), (1.0, 1.0));
        for w in curve.points.windows(2) {
            assert!(w[1].pf0 >= w[0].pf0 - 1e-12);
            assert!(w[1].pd0 >= w[0].pd0 - 1e-12);
        }
    }

    #[test]
    fn equal_bep_rules_share_one_roc() {
        // With one shared bit-error probability every rule orders outcomes
        // by the count of ones, so quantile-matched operating points agree
        // within Monte Carlo error. They need not agree exactly: rounding
        // splits the within-count tie classes differently per rule, which
        // perturbs where the randomized threshold falls inside a class.
        let sc = iid_fixed_scenario(10, 0.05, 0.5, 0.15, 12);
        let targets = log_pf0_grid(10);
        let n = 50_000;
        let curves = roc_sweep(
            &[RuleId::Cr, RuleId::Lrt, RuleId::Is, RuleId::Lod, RuleId::Wu],
            &sc,
            n,
            &targets,
        )
        .unwrap();
        let reference = &curves[0];
        for curve in &curves[1..] {
            for (a, b) in reference.points.iter().zip(&curve.points) {
                // Achieved false alarm always interpolates to the target.
                assert!((a.pf0 - b.pf0).abs() < 1e-12);
                assert!(
                    (a.pd0 - b.pd0).abs() < 0.02,
                    "{} vs cr at pf0 = {}: {} vs {}",
                    curve.rule,
                    a.pf0,
                    b.pd0,
                    a.pd0
                );
            }
        }
    }

    #[test]
    fn ideal_sensors_rule_loses_at_high_snr() {
        // At 10 dB the ideal-sensors assumption misweights the links and
        // the rule falls measurably below the clairvoyant benchmark at
        // some operating point.
        let sc = iid_fading_scenario(10, 0.05, 0.5, 10.0, 44);
        let targets = log_pf0_grid(15);
        let curves = roc_sweep(&[RuleId::Lrt, RuleId::Is], &sc, 50_000, &targets).unwrap();
        let (lrt, is) = (&curves[0], &curves[1]);
        let strictly_below = lrt
            .points
            .iter()
            .zip(&is.points)
            .any(|(a, b)| a.pd0 - b.pd0 > 3.0 * (a.stderr + b.stderr));
        assert!(strictly_below, "no operating point separates is from lrt");
    }

    #[test]
    fn results_are_independent_of_worker_count() {
        let sc = iid_fading_scenario(10, 0.05, 0.5, 10.0, 2);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let test = calibrate(RuleId::Lod, &sc, 0.01, 50_000).unwrap();
                let (pd0, _) = estimate_pd0(&test, &sc, 50_000).unwrap();
                (test.gamma, test.rho, pd0)
            })
        };
        assert_eq!(run(1), run(4));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn achieved(values: &[f64], gamma: f64, rho: f64) -> f64 {
            let above = values.iter().filter(|&&v| v > gamma).count() as f64;
            let ties = values.iter().filter(|&&v| v == gamma).count() as f64;
            (above + rho * ties) / values.len() as f64
        }

        proptest! {
            // The randomized threshold interpolates any target exactly on
            // the calibration sample, for atom-heavy and continuous-ish
            // samples alike.
            #[test]
            fn randomized_threshold_hits_any_target(
                atoms in proptest::collection::vec(0u8..6, 1..200),
                spread in proptest::collection::vec(0.0f64..1.0, 0..50),
                target in 0.001f64..0.999,
            ) {
                let mut values: Vec<f64> =
                    atoms.iter().map(|&a| f64::from(a)).chain(spread).collect();
                values.sort_unstable_by(f64::total_cmp);
                let (gamma, rho) = threshold_for_target(&values, target);
                prop_assert!((0.0..=1.0).contains(&rho));
                let rate = achieved(&values, gamma, rho);
                prop_assert!(
                    (rate - target).abs() < 1e-9,
                    "achieved {} for target {}",
                    rate,
                    target
                );
            }
        }
    }
}
