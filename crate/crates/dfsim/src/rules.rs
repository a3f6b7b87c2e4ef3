//! Fusion statistics computed by the fusion center on a received word.
//!
//! Five families are implemented, differing in how much system knowledge
//! they require:
//!
//! | rule        | needs                         |
//! |-------------|-------------------------------|
//! | `lrt`       | `pd`, `pf`, `pe` (clairvoyant benchmark) |
//! | `lod`/`lod_inid` | `pf`, `pe`               |
//! | `wu`        | `pf`, `pe`                    |
//! | `is`        | `pe`                          |
//! | `cr`        | nothing                       |
//!
//! plus the first-order expansions of `lrt`, `is` and `lod` around
//! `pe = 1/2` (`lowsnr_*`), which make the low-SNR equivalence of those
//! rules testable directly.

use crate::analysis::{fisher_information, link_information, link_score, score};
use crate::error::{Error, Result};
use crate::model::{alpha_raw, check_same_len, DecisionVector, LinkState, ProbParam};
use std::fmt;
use std::str::FromStr;

/// Floor applied to `pe` inside the ideal-sensors statistic only. Its weight
/// `ln((1 - pe)/pe)` diverges as a link becomes error free; the floor keeps
/// the arithmetic finite while preserving the divergent weighting trend. It
/// therefore sits at the underflow boundary: any coarser floor (say 1e-12)
/// caps the weights in the high-SNR regime and visibly flattens the rule's
/// characteristic loss there. No other rule is floored: where a log or
/// denominator degenerates elsewhere, that is surfaced as an error.
pub const PE_MIN: f64 = f64::MIN_POSITIVE;

/// Identifier of a fusion statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    /// Clairvoyant likelihood-ratio test.
    Lrt,
    /// Ideal-sensors rule, derived assuming `(pd, pf) = (1, 0)`.
    Is,
    /// Locally optimum detector for identical sensors.
    Lod,
    /// Locally optimum detector with per-sensor false-alarm rates.
    LodInid,
    /// Counting rule: number of received ones.
    Cr,
    /// Estimator rule: approximate ML estimate of `pd` minus `pf`.
    Wu,
    /// First-order expansion of `is` around `pe = 1/2`.
    LowSnrIs,
    /// First-order expansion of `lod` around `pe = 1/2`.
    LowSnrLod,
    /// First-order expansion of `lrt` around `pe = 1/2`.
    LowSnrLrt,
}

impl RuleId {
    pub fn label(self) -> &'static str {
        match self {
            RuleId::Lrt => "lrt",
            RuleId::Is => "is",
            RuleId::Lod => "lod",
            RuleId::LodInid => "lod_inid",
            RuleId::Cr => "cr",
            RuleId::Wu => "wu",
            RuleId::LowSnrIs => "lowsnr_is",
            RuleId::LowSnrLod => "lowsnr_lod",
            RuleId::LowSnrLrt => "lowsnr_lrt",
        }
    }

    /// The comparison set for identical sensors.
    pub fn iid_set() -> &'static [RuleId] {
        &[RuleId::Lrt, RuleId::Lod, RuleId::Is, RuleId::Cr, RuleId::Wu]
    }

    /// The comparison set for non-identical sensors. The estimator rule is
    /// excluded: its estimate presumes one common `pd`.
    pub fn inid_set() -> &'static [RuleId] {
        &[RuleId::Lrt, RuleId::LodInid, RuleId::Is, RuleId::Cr]
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lrt" => Ok(RuleId::Lrt),
            "is" => Ok(RuleId::Is),
            "lod" => Ok(RuleId::Lod),
            "lod_inid" => Ok(RuleId::LodInid),
            "cr" | "counting" => Ok(RuleId::Cr),
            "wu" => Ok(RuleId::Wu),
            "lowsnr_is" => Ok(RuleId::LowSnrIs),
            "lowsnr_lod" => Ok(RuleId::LowSnrLod),
            "lowsnr_lrt" => Ok(RuleId::LowSnrLrt),
            other => Err(Error::Parse(format!("unknown rule {other:?}"))),
        }
    }
}

/// The local-performance knowledge available to the fusion center. Link
/// bit-error probabilities vary per trial and are passed alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleContext {
    pub pf: ProbParam,
    pub pd: ProbParam,
}

impl RuleContext {
    /// Identical sensors: one `(pf, pd)` pair for the whole network.
    pub fn iid(pf: f64, pd: f64) -> Self {
        Self {
            pf: ProbParam::shared(pf),
            pd: ProbParam::shared(pd),
        }
    }

    /// Per-sensor local performance.
    pub fn inid(pf: Vec<f64>, pd: Vec<f64>) -> Self {
        Self {
            pf: ProbParam::per_sensor(pf),
            pd: ProbParam::per_sensor(pd),
        }
    }
}

/// Clairvoyant log-likelihood ratio:
/// `sum_k y_k ln[alpha_k(pd_k)/alpha_k(pf_k)] + (1-y_k) ln[beta_k(pd_k)/beta_k(pf_k)]`.
pub fn lrt(y: &DecisionVector, pd: &ProbParam, pf: &ProbParam, pe: &LinkState) -> Result<f64> {
    let k = check_same_len(y, pe)?;
    pd.validate("pd", k)?;
    pf.validate("pf", k)?;
    let mut total = 0.0;
    for (j, (&bit, &e)) in y.bits().iter().zip(pe.pe()).enumerate() {
        let a_d = alpha_raw(e, pd.get(j));
        let a_f = alpha_raw(e, pf.get(j));
        let (num, den) = if bit == 1 {
            (a_d, a_f)
        } else {
            (1.0 - a_d, 1.0 - a_f)
        };
        if num <= 0.0 || den <= 0.0 {
            return Err(Error::DegeneratePmf(format!(
                "sensor {j}: likelihood ratio term {num}/{den} has no finite log"
            )));
        }
        total += (num / den).ln();
    }
    Ok(total)
}

/// Ideal-sensors statistic: `sum_k (2 y_k - 1) ln[(1 - pe_k)/pe_k]`, with
/// `pe_k` floored at [`PE_MIN`].
pub fn is_rule(y: &DecisionVector, pe: &LinkState) -> Result<f64> {
    check_same_len(y, pe)?;
    Ok(y.bits()
        .iter()
        .zip(pe.pe())
        .map(|(&bit, &e)| {
            let e = e.max(PE_MIN);
            (2.0 * f64::from(bit) - 1.0) * ((1.0 - e) / e).ln()
        })
        .sum())
}

/// Locally optimum detector for identical sensors: the score at `p1 = pf`
/// normalized by the root Fisher information of the whole received word.
pub fn lod(y: &DecisionVector, pf: f64, pe: &LinkState) -> Result<f64> {
    let info = fisher_information(pf, pe)?;
    if info <= 0.0 {
        return Err(Error::ZeroInformation(
            "every link has pe = 1/2".into(),
        ));
    }
    Ok(score(y, &ProbParam::shared(pf), pe)? / info.sqrt())
}

/// Locally optimum detector for non-identical sensors: each sensor's score
/// at its own `pf_k`, normalized by that sensor's root information, summed.
pub fn lod_inid(y: &DecisionVector, pf: &ProbParam, pe: &LinkState) -> Result<f64> {
    let k = check_same_len(y, pe)?;
    pf.validate("pf", k)?;
    let mut total = 0.0;
    for (j, (&bit, &e)) in y.bits().iter().zip(pe.pe()).enumerate() {
        let p = pf.get(j);
        let a = alpha_raw(e, p);
        if a <= 0.0 || a >= 1.0 {
            return Err(Error::DegeneratePmf(format!(
                "sensor {j}: alpha = {a} makes alpha*beta vanish"
            )));
        }
        let info = link_information(p, e);
        if info <= 0.0 {
            return Err(Error::ZeroInformation(format!(
                "sensor {j} has pe = 1/2, its normalizer vanishes"
            )));
        }
        total += link_score(bit, p, e) / info.sqrt();
    }
    Ok(total)
}

/// Counting rule: the number of received ones. Requires no system knowledge.
pub fn counting(y: &DecisionVector) -> f64 {
    y.ones() as f64
}

/// Approximate ML estimate of the common detection probability:
/// `(1/K) sum_k [(1 + 2 pe_k) y_k - pe_k]`.
///
/// Deliberately not clamped to [0, 1]; the raw affine estimator is what the
/// estimator rule thresholds, and clamping would change its distribution.
pub fn wu_estimate(y: &DecisionVector, pe: &LinkState) -> Result<f64> {
    let k = check_same_len(y, pe)?;
    let sum: f64 = y
        .bits()
        .iter()
        .zip(pe.pe())
        .map(|(&bit, &e)| (1.0 + 2.0 * e) * f64::from(bit) - e)
        .sum();
    Ok(sum / k as f64)
}

/// Estimator rule: `wu_estimate(y) - pf`. Defined only for identical
/// sensors; the dispatcher rejects it in heterogeneous scenarios.
pub fn wu(y: &DecisionVector, pf: f64, pe: &LinkState) -> Result<f64> {
    Ok(wu_estimate(y, pe)? - pf)
}

/// First-order expansion of the ideal-sensors statistic around `pe = 1/2`:
/// `2 sum_k (1 - 2 pe_k) y_k`.
pub fn low_snr_is(y: &DecisionVector, pe: &LinkState) -> Result<f64> {
    check_same_len(y, pe)?;
    Ok(2.0 * weighted_ones(y, pe))
}

/// First-order expansion of the locally optimum detector around `pe = 1/2`:
/// `4 sum_k (1 - 2 pe_k) y_k`.
pub fn low_snr_lod(y: &DecisionVector, pe: &LinkState) -> Result<f64> {
    check_same_len(y, pe)?;
    Ok(4.0 * weighted_ones(y, pe))
}

/// First-order expansion of the likelihood-ratio test around `pe = 1/2`:
/// `2 sum_k (pd_k - pf_k)(1 - 2 pe_k)(2 y_k - 1)`.
pub fn low_snr_lrt(
    y: &DecisionVector,
    pd: &ProbParam,
    pf: &ProbParam,
    pe: &LinkState,
) -> Result<f64> {
    let k = check_same_len(y, pe)?;
    pd.validate("pd", k)?;
    pf.validate("pf", k)?;
    Ok(y.bits()
        .iter()
        .zip(pe.pe())
        .enumerate()
        .map(|(j, (&bit, &e))| {
            2.0 * (pd.get(j) - pf.get(j)) * (1.0 - 2.0 * e) * (2.0 * f64::from(bit) - 1.0)
        })
        .sum())
}

fn weighted_ones(y: &DecisionVector, pe: &LinkState) -> f64 {
    y.bits()
        .iter()
        .zip(pe.pe())
        .map(|(&bit, &e)| (1.0 - 2.0 * e) * f64::from(bit))
        .sum()
}

/// Evaluates a rule by id, enforcing the knowledge each rule is allowed to
/// use. `lod` and `wu` require one shared `pf`; in heterogeneous scenarios
/// `lod_inid` replaces the former and the latter is unavailable.
pub fn evaluate(rule: RuleId, y: &DecisionVector, ctx: &RuleContext, pe: &LinkState) -> Result<f64> {
    match rule {
        RuleId::Lrt => lrt(y, &ctx.pd, &ctx.pf, pe),
        RuleId::Is => is_rule(y, pe),
        RuleId::Lod => {
            let pf = ctx.pf.as_shared().ok_or_else(|| Error::RuleUnavailable {
                rule: "lod",
                reason: "needs a shared pf; use lod_inid for per-sensor pf".into(),
            })?;
            lod(y, pf, pe)
        }
        RuleId::LodInid => lod_inid(y, &ctx.pf, pe),
        RuleId::Cr => Ok(counting(y)),
        RuleId::Wu => {
            let pf = ctx.pf.as_shared().ok_or_else(|| Error::RuleUnavailable {
                rule: "wu",
                reason: "its pd estimate presumes identical sensors, so per-sensor pf is rejected"
                    .into(),
            })?;
            wu(y, pf, pe)
        }
        RuleId::LowSnrIs => low_snr_is(y, pe),
        RuleId::LowSnrLod => low_snr_lod(y, pe),
        RuleId::LowSnrLrt => low_snr_lrt(y, &ctx.pd, &ctx.pf, pe),
    }
}
