//! Probabilistic primitives of the sensing and reporting chain.
//!
//! `K` sensors each take a binary decision about a phenomenon and report one
//! bit to a fusion center over dedicated binary symmetric channels. The state
//! of nature only enters through the per-sensor probability of reporting a 1,
//! written `p1` throughout: `p1 = pd_k` when the phenomenon is present and
//! `p1 = pf_k` when it is absent. Everything else in the crate is built on
//! this module: the per-link marginal [`alpha`], its complement [`beta`], the
//! joint [`log_likelihood`] of a received word, and a trial sampler.

use crate::error::{Error, Result};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

/// Largest decision vector the text parser accepts.
const MAX_PARSE_BITS: usize = 100_000;

/// The two states of nature under test. `H0` is absence, `H1` presence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    pub fn index(self) -> usize {
        match self {
            Hypothesis::H0 => 0,
            Hypothesis::H1 => 1,
        }
    }
}

/// Prior probabilities of the two hypotheses. Stored as `P(H1)` so the
/// unit-sum invariant holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Priors {
    p_h1: f64,
}

impl Priors {
    pub fn new(p_h1: f64) -> Result<Self> {
        check_range("p_h1", p_h1, 0.0, 1.0)?;
        Ok(Self { p_h1 })
    }

    /// Equiprobable hypotheses.
    pub fn uniform() -> Self {
        Self { p_h1: 0.5 }
    }

    pub fn p_h0(&self) -> f64 {
        1.0 - self.p_h1
    }

    pub fn p_h1(&self) -> f64 {
        self.p_h1
    }
}

/// A per-sensor probability parameter, either shared by every sensor
/// (identical sensors) or listed per sensor. The same statistic code then
/// serves both the homogeneous and the heterogeneous scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbParam {
    Shared(f64),
    PerSensor(Vec<f64>),
}

impl ProbParam {
    pub fn shared(p: f64) -> Self {
        ProbParam::Shared(p)
    }

    pub fn per_sensor(p: Vec<f64>) -> Self {
        ProbParam::PerSensor(p)
    }

    /// Value for sensor `k` (broadcasts the shared form).
    pub fn get(&self, k: usize) -> f64 {
        match self {
            ProbParam::Shared(p) => *p,
            ProbParam::PerSensor(v) => v[k],
        }
    }

    pub fn as_shared(&self) -> Option<f64> {
        match self {
            ProbParam::Shared(p) => Some(*p),
            ProbParam::PerSensor(_) => None,
        }
    }

    /// Checks that the parameter can serve `k` sensors and that every entry
    /// is a probability.
    pub fn validate(&self, name: &'static str, k: usize) -> Result<()> {
        match self {
            ProbParam::Shared(p) => check_range(name, *p, 0.0, 1.0),
            ProbParam::PerSensor(v) => {
                if v.len() != k {
                    return Err(Error::DimensionMismatch {
                        what: name,
                        expected: k,
                        got: v.len(),
                    });
                }
                for &p in v {
                    check_range(name, p, 0.0, 1.0)?;
                }
                Ok(())
            }
        }
    }
}

/// Realized per-sensor local performance: false-alarm and detection
/// probabilities for each of the `K` sensors.
///
/// Informativeness (`pf <= pd`) is required; the strict interior ranges of
/// experiment configurations are enforced at the scenario layer so that
/// degenerate boundary cases (perfect sensors, blind sensors) stay usable in
/// analysis code.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorBank {
    pf: Vec<f64>,
    pd: Vec<f64>,
}

impl SensorBank {
    pub fn new(pf: Vec<f64>, pd: Vec<f64>) -> Result<Self> {
        if pf.is_empty() {
            return Err(Error::InvalidConfig("sensor bank needs K >= 1".into()));
        }
        if pf.len() != pd.len() {
            return Err(Error::DimensionMismatch {
                what: "pd",
                expected: pf.len(),
                got: pd.len(),
            });
        }
        for (&f, &d) in pf.iter().zip(&pd) {
            check_range("pf", f, 0.0, 1.0)?;
            check_range("pd", d, 0.0, 1.0)?;
            if d < f {
                return Err(Error::InvalidConfig(format!(
                    "informativeness violated: pd = {d} < pf = {f}"
                )));
            }
        }
        Ok(Self { pf, pd })
    }

    /// Identical sensors.
    pub fn iid(k: usize, pf: f64, pd: f64) -> Result<Self> {
        Self::new(vec![pf; k], vec![pd; k])
    }

    pub fn len(&self) -> usize {
        self.pf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pf.is_empty()
    }

    pub fn pf(&self) -> &[f64] {
        &self.pf
    }

    pub fn pd(&self) -> &[f64] {
        &self.pd
    }

    /// Probability that sensor `k` reports a 1 under hypothesis `h`.
    pub fn p1(&self, k: usize, h: Hypothesis) -> f64 {
        match h {
            Hypothesis::H0 => self.pf[k],
            Hypothesis::H1 => self.pd[k],
        }
    }
}

/// How the local performance of the network's sensors is specified.
///
/// `Iid` gives every sensor the same `(pf, pd)` pair. `Inid` describes the
/// draw law of a heterogeneous network: `pf_k ~ U(0, pfu)` and
/// `pd_k = pf_k + U(0, pde)`, realized once per scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensorModel {
    Iid { pf: f64, pd: f64 },
    Inid { pfu: f64, pde: f64 },
}

impl SensorModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SensorModel::Iid { pf, pd } => {
                check_range("pf", pf, 0.0, 1.0)?;
                check_range("pd", pd, 0.0, 1.0)?;
                if pd < pf {
                    return Err(Error::InvalidConfig(format!(
                        "informativeness violated: pd = {pd} < pf = {pf}"
                    )));
                }
                Ok(())
            }
            SensorModel::Inid { pfu, pde } => {
                check_range("pfu", pfu, 0.0, 1.0)?;
                check_range("pde", pde, 0.0, 1.0)?;
                if pfu <= 0.0 || pde <= 0.0 {
                    return Err(Error::InvalidConfig(
                        "inid draw bounds pfu and pde must be positive".into(),
                    ));
                }
                if pfu + pde > 1.0 {
                    return Err(Error::InvalidConfig(format!(
                        "pfu + pde = {} > 1 could realize pd > 1",
                        pfu + pde
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_inid(&self) -> bool {
        matches!(self, SensorModel::Inid { .. })
    }
}

/// Realized per-link bit-error probabilities, one per sensor.
///
/// Links worse than a coin flip are excluded (`pe <= 1/2`).
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    pe: Vec<f64>,
}

impl LinkState {
    pub fn new(pe: Vec<f64>) -> Result<Self> {
        if pe.is_empty() {
            return Err(Error::InvalidConfig("link state needs K >= 1".into()));
        }
        for &e in &pe {
            check_range("pe", e, 0.0, 0.5)?;
        }
        Ok(Self { pe })
    }

    /// Identical links.
    pub fn constant(k: usize, pe: f64) -> Result<Self> {
        Self::new(vec![pe; k])
    }

    /// Construction from values already known to lie in [0, 1/2].
    pub(crate) fn from_validated(pe: Vec<f64>) -> Self {
        debug_assert!(pe.iter().all(|e| (0.0..=0.5).contains(e)));
        Self { pe }
    }

    pub fn len(&self) -> usize {
        self.pe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pe.is_empty()
    }

    pub fn pe(&self) -> &[f64] {
        &self.pe
    }
}

/// The received word: one hard bit per sensor as observed by the fusion
/// center after the reporting channels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecisionVector {
    bits: Vec<u8>,
}

impl DecisionVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidConfig("decision vector needs K >= 1".into()));
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidConfig(format!(
                "decision vector entries must be 0 or 1, got {b}"
            )));
        }
        Ok(Self { bits })
    }

    /// Outcome `index` interpreted bit by bit, sensor `k` taking bit `k`.
    /// Used by the exhaustive 2^K enumerations.
    pub fn from_index(index: u64, k: usize) -> Self {
        assert!((1..64).contains(&k), "from_index supports 1 <= K < 64");
        let bits = (0..k).map(|j| ((index >> j) & 1) as u8).collect();
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, k: usize) -> u8 {
        self.bits[k]
    }

    /// Number of ones.
    pub fn ones(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// The bitwise complement.
    pub fn flipped(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|&b| 1 - b).collect(),
        }
    }
}

impl fmt::Display for DecisionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for DecisionVector {
    type Err = Error;

    /// Parses a compact bit string such as `"10110"`.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("decision vector is empty".into()));
        }
        if s.len() > MAX_PARSE_BITS {
            return Err(Error::Parse(format!(
                "decision vector longer than {MAX_PARSE_BITS} bits"
            )));
        }
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => {
                    return Err(Error::Parse(format!(
                        "decision vector may only contain 0 and 1, got {c:?}"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }
}

/// Iterator over all `2^K` possible received words, in index order.
pub fn enumerate_outcomes(k: usize) -> impl Iterator<Item = DecisionVector> {
    assert!((1..64).contains(&k));
    (0u64..(1u64 << k)).map(move |i| DecisionVector::from_index(i, k))
}

/// Probability that a link with bit-error probability `pe_k` delivers a 1
/// when the sensor emits a 1 with probability `p1`:
/// `alpha = (1 - 2 pe_k) p1 + pe_k`.
pub fn alpha(pe_k: f64, p1: f64) -> Result<f64> {
    check_range("pe", pe_k, 0.0, 0.5)?;
    check_range("p1", p1, 0.0, 1.0)?;
    Ok(alpha_raw(pe_k, p1))
}

/// Complement of [`alpha`]: probability of observing a 0.
pub fn beta(pe_k: f64, p1: f64) -> Result<f64> {
    Ok(1.0 - alpha(pe_k, p1)?)
}

#[inline]
pub(crate) fn alpha_raw(pe_k: f64, p1: f64) -> f64 {
    (1.0 - 2.0 * pe_k) * p1 + pe_k
}

/// Joint log-pmf of a received word:
/// `sum_k y_k ln alpha_k + (1 - y_k) ln beta_k`.
///
/// A term with zero weight is skipped (the `0 * ln 0 = 0` convention), so the
/// only error case is a log that would be `-inf` with nonzero weight.
pub fn log_likelihood(y: &DecisionVector, p1: &ProbParam, pe: &LinkState) -> Result<f64> {
    let k = check_same_len(y, pe)?;
    p1.validate("p1", k)?;
    let mut total = 0.0;
    for (j, (&bit, &e)) in y.bits().iter().zip(pe.pe()).enumerate() {
        let a = alpha_raw(e, p1.get(j));
        let term = if bit == 1 { a } else { 1.0 - a };
        if term <= 0.0 {
            return Err(Error::DegeneratePmf(format!(
                "sensor {j}: observed y = {bit} has probability 0"
            )));
        }
        total += term.ln();
    }
    Ok(total)
}

/// Joint pmf of a received word, the exponential of [`log_likelihood`]
/// computed directly as a product. Unlike the log form this tolerates
/// zero-probability terms (the pmf is simply 0 there).
pub fn pmf(y: &DecisionVector, p1: &ProbParam, pe: &LinkState) -> Result<f64> {
    let k = check_same_len(y, pe)?;
    p1.validate("p1", k)?;
    let mut prod = 1.0;
    for (j, (&bit, &e)) in y.bits().iter().zip(pe.pe()).enumerate() {
        let a = alpha_raw(e, p1.get(j));
        prod *= if bit == 1 { a } else { 1.0 - a };
    }
    Ok(prod)
}

/// Draws one received word: sensor `k` contributes an independent
/// `Bernoulli(alpha(pe_k, p1_k))` bit, with `p1_k` picked from the bank
/// according to the hypothesis in force.
///
/// The caller owns the random stream; trials are reproducible by handing in
/// streams derived from a master seed (see the `montecarlo` module).
pub fn sample_decision_vector<R: Rng + ?Sized>(
    bank: &SensorBank,
    pe: &LinkState,
    h: Hypothesis,
    rng: &mut R,
) -> Result<DecisionVector> {
    if bank.len() != pe.len() {
        return Err(Error::DimensionMismatch {
            what: "pe",
            expected: bank.len(),
            got: pe.len(),
        });
    }
    let bits = (0..bank.len())
        .map(|k| {
            let a = alpha_raw(pe.pe()[k], bank.p1(k, h));
            u8::from(rng.random::<f64>() < a)
        })
        .collect();
    Ok(DecisionVector { bits })
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            lo,
            hi,
        })
    }
}

pub(crate) fn check_same_len(y: &DecisionVector, pe: &LinkState) -> Result<usize> {
    if y.len() != pe.len() {
        return Err(Error::DimensionMismatch {
            what: "pe",
            expected: y.len(),
            got: pe.len(),
        });
    }
    Ok(y.len())
}
