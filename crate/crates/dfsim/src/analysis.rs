//! Score function, Fisher information and deflection measures.
//!
//! The closed forms here are the quantities a fusion center can evaluate
//! without simulation: the derivative of the log-likelihood in the common
//! report probability `p1`, its information, and the output-SNR-like
//! deflection of the counting and estimator rules. Every closed form is
//! paired with an exhaustive 2^K enumeration (`*_brute_force`) that serves as
//! an independent oracle in the test suites.

use crate::error::{Error, Result};
use crate::model::{
    alpha_raw, check_range, check_same_len, enumerate_outcomes, DecisionVector, Hypothesis,
    LinkState, ProbParam, SensorBank,
};
use crate::rules::{self, RuleContext, RuleId};

/// Exhaustive enumeration cap: 2^20 outcomes is about a million.
pub const MAX_ENUM_SENSORS: usize = 20;

/// Compensated (Neumaier) accumulator. Enumeration sums must be reproducible
/// and accurate enough to act as 1e-10 oracles, so plain `+=` is not enough.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Single-link score term at parameter `p1`, used by both [`score`] and the
/// per-sensor normalization of the heterogeneous detector.
#[inline]
pub(crate) fn link_score(bit: u8, p1: f64, pe: f64) -> f64 {
    let a = alpha_raw(pe, p1);
    let w = 1.0 - 2.0 * pe;
    w * ((f64::from(bit) - pe) - w * p1) / (a * (1.0 - a))
}

/// Single-link Fisher information at parameter `p1`.
#[inline]
pub(crate) fn link_information(p1: f64, pe: f64) -> f64 {
    let a = alpha_raw(pe, p1);
    let w = 1.0 - 2.0 * pe;
    w * w / (a * (1.0 - a))
}

fn check_nondegenerate(p1: &ProbParam, pe: &LinkState) -> Result<()> {
    for (j, &e) in pe.pe().iter().enumerate() {
        let a = alpha_raw(e, p1.get(j));
        if a <= 0.0 || a >= 1.0 {
            return Err(Error::DegeneratePmf(format!(
                "sensor {j}: alpha = {a} makes alpha*beta vanish"
            )));
        }
    }
    Ok(())
}

/// Derivative of the joint log-likelihood in `p1`:
/// `sum_k (1 - 2 pe_k) [(y_k - pe_k) - (1 - 2 pe_k) p1_k] / (alpha_k beta_k)`.
pub fn score(y: &DecisionVector, p1: &ProbParam, pe: &LinkState) -> Result<f64> {
    let k = check_same_len(y, pe)?;
    p1.validate("p1", k)?;
    check_nondegenerate(p1, pe)?;
    Ok(y.bits()
        .iter()
        .zip(pe.pe())
        .enumerate()
        .map(|(j, (&bit, &e))| link_score(bit, p1.get(j), e))
        .sum())
}

/// Fisher information of the received word in the shared parameter `p1`:
/// `sum_k (1 - 2 pe_k)^2 / (alpha_k beta_k)`. Zero exactly when every link
/// is a fair coin.
pub fn fisher_information(p1: f64, pe: &LinkState) -> Result<f64> {
    check_range("p1", p1, 0.0, 1.0)?;
    let shared = ProbParam::shared(p1);
    check_nondegenerate(&shared, pe)?;
    Ok(pe.pe().iter().map(|&e| link_information(p1, e)).sum())
}

/// Per-hypothesis deflections of the counting rule and the estimator rule in
/// an identical-sensor scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflectionPair {
    pub d_cr: f64,
    pub d_wu: f64,
    pub hypothesis: Hypothesis,
}

/// Per-sensor coefficients entering the closed-form deflections:
/// `m_k = (1 - 2 pe_k)(pd - pf)`, `n_k = 1 + 2 pe_k`, and the conditional
/// variances `c_{i,k} = alpha_k(p) beta_k(p)`.
fn deflection_coefficients(
    h: Hypothesis,
    pf: f64,
    pd: f64,
    pe: &LinkState,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let p = match h {
        Hypothesis::H0 => pf,
        Hypothesis::H1 => pd,
    };
    let m = pe.pe().iter().map(|&e| (1.0 - 2.0 * e) * (pd - pf)).collect();
    let n = pe.pe().iter().map(|&e| 1.0 + 2.0 * e).collect();
    let c = pe
        .pe()
        .iter()
        .map(|&e| {
            let a = alpha_raw(e, p);
            a * (1.0 - a)
        })
        .collect();
    (m, n, c)
}

fn check_deflection_inputs(pf: f64, pd: f64) -> Result<()> {
    check_range("pf", pf, 0.0, 1.0)?;
    check_range("pd", pd, 0.0, 1.0)?;
    if pd < pf {
        return Err(Error::InvalidConfig(format!(
            "informativeness violated: pd = {pd} < pf = {pf}"
        )));
    }
    Ok(())
}

/// Closed-form deflection of the counting rule (`Cr`) or the estimator rule
/// (`Wu`) under hypothesis `h`, identical sensors `(pf, pd)`:
///
/// `D_CR = (sum m_k)^2 / sum c_k`, `D_WU = (sum n_k m_k)^2 / sum n_k^2 c_k`.
pub fn deflection_closed_form(
    rule: RuleId,
    h: Hypothesis,
    pf: f64,
    pd: f64,
    pe: &LinkState,
) -> Result<f64> {
    check_deflection_inputs(pf, pd)?;
    let (m, n, c) = deflection_coefficients(h, pf, pd, pe);
    let (num, den) = match rule {
        RuleId::Cr => {
            let sm: f64 = m.iter().sum();
            (sm * sm, c.iter().sum::<f64>())
        }
        RuleId::Wu => {
            let snm: f64 = n.iter().zip(&m).map(|(a, b)| a * b).sum();
            let sden: f64 = n.iter().zip(&c).map(|(a, b)| a * a * b).sum();
            (snm * snm, sden)
        }
        other => {
            return Err(Error::RuleUnavailable {
                rule: other.label(),
                reason: "closed-form deflections exist only for cr and wu".into(),
            })
        }
    };
    if den <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(num / den)
}

/// Both closed-form deflections at once.
pub fn deflection_pair(h: Hypothesis, pf: f64, pd: f64, pe: &LinkState) -> Result<DeflectionPair> {
    Ok(DeflectionPair {
        d_cr: deflection_closed_form(RuleId::Cr, h, pf, pd, pe)?,
        d_wu: deflection_closed_form(RuleId::Wu, h, pf, pd, pe)?,
        hypothesis: h,
    })
}

/// The intermediate Chebyshev/Cauchy-Schwarz bound
/// `D_WU * (sqrt(K) ||n||_2 / ||n||_1)^2`, which sits between `D_WU` and
/// `D_CR`. Exposed as a diagnostic that certifies the dominance chain
/// numerically.
pub fn wu_deflection_bound(h: Hypothesis, pf: f64, pd: f64, pe: &LinkState) -> Result<f64> {
    let d_wu = deflection_closed_form(RuleId::Wu, h, pf, pd, pe)?;
    let k = pe.len() as f64;
    let n2: f64 = pe.pe().iter().map(|&e| (1.0 + 2.0 * e).powi(2)).sum();
    let n1: f64 = pe.pe().iter().map(|&e| 1.0 + 2.0 * e).sum();
    Ok(d_wu * k * n2 / (n1 * n1))
}

/// `D_CR,0 - D_WU,0`: how much deflection the estimator rule gives away
/// relative to plain counting. Nonnegative for every admissible
/// configuration and zero when all links share one bit-error probability.
pub fn deflection_gap(pf: f64, pd: f64, pe: &LinkState) -> Result<f64> {
    let pair = deflection_pair(Hypothesis::H0, pf, pd, pe)?;
    Ok(pair.d_cr - pair.d_wu)
}

/// Deflection of an arbitrary statistic by exact enumeration of all 2^K
/// outcomes: mean shift between hypotheses squared over the variance under
/// `h`. This is the oracle the closed forms are checked against.
pub fn deflection_of_statistic<F>(
    h: Hypothesis,
    bank: &SensorBank,
    pe: &LinkState,
    stat: F,
) -> Result<f64>
where
    F: Fn(&DecisionVector) -> Result<f64>,
{
    let k = bank.len();
    if k > MAX_ENUM_SENSORS {
        return Err(Error::EnumerationTooLarge {
            max: MAX_ENUM_SENSORS,
            got: k,
        });
    }
    if pe.len() != k {
        return Err(Error::DimensionMismatch {
            what: "pe",
            expected: k,
            got: pe.len(),
        });
    }
    let pf = ProbParam::per_sensor(bank.pf().to_vec());
    let pd = ProbParam::per_sensor(bank.pd().to_vec());

    let n = 1usize << k;
    let mut stats = Vec::with_capacity(n);
    let mut w0 = Vec::with_capacity(n);
    let mut w1 = Vec::with_capacity(n);
    for y in enumerate_outcomes(k) {
        stats.push(stat(&y)?);
        w0.push(crate::model::pmf(&y, &pf, pe)?);
        w1.push(crate::model::pmf(&y, &pd, pe)?);
    }

    let mean = |w: &[f64]| {
        let mut acc = CompensatedSum::default();
        for (s, p) in stats.iter().zip(w) {
            acc.add(s * p);
        }
        acc.value()
    };
    let mean0 = mean(&w0);
    let mean1 = mean(&w1);
    let (mean_h, w_h) = match h {
        Hypothesis::H0 => (mean0, &w0),
        Hypothesis::H1 => (mean1, &w1),
    };
    let mut var = CompensatedSum::default();
    for (s, p) in stats.iter().zip(w_h) {
        let d = s - mean_h;
        var.add(d * d * p);
    }
    let var = var.value();

    // A truly constant statistic only differs from its mean by rounding
    // noise; treat that as zero variance rather than dividing by it.
    let scale = stats.iter().fold(0.0f64, |acc, s| acc.max(s.abs()));
    if var <= 1e-28 * scale.max(1.0).powi(2) {
        return Err(Error::ZeroVariance);
    }
    let shift = mean1 - mean0;
    Ok(shift * shift / var)
}

/// [`deflection_of_statistic`] specialised to a named fusion rule.
pub fn deflection_brute_force(
    rule: RuleId,
    h: Hypothesis,
    bank: &SensorBank,
    pe: &LinkState,
    ctx: &RuleContext,
) -> Result<f64> {
    deflection_of_statistic(h, bank, pe, |y| rules::evaluate(rule, y, ctx, pe))
}

/// Mean of the estimator rule's detection-probability estimate under `H1`:
/// `(1/K) sum_k ((1 - 4 pe_k^2) pd + 2 pe_k^2)`. Equals `pd` only when every
/// link is error free; otherwise the estimator is biased toward 1/2.
pub fn wu_estimator_mean(pd: f64, pe: &LinkState) -> f64 {
    let k = pe.len() as f64;
    pe.pe()
        .iter()
        .map(|&e| (1.0 - 4.0 * e * e) * pd + 2.0 * e * e)
        .sum::<f64>()
        / k
}

/// One cell of the two-sensor deflection surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub pe1: f64,
    pub pe2: f64,
    pub d_cr0: f64,
    pub d_wu0: f64,
    pub gap: f64,
}

/// Uniform grid of the two-sensor deflection surface over
/// `(pe1, pe2) in [0, 1/2]^2`, row-major in `pe1`.
pub fn deflection_surface(pf: f64, pd: f64, grid_points: usize) -> Result<Vec<SurfacePoint>> {
    if grid_points < 2 {
        return Err(Error::InvalidConfig(
            "deflection surface needs at least 2 grid points per axis".into(),
        ));
    }
    check_deflection_inputs(pf, pd)?;
    let step = 0.5 / (grid_points - 1) as f64;
    let mut points = Vec::with_capacity(grid_points * grid_points);
    for i in 0..grid_points {
        for j in 0..grid_points {
            let pe1 = i as f64 * step;
            let pe2 = j as f64 * step;
            let pe = LinkState::new(vec![pe1, pe2])?;
            let pair = deflection_pair(Hypothesis::H0, pf, pd, &pe)?;
            points.push(SurfacePoint {
                pe1,
                pe2,
                d_cr0: pair.d_cr,
                d_wu0: pair.d_wu,
                gap: pair.d_cr - pair.d_wu,
            });
        }
    }
    Ok(points)
}

/// Values of a statistic over all 2^K outcomes, in enumeration order.
pub fn statistic_over_outcomes<F>(k: usize, stat: F) -> Result<Vec<f64>>
where
    F: Fn(&DecisionVector) -> Result<f64>,
{
    if k > MAX_ENUM_SENSORS {
        return Err(Error::EnumerationTooLarge {
            max: MAX_ENUM_SENSORS,
            got: k,
        });
    }
    enumerate_outcomes(k).map(|y| stat(&y)).collect()
}

/// Whether two statistics induce the same ordering of outcomes.
///
/// Two detectors put behind optimally chosen thresholds perform identically
/// exactly when they rank the outcomes identically, so this is the testable
/// form of rule equivalence. Values closer than `tol` (scaled by magnitude)
/// count as a tie; a tie in one ordering must then be a tie in the other.
pub fn orderings_agree(a: &[f64], b: &[f64], tol: f64) -> bool {
    assert_eq!(a.len(), b.len());
    let cmp = |x: f64, y: f64| -> i8 {
        let scale = x.abs().max(y.abs()).max(1.0);
        let d = x - y;
        if d.abs() <= tol * scale {
            0
        } else if d > 0.0 {
            1
        } else {
            -1
        }
    };
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if cmp(a[i], a[j]) != cmp(b[i], b[j]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{log_likelihood, pmf};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ORDER_TOL: f64 = 1e-9;

    #[test]
    fn score_single_bernoulli() {
        // pe = 0 reduces to the Bernoulli score (y - p)/(p(1-p)).
        let pe = LinkState::new(vec![0.0]).unwrap();
        let y = DecisionVector::new(vec![1]).unwrap();
        let s = score(&y, &ProbParam::shared(0.5), &pe).unwrap();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn score_hand_value() {
        // alpha = (0.14, 0.23): 0.8*(0.9 - 0.04)/0.1204 + 0.6*(0.8 - 0.03)/0.1771.
        let pe = LinkState::new(vec![0.1, 0.2]).unwrap();
        let y = DecisionVector::new(vec![1, 1]).unwrap();
        let s = score(&y, &ProbParam::shared(0.05), &pe).unwrap();
        let expect = 0.8 * (0.9 - 0.8 * 0.05) / (0.14 * 0.86) + 0.6 * (0.8 - 0.6 * 0.05) / (0.23 * 0.77);
        assert!((s - expect).abs() < 1e-12);
        assert!((s - 8.3229814).abs() < 1e-6);
    }

    #[test]
    fn score_is_zero_mean_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let k = rng.random_range(1..=8usize);
            let pe = LinkState::new((0..k).map(|_| rng.random_range(0.0..0.49)).collect()).unwrap();
            let p1 = ProbParam::shared(rng.random_range(0.05..0.95));
            let mean: f64 = enumerate_outcomes(k)
                .map(|y| pmf(&y, &p1, &pe).unwrap() * score(&y, &p1, &pe).unwrap())
                .sum();
            assert!(mean.abs() < 1e-10, "E[score] = {mean}");
        }
    }

    #[test]
    fn fisher_information_hand_values() {
        let pe = LinkState::new(vec![0.0]).unwrap();
        assert!((fisher_information(0.5, &pe).unwrap() - 4.0).abs() < 1e-15);

        let pe = LinkState::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(fisher_information(0.3, &pe).unwrap(), 0.0);

        let pe = LinkState::new(vec![0.1, 0.2]).unwrap();
        let i = fisher_information(0.05, &pe).unwrap();
        let expect = 0.64 / (0.14 * 0.86) + 0.36 / (0.23 * 0.77);
        assert!((i - expect).abs() < 1e-12);
        assert!((i - 7.3483645).abs() < 1e-6);
    }

    #[test]
    fn fisher_information_matches_exhaustive_second_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let k = rng.random_range(1..=10usize);
            let pe = LinkState::new((0..k).map(|_| rng.random_range(0.0..0.5)).collect()).unwrap();
            let p1v = rng.random_range(0.05..0.95);
            let p1 = ProbParam::shared(p1v);
            let second: f64 = enumerate_outcomes(k)
                .map(|y| {
                    pmf(&y, &p1, &pe).unwrap() * score(&y, &p1, &pe).unwrap().powi(2)
                })
                .sum();
            let closed = fisher_information(p1v, &pe).unwrap();
            assert!(
                (second - closed).abs() < 1e-10 * closed.max(1.0),
                "E[score^2] = {second}, closed = {closed}"
            );
        }
    }

    #[test]
    fn score_matches_log_likelihood_derivative() {
        // Central difference in p1 with h = 1e-6 reproduces the score.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let h = 1e-6;
        for _ in 0..100 {
            let k = rng.random_range(1..=8usize);
            let pe = LinkState::new((0..k).map(|_| rng.random_range(0.0..0.5)).collect()).unwrap();
            let p1 = rng.random_range(0.05..0.9);
            let y = DecisionVector::new((0..k).map(|_| u8::from(rng.random::<f64>() < 0.5)).collect()).unwrap();
            let up = log_likelihood(&y, &ProbParam::shared(p1 + h), &pe).unwrap();
            let dn = log_likelihood(&y, &ProbParam::shared(p1 - h), &pe).unwrap();
            let fd = (up - dn) / (2.0 * h);
            let s = score(&y, &ProbParam::shared(p1), &pe).unwrap();
            assert!(
                (fd - s).abs() < 1e-6 * s.abs().max(1.0),
                "fd = {fd}, score = {s}"
            );
        }
    }

    #[test]
    fn deflections_coincide_for_equal_beps() {
        let pe = LinkState::new(vec![0.2, 0.2, 0.2]).unwrap();
        let pair = deflection_pair(Hypothesis::H0, 0.05, 0.5, &pe).unwrap();
        assert!((pair.d_cr - pair.d_wu).abs() < 1e-12 * pair.d_cr.max(1.0));
        assert!(deflection_gap(0.05, 0.5, &pe).unwrap().abs() < 1e-12);
    }

    #[test]
    fn deflection_hand_example() {
        // (pe1, pe2) = (0.1, 0.4), (pf, pd) = (0.05, 0.5):
        // m = (0.36, 0.09), n = (1.2, 1.8),
        // c0 = (0.14*0.86, 0.41*0.59) = (0.1204, 0.2419).
        let pe = LinkState::new(vec![0.1, 0.4]).unwrap();
        let d_cr = deflection_closed_form(RuleId::Cr, Hypothesis::H0, 0.05, 0.5, &pe).unwrap();
        let d_wu = deflection_closed_form(RuleId::Wu, Hypothesis::H0, 0.05, 0.5, &pe).unwrap();
        let cr_expect = 0.45f64.powi(2) / (0.1204 + 0.2419);
        let wu_expect = 0.594f64.powi(2) / (1.44 * 0.1204 + 3.24 * 0.2419);
        assert!((d_cr - cr_expect).abs() < 1e-12);
        assert!((d_wu - wu_expect).abs() < 1e-12);
        assert!((d_cr - 0.5589291).abs() < 1e-6);
        assert!((d_wu - 0.3686388).abs() < 1e-6);
        let gap = deflection_gap(0.05, 0.5, &pe).unwrap();
        assert!((gap - 0.1902903).abs() < 1e-6);
    }

    #[test]
    fn closed_form_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let k = rng.random_range(2..=8usize);
            let pf: f64 = rng.random_range(0.01..0.4);
            let pd = (pf + rng.random_range(0.05..0.5)).min(0.99);
            let pe = LinkState::new((0..k).map(|_| rng.random_range(0.0..0.5)).collect()).unwrap();
            let bank = SensorBank::iid(k, pf, pd).unwrap();
            let ctx = RuleContext::iid(pf, pd);
            for h in [Hypothesis::H0, Hypothesis::H1] {
                for rule in [RuleId::Cr, RuleId::Wu] {
                    let closed = deflection_closed_form(rule, h, pf, pd, &pe).unwrap();
                    let brute = deflection_brute_force(rule, h, &bank, &pe, &ctx).unwrap();
                    assert!(
                        (closed - brute).abs() < 1e-10,
                        "{rule:?}/{h:?}: closed {closed} vs brute {brute}"
                    );
                }
            }
        }
    }

    #[test]
    fn dominance_chain_holds_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let k = rng.random_range(2..=10usize);
            let pf: f64 = rng.random_range(0.01..0.4);
            let pd = (pf + rng.random_range(0.05..0.5)).min(0.99);
            let pe = LinkState::new((0..k).map(|_| rng.random_range(0.0..0.5)).collect()).unwrap();
            for h in [Hypothesis::H0, Hypothesis::H1] {
                let pair = deflection_pair(h, pf, pd, &pe).unwrap();
                let bound = wu_deflection_bound(h, pf, pd, &pe).unwrap();
                assert!(pair.d_wu <= bound + 1e-12, "wu {} > bound {}", pair.d_wu, bound);
                assert!(bound <= pair.d_cr + 1e-12, "bound {} > cr {}", bound, pair.d_cr);
            }
        }
    }

    #[test]
    fn brute_force_rejects_constant_statistics_and_large_k() {
        let bank = SensorBank::iid(3, 0.05, 0.5).unwrap();
        let pe = LinkState::constant(3, 0.5).unwrap();
        let ctx = RuleContext::iid(0.05, 0.5);
        // All links at pe = 1/2 make the ideal-sensors statistic constant 0.
        assert!(matches!(
            deflection_brute_force(RuleId::Is, Hypothesis::H0, &bank, &pe, &ctx),
            Err(Error::ZeroVariance)
        ));
        let big = SensorBank::iid(21, 0.05, 0.5).unwrap();
        let pe21 = LinkState::constant(21, 0.1).unwrap();
        assert!(matches!(
            deflection_brute_force(RuleId::Cr, Hypothesis::H0, &big, &pe21, &ctx),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn wu_estimator_mean_hand_values() {
        let pe0 = LinkState::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(wu_estimator_mean(0.5, &pe0), 0.5);
        // pd = 1/2 is a fixed point of the bias map.
        let pe = LinkState::new(vec![0.3]).unwrap();
        assert!((wu_estimator_mean(0.5, &pe) - 0.5).abs() < 1e-15);
        assert!((wu_estimator_mean(0.8, &pe) - 0.692).abs() < 1e-15);
    }

    #[test]
    fn wu_estimator_mean_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..30 {
            let k = rng.random_range(1..=10usize);
            let pf: f64 = rng.random_range(0.01..0.4);
            let pd = (pf + rng.random_range(0.05..0.5)).min(0.99);
            let pe = LinkState::new((0..k).map(|_| rng.random_range(0.0..=0.5)).collect()).unwrap();
            let p1 = ProbParam::shared(pd);
            let mean: f64 = enumerate_outcomes(k)
                .map(|y| pmf(&y, &p1, &pe).unwrap() * rules::wu_estimate(&y, &pe).unwrap())
                .sum();
            let closed = wu_estimator_mean(pd, &pe);
            assert!((mean - closed).abs() < 1e-12, "{mean} vs {closed}");
        }
    }

    #[test]
    fn surface_is_nonnegative_and_zero_on_diagonal() {
        let surface = deflection_surface(0.05, 0.5, 11).unwrap();
        assert_eq!(surface.len(), 121);
        for p in &surface {
            assert!(p.gap >= -1e-12, "gap at ({}, {}) = {}", p.pe1, p.pe2, p.gap);
            if p.pe1 == p.pe2 {
                assert!(p.gap.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ordering_comparison_detects_agreement_and_disagreement() {
        let a = vec![0.0, 1.0, 2.0, 3.0];
        let b = vec![10.0, 20.0, 30.0, 40.0]; // same order
        let c = vec![0.0, 1.0, 3.0, 2.0]; // swapped tail
        assert!(orderings_agree(&a, &b, ORDER_TOL));
        assert!(!orderings_agree(&a, &c, ORDER_TOL));
        // Ties must map to ties.
        let d = vec![0.0, 0.0, 1.0];
        let e = vec![0.0, 1e-15, 1.0];
        let f = vec![0.0, 0.5, 1.0];
        assert!(orderings_agree(&d, &e, ORDER_TOL));
        assert!(!orderings_agree(&d, &f, ORDER_TOL));
    }
}
