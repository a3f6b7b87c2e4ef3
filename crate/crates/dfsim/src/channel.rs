//! Physical reporting links: on-off keying over flat Rayleigh fading with
//! coherent detection.
//!
//! The reporting bit of sensor `k` rides on `x_k = h_k b_k + w_k` with
//! `h_k ~ CN(0, 1)` and `w_k ~ CN(0, sigma_w^2)`. With the channel gain
//! known at the fusion center, each realization maps to a binary symmetric
//! channel with bit-error probability `pe_k = Q(|h_k| / (2 sigma_w))`, which
//! is all the fusion layer ever sees of the physical link.

use crate::error::{Error, Result};
use crate::model::{Priors, SensorModel};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

/// Upper tail of the standard normal distribution, `Q(x) = P(Z > x)`,
/// via the complementary error function.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// `10^(db/10)`.
pub fn snr_db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10 log10(linear)`.
pub fn snr_linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Draws `k` independent Rayleigh channel magnitudes `|h|` with
/// `E[|h|^2] = 1`, i.e. the magnitude of a proper complex Gaussian built
/// from two real Gaussians of variance 1/2.
pub fn draw_fading<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    (0..k)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let re = re * FRAC_1_SQRT_2;
            let im = im * FRAC_1_SQRT_2;
            (re * re + im * im).sqrt()
        })
        .collect()
}

/// Bit-error probability of an on-off keyed link with gain magnitude
/// `h_mag` and noise standard deviation `sigma_w`:
/// `Q(h_mag / (2 sigma_w))`, always in `(0, 1/2]`.
pub fn bep_from_gain(h_mag: f64, sigma_w: f64) -> f64 {
    q_function(h_mag / (2.0 * sigma_w))
}

/// Noise standard deviation realizing a given linear per-sensor SNR.
///
/// The SNR is defined as average received energy over noise power. The
/// transmitted bit carries energy only when it is a 1, so the energy term is
/// the prior-weighted activity probability: `pd P(H1) + pf P(H0)` for
/// identical sensors, and its expectation `(pfu + pde/2)/2` under the
/// heterogeneous draw law (with equal priors folded in).
pub fn sigma_from_snr(snr_linear: f64, sensors: &SensorModel, priors: &Priors) -> Result<f64> {
    if !(snr_linear.is_finite() && snr_linear > 0.0) {
        return Err(Error::OutOfRange {
            name: "snr_linear",
            value: snr_linear,
            lo: f64::MIN_POSITIVE,
            hi: f64::INFINITY,
        });
    }
    sensors.validate()?;
    let sigma_sq = match *sensors {
        SensorModel::Iid { pf, pd } => (pd * priors.p_h1() + pf * priors.p_h0()) / snr_linear,
        SensorModel::Inid { pfu, pde } => (pfu + pde / 2.0) / (2.0 * snr_linear),
    };
    Ok(sigma_sq.sqrt())
}
