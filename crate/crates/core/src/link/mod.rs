//! Downlink link-level simulation.
//!
//! `y = diag(h) · Σ_j x_j(m_j) + n` with AWGN (`h = 1`) or block Rayleigh
//! fading (`h_k ~ CN(0, 1)`, fresh per codeword, known at the receiver).

mod ml;
mod mpa;
mod sweep;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::codebook::CodebookSet;
use crate::error::{Error, Result};

pub use ml::{ml_decode, MlDecoder};
pub use mpa::{mpa_decode, MpaConfig, MpaDecoder, MpaDomain, MpaOutput};
pub use sweep::{ber_sweep, ber_sweep_with, BerCurve, BerPoint, Decoder, Labeling, StopRule, SweepConfig, UserStats, EB_DEFINITION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    #[default]
    Awgn,
    Rayleigh,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    pub h: Vec<Complex64>,
    /// σ² per complex dimension.
    pub noise_variance: f64,
}

impl ChannelSample {
    pub fn awgn(resources: usize, noise_variance: f64) -> Self {
        Self {
            h: vec![Complex64::new(1.0, 0.0); resources],
            noise_variance,
        }
    }

    /// i.i.d. `CN(0, 1)` gains.
    pub fn rayleigh(resources: usize, noise_variance: f64, rng: &mut impl Rng) -> Self {
        Self {
            h: complex_gaussian(resources, 1.0, rng),
            noise_variance,
        }
    }

    pub fn draw(channel: Channel, resources: usize, noise_variance: f64, rng: &mut impl Rng) -> Self {
        match channel {
            Channel::Awgn => Self::awgn(resources, noise_variance),
            Channel::Rayleigh => Self::rayleigh(resources, noise_variance, rng),
        }
    }
}

/// `n` circularly-symmetric complex Gaussian draws with `E|z|² = variance`.
pub fn complex_gaussian(n: usize, variance: f64, rng: &mut impl Rng) -> Vec<Complex64> {
    let sd = (variance / 2.0).sqrt();
    let normal = Normal::new(0.0, sd).expect("finite non-negative variance");
    (0..n)
        .map(|_| Complex64::new(normal.sample(rng), normal.sample(rng)))
        .collect()
}

/// σ² per complex dimension for a given Eb/N0, with `Eb = 1 / log₂M`.
pub fn noise_variance(ebn0_db: f64, order: usize) -> f64 {
    let bits = order.trailing_zeros() as f64;
    1.0 / (bits * 10f64.powf(ebn0_db / 10.0))
}

/// Received vector for the index tuple `indices`.
pub fn transmit(
    set: &CodebookSet,
    indices: &[usize],
    ch: &ChannelSample,
    noise: &[Complex64],
) -> Result<Vec<Complex64>> {
    let k = set.dims().resources;
    for (what, len) in [("channel gains", ch.h.len()), ("noise draws", noise.len())] {
        if len != k {
            return Err(Error::DimensionMismatch {
                what,
                expected: k,
                found: len,
            });
        }
    }
    let x = set.superimpose(indices)?.vector;
    Ok(x.iter()
        .zip(&ch.h)
        .zip(noise)
        .map(|((x, h), n)| h * x + n)
        .collect())
}

pub(crate) fn check_received(set: &CodebookSet, y: &[Complex64], h: &[Complex64], sigma2: f64) -> Result<()> {
    let k = set.dims().resources;
    for (what, len) in [("received vector", y.len()), ("channel gains", h.len())] {
        if len != k {
            return Err(Error::DimensionMismatch {
                what,
                expected: k,
                found: len,
            });
        }
    }
    if y.iter().chain(h).any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("received vector or channel gains"));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!("noise variance {sigma2} must be positive")));
    }
    Ok(())
}
