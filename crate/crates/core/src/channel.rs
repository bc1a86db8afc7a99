//! AWGN channel and log-distance path loss.
//!
//! Symbols are assumed to come from a unit-energy scheme, so the noise
//! density follows directly from the receive-side SNR: `N0 = 10^(-snr/10)`,
//! and each axis receives zero-mean Gaussian noise of variance `N0 / 2`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constellation::ComplexPoint;
use crate::error::{Error, Result};
use crate::rng;

/// Receive-side Es/N0 in dB together with the seed of its noise stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub es_over_n0_db: f64,
    pub rng_seed: u64,
}

impl ChannelSpec {
    pub fn new(es_over_n0_db: f64, rng_seed: u64) -> Result<Self> {
        if !es_over_n0_db.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "SNR must be finite, got {es_over_n0_db}"
            )));
        }
        Ok(ChannelSpec {
            es_over_n0_db,
            rng_seed,
        })
    }
}

/// `N0` for unit symbol energy at the given Es/N0 in dB.
pub fn noise_density(es_over_n0_db: f64) -> f64 {
    10f64.powf(-es_over_n0_db / 10.0)
}

/// Per-axis Gaussian noise source at a fixed SNR.
#[derive(Debug, Clone, Copy)]
pub struct AwgnChannel {
    sigma: f64,
}

impl AwgnChannel {
    pub fn from_snr_db(es_over_n0_db: f64) -> Self {
        AwgnChannel {
            sigma: (noise_density(es_over_n0_db) / 2.0).sqrt(),
        }
    }

    /// Per-axis standard deviation.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// One noise sample, real part drawn before imaginary part.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexPoint {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        ComplexPoint::new(re * self.sigma, im * self.sigma)
    }

    pub fn apply<R: Rng + ?Sized>(&self, symbols: &mut [ComplexPoint], rng: &mut R) {
        for y in symbols {
            *y += self.sample(rng);
        }
    }
}

/// Returns `symbols` plus AWGN drawn from the stream seeded by `spec`.
pub fn add_awgn(symbols: &[ComplexPoint], spec: &ChannelSpec) -> Vec<ComplexPoint> {
    let mut out = symbols.to_vec();
    let mut rng = rng::stream(spec.rng_seed, &[]);
    AwgnChannel::from_snr_db(spec.es_over_n0_db).apply(&mut out, &mut rng);
    out
}

/// `snr(d) = snr_ref_db - 10 α log10(d / d_ref)` for `d >= d_ref`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossModel {
    pub alpha: f64,
    #[serde(default = "default_d_ref")]
    pub d_ref: f64,
    #[serde(default)]
    pub snr_ref_db: f64,
}

fn default_d_ref() -> f64 {
    1.0
}

impl PathLossModel {
    pub fn new(alpha: f64, d_ref: f64, snr_ref_db: f64) -> Result<Self> {
        let model = PathLossModel {
            alpha,
            d_ref,
            snr_ref_db,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "path-loss exponent must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.d_ref > 0.0 && self.d_ref.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "reference distance must be positive, got {}",
                self.d_ref
            )));
        }
        if !self.snr_ref_db.is_finite() {
            return Err(Error::InvalidArgument("reference SNR must be finite".into()));
        }
        Ok(())
    }

    /// Loss in dB between `d_ref` and `d`.
    pub fn loss_db(&self, d: f64) -> Result<f64> {
        if !(d >= self.d_ref) || !d.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "distance {d} m is below the reference distance {} m",
                self.d_ref
            )));
        }
        Ok(10.0 * self.alpha * (d / self.d_ref).log10())
    }

    pub fn snr_at_distance(&self, d: f64) -> Result<f64> {
        Ok(self.snr_ref_db - self.loss_db(d)?)
    }
}
